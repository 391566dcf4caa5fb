//! Scalar arithmetic in Z/p^k with moduli below 2^62.

/// Largest exponent whose power still leaves headroom for u128 products.
pub fn max_exponent(p: u64) -> u32 {
    let mut k = 0u32;
    let mut acc: u128 = 1;
    while acc * (p as u128) <= (1u128 << 62) {
        acc *= p as u128;
        k += 1;
    }
    k
}

#[inline]
pub fn pow_u64(p: u64, k: u32) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(p).expect("modulus overflow");
    }
    acc
}

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn addmod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub fn submod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

#[inline]
pub fn negmod(a: u64, m: u64) -> u64 {
    if a == 0 {
        0
    } else {
        m - a
    }
}

/// Reduce a signed integer into [0, m).
#[inline]
pub fn from_i64(a: i64, m: u64) -> u64 {
    let r = (a as i128).rem_euclid(m as i128);
    r as u64
}

/// Symmetric representative in (-m/2, m/2].
pub fn to_signed(a: u64, m: u64) -> i64 {
    if a > m / 2 {
        -((m - a) as i64)
    } else {
        a as i64
    }
}

pub fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

/// p-adic valuation of a residue mod p^k (returns k for zero).
pub fn val(a: u64, p: u64, k: u32) -> u32 {
    if a == 0 {
        return k;
    }
    let mut v = 0;
    let mut x = a;
    while x.is_multiple_of(p) && v < k {
        x /= p;
        v += 1;
    }
    v
}

/// Inverse of a unit mod m via extended Euclid.
pub fn inv(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Exponent k with n = p^k, if any.
pub fn log_exact(n: u64, p: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let mut k = 0;
    let mut x = n;
    while x.is_multiple_of(p) {
        x /= p;
        k += 1;
    }
    (x == 1).then_some(k)
}

/// floor(log_p(k)) for k >= 1.
pub fn floor_log(k: u64, p: u64) -> u32 {
    let mut e = 0;
    let mut acc = p;
    while acc <= k {
        e += 1;
        acc = acc.saturating_mul(p);
    }
    e
}
