//! Exact elements of Z[ζ] for ζ a primitive p^e-th root of unity, in the
//! basis 1, ζ, …, ζ^{φ(p^e)−1}.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CyclotomicInt {
    p: u64,
    e: u32,
    c: Vec<i64>,
}

fn order(p: u64, e: u32) -> usize {
    p.pow(e) as usize
}

fn phi(p: u64, e: u32) -> usize {
    if e == 0 {
        1
    } else {
        ((p - 1) * p.pow(e - 1)) as usize
    }
}

impl CyclotomicInt {
    /// Reduce a polynomial in ζ of any degree.
    pub fn from_poly(p: u64, e: u32, poly: &[i64]) -> CyclotomicInt {
        let q = order(p, e);
        let d = phi(p, e);
        let mut c = vec![0i64; q.max(1)];
        for (i, &a) in poly.iter().enumerate() {
            c[i % q.max(1)] += a;
        }
        if e > 0 {
            // ζ^d = −Σ_{j<p−1} ζ^{j·p^{e−1}}
            let step = q / p as usize;
            for i in (d..q).rev() {
                let a = c[i];
                if a != 0 {
                    c[i] = 0;
                    for j in 0..(p as usize - 1) {
                        c[i - d + j * step] -= a;
                    }
                }
            }
        }
        c.truncate(d);
        CyclotomicInt { p, e, c }
    }

    pub fn from_int(p: u64, e: u32, v: i64) -> CyclotomicInt {
        CyclotomicInt::from_poly(p, e, &[v])
    }

    /// ζ^k.
    pub fn zeta_pow(p: u64, e: u32, k: u64) -> CyclotomicInt {
        let q = order(p, e) as u64;
        let mut poly = vec![0i64; (k % q) as usize + 1];
        poly[(k % q) as usize] = 1;
        CyclotomicInt::from_poly(p, e, &poly)
    }

    pub fn root_order(&self) -> u64 {
        order(self.p, self.e) as u64
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.c
    }

    fn same(&self, o: &CyclotomicInt) {
        assert_eq!((self.p, self.e), (o.p, o.e), "root orders differ");
    }

    pub fn add(&self, o: &CyclotomicInt) -> CyclotomicInt {
        self.same(o);
        CyclotomicInt { c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(), ..self.clone() }
    }

    pub fn sub(&self, o: &CyclotomicInt) -> CyclotomicInt {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> CyclotomicInt {
        CyclotomicInt { c: self.c.iter().map(|a| -a).collect(), ..self.clone() }
    }

    pub fn scale(&self, s: i64) -> CyclotomicInt {
        CyclotomicInt { c: self.c.iter().map(|a| a * s).collect(), ..self.clone() }
    }

    pub fn mul(&self, o: &CyclotomicInt) -> CyclotomicInt {
        self.same(o);
        let mut poly = vec![0i64; self.c.len() + o.c.len()];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                poly[i + j] += a * b;
            }
        }
        CyclotomicInt::from_poly(self.p, self.e, &poly)
    }

    /// Complex conjugate, ζ ↦ ζ^{−1}.
    pub fn conj(&self) -> CyclotomicInt {
        self.galois(order(self.p, self.e) as u64 - 1)
    }

    /// ζ ↦ ζ^a for a prime to p.
    pub fn galois(&self, a: u64) -> CyclotomicInt {
        let q = order(self.p, self.e);
        let mut poly = vec![0i64; q];
        for (i, &x) in self.c.iter().enumerate() {
            poly[(i as u64 * a % q as u64) as usize] += x;
        }
        CyclotomicInt::from_poly(self.p, self.e, &poly)
    }

    /// The same number written with roots of order p^{e'}, e' ≥ e.
    pub fn lift_order(&self, e2: u32) -> CyclotomicInt {
        assert!(e2 >= self.e);
        let s = self.p.pow(e2 - self.e) as usize;
        let mut poly = vec![0i64; self.c.len() * s + 1];
        for (i, &x) in self.c.iter().enumerate() {
            poly[i * s] = x;
        }
        CyclotomicInt::from_poly(self.p, e2, &poly)
    }

    pub fn as_integer(&self) -> Option<i64> {
        self.c[1..].iter().all(|&x| x == 0).then_some(self.c[0])
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }
}

impl fmt::Display for CyclotomicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let mag = a.unsigned_abs();
            let sign = if a < 0 { "-" } else { "+" };
            if first {
                if a < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (i, mag) {
                (0, m) => write!(f, "{m}")?,
                (_, 1) => {}
                (_, m) => write!(f, "{m}*")?,
            }
            match i {
                0 => {}
                1 => f.write_str("z")?,
                _ => write!(f, "z^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}
