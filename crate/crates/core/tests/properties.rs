//! Randomised algebraic properties across groups and coefficient rings.

use grouplog::characters::Determinants;
use grouplog::groupring::parse::parse_element;
use grouplog::groupring::GroupRingElem;
use grouplog::padiclog::{group_log, guard, nu_over_p};
use grouplog::pgroup::build_group;
use grouplog::suites::parse_ring;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CELLS: [(u64, &str, &str); 6] =
    [(2, "D8", "Zp"), (2, "Q8", "unram:2"), (2, "C4xC2", "powser:2"), (3, "C9", "Zp"), (3, "H27", "Zp"), (2, "SD16", "Zp")];

fn cell(i: usize) -> (grouplog::Ring, grouplog::pgroup::Group) {
    let (p, g, r) = CELLS[i % CELLS.len()];
    (parse_ring(p, r, 8).unwrap(), build_group(g, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(i in 0usize..6, seed in any::<u64>()) {
        let (r, g) = cell(i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [a, b, c] = [0, 1, 2].map(|_| GroupRingElem::random(&r, &g, &mut rng, 8));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.add(&b).phi(), a.phi().add(&b.phi()));
        // φ kills commutators ab − ba
        prop_assert!(a.mul(&b).sub(&b.mul(&a)).phi().is_zero());
    }

    #[test]
    fn log_is_a_homomorphism(i in 0usize..6, seed in any::<u64>()) {
        let (r, g) = cell(i);
        let n = 5;
        let w = n + guard(&g, n) + 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let one = GroupRingElem::one(&r, &g, w);
        let u = one.add(&GroupRingElem::random_in_i(&r, &g, &mut rng, w));
        let v = one.add(&GroupRingElem::random_in_i(&r, &g, &mut rng, w));
        let luv = group_log(&u.mul(&v), n).unwrap();
        prop_assert_eq!(luv.clone(), group_log(&u, n).unwrap().add(&group_log(&v, n).unwrap()));
        prop_assert_eq!(luv, group_log(&v.mul(&u), n).unwrap());
        prop_assert_eq!(group_log(&u.invert().unwrap(), n).unwrap(), group_log(&u, n).unwrap().neg());
    }

    #[test]
    fn determinants_are_multiplicative(i in 0usize..6, seed in any::<u64>()) {
        let (r, g) = cell(i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dets = Determinants::new(&r, &g).unwrap();
        let one = GroupRingElem::one(&r, &g, 8);
        let u = one.add(&GroupRingElem::random_in_i(&r, &g, &mut rng, 8));
        let v = one.add(&GroupRingElem::random_in_i(&r, &g, &mut rng, 8));
        for k in 0..dets.table().len() {
            prop_assert_eq!(dets.det_value(&u.mul(&v), k), dets.det_value(&u, k).mul(&dets.det_value(&v, k)));
        }
        prop_assert!(dets.det_equal(&u.mul(&v), &v.mul(&u)).unwrap());
    }

    #[test]
    fn parse_round_trips_display(i in 0usize..6, seed in any::<u64>()) {
        let (r, g) = cell(i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = GroupRingElem::random(&r, &g, &mut rng, 8);
        let back = parse_element(&x.format_with(true), &r, &g, 3).unwrap();
        prop_assert_eq!(back, x);
    }
}

#[test]
fn nu_is_log_over_p_on_a_known_element() {
    // C2 over Z_2: ν(1 + 2(c − 1))/p computed by hand from log(−3) = log 3 ≡ 4 mod 16
    let r = parse_ring(2, "Zp", 10).unwrap();
    let g = build_group("C2", 2).unwrap();
    let u = parse_element("1 + 2*(c - 1) @2^12", &r, &g, 12).unwrap();
    let got = nu_over_p(&u, 3).unwrap();
    // L(u) = log 3·(1 − c) = 4 − 4c mod 16, so L/p = 2 − 2c mod 8
    assert_eq!(got.format_with(true), "2*[1] + 6*[c] @2^3");
}
