//! Shared fixtures for the benchmarks.

use grouplog::groupring::GroupRingElem;
use grouplog::padiclog::guard;
use grouplog::pgroup::{build_group, Group};
use grouplog::suites::parse_ring;
use grouplog::Ring;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Fixture {
    pub ring: Ring,
    pub group: Group,
    pub n: u32,
    pub rng: ChaCha8Rng,
}

impl Fixture {
    pub fn new(p: u64, group: &str, ring: &str, n: u32) -> Fixture {
        Fixture {
            ring: parse_ring(p, ring, n).expect("ring"),
            group: build_group(group, p).expect("group"),
            n,
            rng: ChaCha8Rng::seed_from_u64(7),
        }
    }

    /// Digits needed on inputs of `group_log(·, n)`.
    pub fn work(&self) -> u32 {
        self.n + guard(&self.group, self.n) + 2
    }

    pub fn one_unit(&mut self) -> GroupRingElem {
        let w = self.work();
        GroupRingElem::one(&self.ring, &self.group, w).add(&GroupRingElem::random_in_i(&self.ring, &self.group, &mut self.rng, w))
    }

    pub fn random(&mut self) -> GroupRingElem {
        let w = self.work();
        GroupRingElem::random(&self.ring, &self.group, &mut self.rng, w)
    }
}
