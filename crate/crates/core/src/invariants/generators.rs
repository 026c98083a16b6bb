//! Seeded random words for each subgroup.
//!
//! Each subgroup draws from its own ChaCha stream, so the first n words of a
//! pool do not depend on how many words are requested. Words in G and H start
//! with a k = 1 flow, which moves the boundary circle non-rigidly; without one
//! the Euler cocycle vanishes and the boundary-dependent identities are vacuous.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::maps::{FactorSpec, HamSpec, MapWord, TwistSpec, WordSpec};

pub const MAX_FACTORS: usize = 3;
pub const MAX_TIME: f64 = 0.5;

/// Subgroup a generated word belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subgroup {
    /// Origin-fixing words.
    G,
    /// Origin-fixing, identity on the boundary.
    GRel,
    /// All words.
    H,
    /// Identity on the boundary.
    HRel,
}

impl Subgroup {
    fn stream(self) -> u64 {
        match self {
            Subgroup::G => 1,
            Subgroup::GRel => 2,
            Subgroup::H => 3,
            Subgroup::HRel => 4,
        }
    }
}

pub struct WordGenerator {
    rng: ChaCha8Rng,
    subgroup: Subgroup,
    count: usize,
}

impl WordGenerator {
    pub fn new(seed: u64, subgroup: Subgroup) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(subgroup.stream());
        Self { rng, subgroup, count: 0 }
    }

    fn coeff(&mut self) -> f64 {
        self.rng.gen_range(-1.0..=1.0)
    }

    fn exp(&mut self) -> i8 {
        if self.rng.gen_bool(0.5) {
            1
        } else {
            -1
        }
    }

    fn twist(&mut self, min_m: u32) -> FactorSpec {
        let m = self.rng.gen_range(min_m..=2);
        let len = self.rng.gen_range(1..=3);
        let poly_r2 = (0..len).map(|_| self.coeff()).collect();
        FactorSpec::Twist(TwistSpec { m, poly_r2, exp: self.exp() })
    }

    fn ham(&mut self, k: u32, linear: bool) -> FactorSpec {
        let mut q =
            vec![vec![self.coeff(), self.coeff(), self.coeff()], vec![self.coeff(), self.coeff()], vec![self.coeff()]];
        if !linear {
            q[0][1] = 0.0;
            q[1][0] = 0.0;
        }
        let time = self.rng.gen_range(-MAX_TIME..=MAX_TIME);
        FactorSpec::Ham(HamSpec { k, q, time, steps: None, exp: self.exp() })
    }

    /// Boundary-moving k = 1 flows get half the draws in G and H so that χ varies;
    /// `lead` forces one.
    fn factor(&mut self, lead: bool) -> FactorSpec {
        let pick = if lead { 1 } else { self.rng.gen_range(0..4) };
        match (self.subgroup, pick) {
            (Subgroup::G, 0) => self.twist(0),
            (Subgroup::G, 1 | 2) => self.ham(1, false),
            (Subgroup::G, _) => self.ham(2, false),
            (Subgroup::GRel, 0) => self.twist(1),
            (Subgroup::GRel, _) => self.ham(2, false),
            (Subgroup::H, 0) => self.twist(0),
            (Subgroup::H, 1 | 2) => self.ham(1, true),
            (Subgroup::H, _) => self.ham(2, true),
            (Subgroup::HRel, 0 | 1) => self.twist(1),
            (Subgroup::HRel, _) => self.ham(2, true),
        }
    }

    pub fn next_spec(&mut self) -> WordSpec {
        let n = self.rng.gen_range(1..=MAX_FACTORS);
        let moving = matches!(self.subgroup, Subgroup::G | Subgroup::H);
        let factors = (0..n).map(|i| self.factor(moving && i == 0)).collect();
        self.count += 1;
        WordSpec { name: format!("{:?}-{}", self.subgroup, self.count - 1).to_lowercase(), factors }
    }

    pub fn next_word(&mut self) -> Result<MapWord<f64>> {
        self.next_spec().build()
    }
}

/// The first `n` words of a subgroup's stream.
pub fn word_pool(seed: u64, subgroup: Subgroup, n: usize) -> Result<Vec<MapWord<f64>>> {
    let mut gen = WordGenerator::new(seed, subgroup);
    (0..n).map(|_| gen.next_word()).collect()
}
