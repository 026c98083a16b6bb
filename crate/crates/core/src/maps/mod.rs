//! Area-preserving maps of the disk as words in analytic twists and
//! Hamiltonian flows.

mod hamiltonian;
pub mod poly;
mod spec;
mod twist;
mod word;

pub use hamiltonian::{default_steps, HamiltonianPrimitive, STEPS_PER_UNIT_TIME};
pub use spec::{make_ham_flow, make_twist, FactorSpec, HamSpec, TwistSpec, WordSpec};
pub use twist::TwistPrimitive;
pub use word::{
    classify_word, compose_words, inverse_word, symplectic_residual, Factor, MapWord, Membership, Primitive,
};

use crate::scalar::Scalar;

/// Row-major 2×2 derivative `[[m00, m01], [m10, m11]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianSample<T> {
    pub m: [[T; 2]; 2],
}

impl<T: Scalar> JacobianSample<T> {
    pub fn new(m00: T, m01: T, m10: T, m11: T) -> Self {
        Self { m: [[m00, m01], [m10, m11]] }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn rotation(a: T) -> Self {
        let (s, c) = a.sin_cos();
        Self::new(c, -s, s, c)
    }

    pub fn det(&self) -> T {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, o: &Self) -> Self {
        let a = &self.m;
        let b = &o.m;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }

    pub fn apply(&self, v: (T, T)) -> (T, T) {
        (self.m[0][0] * v.0 + self.m[0][1] * v.1, self.m[1][0] * v.0 + self.m[1][1] * v.1)
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        let mut d = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.m[i][j] - o.m[i][j]).abs());
            }
        }
        d
    }
}
