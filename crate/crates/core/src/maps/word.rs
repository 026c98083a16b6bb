use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::geometry::Point;
use crate::scalar::Scalar;

use super::{HamiltonianPrimitive, JacobianSample, TwistPrimitive};

#[derive(Debug, Clone, PartialEq)]
pub enum Primitive<T> {
    Twist(TwistPrimitive<T>),
    Ham(HamiltonianPrimitive<T>),
}

impl<T: Scalar> Primitive<T> {
    pub fn fixes_origin(&self) -> bool {
        match self {
            Primitive::Twist(_) => true,
            Primitive::Ham(h) => h.fixes_origin(),
        }
    }

    pub fn boundary_identity(&self) -> bool {
        match self {
            Primitive::Twist(t) => t.boundary_identity(),
            Primitive::Ham(h) => h.boundary_identity(),
        }
    }
}

/// A primitive raised to ±1. Flow factors carry a step multiplier used by
/// step-control audits.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor<T> {
    pub primitive: Arc<Primitive<T>>,
    pub exp: i8,
    pub step_scale: usize,
}

impl<T: Scalar> Factor<T> {
    fn inverse(&self) -> Self {
        Self { exp: -self.exp, ..self.clone() }
    }

    fn apply(&self, p: Point<T>) -> Result<Point<T>> {
        match self.primitive.as_ref() {
            Primitive::Twist(t) => Ok(t.apply(p, self.exp)),
            Primitive::Ham(h) => h.apply(p, self.exp, self.step_scale),
        }
    }

    fn eval_full(&self, p: Point<T>) -> Result<(Point<T>, JacobianSample<T>, T)> {
        match self.primitive.as_ref() {
            Primitive::Twist(t) => Ok((t.apply(p, self.exp), t.jacobian(p, self.exp), t.action(p, self.exp))),
            Primitive::Ham(h) => h.flow_full(p, self.exp, self.step_scale),
        }
    }
}

/// Composition `f₁ ∘ f₂ ∘ … ∘ fₙ` of primitive factors; `apply` runs right to left.
#[derive(Debug, Clone, PartialEq)]
pub struct MapWord<T> {
    factors: Vec<Factor<T>>,
}

/// Subgroup membership of a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub in_h: bool,
    pub in_h_rel: bool,
    pub in_g: bool,
    pub in_g_rel: bool,
}

impl<T: Scalar> MapWord<T> {
    pub fn identity() -> Self {
        Self { factors: Vec::new() }
    }

    pub fn from_factors(factors: Vec<Factor<T>>) -> Self {
        Self { factors }
    }

    pub fn factors(&self) -> &[Factor<T>] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Rotation by `a`, as a constant-profile twist.
    pub fn rotation(a: T) -> Self {
        Self::from_factors(vec![Factor::new(Primitive::Twist(TwistPrimitive::new(0, vec![a])), 1)])
    }

    pub fn fixes_origin(&self) -> bool {
        self.factors.iter().all(|f| f.primitive.fixes_origin())
    }

    pub fn boundary_identity(&self) -> bool {
        self.factors.iter().all(|f| f.primitive.boundary_identity())
    }

    pub fn has_flows(&self) -> bool {
        self.factors.iter().any(|f| matches!(f.primitive.as_ref(), Primitive::Ham(_)))
    }

    /// Same word with every flow integrated using `scale` times as many steps.
    pub fn with_step_scale(&self, scale: usize) -> Self {
        Self::from_factors(
            self.factors.iter().map(|f| Factor { step_scale: f.step_scale * scale.max(1), ..f.clone() }).collect(),
        )
    }

    pub fn apply(&self, p: Point<T>) -> Result<Point<T>> {
        self.factors.iter().rev().try_fold(p, |q, f| f.apply(q))
    }

    /// Image, Jacobian and action `S` (with g*η − η = dS, S accumulated along
    /// the factors) at `p`.
    pub fn eval_full(&self, p: Point<T>) -> Result<(Point<T>, JacobianSample<T>, T)> {
        let mut q = p;
        let mut jac = JacobianSample::identity();
        let mut action = T::zero();
        for f in self.factors.iter().rev() {
            let (next, d, s) = f.eval_full(q)?;
            jac = d.mul(&jac);
            action = action + s;
            q = next;
        }
        Ok((q, jac, action))
    }

    pub fn jacobian(&self, p: Point<T>) -> Result<JacobianSample<T>> {
        Ok(self.eval_full(p)?.1)
    }

    /// Potential `S_g` with g*η − η = dS_g, normalized by S_g(o) = 0 for each
    /// primitive. Independent of any quadrature.
    pub fn action(&self, p: Point<T>) -> Result<T> {
        Ok(self.eval_full(p)?.2)
    }

    /// Stable identifier of the word's content.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(&self.to_spec("")).expect("word spec serializes");
        let hash = Sha256::digest(json.as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

pub fn inverse_word<T: Scalar>(word: &MapWord<T>) -> MapWord<T> {
    MapWord::from_factors(word.factors.iter().rev().map(Factor::inverse).collect())
}

/// `(a ∘ b)(p) = a(b(p))`.
pub fn compose_words<T: Scalar>(a: &MapWord<T>, b: &MapWord<T>) -> MapWord<T> {
    let mut factors = a.factors.clone();
    factors.extend(b.factors.iter().cloned());
    MapWord::from_factors(factors)
}

pub fn classify_word<T: Scalar>(word: &MapWord<T>) -> Membership {
    let in_g = word.fixes_origin();
    let rel = word.boundary_identity();
    Membership { in_h: true, in_h_rel: rel, in_g, in_g_rel: in_g && rel }
}

/// Uniform sample of the disk.
pub(crate) fn sample_disk<T: Scalar, R: Rng>(rng: &mut R) -> Point<T> {
    let r: f64 = rng.gen::<f64>().sqrt();
    let th: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
    Point::new(T::lit(r * th.cos()), T::lit(r * th.sin()))
}

/// max |det Dg − 1| over `n_samples` uniform points.
pub fn symplectic_residual<T: Scalar>(word: &MapWord<T>, n_samples: usize, seed: u64) -> Result<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::zero();
    for _ in 0..n_samples.max(1) {
        let p = sample_disk::<T, _>(&mut rng);
        let d = word.jacobian(p)?.det();
        worst = worst.max((d - T::one()).abs());
    }
    Ok(worst)
}
