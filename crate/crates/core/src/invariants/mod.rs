//! The named functionals and cocycles on map words, and the identity checkers.

mod area;
pub mod convergence;
pub mod generators;
pub mod identities;
pub mod model;
pub mod report;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{eval_eta, line_integral, pull_covector, CotangentSample, Estimate, Path, Point, QuadratureSpec};
use crate::maps::MapWord;
use crate::scalar::Scalar;

pub use area::{area_profile, AreaProfile};

/// A computed invariant with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantValue<T> {
    pub value: T,
    pub est_error: T,
    pub quadrature: QuadratureSpec,
}

impl<T: Scalar> InvariantValue<T> {
    pub fn from_estimate(e: Estimate<T>, quadrature: &QuadratureSpec) -> Self {
        Self { value: e.value, est_error: e.est_error, quadrature: *quadrature }
    }

    pub fn exact(value: T, quadrature: &QuadratureSpec) -> Self {
        Self { value, est_error: T::zero(), quadrature: *quadrature }
    }
}

/// Integration path used for the ILM cocycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathStrategy {
    Chord,
    BoundaryArc,
}

/// (g*η − η)_p.
pub fn displacement<T: Scalar>(word: &MapWord<T>, p: Point<T>) -> Result<CotangentSample<T>> {
    let (q, jac, _) = word.eval_full(p)?;
    Ok(pull_covector(eval_eta(q.clamped()), &jac) - eval_eta(p))
}

/// (g*α − α)_p for an arbitrary primitive α.
pub fn displacement_of<T, F>(word: &MapWord<T>, alpha: &F, p: Point<T>) -> Result<CotangentSample<T>>
where
    T: Scalar,
    F: Fn(Point<T>) -> CotangentSample<T>,
{
    let (q, jac, _) = word.eval_full(p)?;
    Ok(pull_covector(alpha(q.clamped()), &jac) - alpha(p))
}

fn require(ok: bool, membership: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::DomainError { membership })
    }
}

/// τ(g) = ∫_γ (g*η − η) along γ(t) = (t, 0); defined on origin-fixing words.
pub fn tau<T: Scalar>(word: &MapWord<T>, spec: &QuadratureSpec) -> Result<InvariantValue<T>> {
    require(word.fixes_origin(), "in_G")?;
    let e = line_integral(|p| displacement(word, p), &Path::radial_gamma(), spec)?;
    Ok(InvariantValue::from_estimate(e, spec))
}

/// The flux homomorphism: the τ integral restricted to boundary-relative,
/// origin-fixing words.
pub fn flux<T: Scalar>(word: &MapWord<T>, spec: &QuadratureSpec) -> Result<InvariantValue<T>> {
    require(word.fixes_origin() && word.boundary_identity(), "in_G_rel")?;
    tau(word, spec)
}

/// 𝒦(g)(p) = ∫_{x₀}^p (η − g*η) along the chord.
pub fn k_field<T: Scalar>(word: &MapWord<T>, p: Point<T>, spec: &QuadratureSpec) -> Result<InvariantValue<T>> {
    k_field_from(word, Point::x0(), p, spec)
}

/// ∫_{base}^p (η − g*η) along the chord.
pub fn k_field_from<T: Scalar>(
    word: &MapWord<T>,
    base: Point<T>,
    p: Point<T>,
    spec: &QuadratureSpec,
) -> Result<InvariantValue<T>> {
    if p == base {
        return Ok(InvariantValue::exact(T::zero(), spec));
    }
    let e = line_integral(|q| Ok(-displacement(word, q)?), &Path::chord(base, p), spec)?;
    Ok(InvariantValue::from_estimate(e, spec))
}

/// C(g,h) = ∫_{x₀}^{h(x₀)} (g*η − η).
pub fn ilm_c<T: Scalar>(
    g: &MapWord<T>,
    h: &MapWord<T>,
    strategy: PathStrategy,
    spec: &QuadratureSpec,
) -> Result<InvariantValue<T>> {
    let end = h.apply(Point::x0())?;
    let path = match strategy {
        PathStrategy::Chord => Path::chord(Point::x0(), end.clamped()),
        // ψ(0) for the lift of h|∂D with ψ(0) ∈ (−π, π].
        PathStrategy::BoundaryArc => Path::boundary_arc(T::zero(), end.arg()),
    };
    if path.start() == path.end() {
        return Ok(InvariantValue::exact(T::zero(), spec));
    }
    let e = line_integral(|p| displacement(g, p), &path, spec)?;
    Ok(InvariantValue::from_estimate(e, spec))
}

/// C(g,h) by both strategies; fails with `StrategyMismatch` above `10 × tol`.
/// Returns the chord value and the strategy difference.
pub fn ilm_c_checked<T: Scalar>(
    g: &MapWord<T>,
    h: &MapWord<T>,
    spec: &QuadratureSpec,
    tol: f64,
) -> Result<(InvariantValue<T>, f64)> {
    let chord = ilm_c(g, h, PathStrategy::Chord, spec)?;
    let arc = ilm_c(g, h, PathStrategy::BoundaryArc, spec)?;
    let difference = (chord.value - arc.value).abs().as_f64();
    if difference > 10.0 * tol {
        return Err(Error::StrategyMismatch { difference });
    }
    Ok((chord, difference))
}

/// C_{α,base}(g,h) = ∫_{base}^{h(base)} (g*α − α) along the chord, for any primitive α of ω.
pub fn ilm_c_general<T, F>(
    g: &MapWord<T>,
    h: &MapWord<T>,
    alpha: F,
    base: Point<T>,
    spec: &QuadratureSpec,
) -> Result<InvariantValue<T>>
where
    T: Scalar,
    F: Fn(Point<T>) -> CotangentSample<T>,
{
    let end = h.apply(base)?.clamped();
    if end == base {
        return Ok(InvariantValue::exact(T::zero(), spec));
    }
    let e = line_integral(|p| displacement_of(g, &alpha, p), &Path::chord(base, end), spec)?;
    Ok(InvariantValue::from_estimate(e, spec))
}

/// τ₀(g) = ∫_D g*η ∧ η.
pub fn calabi_tau0<T: Scalar>(word: &MapWord<T>, spec: &QuadratureSpec) -> Result<InvariantValue<T>> {
    let p = area_profile(word, spec)?;
    Ok(InvariantValue::from_estimate(p.tau0, spec))
}

/// The Calabi invariant: τ₀ on boundary-relative words.
pub fn calabi<T: Scalar>(word: &MapWord<T>, spec: &QuadratureSpec) -> Result<InvariantValue<T>> {
    require(word.boundary_identity(), "in_H_rel")?;
    calabi_tau0(word, spec)
}

/// κ(g) = ½∫₀^{2π} 𝒦(g)(e^{iθ}) dθ.
pub fn kappa<T: Scalar>(word: &MapWord<T>, spec: &QuadratureSpec) -> Result<InvariantValue<T>> {
    let p = area_profile(word, spec)?;
    Ok(InvariantValue::from_estimate(p.kappa, spec))
}

/// τ′ = τ₀ + κ.
pub fn tau_prime<T: Scalar>(word: &MapWord<T>, spec: &QuadratureSpec) -> Result<InvariantValue<T>> {
    let p = area_profile(word, spec)?;
    Ok(InvariantValue::from_estimate(p.tau0 + p.kappa, spec))
}
