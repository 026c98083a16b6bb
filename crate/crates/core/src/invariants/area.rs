use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    eval_eta, periodic_cumulative, pull_covector, wedge_density, Estimate, Point, PolarGrid, QuadratureSpec,
};
use crate::maps::MapWord;
use crate::scalar::Scalar;

use crate::geometry::MAX_REFINEMENTS;

/// Area-type invariants of one word from a single polar grid: τ₀ = ∫_D g*η ∧ η,
/// ∫_D 𝒦 ω and κ = ½∫_{∂D} 𝒦 dθ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaProfile<T> {
    pub tau0: Estimate<T>,
    pub k_omega: Estimate<T>,
    pub kappa: Estimate<T>,
}

struct Fixed<T> {
    tau0: T,
    k_omega: T,
    kappa: T,
}

/// Boundary samples per grid angle. The boundary integrand ½(1 − φ′) carries
/// more angular modes than the interior densities.
pub const BOUNDARY_OVERSAMPLING: usize = 4;

/// 𝒦 on the grid is integrated along the boundary arc from x₀ to e^{iθ} and then
/// inward along the ray, so every node shares the samples already taken for τ₀.
fn profile_fixed<T: Scalar>(word: &MapWord<T>, radial: usize, angular: usize) -> Result<Fixed<T>> {
    let grid = PolarGrid::<T>::new(radial, angular);
    let nr = grid.radial();
    let nb = angular * BOUNDARY_OVERSAMPLING;

    let boundary: Vec<T> = (0..nb)
        .into_par_iter()
        .map(|i| {
            let th = T::two_pi() * T::from_usize_lossy(i) / T::from_usize_lossy(nb);
            let p = Point::on_boundary(th);
            let (q, jac, _) = word.eval_full(p)?;
            let alpha = eval_eta(p) - pull_covector(eval_eta(q.clamped()), &jac);
            Ok(alpha.apply((-th.sin(), th.cos())))
        })
        .collect::<Result<_>>()?;
    let arc = periodic_cumulative(&boundary);

    let samples: Vec<(T, T)> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let p = grid.point(idx);
            let th = grid.angles[idx / nr];
            let (q, jac, _) = word.eval_full(p)?;
            let pulled = pull_covector(eval_eta(q.clamped()), &jac);
            let eta = eval_eta(p);
            let radial = (eta - pulled).apply((th.cos(), th.sin()));
            Ok((wedge_density(pulled, eta), radial))
        })
        .collect::<Result<_>>()?;

    let density: Vec<T> = samples.iter().map(|s| s.0).collect();
    let mut k_values = Vec::with_capacity(grid.len());
    for i in 0..grid.angular() {
        let ray: Vec<T> = samples[i * nr..(i + 1) * nr].iter().map(|s| s.1).collect();
        let arc_i = arc[i * BOUNDARY_OVERSAMPLING];
        k_values.extend(grid.tail_integrals(&ray).into_iter().map(|t| arc_i - t));
    }
    let mean_arc = arc.iter().fold(T::zero(), |a, v| a + *v) / T::from_usize_lossy(nb);
    Ok(Fixed { tau0: grid.integrate(&density), k_omega: grid.integrate(&k_values), kappa: mean_arc * T::PI() })
}

/// Computes the profile on `spec`'s polar grid, refining until all three values
/// change by at most `spec.target_tol`.
pub fn area_profile<T: Scalar>(word: &MapWord<T>, spec: &QuadratureSpec) -> Result<AreaProfile<T>> {
    spec.validate()?;
    let at = |level: u32| {
        let s = spec.refined(level);
        profile_fixed(word, s.radial_nodes, s.angular_nodes)
    };
    let mut prev = at(0)?;
    let mut worst = T::zero();
    for level in 1..=MAX_REFINEMENTS {
        let next = at(level)?;
        let e = |a: T, b: T| Estimate { value: b, est_error: (b - a).abs() };
        let profile = AreaProfile {
            tau0: e(prev.tau0, next.tau0),
            k_omega: e(prev.k_omega, next.k_omega),
            kappa: e(prev.kappa, next.kappa),
        };
        worst = profile.tau0.est_error.max(profile.k_omega.est_error).max(profile.kappa.est_error);
        prev = next;
        if worst.as_f64() <= spec.target_tol {
            return Ok(profile);
        }
    }
    Err(Error::AccuracyNotReached { value: prev.tau0.as_f64(), estimate: worst.as_f64(), target: spec.target_tol })
}
