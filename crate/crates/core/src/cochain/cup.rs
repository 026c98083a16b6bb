//! Pointwise densities of the cup products behind the area invariants:
//! η ∪ δη(g) = η^g ∧ (η − η^g), 𝒦 ∪ ω = 𝒦(g)·ω and 𝒦 ∪ η = 𝒦(g)·η.
//!
//! `invariants::area_profile` evaluates the same integrals on a shared grid;
//! these are the direct forms, for use with `disk_integral` or a boundary rule.

use crate::error::Result;
use crate::geometry::{eval_eta, pull_covector, wedge_density, Point, QuadratureSpec};
use crate::invariants::k_field;
use crate::maps::MapWord;
use crate::scalar::Scalar;

/// η^g ∧ (η − η^g) against dx∧dy at `p`, which reduces to η^g ∧ η.
pub fn cup_eta_deltaeta<T: Scalar>(word: &MapWord<T>, p: Point<T>) -> Result<T> {
    let (q, jac, _) = word.eval_full(p)?;
    let pulled = pull_covector(eval_eta(q.clamped()), &jac);
    Ok(wedge_density(pulled, eval_eta(p)))
}

/// 𝒦(g)(p), the density of 𝒦 ∪ ω against ω.
pub fn cup_k_omega<T: Scalar>(word: &MapWord<T>, p: Point<T>, spec: &QuadratureSpec) -> Result<T> {
    Ok(k_field(word, p, spec)?.value)
}

/// 𝒦(g)(e^{iθ})·½, the density of 𝒦 ∪ η against dθ on the boundary, where η
/// restricts to ½dθ.
pub fn cup_k_eta<T: Scalar>(word: &MapWord<T>, theta: T, spec: &QuadratureSpec) -> Result<T> {
    Ok(k_field(word, Point::on_boundary(theta), spec)?.value * T::half())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{PI, TAU};

    use super::*;
    use crate::geometry::disk_integral;
    use crate::invariants::area_profile;
    use crate::maps::{compose_words, make_ham_flow, make_twist, HamSpec, TwistSpec};

    fn twist(s: f64) -> MapWord<f64> {
        make_twist(&TwistSpec { m: 1, poly_r2: vec![s], exp: 1 }).unwrap()
    }

    fn boundary_mean(word: &MapWord<f64>, n: usize, spec: &QuadratureSpec) -> f64 {
        // Periodic trapezoid: spectrally accurate for the smooth boundary density.
        (0..n).map(|i| cup_k_eta(word, TAU * i as f64 / n as f64, spec).unwrap()).sum::<f64>() * TAU / n as f64
    }

    #[test]
    fn trivial_words_have_zero_densities() {
        let q = QuadratureSpec::default();
        let pts = [Point::new(0.2, -0.1), Point::new(-0.6, 0.5), Point::new(0.0, 0.9)];
        for w in [MapWord::<f64>::identity(), MapWord::rotation(0.8)] {
            for p in pts {
                assert!(cup_eta_deltaeta(&w, p).unwrap().abs() < 1e-15);
                assert!(cup_k_omega(&w, p, &q).unwrap().abs() < 1e-15);
            }
            assert!(cup_k_eta(&w, 1.3, &q).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn twist_cup_integrates_to_calabi_oracle() {
        // ∫ β′(r) r³/2 dr dθ with β = s(1 − r²) reduces to −πs/6.
        let spec =
            QuadratureSpec { radial_nodes: 16, angular_nodes: 16, target_tol: 1e-12, ..QuadratureSpec::default() };
        for s in [0.5, 1.0, -2.0] {
            let w = twist(s);
            let v = disk_integral(|p| cup_eta_deltaeta(&w, p), &spec).unwrap().value;
            assert!((v + PI * s / 6.0).abs() < 1e-12, "s = {s}: {v}");
        }
    }

    #[test]
    fn direct_densities_agree_with_the_fused_profile() {
        let flow =
            make_ham_flow(&HamSpec { k: 2, q: vec![vec![0.4, 0.0, 0.7], vec![-0.3]], time: 0.4, steps: None, exp: 1 })
                .unwrap();
        let w = compose_words(&twist(0.6), &flow);
        let line = QuadratureSpec::default();
        let area =
            QuadratureSpec { radial_nodes: 16, angular_nodes: 32, target_tol: 1e-8, ..QuadratureSpec::default() };
        let prof = area_profile(&w, &area).unwrap();
        let tau0 = disk_integral(|p| cup_eta_deltaeta(&w, p), &area).unwrap().value;
        assert!((tau0 - prof.tau0.value).abs() < 1e-8);
        let kappa = boundary_mean(&w, 64, &line);
        assert!((kappa - prof.kappa.value).abs() < 1e-8, "{kappa} vs {}", prof.kappa.value);
        let coarse =
            QuadratureSpec { radial_nodes: 8, angular_nodes: 16, target_tol: 1e-6, ..QuadratureSpec::default() };
        let k_omega = disk_integral(|p| cup_k_omega(&w, p, &line), &coarse).unwrap().value;
        assert!((k_omega - prof.k_omega.value).abs() < 1e-6, "{k_omega} vs {}", prof.k_omega.value);
    }
}
