//! The extension 0 → ℝ → G/K → Diff₊(S¹) → 1 realized on map words.
//!
//! A word g ∈ G stands for its class (μ_g, τ(g)); the cocycle of the pair
//! multiplication is πχ, and the fiber acts by composing with a
//! boundary-relative twist of prescribed flux.

use std::f64::consts::PI;

use crate::circle::chi_words;
use crate::cochain::{CentralExtension, ConnectionCochain, ExtElem, GroupCochain, WordGroup};
use crate::error::Result;
use crate::geometry::QuadratureSpec;
use crate::maps::{compose_words, make_twist, MapWord, TwistSpec};

use super::tau;

pub type WordExtension = CentralExtension<WordGroup, MapWord<f64>, f64>;

#[derive(Debug, Clone, Copy)]
pub struct FluxExtensionModel {
    pub quadrature: QuadratureSpec,
}

impl FluxExtensionModel {
    pub fn new(quadrature: QuadratureSpec) -> Self {
        Self { quadrature }
    }

    /// σ(g,h) = πχ(μ_g, μ_h).
    pub fn cocycle() -> GroupCochain<MapWord<f64>, f64> {
        GroupCochain::from_fn2(|g: &MapWord<f64>, h: &MapWord<f64>| Ok(PI * chi_words(g, h)?))
    }

    pub fn extension(&self) -> WordExtension {
        CentralExtension::new_unchecked(WordGroup, Self::cocycle())
    }

    /// The connection τ̄(μ, t) = t.
    pub fn tau_bar() -> ConnectionCochain<MapWord<f64>, f64> {
        ConnectionCochain::fiber_coordinate()
    }

    /// Boundary-relative twist β(u) = s(1 − u) with flux a (s = −4a).
    pub fn fiber_word(a: f64) -> Result<MapWord<f64>> {
        make_twist(&TwistSpec { m: 1, poly_r2: vec![-4.0 * a], exp: 1 })
    }

    /// (μ_g, τ(g)).
    pub fn realize(&self, g: &MapWord<f64>) -> Result<ExtElem<MapWord<f64>, f64>> {
        Ok(ExtElem { g: g.clone(), a: tau(g, &self.quadrature)?.value })
    }

    /// δτ̄ on the representatives g·k_a and h·k_b, evaluated through τ of words.
    pub fn realized_curvature(&self, g: &MapWord<f64>, h: &MapWord<f64>, a: f64, b: f64) -> Result<f64> {
        let x = compose_words(g, &Self::fiber_word(a)?);
        let y = compose_words(h, &Self::fiber_word(b)?);
        let t = |w: &MapWord<f64>| Ok::<_, crate::Error>(tau(w, &self.quadrature)?.value);
        Ok(t(&y)? - t(&compose_words(&x, &y))? + t(&x)?)
    }
}
