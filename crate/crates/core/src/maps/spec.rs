use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::hamiltonian::default_steps;
use super::poly::BivariatePoly;
use super::{Factor, HamiltonianPrimitive, MapWord, Primitive, TwistPrimitive};

/// A named word in the JSON word library.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordSpec {
    pub name: String,
    pub factors: Vec<FactorSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FactorSpec {
    Twist(TwistSpec),
    Ham(HamSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwistSpec {
    pub m: u32,
    pub poly_r2: Vec<f64>,
    pub exp: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamSpec {
    pub k: u32,
    /// `q[i][j]` multiplies xⁱ yʲ.
    pub q: Vec<Vec<f64>>,
    pub time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    pub exp: i8,
}

fn check_exp(exp: i8) -> Result<()> {
    if exp == 1 || exp == -1 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("exponent must be ±1, got {exp}")))
    }
}

/// Single-factor twist word.
pub fn make_twist<T: Scalar>(spec: &TwistSpec) -> Result<MapWord<T>> {
    check_exp(spec.exp)?;
    if spec.poly_r2.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidSpec("twist coefficients must be finite".into()));
    }
    let prim = TwistPrimitive::new(spec.m, spec.poly_r2.iter().map(|c| T::lit(*c)).collect());
    Ok(MapWord::from_factors(vec![Factor::new(Primitive::Twist(prim), spec.exp)]))
}

/// Single-factor Hamiltonian flow word.
pub fn make_ham_flow<T: Scalar>(spec: &HamSpec) -> Result<MapWord<T>> {
    check_exp(spec.exp)?;
    if spec.q.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::InvalidSpec("Hamiltonian coefficients must be finite".into()));
    }
    let q = BivariatePoly::new(spec.q.iter().map(|row| row.iter().map(|c| T::lit(*c)).collect()).collect());
    let steps = spec.steps.unwrap_or_else(|| default_steps(spec.time));
    let prim = HamiltonianPrimitive::new(spec.k, q, T::lit(spec.time), steps)?;
    Ok(MapWord::from_factors(vec![Factor::new(Primitive::Ham(prim), spec.exp)]))
}

impl WordSpec {
    pub fn build<T: Scalar>(&self) -> Result<MapWord<T>> {
        let mut factors = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            let w = match f {
                FactorSpec::Twist(t) => make_twist::<T>(t)?,
                FactorSpec::Ham(h) => make_ham_flow::<T>(h)?,
            };
            factors.extend(w.factors().iter().cloned());
        }
        Ok(MapWord::from_factors(factors))
    }
}

impl<T: Scalar> MapWord<T> {
    pub fn from_spec(spec: &WordSpec) -> Result<Self> {
        spec.build()
    }

    pub fn to_spec(&self, name: &str) -> WordSpec {
        let factors = self
            .factors()
            .iter()
            .map(|f| match f.primitive.as_ref() {
                Primitive::Twist(t) => FactorSpec::Twist(TwistSpec {
                    m: t.m,
                    poly_r2: t.poly_r2.iter().map(|c| c.as_f64()).collect(),
                    exp: f.exp,
                }),
                Primitive::Ham(h) => FactorSpec::Ham(HamSpec {
                    k: h.k,
                    q: h.q.coeffs.iter().map(|r| r.iter().map(|c| c.as_f64()).collect()).collect(),
                    time: h.time.as_f64(),
                    steps: Some(h.steps * f.step_scale),
                    exp: f.exp,
                }),
            })
            .collect();
        WordSpec { name: name.to_string(), factors }
    }
}

impl<T> Factor<T> {
    pub fn new(primitive: Primitive<T>, exp: i8) -> Self {
        Self { primitive: Arc::new(primitive), exp, step_scale: 1 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_schema() {
        let json = r#"{"name": "w", "factors": [
            {"type": "twist", "m": 1, "poly_r2": [1.0], "exp": 1},
            {"type": "ham", "k": 2, "q": [[1.0, 0.0], [0.0], [1.0]], "time": 0.1, "steps": 64, "exp": -1}
        ]}"#;
        let spec: WordSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.factors.len(), 2);
        let w: MapWord<f64> = spec.build().unwrap();
        assert!(w.boundary_identity());
        assert!(w.fixes_origin());
    }

    #[test]
    fn rejects_bad_exponent_and_order() {
        let bad = TwistSpec { m: 1, poly_r2: vec![1.0], exp: 2 };
        assert!(matches!(make_twist::<f64>(&bad), Err(Error::InvalidSpec(_))));
        let bad = HamSpec { k: 3, q: vec![vec![1.0]], time: 0.1, steps: None, exp: 1 };
        assert!(matches!(make_ham_flow::<f64>(&bad), Err(Error::InvalidSpec(_))));
    }
}
