//! Lifts of boundary circle diffeomorphisms to ℝ and the Euler cocycle χ.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::maps::MapWord;
use crate::scalar::Scalar;

pub const DEFAULT_GRID: usize = 4096;
pub const MAX_GRID: usize = 1 << 16;

/// Monotone lift φ: ℝ → ℝ with φ(x + 2π) = φ(x) + 2π, sampled on the uniform
/// grid θᵢ = 2πi/n together with exact derivatives; evaluated by monotone cubic
/// Hermite interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleLift<T> {
    values: Vec<T>,
    derivs: Vec<T>,
}

impl<T: Scalar> CircleLift<T> {
    pub fn identity(n: usize) -> Self {
        let values = (0..n).map(|i| grid_angle(i, n)).collect();
        Self { values, derivs: vec![T::one(); n] }
    }

    pub fn rotation(a: T, n: usize) -> Self {
        let mut lift = Self::identity(n);
        lift.values.iter_mut().for_each(|v| *v = *v + a);
        lift
    }

    /// Builds a lift from samples, checking unwrapping consistency.
    pub fn from_samples(values: Vec<T>, derivs: Vec<T>) -> Result<Self> {
        let lift = Self { values, derivs };
        lift.check_unwrapped()?;
        Ok(lift)
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// φ(0).
    pub fn base_choice(&self) -> T {
        self.values[0]
    }

    /// T^k ∘ φ, the same circle map with another lift choice.
    pub fn shifted(&self, turns: i64) -> Self {
        let s = T::two_pi() * T::from_i64(turns).unwrap();
        Self { values: self.values.iter().map(|v| *v + s).collect(), derivs: self.derivs.clone() }
    }

    fn step(&self) -> T {
        T::two_pi() / T::from_usize_lossy(self.grid_size())
    }

    fn check_unwrapped(&self) -> Result<()> {
        let n = self.grid_size();
        let pi = T::PI();
        for i in 0..n {
            let next = if i + 1 < n { self.values[i + 1] } else { self.values[0] + T::two_pi() };
            let d = next - self.values[i];
            if !(d > T::zero() && d < pi) {
                return Err(Error::UnwrapAmbiguity { grid: n });
            }
        }
        Ok(())
    }

    fn node(&self, i: usize) -> (T, T) {
        let n = self.grid_size();
        if i < n {
            (self.values[i], self.derivs[i])
        } else {
            (self.values[i - n] + T::two_pi(), self.derivs[i - n])
        }
    }

    /// Interpolated value and derivative at `x`.
    pub fn eval_with_derivative(&self, x: T) -> (T, T) {
        let n = self.grid_size();
        let tau = T::two_pi();
        let turns = (x / tau).floor();
        let theta = x - turns * tau;
        let h = self.step();
        let mut i = (theta / h).floor().to_usize().unwrap_or(0);
        if i >= n {
            i = n - 1;
        }
        let t = (theta - T::from_usize_lossy(i) * h) / h;
        let (y0, mut d0) = self.node(i);
        let (y1, mut d1) = self.node(i + 1);
        let secant = (y1 - y0) / h;
        // Fritsch–Carlson limiter keeps the cubic monotone on this interval.
        d0 = d0.max(T::zero());
        d1 = d1.max(T::zero());
        if secant > T::zero() {
            let (a, b) = (d0 / secant, d1 / secant);
            let r2 = a * a + b * b;
            let nine = T::lit(9.0);
            if r2 > nine {
                let s = T::lit(3.0) / r2.sqrt();
                d0 = s * a * secant;
                d1 = s * b * secant;
            }
        }
        let (t2, t3) = (t * t, t * t * t);
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = -two * t3 + three * t2;
        let h11 = t3 - t2;
        let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
        let six = T::lit(6.0);
        let dh00 = (six * t2 - six * t) / h;
        let dh10 = three * t2 - T::lit(4.0) * t + T::one();
        let dh01 = (-six * t2 + six * t) / h;
        let dh11 = three * t2 - two * t;
        let deriv = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
        (value + turns * tau, deriv)
    }

    /// The x with φ(x) = y.
    pub fn solve(&self, y: T) -> T {
        let tau = T::two_pi();
        let base = self.values[0];
        let turns = ((y - base) / tau).floor();
        let target = y - turns * tau;
        let n = self.grid_size();
        // Grid interval with values[i] <= target < values[i+1].
        let (mut lo, mut hi) = (0usize, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.values[mid] <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = self.step();
        let (mut a, mut b) = (T::from_usize_lossy(lo) * h, T::from_usize_lossy(lo + 1) * h);
        let mut x = a + (b - a) * T::half();
        let ftol = T::epsilon() * T::lit(4.0) * (T::one() + target.abs());
        for _ in 0..200 {
            let (v, d) = self.eval_with_derivative(x);
            let f = v - target;
            if f.abs() <= ftol {
                break;
            }
            if f > T::zero() {
                b = x;
            } else {
                a = x;
            }
            let newton = x - f / d;
            x = if d > T::zero() && newton > a && newton < b { newton } else { (a + b) * T::half() };
            if b - a <= T::epsilon() * (T::one() + x.abs()) {
                break;
            }
        }
        x + turns * tau
    }
}

fn grid_angle<T: Scalar>(i: usize, n: usize) -> T {
    T::two_pi() * T::from_usize_lossy(i) / T::from_usize_lossy(n)
}

fn reduce_angle<T: Scalar>(d: T) -> T {
    let tau = T::two_pi();
    d - tau * (d / tau).round()
}

fn restriction_on_grid<T: Scalar>(word: &MapWord<T>, n: usize) -> Result<CircleLift<T>> {
    let samples = (0..n)
        .into_par_iter()
        .map(|i| {
            let th: T = grid_angle(i, n);
            let (q, jac, _) = word.eval_full(Point::on_boundary(th))?;
            let v = jac.apply((-th.sin(), th.cos()));
            let d = (q.x * v.1 - q.y * v.0) / q.norm_sq();
            Ok((q.arg(), d))
        })
        .collect::<Result<Vec<(T, T)>>>()?;
    let mut values = Vec::with_capacity(n);
    let mut derivs = Vec::with_capacity(n);
    let mut prev = samples[0].0;
    values.push(prev);
    derivs.push(samples[0].1);
    for &(a, d) in &samples[1..] {
        let next = prev + reduce_angle(a - prev);
        values.push(next);
        derivs.push(d);
        prev = next;
    }
    CircleLift::from_samples(values, derivs)
}

/// Lift of `word|∂D` with φ(0) ∈ (−π, π]; the grid doubles on ambiguous unwrapping.
pub fn boundary_restriction<T: Scalar>(word: &MapWord<T>) -> Result<CircleLift<T>> {
    boundary_restriction_with_grid(word, DEFAULT_GRID)
}

pub fn boundary_restriction_with_grid<T: Scalar>(word: &MapWord<T>, grid: usize) -> Result<CircleLift<T>> {
    let mut n = grid.max(8);
    loop {
        match restriction_on_grid(word, n) {
            Err(Error::UnwrapAmbiguity { .. }) if n < MAX_GRID => n *= 2,
            other => return other,
        }
    }
}

pub fn lift_eval<T: Scalar>(lift: &CircleLift<T>, x: T) -> T {
    lift.eval_with_derivative(x).0
}

/// φ ∘ ψ sampled on the finer of the two grids.
pub fn lift_compose<T: Scalar>(phi: &CircleLift<T>, psi: &CircleLift<T>) -> Result<CircleLift<T>> {
    let (values, derivs) = compose_samples(phi, psi);
    CircleLift::from_samples(values, derivs)
}

fn compose_samples<T: Scalar>(phi: &CircleLift<T>, psi: &CircleLift<T>) -> (Vec<T>, Vec<T>) {
    let n = phi.grid_size().max(psi.grid_size());
    (0..n)
        .map(|i| {
            let (v, d) = psi.eval_with_derivative(grid_angle(i, n));
            let (w, e) = phi.eval_with_derivative(v);
            (w, e * d)
        })
        .unzip()
}

/// The lift φ⁻¹ with φ⁻¹ ∘ φ = id.
pub fn lift_inverse<T: Scalar>(phi: &CircleLift<T>) -> CircleLift<T> {
    let n = phi.grid_size();
    let (values, derivs) = (0..n)
        .map(|i| {
            let x = phi.solve(grid_angle(i, n));
            (x, T::one() / phi.eval_with_derivative(x).1)
        })
        .unzip();
    CircleLift { values, derivs }
}

/// Euler cocycle χ(μ, ν) = (φψ(0) − φ(0) − ψ(0)) / 2π for lifts φ of μ, ψ of ν.
pub fn chi<T: Scalar>(mu: &CircleLift<T>, nu: &CircleLift<T>) -> T {
    let psi0 = lift_eval(nu, T::zero());
    (lift_eval(mu, psi0) - lift_eval(mu, T::zero()) - psi0) / T::two_pi()
}

/// φ(x) for the lift of `word|∂D` with φ(0) ∈ (−π, π], evaluated exactly at `x`
/// by unwrapping along a walk from 0 whose angular increments stay below π/2.
pub fn lift_value<T: Scalar>(word: &MapWord<T>, x: T) -> Result<T> {
    let start = word.apply(Point::on_boundary(T::zero()))?.arg();
    if x == T::zero() {
        return Ok(start);
    }
    let mut steps = ((x.abs() / T::lit(0.05)).ceil().to_usize().unwrap_or(1)).max(1);
    loop {
        if let Some(v) = unwrap_walk(word, x, start, steps)? {
            return Ok(v);
        }
        if steps >= MAX_GRID {
            return Err(Error::UnwrapAmbiguity { grid: steps });
        }
        steps *= 2;
    }
}

/// `None` when some increment reaches π/2 and the walk must be refined.
fn unwrap_walk<T: Scalar>(word: &MapWord<T>, x: T, start: T, steps: usize) -> Result<Option<T>> {
    let mut acc = start;
    let mut prev = start;
    for k in 1..=steps {
        let th = x * T::from_usize_lossy(k) / T::from_usize_lossy(steps);
        let a = word.apply(Point::on_boundary(th))?.arg();
        let d = reduce_angle(a - prev);
        if d.abs() >= T::FRAC_PI_2() {
            return Ok(None);
        }
        acc = acc + d;
        prev = a;
    }
    Ok(Some(acc))
}

/// χ(μ, ν) for the boundary restrictions of two words.
pub fn chi_words<T: Scalar>(g: &MapWord<T>, h: &MapWord<T>) -> Result<T> {
    let psi0 = lift_value(h, T::zero())?;
    let phi0 = lift_value(g, T::zero())?;
    Ok((lift_value(g, psi0)? - phi0 - psi0) / T::two_pi())
}

/// The lifted group of circle diffeomorphisms, with lifts on a fixed grid.
#[derive(Debug, Clone, Copy)]
pub struct LiftGroup {
    pub grid: usize,
}

impl<T: Scalar> crate::cochain::Group<CircleLift<T>> for LiftGroup {
    fn op(&self, a: &CircleLift<T>, b: &CircleLift<T>) -> Result<CircleLift<T>> {
        let (values, derivs) = compose_samples(a, b);
        Ok(CircleLift { values, derivs })
    }

    fn identity(&self) -> CircleLift<T> {
        CircleLift::identity(self.grid)
    }

    fn inverse(&self, a: &CircleLift<T>) -> Result<CircleLift<T>> {
        Ok(lift_inverse(a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{compose_words, inverse_word, make_ham_flow, make_twist, HamSpec, TwistSpec};
    use std::f64::consts::{PI, TAU};

    fn k1_word(q: Vec<Vec<f64>>, t: f64) -> MapWord<f64> {
        make_ham_flow(&HamSpec { k: 1, q, time: t, steps: None, exp: 1 }).unwrap()
    }

    #[test]
    fn identity_restriction() {
        let lift = boundary_restriction(&MapWord::<f64>::identity()).unwrap();
        for x in [0.0, 0.3, 2.0, 6.0, -1.0, 9.5] {
            assert!((lift_eval(&lift, x) - x).abs() < 1e-14);
        }
    }

    #[test]
    fn rotation_restriction_reduces_base_choice() {
        let lift = boundary_restriction(&MapWord::rotation(0.8f64)).unwrap();
        assert!((lift_eval(&lift, 0.0) - 0.8).abs() < 1e-14);
        let lift = boundary_restriction(&MapWord::rotation(4.0f64)).unwrap();
        assert!((lift.base_choice() - (4.0 - TAU)).abs() < 1e-14);
        assert!(lift.base_choice() > -PI && lift.base_choice() <= PI);
    }

    #[test]
    fn twist_boundary_sees_only_boundary_value() {
        // β(u) = 0.5 + (1 − u)(2 + u): boundary rotation 0.5
        let a = make_twist::<f64>(&TwistSpec { m: 0, poly_r2: vec![0.5], exp: 1 }).unwrap();
        let b = make_twist::<f64>(&TwistSpec { m: 1, poly_r2: vec![2.0, 1.0], exp: 1 }).unwrap();
        let lift = boundary_restriction(&compose_words(&a, &b)).unwrap();
        for x in [0.1, 1.7, 3.3] {
            assert!((lift_eval(&lift, x) - (x + 0.5)).abs() < 1e-13);
        }
    }

    #[test]
    fn equivariance() {
        let lift = boundary_restriction(&k1_word(vec![vec![0.0, 0.0, 0.5], vec![0.0, 0.3], vec![0.7]], 0.4)).unwrap();
        for x in [0.05, 1.3, 5.9] {
            assert!((lift_eval(&lift, x + TAU) - lift_eval(&lift, x) - TAU).abs() < 1e-13);
        }
    }

    #[test]
    fn interpolation_matches_direct_evaluation() {
        let w = k1_word(vec![vec![0.2, 0.0, -0.6], vec![0.0, 0.9], vec![0.4]], 0.5);
        let lift = boundary_restriction(&w).unwrap();
        for x in [0.0123, 1.234, 4.567] {
            let q = w.apply(Point::on_boundary(x)).unwrap();
            let direct = lift_eval(&lift, x);
            assert!(reduce_angle(direct - q.arg()).abs() < 1e-11);
        }
    }

    #[test]
    fn composition_with_identity_and_rotations() {
        let psi = boundary_restriction(&k1_word(vec![vec![0.1, 0.0, 0.3], vec![0.0, -0.5]], 0.3)).unwrap();
        let id = CircleLift::identity(DEFAULT_GRID);
        let c = lift_compose(&id, &psi).unwrap();
        assert!(c.values().iter().zip(psi.values()).all(|(a, b)| (a - b).abs() < 1e-14));
        let r = lift_compose(&CircleLift::rotation(0.3f64, 256), &CircleLift::rotation(0.4, 256)).unwrap();
        assert!((lift_eval(&r, 1.0) - 1.7).abs() < 1e-14);
    }

    #[test]
    fn composition_with_inverse_word_is_identity() {
        // Oracle: restriction of the inverse word, composed with the forward lift.
        let w = k1_word(vec![vec![0.0, 0.0, 0.8], vec![0.0, 0.6], vec![-0.5]], 0.5);
        let phi = boundary_restriction(&w).unwrap();
        let phi_inv = boundary_restriction(&inverse_word(&w)).unwrap();
        let c = lift_compose(&phi, &phi_inv).unwrap();
        let offset = (lift_eval(&c, 0.0) / TAU).round() * TAU;
        for x in [0.0, 0.9, 3.0, 5.5] {
            assert!((lift_eval(&c, x) - offset - x).abs() < 1e-9);
        }
        let inv = lift_inverse(&phi);
        let c = lift_compose(&inv, &phi).unwrap();
        for x in [0.2, 2.2, 6.1] {
            assert!((lift_eval(&c, x) - x).abs() < 1e-9);
        }
    }

    #[test]
    fn chi_of_rotations_and_identity_vanishes() {
        let a = CircleLift::rotation(0.7f64, 64);
        let b = CircleLift::rotation(-2.9f64, 64);
        assert!(chi(&a, &b).abs() < 1e-15);
        let psi = boundary_restriction(&k1_word(vec![vec![0.3, 0.0, 0.4], vec![0.0, 0.2]], 0.4)).unwrap();
        assert_eq!(chi(&psi, &CircleLift::identity(64)), 0.0);
    }

    #[test]
    fn chi_is_independent_of_lift_choice() {
        let w1 = k1_word(vec![vec![0.3, 0.0, 0.9], vec![0.0, 0.2], vec![0.6]], 0.5);
        let w2 = compose_words(&MapWord::rotation(2.5), &k1_word(vec![vec![-0.3, 0.0, 0.4], vec![0.0, -0.8]], 0.4));
        let mu = boundary_restriction(&w1).unwrap();
        let nu = boundary_restriction(&w2).unwrap();
        let base = chi(&mu, &nu);
        for (m, n) in [(1, 0), (0, -2), (3, 5)] {
            assert!((chi(&mu.shifted(m), &nu.shifted(n)) - base).abs() < 1e-12);
        }
        assert!(base.abs() < 1.0);
    }

    #[test]
    fn exact_lift_values_match_interpolated_lift() {
        let w = compose_words(
            &k1_word(vec![vec![0.0, 0.0, 0.8], vec![0.0, 0.6], vec![-0.5]], 0.5),
            &MapWord::rotation(-2.0),
        );
        let lift = boundary_restriction(&w).unwrap();
        for x in [0.0, 1.1, -2.7, 7.0] {
            assert!((lift_value(&w, x).unwrap() - lift_eval(&lift, x)).abs() < 1e-10);
        }
        let h = k1_word(vec![vec![0.4, 0.0, -0.2], vec![0.0, 0.1], vec![0.9]], -0.45);
        let nu = boundary_restriction(&h).unwrap();
        assert!((chi_words(&w, &h).unwrap() - chi(&lift, &nu)).abs() < 1e-11);
    }

    #[test]
    fn ambiguous_samples_are_rejected() {
        let err = CircleLift::from_samples(vec![0.0f64, 3.5, 4.0], vec![1.0; 3]).unwrap_err();
        assert!(matches!(err, Error::UnwrapAmbiguity { grid: 3 }));
    }
}
