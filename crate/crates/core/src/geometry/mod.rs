//! The unit disk, the forms ω = dx∧dy and η = (x dy − y dx)/2, and quadrature
//! of 1-forms along paths and of densities over the disk.

mod path;
mod pullback;
mod quadrature;

pub use path::{Path, PathKind};
pub use pullback::{pull_covector, pullback_form, pullback_oneform};
pub use quadrature::{
    convergence_study, disk_integral, gauss_legendre, line_integral, periodic_cumulative, ConvergenceOrder,
    ConvergenceRecord, Estimate, PolarGrid, QuadratureSpec, MAX_REFINEMENTS,
};

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Default containment slack for points produced by numerical maps.
pub const EPS_DOMAIN: f64 = 1e-12;

/// A point of the closed unit disk in Cartesian coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    /// The origin `o`.
    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero())
    }

    /// The boundary basepoint `x₀ = (1, 0)`.
    pub fn x0() -> Self {
        Self::new(T::one(), T::zero())
    }

    pub fn from_polar(r: T, theta: T) -> Self {
        Self::new(r * theta.cos(), r * theta.sin())
    }

    pub fn on_boundary(theta: T) -> Self {
        Self::from_polar(T::one(), theta)
    }

    pub fn norm_sq(self) -> T {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    /// Argument in (−π, π].
    pub fn arg(self) -> T {
        self.y.atan2(self.x)
    }

    pub fn dist(self, other: Self) -> T {
        (self - other).norm()
    }

    pub fn in_disk(self, eps: T) -> bool {
        self.norm_sq() <= T::one() + eps
    }

    /// Radial projection onto the disk for points that overshoot by round-off.
    pub fn clamped(self) -> Self {
        let r = self.norm();
        if r > T::one() {
            Self::new(self.x / r, self.y / r)
        } else {
            self
        }
    }

    pub fn cast<U: Scalar>(self) -> Point<U> {
        Point::new(U::lit(self.x.as_f64()), U::lit(self.y.as_f64()))
    }
}

impl<T: Scalar> Add for Point<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> Sub for Point<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Scalar> Mul<T> for Point<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

/// Value `a dx + b dy` of a 1-form at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CotangentSample<T> {
    pub a: T,
    pub b: T,
}

impl<T: Scalar> CotangentSample<T> {
    pub fn new(a: T, b: T) -> Self {
        Self { a, b }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    /// Pairing with a tangent vector.
    pub fn apply(self, v: (T, T)) -> T {
        self.a * v.0 + self.b * v.1
    }

    pub fn is_finite(self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }
}

impl<T: Scalar> Add for CotangentSample<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b)
    }
}

impl<T: Scalar> Sub for CotangentSample<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b)
    }
}

impl<T: Scalar> Neg for CotangentSample<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

impl<T: Scalar> Mul<T> for CotangentSample<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.a * s, self.b * s)
    }
}

/// η = (x dy − y dx)/2 at `p`, as `(−y/2, x/2)`.
pub fn eval_eta<T: Scalar>(p: Point<T>) -> CotangentSample<T> {
    let h = T::half();
    CotangentSample::new(-h * p.y, h * p.x)
}

/// Coefficient of dx∧dy in α∧β.
pub fn wedge_density<T: Scalar>(alpha: CotangentSample<T>, beta: CotangentSample<T>) -> T {
    alpha.a * beta.b - alpha.b * beta.a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_values() {
        assert_eq!(eval_eta(Point::<f64>::origin()), CotangentSample::new(0.0, 0.0));
        assert_eq!(eval_eta(Point::<f64>::x0()), CotangentSample::new(0.0, 0.5));
        assert_eq!(eval_eta(Point::new(0.0f64, 1.0)), CotangentSample::new(-0.5, 0.0));
    }

    #[test]
    fn wedge_values() {
        let dx = CotangentSample::new(1.0f64, 0.0);
        let dy = CotangentSample::new(0.0f64, 1.0);
        assert_eq!(wedge_density(dx, dy), 1.0);
        assert_eq!(wedge_density(dx, dx), 0.0);
        let a = CotangentSample::new(0.0f64, 0.5);
        let b = CotangentSample::new(-0.5f64, 0.0);
        assert_eq!(wedge_density(a, b), 0.25);
    }

    #[test]
    fn clamp_projects_overshoot() {
        let p = Point::new(1.0 + 1e-13f64, 0.0).clamped();
        assert_eq!(p.norm(), 1.0);
        let q = Point::new(0.3f64, 0.4);
        assert_eq!(q.clamped(), q);
    }

    #[test]
    fn eta_generic_over_f32() {
        let v = eval_eta(Point::<f32>::new(0.0, 1.0));
        assert_eq!(v, CotangentSample::new(-0.5f32, 0.0));
    }
}
