use crate::geometry::Point;
use crate::scalar::Scalar;

use super::poly::Poly1;
use super::JacobianSample;

/// The map `(r, θ) ↦ (r, θ + β(r))` with β(r) = (1 − r²)^m · P(r²).
#[derive(Debug, Clone, PartialEq)]
pub struct TwistPrimitive<T> {
    pub m: u32,
    /// Coefficients of P in u = r².
    pub poly_r2: Vec<T>,
    beta: Poly1<T>,
    dbeta: Poly1<T>,
    /// A(u) = ½ ∫₀ᵘ v β′(v) dv, so that h*η − η = dA.
    action: Poly1<T>,
}

impl<T: Scalar> TwistPrimitive<T> {
    pub fn new(m: u32, poly_r2: Vec<T>) -> Self {
        let one_minus_u = Poly1::new(vec![T::one(), -T::one()]);
        let mut beta = Poly1::new(if poly_r2.is_empty() { vec![T::zero()] } else { poly_r2.clone() });
        for _ in 0..m {
            beta = beta.mul(&one_minus_u);
        }
        let dbeta = beta.derivative();
        let action = dbeta.shift().integral().scale(T::half());
        Self { m, poly_r2, beta, dbeta, action }
    }

    /// Profile as a function of u = r².
    pub fn beta(&self, u: T) -> T {
        self.beta.eval(u)
    }

    pub fn beta_prime(&self, u: T) -> T {
        self.dbeta.eval(u)
    }

    pub fn boundary_rotation(&self) -> T {
        self.beta(T::one())
    }

    pub fn boundary_identity(&self) -> bool {
        self.m >= 1
    }

    pub fn apply(&self, p: Point<T>, exp: i8) -> Point<T> {
        let a = self.beta(p.norm_sq()) * T::from_i8(exp).unwrap();
        let (s, c) = a.sin_cos();
        Point::new(c * p.x - s * p.y, s * p.x + c * p.y)
    }

    /// D(R_{a(p)} p) = R_a (I + J p ∇aᵀ) with ∇a = 2 e β′(u) p; unimodular.
    pub fn jacobian(&self, p: Point<T>, exp: i8) -> JacobianSample<T> {
        let e = T::from_i8(exp).unwrap();
        let u = p.norm_sq();
        let a = self.beta(u) * e;
        let g = T::lit(2.0) * e * self.beta_prime(u);
        let (x, y) = (p.x, p.y);
        let shear = JacobianSample::new(T::one() - g * x * y, -g * y * y, g * x * x, T::one() + g * x * y);
        JacobianSample::rotation(a).mul(&shear)
    }

    pub fn action(&self, p: Point<T>, exp: i8) -> T {
        self.action.eval(p.norm_sq()) * T::from_i8(exp).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_expansion() {
        let t = TwistPrimitive::new(1, vec![2.0f64]);
        assert_eq!(t.beta(0.25), 2.0 * 0.75);
        assert_eq!(t.beta_prime(0.25), -2.0);
        assert_eq!(t.boundary_rotation(), 0.0);
        // A(u) = ½∫ v·(−s) dv = −s u²/4
        assert!((t.action(Point::new(1.0, 0.0), 1) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn constant_profile_rotates() {
        let t = TwistPrimitive::new(0, vec![0.7f64]);
        let q = t.apply(Point::new(0.5, 0.0), 1);
        assert!((q.x - 0.5 * 0.7f64.cos()).abs() < 1e-15);
        assert!((q.y - 0.5 * 0.7f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn jacobian_is_unimodular() {
        let t = TwistPrimitive::new(2, vec![0.4f64, -1.3, 0.8]);
        for &(x, y) in &[(0.1, 0.2), (-0.6, 0.5), (0.0, -0.99)] {
            let d = t.jacobian(Point::new(x, y), -1).det();
            assert!((d - 1.0).abs() < 1e-14);
        }
    }
}
