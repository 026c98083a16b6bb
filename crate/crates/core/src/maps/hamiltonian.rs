use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::Scalar;

use super::poly::{BivariatePoly, Jet2};
use super::JacobianSample;

/// Default flow resolution in RK4 steps per unit time.
pub const STEPS_PER_UNIT_TIME: f64 = 512.0;

/// Time-`time` flow of H = (1 − x² − y²)^k · q(x, y), with X_H = (∂H/∂y, −∂H/∂x).
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianPrimitive<T> {
    pub k: u32,
    pub q: BivariatePoly<T>,
    pub time: T,
    pub steps: usize,
}

/// Steps used when a spec leaves them unset.
pub fn default_steps(time: f64) -> usize {
    ((time.abs() * STEPS_PER_UNIT_TIME).ceil() as usize).max(1)
}

impl<T: Scalar> HamiltonianPrimitive<T> {
    pub fn new(k: u32, q: BivariatePoly<T>, time: T, steps: usize) -> Result<Self> {
        if !(k == 1 || k == 2) {
            return Err(Error::InvalidSpec(format!("boundary order k must be 1 or 2, got {k}")));
        }
        if steps == 0 {
            return Err(Error::InvalidSpec("flow needs at least one step".into()));
        }
        if !time.is_finite() {
            return Err(Error::InvalidSpec("flow time must be finite".into()));
        }
        Ok(Self { k, q, time, steps })
    }

    pub fn fixes_origin(&self) -> bool {
        self.q.coeff(1, 0) == T::zero() && self.q.coeff(0, 1) == T::zero()
    }

    pub fn boundary_identity(&self) -> bool {
        self.k == 2
    }

    /// Value, gradient and Hessian of H.
    pub fn hamiltonian_jet(&self, x: T, y: T) -> Jet2<T> {
        let q = self.q.jet(x, y);
        let two = T::lit(2.0);
        let w = T::one() - x * x - y * y;
        let (wx, wy) = (-two * x, -two * y);
        let kf = T::from_u32(self.k).unwrap();
        let wk = w.powi(self.k as i32);
        let wk1 = w.powi(self.k as i32 - 1);
        let c2 = if self.k >= 2 { kf * (kf - T::one()) * w.powi(self.k as i32 - 2) } else { T::zero() };
        Jet2 {
            v: wk * q.v,
            x: kf * wk1 * wx * q.v + wk * q.x,
            y: kf * wk1 * wy * q.v + wk * q.y,
            xx: c2 * wx * wx * q.v + kf * wk1 * (-two * q.v + two * wx * q.x) + wk * q.xx,
            yy: c2 * wy * wy * q.v + kf * wk1 * (-two * q.v + two * wy * q.y) + wk * q.yy,
            xy: c2 * wx * wy * q.v + kf * wk1 * (wx * q.y + wy * q.x) + wk * q.xy,
        }
    }

    pub fn vector_field(&self, p: Point<T>) -> (T, T) {
        let h = self.hamiltonian_jet(p.x, p.y);
        (h.y, -h.x)
    }

    fn dt(&self, exp: i8, step_scale: usize) -> (T, usize) {
        let n = self.steps * step_scale.max(1);
        (self.time * T::from_i8(exp).unwrap() / T::from_usize_lossy(n), n)
    }

    /// Flow endpoint only.
    pub fn apply(&self, p: Point<T>, exp: i8, step_scale: usize) -> Result<Point<T>> {
        let (dt, n) = self.dt(exp, step_scale);
        let half = T::half();
        let sixth = T::one() / T::lit(6.0);
        let (mut x, mut y) = (p.x, p.y);
        let f = |x: T, y: T| self.vector_field(Point::new(x, y));
        for _ in 0..n {
            let k1 = f(x, y);
            let k2 = f(x + half * dt * k1.0, y + half * dt * k1.1);
            let k3 = f(x + half * dt * k2.0, y + half * dt * k2.1);
            let k4 = f(x + dt * k3.0, y + dt * k3.1);
            x = x + dt * sixth * (k1.0 + T::lit(2.0) * (k2.0 + k3.0) + k4.0);
            y = y + dt * sixth * (k1.1 + T::lit(2.0) * (k2.1 + k3.1) + k4.1);
        }
        check_endpoint(Point::new(x, y))
    }

    /// Flow endpoint, its Jacobian (variational equation J′ = DX_H·J transported
    /// by the same RK4 stages) and the action S with φ*η − η = dS.
    pub fn flow_full(&self, p: Point<T>, exp: i8, step_scale: usize) -> Result<(Point<T>, JacobianSample<T>, T)> {
        let (dt, n) = self.dt(exp, step_scale);
        let half = T::half();
        let two = T::lit(2.0);
        let sixth = T::one() / T::lit(6.0);
        let mut z = [p.x, p.y, T::one(), T::zero(), T::zero(), T::one(), T::zero()];
        let rhs = |z: &[T; 7]| -> [T; 7] {
            let h = self.hamiltonian_jet(z[0], z[1]);
            // DX_H = [[H_xy, H_yy], [−H_xx, −H_xy]]
            let (a, b, c, d) = (h.xy, h.yy, -h.xx, -h.xy);
            let lagrangian = h.v - half * (z[0] * h.x + z[1] * h.y);
            [h.y, -h.x, a * z[2] + b * z[4], a * z[3] + b * z[5], c * z[2] + d * z[4], c * z[3] + d * z[5], lagrangian]
        };
        let axpy = |z: &[T; 7], k: &[T; 7], s: T| -> [T; 7] {
            let mut out = *z;
            for i in 0..7 {
                out[i] = z[i] + s * k[i];
            }
            out
        };
        for _ in 0..n {
            let k1 = rhs(&z);
            let k2 = rhs(&axpy(&z, &k1, half * dt));
            let k3 = rhs(&axpy(&z, &k2, half * dt));
            let k4 = rhs(&axpy(&z, &k3, dt));
            for i in 0..7 {
                z[i] = z[i] + dt * sixth * (k1[i] + two * (k2[i] + k3[i]) + k4[i]);
            }
        }
        let q = check_endpoint(Point::new(z[0], z[1]))?;
        Ok((q, JacobianSample::new(z[2], z[3], z[4], z[5]), z[6]))
    }
}

fn check_endpoint<T: Scalar>(q: Point<T>) -> Result<Point<T>> {
    if !(q.x.is_finite() && q.y.is_finite()) {
        return Err(Error::IntegrationFailure("non-finite trajectory".into()));
    }
    if q.norm_sq().as_f64() > 1.0 + 1e-6 {
        return Err(Error::IntegrationFailure(format!("trajectory left the disk (|z|² = {})", q.norm_sq())));
    }
    Ok(q)
}
