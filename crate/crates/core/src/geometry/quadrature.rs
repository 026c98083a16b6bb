use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{CotangentSample, Path, Point};

/// Number of refinement levels attempted before giving up on `target_tol`.
pub const MAX_REFINEMENTS: u32 = 3;

/// Resolution and accuracy target shared by line and area quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    /// Gauss–Legendre nodes per panel.
    pub gl_order: usize,
    pub panels_1d: usize,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub refine_factor: usize,
    pub target_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { gl_order: 16, panels_1d: 8, radial_nodes: 64, angular_nodes: 256, refine_factor: 2, target_tol: 1e-9 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let counts = [self.gl_order, self.panels_1d, self.radial_nodes, self.angular_nodes];
        if counts.iter().any(|&c| c < 1) || self.refine_factor < 2 {
            return Err(Error::InvalidSpec(format!("quadrature counts must be >= 1: {self:?}")));
        }
        if self.target_tol.is_nan() || self.target_tol <= 0.0 {
            return Err(Error::InvalidSpec("target_tol must be positive".into()));
        }
        Ok(())
    }

    /// The spec at refinement level `level` (level 0 is `self`).
    pub fn refined(&self, level: u32) -> Self {
        let f = self.refine_factor.pow(level);
        Self {
            panels_1d: self.panels_1d * f,
            radial_nodes: self.radial_nodes * f,
            angular_nodes: self.angular_nodes * f,
            ..*self
        }
    }

    pub fn with_target(self, target_tol: f64) -> Self {
        Self { target_tol, ..self }
    }
}

/// A quadrature value with its refinement-based error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub est_error: T,
}

impl<T: Scalar> Estimate<T> {
    pub fn exact(value: T) -> Self {
        Self { value, est_error: T::zero() }
    }

    pub fn map(self, f: impl FnOnce(T) -> T) -> Self {
        Self { value: f(self.value), est_error: self.est_error }
    }
}

impl<T: Scalar> std::ops::Add for Estimate<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { value: self.value + o.value, est_error: self.est_error + o.est_error }
    }
}

impl<T: Scalar> std::ops::Sub for Estimate<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { value: self.value - o.value, est_error: self.est_error + o.est_error }
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1], by Newton iteration on P_n.
pub fn gauss_legendre<T: Scalar>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = T::lit(-x);
        nodes[n - 1 - i] = T::lit(x);
        weights[i] = T::lit(w);
        weights[n - 1 - i] = T::lit(w);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// All Legendre polynomials P_0..=P_n at x.
fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![1.0; n + 1];
    if n >= 1 {
        p[1] = x;
    }
    for k in 2..=n {
        let kf = k as f64;
        p[k] = ((2.0 * kf - 1.0) * x * p[k - 1] - (kf - 1.0) * p[k - 2]) / kf;
    }
    p
}

fn line_integral_fixed<T, F>(form: &F, path: &Path<T>, gl_order: usize, panels: usize) -> Result<T>
where
    T: Scalar,
    F: Fn(Point<T>) -> Result<CotangentSample<T>>,
{
    let (xs, ws) = gauss_legendre::<T>(gl_order);
    let h = T::one() / T::from_usize_lossy(panels);
    let half = T::half();
    let mut acc = T::zero();
    for k in 0..panels {
        let a = T::from_usize_lossy(k) * h;
        let mut panel = T::zero();
        for (x, w) in xs.iter().zip(&ws) {
            let s = a + h * half * (*x + T::one());
            let val = form(path.point(s))?;
            panel = panel + *w * val.apply(path.velocity(s));
        }
        acc = acc + panel * h * half;
    }
    Ok(acc)
}

/// Composite Gauss–Legendre integral of a 1-form along `path`, refined until the
/// difference between successive levels is at most `spec.target_tol`.
pub fn line_integral<T, F>(form: F, path: &Path<T>, spec: &QuadratureSpec) -> Result<Estimate<T>>
where
    T: Scalar,
    F: Fn(Point<T>) -> Result<CotangentSample<T>>,
{
    let mut prev = line_integral_fixed(&form, path, spec.gl_order, spec.panels_1d)?;
    let mut est = T::zero();
    for level in 1..=MAX_REFINEMENTS {
        let next = line_integral_fixed(&form, path, spec.gl_order, spec.refined(level).panels_1d)?;
        est = (next - prev).abs();
        prev = next;
        if est.as_f64() <= spec.target_tol {
            return Ok(Estimate { value: next, est_error: est });
        }
    }
    Err(Error::AccuracyNotReached { value: prev.as_f64(), estimate: est.as_f64(), target: spec.target_tol })
}

/// Polar tensor grid: Gauss–Legendre in r on [0, 1], uniform periodic in θ.
///
/// Grid values are laid out angle-major: `values[i * radial + j]` belongs to
/// `(radii[j], angles[i])`.
#[derive(Debug, Clone)]
pub struct PolarGrid<T> {
    pub radii: Vec<T>,
    pub radial_weights: Vec<T>,
    pub angles: Vec<T>,
    /// `tail[j][k]`: weight of f(r_k) in ∫_{r_j}^1 f(ρ) dρ (Legendre interpolant).
    tail: Vec<Vec<T>>,
}

impl<T: Scalar> PolarGrid<T> {
    pub fn new(radial: usize, angular: usize) -> Self {
        let (xs, ws) = gauss_legendre::<f64>(radial);
        let radii = xs.iter().map(|x| T::lit(0.5 * (x + 1.0))).collect();
        let radial_weights = ws.iter().map(|w| T::lit(0.5 * w)).collect();
        let angles = (0..angular).map(|i| T::lit(std::f64::consts::TAU * i as f64 / angular as f64)).collect();

        // ∫_x^1 P_0 = 1 − x, ∫_x^1 P_k = −(P_{k+1}(x) − P_{k−1}(x))/(2k+1).
        let n = radial;
        let pk_at_nodes: Vec<Vec<f64>> = xs.iter().map(|&x| legendre_all(n, x)).collect();
        let mut tail = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            let p = &pk_at_nodes[i];
            let g: Vec<f64> = (0..n)
                .map(|k| if k == 0 { 1.0 - xs[i] } else { -(p[k + 1] - p[k - 1]) / (2.0 * k as f64 + 1.0) })
                .collect();
            for j in 0..n {
                let mut m = 0.0;
                for k in 0..n {
                    m += (2.0 * k as f64 + 1.0) * 0.5 * ws[j] * pk_at_nodes[j][k] * g[k];
                }
                tail[i][j] = T::lit(0.5 * m);
            }
        }
        Self { radii, radial_weights, angles, tail }
    }

    pub fn from_spec(spec: &QuadratureSpec) -> Self {
        Self::new(spec.radial_nodes, spec.angular_nodes)
    }

    pub fn radial(&self) -> usize {
        self.radii.len()
    }

    pub fn angular(&self) -> usize {
        self.angles.len()
    }

    pub fn len(&self) -> usize {
        self.radial() * self.angular()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, index: usize) -> Point<T> {
        let (i, j) = (index / self.radial(), index % self.radial());
        Point::from_polar(self.radii[j], self.angles[i])
    }

    pub fn points(&self) -> Vec<Point<T>> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    /// Σ f · r dr dθ over the grid.
    pub fn integrate(&self, values: &[T]) -> T {
        let nr = self.radial();
        let dtheta = T::two_pi() / T::from_usize_lossy(self.angular());
        let mut acc = T::zero();
        for i in 0..self.angular() {
            let mut ring = T::zero();
            for j in 0..nr {
                ring = ring + self.radial_weights[j] * self.radii[j] * values[i * nr + j];
            }
            acc = acc + ring;
        }
        acc * dtheta
    }

    /// ∫_{r_j}^1 f(ρ) dρ for each radial node, from samples at the radial nodes.
    pub fn tail_integrals(&self, samples: &[T]) -> Vec<T> {
        self.tail.iter().map(|row| row.iter().zip(samples).fold(T::zero(), |acc, (m, f)| acc + *m * *f)).collect()
    }
}

/// Polar tensor-product integral of a density over the disk with
/// refinement-based error estimate.
pub fn disk_integral<T, F>(density: F, spec: &QuadratureSpec) -> Result<Estimate<T>>
where
    T: Scalar,
    F: Fn(Point<T>) -> Result<T>,
{
    let fixed = |s: &QuadratureSpec| -> Result<T> {
        let grid = PolarGrid::<T>::from_spec(s);
        let values = grid.points().into_iter().map(&density).collect::<Result<Vec<_>>>()?;
        Ok(grid.integrate(&values))
    };
    let mut prev = fixed(spec)?;
    let mut est = T::zero();
    for level in 1..=MAX_REFINEMENTS {
        let next = fixed(&spec.refined(level))?;
        est = (next - prev).abs();
        prev = next;
        if est.as_f64() <= spec.target_tol {
            return Ok(Estimate { value: next, est_error: est });
        }
    }
    Err(Error::AccuracyNotReached { value: prev.as_f64(), estimate: est.as_f64(), target: spec.target_tol })
}

/// Cumulative integrals ∫_0^{θ_i} f for samples of a 2π-periodic function at
/// θ_i = 2πi/n, by term-wise integration of the trigonometric interpolant.
pub fn periodic_cumulative<T: Scalar>(values: &[T]) -> Vec<T> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let nf = T::from_usize_lossy(n);
    let two = T::lit(2.0);
    let cos_table: Vec<T> = (0..n).map(|m| (T::two_pi() * T::from_usize_lossy(m) / nf).cos()).collect();
    let sin_table: Vec<T> = (0..n).map(|m| (T::two_pi() * T::from_usize_lossy(m) / nf).sin()).collect();
    let mean = values.iter().fold(T::zero(), |a, v| a + *v) / nf;
    // Modes strictly below Nyquist; the Nyquist mode integrates to zero at the nodes.
    let kmax = (n - 1) / 2;
    let mut coeffs = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let (mut a, mut b) = (T::zero(), T::zero());
        for (i, v) in values.iter().enumerate() {
            let m = (k * i) % n;
            a = a + *v * cos_table[m];
            b = b + *v * sin_table[m];
        }
        coeffs.push((two * a / nf, two * b / nf));
    }
    (0..n)
        .map(|i| {
            let theta = T::two_pi() * T::from_usize_lossy(i) / nf;
            let mut acc = mean * theta;
            for (idx, (a, b)) in coeffs.iter().enumerate() {
                let k = idx + 1;
                let m = (k * i) % n;
                let kf = T::from_usize_lossy(k);
                acc = acc + (*a * sin_table[m] + *b * (T::one() - cos_table[m])) / kf;
            }
            acc
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "order")]
pub enum ConvergenceOrder {
    /// All rungs agree to round-off.
    Exact,
    Measured(f64),
    Undetermined,
}

/// Values and errors of a quantity across a resolution ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub resolutions: Vec<f64>,
    pub values: Vec<f64>,
    /// Distance to `reference` when given, else to the finest rung (one fewer entry).
    pub errors: Vec<f64>,
    pub order: ConvergenceOrder,
    pub monotone: bool,
}

/// Evaluates `thunk` on each rung of `ladder` and estimates the convergence order.
pub fn convergence_study<L, R, F>(
    ladder: &[L],
    resolution: R,
    reference: Option<f64>,
    thunk: F,
) -> Result<ConvergenceRecord>
where
    R: Fn(&L) -> f64,
    F: Fn(&L) -> Result<f64>,
{
    if ladder.len() < 3 {
        return Err(Error::ConfigError("convergence ladder needs at least 3 rungs".into()));
    }
    let resolutions: Vec<f64> = ladder.iter().map(&resolution).collect();
    let values = ladder.iter().map(&thunk).collect::<Result<Vec<f64>>>()?;
    let errors: Vec<f64> = match reference {
        Some(r) => values.iter().map(|v| (v - r).abs()).collect(),
        None => {
            let last = *values.last().expect("non-empty ladder");
            values[..values.len() - 1].iter().map(|v| (v - last).abs()).collect()
        }
    };
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let floor = 64.0 * f64::EPSILON * scale;
    let monotone = errors.windows(2).all(|w| w[1] <= w[0]);
    let order = if errors.iter().all(|e| *e <= floor) {
        ConvergenceOrder::Exact
    } else {
        let rates: Vec<f64> = errors
            .windows(2)
            .zip(resolutions.windows(2))
            .filter(|(e, _)| e[0] > floor && e[1] > floor)
            .map(|(e, r)| (e[0] / e[1]).ln() / (r[1] / r[0]).ln())
            .collect();
        if rates.is_empty() {
            ConvergenceOrder::Undetermined
        } else {
            ConvergenceOrder::Measured(rates.iter().sum::<f64>() / rates.len() as f64)
        }
    };
    Ok(ConvergenceRecord { resolutions, values, errors, order, monotone })
}
