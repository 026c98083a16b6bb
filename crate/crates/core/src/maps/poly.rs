use crate::scalar::Scalar;

/// Dense univariate polynomial, coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly1<T> {
    pub coeffs: Vec<T>,
}

impl<T: Scalar> Poly1<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }

    pub fn eval(&self, u: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * u + *c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| *c * T::from_usize_lossy(i)).collect())
    }

    /// Antiderivative vanishing at 0.
    pub fn integral(&self) -> Self {
        let mut out = vec![T::zero()];
        out.extend(self.coeffs.iter().enumerate().map(|(i, c)| *c / T::from_usize_lossy(i + 1)));
        Self::new(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::new(Vec::new());
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j] + *a * *b;
            }
        }
        Self::new(out)
    }

    /// Multiplies by `u`.
    pub fn shift(&self) -> Self {
        let mut out = vec![T::zero()];
        out.extend_from_slice(&self.coeffs);
        Self::new(out)
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.coeffs.iter().map(|c| *c * s).collect())
    }
}

/// Bivariate polynomial `Σ c[i][j] xⁱ yʲ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariatePoly<T> {
    pub coeffs: Vec<Vec<T>>,
    terms: Vec<(usize, usize, T)>,
    max_power: usize,
}

/// Value, gradient and Hessian of a scalar field at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2<T> {
    pub v: T,
    pub x: T,
    pub y: T,
    pub xx: T,
    pub xy: T,
    pub yy: T,
}

const STACK_POWERS: usize = 12;

impl<T: Scalar> BivariatePoly<T> {
    pub fn new(coeffs: Vec<Vec<T>>) -> Self {
        let terms: Vec<(usize, usize, T)> = coeffs
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, c)| (i, j, *c)))
            .filter(|(_, _, c)| *c != T::zero())
            .collect();
        let max_power = terms.iter().map(|(i, j, _)| (*i).max(*j)).max().unwrap_or(0);
        Self { coeffs, terms, max_power }
    }

    pub fn coeff(&self, i: usize, j: usize) -> T {
        self.coeffs.get(i).and_then(|row| row.get(j)).copied().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: T, y: T) -> T {
        self.jet(x, y).v
    }

    /// Value with first and second derivatives.
    pub fn jet(&self, x: T, y: T) -> Jet2<T> {
        if self.max_power < STACK_POWERS {
            let mut px = [T::one(); STACK_POWERS];
            let mut py = [T::one(); STACK_POWERS];
            for n in 1..=self.max_power {
                px[n] = px[n - 1] * x;
                py[n] = py[n - 1] * y;
            }
            self.jet_with(&px, &py)
        } else {
            let mut px = vec![T::one(); self.max_power + 1];
            let mut py = vec![T::one(); self.max_power + 1];
            for n in 1..=self.max_power {
                px[n] = px[n - 1] * x;
                py[n] = py[n - 1] * y;
            }
            self.jet_with(&px, &py)
        }
    }

    fn jet_with(&self, px: &[T], py: &[T]) -> Jet2<T> {
        let mut jet = Jet2::default();
        for &(i, j, c) in &self.terms {
            let fi = T::from_usize_lossy(i);
            let fj = T::from_usize_lossy(j);
            jet.v = jet.v + c * px[i] * py[j];
            if i >= 1 {
                jet.x = jet.x + c * fi * px[i - 1] * py[j];
            }
            if j >= 1 {
                jet.y = jet.y + c * fj * px[i] * py[j - 1];
            }
            if i >= 2 {
                jet.xx = jet.xx + c * fi * (fi - T::one()) * px[i - 2] * py[j];
            }
            if j >= 2 {
                jet.yy = jet.yy + c * fj * (fj - T::one()) * px[i] * py[j - 2];
            }
            if i >= 1 && j >= 1 {
                jet.xy = jet.xy + c * fi * fj * px[i - 1] * py[j - 1];
            }
        }
        jet
    }
}
