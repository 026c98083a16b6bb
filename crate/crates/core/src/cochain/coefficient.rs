use std::sync::Arc;

use crate::error::Result;
use crate::geometry::{pull_covector, CotangentSample, Point};
use crate::maps::MapWord;
use crate::scalar::Scalar;

/// Abelian coefficient values.
pub trait Coefficient: Clone + Send + Sync + 'static {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

/// Coefficients that can be compared numerically.
pub trait Distance {
    fn distance(&self, other: &Self) -> f64;
}

/// Coefficients with finitely many values.
pub trait FiniteCoefficient: Coefficient {
    fn all() -> Vec<Self>;
}

macro_rules! float_coefficient {
    ($t:ty) => {
        impl Coefficient for $t {
            fn zero() -> Self {
                0.0
            }
            fn add(&self, other: &Self) -> Self {
                self + other
            }
            fn neg(&self) -> Self {
                -self
            }
            fn sub(&self, other: &Self) -> Self {
                self - other
            }
        }

        impl Distance for $t {
            fn distance(&self, other: &Self) -> f64 {
                (*self as f64 - *other as f64).abs()
            }
        }
    };
}

float_coefficient!(f32);
float_coefficient!(f64);

/// ℤ/N, also used as the element type of [`super::CyclicGroup`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ZMod<const N: u64>(pub u64);

impl<const N: u64> ZMod<N> {
    pub fn new(k: i64) -> Self {
        Self(k.rem_euclid(N as i64) as u64)
    }
}

impl<const N: u64> Coefficient for ZMod<N> {
    fn zero() -> Self {
        Self(0)
    }
    fn add(&self, other: &Self) -> Self {
        Self((self.0 + other.0) % N)
    }
    fn neg(&self) -> Self {
        Self((N - self.0) % N)
    }
}

impl<const N: u64> Distance for ZMod<N> {
    fn distance(&self, other: &Self) -> f64 {
        if self == other {
            0.0
        } else {
            1.0
        }
    }
}

impl<const N: u64> FiniteCoefficient for ZMod<N> {
    fn all() -> Vec<Self> {
        (0..N).map(Self).collect()
    }
}

/// Right action of a group on coefficients.
pub trait RightAction<E, A> {
    fn act(&self, value: &A, g: &E) -> Result<A>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Trivial;

impl<E, A: Clone> RightAction<E, A> for Trivial {
    fn act(&self, value: &A, _g: &E) -> Result<A> {
        Ok(value.clone())
    }
}

type FieldFn<T> = dyn Fn(Point<T>) -> Result<T> + Send + Sync;
type FormFn<T> = dyn Fn(Point<T>) -> Result<CotangentSample<T>> + Send + Sync;

/// A real function on the disk as a coefficient value.
#[derive(Clone)]
pub struct FieldValue<T>(Arc<FieldFn<T>>);

impl<T: Scalar> FieldValue<T> {
    pub fn new(f: impl Fn(Point<T>) -> Result<T> + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn eval(&self, p: Point<T>) -> Result<T> {
        (self.0)(p)
    }
}

impl<T: Scalar> Coefficient for FieldValue<T> {
    fn zero() -> Self {
        Self::new(|_| Ok(T::zero()))
    }
    fn add(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        Self::new(move |p| Ok(a.eval(p)? + b.eval(p)?))
    }
    fn neg(&self) -> Self {
        let a = self.clone();
        Self::new(move |p| Ok(-a.eval(p)?))
    }
}

/// A 1-form on the disk as a coefficient value.
#[derive(Clone)]
pub struct FormValue<T>(Arc<FormFn<T>>);

impl<T: Scalar> FormValue<T> {
    pub fn new(f: impl Fn(Point<T>) -> Result<CotangentSample<T>> + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn eval(&self, p: Point<T>) -> Result<CotangentSample<T>> {
        (self.0)(p)
    }
}

impl<T: Scalar> Coefficient for FormValue<T> {
    fn zero() -> Self {
        Self::new(|_| Ok(CotangentSample::zero()))
    }
    fn add(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        Self::new(move |p| Ok(a.eval(p)? + b.eval(p)?))
    }
    fn neg(&self) -> Self {
        let a = self.clone();
        Self::new(move |p| Ok(-a.eval(p)?))
    }
}

/// Pullback by map words: f^g = f ∘ g for functions, α^g = g*α for forms.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pullback;

impl<T: Scalar> RightAction<MapWord<T>, FieldValue<T>> for Pullback {
    fn act(&self, value: &FieldValue<T>, g: &MapWord<T>) -> Result<FieldValue<T>> {
        let (f, g) = (value.clone(), g.clone());
        Ok(FieldValue::new(move |p| f.eval(g.apply(p)?.clamped())))
    }
}

impl<T: Scalar> RightAction<MapWord<T>, FormValue<T>> for Pullback {
    fn act(&self, value: &FormValue<T>, g: &MapWord<T>) -> Result<FormValue<T>> {
        let (f, g) = (value.clone(), g.clone());
        Ok(FormValue::new(move |p| {
            let (q, jac, _) = g.eval_full(p)?;
            Ok(pull_covector(f.eval(q.clamped())?, &jac))
        }))
    }
}
