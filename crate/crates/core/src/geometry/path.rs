use crate::scalar::Scalar;

use super::Point;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathKind<T> {
    /// γ(t) = (t, 0), t ∈ [0, 1].
    RadialGamma,
    Chord {
        from: Point<T>,
        to: Point<T>,
    },
    /// Boundary arc between lifted angles; the lifted length may exceed 2π.
    BoundaryArc {
        start: T,
        end: T,
    },
}

/// A path `[0, 1] → D` with its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path<T> {
    pub kind: PathKind<T>,
}

impl<T: Scalar> Path<T> {
    pub fn radial_gamma() -> Self {
        Self { kind: PathKind::RadialGamma }
    }

    pub fn chord(from: Point<T>, to: Point<T>) -> Self {
        Self { kind: PathKind::Chord { from, to } }
    }

    pub fn boundary_arc(start: T, end: T) -> Self {
        Self { kind: PathKind::BoundaryArc { start, end } }
    }

    pub fn point(&self, s: T) -> Point<T> {
        match self.kind {
            PathKind::RadialGamma => Point::new(s, T::zero()),
            PathKind::Chord { from, to } => from + (to - from) * s,
            PathKind::BoundaryArc { start, end } => Point::on_boundary(start + (end - start) * s),
        }
    }

    pub fn velocity(&self, s: T) -> (T, T) {
        match self.kind {
            PathKind::RadialGamma => (T::one(), T::zero()),
            PathKind::Chord { from, to } => (to.x - from.x, to.y - from.y),
            PathKind::BoundaryArc { start, end } => {
                let len = end - start;
                let th = start + len * s;
                (-th.sin() * len, th.cos() * len)
            }
        }
    }

    pub fn start(&self) -> Point<T> {
        self.point(T::zero())
    }

    pub fn end(&self) -> Point<T> {
        self.point(T::one())
    }
}
