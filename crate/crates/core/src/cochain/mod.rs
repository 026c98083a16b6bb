//! Group cochains, coboundaries, central extensions and connection cochains.
//!
//! Coboundary convention, right action on the last slot:
//! δc(g₁,…,g_{p+1}) = c(g₂,…) + Σᵢ (−1)ⁱ c(…,gᵢg_{i+1},…) + (−1)^{p+1} c(g₁,…,g_p)^{g_{p+1}}.
//! For trivial action on 1-cochains this is δτ(g,h) = τ(h) − τ(gh) + τ(g); for
//! 0-cochains it is δα(g) = α − α^g.

mod coefficient;
pub mod cup;
mod extension;
mod groups;

use std::sync::Arc;

use crate::error::Result;

pub use coefficient::{
    Coefficient, Distance, FieldValue, FiniteCoefficient, FormValue, Pullback, RightAction, Trivial, ZMod,
};
pub use cup::{cup_eta_deltaeta, cup_k_eta, cup_k_omega};
pub use extension::{
    connection_curvature_basic, extension_from_cocycle, verify_basic, BasicReport, CentralExtension, ConnectionCochain,
    ExtElem,
};
pub use groups::{all_pairs, all_triples, element_order, CyclicGroup, FiniteGroup, Group, WordGroup};

type Evaluator<E, A> = dyn Fn(&[E]) -> Result<A> + Send + Sync;

/// A p-cochain Γᵖ → A given by an evaluator.
pub struct GroupCochain<E, A> {
    arity: usize,
    eval: Arc<Evaluator<E, A>>,
}

impl<E, A> Clone for GroupCochain<E, A> {
    fn clone(&self) -> Self {
        Self { arity: self.arity, eval: Arc::clone(&self.eval) }
    }
}

impl<E, A> std::fmt::Debug for GroupCochain<E, A> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroupCochain").field("arity", &self.arity).finish_non_exhaustive()
    }
}

impl<E: 'static, A: Coefficient> GroupCochain<E, A> {
    pub fn new(arity: usize, eval: impl Fn(&[E]) -> Result<A> + Send + Sync + 'static) -> Self {
        Self { arity, eval: Arc::new(eval) }
    }

    pub fn constant(arity: usize, value: A) -> Self {
        Self::new(arity, move |_| Ok(value.clone()))
    }

    pub fn from_fn1(f: impl Fn(&E) -> Result<A> + Send + Sync + 'static) -> Self {
        Self::new(1, move |g: &[E]| f(&g[0]))
    }

    pub fn from_fn2(f: impl Fn(&E, &E) -> Result<A> + Send + Sync + 'static) -> Self {
        Self::new(2, move |g: &[E]| f(&g[0], &g[1]))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Evaluates on a tuple of exactly `arity` elements.
    pub fn eval(&self, args: &[E]) -> Result<A> {
        assert_eq!(args.len(), self.arity, "cochain arity mismatch");
        (self.eval)(args)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity);
        let (a, b) = (self.clone(), other.clone());
        Self::new(self.arity, move |g: &[E]| Ok(a.eval(g)?.add(&b.eval(g)?)))
    }

    pub fn neg(&self) -> Self {
        let a = self.clone();
        Self::new(self.arity, move |g: &[E]| Ok(a.eval(g)?.neg()))
    }

    pub fn scale(&self, s: f64) -> Self
    where
        A: std::ops::Mul<f64, Output = A>,
    {
        let a = self.clone();
        Self::new(self.arity, move |g: &[E]| Ok(a.eval(g)? * s))
    }
}

/// δc with coefficients twisted by `action` on the last slot.
pub fn coboundary<E, A, G, R>(c: &GroupCochain<E, A>, group: G, action: R) -> GroupCochain<E, A>
where
    E: Clone + Send + Sync + 'static,
    A: Coefficient,
    G: Group<E> + Send + Sync + 'static,
    R: RightAction<E, A> + Send + Sync + 'static,
{
    let p = c.arity();
    let c = c.clone();
    GroupCochain::new(p + 1, move |g: &[E]| {
        let mut acc = c.eval(&g[1..])?;
        for i in 0..p {
            let mut merged: Vec<E> = Vec::with_capacity(p);
            merged.extend_from_slice(&g[..i]);
            merged.push(group.op(&g[i], &g[i + 1])?);
            merged.extend_from_slice(&g[i + 2..]);
            let term = c.eval(&merged)?;
            acc = if i % 2 == 0 { acc.sub(&term) } else { acc.add(&term) };
        }
        let last = action.act(&c.eval(&g[..p])?, &g[p])?;
        Ok(if p.is_multiple_of(2) { acc.sub(&last) } else { acc.add(&last) })
    })
}

/// δc for trivial coefficients.
pub fn coboundary_trivial<E, A, G>(c: &GroupCochain<E, A>, group: G) -> GroupCochain<E, A>
where
    E: Clone + Send + Sync + 'static,
    A: Coefficient,
    G: Group<E> + Send + Sync + 'static,
{
    coboundary(c, group, Trivial)
}
