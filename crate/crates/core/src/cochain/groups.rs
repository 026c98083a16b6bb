use crate::error::Result;
use crate::maps::{compose_words, inverse_word, MapWord};
use crate::scalar::Scalar;

use super::coefficient::ZMod;

/// An abstract group. Operations may fail when elements are evaluated numerically.
pub trait Group<E> {
    fn op(&self, a: &E, b: &E) -> Result<E>;
    fn identity(&self) -> E;
    fn inverse(&self, a: &E) -> Result<E>;
}

pub trait FiniteGroup<E>: Group<E> {
    fn elements(&self) -> Vec<E>;
}

impl<E, G: Group<E>> Group<E> for &G {
    fn op(&self, a: &E, b: &E) -> Result<E> {
        (*self).op(a, b)
    }
    fn identity(&self) -> E {
        (*self).identity()
    }
    fn inverse(&self, a: &E) -> Result<E> {
        (*self).inverse(a)
    }
}

/// ℤ/N under addition.
#[derive(Debug, Clone, Copy, Default)]
pub struct CyclicGroup<const N: u64>;

impl<const N: u64> Group<ZMod<N>> for CyclicGroup<N> {
    fn op(&self, a: &ZMod<N>, b: &ZMod<N>) -> Result<ZMod<N>> {
        Ok(ZMod((a.0 + b.0) % N))
    }
    fn identity(&self) -> ZMod<N> {
        ZMod(0)
    }
    fn inverse(&self, a: &ZMod<N>) -> Result<ZMod<N>> {
        Ok(ZMod((N - a.0) % N))
    }
}

impl<const N: u64> FiniteGroup<ZMod<N>> for CyclicGroup<N> {
    fn elements(&self) -> Vec<ZMod<N>> {
        (0..N).map(ZMod).collect()
    }
}

/// Map words under composition, (ab)(p) = a(b(p)).
#[derive(Debug, Clone, Copy, Default)]
pub struct WordGroup;

impl<T: Scalar> Group<MapWord<T>> for WordGroup {
    fn op(&self, a: &MapWord<T>, b: &MapWord<T>) -> Result<MapWord<T>> {
        Ok(compose_words(a, b))
    }
    fn identity(&self) -> MapWord<T> {
        MapWord::identity()
    }
    fn inverse(&self, a: &MapWord<T>) -> Result<MapWord<T>> {
        Ok(inverse_word(a))
    }
}

pub fn all_pairs<E: Clone, G: FiniteGroup<E>>(group: &G) -> Vec<(E, E)> {
    let els = group.elements();
    els.iter().flat_map(|a| els.iter().map(move |b| (a.clone(), b.clone()))).collect()
}

pub fn all_triples<E: Clone, G: FiniteGroup<E>>(group: &G) -> Vec<[E; 3]> {
    let els = group.elements();
    let mut out = Vec::with_capacity(els.len().pow(3));
    for a in &els {
        for b in &els {
            for c in &els {
                out.push([a.clone(), b.clone(), c.clone()]);
            }
        }
    }
    out
}

/// Smallest n ≥ 1 with xⁿ = e, searched up to `max`.
pub fn element_order<E: PartialEq + Clone, G: Group<E>>(group: &G, x: &E, max: usize) -> Result<Option<usize>> {
    let e = group.identity();
    let mut acc = x.clone();
    for n in 1..=max {
        if acc == e {
            return Ok(Some(n));
        }
        acc = group.op(&acc, x)?;
    }
    Ok(None)
}
