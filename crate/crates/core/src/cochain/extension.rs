use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::coefficient::{Coefficient, Distance, FiniteCoefficient};
use super::groups::{FiniteGroup, Group};
use super::{coboundary_trivial, GroupCochain};

/// Element (g, a) of a central extension.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtElem<E, A> {
    pub g: E,
    pub a: A,
}

/// Γ ×_σ A with (g,a)(h,b) = (gh, a + b + σ(g,h)).
#[derive(Clone)]
pub struct CentralExtension<G, E, A> {
    base: G,
    sigma: GroupCochain<E, A>,
}

impl<G, E, A> CentralExtension<G, E, A>
where
    G: Group<E>,
    E: Clone + 'static,
    A: Coefficient,
{
    /// Builds without checking the cocycle identity.
    pub fn new_unchecked(base: G, sigma: GroupCochain<E, A>) -> Self {
        assert_eq!(sigma.arity(), 2, "extension cocycle must be a 2-cochain");
        Self { base, sigma }
    }

    pub fn base(&self) -> &G {
        &self.base
    }

    pub fn cocycle(&self) -> &GroupCochain<E, A> {
        &self.sigma
    }

    fn sigma(&self, g: &E, h: &E) -> Result<A> {
        self.sigma.eval(&[g.clone(), h.clone()])
    }

    fn offset(&self) -> Result<A> {
        let e = self.base.identity();
        self.sigma(&e, &e)
    }

    pub fn project(&self, x: &ExtElem<E, A>) -> E {
        x.g.clone()
    }

    /// The section g ↦ (g, 0).
    pub fn lift(&self, g: &E) -> ExtElem<E, A> {
        ExtElem { g: g.clone(), a: A::zero() }
    }

    /// The fiber copy a ↦ (e, a − σ(e,e)), a homomorphism A → E.
    pub fn include(&self, a: &A) -> Result<ExtElem<E, A>> {
        Ok(ExtElem { g: self.base.identity(), a: a.sub(&self.offset()?) })
    }

    /// x · ι(a).
    pub fn act_fiber(&self, x: &ExtElem<E, A>, a: &A) -> Result<ExtElem<E, A>> {
        self.op(x, &self.include(a)?)
    }
}

impl<G, E, A> Group<ExtElem<E, A>> for CentralExtension<G, E, A>
where
    G: Group<E>,
    E: Clone + 'static,
    A: Coefficient,
{
    fn op(&self, x: &ExtElem<E, A>, y: &ExtElem<E, A>) -> Result<ExtElem<E, A>> {
        Ok(ExtElem { g: self.base.op(&x.g, &y.g)?, a: x.a.add(&y.a).add(&self.sigma(&x.g, &y.g)?) })
    }

    fn identity(&self) -> ExtElem<E, A> {
        let e = self.base.identity();
        let a = self.offset().map(|s| s.neg()).unwrap_or_else(|_| A::zero());
        ExtElem { g: e, a }
    }

    fn inverse(&self, x: &ExtElem<E, A>) -> Result<ExtElem<E, A>> {
        let g_inv = self.base.inverse(&x.g)?;
        let s = self.sigma(&x.g, &g_inv)?;
        let a = x.a.neg().sub(&s).sub(&self.offset()?);
        Ok(ExtElem { g: g_inv, a })
    }
}

impl<G, E, A> FiniteGroup<ExtElem<E, A>> for CentralExtension<G, E, A>
where
    G: FiniteGroup<E>,
    E: Clone + 'static,
    A: FiniteCoefficient,
{
    fn elements(&self) -> Vec<ExtElem<E, A>> {
        let fiber = A::all();
        self.base
            .elements()
            .into_iter()
            .flat_map(|g| fiber.iter().map(move |a| ExtElem { g: g.clone(), a: a.clone() }).collect::<Vec<_>>())
            .collect()
    }
}

/// Builds Γ ×_σ A after checking δσ = 0 on the supplied triples.
pub fn extension_from_cocycle<G, E, A>(
    base: G,
    sigma: GroupCochain<E, A>,
    triples: &[[E; 3]],
    tol: f64,
) -> Result<CentralExtension<G, E, A>>
where
    G: Group<E> + Clone + Send + Sync + 'static,
    E: Clone + Send + Sync + 'static,
    A: Coefficient + Distance,
{
    let d = coboundary_trivial(&sigma, base.clone());
    let mut worst = 0.0f64;
    for t in triples {
        worst = worst.max(d.eval(t)?.distance(&A::zero()));
    }
    if worst > tol {
        return Err(Error::NotACocycle { residual: worst });
    }
    Ok(CentralExtension::new_unchecked(base, sigma))
}

/// A 1-cochain on an extension, expected to satisfy τ(x·ι(a)) = τ(x) + a.
#[derive(Clone, Debug)]
pub struct ConnectionCochain<E, A> {
    pub tau: GroupCochain<ExtElem<E, A>, A>,
}

impl<E, A> ConnectionCochain<E, A>
where
    E: Clone + Send + Sync + 'static,
    A: Coefficient,
{
    pub fn new(f: impl Fn(&ExtElem<E, A>) -> Result<A> + Send + Sync + 'static) -> Self {
        Self { tau: GroupCochain::from_fn1(f) }
    }

    /// The canonical connection τ(g, a) = a.
    pub fn fiber_coordinate() -> Self {
        Self::new(|x| Ok(x.a.clone()))
    }

    pub fn eval(&self, x: &ExtElem<E, A>) -> Result<A> {
        self.tau.eval(std::slice::from_ref(x))
    }

    /// max |τ(x·ι(a)) − τ(x) − a| over the samples.
    pub fn connection_defect<G>(
        &self,
        ext: &CentralExtension<G, E, A>,
        elems: &[ExtElem<E, A>],
        fibers: &[A],
    ) -> Result<f64>
    where
        G: Group<E>,
        A: Distance,
    {
        let mut worst = 0.0f64;
        for x in elems {
            let tx = self.eval(x)?;
            for a in fibers {
                let lhs = self.eval(&ext.act_fiber(x, a)?)?;
                worst = worst.max(lhs.distance(&tx.add(a)));
            }
        }
        Ok(worst)
    }
}

/// Curvature δτ descended to Γ: c(g,h) = δτ(s(g), s(h)) for the section s,
/// after checking the connection law and independence of the lifts.
pub fn connection_curvature_basic<G, E, A>(
    ext: &CentralExtension<G, E, A>,
    tau: &ConnectionCochain<E, A>,
    pairs: &[(E, E)],
    fibers: &[A],
    tol: f64,
) -> Result<GroupCochain<E, A>>
where
    G: Group<E> + Clone + Send + Sync + 'static,
    E: Clone + Send + Sync + 'static,
    A: Coefficient + Distance,
{
    let elems: Vec<_> = pairs.iter().flat_map(|(g, h)| [ext.lift(g), ext.lift(h)]).collect();
    let defect = tau.connection_defect(ext, &elems, fibers)?;
    if defect > tol {
        return Err(Error::NotConnection { residual: defect });
    }
    let curvature = coboundary_trivial(&tau.tau, ext.clone());
    let mut worst = 0.0f64;
    for (g, h) in pairs {
        let base = curvature.eval(&[ext.lift(g), ext.lift(h)])?;
        for a in fibers {
            for b in fibers {
                let x = ext.act_fiber(&ext.lift(g), a)?;
                let y = ext.act_fiber(&ext.lift(h), b)?;
                worst = worst.max(curvature.eval(&[x, y])?.distance(&base));
            }
        }
    }
    if worst > tol {
        return Err(Error::NotBasic { residual: worst });
    }
    let ext = ext.clone();
    Ok(GroupCochain::from_fn2(move |g, h| curvature.eval(&[ext.lift(g), ext.lift(h)])))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasicReport {
    pub n: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub basic: bool,
}

/// max |c(gk, hk′) − c(g,h)| over pairs and perturbations (k, k′).
pub fn verify_basic<G, E, A>(
    c: &GroupCochain<E, A>,
    group: &G,
    pairs: &[(E, E)],
    perturbations: &[(E, E)],
    tol: f64,
) -> Result<BasicReport>
where
    G: Group<E>,
    E: Clone + 'static,
    A: Coefficient + Distance,
{
    let mut worst = 0.0f64;
    let mut n = 0;
    for (g, h) in pairs {
        let base = c.eval(&[g.clone(), h.clone()])?;
        for (k, k2) in perturbations {
            let v = c.eval(&[group.op(g, k)?, group.op(h, k2)?])?;
            worst = worst.max(v.distance(&base));
            n += 1;
        }
    }
    Ok(BasicReport { n, max_residual: worst, tolerance: tol, basic: worst <= tol })
}
