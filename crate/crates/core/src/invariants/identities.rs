//! One residual checker per asserted identity.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circle::chi_words;
use crate::cochain::{
    coboundary, connection_curvature_basic, verify_basic, FieldValue, GroupCochain, Pullback, WordGroup,
};
use crate::error::{Error, Result};
use crate::geometry::{eval_eta, CotangentSample, Point, QuadratureSpec};
use crate::maps::{compose_words, inverse_word, make_twist, MapWord, TwistSpec};

use super::generators::{word_pool, Subgroup};
use super::model::FluxExtensionModel;
use super::{
    area_profile, displacement, ilm_c, ilm_c_checked, ilm_c_general, k_field, k_field_from, tau, AreaProfile,
    PathStrategy,
};

macro_rules! identity_ids {
    ($($variant:ident => $name:literal, $tol:expr, $about:literal;)*) => {
        /// The enumerated identities; the string forms are the report ids.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum IdentityId {
            $(#[doc = $about] #[serde(rename = $name)] $variant,)*
        }

        impl IdentityId {
            pub const ALL: &'static [IdentityId] = &[$(IdentityId::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self { $(IdentityId::$variant => $name,)* }
            }

            pub fn default_tolerance(self) -> f64 {
                match self { $(IdentityId::$variant => $tol,)* }
            }

            pub fn description(self) -> &'static str {
                match self { $(IdentityId::$variant => $about,)* }
            }
        }
    };
}

identity_ids! {
    TauEuler => "PROP_3_3", 1e-7, "-δτ(g,h) = πχ(μ,ν) on G";
    TauConnection => "COR_3_5_i", 1e-8, "τ(gh) = τ(hg) = τ(g) + flux(h) for h ∈ G_rel";
    FluxConjugation => "COR_3_5_ii", 1e-8, "flux is conjugation invariant and additive on G_rel";
    TauBound => "REMARK_3_4_BOUND", 1e-6, "|δτ| ≤ π on G, |C| ≤ π on H, |χ| < 1";
    FluxExtension => "THM_A", 1e-8, "basic cocycle of τ̄ on the G/K model is -πχ";
    IlmCocycle => "ILM_COCYCLE", 1e-7, "δC = 0 on H, chord and boundary-arc paths agree";
    IlmEqTau => "ILM_EQ_TAU", 1e-7, "C = -δτ on G";
    ZigzagDk => "ZIGZAG_DK", 1e-7, "d𝒦(g) = η - g*η and δ𝒦 = -C";
    X0Indep => "X0_INDEP", 1e-7, "C_{x0} - C_{x1} = -δβ with β(g) = 𝒦(g)(x1)";
    EtaIndep => "ETA_INDEP", 1e-7, "C_{η+dF} - C_η = -δu with u(g) = (F∘g - F)(x0)";
    Stokes => "STOKES_5_4", 1e-6, "τ0 = ∫_D 𝒦ω - κ";
    KappaRel => "LEMMA_5_6", 1e-7, "κ(h) = 0 and κ(gh) = κ(hg) = κ(g) for h ∈ H_rel";
    TauPrimeRel => "LEMMA_5_7", 1e-6, "τ'(gh) = τ'(hg) = τ'(g) + Cal(h) for h ∈ H_rel";
    TauPrimeCurvature => "PROP_5_4", 1e-6, "-δτ' = πC on H";
    MixedHomomorphism => "REMARK_5_5", 1e-6, "πτ - τ' is additive on G";
    IlmBasic => "THM_B_BASIC", 1e-7, "C and δτ are basic, C = πχ";
    CalHom => "CAL_HOM", 1e-7, "Cal is additive on H_rel";
    FluxLinear => "FLUX_LINEAR", 1e-10, "flux(h_s) = s flux(h_1) = -s/4";
    SignAudit => "SIGN_AUDIT_MORI16", 1e-5, "fit of δτ0 + δκ against χ";
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::ConfigError(format!("unknown identity id `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub index: usize,
    /// Digest of the input words.
    pub digest: String,
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub id: IdentityId,
    pub tolerance: f64,
    pub n: usize,
    pub max_residual: Option<f64>,
    pub mean_residual: Option<f64>,
    pub verdict: Verdict,
    pub samples: Vec<Sample>,
    /// Measured constants reported alongside the residuals.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl IdentityReport {
    fn from_samples(id: IdentityId, tolerance: f64, samples: Vec<Sample>, notes: BTreeMap<String, f64>) -> Self {
        let residuals: Vec<f64> = samples.iter().filter_map(|s| s.residual).collect();
        let max_residual = residuals.iter().copied().reduce(f64::max);
        let mean_residual = (!residuals.is_empty()).then(|| residuals.iter().sum::<f64>() / residuals.len() as f64);
        let error = samples.iter().find_map(|s| s.error.clone());
        let verdict = if error.is_some() || max_residual.is_none() {
            Verdict::Error
        } else if max_residual.is_some_and(|m| m <= tolerance) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self { id, tolerance, n: samples.len(), max_residual, mean_residual, verdict, samples, notes, error }
    }

    fn errored(id: IdentityId, tolerance: f64, err: &Error) -> Self {
        Self {
            id,
            tolerance,
            n: 0,
            max_residual: None,
            mean_residual: None,
            verdict: Verdict::Error,
            samples: Vec::new(),
            notes: BTreeMap::new(),
            error: Some(err.to_string()),
        }
    }
}

/// Fixed primitive-shift F(x,y) = x²y/4 for the η-independence check.
pub fn shift_potential(p: Point<f64>) -> f64 {
    p.x * p.x * p.y / 4.0
}

/// η + dF with dF = (xy/2, x²/4).
pub fn shifted_eta(p: Point<f64>) -> CotangentSample<f64> {
    eval_eta(p) + CotangentSample::new(p.x * p.y / 2.0, p.x * p.x / 4.0)
}

/// Settings shared by all checkers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckConfig {
    pub seed: u64,
    pub n_instances: usize,
    /// Line integrals.
    pub quadrature: QuadratureSpec,
    /// Polar grids for area invariants inside the checkers.
    pub area_quadrature: QuadratureSpec,
    pub tolerances: BTreeMap<IdentityId, f64>,
    pub tol_scale: f64,
    pub x1: Point<f64>,
    /// Interior point of the non-basic negative control.
    pub control_point: Point<f64>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            seed: 20240601,
            n_instances: 20,
            quadrature: QuadratureSpec::default(),
            area_quadrature: QuadratureSpec { radial_nodes: 16, angular_nodes: 64, ..QuadratureSpec::default() },
            tolerances: BTreeMap::new(),
            tol_scale: 1.0,
            x1: Point::new(0.0, 0.5),
            control_point: Point::new(0.3, 0.2),
        }
    }
}

impl CheckConfig {
    pub fn tolerance(&self, id: IdentityId) -> f64 {
        self.tolerances.get(&id).copied().unwrap_or_else(|| id.default_tolerance()) * self.tol_scale
    }

    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        self.area_quadrature.validate()?;
        if self.n_instances == 0 {
            return Err(Error::ConfigError("n_instances must be positive".into()));
        }
        if !(self.tol_scale > 0.0 && self.tol_scale.is_finite()) {
            return Err(Error::ConfigError("tol_scale must be positive and finite".into()));
        }
        if let Some((id, t)) = self.tolerances.iter().find(|(_, t)| t.is_nan() || **t <= 0.0) {
            return Err(Error::ConfigError(format!("tolerance for {id} must be positive, got {t}")));
        }
        for (name, p) in [("x1", self.x1), ("control_point", self.control_point)] {
            if !p.in_disk(1e-12) {
                return Err(Error::ConfigError(format!("{name} lies outside the disk")));
            }
        }
        Ok(())
    }
}

/// Per-word results shared by checkers, keyed by word digest and quadrature.
#[derive(Default)]
pub struct Cache {
    tau: Mutex<HashMap<(String, String), f64>>,
    profile: Mutex<HashMap<(String, String), AreaProfile<f64>>>,
}

fn spec_key(spec: &QuadratureSpec) -> String {
    serde_json::to_string(spec).expect("spec serializes")
}

/// Memoizing evaluator at fixed quadrature settings.
pub struct Engine {
    pub line: QuadratureSpec,
    pub area: QuadratureSpec,
    cache: Arc<Cache>,
}

impl Engine {
    pub fn new(line: QuadratureSpec, area: QuadratureSpec, cache: Arc<Cache>) -> Self {
        Self { line, area, cache }
    }

    /// Quadrature targets tightened to a tenth of the identity tolerance.
    pub fn for_tolerance(config: &CheckConfig, tol: f64, cache: Arc<Cache>) -> Self {
        let line = config.quadrature.with_target(config.quadrature.target_tol.min(tol / 10.0));
        let area = config.area_quadrature.with_target(config.area_quadrature.target_tol.min(tol / 10.0));
        Self::new(line, area, cache)
    }

    pub fn tau(&self, w: &MapWord<f64>) -> Result<f64> {
        let key = (w.digest(), spec_key(&self.line));
        if let Some(v) = self.cache.tau.lock().expect("cache lock").get(&key) {
            return Ok(*v);
        }
        let v = tau(w, &self.line)?.value;
        self.cache.tau.lock().expect("cache lock").insert(key, v);
        Ok(v)
    }

    pub fn flux(&self, w: &MapWord<f64>) -> Result<f64> {
        if !(w.fixes_origin() && w.boundary_identity()) {
            return Err(Error::DomainError { membership: "in_G_rel" });
        }
        self.tau(w)
    }

    pub fn delta_tau(&self, g: &MapWord<f64>, h: &MapWord<f64>) -> Result<f64> {
        Ok(self.tau(h)? - self.tau(&compose_words(g, h))? + self.tau(g)?)
    }

    pub fn profile(&self, w: &MapWord<f64>) -> Result<AreaProfile<f64>> {
        let key = (w.digest(), spec_key(&self.area));
        if let Some(v) = self.cache.profile.lock().expect("cache lock").get(&key) {
            return Ok(*v);
        }
        let v = area_profile(w, &self.area)?;
        self.cache.profile.lock().expect("cache lock").insert(key, v);
        Ok(v)
    }

    pub fn tau0(&self, w: &MapWord<f64>) -> Result<f64> {
        Ok(self.profile(w)?.tau0.value)
    }

    pub fn calabi(&self, w: &MapWord<f64>) -> Result<f64> {
        if !w.boundary_identity() {
            return Err(Error::DomainError { membership: "in_H_rel" });
        }
        self.tau0(w)
    }

    pub fn kappa(&self, w: &MapWord<f64>) -> Result<f64> {
        Ok(self.profile(w)?.kappa.value)
    }

    pub fn tau_prime(&self, w: &MapWord<f64>) -> Result<f64> {
        let p = self.profile(w)?;
        Ok(p.tau0.value + p.kappa.value)
    }

    pub fn c(&self, g: &MapWord<f64>, h: &MapWord<f64>) -> Result<f64> {
        Ok(ilm_c(g, h, PathStrategy::Chord, &self.line)?.value)
    }

    pub fn k(&self, g: &MapWord<f64>, p: Point<f64>) -> Result<f64> {
        Ok(k_field(g, p, &self.line)?.value)
    }
}

fn digest_of(words: &[&MapWord<f64>]) -> String {
    let mut hasher = Sha256::new();
    for w in words {
        hasher.update(w.digest().as_bytes());
        hasher.update(b"|");
    }
    hasher.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn run<I: Sync>(
    inputs: &[I],
    digest: impl Fn(&I) -> String + Sync,
    f: impl Fn(&I) -> Result<f64> + Sync,
) -> Vec<Sample> {
    inputs
        .par_iter()
        .enumerate()
        .map(|(index, input)| {
            let digest = digest(input);
            match f(input) {
                Ok(r) => Sample { index, digest, residual: Some(r), error: None },
                Err(e) => Sample { index, digest, residual: None, error: Some(e.to_string()) },
            }
        })
        .collect()
}

fn pairs(a: Vec<MapWord<f64>>, b: Vec<MapWord<f64>>) -> Vec<(MapWord<f64>, MapWord<f64>)> {
    a.into_iter().zip(b).collect()
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Runs one checker on `config.n_instances` seeded instances.
pub fn check_identity(id: IdentityId, config: &CheckConfig) -> IdentityReport {
    check_identity_with(id, config, Arc::default())
}

pub fn check_identity_with(id: IdentityId, config: &CheckConfig, cache: Arc<Cache>) -> IdentityReport {
    let tol = config.tolerance(id);
    match check_inner(id, config, tol, cache) {
        Ok((samples, notes)) => {
            let mut report = IdentityReport::from_samples(id, tol, samples, notes);
            if id == IdentityId::IlmBasic
                && report.verdict == Verdict::Pass
                && report.notes.get("negative_control_residual").is_none_or(|r| *r < NEGATIVE_CONTROL_MIN)
            {
                report.verdict = Verdict::Fail;
            }
            report
        }
        Err(e) => IdentityReport::errored(id, tol, &e),
    }
}

/// Runs several checkers and returns reports sorted by id.
pub fn check_all(ids: &[IdentityId], config: &CheckConfig) -> Vec<IdentityReport> {
    let cache = Arc::new(Cache::default());
    let mut reports: Vec<IdentityReport> =
        ids.par_iter().map(|id| check_identity_with(*id, config, Arc::clone(&cache))).collect();
    reports.sort_by_key(|r| r.id);
    reports
}

pub const NEGATIVE_CONTROL_MIN: f64 = 1e-2;
const FD_STEP: f64 = 1e-5;
/// Finite-difference gradients are held to 100× the identity tolerance.
const FD_TOLERANCE_FACTOR: f64 = 100.0;
const FLUX_SCALES: [f64; 4] = [0.5, 1.0, 2.0, -1.0];

type Outcome = (Vec<Sample>, BTreeMap<String, f64>);

fn check_inner(id: IdentityId, config: &CheckConfig, tol: f64, cache: Arc<Cache>) -> Result<Outcome> {
    config.validate()?;
    let n = config.n_instances;
    let seed = config.seed;
    let engine = Engine::for_tolerance(config, tol, cache);
    let e = &engine;
    let pool = |sg: Subgroup, count: usize| word_pool(seed, sg, count);
    let split = |sg: Subgroup| -> Result<Vec<(MapWord<f64>, MapWord<f64>)>> {
        let w = pool(sg, 2 * n)?;
        Ok(pairs(w[..n].to_vec(), w[n..].to_vec()))
    };
    let pd = |p: &(MapWord<f64>, MapWord<f64>)| digest_of(&[&p.0, &p.1]);
    let mut notes = BTreeMap::new();

    let samples = match id {
        IdentityId::TauEuler => {
            run(&split(Subgroup::G)?, pd, |(g, h)| Ok((-e.delta_tau(g, h)? - PI * chi_words(g, h)?).abs()))
        }
        IdentityId::TauConnection => {
            let ps = pairs(pool(Subgroup::G, n)?, pool(Subgroup::GRel, n)?);
            run(&ps, pd, |(g, h)| {
                let f = e.flux(h)?;
                let tg = e.tau(g)?;
                Ok(max_abs(&[e.tau(&compose_words(g, h))? - tg - f, e.tau(&compose_words(h, g))? - tg - f]))
            })
        }
        IdentityId::FluxConjugation => {
            let g = pool(Subgroup::G, n)?;
            let rel = pool(Subgroup::GRel, 2 * n)?;
            let triples: Vec<_> = (0..n).map(|i| (g[i].clone(), rel[i].clone(), rel[n + i].clone())).collect();
            run(
                &triples,
                |t| digest_of(&[&t.0, &t.1, &t.2]),
                |(g, h1, h2)| {
                    // g h g⁻¹ is boundary-relative although its factors are not.
                    let conj = compose_words(&compose_words(g, h1), &inverse_word(g));
                    let f1 = e.flux(h1)?;
                    Ok(max_abs(&[e.tau(&conj)? - f1, e.flux(&compose_words(h1, h2))? - f1 - e.flux(h2)?]))
                },
            )
        }
        IdentityId::TauBound => {
            let gp = split(Subgroup::G)?;
            let hp = split(Subgroup::H)?;
            let stats = Mutex::new((0.0f64, 0.0f64, 0.0f64));
            let mut s = run(&gp, pd, |(g, h)| {
                let dt = e.delta_tau(g, h)?.abs();
                let chi = chi_words(g, h)?.abs();
                let mut st = stats.lock().expect("stats lock");
                st.0 = st.0.max(dt);
                st.2 = st.2.max(chi);
                Ok((dt - PI).max(0.0).max(if chi < 1.0 { 0.0 } else { chi }))
            });
            let hs = run(&hp, pd, |(g, h)| {
                let c = e.c(g, h)?.abs();
                let chi = chi_words(g, h)?.abs();
                let mut st = stats.lock().expect("stats lock");
                st.1 = st.1.max(c);
                st.2 = st.2.max(chi);
                Ok((c - PI).max(0.0).max(if chi < 1.0 { 0.0 } else { chi }))
            });
            s.extend(hs.into_iter().map(|x| Sample { index: x.index + n, ..x }));
            let st = stats.into_inner().expect("stats lock");
            notes.insert("max_abs_delta_tau".into(), st.0);
            notes.insert("max_abs_c".into(), st.1);
            notes.insert("max_abs_chi".into(), st.2);
            s
        }
        IdentityId::FluxExtension => {
            let model = FluxExtensionModel::new(engine.line);
            let ext = model.extension();
            let fibers = [0.0, 0.25, -0.4];
            run(&split(Subgroup::G)?, pd, |(g, h)| {
                let chi = chi_words(g, h)?;
                let basic = connection_curvature_basic(
                    &ext,
                    &FluxExtensionModel::tau_bar(),
                    &[(g.clone(), h.clone())],
                    &fibers,
                    tol,
                )?;
                let mut r = (basic.eval(&[g.clone(), h.clone()])? + PI * chi).abs();
                for (a, b) in [(0.0, 0.0), (0.25, -0.4)] {
                    let x = compose_words(g, &FluxExtensionModel::fiber_word(a)?);
                    let y = compose_words(h, &FluxExtensionModel::fiber_word(b)?);
                    r = r.max((e.delta_tau(&x, &y)? + PI * chi).abs());
                }
                Ok(r)
            })
        }
        IdentityId::IlmCocycle => {
            let w = pool(Subgroup::H, 3 * n)?;
            let triples: Vec<_> = (0..n).map(|i| (w[i].clone(), w[n + i].clone(), w[2 * n + i].clone())).collect();
            let worst_mismatch = Mutex::new(0.0f64);
            let s = run(
                &triples,
                |t| digest_of(&[&t.0, &t.1, &t.2]),
                |(g, h, k)| {
                    let gh = compose_words(g, h);
                    let hk = compose_words(h, k);
                    let mut vals = Vec::with_capacity(4);
                    let mut mismatch = 0.0f64;
                    for (a, b) in [(h, k), (&gh, k), (g, &hk), (g, h)] {
                        let (c, d) = ilm_c_checked(a, b, &e.line, tol)?;
                        vals.push(c.value);
                        mismatch = mismatch.max(d);
                    }
                    let mut wm = worst_mismatch.lock().expect("lock");
                    *wm = wm.max(mismatch);
                    Ok((vals[0] - vals[1] + vals[2] - vals[3]).abs().max(mismatch))
                },
            );
            notes.insert("max_strategy_difference".into(), worst_mismatch.into_inner().expect("lock"));
            s
        }
        IdentityId::IlmEqTau => run(&split(Subgroup::G)?, pd, |(g, h)| Ok((e.c(g, h)? + e.delta_tau(g, h)?).abs())),
        IdentityId::ZigzagDk => {
            let probes = [Point::new(0.31, -0.42), Point::new(-0.55, 0.12), Point::new(0.05, 0.77)];
            let k_cochain = GroupCochain::<MapWord<f64>, FieldValue<f64>>::from_fn1({
                let line = engine.line;
                move |g: &MapWord<f64>| {
                    let g = g.clone();
                    Ok(FieldValue::new(move |p| Ok(k_field(&g, p, &line)?.value)))
                }
            });
            let dk = coboundary(&k_cochain, WordGroup, Pullback);
            let fd_worst = Mutex::new(0.0f64);
            let s = run(&split(Subgroup::H)?, pd, |(g, h)| {
                let mut fd = 0.0f64;
                for p in probes {
                    let kx = (e.k(g, Point::new(p.x + FD_STEP, p.y))? - e.k(g, Point::new(p.x - FD_STEP, p.y))?)
                        / (2.0 * FD_STEP);
                    let ky = (e.k(g, Point::new(p.x, p.y + FD_STEP))? - e.k(g, Point::new(p.x, p.y - FD_STEP))?)
                        / (2.0 * FD_STEP);
                    let exact = -displacement(g, p)?;
                    fd = fd.max((kx - exact.a).abs()).max((ky - exact.b).abs());
                }
                let field = dk.eval(&[g.clone(), h.clone()])?;
                let c = e.c(g, h)?;
                let mut r = fd / FD_TOLERANCE_FACTOR;
                let vals = probes.iter().map(|p| field.eval(*p)).collect::<Result<Vec<_>>>()?;
                for v in &vals {
                    r = r.max((v + c).abs()).max((v - vals[0]).abs());
                }
                let mut w = fd_worst.lock().expect("lock");
                *w = w.max(fd);
                Ok(r)
            });
            notes.insert("max_fd_gradient_error".into(), fd_worst.into_inner().expect("lock"));
            notes.insert("fd_step".into(), FD_STEP);
            s
        }
        IdentityId::X0Indep => {
            let x1 = config.x1;
            run(&split(Subgroup::H)?, pd, |(g, h)| {
                let beta = |w: &MapWord<f64>| Ok::<_, Error>(k_field(w, x1, &e.line)?.value);
                let d_beta = beta(h)? - beta(&compose_words(g, h))? + beta(g)?;
                let c1 = ilm_c_general(g, h, eval_eta, x1, &e.line)?.value;
                Ok((e.c(g, h)? - c1 + d_beta).abs())
            })
        }
        IdentityId::EtaIndep => run(&split(Subgroup::H)?, pd, |(g, h)| {
            let x0 = Point::x0();
            let u = |w: &MapWord<f64>| Ok::<_, Error>(shift_potential(w.apply(x0)?) - shift_potential(x0));
            let d_u = u(h)? - u(&compose_words(g, h))? + u(g)?;
            let shifted = ilm_c_general(g, h, shifted_eta, x0, &e.line)?.value;
            Ok((shifted - e.c(g, h)? + d_u).abs())
        }),
        IdentityId::Stokes => {
            let w = pool(Subgroup::H, n)?;
            run(
                &w,
                |w| digest_of(&[w]),
                |w| {
                    let p = e.profile(w)?;
                    Ok((p.tau0.value - p.k_omega.value + p.kappa.value).abs())
                },
            )
        }
        IdentityId::KappaRel => {
            let ps = pairs(pool(Subgroup::H, n)?, pool(Subgroup::HRel, n)?);
            run(&ps, pd, |(g, h)| {
                let kg = e.kappa(g)?;
                Ok(max_abs(&[e.kappa(h)?, e.kappa(&compose_words(g, h))? - kg, e.kappa(&compose_words(h, g))? - kg]))
            })
        }
        IdentityId::TauPrimeRel => {
            let ps = pairs(pool(Subgroup::H, n)?, pool(Subgroup::HRel, n)?);
            run(&ps, pd, |(g, h)| {
                let base = e.tau_prime(g)? + e.calabi(h)?;
                Ok(max_abs(&[e.tau_prime(&compose_words(g, h))? - base, e.tau_prime(&compose_words(h, g))? - base]))
            })
        }
        IdentityId::TauPrimeCurvature => run(&split(Subgroup::H)?, pd, |(g, h)| {
            let d = e.tau_prime(h)? - e.tau_prime(&compose_words(g, h))? + e.tau_prime(g)?;
            Ok((d + PI * e.c(g, h)?).abs())
        }),
        IdentityId::MixedHomomorphism => run(&split(Subgroup::G)?, pd, |(g, h)| {
            let m = |w: &MapWord<f64>| Ok::<_, Error>(PI * e.tau(w)? - e.tau_prime(w)?);
            Ok((m(&compose_words(g, h))? - m(g)? - m(h)?).abs())
        }),
        IdentityId::IlmBasic => {
            let line = engine.line;
            let c_cochain = GroupCochain::<MapWord<f64>, f64>::from_fn2(move |g, h| {
                Ok(ilm_c(g, h, PathStrategy::Chord, &line)?.value)
            });
            let h_rel = pool(Subgroup::HRel, 4)?;
            let h_pert = vec![(h_rel[0].clone(), h_rel[1].clone()), (h_rel[2].clone(), h_rel[3].clone())];
            let g_rel = pool(Subgroup::GRel, 4)?;
            let g_pert = vec![(g_rel[0].clone(), g_rel[1].clone()), (g_rel[2].clone(), g_rel[3].clone())];
            let dtau = GroupCochain::<MapWord<f64>, f64>::from_fn2(move |g, h| {
                let t = |w: &MapWord<f64>| Ok::<_, Error>(tau(w, &line)?.value);
                Ok(t(h)? - t(&compose_words(g, h))? + t(g)?)
            });
            let hp = split(Subgroup::H)?;
            let gp = split(Subgroup::G)?;
            let mut s = run(&hp, pd, |(g, h)| {
                let rep = verify_basic(&c_cochain, &WordGroup, &[(g.clone(), h.clone())], &h_pert, tol)?;
                let pointwise = (e.c(g, h)? - PI * chi_words(g, h)?).abs();
                Ok(rep.max_residual.max(pointwise))
            });
            let gs = run(&gp, pd, |(g, h)| {
                Ok(verify_basic(&dtau, &WordGroup, &[(g.clone(), h.clone())], &g_pert, tol)?.max_residual)
            });
            s.extend(gs.into_iter().map(|x| Sample { index: x.index + n, ..x }));
            notes.insert("negative_control_residual".into(), negative_control(config, &engine, &hp)?);
            s
        }
        IdentityId::CalHom => run(&split(Subgroup::HRel)?, pd, |(a, b)| {
            Ok((e.calabi(&compose_words(a, b))? - e.calabi(a)? - e.calabi(b)?).abs())
        }),
        IdentityId::FluxLinear => {
            let h1 = rel_twist(1.0)?;
            let f1 = e.flux(&h1)?;
            notes.insert("flux_h1".into(), f1);
            let words = FLUX_SCALES.iter().map(|s| Ok((*s, rel_twist(*s)?))).collect::<Result<Vec<_>>>()?;
            let mut s = run(
                &words,
                |(_, w)| digest_of(&[w]),
                |(s, w)| {
                    let f = e.flux(w)?;
                    Ok(max_abs(&[f - s * f1, f + s / 4.0]))
                },
            );
            if f1.abs() <= tol {
                // A vanishing flux(h_1) cannot witness surjectivity.
                s.push(Sample {
                    index: s.len(),
                    digest: digest_of(&[&h1]),
                    residual: Some(f64::INFINITY),
                    error: None,
                });
            }
            s
        }
        IdentityId::SignAudit => {
            let hp = split(Subgroup::H)?;
            let rows: Vec<Result<(f64, f64, f64)>> = hp
                .par_iter()
                .map(|(g, h)| {
                    let gh = compose_words(g, h);
                    let d_tau0 = e.tau0(h)? - e.tau0(&gh)? + e.tau0(g)?;
                    let d_kappa = e.kappa(h)? - e.kappa(&gh)? + e.kappa(g)?;
                    Ok((chi_words(g, h)?, d_tau0, d_kappa))
                })
                .collect();
            let ok: Vec<(f64, f64, f64)> = rows.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
            let xs: Vec<f64> = ok.iter().map(|r| r.0).collect();
            let full: Vec<f64> = ok.iter().map(|r| r.1 + r.2).collect();
            let bare: Vec<f64> = ok.iter().map(|r| r.1).collect();
            let (a, b) = linear_fit(&xs, &full)?;
            let (a0, b0) = linear_fit(&xs, &bare)?;
            let bare_resid = xs.iter().zip(&bare).map(|(x, y)| (y - a0 * x - b0).abs()).fold(0.0, f64::max);
            let pi2 = PI * PI;
            notes.insert("fit_a".into(), a);
            notes.insert("fit_b".into(), b);
            notes.insert("fit_a_over_pi2".into(), a / pi2);
            notes.insert("fit_without_kappa_a".into(), a0);
            notes.insert("fit_without_kappa_b".into(), b0);
            notes.insert("fit_without_kappa_max_residual".into(), bare_resid);
            notes.insert("max_abs_delta_kappa".into(), max_abs(&ok.iter().map(|r| r.2).collect::<Vec<_>>()));
            notes.insert("max_abs_chi".into(), max_abs(&xs));
            let close = |x: f64, y: f64| if (x - y).abs() <= tol { 1.0 } else { 0.0 };
            notes.insert("minus_pi2_chi_holds".into(), close(a, -pi2) * close(b, 0.0));
            notes.insert("cited_holds".into(), close(a, pi2) * close(b, pi2 / 2.0));
            rows.into_iter()
                .zip(&hp)
                .enumerate()
                .map(|(index, (r, p))| {
                    let digest = pd(p);
                    match r {
                        Ok((x, t, k)) => {
                            Sample { index, digest, residual: Some((t + k - a * x - b).abs()), error: None }
                        }
                        Err(err) => Sample { index, digest, residual: None, error: Some(err.to_string()) },
                    }
                })
                .collect()
        }
    };
    Ok((samples, notes))
}

fn rel_twist(s: f64) -> Result<MapWord<f64>> {
    make_twist(&TwistSpec { m: 1, poly_r2: vec![s], exp: 1 })
}

/// Least-squares fit y ≈ a·x + b.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return Err(Error::ConfigError("a linear fit needs at least 2 samples".into()));
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= f64::EPSILON * n {
        return Err(Error::ConfigError("degenerate fit: sampled χ values do not vary".into()));
    }
    let a = sxy / sxx;
    Ok((a, my - a * mx))
}

/// c(g,h) = 𝒦(g)(h(p*)) for an interior p*: its value moves when h is perturbed
/// by strong boundary-relative flows, so `verify_basic` must flag it.
pub fn negative_control(config: &CheckConfig, engine: &Engine, pairs: &[(MapWord<f64>, MapWord<f64>)]) -> Result<f64> {
    let line = engine.line;
    let p_star = config.control_point;
    let control = GroupCochain::<MapWord<f64>, f64>::from_fn2(move |g, h| {
        Ok(k_field_from(g, Point::x0(), h.apply(p_star)?.clamped(), &line)?.value)
    });
    let strong = |q: Vec<Vec<f64>>| {
        crate::maps::make_ham_flow::<f64>(&crate::maps::HamSpec { k: 2, q, time: 0.5, steps: None, exp: 1 })
    };
    let pert = vec![
        (MapWord::identity(), strong(vec![vec![1.0, 0.8], vec![-0.9]])?),
        (MapWord::identity(), strong(vec![vec![-1.0, 0.0, 1.0], vec![0.7]])?),
    ];
    let take = pairs.len().min(4);
    Ok(verify_basic(&control, &WordGroup, &pairs[..take], &pert, 0.0)?.max_residual)
}

/// Residual of a checker evaluated at one fixed resolution, for convergence
/// studies. Supported for the τ-Euler identity (line quadrature) and the
/// Stokes identity (area quadrature).
pub fn residual_at(id: IdentityId, words: &[(MapWord<f64>, MapWord<f64>)], spec: &QuadratureSpec) -> Result<f64> {
    let fixed = spec.with_target(f64::MAX);
    let mut worst = 0.0f64;
    for (g, h) in words {
        let r = match id {
            IdentityId::TauEuler => {
                let t = |w: &MapWord<f64>| Ok::<_, Error>(tau(w, &fixed)?.value);
                let dt = t(h)? - t(&compose_words(g, h))? + t(g)?;
                (-dt - PI * chi_words(g, h)?).abs()
            }
            IdentityId::Stokes => {
                let p = area_profile(g, &fixed)?;
                (p.tau0.value - p.k_omega.value + p.kappa.value).abs()
            }
            other => return Err(Error::ConfigError(format!("no convergence study is defined for {other}"))),
        };
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Instances used by [`residual_at`] for generated convergence studies.
pub fn convergence_instances(
    id: IdentityId,
    config: &CheckConfig,
    count: usize,
) -> Result<Vec<(MapWord<f64>, MapWord<f64>)>> {
    match id {
        IdentityId::TauEuler => {
            let w = word_pool(config.seed, Subgroup::G, 2 * count)?;
            Ok(pairs(w[..count].to_vec(), w[count..].to_vec()))
        }
        IdentityId::Stokes => {
            Ok(word_pool(config.seed, Subgroup::H, count)?.into_iter().map(|w| (w, MapWord::identity())).collect())
        }
        other => Err(Error::ConfigError(format!("no convergence study is defined for {other}"))),
    }
}
