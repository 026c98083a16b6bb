//! Machine-readable verification reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::QuadratureSpec;

use super::identities::{CheckConfig, IdentityId, IdentityReport, Verdict};

pub const REPORT_VERSION: &str = "1.0";

/// Sign and ordering conventions in force for every number in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub coboundary: String,
    pub hamiltonian_sign: String,
    pub wedge_order: String,
    pub composition: String,
    pub primitive: String,
    pub euler_cocycle: String,
    /// Measured sign facts, filled in from the suites that were run.
    pub findings: BTreeMap<String, String>,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            coboundary:
                "dc(g1..g_{p+1}) = c(g2..) + sum_i (-1)^i c(..g_i g_{i+1}..) + (-1)^{p+1} c(g1..g_p)^{g_{p+1}}; \
                         1-cochains: dt(g,h) = t(h) - t(gh) + t(g); forms: da(g) = a - g*a"
                    .into(),
            hamiltonian_sign: "X_H = (dH/dy, -dH/dx), H = (1 - r^2)^k q(x, y)".into(),
            wedge_order: "density of a^b against dx^dy is a1 b2 - a2 b1; tau0(g) = int_D g*eta ^ eta".into(),
            composition: "(ab)(p) = a(b(p)); pullback (g*a)_p = a_{g(p)} Dg_p".into(),
            primitive: "eta = (x dy - y dx)/2, x0 = (1, 0), gamma(t) = (t, 0)".into(),
            euler_cocycle: "chi(mu,nu) = (phi psi(0) - phi(0) - psi(0)) / 2pi".into(),
            findings: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub seed: u64,
    pub n_instances: usize,
    pub tol_scale: f64,
    pub quadrature: QuadratureSpec,
    pub area_quadrature: QuadratureSpec,
}

impl Environment {
    pub fn from_config(config: &CheckConfig) -> Self {
        Self {
            seed: config.seed,
            n_instances: config.n_instances,
            tol_scale: config.tol_scale,
            quadrature: config.quadrature,
            area_quadrature: config.area_quadrature,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub conventions: Conventions,
    pub suites: Vec<IdentityReport>,
    pub environment: Environment,
}

impl Report {
    /// Assembles a report with suites sorted by identity id.
    pub fn new(mut suites: Vec<IdentityReport>, environment: Environment) -> Self {
        suites.sort_by_key(|s| s.id);
        let conventions = Conventions { findings: findings(&suites), ..Conventions::default() };
        Self { version: REPORT_VERSION.into(), conventions, suites, environment }
    }

    pub fn all_pass(&self) -> bool {
        self.suites.iter().all(|s| s.verdict == Verdict::Pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn findings(suites: &[IdentityReport]) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    let note = |id: IdentityId, key: &str| suites.iter().find(|s| s.id == id).and_then(|s| s.notes.get(key).copied());
    if let Some(f) = note(IdentityId::FluxLinear, "flux_h1") {
        let sign = if f < 0.0 { "negative" } else { "positive" };
        out.insert("flux_of_nonnegative_profile_twist".into(), format!("{sign} ({f:.12e})"));
    }
    if let (Some(a), Some(b)) = (note(IdentityId::SignAudit, "fit_a"), note(IdentityId::SignAudit, "fit_b")) {
        out.insert(
            "basic_cocycle_of_delta_tau0_plus_delta_kappa".into(),
            format!("{a:.9} chi + {b:.3e} (a / pi^2 = {:.9})", a / std::f64::consts::PI.powi(2)),
        );
        let holds = |x: Option<f64>| match x {
            Some(v) if v > 0.5 => "holds",
            _ => "does not hold",
        };
        out.insert("minus_pi2_chi".into(), holds(note(IdentityId::SignAudit, "minus_pi2_chi_holds")).into());
        out.insert("cited_pi2_chi_plus_half_pi2".into(), holds(note(IdentityId::SignAudit, "cited_holds")).into());
    }
    out
}
