//! Suite configuration files.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use fluxlab::geometry::QuadratureSpec;
use fluxlab::invariants::identities::{CheckConfig, IdentityId};
use fluxlab::maps::WordSpec;
use fluxlab::{Error, MapWord64, Point64, Result};

/// `"all"` or an explicit list of identity ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Selection {
    Keyword(String),
    Ids(Vec<String>),
}

impl Default for Selection {
    fn default() -> Self {
        Selection::Keyword("all".into())
    }
}

impl Selection {
    pub fn resolve(&self) -> Result<Vec<IdentityId>> {
        let ids = match self {
            Selection::Keyword(k) if k.eq_ignore_ascii_case("all") => IdentityId::ALL.to_vec(),
            Selection::Keyword(k) => vec![k.parse()?],
            Selection::Ids(v) => v.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>()?,
        };
        if ids.is_empty() {
            return Err(Error::ConfigError("no identities selected".into()));
        }
        let unique: BTreeSet<IdentityId> = ids.into_iter().collect();
        Ok(unique.into_iter().collect())
    }

    /// Comma-separated ids, or `all`.
    pub fn parse_list(s: &str) -> Self {
        if s.trim().eq_ignore_ascii_case("all") {
            Selection::default()
        } else {
            Selection::Ids(s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect())
        }
    }
}

/// Per-field overrides of a [`QuadratureSpec`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureOverrides {
    pub gl_order: Option<usize>,
    pub panels_1d: Option<usize>,
    pub radial_nodes: Option<usize>,
    pub angular_nodes: Option<usize>,
    pub refine_factor: Option<usize>,
    pub target_tol: Option<f64>,
}

impl QuadratureOverrides {
    pub fn apply(&self, mut q: QuadratureSpec) -> QuadratureSpec {
        if let Some(v) = self.gl_order {
            q.gl_order = v;
        }
        if let Some(v) = self.panels_1d {
            q.panels_1d = v;
        }
        if let Some(v) = self.radial_nodes {
            q.radial_nodes = v;
        }
        if let Some(v) = self.angular_nodes {
            q.angular_nodes = v;
        }
        if let Some(v) = self.refine_factor {
            q.refine_factor = v;
        }
        if let Some(v) = self.target_tol {
            q.target_tol = v;
        }
        q
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub identities: Selection,
    pub seed: u64,
    pub n_instances: usize,
    pub quadrature: QuadratureOverrides,
    pub area_quadrature: QuadratureOverrides,
    pub tolerances: BTreeMap<String, f64>,
    pub tol_scale: f64,
    pub x1: Option<Point64>,
    pub words: Vec<WordSpec>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        let c = CheckConfig::default();
        Self {
            identities: Selection::default(),
            seed: c.seed,
            n_instances: c.n_instances,
            quadrature: QuadratureOverrides::default(),
            area_quadrature: QuadratureOverrides::default(),
            tolerances: BTreeMap::new(),
            tol_scale: c.tol_scale,
            x1: None,
            words: Vec::new(),
        }
    }
}

impl SuiteConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::ConfigError(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.identities.resolve()?;
        self.check_config()?.validate()?;
        let mut names = BTreeSet::new();
        for w in &self.words {
            if !names.insert(w.name.as_str()) {
                return Err(Error::ConfigError(format!("duplicate word name {:?}", w.name)));
            }
            w.build::<f64>().map_err(|e| Error::ConfigError(format!("word {:?}: {e}", w.name)))?;
        }
        Ok(())
    }

    pub fn check_config(&self) -> Result<CheckConfig> {
        let base = CheckConfig::default();
        let tolerances = self
            .tolerances
            .iter()
            .map(|(k, v)| Ok((k.parse::<IdentityId>()?, *v)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(CheckConfig {
            seed: self.seed,
            n_instances: self.n_instances,
            quadrature: self.quadrature.apply(base.quadrature),
            area_quadrature: self.area_quadrature.apply(base.area_quadrature),
            tolerances,
            tol_scale: self.tol_scale,
            x1: self.x1.unwrap_or(base.x1),
            ..base
        })
    }

    pub fn word(&self, name: &str) -> Result<MapWord64> {
        let spec = self
            .words
            .iter()
            .find(|w| w.name == name)
            .ok_or_else(|| Error::ConfigError(format!("word {name:?} is not in the library")))?;
        spec.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_the_default_suite() {
        let c = SuiteConfig::from_json("{}").unwrap();
        assert_eq!(c, SuiteConfig::default());
        assert_eq!(c.identities.resolve().unwrap().len(), IdentityId::ALL.len());
        assert_eq!(c.check_config().unwrap(), CheckConfig::default());
    }

    #[test]
    fn selection_forms() {
        let c = SuiteConfig::from_json(r#"{"identities": ["prop_3_3", "PROP_3_3", "CAL_HOM"]}"#).unwrap();
        assert_eq!(c.identities.resolve().unwrap(), vec![IdentityId::TauEuler, IdentityId::CalHom]);
        let c = SuiteConfig::from_json(r#"{"identities": "STOKES_5_4"}"#).unwrap();
        assert_eq!(c.identities.resolve().unwrap(), vec![IdentityId::Stokes]);
        assert_eq!(Selection::parse_list(" all ").resolve().unwrap().len(), 19);
        assert_eq!(Selection::parse_list("ILM_EQ_TAU,").resolve().unwrap(), vec![IdentityId::IlmEqTau]);
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            r#"{"identities": ["PROP_9_9"]}"#,
            r#"{"identities": []}"#,
            r#"{"n_instances": 0}"#,
            r#"{"tolerances": {"NOPE": 1e-3}}"#,
            r#"{"tolerances": {"CAL_HOM": -1}}"#,
            r#"{"quadrature": {"gl_order": 0}}"#,
            r#"{"quadrature": {"gl_ordr": 4}}"#,
            r#"{"seeds": 3}"#,
            r#"{"words": [{"name": "a", "factors": []}, {"name": "a", "factors": []}]}"#,
            r#"{"words": [{"name": "a", "factors": [{"type": "ham", "k": 5, "q": [[1.0]], "time": 0.1, "exp": 1}]}]}"#,
        ] {
            assert!(matches!(SuiteConfig::from_json(bad), Err(Error::ConfigError(_) | Error::InvalidSpec(_))), "{bad}");
        }
    }

    #[test]
    fn overrides_and_words() {
        let c = SuiteConfig::from_json(
            r#"{"quadrature": {"gl_order": 8}, "tolerances": {"CAL_HOM": 1e-3},
                "words": [{"name": "t", "factors": [{"type": "twist", "m": 1, "poly_r2": [1.0], "exp": 1}]}]}"#,
        )
        .unwrap();
        let cc = c.check_config().unwrap();
        assert_eq!(cc.quadrature.gl_order, 8);
        assert_eq!(cc.quadrature.panels_1d, QuadratureSpec::default().panels_1d);
        assert_eq!(cc.tolerance(IdentityId::CalHom), 1e-3);
        assert!(c.word("t").unwrap().boundary_identity());
        assert!(matches!(c.word("u"), Err(Error::ConfigError(_))));
    }
}
