//! Residual-versus-resolution studies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{convergence_study, ConvergenceRecord, QuadratureSpec};
use crate::maps::MapWord;

use super::identities::{residual_at, IdentityId};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityConvergence {
    pub id: IdentityId,
    pub ladder: Vec<QuadratureSpec>,
    /// Residuals against the exact value 0.
    pub record: ConvergenceRecord,
}

/// Resolution ladder used when none is given.
pub fn default_ladder(id: IdentityId) -> Vec<usize> {
    match id {
        IdentityId::Stokes => vec![4, 8, 16],
        _ => vec![2, 4, 8],
    }
}

/// Quadrature for one rung: Gauss–Legendre order for line identities, radial
/// node count (with four angular nodes per radial node) for area identities.
pub fn rung_spec(id: IdentityId, base: &QuadratureSpec, resolution: usize) -> QuadratureSpec {
    match id {
        IdentityId::Stokes => QuadratureSpec { radial_nodes: resolution, angular_nodes: 4 * resolution, ..*base },
        _ => QuadratureSpec { gl_order: resolution, ..*base },
    }
}

pub fn identity_convergence(
    id: IdentityId,
    words: &[(MapWord<f64>, MapWord<f64>)],
    base: &QuadratureSpec,
    ladder: &[usize],
) -> Result<IdentityConvergence> {
    if ladder.windows(2).any(|w| w[1] <= w[0]) || ladder.first() == Some(&0) {
        return Err(Error::ConfigError("ladder resolutions must be positive and increasing".into()));
    }
    let specs: Vec<QuadratureSpec> = ladder.iter().map(|r| rung_spec(id, base, *r)).collect();
    for s in &specs {
        s.validate()?;
    }
    let record = convergence_study(
        &specs,
        |s| match id {
            IdentityId::Stokes => s.radial_nodes as f64,
            _ => s.gl_order as f64,
        },
        Some(0.0),
        |s| residual_at(id, words, s),
    )?;
    Ok(IdentityConvergence { id, ladder: specs, record })
}
