//! Sign field of the on-barrier Lie derivative and the safe-set boundary.

use std::path::Path;

use serde::Serialize;
use shieldnn_core::synthesis::BoundaryTrace;
use shieldnn_core::LieContext;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionCell {
    pub xi: f64,
    pub beta: f64,
    /// Lie derivative on the barrier at unit speed.
    pub lie: f64,
    pub safe: bool,
}

/// `n` points on `[-a, a]`, exactly symmetric about 0.
fn symmetric_grid(a: f64, n: usize) -> Vec<f64> {
    let m = (n - 1) as f64;
    (0..n).map(|i| a * (2.0 * i as f64 - m) / m).collect()
}

/// Evaluates the sign field on an `n_xi × n_beta` grid over
/// `[-π, π] × [-β_max, β_max]`.
pub fn sign_grid(ctx: &LieContext, n_xi: usize, n_beta: usize) -> Result<Vec<RegionCell>> {
    if n_xi < 2 || n_beta < 2 {
        return Err(CliError::Usage("region grid needs at least 2 points per axis".into()));
    }
    let xs = symmetric_grid(std::f64::consts::PI, n_xi);
    let bs = symmetric_grid(ctx.beta_max(), n_beta);
    let mut out = Vec::with_capacity(n_xi * n_beta);
    for &xi in &xs {
        for &beta in &bs {
            let lie = ctx.lie(xi, beta);
            out.push(RegionCell {
                xi,
                beta,
                lie,
                safe: lie >= 0.0,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPoint {
    /// `lower` on `[xi0, π]`, `upper` its reflection on `[-π, -xi0]`.
    pub branch: &'static str,
    pub xi: f64,
    pub beta: f64,
}

pub fn boundary_polylines(trace: &BoundaryTrace) -> Vec<BoundaryPoint> {
    let lower = trace.samples.iter().map(|s| BoundaryPoint {
        branch: "lower",
        xi: s.xi,
        beta: s.beta,
    });
    let upper = trace.samples.iter().rev().map(|s| BoundaryPoint {
        branch: "upper",
        xi: -s.xi,
        beta: -s.beta,
    });
    lower.chain(upper).collect()
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let err = |source| CliError::Csv {
        path: path.to_owned(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    for row in rows {
        w.serialize(row).map_err(err)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}
