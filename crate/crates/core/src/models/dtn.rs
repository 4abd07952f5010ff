//! Per-mode quantities on the product cylinder `S¹(L) × N` cut along
//! `{0} × N`: the Dirichlet-to-Neumann eigenvalue of a mode and the two
//! one-dimensional determinant factors.

use crate::error::{Error, Result};

/// DtN eigenvalue of the mode with cross-section eigenvalue `μ`:
/// `2ν tanh(νL/2)` with `ν = √(μ+λ)`. The harmonic extension of the mode is
/// `cosh(ν(u - L/2))/cosh(νL/2)`, whose normal-derivative jump across the
/// cut is exactly that value.
pub fn dtn_eigenvalue(mu: f64, lambda: f64, len: f64) -> Result<f64> {
    let nu2 = mu + lambda;
    if nu2 < 0.0 {
        return Err(Error::Domain {
            what: "dtn_eigenvalue",
            cond: "mu + lambda >= 0",
        });
    }
    let nu = nu2.sqrt();
    let x = 0.5 * nu * len;
    if x < 1e-6 {
        // 2ν tanh(x) = ν²L (1 - x²/3 + …); continuous limit 0 at ν = 0.
        return Ok(nu2 * len * (1.0 - x * x / 3.0));
    }
    Ok(2.0 * nu * x.tanh())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OneDimKind {
    /// `-d²/du² + ν²` on the circle of circumference `L`.
    Circle,
    /// The same operator on `[0, L]` with Dirichlet ends.
    DirichletInterval,
}

/// Log-determinant of the one-dimensional factor:
/// circle `ln(4 sinh²(νL/2))`, interval `ln(2 sinh(νL)/ν)`.
/// Evaluated in overflow-safe form; `ν = 0` is the caller's zero-mode case.
pub fn lndet_1d(nu: f64, len: f64, kind: OneDimKind) -> Result<f64> {
    if nu <= 0.0 {
        return Err(Error::Domain {
            what: "lndet_1d",
            cond: "nu > 0 (zero modes are handled explicitly by the caller)",
        });
    }
    let y = nu * len;
    Ok(match kind {
        OneDimKind::Circle => y + 2.0 * (-(-y).exp()).ln_1p(),
        OneDimKind::DirichletInterval => y + (-(-2.0 * y).exp()).ln_1p() - nu.ln(),
    })
}

/// `circle - interval - ln(DtN)` for one mode; equals `-ln 2` for every ν.
pub fn per_mode_defect(nu: f64, len: f64) -> Result<f64> {
    let c = lndet_1d(nu, len, OneDimKind::Circle)?;
    let i = lndet_1d(nu, len, OneDimKind::DirichletInterval)?;
    let r = dtn_eigenvalue(nu * nu, 0.0, len)?;
    Ok(c - i - r.ln())
}
