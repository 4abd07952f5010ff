//! Weighted linear least squares over a fixed basis of asymptotic shape
//! functions, with condition-number diagnostics.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape functions for the λ → ∞ and t → 0 expansions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisFn {
    One,
    X,
    XLnX,
    SqrtX,
    LnX,
    InvSqrtX,
    InvX,
    InvXSq,
    XSq,
    XSqLnX,
}

impl BasisFn {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            BasisFn::One => 1.0,
            BasisFn::X => x,
            BasisFn::XLnX => x * x.ln(),
            BasisFn::SqrtX => x.sqrt(),
            BasisFn::LnX => x.ln(),
            BasisFn::InvSqrtX => 1.0 / x.sqrt(),
            BasisFn::InvX => 1.0 / x,
            BasisFn::InvXSq => 1.0 / (x * x),
            BasisFn::XSq => x * x,
            BasisFn::XSqLnX => x * x * x.ln(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BasisFn::One => "1",
            BasisFn::X => "x",
            BasisFn::XLnX => "x·ln x",
            BasisFn::SqrtX => "sqrt x",
            BasisFn::LnX => "ln x",
            BasisFn::InvSqrtX => "x^-1/2",
            BasisFn::InvX => "x^-1",
            BasisFn::InvXSq => "x^-2",
            BasisFn::XSq => "x^2",
            BasisFn::XSqLnX => "x^2·ln x",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitSpec {
    pub basis: Vec<BasisFn>,
    /// Per-sample weights (1 when absent).
    pub weights: Option<Vec<f64>>,
    /// Reject the fit when the column-scaled design matrix is worse than
    /// this.
    pub condition_limit: f64,
}

impl FitSpec {
    pub fn new(basis: Vec<BasisFn>) -> Self {
        FitSpec {
            basis,
            weights: None,
            condition_limit: 1e10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FitResult {
    pub coeffs: Vec<f64>,
    pub stderr: Vec<f64>,
    pub condition: f64,
    /// `max|residual| / max|y|`.
    pub resid_rel: f64,
    pub resid_max: f64,
}

/// Solve the weighted least-squares problem over the basis. Columns are
/// normalized before the SVD; the condition number reported (and limited)
/// is that of the scaled design matrix.
pub fn least_squares(spec: &FitSpec, xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    let n = xs.len();
    let k = spec.basis.len();
    if n < k {
        return Err(Error::FitRejected(format!(
            "{n} samples for {k} basis functions"
        )));
    }
    let sqrt_w: Vec<f64> = match &spec.weights {
        Some(w) => {
            if w.len() != n {
                return Err(Error::FitRejected("weight/sample length mismatch".into()));
            }
            w.iter().map(|v| v.sqrt()).collect()
        }
        None => vec![1.0; n],
    };
    let mut design = DMatrix::zeros(n, k);
    for (i, &x) in xs.iter().enumerate() {
        for (j, b) in spec.basis.iter().enumerate() {
            design[(i, j)] = b.eval(x) * sqrt_w[i];
        }
    }
    let rhs = DVector::from_iterator(n, ys.iter().zip(&sqrt_w).map(|(&y, &s)| y * s));

    // Column scaling.
    let mut col_norm = vec![0.0f64; k];
    for j in 0..k {
        col_norm[j] = design.column(j).norm();
        if col_norm[j] == 0.0 {
            return Err(Error::FitRejected(format!(
                "basis column {} is identically zero",
                spec.basis[j].name()
            )));
        }
    }
    let mut scaled = design.clone();
    for j in 0..k {
        let inv = 1.0 / col_norm[j];
        scaled.column_mut(j).scale_mut(inv);
    }

    let svd = scaled.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = smax / smin;
    if !condition.is_finite() || condition > spec.condition_limit {
        return Err(Error::FitRejected(format!(
            "condition number {condition:.3e} above limit {:.1e}",
            spec.condition_limit
        )));
    }
    let beta_scaled = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::FitRejected(e.to_string()))?;
    let coeffs: Vec<f64> = (0..k).map(|j| beta_scaled[j] / col_norm[j]).collect();

    let fitted = design * DVector::from_vec(coeffs.clone());
    let resid = &rhs - &fitted;
    let resid_max = resid.amax();
    let ymax = rhs.amax().max(1e-300);
    let dof = (n - k).max(1) as f64;
    let sigma2 = resid.norm_squared() / dof;

    // Var(β̂) = σ² (XᵀX)⁻¹ = σ² D⁻¹ V Σ⁻² Vᵀ D⁻¹.
    let v = svd.v_t.as_ref().unwrap().transpose();
    let mut stderr = vec![0.0; k];
    for j in 0..k {
        let mut s = 0.0;
        for m in 0..k {
            let vv = v[(j, m)] / svd.singular_values[m];
            s += vv * vv;
        }
        stderr[j] = (sigma2 * s).sqrt() / col_norm[j];
    }

    Ok(FitResult {
        coeffs,
        stderr,
        condition,
        resid_rel: resid_max / ymax,
        resid_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_linear_law() {
        let xs: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.5 * x - 1.25).collect();
        let spec = FitSpec::new(vec![BasisFn::One, BasisFn::X]);
        let fit = least_squares(&spec, &xs, &ys).unwrap();
        assert!((fit.coeffs[0] + 1.25).abs() < 1e-12);
        assert!((fit.coeffs[1] - 3.5).abs() < 1e-13);
        assert!(fit.resid_rel < 1e-14);
    }

    #[test]
    fn condition_limit_rejects() {
        // Two nearly identical columns.
        let xs: Vec<f64> = (1..=12).map(|i| 1.0 + 1e-13 * i as f64).collect();
        let ys = vec![1.0; 12];
        let mut spec = FitSpec::new(vec![BasisFn::One, BasisFn::X]);
        spec.condition_limit = 1e6;
        assert!(matches!(
            least_squares(&spec, &xs, &ys),
            Err(Error::FitRejected(_))
        ));
    }

    #[test]
    fn asymptotic_basis_on_synthetic_expansion() {
        // y = q₀ x lnx + π₀ x + q₂ lnx + π₂ + π₃/√x
        let (q0, p0, q2, p2, p3) = (-0.5, 0.3, 1.0 / 6.0, -0.231, 0.04);
        let xs: Vec<f64> = (0..40).map(|i| 10.0 * (1.122f64).powi(i)).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| q0 * x * x.ln() + p0 * x + q2 * x.ln() + p2 + p3 / x.sqrt())
            .collect();
        let spec = FitSpec::new(vec![
            BasisFn::XLnX,
            BasisFn::X,
            BasisFn::LnX,
            BasisFn::One,
            BasisFn::InvSqrtX,
        ]);
        let fit = least_squares(&spec, &xs, &ys).unwrap();
        assert!((fit.coeffs[0] - q0).abs() < 1e-10);
        assert!((fit.coeffs[2] - q2).abs() < 1e-9);
        assert!((fit.coeffs[3] - p2).abs() < 1e-8);
    }
}
