//! Metric and bundle jets at a point of the cutting surface, in boundary
//! normal coordinates, together with the curvature invariants consumed by
//! the coefficient formulas.
//!
//! A [`MetricJet`] holds exactly the germ data the symbol recursion needs at
//! a point `p` of the 2-dimensional surface `N ⊂ M` (`dim M = 3`): the
//! intrinsic scalar curvature `τ_N(p)`, the first and second normal
//! derivatives of the induced metric, the connection form and its first
//! tangential derivatives, and the bundle endomorphism `E`.
//!
//! The surface being 2-dimensional, `τ_N` determines the full intrinsic
//! curvature tensor (`R_1221 = τ_N/2`), so no redundant curvature table is
//! accepted as input. Jets that the displayed orders never consume — mixed
//! normal/tangential metric jets and normal derivatives of the tangential
//! connection components — cancel from every reported quantity and are fixed
//! to zero internally.

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SYM_TOL: f64 = 1e-12;

/// Germ-of-metric and bundle data at a point `p` of the cutting surface.
#[derive(Clone, Debug)]
pub struct MetricJet {
    /// Fiber rank of the bundle.
    pub rank_r0: usize,
    /// Intrinsic scalar curvature `τ_N(p)` of the surface.
    pub tau_n: f64,
    /// `g_{αβ,m}(p)`, first normal derivative of the induced metric.
    pub g_n1: Matrix2<f64>,
    /// `g_{αβ,mm}(p)`, second normal derivative.
    pub g_n2: Matrix2<f64>,
    /// Connection form components `ω₁, ω₂, ω_m` at `p`.
    pub omega: [DMatrix<f64>; 3],
    /// Tangential derivatives `∂_{x_α} ω_β(p)`, indexed `[α][β]`.
    pub omega_d: [[DMatrix<f64>; 2]; 2],
    /// `∂_{x_m} ω_m(p)`. Accepted for completeness; it drops out of the
    /// Riccati equations and is never consumed.
    pub omega_dmm: DMatrix<f64>,
    /// Bundle endomorphism `E(p)`.
    pub endo_e: DMatrix<f64>,
}

impl MetricJet {
    /// Product-metric jet (all normal jets zero, `ω = 0`, `E = 0`) over a
    /// surface of scalar curvature `tau_n`.
    pub fn product(tau_n: f64, rank_r0: usize) -> Self {
        let z = DMatrix::zeros(rank_r0, rank_r0);
        MetricJet {
            rank_r0,
            tau_n,
            g_n1: Matrix2::zeros(),
            g_n2: Matrix2::zeros(),
            omega: [z.clone(), z.clone(), z.clone()],
            omega_d: [[z.clone(), z.clone()], [z.clone(), z.clone()]],
            omega_dmm: z.clone(),
            endo_e: z,
        }
    }

    /// Flat jet: product metric over a flat surface.
    pub fn flat(rank_r0: usize) -> Self {
        Self::product(0.0, rank_r0)
    }

    /// Jet of the warped metric `g = f(x_m)² h ⊕ dx_m²` at a point where
    /// `f = 1`, with `fp = f'`, `fpp = f''` and `τ_h` the scalar curvature
    /// of `(N, h)` there. Line bundle unless `rank_r0 > 1`; `E = 0`, `ω = 0`.
    ///
    /// `g_{αβ,m} = 2 f' δ_{αβ}` and `g_{αβ,mm} = 2 (f'' + f'²) δ_{αβ}`, so
    /// the principal curvatures are `κ₁ = κ₂ = -f'`.
    pub fn warped(fp: f64, fpp: f64, tau_h: f64, rank_r0: usize) -> Self {
        let mut jet = Self::product(tau_h, rank_r0);
        jet.g_n1 = Matrix2::identity() * (2.0 * fp);
        jet.g_n2 = Matrix2::identity() * (2.0 * (fpp + fp * fp));
        jet
    }

    pub fn with_endo(mut self, e: DMatrix<f64>) -> Self {
        self.endo_e = e;
        self
    }

    /// Validate shapes, symmetry and finiteness.
    pub fn validate(&self) -> Result<()> {
        if self.rank_r0 < 1 {
            return Err(Error::InvalidJet("rank_r0 must be >= 1".into()));
        }
        let r = self.rank_r0;
        for (name, m) in [("g_n1", &self.g_n1), ("g_n2", &self.g_n2)] {
            let scale = m.amax().max(1.0);
            if (m[(0, 1)] - m[(1, 0)]).abs() > SYM_TOL * scale {
                return Err(Error::InvalidJet(format!("{name} is not symmetric")));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidJet(format!("{name} has non-finite entries")));
            }
        }
        let mut mats: Vec<(&str, &DMatrix<f64>)> = vec![
            ("omega.o1", &self.omega[0]),
            ("omega.o2", &self.omega[1]),
            ("omega.om", &self.omega[2]),
            ("omega_d.dmm", &self.omega_dmm),
            ("endo_E", &self.endo_e),
        ];
        for (a, row) in self.omega_d.iter().enumerate() {
            for (b, m) in row.iter().enumerate() {
                mats.push((["d11", "d12", "d21", "d22"][2 * a + b], m));
                let _ = (a, b);
            }
        }
        for (name, m) in mats {
            if m.nrows() != r || m.ncols() != r {
                return Err(Error::InvalidJet(format!(
                    "{name} must be {r}x{r}, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidJet(format!("{name} has non-finite entries")));
            }
        }
        if !self.tau_n.is_finite() {
            return Err(Error::InvalidJet("tau_N must be finite".into()));
        }
        Ok(())
    }

    /// Re-express all jets in the rotated tangential frame `x = U x'`
    /// (`U` orthogonal). Two-tensors conjugate, covector-indexed data
    /// contracts with `U`.
    pub fn rotate_frame(&self, u: &Matrix2<f64>) -> Self {
        let g_n1 = u.transpose() * self.g_n1 * u;
        let g_n2 = u.transpose() * self.g_n2 * u;
        let om = |a: usize| -> DMatrix<f64> {
            // ω'_α = Σ_γ U_{γα} ω_γ
            &self.omega[0] * u[(0, a)] + &self.omega[1] * u[(1, a)]
        };
        let omega = [om(0), om(1), self.omega[2].clone()];
        let mut omega_d = [
            [
                DMatrix::zeros(self.rank_r0, self.rank_r0),
                DMatrix::zeros(self.rank_r0, self.rank_r0),
            ],
            [
                DMatrix::zeros(self.rank_r0, self.rank_r0),
                DMatrix::zeros(self.rank_r0, self.rank_r0),
            ],
        ];
        #[allow(clippy::needless_range_loop)]
        for a in 0..2 {
            for b in 0..2 {
                let mut acc = DMatrix::zeros(self.rank_r0, self.rank_r0);
                for g in 0..2 {
                    for d in 0..2 {
                        acc += &self.omega_d[g][d] * (u[(g, a)] * u[(d, b)]);
                    }
                }
                omega_d[a][b] = acc;
            }
        }
        MetricJet {
            rank_r0: self.rank_r0,
            tau_n: self.tau_n,
            g_n1,
            g_n2,
            omega,
            omega_d,
            omega_dmm: self.omega_dmm.clone(),
            endo_e: self.endo_e.clone(),
        }
    }
}

/// Eigenvalues of `-½ g_n1` in descending order together with the rotation
/// that diagonalizes `g_n1`; downstream jets are re-expressed in that frame.
pub fn principal_curvatures(jet: &MetricJet) -> (f64, f64, Matrix2<f64>) {
    let s = -0.5 * jet.g_n1;
    let (a, b, c) = (s[(0, 0)], s[(1, 1)], s[(0, 1)]);
    if c == 0.0 {
        if a >= b {
            return (a, b, Matrix2::identity());
        }
        // Swap axes with a rotation (det +1).
        return (b, a, Matrix2::new(0.0, -1.0, 1.0, 0.0));
    }
    let theta = 0.5 * (2.0 * c).atan2(a - b);
    let (sin, cos) = theta.sin_cos();
    let u = Matrix2::new(cos, -sin, sin, cos);
    let d = u.transpose() * s * u;
    let (k1, k2) = (d[(0, 0)], d[(1, 1)]);
    if k1 >= k2 {
        (k1, k2, u)
    } else {
        let swap = Matrix2::new(0.0, -1.0, 1.0, 0.0);
        (k2, k1, u * swap)
    }
}

/// `H₁ = (κ₁+κ₂)/2`, `H₂ = κ₁κ₂` (surface dimension 2).
pub fn mean_curvatures(k1: f64, k2: f64) -> (f64, f64) {
    (0.5 * (k1 + k2), k1 * k2)
}

/// Tangential second-order metric jets generated by `τ_N` alone.
///
/// In 2 dimensions `R_{αβγδ} = (τ_N/2)(δ_{αδ}δ_{βγ} - δ_{αγ}δ_{βδ})` and
/// `R_{αβ} = (τ_N/2) δ_{αβ}`, giving
/// `g^{αβ,γδ}(p) = -⅓(R_{αγβδ} + R_{αδβγ})` and
/// `∂_α∂_β ln|g|(p) = -⅔ R_{αβ}(p)`; all first tangential derivatives vanish.
#[derive(Clone, Copy, Debug)]
pub struct TangentialJets {
    pub tau_n: f64,
}

impl TangentialJets {
    pub fn riemann(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let kd = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
        0.5 * self.tau_n * (kd(a, d) * kd(b, c) - kd(a, c) * kd(b, d))
    }

    /// `g^{αβ,γδ}(p)`.
    pub fn ginv_dd(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        -(self.riemann(a, c, b, d) + self.riemann(a, d, b, c)) / 3.0
    }

    /// `∂_{x_γ}∂_{x_δ} ln|g|(p)`.
    pub fn dd_ln_g(&self, c: usize, d: usize) -> f64 {
        let ricci = if c == d { 0.5 * self.tau_n } else { 0.0 };
        -2.0 / 3.0 * ricci
    }
}

pub fn tangential_jets(tau_n: f64) -> TangentialJets {
    TangentialJets { tau_n }
}

/// Every curvature invariant the coefficient formulas consume, derived from
/// a jet (rotated internally to the frame diagonalizing `g_n1`).
#[derive(Clone, Debug)]
pub struct CurvatureInvariants {
    pub kappa: (f64, f64),
    pub h1: f64,
    pub h2: f64,
    /// Ambient scalar curvature `τ_M(p)`.
    pub tau_m: f64,
    pub tau_n: f64,
    /// `Σ_α g_{αα,mm}(p)`.
    pub tr_g_n2: f64,
    /// `Σ_α g^{αα,mm}(p) = 8Σκ² - Σ g_{αα,mm}`.
    pub tr_ginv_n2: f64,
    pub tangential: TangentialJets,
    pub rank_r0: usize,
    pub tr_e: f64,
    /// `Σ_α Tr ∂_α ω_α(p)` and `Σ_α Tr ω_α ω_α(p)` (reported for audits;
    /// they cancel from every density).
    pub tr_domega: f64,
    pub tr_omega_sq: f64,
}

impl CurvatureInvariants {
    pub fn from_jet(jet: &MetricJet) -> Result<Self> {
        jet.validate()?;
        let (k1, k2, u) = principal_curvatures(jet);
        let rj = jet.rotate_frame(&u);
        let (h1, h2) = mean_curvatures(k1, k2);
        let tr_g_n2 = rj.g_n2.trace();
        let ksq = k1 * k1 + k2 * k2;
        let tr_ginv_n2 = 8.0 * ksq - tr_g_n2;
        // τ_M = τ_N + 8H₁² - 6H₂ - Σ g_{αα,mm}.
        let tau_m = jet.tau_n + 8.0 * h1 * h1 - 6.0 * h2 - tr_g_n2;
        let tr_e = jet.endo_e.trace();
        let tr_domega = rj.omega_d[0][0].trace() + rj.omega_d[1][1].trace();
        let tr_omega_sq =
            (&rj.omega[0] * &rj.omega[0]).trace() + (&rj.omega[1] * &rj.omega[1]).trace();
        Ok(CurvatureInvariants {
            kappa: (k1, k2),
            h1,
            h2,
            tau_m,
            tau_n: jet.tau_n,
            tr_g_n2,
            tr_ginv_n2,
            tangential: tangential_jets(jet.tau_n),
            rank_r0: jet.rank_r0,
            tr_e,
            tr_domega,
            tr_omega_sq,
        })
    }
}

/// Ambient scalar curvature and `Σ g^{αα,mm}` from a jet.
pub fn ambient_scalar_curvature(jet: &MetricJet) -> Result<(f64, f64)> {
    let inv = CurvatureInvariants::from_jet(jet)?;
    Ok((inv.tau_m, inv.tr_ginv_n2))
}

/// `Σ_α R_{α3α3}(p)` computed two ways: through the Christoffel jets
/// (`½Σg_{αα,mm} - 4H₁² + 2H₂`) and through the closed form
/// (`-½(τ_M - τ_N) - H₂`). A mismatch beyond tolerance signals inconsistent
/// jet data.
pub fn riemann_normal_trace(jet: &MetricJet) -> Result<f64> {
    let inv = CurvatureInvariants::from_jet(jet)?;
    let via_christoffel = 0.5 * inv.tr_g_n2 - 4.0 * inv.h1 * inv.h1 + 2.0 * inv.h2;
    let closed = -0.5 * (inv.tau_m - inv.tau_n) - inv.h2;
    let scale = via_christoffel.abs().max(closed.abs()).max(1.0);
    if (via_christoffel - closed).abs() > 1e-12 * scale {
        return Err(Error::InvalidJet(format!(
            "R_a3a3 routes disagree: {via_christoffel} vs {closed}"
        )));
    }
    Ok(closed)
}

/// Heat-trace difference densities `c₀..c₃` of the cut:
/// `c₀ = c₂ = 0`, `c₁ = r₀/8π`, and
/// `c₃ = r₀(τ_M/64π + τ_N/192π - H₁²/64π + H₂/64π) + Tr E/8π`.
pub fn c_densities(jet: &MetricJet) -> Result<[f64; 4]> {
    let inv = CurvatureInvariants::from_jet(jet)?;
    Ok(c_densities_from(&inv))
}

pub fn c_densities_from(inv: &CurvatureInvariants) -> [f64; 4] {
    use std::f64::consts::PI;
    let r0 = inv.rank_r0 as f64;
    let c1 = r0 / (8.0 * PI);
    let c3 = r0
        * (inv.tau_m / (64.0 * PI) + inv.tau_n / (192.0 * PI) - inv.h1 * inv.h1 / (64.0 * PI)
            + inv.h2 / (64.0 * PI))
        + inv.tr_e / (8.0 * PI);
    [0.0, c1, 0.0, c3]
}

/// Serde-facing jet document; matrices row-major.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JetInput {
    pub rank_r0: usize,
    #[serde(rename = "tau_N")]
    pub tau_n: f64,
    pub g_n1: Vec<Vec<f64>>,
    pub g_n2: Vec<Vec<f64>>,
    pub omega: OmegaInput,
    pub omega_d: OmegaDInput,
    #[serde(rename = "endo_E")]
    pub endo_e: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaInput {
    pub o1: Vec<Vec<f64>>,
    pub o2: Vec<Vec<f64>>,
    pub om: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaDInput {
    pub d11: Vec<Vec<f64>>,
    pub d12: Vec<Vec<f64>>,
    pub d21: Vec<Vec<f64>>,
    pub d22: Vec<Vec<f64>>,
    pub dmm: Vec<Vec<f64>>,
}

fn to_matrix2(name: &str, rows: &[Vec<f64>]) -> Result<Matrix2<f64>> {
    if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
        return Err(Error::InvalidJet(format!("{name} must be 2x2")));
    }
    Ok(Matrix2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1]))
}

fn to_dmatrix(name: &str, r: usize, rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    if rows.len() != r || rows.iter().any(|row| row.len() != r) {
        return Err(Error::InvalidJet(format!("{name} must be {r}x{r}")));
    }
    Ok(DMatrix::from_fn(r, r, |i, j| rows[i][j]))
}

impl TryFrom<JetInput> for MetricJet {
    type Error = Error;

    fn try_from(input: JetInput) -> Result<Self> {
        let r = input.rank_r0;
        let jet = MetricJet {
            rank_r0: r,
            tau_n: input.tau_n,
            g_n1: to_matrix2("g_n1", &input.g_n1)?,
            g_n2: to_matrix2("g_n2", &input.g_n2)?,
            omega: [
                to_dmatrix("omega.o1", r, &input.omega.o1)?,
                to_dmatrix("omega.o2", r, &input.omega.o2)?,
                to_dmatrix("omega.om", r, &input.omega.om)?,
            ],
            omega_d: [
                [
                    to_dmatrix("omega_d.d11", r, &input.omega_d.d11)?,
                    to_dmatrix("omega_d.d12", r, &input.omega_d.d12)?,
                ],
                [
                    to_dmatrix("omega_d.d21", r, &input.omega_d.d21)?,
                    to_dmatrix("omega_d.d22", r, &input.omega_d.d22)?,
                ],
            ],
            omega_dmm: to_dmatrix("omega_d.dmm", r, &input.omega_d.dmm)?,
            endo_e: to_dmatrix("endo_E", r, &input.endo_e)?,
        };
        jet.validate()?;
        Ok(jet)
    }
}

pub fn jet_from_json(text: &str) -> Result<MetricJet> {
    let input: JetInput = serde_json::from_str(text)
        .map_err(|e| Error::Config(format!("jet document: {e}")))?;
    MetricJet::try_from(input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn principal_curvatures_flat() {
        let jet = MetricJet::flat(1);
        let (k1, k2, u) = principal_curvatures(&jet);
        assert_eq!((k1, k2), (0.0, 0.0));
        assert_eq!(u, Matrix2::identity());
    }

    #[test]
    fn principal_curvatures_umbilic() {
        // g_n1 = diag(-2κ, -2κ) -> (κ, κ, identity)
        let k = 0.7;
        let mut jet = MetricJet::flat(1);
        jet.g_n1 = Matrix2::identity() * (-2.0 * k);
        let (k1, k2, u) = principal_curvatures(&jet);
        assert!((k1 - k).abs() < 1e-15 && (k2 - k).abs() < 1e-15);
        assert_eq!(u, Matrix2::identity());
    }

    #[test]
    fn principal_curvatures_45_degrees() {
        let mut jet = MetricJet::flat(1);
        jet.g_n1 = Matrix2::new(0.0, -2.0, -2.0, 0.0);
        let (k1, k2, u) = principal_curvatures(&jet);
        assert!((k1 - 1.0).abs() < 1e-14);
        assert!((k2 + 1.0).abs() < 1e-14);
        // Frame diagonalizes g_n1 and is a 45-degree rotation.
        let d = u.transpose() * jet.g_n1 * u;
        assert!(d[(0, 1)].abs() < 1e-14);
        assert!((u[(0, 0)].abs() - (0.5f64).sqrt()).abs() < 1e-14);
        // Orthogonality.
        assert!(((u.transpose() * u) - Matrix2::identity()).amax() < 1e-14);
    }

    #[test]
    fn mean_curvature_examples() {
        assert_eq!(mean_curvatures(0.0, 0.0), (0.0, 0.0));
        let k = 1.3;
        assert_eq!(mean_curvatures(k, k), (k, k * k));
        assert_eq!(mean_curvatures(1.0, -1.0), (0.0, -1.0));
    }

    #[test]
    fn ambient_curvature_examples() {
        let (tm, _) = ambient_scalar_curvature(&MetricJet::flat(1)).unwrap();
        assert_eq!(tm, 0.0);
        // Product over a round sphere: τ_M = τ_N.
        let a = 1.3;
        let jet = MetricJet::product(2.0 / (a * a), 1);
        let (tm, tr) = ambient_scalar_curvature(&jet).unwrap();
        assert!((tm - 2.0 / (a * a)).abs() < 1e-15);
        assert_eq!(tr, 0.0);
        // Warped: τ_M - τ_N = -4 f'' - 2 f'².
        let (s, w) = (0.31, -0.12);
        let jet = MetricJet::warped(s, w, 0.4, 1);
        let (tm, _) = ambient_scalar_curvature(&jet).unwrap();
        assert!((tm - 0.4 - (-4.0 * w - 2.0 * s * s)).abs() < 1e-13);
    }

    #[test]
    fn warped_jet_curvatures() {
        let s = 0.42;
        let jet = MetricJet::warped(s, 0.1, 0.0, 1);
        let (k1, k2, _) = principal_curvatures(&jet);
        assert!((k1 + s).abs() < 1e-15 && (k2 + s).abs() < 1e-15);
        // fp = fpp = 0 is the product jet.
        let p = MetricJet::warped(0.0, 0.0, 1.5, 2);
        assert_eq!(p.g_n1, Matrix2::zeros());
        assert_eq!(p.g_n2, Matrix2::zeros());
        assert_eq!(p.tau_n, 1.5);
    }

    #[test]
    fn tangential_jet_tables() {
        let t = tangential_jets(0.0);
        assert_eq!(t.ginv_dd(0, 0, 1, 1), 0.0);
        assert_eq!(t.dd_ln_g(0, 0), 0.0);
        let t = tangential_jets(2.0);
        // g^{11,22} = ⅔ R_{1221} = τ_N/3
        assert!((t.ginv_dd(0, 0, 1, 1) - 2.0 / 3.0).abs() < 1e-15);
        // g^{12,12} = -⅓ R_{1221} = -τ_N/6
        assert!((t.ginv_dd(0, 1, 0, 1) + 1.0 / 3.0).abs() < 1e-15);
        // ∂₁∂₁ ln|g| = -⅔ R_{11} = -τ_N/3
        assert!((t.dd_ln_g(0, 0) + 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(t.dd_ln_g(0, 1), 0.0);
    }

    #[test]
    fn c_density_examples() {
        let c = c_densities(&MetricJet::flat(1)).unwrap();
        assert_eq!(c[0], 0.0);
        assert!((c[1] - 1.0 / (8.0 * PI)).abs() < 1e-18);
        assert_eq!(c[2], 0.0);
        assert_eq!(c[3], 0.0);
        // Product over the unit sphere: c₃ = 2/(64π) + 2/(192π) = 1/(24π).
        let c = c_densities(&MetricJet::product(2.0, 1)).unwrap();
        assert!((c[3] - 1.0 / (24.0 * PI)).abs() < 1e-16);
        // Flat jet with E = c·Id: c₃ = c/(8π).
        let e = 0.9;
        let jet = MetricJet::flat(1).with_endo(DMatrix::from_element(1, 1, e));
        let c = c_densities(&jet).unwrap();
        assert!((c[3] - e / (8.0 * PI)).abs() < 1e-16);
    }

    #[test]
    fn riemann_normal_trace_examples() {
        assert_eq!(riemann_normal_trace(&MetricJet::flat(1)).unwrap(), 0.0);
        assert_eq!(riemann_normal_trace(&MetricJet::product(2.0, 1)).unwrap(), 0.0);
        let (s, w) = (0.25, 0.5);
        let jet = MetricJet::warped(s, w, 0.0, 1);
        // Christoffel route by hand: ½·tr(g_n2) - 4H₁² + 2H₂ with
        // tr(g_n2) = 4(w+s²), H₁² = H₂ = s²: 2w + 2s² - 4s² + 2s² = 2w.
        let v = riemann_normal_trace(&jet).unwrap();
        assert!((v - 2.0 * w).abs() < 1e-14);
    }

    #[test]
    fn json_roundtrip_and_schema() {
        let text = r#"{
            "rank_r0": 2, "tau_N": 1.0,
            "g_n1": [[0.0, 0.1], [0.1, -0.2]],
            "g_n2": [[0.3, 0.0], [0.0, 0.3]],
            "omega": {"o1": [[0,1],[0,0]], "o2": [[0,0],[1,0]], "om": [[0,0],[0,0]]},
            "omega_d": {"d11": [[0,0],[0,0]], "d12": [[0,0],[0,0]],
                        "d21": [[0,0],[0,0]], "d22": [[0,0],[0,0]], "dmm": [[0,0],[0,0]]},
            "endo_E": [[1,0],[0,1]]
        }"#;
        let jet = jet_from_json(text).unwrap();
        assert_eq!(jet.rank_r0, 2);
        assert!(jet_from_json("{\"rank_r0\": 1}").is_err());
        assert!(jet_from_json(&text.replace("\"tau_N\"", "\"tau_n_typo\"")).is_err());
        // Asymmetric g_n1 rejected.
        let bad = text.replace("[[0.0, 0.1], [0.1, -0.2]]", "[[0.0, 0.1], [0.3, -0.2]]");
        assert!(jet_from_json(&bad).is_err());
    }

    #[test]
    fn frame_rotation_invariance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let mut jet = MetricJet::product(rng.gen_range(-2.0..2.0), 2);
            let (a, b, c) = (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            jet.g_n1 = Matrix2::new(a, c, c, b);
            let (d, e, f) = (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            jet.g_n2 = Matrix2::new(d, f, f, e);
            jet.endo_e = DMatrix::from_fn(2, 2, |_, _| rng.gen_range(-1.0..1.0));
            let inv = CurvatureInvariants::from_jet(&jet).unwrap();
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let u = Matrix2::new(theta.cos(), -theta.sin(), theta.sin(), theta.cos());
            let rot = jet.rotate_frame(&u);
            let inv2 = CurvatureInvariants::from_jet(&rot).unwrap();
            assert!((inv.tau_m - inv2.tau_m).abs() < 1e-12 * inv.tau_m.abs().max(1.0));
            assert!((inv.h1 - inv2.h1).abs() < 1e-12);
            assert!((inv.h2 - inv2.h2).abs() < 1e-12);
            let c3 = c_densities_from(&inv)[3];
            let c3r = c_densities_from(&inv2)[3];
            assert!((c3 - c3r).abs() < 1e-12 * c3.abs().max(1.0));
            // Lemma-type identity: Σg^{αα,mm} + Σg_{αα,mm} = 8(κ₁²+κ₂²).
            let ksq = inv.kappa.0 * inv.kappa.0 + inv.kappa.1 * inv.kappa.1;
            assert!((inv.tr_ginv_n2 + inv.tr_g_n2 - 8.0 * ksq).abs() < 1e-12);
        }
    }
}
