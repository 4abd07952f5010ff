//! Per-jet symbol context: the Taylor tables of `g^{αβ}`, `ln|g|`, the
//! normal-derivative coefficient `A`, the connection form and the operator
//! symbol layers `p₂, p₁, p₀`, all in the frame that diagonalizes `g_{αβ,m}`.
//!
//! Jets provide order-2 Taylor data for the metric tables and order-1 data
//! for the connection form; every deeper coefficient that the displayed
//! symbol orders never consume (mixed normal/tangential metric jets, normal
//! derivatives of tangential connection components) cancels from the summed
//! symbols and is fixed to zero here.

use num_complex::Complex64;

use super::expr::{SymbolExpr, SymbolTerm, Variant};
use super::taylor::{CMat, TaylorMat};
use crate::error::Result;
use crate::geometry::{principal_curvatures, tangential_jets, MetricJet};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

const MI: Complex64 = Complex64::new(0.0, -1.0); // -i

fn cmat(m: &nalgebra::DMatrix<f64>) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| c(m[(i, j)]))
}

pub struct SymbolCtx {
    pub variant: Variant,
    pub dim: usize,
    /// λ used by the λ-as-constant grading (enters `p₀` there); the weight-2
    /// grading never consumes it.
    pub lambda: f64,
    ginv: [[TaylorMat; 2]; 2],
    dginv: Vec<TaylorMat>, // [j][alpha][beta] flattened, j in {0,1,m}
    a_taylor: TaylorMat,
    omega: [TaylorMat; 3],
    p1_coeff: [TaylorMat; 2],
    p0_mat: TaylorMat,
    /// Principal curvatures and the frame rotation used (kept for reports).
    pub kappa: (f64, f64),
}

impl SymbolCtx {
    pub fn new(jet: &MetricJet, variant: Variant, lambda: f64) -> Result<Self> {
        jet.validate()?;
        let (k1, k2, u) = principal_curvatures(jet);
        let jet = jet.rotate_frame(&u);
        let r = jet.rank_r0;
        let tang = tangential_jets(jet.tau_n);
        let id = CMat::identity(r, r);

        // g^{αβ}(x, x_m) to second order around p.
        let mut ginv: [[TaylorMat; 2]; 2] = Default::default();
        let g1 = &jet.g_n1;
        let g1sq = jet.g_n1 * jet.g_n1;
        for a in 0..2 {
            for b in 0..2 {
                let mut t = TaylorMat::zero(r).with_order(2);
                if a == b {
                    t.set([0, 0, 0], id.clone());
                }
                // g^{αβ,m}(p) = -g_{αβ,m}(p)
                t.set([0, 0, 1], &id * c(-g1[(a, b)]));
                // g^{αβ,mm}(p) = 2 (g_n1²)_{αβ} - g_{αβ,mm}(p)
                t.set([0, 0, 2], &id * c(0.5 * (2.0 * g1sq[(a, b)] - jet.g_n2[(a, b)])));
                // tangential quadratic part from τ_N
                t.set([2, 0, 0], &id * c(0.5 * tang.ginv_dd(a, b, 0, 0)));
                t.set([0, 2, 0], &id * c(0.5 * tang.ginv_dd(a, b, 1, 1)));
                t.set([1, 1, 0], &id * c(tang.ginv_dd(a, b, 0, 1)));
                ginv[a][b] = t;
            }
        }

        // g_{αβ}(x, x_m), only needed to build A.
        let mut gdown: [[TaylorMat; 2]; 2] = Default::default();
        for a in 0..2 {
            for b in 0..2 {
                let mut t = TaylorMat::zero(r).with_order(2);
                if a == b {
                    t.set([0, 0, 0], id.clone());
                }
                t.set([0, 0, 1], &id * c(g1[(a, b)]));
                t.set([0, 0, 2], &id * c(0.5 * jet.g_n2[(a, b)]));
                t.set([2, 0, 0], &id * c(-0.5 * tang.ginv_dd(a, b, 0, 0)));
                t.set([0, 2, 0], &id * c(-0.5 * tang.ginv_dd(a, b, 1, 1)));
                t.set([1, 1, 0], &id * c(-tang.ginv_dd(a, b, 0, 1)));
                gdown[a][b] = t;
            }
        }

        // ln|g|(x, x_m).
        let mut lng = TaylorMat::zero(r).with_order(2);
        let tr_n1 = jet.g_n1.trace();
        let tr_n1sq = g1sq.trace();
        lng.set([0, 0, 1], &id * c(tr_n1));
        lng.set([0, 0, 2], &id * c(0.5 * (jet.g_n2.trace() - tr_n1sq)));
        lng.set([2, 0, 0], &id * c(0.5 * tang.dd_ln_g(0, 0)));
        lng.set([0, 2, 0], &id * c(0.5 * tang.dd_ln_g(1, 1)));

        // A(x, x_m) = -½ Σ g^{αβ} g_{αβ,m}.
        let mut a_taylor = TaylorMat::zero(r);
        for a in 0..2 {
            for b in 0..2 {
                a_taylor = a_taylor.add(&ginv[a][b].mul(&gdown[a][b].derivative(2)?));
            }
        }
        let a_taylor = a_taylor.scale(c(-0.5));

        // Connection form: tangential components to first order, ω_m with
        // its normal derivative.
        let mut omega: [TaylorMat; 3] = Default::default();
        for b in 0..2 {
            let mut t = TaylorMat::zero(r).with_order(1);
            t.set([0, 0, 0], cmat(&jet.omega[b]));
            for g in 0..2 {
                let mut mono = [0u8; 3];
                mono[g] = 1;
                t.set(mono, cmat(&jet.omega_d[g][b]));
            }
            omega[b] = t;
        }
        let mut om = TaylorMat::zero(r).with_order(1);
        om.set([0, 0, 0], cmat(&jet.omega[2]));
        om.set([0, 0, 1], cmat(&jet.omega_dmm));
        omega[2] = om;

        let mut dginv = Vec::with_capacity(12);
        for j in 0..3 {
            for a in 0..2 {
                for b in 0..2 {
                    dginv.push(ginv[a][b].derivative(j)?);
                }
            }
        }

        // p₁ coefficient of ξ_β:
        //   -i [ ½ Σ_α g^{αβ} ∂_α ln|g| + Σ_α ∂_α g^{αβ} ] - 2i Σ_α g^{αβ} ω_α.
        let mut p1_coeff: [TaylorMat; 2] = Default::default();
        for b in 0..2 {
            let mut metric = TaylorMat::zero(r);
            for a in 0..2 {
                metric = metric.add(&ginv[a][b].mul(&lng.derivative(a)?).scale(c(0.5)));
                metric = metric.add(&dginv[a * 2 + b].clone());
            }
            let mut conn = TaylorMat::zero(r);
            for a in 0..2 {
                conn = conn.add(&ginv[a][b].mul(&omega[a]));
            }
            p1_coeff[b] = metric.scale(MI).add(&conn.scale(MI * 2.0));
        }

        // p₀ at the base point (tangential Christoffels vanish there; the
        // jets carry no deeper connection data, so the budget is order 0):
        //   -Σ_α (∂_α ω_α + ω_α ω_α) - E  [+ λ·Id in the λ-constant grading]
        let mut p0 = CMat::zeros(r, r);
        for a in 0..2 {
            p0 -= cmat(&jet.omega_d[a][a]);
            let w = cmat(&jet.omega[a]);
            p0 -= &w * &w;
        }
        p0 -= cmat(&jet.endo_e);
        if variant == Variant::LambdaConst {
            p0 += CMat::identity(r, r) * c(lambda);
        }
        let p0_mat = TaylorMat::constant(p0).with_order(0);

        Ok(SymbolCtx {
            variant,
            dim: r,
            lambda,
            ginv,
            dginv,
            a_taylor,
            omega,
            p1_coeff,
            p0_mat,
            kappa: (k1, k2),
        })
    }

    pub fn ginv(&self, a: usize, b: usize) -> &TaylorMat {
        &self.ginv[a][b]
    }

    /// `∂_{x_j} g^{αβ}` table (`j = 2` is the normal direction).
    pub fn dginv(&self, j: usize, a: usize, b: usize) -> Result<TaylorMat> {
        Ok(self.dginv[j * 4 + a * 2 + b].clone())
    }

    /// The first-order normal-derivative coefficient `A(x, x_m)` as a symbol.
    pub fn a_symbol(&self) -> SymbolExpr {
        SymbolExpr::from_term(
            self.variant,
            self.dim,
            SymbolTerm {
                coeff: self.a_taylor.clone(),
                xi_pow: [0, 0],
                q_half: 0,
                res_pow: 0,
            },
        )
    }

    pub fn omega_m_symbol(&self) -> SymbolExpr {
        SymbolExpr::from_term(
            self.variant,
            self.dim,
            SymbolTerm {
                coeff: self.omega[2].clone(),
                xi_pow: [0, 0],
                q_half: 0,
                res_pow: 0,
            },
        )
    }

    /// `p₂ = Q · Id` (the grading decides what `Q` contains).
    pub fn p2_symbol(&self) -> SymbolExpr {
        SymbolExpr::q_power(self.variant, self.dim, 2)
    }

    pub fn p1_symbol(&self) -> SymbolExpr {
        let mut e = SymbolExpr::zero(self.variant, self.dim);
        for b in 0..2 {
            let mut xi = [0u32; 2];
            xi[b] = 1;
            e.terms.push(SymbolTerm {
                coeff: self.p1_coeff[b].clone(),
                xi_pow: xi,
                q_half: 0,
                res_pow: 0,
            });
        }
        e.normalize();
        e
    }

    pub fn p0_symbol(&self) -> SymbolExpr {
        SymbolExpr::from_term(
            self.variant,
            self.dim,
            SymbolTerm {
                coeff: self.p0_mat.clone(),
                xi_pow: [0, 0],
                q_half: 0,
                res_pow: 0,
            },
        )
    }
}
