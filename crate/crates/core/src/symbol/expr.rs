//! Canonical term algebra for parameter-dependent symbols.
//!
//! Every symbol handled by the recursion is a finite sum of terms
//!
//! ```text
//!     coeff(x) · ξ₁^a ξ₂^b · Q(x,ξ,λ)^{q/2} · (μ - 2√Q)^{-d}
//! ```
//!
//! where `coeff` is a matrix-valued Taylor polynomial around the base point,
//! `Q = Σ g^{αβ}(x) ξ_α ξ_β + λ` in the weight-2 grading and
//! `Q = Σ g^{αβ}(x) ξ_α ξ_β` when λ is an ordinary constant. Differentiation
//! in ξ and x and products map this basis to itself; the `g^{αβ}` Taylor
//! tables needed by the chain rule live in [`SymbolCtx`](super::context::SymbolCtx).

use num_complex::Complex64;
use serde_json::json;

use super::context::SymbolCtx;
use super::taylor::{CMat, TaylorMat};
use crate::error::{Error, Result};

/// Symbol grading: λ of weight 2 riding inside `Q`, or λ as an ordinary
/// constant sitting in the zero-order operator term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Weight2,
    LambdaConst,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Weight2 => "weight-2",
            Variant::LambdaConst => "lambda-constant",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SymbolTerm {
    pub coeff: TaylorMat,
    pub xi_pow: [u32; 2],
    /// Exponent of `Q` doubled: the term carries `Q^{q_half/2}`.
    pub q_half: i32,
    /// The term carries `(μ - 2√Q)^{-res_pow}` with `res_pow ≥ 0`.
    pub res_pow: u32,
}

impl SymbolTerm {
    /// Homogeneity in `(ξ, √λ, μ)` at the base point.
    pub fn homogeneity(&self) -> i32 {
        self.xi_pow[0] as i32 + self.xi_pow[1] as i32 + self.q_half - self.res_pow as i32
    }

    fn key(&self) -> ([u32; 2], i32, u32) {
        (self.xi_pow, self.q_half, self.res_pow)
    }
}

#[derive(Clone, Debug)]
pub struct SymbolExpr {
    pub variant: Variant,
    pub dim: usize,
    pub terms: Vec<SymbolTerm>,
}

impl SymbolExpr {
    pub fn zero(variant: Variant, dim: usize) -> Self {
        SymbolExpr {
            variant,
            dim,
            terms: vec![],
        }
    }

    pub fn from_term(variant: Variant, dim: usize, term: SymbolTerm) -> Self {
        let mut e = Self::zero(variant, dim);
        e.terms.push(term);
        e.normalize();
        e
    }

    /// Constant (in x and ξ) matrix term.
    pub fn constant(variant: Variant, m: CMat) -> Self {
        let dim = m.nrows();
        Self::from_term(
            variant,
            dim,
            SymbolTerm {
                coeff: TaylorMat::constant(m),
                xi_pow: [0, 0],
                q_half: 0,
                res_pow: 0,
            },
        )
    }

    /// `Q^{q_half/2}` with an identity coefficient; `q_half = 1` is `√Q`.
    pub fn q_power(variant: Variant, dim: usize, q_half: i32) -> Self {
        Self::from_term(
            variant,
            dim,
            SymbolTerm {
                coeff: TaylorMat::scalar(dim, Complex64::new(1.0, 0.0)),
                xi_pow: [0, 0],
                q_half,
                res_pow: 0,
            },
        )
    }

    /// `(μ - 2√Q)^{-1}` with an identity coefficient.
    pub fn resolvent_factor(variant: Variant, dim: usize) -> Self {
        Self::from_term(
            variant,
            dim,
            SymbolTerm {
                coeff: TaylorMat::scalar(dim, Complex64::new(1.0, 0.0)),
                xi_pow: [0, 0],
                q_half: 0,
                res_pow: 1,
            },
        )
    }

    fn check_variant(&self, other: &Self) -> Result<()> {
        if self.variant != other.variant {
            return Err(Error::VariantMismatch(
                self.variant.name(),
                other.variant.name(),
            ));
        }
        Ok(())
    }

    /// Merge terms sharing `(ξ-monomial, Q-power, resolvent power)`, drop
    /// exact zeros, and order deterministically.
    pub fn normalize(&mut self) {
        self.terms.sort_by_key(|t| t.key());
        let mut out: Vec<SymbolTerm> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            if let Some(last) = out.last_mut() {
                if last.key() == t.key() {
                    last.coeff = last.coeff.add(&t.coeff);
                    continue;
                }
            }
            out.push(t);
        }
        out.retain(|t| !t.coeff.is_zero());
        self.terms = out;
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_variant(other)?;
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out.normalize();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff = t.coeff.scale(c);
        }
        out.normalize();
        out
    }

    /// Left-multiply every term coefficient by a Taylor factor.
    pub fn premul_taylor(&self, f: &TaylorMat) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff = f.mul(&t.coeff);
        }
        out.normalize();
        out
    }

    /// Pointwise product of symbols (matrix order preserved: `self · other`).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_variant(other)?;
        let mut out = Self::zero(self.variant, self.dim);
        for a in &self.terms {
            for b in &other.terms {
                out.terms.push(SymbolTerm {
                    coeff: a.coeff.mul(&b.coeff),
                    xi_pow: [a.xi_pow[0] + b.xi_pow[0], a.xi_pow[1] + b.xi_pow[1]],
                    q_half: a.q_half + b.q_half,
                    res_pow: a.res_pow + b.res_pow,
                });
            }
        }
        out.normalize();
        Ok(out)
    }

    /// `∂_{ξ_γ}`: power rule on the ξ-monomial plus the chain rule through
    /// `Q` and `(μ-2√Q)^{-d}`, using `∂_{ξ_γ} Q = 2 Σ_β g^{γβ}(x) ξ_β`.
    pub fn dxi(&self, gamma: usize, ctx: &SymbolCtx) -> Result<Self> {
        let mut out = Self::zero(self.variant, self.dim);
        for t in &self.terms {
            if t.xi_pow[gamma] > 0 {
                let mut xi = t.xi_pow;
                xi[gamma] -= 1;
                out.terms.push(SymbolTerm {
                    coeff: t.coeff.scale(Complex64::new(t.xi_pow[gamma] as f64, 0.0)),
                    xi_pow: xi,
                    q_half: t.q_half,
                    res_pow: t.res_pow,
                });
            }
            for beta in 0..2 {
                let g = ctx.ginv(gamma, beta);
                if t.q_half != 0 {
                    // (q/2) Q^{q/2-1} · 2 g^{γβ} ξ_β
                    let mut xi = t.xi_pow;
                    xi[beta] += 1;
                    out.terms.push(SymbolTerm {
                        coeff: t
                            .coeff
                            .mul(g)
                            .scale(Complex64::new(t.q_half as f64, 0.0)),
                        xi_pow: xi,
                        q_half: t.q_half - 2,
                        res_pow: t.res_pow,
                    });
                }
                if t.res_pow > 0 {
                    // d (μ-2√Q)^{-d-1} Q^{-1/2} · 2 g^{γβ} ξ_β
                    let mut xi = t.xi_pow;
                    xi[beta] += 1;
                    out.terms.push(SymbolTerm {
                        coeff: t
                            .coeff
                            .mul(g)
                            .scale(Complex64::new(2.0 * t.res_pow as f64, 0.0)),
                        xi_pow: xi,
                        q_half: t.q_half - 1,
                        res_pow: t.res_pow + 1,
                    });
                }
            }
        }
        out.normalize();
        Ok(out)
    }

    /// Plain `∂_{x_j}` (`j = 0, 1` tangential, `j = 2` the normal
    /// direction), using `∂_{x_j} Q = Σ g^{αβ,j}(x) ξ_α ξ_β`.
    pub fn dx(&self, j: usize, ctx: &SymbolCtx) -> Result<Self> {
        let mut out = Self::zero(self.variant, self.dim);
        for t in &self.terms {
            if !t.coeff.is_zero() {
                let d = t.coeff.derivative(j)?;
                if !d.is_zero() {
                    out.terms.push(SymbolTerm {
                        coeff: d,
                        xi_pow: t.xi_pow,
                        q_half: t.q_half,
                        res_pow: t.res_pow,
                    });
                }
            }
            if t.q_half == 0 && t.res_pow == 0 {
                continue;
            }
            for alpha in 0..2 {
                for beta in 0..2 {
                    let dg = ctx.dginv(j, alpha, beta)?;
                    if dg.is_zero() {
                        continue;
                    }
                    let mut xi = t.xi_pow;
                    xi[alpha] += 1;
                    xi[beta] += 1;
                    if t.q_half != 0 {
                        out.terms.push(SymbolTerm {
                            coeff: t
                                .coeff
                                .mul(&dg)
                                .scale(Complex64::new(t.q_half as f64 / 2.0, 0.0)),
                            xi_pow: xi,
                            q_half: t.q_half - 2,
                            res_pow: t.res_pow,
                        });
                    }
                    if t.res_pow > 0 {
                        out.terms.push(SymbolTerm {
                            coeff: t
                                .coeff
                                .mul(&dg)
                                .scale(Complex64::new(t.res_pow as f64, 0.0)),
                            xi_pow: xi,
                            q_half: t.q_half - 1,
                            res_pow: t.res_pow + 1,
                        });
                    }
                }
            }
        }
        out.normalize();
        Ok(out)
    }

    /// Collapse every Taylor coefficient to its value at the base point.
    pub fn evaluate_at_p(&self) -> Self {
        let mut out = Self::zero(self.variant, self.dim);
        for t in &self.terms {
            out.terms.push(SymbolTerm {
                coeff: TaylorMat::constant(t.coeff.eval0()),
                xi_pow: t.xi_pow,
                q_half: t.q_half,
                res_pow: t.res_pow,
            });
        }
        out.normalize();
        out
    }

    /// Numeric value at the base point for concrete `(ξ, λ, μ)`.
    pub fn eval_num(&self, xi: [f64; 2], lambda: f64, mu: Complex64) -> CMat {
        let q0 = match self.variant {
            Variant::Weight2 => xi[0] * xi[0] + xi[1] * xi[1] + lambda,
            Variant::LambdaConst => xi[0] * xi[0] + xi[1] * xi[1],
        };
        let sqrt_q = q0.sqrt();
        let mut acc = CMat::zeros(self.dim, self.dim);
        for t in &self.terms {
            let mut f = Complex64::new(
                xi[0].powi(t.xi_pow[0] as i32) * xi[1].powi(t.xi_pow[1] as i32),
                0.0,
            );
            f *= Complex64::new(q0.powf(t.q_half as f64 / 2.0), 0.0);
            if t.res_pow > 0 {
                f *= (mu - Complex64::new(2.0 * sqrt_q, 0.0)).powi(-(t.res_pow as i32));
            }
            acc += t.coeff.eval0() * f;
        }
        acc
    }

    /// Common homogeneity degree of all terms, if they agree.
    pub fn homogeneity_degree(&self) -> Option<i32> {
        let mut deg = None;
        for t in &self.terms {
            let h = t.homogeneity();
            match deg {
                None => deg = Some(h),
                Some(d) if d != h => return None,
                _ => {}
            }
        }
        deg
    }

    /// Largest coefficient magnitude among terms of homogeneity `>= cutoff`.
    pub fn max_coeff_above(&self, cutoff: i32) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.homogeneity() >= cutoff)
            .map(|t| t.coeff.amax())
            .fold(0.0, f64::max)
    }

    /// Debug dump as JSON term lists (Taylor tables and exponents), for
    /// golden-file tests.
    pub fn dump_json(&self) -> serde_json::Value {
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|t| {
                let taylor: Vec<_> = t
                    .coeff
                    .iter()
                    .map(|(mono, m)| {
                        let entries: Vec<Vec<[f64; 2]>> = (0..m.nrows())
                            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                            .collect();
                        json!({ "mono": mono.to_vec(), "matrix": entries })
                    })
                    .collect();
                json!({
                    "taylor": taylor,
                    "xi_pow": t.xi_pow.to_vec(),
                    "q_half": t.q_half,
                    "res_pow": t.res_pow,
                })
            })
            .collect();
        json!({ "variant": self.variant.name(), "terms": terms })
    }
}
