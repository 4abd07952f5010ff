//! The coefficient densities: resolvent symbols pushed through the μ-contour
//! and ξ-plane integrals.
//!
//! Zeta pipeline (weight-2 grading, `λ/|λ| = 1` in the integrand): produces
//! `J_j(s, p)` as an exact [`SFunction`], from which `q_j(p) = ½ J_j(0)` and
//! `π_j(p) = -J_j'(0)`. The λ-dependence of `π_j`, `q_j` is restored by
//! homogeneity (`λ^{(2-j)/2}` against the reported values at `λ/|λ| = 1`).
//!
//! Heat pipeline (λ an ordinary constant): produces the densities `v_j(λ)(p)`
//! as exact rational multiples of `1/π`.
//!
//! Matrix traces are taken here, at integration time, not in the symbol
//! algebra.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::moments::{mu_contour_heat, mu_contour_zeta, xi_moment_heat, xi_moment_zeta};
use super::sfunction::{rat_from_f64, rat_int, DerivParts, SAtom, SFunction};
use crate::error::{Error, Result};
use crate::geometry::{c_densities_from, CurvatureInvariants, MetricJet};
use crate::symbol::{
    dtn_symbols, resolvent_symbols, DtnSymbols, ResolventSymbols, SymbolCtx, SymbolExpr, Variant,
};

use std::f64::consts::{LN_2, PI};

fn real_trace(m: &nalgebra::DMatrix<num_complex::Complex64>) -> Result<f64> {
    let tr = m.trace();
    if tr.im.abs() > 1e-10 * (1.0 + tr.re.abs()) {
        return Err(Error::ComplexTrace(tr.im));
    }
    Ok(tr.re)
}

/// μ-contour plus ξ-moments for one symbol already evaluated at the base
/// point, in the weight-2 grading with `λ/|λ| = 1`.
pub fn integrate_zeta(expr: &SymbolExpr) -> Result<SFunction> {
    let expr = expr.evaluate_at_p();
    let mut out = SFunction::zero();
    for t in &expr.terms {
        let (a, b) = (t.xi_pow[0], t.xi_pow[1]);
        if a % 2 == 1 || b % 2 == 1 {
            continue; // odd moments vanish
        }
        let tr = real_trace(&t.coeff.eval0())?;
        if tr == 0.0 {
            continue;
        }
        let d = t.res_pow as i64;
        let (coeff, num_shifts, zshift) = mu_contour_zeta(d)?;
        let c = zshift - t.q_half as i64;
        let Some(moment) = xi_moment_zeta(a, b, c) else {
            continue;
        };
        // z^{-s-d+1} with z = 2√(|ξ|²+1): the 2^{-s} stays symbolic, the
        // constant 2^{-(d-1)} folds into the scale.
        let two_pow = BigRational::new(1.into(), num_bigint::BigInt::from(2).pow((d - 1) as u32));
        let scale = rat_from_f64(tr) * coeff * two_pow * moment.scale;
        out.push(SAtom::new(
            scale,
            num_shifts.into_iter().chain(moment.num).collect(),
            moment.den,
        ));
    }
    Ok(out)
}

/// Heat-side integral of one symbol at the base point: an exact rational
/// multiple of `1/π`.
pub fn integrate_heat(expr: &SymbolExpr) -> Result<BigRational> {
    let expr = expr.evaluate_at_p();
    let mut acc = BigRational::zero();
    for t in &expr.terms {
        let (a, b) = (t.xi_pow[0], t.xi_pow[1]);
        let tr = real_trace(&t.coeff.eval0())?;
        if tr == 0.0 {
            continue;
        }
        let sigma = mu_contour_heat(t.res_pow as i64)?;
        let n = -(t.q_half as i64);
        let Some(moment) = xi_moment_heat(a, b, n)? else {
            continue;
        };
        acc += rat_from_f64(tr) * sigma * moment;
    }
    Ok(acc)
}

pub fn rational_over_pi(r: &BigRational) -> f64 {
    r.to_f64().unwrap() / PI
}

/// `q_j(p)`, `π_j(p)` and the full `J_j(s, p)`.
#[derive(Clone, Debug)]
pub struct ZetaDensity {
    pub j: usize,
    pub q: f64,
    pub pi: f64,
    /// `π_j = (ln2_coeff · ln2 + rational)/π`, exact parts.
    pub pi_parts: DerivParts,
    pub j_fun: SFunction,
}

impl ZetaDensity {
    fn from_fun(j: usize, j_fun: SFunction) -> Result<Self> {
        let q = j_fun.value0()?.to_f64().unwrap() / (2.0 * PI);
        let d = j_fun.deriv0()?;
        let pi_parts = DerivParts {
            rational: -d.rational.clone(),
            ln2_coeff: -d.ln2_coeff.clone(),
        };
        let pi = pi_parts.to_f64();
        Ok(ZetaDensity {
            j,
            q,
            pi,
            pi_parts,
            j_fun,
        })
    }
}

/// Per-group `J₂` contributions.
#[derive(Clone, Debug)]
pub struct ZetaBreakdown {
    pub a: SFunction,
    pub b: SFunction,
    pub c: SFunction,
    pub d: SFunction,
    pub e: SFunction,
    pub e_parts: Vec<SFunction>,
}

/// Per-group heat contributions (exact rational over π).
#[derive(Clone, Debug)]
pub struct HeatBreakdown {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
    pub e: BigRational,
    pub e_parts: Vec<BigRational>,
}

#[derive(Clone, Debug)]
pub struct HeatDensity {
    pub j: usize,
    pub v: f64,
    pub exact: BigRational,
}

/// One fully-built pipeline for a jet: context, DtN symbols and resolvent
/// symbols, reused across the three orders.
pub struct DensityEngine {
    ctx: SymbolCtx,
    pub dtn: DtnSymbols,
    pub res: ResolventSymbols,
}

impl DensityEngine {
    pub fn new(jet: &MetricJet, variant: Variant, lambda: f64) -> Result<Self> {
        let ctx = SymbolCtx::new(jet, variant, lambda)?;
        let dtn = dtn_symbols(&ctx, 3)?;
        let res = resolvent_symbols(&ctx, &dtn, 3)?;
        Ok(DensityEngine { ctx, dtn, res })
    }

    pub fn ctx(&self) -> &SymbolCtx {
        &self.ctx
    }

    pub fn zeta_density(&self, j: usize) -> Result<ZetaDensity> {
        assert!(j < 3);
        ZetaDensity::from_fun(j, integrate_zeta(&self.res.r[j])?)
    }

    pub fn zeta_breakdown(&self) -> Result<ZetaBreakdown> {
        let g = self.res.groups.as_ref().expect("depth 3 recursion");
        Ok(ZetaBreakdown {
            a: integrate_zeta(&g.a)?,
            b: integrate_zeta(&g.b)?,
            c: integrate_zeta(&g.c)?,
            d: integrate_zeta(&g.d)?,
            e: integrate_zeta(&g.e)?,
            e_parts: g
                .e_parts
                .iter()
                .map(integrate_zeta)
                .collect::<Result<_>>()?,
        })
    }

    pub fn heat_density(&self, j: usize) -> Result<HeatDensity> {
        assert!(j < 3);
        let exact = integrate_heat(&self.res.r[j])?;
        Ok(HeatDensity {
            j,
            v: rational_over_pi(&exact),
            exact,
        })
    }

    pub fn heat_breakdown(&self) -> Result<HeatBreakdown> {
        let g = self.res.groups.as_ref().expect("depth 3 recursion");
        Ok(HeatBreakdown {
            a: integrate_heat(&g.a)?,
            b: integrate_heat(&g.b)?,
            c: integrate_heat(&g.c)?,
            d: integrate_heat(&g.d)?,
            e: integrate_heat(&g.e)?,
            e_parts: g
                .e_parts
                .iter()
                .map(integrate_heat)
                .collect::<Result<_>>()?,
        })
    }
}

/// `(π_j(p), q_j(p), J_j(s,p))` through the full symbol pipeline, with the
/// group decomposition at `j = 2`.
pub fn zeta_densities(jet: &MetricJet, j: usize) -> Result<(ZetaDensity, Option<ZetaBreakdown>)> {
    let engine = DensityEngine::new(jet, Variant::Weight2, 1.0)?;
    let density = engine.zeta_density(j)?;
    let breakdown = if j == 2 {
        Some(engine.zeta_breakdown()?)
    } else {
        None
    };
    Ok((density, breakdown))
}

/// `v_j(λ)(p)` through the full symbol pipeline.
pub fn heat_densities(
    jet: &MetricJet,
    lambda: f64,
    j: usize,
) -> Result<(HeatDensity, Option<HeatBreakdown>)> {
    let engine = DensityEngine::new(jet, Variant::LambdaConst, lambda)?;
    let density = engine.heat_density(j)?;
    let breakdown = if j == 2 {
        Some(engine.heat_breakdown()?)
    } else {
        None
    };
    Ok((density, breakdown))
}

/// Direct evaluation of the displayed closed-form densities; the oracle the
/// engine pipeline is tested against.
#[derive(Clone, Debug)]
pub struct ClosedFormDensities {
    pub pi0: f64,
    pub pi1: f64,
    pub pi2: f64,
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
    pub v0: f64,
    pub v1: f64,
    pub v2: f64,
    pub c: [f64; 4],
    pub a0: f64,
    pub a1: f64,
}

pub fn closed_form_densities(jet: &MetricJet, lambda: f64) -> Result<ClosedFormDensities> {
    let inv = CurvatureInvariants::from_jet(jet)?;
    Ok(closed_form_from(&inv, lambda))
}

pub fn closed_form_from(inv: &CurvatureInvariants, lambda: f64) -> ClosedFormDensities {
    let r0 = inv.rank_r0 as f64;
    let h1sq = inv.h1 * inv.h1;
    let core = inv.tau_m / (32.0 * PI) + inv.tau_n / (96.0 * PI) - h1sq / (32.0 * PI)
        + inv.h2 / (32.0 * PI);
    let q2 = 0.5 * r0 * core + inv.tr_e / (8.0 * PI);
    let pi2 = r0
        * (core * LN_2
            - (inv.tau_m - inv.tau_n) / (64.0 * PI)
            - 3.0 * h1sq / (128.0 * PI)
            + 5.0 * inv.h2 / (128.0 * PI))
        + inv.tr_e * LN_2 / (4.0 * PI);
    let v2 = r0 * (-lambda / (4.0 * PI) + core) + inv.tr_e / (4.0 * PI);
    let pi0 = -r0 * (LN_2 / (4.0 * PI) - 1.0 / (8.0 * PI));
    ClosedFormDensities {
        pi0,
        pi1: 0.0,
        pi2,
        q0: -r0 / (8.0 * PI),
        q1: 0.0,
        q2,
        v0: r0 / (8.0 * PI),
        v1: 0.0,
        v2,
        c: c_densities_from(inv),
        a0: -pi2,
        a1: r0 * LN_2 / (4.0 * PI),
    }
}

/// A measure on the cross-section for integrating densities: either a single
/// jet with an area (homogeneous models) or explicit point/weight pairs.
#[derive(Clone, Debug)]
pub enum JetField {
    Homogeneous { jet: MetricJet, area: f64 },
    Weighted(Vec<(f64, MetricJet)>),
}

impl JetField {
    fn pairs(&self) -> Result<Vec<(f64, &MetricJet)>> {
        let v: Vec<(f64, &MetricJet)> = match self {
            JetField::Homogeneous { jet, area } => vec![(*area, jet)],
            JetField::Weighted(ws) => ws.iter().map(|(w, j)| (*w, j)).collect(),
        };
        if v.is_empty() {
            return Err(Error::EmptyField);
        }
        Ok(v)
    }
}

/// Integrated gluing polynomial `P(λ) = a₁λ + a₀` over the jet field:
/// `a₁ = r₀ ln2 vol(N)/4π` and `a₀ = -∫ π₂(p)`, with `π₂` from the engine
/// pipeline.
pub fn polynomial_p(field: &JetField) -> Result<(f64, f64)> {
    let mut a0 = 0.0;
    let mut a1 = 0.0;
    for (w, jet) in field.pairs()? {
        let engine = DensityEngine::new(jet, Variant::Weight2, 1.0)?;
        let d2 = engine.zeta_density(2)?;
        a0 -= w * d2.pi;
        a1 += w * jet.rank_r0 as f64 * LN_2 / (4.0 * PI);
    }
    Ok((a0, a1))
}

/// `ζ_{R(λ)}(0) = ∫ v₂(λ)(p)`, with the equivalent heat-difference form
/// `2 ∫ (c₃ - λ c₁)` as a cross-check; both are returned.
pub fn zeta_r_at_zero(field: &JetField, lambda: f64) -> Result<(f64, f64)> {
    let mut v2_int = 0.0;
    let mut c_int = 0.0;
    for (w, jet) in field.pairs()? {
        let engine = DensityEngine::new(jet, Variant::LambdaConst, lambda)?;
        v2_int += w * engine.heat_density(2)?.v;
        let c = crate::geometry::c_densities(jet)?;
        c_int += w * 2.0 * (c[3] - lambda * c[1]);
    }
    Ok((v2_int, c_int))
}
