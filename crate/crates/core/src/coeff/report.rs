//! JSON-facing density report with exact-rational renderings where the
//! numbers are still human-sized.

use num_rational::BigRational;
use serde::Serialize;

use super::densities::{
    closed_form_densities, DensityEngine, HeatBreakdown, ZetaBreakdown,
};
use super::sfunction::{RationalView, SAtomView};
use crate::error::Result;
use crate::geometry::{c_densities, MetricJet};
use crate::symbol::Variant;

/// A density value: decimal always, exact rational-over-π parts when small
/// enough to be readable. `value = (rational + ln2_coeff·ln2)/π` when the
/// exact parts are present.
#[derive(Serialize)]
pub struct DensityValue {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rational_over_pi: Option<RationalView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ln2_over_pi: Option<RationalView>,
}

impl DensityValue {
    pub fn plain(value: f64) -> Self {
        DensityValue {
            value,
            rational_over_pi: None,
            ln2_over_pi: None,
        }
    }

    pub fn exact(value: f64, rational: &BigRational) -> Self {
        DensityValue {
            value,
            rational_over_pi: RationalView::of_small(rational),
            ln2_over_pi: None,
        }
    }

    pub fn with_ln2(value: f64, rational: &BigRational, ln2: &BigRational) -> Self {
        DensityValue {
            value,
            rational_over_pi: RationalView::of_small(rational),
            ln2_over_pi: RationalView::of_small(ln2),
        }
    }
}

#[derive(Serialize)]
pub struct ZetaGroupView {
    pub atoms: Vec<SAtomView>,
    pub value_at_0: f64,
}

#[derive(Serialize)]
pub struct CoefficientReport {
    /// λ at which `v_j(λ)` is evaluated. The zeta densities are reported at
    /// `λ/|λ| = 1`; their λ-dependence is `π_j, q_j ∝ λ^{(2-j)/2}`.
    pub lambda: f64,
    pub rank_r0: usize,
    pub pi0: DensityValue,
    pub pi1: DensityValue,
    pub pi2: DensityValue,
    pub q0: DensityValue,
    pub q1: DensityValue,
    pub q2: DensityValue,
    pub v0: DensityValue,
    pub v1: DensityValue,
    pub v2: DensityValue,
    pub c0: DensityValue,
    pub c1: DensityValue,
    pub c2: DensityValue,
    pub c3: DensityValue,
    pub a0: DensityValue,
    pub a1: DensityValue,
    pub zeta_groups: Vec<(String, ZetaGroupView)>,
    pub heat_groups: Vec<(String, DensityValue)>,
    pub notes: Vec<String>,
}

fn zeta_group_view(
    f: &super::sfunction::SFunction,
) -> Result<ZetaGroupView> {
    Ok(ZetaGroupView {
        atoms: f.view(),
        value_at_0: f.value0_f64()?,
    })
}

fn heat_value(r: &BigRational) -> DensityValue {
    DensityValue::exact(super::densities::rational_over_pi(r), r)
}

/// Full density report for one jet: engine densities for both pipelines,
/// closed-form cross-values for `c_j`, `a_j`, and the labelled group
/// breakdowns of the third-order integrand.
pub fn coefficient_report(jet: &MetricJet, lambda: f64) -> Result<CoefficientReport> {
    let zeta = DensityEngine::new(jet, Variant::Weight2, 1.0)?;
    let heat = DensityEngine::new(jet, Variant::LambdaConst, lambda)?;

    let z0 = zeta.zeta_density(0)?;
    let z1 = zeta.zeta_density(1)?;
    let z2 = zeta.zeta_density(2)?;
    let h0 = heat.heat_density(0)?;
    let h1 = heat.heat_density(1)?;
    let h2 = heat.heat_density(2)?;
    let zb: ZetaBreakdown = zeta.zeta_breakdown()?;
    let hb: HeatBreakdown = heat.heat_breakdown()?;
    let c = c_densities(jet)?;
    let closed = closed_form_densities(jet, lambda)?;

    let q_value = |d: &super::densities::ZetaDensity| -> Result<DensityValue> {
        let half = d.j_fun.value0()? / BigRational::from_integer(2.into());
        Ok(DensityValue::exact(d.q, &half))
    };
    let pi_value = |d: &super::densities::ZetaDensity| {
        DensityValue::with_ln2(d.pi, &d.pi_parts.rational, &d.pi_parts.ln2_coeff)
    };

    let mut zeta_groups = Vec::new();
    for (name, f) in [
        ("A", &zb.a),
        ("B", &zb.b),
        ("C", &zb.c),
        ("D", &zb.d),
        ("E", &zb.e),
    ] {
        zeta_groups.push((name.to_string(), zeta_group_view(f)?));
    }
    for (i, f) in zb.e_parts.iter().enumerate() {
        zeta_groups.push((format!("E{}", i + 1), zeta_group_view(f)?));
    }
    let mut heat_groups = Vec::new();
    for (name, r) in [
        ("A", &hb.a),
        ("B", &hb.b),
        ("C", &hb.c),
        ("D", &hb.d),
        ("E", &hb.e),
    ] {
        heat_groups.push((name.to_string(), heat_value(r)));
    }
    for (i, r) in hb.e_parts.iter().enumerate() {
        heat_groups.push((format!("E{}", i + 1), heat_value(r)));
    }

    Ok(CoefficientReport {
        lambda,
        rank_r0: jet.rank_r0,
        pi0: pi_value(&z0),
        pi1: pi_value(&z1),
        pi2: pi_value(&z2),
        q0: q_value(&z0)?,
        q1: q_value(&z1)?,
        q2: q_value(&z2)?,
        v0: heat_value(&h0.exact),
        v1: heat_value(&h1.exact),
        v2: heat_value(&h2.exact),
        c0: DensityValue::plain(c[0]),
        c1: DensityValue::plain(c[1]),
        c2: DensityValue::plain(c[2]),
        c3: DensityValue::plain(c[3]),
        a0: DensityValue::plain(closed.a0),
        a1: DensityValue::plain(closed.a1),
        zeta_groups,
        heat_groups,
        notes: vec![
            "zeta densities are reported at lambda/|lambda| = 1; restore the lambda \
             dependence via pi_j, q_j ~ lambda^{(2-j)/2}"
                .to_string(),
        ],
    })
}
