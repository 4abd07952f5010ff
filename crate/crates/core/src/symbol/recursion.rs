//! The Riccati recursion for the Dirichlet-to-Neumann symbol and the
//! resolvent recursion, order by order in the canonical term basis.
//!
//! With `D(x, x_m, ∂/∂x, λ)` the tangential operator, `A` the normal metric
//! coefficient and `ω_m` the normal connection component, the one-sided
//! boundary operators satisfy
//!
//! ```text
//!   (Q⁺)² = D + A·Q⁺ - ∂_m Q⁺ + (Q⁺ω_m - ω_m Q⁺)
//!   (Q⁻)² = D - A·Q⁻ + ∂_m Q⁻ - (Q⁻ω_m - ω_m Q⁻)
//! ```
//!
//! Matching homogeneity degrees yields `α₁ = β₁ = √Q` and one division by
//! `2√Q` per lower order. The symbol of `R(λ)` is `θ_j = α_j + β_j` and the
//! resolvent symbols follow from
//! `r_{-1-j} = (μ-2√Q)^{-1} Σ (1/ω!) ∂_ξ^ω θ_{1-l} · D_x^ω r_{-1-k}`.

use num_complex::Complex64;

use super::context::SymbolCtx;
use super::expr::{SymbolExpr, Variant};
use crate::error::{Error, Result};
use crate::geometry::MetricJet;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `Σ_{|ω| ≤ depth} (1/ω!) ∂_ξ^ω a · D_x^ω b` over the two tangential
/// directions, `D_x = (1/i) ∂_x`.
pub fn leibniz_compose(
    a: &SymbolExpr,
    b: &SymbolExpr,
    depth: usize,
    ctx: &SymbolCtx,
) -> Result<SymbolExpr> {
    let mut acc = SymbolExpr::zero(a.variant, a.dim);
    for n in 0..=depth {
        acc = acc.add(&compose_at_weight(a, b, n, ctx)?)?;
    }
    Ok(acc)
}

/// The `|ω| = n` slice of the composition sum.
fn compose_at_weight(
    a: &SymbolExpr,
    b: &SymbolExpr,
    n: usize,
    ctx: &SymbolCtx,
) -> Result<SymbolExpr> {
    let mut acc = SymbolExpr::zero(a.variant, a.dim);
    for w1 in 0..=n {
        let w2 = n - w1;
        let mut da = a.clone();
        let mut db = b.clone();
        for _ in 0..w1 {
            da = da.dxi(0, ctx)?;
            db = db.dx(0, ctx)?;
        }
        for _ in 0..w2 {
            da = da.dxi(1, ctx)?;
            db = db.dx(1, ctx)?;
        }
        // D_x^ω = (1/i)^{|ω|} ∂_x^ω and the 1/ω! factor.
        let fact = (1..=w1).product::<usize>() * (1..=w2).product::<usize>();
        let phase = Complex64::new(0.0, -1.0).powu(n as u32) / c(fact as f64);
        acc = acc.add(&da.mul(&db)?.scale(phase))?;
    }
    Ok(acc)
}

/// Operator data in the chosen grading: `A`, and the symbol layers of `D`.
pub struct OperatorData {
    pub a: SymbolExpr,
    pub p2: SymbolExpr,
    pub p1: SymbolExpr,
    pub p0: SymbolExpr,
}

pub fn build_operator_data(jet: &MetricJet, variant: Variant, lambda: f64) -> Result<OperatorData> {
    let ctx = SymbolCtx::new(jet, variant, lambda)?;
    Ok(operator_data(&ctx))
}

pub fn operator_data(ctx: &SymbolCtx) -> OperatorData {
    OperatorData {
        a: ctx.a_symbol(),
        p2: ctx.p2_symbol(),
        p1: ctx.p1_symbol(),
        p0: ctx.p0_symbol(),
    }
}

/// Homogeneous symbols of the one-sided operators and their sum.
pub struct DtnSymbols {
    /// `α_1, α_0, α_{-1}, …` (orders `1-j`).
    pub alpha: Vec<SymbolExpr>,
    pub beta: Vec<SymbolExpr>,
    /// `θ_{1-j} = α_{1-j} + β_{1-j}`.
    pub theta: Vec<SymbolExpr>,
}

/// Solve the two Riccati equations order by order, `depth` orders deep.
/// Order-2 jets support `depth == 3` (symbol orders 1, 0, -1).
pub fn dtn_symbols(ctx: &SymbolCtx, depth: usize) -> Result<DtnSymbols> {
    if depth != 3 {
        return Err(Error::UnsupportedDepth(depth));
    }
    let alpha = riccati_side(ctx, depth, 1.0)?;
    let beta = riccati_side(ctx, depth, -1.0)?;
    let mut theta = Vec::with_capacity(depth);
    for j in 0..depth {
        theta.push(alpha[j].add(&beta[j])?);
    }
    Ok(DtnSymbols { alpha, beta, theta })
}

/// One side of the recursion; `side = +1` gives the α-list, `side = -1`
/// the β-list (the simultaneous sign flip of `A`, `∂_m` and the `ω_m`
/// commutator).
fn riccati_side(ctx: &SymbolCtx, depth: usize, side: f64) -> Result<Vec<SymbolExpr>> {
    let op = operator_data(ctx);
    let om = ctx.omega_m_symbol();
    let inv_2sqrt = SymbolExpr::q_power(ctx.variant, ctx.dim, -1).scale(c(0.5));

    let mut list: Vec<SymbolExpr> = Vec::with_capacity(depth);
    // Order 2 of the equation: α₁² = Q, so α₁ = √Q.
    list.push(SymbolExpr::q_power(ctx.variant, ctx.dim, 1));

    for j in 1..depth {
        // Right-hand side at homogeneity 2-j.
        let mut rhs = match j {
            1 => op.p1.clone(),
            2 => op.p0.clone(),
            _ => SymbolExpr::zero(ctx.variant, ctx.dim),
        };
        let prev = &list[j - 1]; // α_{2-j}
        rhs = rhs.add(&op.a.mul(prev)?.scale(c(side)))?;
        rhs = rhs.sub(&prev.dx(2, ctx)?.scale(c(side)))?;
        let comm = prev.mul(&om)?.sub(&om.mul(prev)?)?;
        rhs = rhs.add(&comm.scale(c(side)))?;

        // Known part of the composition at this order: all (ω, i, k) with
        // |ω|+i+k = j except the two occurrences of the unknown α_{1-j}.
        let mut known = SymbolExpr::zero(ctx.variant, ctx.dim);
        for n in 0..=j {
            for i in 0..=(j - n) {
                let k = j - n - i;
                if n == 0 && (i == j || k == j) {
                    continue;
                }
                known = known.add(&compose_at_weight(&list[i], &list[k], n, ctx)?)?;
            }
        }

        let next = inv_2sqrt.mul(&rhs.sub(&known)?)?;
        list.push(next);
    }
    Ok(list)
}

/// The resolvent symbols `r_{-1}, …, r_{-depth}` and, at the third order,
/// the labelled decomposition of `r_{-3}`.
pub struct ResolventSymbols {
    pub r: Vec<SymbolExpr>,
    pub groups: Option<R3Groups>,
}

/// `r_{-3}` split by `(|ω|, l, k)`:
/// (A) `Σ_{|ω|=2} (1/ω!) ∂_ξ^ω θ₁ · D_x^ω r_{-1}`, (B) `∂_ξ θ₁ · D_x r_{-2}`,
/// (C) `∂_ξ θ₀ · D_x r_{-1}`, (D) `θ₀ · r_{-2}`, (E) `θ_{-1} · r_{-1}`,
/// each times `(μ-2√Q)^{-1}`; (E) further split into its seven constituents.
pub struct R3Groups {
    pub a: SymbolExpr,
    pub b: SymbolExpr,
    pub c: SymbolExpr,
    pub d: SymbolExpr,
    pub e: SymbolExpr,
    pub e_parts: Vec<SymbolExpr>,
}

pub fn resolvent_symbols(
    ctx: &SymbolCtx,
    dtn: &DtnSymbols,
    depth: usize,
) -> Result<ResolventSymbols> {
    if depth != 3 {
        return Err(Error::UnsupportedDepth(depth));
    }
    let res1 = SymbolExpr::resolvent_factor(ctx.variant, ctx.dim);
    let mut r = vec![res1.clone()];
    let mut groups = None;

    for j in 1..depth {
        let mut acc = SymbolExpr::zero(ctx.variant, ctx.dim);
        let mut by_class: Vec<((usize, usize, usize), SymbolExpr)> = Vec::new();
        for n in 0..=j {
            for l in 0..=(j - n) {
                let k = j - n - l;
                if k >= j {
                    continue; // r_{-1-j} itself is the unknown
                }
                let term = compose_at_weight(&dtn.theta[l], &r[k], n, ctx)?;
                let term = res1.mul(&term)?;
                by_class.push(((n, l, k), term.clone()));
                acc = acc.add(&term)?;
            }
        }
        if j == 2 {
            let pick = |n: usize, l: usize, k: usize| -> SymbolExpr {
                by_class
                    .iter()
                    .find(|(key, _)| *key == (n, l, k))
                    .map(|(_, e)| e.clone())
                    .unwrap_or_else(|| SymbolExpr::zero(ctx.variant, ctx.dim))
            };
            groups = Some(R3Groups {
                a: pick(2, 0, 0),
                b: pick(1, 0, 1),
                c: pick(1, 1, 0),
                d: pick(0, 1, 1),
                e: pick(0, 2, 0),
                e_parts: theta_m1_parts(ctx, dtn)?
                    .into_iter()
                    .map(|p| {
                        // piece · r_{-1} · (μ-2√Q)^{-1}
                        res1.mul(&res1.mul(&p).unwrap()).unwrap()
                    })
                    .collect(),
            });
        }
        r.push(acc);
    }
    Ok(ResolventSymbols { r, groups })
}

/// The seven constituents of `θ_{-1}` (each already divided by `2√Q`):
/// the second-derivative block, the two mixed `θ₀`/`α₁` derivative terms,
/// `-(α₀²+β₀²)`, `A(α₀-β₀)`, `-∂_m(α₀-β₀)` and `2p₀`.
///
/// Their sum equals the generic `θ_{-1} = α_{-1} + β_{-1}` because the
/// `ω_m` commutators cancel against each other (`α₀-β₀` is scalar).
pub fn theta_m1_parts(ctx: &SymbolCtx, dtn: &DtnSymbols) -> Result<Vec<SymbolExpr>> {
    let op = operator_data(ctx);
    let a1 = &dtn.alpha[0];
    let a0 = &dtn.alpha[1];
    let b0 = &dtn.beta[1];
    let theta0 = &dtn.theta[1];
    let inv_2sqrt = SymbolExpr::q_power(ctx.variant, ctx.dim, -1).scale(c(0.5));

    // (1): -Σ_{|ω|=2} (2/ω!) ∂_ξ^ω α₁ · D_x^ω α₁
    let p1 = compose_at_weight(a1, a1, 2, ctx)?.scale(c(-2.0));
    // (2): -∂_ξ θ₀ · D_x α₁
    let p2 = compose_at_weight(theta0, a1, 1, ctx)?.scale(c(-1.0));
    // (3): -∂_ξ α₁ · D_x θ₀
    let p3 = compose_at_weight(a1, theta0, 1, ctx)?.scale(c(-1.0));
    // (4): -(α₀² + β₀²)
    let p4 = a0.mul(a0)?.add(&b0.mul(b0)?)?.scale(c(-1.0));
    // (5): A (α₀ - β₀)
    let diff = a0.sub(b0)?;
    let p5 = op.a.mul(&diff)?;
    // (6): -∂_m (α₀ - β₀)
    let p6 = diff.dx(2, ctx)?.scale(c(-1.0));
    // (7): 2 p₀
    let p7 = op.p0.scale(c(2.0));

    [p1, p2, p3, p4, p5, p6, p7]
        .into_iter()
        .map(|p| inv_2sqrt.mul(&p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MetricJet;
    use crate::symbol::taylor::CMat;
    use nalgebra::DMatrix;

    fn ctx(jet: &MetricJet, variant: Variant, lambda: f64) -> SymbolCtx {
        SymbolCtx::new(jet, variant, lambda).unwrap()
    }

    #[test]
    fn operator_data_flat() {
        let jet = MetricJet::flat(2).with_endo(DMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                0.4
            } else {
                0.1
            }
        }));
        let op = build_operator_data(&jet, Variant::Weight2, 0.0).unwrap();
        assert!(op.a.terms.is_empty());
        assert!(op.p1.terms.is_empty());
        // p₀ = -E for a flat jet with ω = 0.
        let p0 = op.p0.evaluate_at_p();
        assert_eq!(p0.terms.len(), 1);
        let m = p0.terms[0].coeff.eval0();
        assert!((m[(0, 0)].re + 0.4).abs() < 1e-15);
        assert!((m[(0, 1)].re + 0.1).abs() < 1e-15);
    }

    #[test]
    fn operator_data_umbilic() {
        // κ₁ = κ₂ = κ gives A(p) = 2κ·Id.
        let k = 0.6;
        let jet = MetricJet::warped(-k, 0.0, 0.0, 1);
        let op = build_operator_data(&jet, Variant::Weight2, 0.0).unwrap();
        let a = op.a.evaluate_at_p();
        assert_eq!(a.terms.len(), 1);
        assert!((a.terms[0].coeff.eval0()[(0, 0)].re - 2.0 * k).abs() < 1e-14);
        // p₂ at p is (|ξ|²+λ)·Id.
        let v = op.p2.eval_num([0.3, -0.4], 2.0, Complex64::new(0.0, 0.0));
        assert!((v[(0, 0)].re - (0.25 + 2.0)).abs() < 1e-15);
    }

    #[test]
    fn compose_scalar_constants() {
        let jet = MetricJet::flat(1);
        let ctx = ctx(&jet, Variant::Weight2, 0.0);
        let a = SymbolExpr::constant(Variant::Weight2, CMat::from_element(1, 1, c(3.0)));
        for depth in 0..3 {
            let p = leibniz_compose(&a, &a, depth, &ctx).unwrap();
            assert_eq!(p.terms.len(), 1);
            assert!((p.terms[0].coeff.eval0()[(0, 0)].re - 9.0).abs() < 1e-15);
        }
    }

    #[test]
    fn compose_sqrt_q_flat_is_q() {
        let jet = MetricJet::flat(1);
        let ctx = ctx(&jet, Variant::Weight2, 0.0);
        let sq = SymbolExpr::q_power(Variant::Weight2, 1, 1);
        let p = leibniz_compose(&sq, &sq, 2, &ctx).unwrap();
        // All x-derivatives vanish on a flat jet: the product is exactly Q.
        assert_eq!(p.terms.len(), 1);
        assert_eq!(p.terms[0].q_half, 2);
        assert_eq!(p.terms[0].xi_pow, [0, 0]);
    }

    #[test]
    fn compose_sqrt_q_curved_correction() {
        // The |ω| = 2 correction of √Q ∘ √Q at the base point against the
        // hand-derived closed form
        //   -Σ_{γ≤δ} (1/ω!) ∂_ξ^ω √Q · ∂_x^ω √Q  with
        //   ∂_γ∂_δ √Q(p) = g^{αβ,γδ} ξ_α ξ_β / (2√Q).
        let tau = 1.7;
        let jet = MetricJet::product(tau, 1);
        let ctx = ctx(&jet, Variant::Weight2, 0.0);
        let sq = SymbolExpr::q_power(Variant::Weight2, 1, 1);
        let p = leibniz_compose(&sq, &sq, 2, &ctx).unwrap();
        let q = SymbolExpr::q_power(Variant::Weight2, 1, 2);
        let corr = p.sub(&q).unwrap().evaluate_at_p();

        let t = crate::geometry::tangential_jets(tau);
        let (xi, lambda) = ([0.37, -0.81], 0.9);
        let q0: f64 = xi[0] * xi[0] + xi[1] * xi[1] + lambda;
        let dxi2 = |g: usize, d: usize| -> f64 {
            // ∂_{ξ_γ}∂_{ξ_δ} √Q at p
            let kd = if g == d { 1.0 } else { 0.0 };
            kd / q0.sqrt() - xi[g] * xi[d] / q0.powf(1.5)
        };
        let dx2 = |g: usize, d: usize| -> f64 {
            let mut s = 0.0;
            for al in 0..2 {
                for be in 0..2 {
                    s += t.ginv_dd(al, be, g, d) * xi[al] * xi[be];
                }
            }
            s / (2.0 * q0.sqrt())
        };
        let expected = -(0.5 * dxi2(0, 0) * dx2(0, 0)
            + 0.5 * dxi2(1, 1) * dx2(1, 1)
            + dxi2(0, 1) * dx2(0, 1));
        let got = corr.eval_num(xi, lambda, Complex64::new(0.0, 0.0))[(0, 0)].re;
        assert!(
            (got - expected).abs() < 1e-13,
            "correction {got} vs {expected}"
        );
    }

    #[test]
    fn dtn_flat_jet() {
        let jet = MetricJet::flat(1);
        let ctx = ctx(&jet, Variant::Weight2, 0.0);
        let dtn = dtn_symbols(&ctx, 3).unwrap();
        // θ₁ = 2√Q, θ₀ = 0, θ₋₁ = 0 at p.
        let t1 = dtn.theta[0].evaluate_at_p();
        assert_eq!(t1.terms.len(), 1);
        assert_eq!(t1.terms[0].q_half, 1);
        assert!((t1.terms[0].coeff.eval0()[(0, 0)].re - 2.0).abs() < 1e-15);
        assert!(dtn.theta[1].evaluate_at_p().terms.is_empty());
        assert!(dtn.theta[2].evaluate_at_p().terms.is_empty());
    }

    #[test]
    fn alpha0_minus_beta0_closed_form() {
        // α₀ - β₀ = A - ∂_m √Q / √Q, checked numerically at the base point.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut jet = MetricJet::product(0.8, 1);
        jet.g_n1 = nalgebra::Matrix2::new(0.3, 0.1, 0.1, -0.5);
        jet.g_n2 = nalgebra::Matrix2::new(0.2, 0.0, 0.0, 0.7);
        let ctx = ctx(&jet, Variant::Weight2, 0.0);
        let dtn = dtn_symbols(&ctx, 3).unwrap();
        let diff = dtn.alpha[1].sub(&dtn.beta[1]).unwrap();

        let a = ctx.a_symbol();
        let sq = SymbolExpr::q_power(Variant::Weight2, 1, 1);
        let closed = a
            .add(
                &sq.dx(2, &ctx)
                    .unwrap()
                    .mul(&SymbolExpr::q_power(Variant::Weight2, 1, -1))
                    .unwrap()
                    .scale(c(-1.0)),
            )
            .unwrap();
        for _ in 0..10 {
            let xi = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let lambda = rng.gen_range(0.2..2.0);
            let mu = Complex64::new(-1.3, 0.7);
            let got = diff.eval_num(xi, lambda, mu)[(0, 0)];
            let want = closed.eval_num(xi, lambda, mu)[(0, 0)];
            assert!((got - want).norm() < 1e-13);
        }
    }

    #[test]
    fn lambda_const_matches_weight2_at_lambda_zero() {
        let mut jet = MetricJet::product(1.1, 2);
        jet.g_n1 = nalgebra::Matrix2::new(0.4, 0.0, 0.0, -0.2);
        jet.endo_e = DMatrix::from_fn(2, 2, |i, j| if i == j { 0.3 } else { -0.1 });
        let ctxw = ctx(&jet, Variant::Weight2, 0.0);
        let ctxl = ctx(&jet, Variant::LambdaConst, 0.0);
        let dw = dtn_symbols(&ctxw, 3).unwrap();
        let dl = dtn_symbols(&ctxl, 3).unwrap();
        // α̃₁ = |ξ| and α̃_j(λ=0) agrees with the weight-2 α_j at λ = 0.
        for j in 0..3 {
            for xi in [[0.5, 0.2], [-0.3, 0.9]] {
                let mu = Complex64::new(-0.8, 0.4);
                let a = dw.alpha[j].eval_num(xi, 0.0, mu);
                let b = dl.alpha[j].eval_num(xi, 0.0, mu);
                assert!((&a - &b).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-13);
            }
        }
    }

    #[test]
    fn theta_m1_parts_sum_to_generic() {
        let mut jet = MetricJet::product(-0.9, 2);
        jet.g_n1 = nalgebra::Matrix2::new(0.5, 0.2, 0.2, -0.1);
        jet.g_n2 = nalgebra::Matrix2::new(-0.3, 0.1, 0.1, 0.6);
        jet.omega[0] = DMatrix::from_row_slice(2, 2, &[0.0, 0.2, -0.2, 0.0]);
        jet.omega[1] = DMatrix::from_row_slice(2, 2, &[0.0, -0.1, 0.1, 0.0]);
        jet.omega[2] = DMatrix::from_row_slice(2, 2, &[0.0, 0.3, -0.3, 0.0]);
        jet.omega_d[0][0] = DMatrix::from_row_slice(2, 2, &[0.1, 0.0, 0.0, -0.1]);
        jet.omega_d[1][1] = DMatrix::from_row_slice(2, 2, &[-0.2, 0.1, 0.1, 0.2]);
        jet.endo_e = DMatrix::from_row_slice(2, 2, &[0.7, 0.1, 0.1, -0.4]);
        for variant in [Variant::Weight2, Variant::LambdaConst] {
            let ctx = ctx(&jet, variant, 0.7);
            let dtn = dtn_symbols(&ctx, 3).unwrap();
            let parts = theta_m1_parts(&ctx, &dtn).unwrap();
            let mut sum = SymbolExpr::zero(variant, 2);
            for p in parts {
                sum = sum.add(&p).unwrap();
            }
            let diff = sum.sub(&dtn.theta[2]).unwrap().evaluate_at_p();
            let mu = Complex64::new(-1.1, 0.6);
            for xi in [[0.7, -0.2], [0.1, 1.1]] {
                let v = diff.eval_num(xi, 1.3, mu);
                assert!(v.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
            }
        }
    }
}
