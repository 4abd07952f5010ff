//! Matrix-valued Taylor polynomials in `(x₁, x₂, x_m)` around the base point,
//! with an explicit remaining-differentiability budget.
//!
//! A value of order `k` provides coefficients for all monomials of total
//! degree `≤ k`; differentiating consumes one order, and overdrawing the
//! budget is an error rather than a silent truncation. Exactly-known
//! polynomials (constants assembled by the algebra itself) carry
//! [`ORDER_EXACT`] and never run out.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ORDER_EXACT: u8 = u8::MAX;

pub type CMat = DMatrix<Complex64>;

/// Monomial exponent `(x₁^i, x₂^j, x_m^k)`.
pub type Mono = [u8; 3];

#[derive(Clone, Debug)]
pub struct TaylorMat {
    dim: usize,
    order: u8,
    coeffs: BTreeMap<Mono, CMat>,
}

fn mono_degree(m: &Mono) -> u8 {
    m[0] + m[1] + m[2]
}

impl TaylorMat {
    pub fn zero(dim: usize) -> Self {
        TaylorMat {
            dim,
            order: ORDER_EXACT,
            coeffs: BTreeMap::new(),
        }
    }

    /// Exact constant `c · Id`.
    pub fn scalar(dim: usize, c: Complex64) -> Self {
        Self::constant(CMat::identity(dim, dim) * c)
    }

    /// Exact constant matrix.
    pub fn constant(m: CMat) -> Self {
        let dim = m.nrows();
        let mut t = Self::zero(dim);
        t.set([0, 0, 0], m);
        t
    }

    pub fn with_order(mut self, order: u8) -> Self {
        self.order = order;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    /// Insert/overwrite one monomial coefficient; drops exact zeros.
    pub fn set(&mut self, mono: Mono, m: CMat) {
        assert_eq!(m.nrows(), self.dim);
        if m.iter().all(|c| c.re == 0.0 && c.im == 0.0) {
            self.coeffs.remove(&mono);
        } else {
            self.coeffs.insert(mono, m);
        }
    }

    pub fn get(&self, mono: &Mono) -> Option<&CMat> {
        self.coeffs.get(mono)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Constant coefficient (the value at the base point).
    pub fn eval0(&self) -> CMat {
        self.coeffs
            .get(&[0, 0, 0])
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.dim, self.dim))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let order = self.order.min(other.order);
        let mut coeffs = BTreeMap::new();
        for (mono, m) in self.coeffs.iter().chain(other.coeffs.iter()) {
            if order != ORDER_EXACT && mono_degree(mono) > order {
                continue;
            }
            coeffs
                .entry(*mono)
                .and_modify(|acc: &mut CMat| *acc += m)
                .or_insert_with(|| m.clone());
        }
        coeffs.retain(|_, m| m.iter().any(|c| c.re != 0.0 || c.im != 0.0));
        TaylorMat {
            dim: self.dim,
            order,
            coeffs,
        }
    }

    /// Non-commutative product; coefficients above the joint validity order
    /// are dropped because they would be incomplete.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let order = self.order.min(other.order);
        let mut coeffs: BTreeMap<Mono, CMat> = BTreeMap::new();
        for (ma, ca) in &self.coeffs {
            for (mb, cb) in &other.coeffs {
                let mono = [ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]];
                if order != ORDER_EXACT && mono_degree(&mono) > order {
                    continue;
                }
                let prod = ca * cb;
                coeffs
                    .entry(mono)
                    .and_modify(|acc| *acc += &prod)
                    .or_insert(prod);
            }
        }
        coeffs.retain(|_, m| m.iter().any(|c| c.re != 0.0 || c.im != 0.0));
        TaylorMat {
            dim: self.dim,
            order,
            coeffs,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        if c.re == 0.0 && c.im == 0.0 {
            out.coeffs.clear();
            return out;
        }
        for m in out.coeffs.values_mut() {
            *m *= c;
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    /// Plain partial derivative along `axis` (0, 1 tangential, 2 normal).
    pub fn derivative(&self, axis: usize) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::Overdraw(
                "cannot differentiate a Taylor value with no remaining order".into(),
            ));
        }
        let order = if self.order == ORDER_EXACT {
            ORDER_EXACT
        } else {
            self.order - 1
        };
        let mut coeffs = BTreeMap::new();
        for (mono, m) in &self.coeffs {
            if mono[axis] == 0 {
                continue;
            }
            let mut dm = *mono;
            dm[axis] -= 1;
            let factor = Complex64::new(mono[axis] as f64, 0.0);
            let scaled = m * factor;
            coeffs
                .entry(dm)
                .and_modify(|acc: &mut CMat| *acc += &scaled)
                .or_insert(scaled);
        }
        Ok(TaylorMat {
            dim: self.dim,
            order,
            coeffs,
        })
    }

    /// Iterate monomial/coefficient pairs in deterministic order.
    pub fn iter(&self) -> impl Iterator<Item = (&Mono, &CMat)> {
        self.coeffs.iter()
    }

    /// Max absolute entry over all coefficients.
    pub fn amax(&self) -> f64 {
        self.coeffs
            .values()
            .flat_map(|m| m.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn product_and_validity() {
        // f = 1 + x₁ (order 2), g = x₁ (order 1): fg valid to order 1 only.
        let mut f = TaylorMat::zero(1).with_order(2);
        f.set([0, 0, 0], CMat::from_element(1, 1, c(1.0)));
        f.set([1, 0, 0], CMat::from_element(1, 1, c(1.0)));
        let mut g = TaylorMat::zero(1).with_order(1);
        g.set([1, 0, 0], CMat::from_element(1, 1, c(1.0)));
        let p = f.mul(&g);
        assert_eq!(p.order(), 1);
        assert!(p.get(&[1, 0, 0]).is_some());
        assert!(p.get(&[2, 0, 0]).is_none()); // dropped as incomplete
    }

    #[test]
    fn derivative_budget() {
        let mut f = TaylorMat::zero(1).with_order(1);
        f.set([0, 0, 1], CMat::from_element(1, 1, c(3.0)));
        let d = f.derivative(2).unwrap();
        assert_eq!(d.eval0()[(0, 0)], c(3.0));
        assert!(d.derivative(2).is_err()); // overdraw
    }

    #[test]
    fn exact_constants_never_overdraw() {
        let id = TaylorMat::scalar(2, c(2.0));
        let d = id.derivative(0).unwrap().derivative(1).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn noncommutative_order_preserved() {
        let a = TaylorMat::constant(CMat::from_row_slice(2, 2, &[c(0.), c(1.), c(0.), c(0.)]));
        let b = TaylorMat::constant(CMat::from_row_slice(2, 2, &[c(0.), c(0.), c(1.), c(0.)]));
        let ab = a.mul(&b).eval0();
        let ba = b.mul(&a).eval0();
        assert!(ab[(0, 0)] == c(1.0) && ba[(0, 0)] == c(0.0));
    }
}
