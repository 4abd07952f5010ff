//! Exact rational functions of the zeta variable `s`.
//!
//! Every μ-contour / ξ-moment integral produces an atom of the form
//!
//! ```text
//!     scale · 2^{-s} · (1/π) · Π_i (s + n_i) / Π_j (s + d_j)
//! ```
//!
//! with `scale` and all shifts exact rationals. Geometric jet values enter
//! through `scale` as exact dyadic rationals (every finite `f64` is one), so
//! the whole s-dependence stays exact and two expressions can be compared
//! symbolically by cross-multiplied polynomial equality.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact conversion; every finite f64 is a dyadic rational.
pub fn rat_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// Dense polynomial over the rationals, ascending coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly(pub Vec<BigRational>);

impl RatPoly {
    pub fn zero() -> Self {
        RatPoly(vec![])
    }

    pub fn constant(c: BigRational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            RatPoly(vec![c])
        }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// The monic linear factor `s + c`.
    pub fn linear(c: BigRational) -> Self {
        RatPoly(vec![c, BigRational::one()])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        let mut p = RatPoly(coeffs.iter().map(|&c| rat_int(c)).collect());
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.0.iter().enumerate() {
            out[i] += c;
        }
        let mut p = RatPoly(out);
        p.trim();
        p
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        let mut p = RatPoly(out);
        p.trim();
        p
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatPoly(self.0.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, s: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }
}

/// One integral atom: `scale · 2^{-s} / π · Π(s+num_i) / Π(s+den_j)`.
#[derive(Clone, Debug)]
pub struct SAtom {
    pub scale: BigRational,
    pub num: Vec<BigRational>,
    pub den: Vec<BigRational>,
}

impl SAtom {
    pub fn new(scale: BigRational, num: Vec<BigRational>, den: Vec<BigRational>) -> Self {
        let mut a = SAtom { scale, num, den };
        a.cancel();
        a
    }

    /// Remove factors common to numerator and denominator, and sort the rest
    /// so that equal atoms have equal representations.
    fn cancel(&mut self) {
        let mut i = 0;
        while i < self.num.len() {
            if let Some(j) = self.den.iter().position(|d| *d == self.num[i]) {
                self.den.remove(j);
                self.num.remove(i);
            } else {
                i += 1;
            }
        }
        self.num.sort();
        self.den.sort();
    }

    fn num_poly(&self) -> RatPoly {
        let mut p = RatPoly::one();
        for c in &self.num {
            p = p.mul(&RatPoly::linear(c.clone()));
        }
        p
    }

    fn den_poly(&self) -> RatPoly {
        let mut p = RatPoly::one();
        for c in &self.den {
            p = p.mul(&RatPoly::linear(c.clone()));
        }
        p
    }

    /// Value of the rational-function part at `s` (no `2^{-s}`, no `1/π`).
    pub fn ratfun_at(&self, s: &BigRational) -> Result<BigRational> {
        let mut v = self.scale.clone();
        for c in &self.num {
            v *= s + c;
        }
        for c in &self.den {
            let f = s + c;
            if f.is_zero() {
                return Err(Error::PoleAtZero);
            }
            v /= f;
        }
        Ok(v)
    }

    /// Exact derivative of the rational-function part at `s = 0`, by the
    /// product rule over the factor lists (the digamma-difference formula
    /// written out so that zero factors in the numerator are fine).
    pub fn ratfun_deriv0(&self) -> Result<BigRational> {
        let d0 = {
            let mut v = BigRational::one();
            for c in &self.den {
                if c.is_zero() {
                    return Err(Error::PoleAtZero);
                }
                v *= c;
            }
            v
        };
        let n0: BigRational = self.num.iter().product();
        // N'(0) = sum over factors of the product of the others.
        let mut np0 = BigRational::zero();
        for i in 0..self.num.len() {
            let mut prod = BigRational::one();
            for (j, c) in self.num.iter().enumerate() {
                if j != i {
                    prod *= c;
                }
            }
            np0 += prod;
        }
        // D'(0)/D(0) = sum 1/d_j.
        let mut dlog = BigRational::zero();
        for c in &self.den {
            dlog += BigRational::one() / c;
        }
        Ok(&self.scale * (np0 - n0 * dlog) / d0)
    }
}

/// Decomposition of a derivative at s = 0 into its exact rational and
/// `ln 2`-multiplied rational parts (both still carrying the global `1/π`).
#[derive(Clone, Debug)]
pub struct DerivParts {
    pub rational: BigRational,
    pub ln2_coeff: BigRational,
}

impl DerivParts {
    pub fn to_f64(&self) -> f64 {
        (self.rational.to_f64().unwrap()
            + std::f64::consts::LN_2 * self.ln2_coeff.to_f64().unwrap())
            / std::f64::consts::PI
    }
}

/// A finite sum of [`SAtom`]s. The represented function of `s` is
/// `(1/π) · 2^{-s} · Σ scale_i Π(s+n)/Π(s+d)`.
#[derive(Clone, Debug, Default)]
pub struct SFunction {
    pub atoms: Vec<SAtom>,
}

impl SFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn push(&mut self, atom: SAtom) {
        if atom.scale.is_zero() {
            return;
        }
        // Merge atoms with identical factor lists.
        for a in &mut self.atoms {
            if a.num == atom.num && a.den == atom.den {
                a.scale += &atom.scale;
                if a.scale.is_zero() {
                    let num = a.num.clone();
                    let den = a.den.clone();
                    self.atoms
                        .retain(|x| !(x.num == num && x.den == den && x.scale.is_zero()));
                }
                return;
            }
        }
        self.atoms.push(atom);
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for a in &other.atoms {
            out.push(a.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        SFunction {
            atoms: self
                .atoms
                .iter()
                .map(|a| SAtom {
                    scale: &a.scale * c,
                    num: a.num.clone(),
                    den: a.den.clone(),
                })
                .filter(|a| !a.scale.is_zero())
                .collect(),
        }
    }

    /// Exact value at `s = 0` of the sum without the `1/π` factor
    /// (`2^{-0} = 1`).
    pub fn value0(&self) -> Result<BigRational> {
        let mut v = BigRational::zero();
        for a in &self.atoms {
            v += a.ratfun_at(&BigRational::zero())?;
        }
        Ok(v)
    }

    /// Derivative at `s = 0`, split into rational and `ln2` parts:
    /// `d/ds [2^{-s} F(s)]|_0 = F'(0) - ln2 · F(0)`.
    pub fn deriv0(&self) -> Result<DerivParts> {
        let mut rational = BigRational::zero();
        for a in &self.atoms {
            rational += a.ratfun_deriv0()?;
        }
        Ok(DerivParts {
            rational,
            ln2_coeff: -self.value0()?,
        })
    }

    pub fn value0_f64(&self) -> Result<f64> {
        Ok(self.value0()?.to_f64().unwrap() / std::f64::consts::PI)
    }

    /// Floating-point evaluation of the full function (with `2^{-s}/π`),
    /// used by the finite-difference cross-check of [`Self::deriv0`].
    pub fn eval_f64(&self, s: f64) -> f64 {
        let mut v = 0.0;
        for a in &self.atoms {
            let mut t = a.scale.to_f64().unwrap();
            for c in &a.num {
                t *= s + c.to_f64().unwrap();
            }
            for c in &a.den {
                t /= s + c.to_f64().unwrap();
            }
            v += t;
        }
        v * (-s * std::f64::consts::LN_2).exp() / std::f64::consts::PI
    }

    /// Combine all atoms over a common denominator; returns `(N, D)` with the
    /// function equal to `N/D · 2^{-s}/π`.
    pub fn as_poly_ratio(&self) -> (RatPoly, RatPoly) {
        let mut den = RatPoly::one();
        for a in &self.atoms {
            den = den.mul(&a.den_poly());
        }
        let mut num = RatPoly::zero();
        for (i, a) in self.atoms.iter().enumerate() {
            let mut others = RatPoly::one();
            for (j, b) in self.atoms.iter().enumerate() {
                if j != i {
                    others = others.mul(&b.den_poly());
                }
            }
            num = num.add(&a.num_poly().scale(&a.scale).mul(&others));
        }
        (num, den)
    }

    /// Symbolic equality with `scale · num / den · 2^{-s}/π`, by
    /// cross-multiplication (no normalization needed).
    pub fn equals_ratfun(&self, scale: &BigRational, num: &RatPoly, den: &RatPoly) -> bool {
        let (n1, d1) = self.as_poly_ratio();
        n1.mul(den) == num.scale(scale).mul(&d1)
    }

    pub fn is_zero_symbolic(&self) -> bool {
        self.as_poly_ratio().0.is_zero()
    }
}

/// Serialization view with exact numerator/denominator strings.
#[derive(Serialize)]
pub struct SAtomView {
    pub scale: RationalView,
    pub num_shifts: Vec<RationalView>,
    pub den_shifts: Vec<RationalView>,
}

#[derive(Serialize)]
pub struct RationalView {
    pub num: String,
    pub den: String,
}

impl RationalView {
    pub fn of(r: &BigRational) -> Self {
        RationalView {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }

    /// Only render rationals that are still human-sized; generic float jets
    /// produce dyadic rationals with hundreds of bits.
    pub fn of_small(r: &BigRational) -> Option<Self> {
        if r.numer().abs().bits() <= 64 && r.denom().bits() <= 64 {
            Some(Self::of(r))
        } else {
            None
        }
    }
}

impl SFunction {
    pub fn view(&self) -> Vec<SAtomView> {
        self.atoms
            .iter()
            .map(|a| SAtomView {
                scale: RationalView::of(&a.scale),
                num_shifts: a.num.iter().map(RationalView::of).collect(),
                den_shifts: a.den.iter().map(RationalView::of).collect(),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_cancellation() {
        // s(s+1) / (s(s+2)) -> (s+1)/(s+2)
        let a = SAtom::new(
            rat_int(1),
            vec![rat_int(0), rat_int(1)],
            vec![rat_int(0), rat_int(2)],
        );
        assert_eq!(a.num, vec![rat_int(1)]);
        assert_eq!(a.den, vec![rat_int(2)]);
    }

    #[test]
    fn value_and_derivative() {
        // F(s) = (s+1)/(s+2): F(0) = 1/2, F'(0) = 1/4.
        let mut f = SFunction::zero();
        f.push(SAtom::new(rat_int(1), vec![rat_int(1)], vec![rat_int(2)]));
        assert_eq!(f.value0().unwrap(), rat(1, 2));
        let d = f.deriv0().unwrap();
        assert_eq!(d.rational, rat(1, 4));
        assert_eq!(d.ln2_coeff, rat(-1, 2));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let mut f = SFunction::zero();
        f.push(SAtom::new(rat(3, 7), vec![rat_int(1)], vec![rat_int(2), rat_int(4)]));
        f.push(SAtom::new(rat(-2, 5), vec![], vec![rat_int(2)]));
        let d = f.deriv0().unwrap();
        let exact = (d.rational.to_f64().unwrap()
            + std::f64::consts::LN_2 * d.ln2_coeff.to_f64().unwrap())
            / std::f64::consts::PI;
        let h = 1e-5;
        let fd = (f.eval_f64(h) - f.eval_f64(-h)) / (2.0 * h);
        assert!((exact - fd).abs() < 1e-8, "exact {exact} vs fd {fd}");
    }

    #[test]
    fn symbolic_equality() {
        // 1/(s+2) + 1/(s+4) == (2s+6)/((s+2)(s+4))
        let mut f = SFunction::zero();
        f.push(SAtom::new(rat_int(1), vec![], vec![rat_int(2)]));
        f.push(SAtom::new(rat_int(1), vec![], vec![rat_int(4)]));
        let num = RatPoly::from_i64(&[6, 2]);
        let den = RatPoly::linear(rat_int(2)).mul(&RatPoly::linear(rat_int(4)));
        assert!(f.equals_ratfun(&rat_int(1), &num, &den));
        assert!(!f.equals_ratfun(&rat_int(1), &RatPoly::from_i64(&[5, 2]), &den));
    }

    #[test]
    fn pole_detection() {
        let mut f = SFunction::zero();
        f.push(SAtom::new(rat_int(1), vec![], vec![rat_int(0)]));
        assert!(matches!(f.value0(), Err(Error::PoleAtZero)));
    }

    #[test]
    fn dyadic_floats_are_exact() {
        assert_eq!(rat_from_f64(2.5), rat(5, 2));
        assert_eq!(rat_from_f64(-0.375), rat(-3, 8));
    }
}
