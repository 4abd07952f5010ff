//! The μ-contour residues and ξ-plane moment integrals.
//!
//! Zeta side: `(1/2πi) ∮ μ^{-s} (μ-z)^{-d} dμ` followed by
//! `(1/4π²) ∫ ξ₁^a ξ₂^b (|ξ|²+1)^{-w/2} dξ` with `w(s) = s + const`.
//!
//! Heat side: `(1/2πi) ∮ e^{-μ} (μ-z)^{-d} dμ` followed by
//! `(1/4π²) ∫ ξ₁^a ξ₂^b |ξ|^{-n} e^{-2|ξ|} dξ`.
//!
//! Everything is exact rational arithmetic; the only irrational factors
//! (`2^{-s}` and `1/π`) are carried symbolically by [`SAtom`]/[`SFunction`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::sfunction::{rat_int, SAtom};
use crate::error::{Error, Result};

/// `(1/2πi) ∮ μ^{-s} (μ-z)^{-d} dμ = (-1)^{d-1}/(d-1)! · s(s+1)···(s+d-2) · z^{-s-d+1}`.
///
/// Returns the rational prefactor, the numerator shift list
/// `[0, 1, ..., d-2]`, and the exponent shift `d-1` to apply to `z`.
pub fn mu_contour_zeta(d: i64) -> Result<(BigRational, Vec<BigRational>, i64)> {
    if d < 1 {
        return Err(Error::BadResolventPower(d));
    }
    let mut fact = BigInt::one();
    for k in 2..d {
        fact *= k;
    }
    let sign = if (d - 1) % 2 == 0 { 1 } else { -1 };
    let coeff = BigRational::new(BigInt::from(sign), fact);
    let shifts = (0..d - 1).map(rat_int).collect();
    Ok((coeff, shifts, d - 1))
}

/// `(1/2πi) ∮ e^{-μ} (μ-z)^{-d} dμ = (-1)^{d-1}/(d-1)! · e^{-z}`.
pub fn mu_contour_heat(d: i64) -> Result<BigRational> {
    if d < 1 {
        return Err(Error::BadResolventPower(d));
    }
    let mut fact = BigInt::one();
    for k in 2..d {
        fact *= k;
    }
    let sign = if (d - 1) % 2 == 0 { 1 } else { -1 };
    Ok(BigRational::new(BigInt::from(sign), fact))
}

fn double_factorial(n: i64) -> BigInt {
    // (-1)!! = 1 by convention.
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

fn factorial(n: i64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Angular moment `(1/2π) ∫₀^{2π} cos^a sin^b dφ = (a-1)!!(b-1)!!/(a+b)!!`
/// for even `a, b`; zero when either is odd.
fn angular(a: u32, b: u32) -> Option<BigRational> {
    if a % 2 == 1 || b % 2 == 1 {
        return None;
    }
    let num = double_factorial(a as i64 - 1) * double_factorial(b as i64 - 1);
    Some(BigRational::new(num, double_factorial((a + b) as i64)))
}

/// `(1/4π²) ∫_{ℝ²} ξ₁^a ξ₂^b (|ξ|²+1)^{-(s+c)/2} dξ` as an [`SAtom`] with
/// the `1/π` implicit and without the `2^{-s}` factor (that belongs to the
/// contour stage). Returns `None` for odd moments, which vanish exactly.
///
/// Angular moment times the radial Beta integral
/// `½ B((a+b+2)/2, (s+c-a-b-2)/2)`, reduced to a product of linear factors.
pub fn xi_moment_zeta(a: u32, b: u32, c: i64) -> Option<SAtom> {
    let ang = angular(a, b)?;
    let a1 = ((a + b) / 2 + 1) as i64; // first Beta argument, an integer
    // B(a1, (s+c-a-b-2)/2) = (a1-1)! · 2^{a1} / Π_{t=0}^{a1-1} (s + c-a-b-2+2t)
    let mut scale = ang * BigRational::new(factorial(a1 - 1), BigInt::one());
    scale *= BigRational::from_integer(BigInt::from(2).pow(a1 as u32));
    // (1/4π²)·2π·(1/2) = 1/(4π)
    scale /= BigRational::from_integer(BigInt::from(4));
    let den = (0..a1)
        .map(|t| rat_int(c - (a + b) as i64 - 2 + 2 * t))
        .collect();
    Some(SAtom::new(scale, vec![], den))
}

/// `(1/4π²) ∫_{ℝ²} ξ₁^a ξ₂^b |ξ|^{-n} e^{-2|ξ|} dξ`, an exact rational
/// multiple of `1/π` (the `1/π` stays implicit).
///
/// Radial part `∫ r^{a+b+1-n} e^{-2r} dr = (a+b+1-n)! / 2^{a+b+2-n}`;
/// divergent when `a+b+1-n < 0`.
pub fn xi_moment_heat(a: u32, b: u32, n: i64) -> Result<Option<BigRational>> {
    let Some(ang) = angular(a, b) else {
        return Ok(None);
    };
    let m = (a + b) as i64 + 1 - n;
    if m < 0 {
        return Err(Error::DivergentMoment { a, b, n });
    }
    let mut v = ang * BigRational::new(factorial(m), BigInt::one());
    // (1/4π²)·2π = 1/(2π); radial 2^{-(m+1)}.
    v /= BigRational::from_integer(BigInt::from(2));
    let p = m + 1;
    v *= BigRational::new(BigInt::one(), BigInt::from(2).pow(p as u32));
    Ok(Some(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::sfunction::{rat, RatPoly, SFunction};

    fn sf(atom: SAtom) -> SFunction {
        let mut f = SFunction::zero();
        f.push(atom);
        f
    }

    #[test]
    fn contour_zeta_golden() {
        // d=1 -> z^{-s}; d=2 -> -s z^{-s-1}; d=3 -> ½ s(s+1) z^{-s-2}.
        let (c1, n1, sh1) = mu_contour_zeta(1).unwrap();
        assert_eq!((c1, n1, sh1), (rat_int(1), vec![], 0));
        let (c2, n2, sh2) = mu_contour_zeta(2).unwrap();
        assert_eq!((c2, n2, sh2), (rat_int(-1), vec![rat_int(0)], 1));
        let (c3, n3, sh3) = mu_contour_zeta(3).unwrap();
        assert_eq!((c3, n3, sh3), (rat(1, 2), vec![rat_int(0), rat_int(1)], 2));
        assert!(mu_contour_zeta(0).is_err());
    }

    #[test]
    fn contour_heat_golden() {
        assert_eq!(mu_contour_heat(1).unwrap(), rat_int(1));
        assert_eq!(mu_contour_heat(2).unwrap(), rat_int(-1));
        assert_eq!(mu_contour_heat(3).unwrap(), rat(1, 2));
        assert!(mu_contour_heat(0).is_err());
    }

    #[test]
    fn xi_zeta_golden() {
        // All five displayed values, as symbolic identities in s.
        // (1/4π²)∫(|ξ|²+1)^{-s/2} = (1/2π)/(s-2)
        let m = sf(xi_moment_zeta(0, 0, 0).unwrap());
        assert!(m.equals_ratfun(&rat(1, 2), &RatPoly::one(), &RatPoly::linear(rat_int(-2))));
        // (1/4π²)∫(|ξ|²+1)^{-s/2-1} = (1/2π)/s
        let m = sf(xi_moment_zeta(0, 0, 2).unwrap());
        assert!(m.equals_ratfun(&rat(1, 2), &RatPoly::one(), &RatPoly::linear(rat_int(0))));
        // ξ₁²(|ξ|²+1)^{-s/2-2} -> (1/2π)/(s(s+2))
        let m = sf(xi_moment_zeta(2, 0, 4).unwrap());
        let den = RatPoly::linear(rat_int(0)).mul(&RatPoly::linear(rat_int(2)));
        assert!(m.equals_ratfun(&rat(1, 2), &RatPoly::one(), &den));
        // ξ₁²ξ₂²(|ξ|²+1)^{-s/2-3} -> (1/2π)/(s(s+2)(s+4))
        let m = sf(xi_moment_zeta(2, 2, 6).unwrap());
        let den3 = den.mul(&RatPoly::linear(rat_int(4)));
        assert!(m.equals_ratfun(&rat(1, 2), &RatPoly::one(), &den3));
        // ξ₁⁴(|ξ|²+1)^{-s/2-3} -> (3/2π)/(s(s+2)(s+4))
        let m = sf(xi_moment_zeta(4, 0, 6).unwrap());
        assert!(m.equals_ratfun(&rat(3, 2), &RatPoly::one(), &den3));
    }

    #[test]
    fn xi_zeta_odd_vanishes() {
        assert!(xi_moment_zeta(1, 0, 4).is_none());
        assert!(xi_moment_zeta(2, 3, 8).is_none());
    }

    #[test]
    fn xi_heat_golden() {
        // All six displayed values.
        assert_eq!(xi_moment_heat(0, 0, 0).unwrap().unwrap(), rat(1, 8));
        assert_eq!(xi_moment_heat(0, 0, 1).unwrap().unwrap(), rat(1, 4));
        assert_eq!(xi_moment_heat(2, 0, 2).unwrap().unwrap(), rat(1, 16));
        assert_eq!(xi_moment_heat(2, 0, 3).unwrap().unwrap(), rat(1, 8));
        assert_eq!(xi_moment_heat(4, 0, 5).unwrap().unwrap(), rat(3, 32));
        assert_eq!(xi_moment_heat(2, 2, 5).unwrap().unwrap(), rat(1, 32));
    }

    #[test]
    fn xi_heat_divergent_is_an_error() {
        assert!(matches!(
            xi_moment_heat(0, 0, 2),
            Err(Error::DivergentMoment { .. })
        ));
        assert!(xi_moment_heat(1, 0, 5).unwrap().is_none()); // odd first
    }
}
