//! Laurent polynomials with complex coefficients.
//!
//! Every symbol in the crate (B-spline symbols, corrections, pseudo-spline
//! symbols) is a [`LaurentPoly`]. Storage is dense over the exponent interval
//! `lo..=hi`; the supports involved never exceed a few dozen terms.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{abs64, real, Cx, Real};

/// Default relative tolerance for [`LaurentPoly::realize`].
pub const REALIZE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly<R: Real = f64> {
    lo: i64,
    coeffs: Vec<Cx<R>>,
}

/// Symmetry class of a symbol, up to a monomial shift `z^shift`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag", content = "shift")]
pub enum SymmetryClass {
    /// `z^shift a(z)` is invariant under `z -> 1/z`.
    Odd(i64),
    /// `z^shift a(z) = b(z)` satisfies `z b(z) = b(1/z)`.
    Even(i64),
    None,
}

impl<R: Real> LaurentPoly<R> {
    /// Builds `sum_i coeffs[i] z^(lo + i)`, trimming exact zeros at both ends.
    pub fn new(lo: i64, coeffs: Vec<Cx<R>>) -> Self {
        let mut p = LaurentPoly { lo, coeffs };
        p.trim();
        p
    }

    pub fn from_real(lo: i64, coeffs: &[f64]) -> Self {
        Self::new(lo, coeffs.iter().map(|&c| real(c)).collect())
    }

    pub fn zero() -> Self {
        LaurentPoly { lo: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Cx::one())
    }

    pub fn constant(c: Cx<R>) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(exponent: i64, c: Cx<R>) -> Self {
        Self::new(exponent, vec![c])
    }

    fn trim(&mut self) {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.lo = 0;
            return;
        }
        self.coeffs.drain(..lead);
        self.lo += lead as i64;
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient (0 for the zero polynomial).
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest exponent with a nonzero coefficient (`lo - 1` for the zero polynomial).
    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn support(&self) -> Option<(i64, i64)> {
        (!self.is_zero()).then(|| (self.lo, self.hi()))
    }

    pub fn width(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Cx<R>] {
        &self.coeffs
    }

    pub fn coeff(&self, exponent: i64) -> Cx<R> {
        let i = exponent - self.lo;
        if i < 0 || i >= self.coeffs.len() as i64 {
            Cx::zero()
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|&c| abs64(c)).fold(0.0, f64::max)
    }

    /// Horner evaluation. Undefined (non-finite) at `z = 0` when `lo < 0`.
    pub fn eval(&self, z: Cx<R>) -> Cx<R> {
        let mut acc = Cx::<R>::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc * z.powi(self.lo as i32)
    }

    /// `d^r p / dz^r` at `z`, by termwise differentiation of the monomials.
    pub fn eval_derivative(&self, z: Cx<R>, r: u32) -> Result<Cx<R>> {
        if z.is_zero() {
            return Err(Error::Domain("Laurent polynomial evaluated at z = 0".into()));
        }
        if self.is_zero() {
            return Ok(Cx::zero());
        }
        let mut power = z.powi((self.lo - r as i64) as i32);
        let mut acc = Cx::zero();
        for (i, &c) in self.coeffs.iter().enumerate() {
            let j = self.lo + i as i64;
            let ff = falling_factorial(j, r);
            if ff != 0.0 && !c.is_zero() {
                acc = acc + c * power * R::from_f64(ff);
            }
            power = power * z;
        }
        Ok(acc)
    }

    /// Values of `p, p', ..., p^(r_max)` at `z`.
    pub fn derivatives(&self, z: Cx<R>, r_max: u32) -> Result<Vec<Cx<R>>> {
        (0..=r_max).map(|r| self.eval_derivative(z, r)).collect()
    }

    /// `z -> 1/z`.
    pub fn reflect(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        LaurentPoly { lo: -self.hi(), coeffs }.normalized_zero()
    }

    /// Multiplication by `z^s`.
    pub fn shift(&self, s: i64) -> Self {
        LaurentPoly { lo: self.lo + s, coeffs: self.coeffs.clone() }.normalized_zero()
    }

    fn normalized_zero(mut self) -> Self {
        if self.coeffs.is_empty() {
            self.lo = 0;
        }
        self
    }

    pub fn scale(&self, s: Cx<R>) -> Self {
        Self::new(self.lo, self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// `p(z^2)`.
    pub fn compose_square(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Cx::zero(); 2 * self.coeffs.len() - 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[2 * i] = c;
        }
        Self::new(2 * self.lo, coeffs)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Sup-norm of the coefficient difference, rounded to `f64`.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        if self.is_zero() && other.is_zero() {
            return 0.0;
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        (lo..=hi)
            .map(|j| abs64(self.coeff(j) - other.coeff(j)))
            .fold(0.0, f64::max)
    }

    /// Searches for the shift under which the coefficients are palindromic.
    ///
    /// Odd width can only be odd-symmetric (centre on an exponent), even width
    /// only even-symmetric (centre between two exponents). Coefficient
    /// mismatches are measured relative to the largest coefficient.
    pub fn classify_symmetry(&self, tol: f64) -> SymmetryClass {
        if self.is_zero() {
            return SymmetryClass::Odd(0);
        }
        let n = self.coeffs.len();
        let scale = self.max_abs_coeff();
        let palindromic = (0..n / 2)
            .all(|i| abs64(self.coeffs[i] - self.coeffs[n - 1 - i]) <= tol * scale);
        if !palindromic {
            return SymmetryClass::None;
        }
        let ends = self.lo + self.hi();
        if n % 2 == 1 {
            SymmetryClass::Odd(-ends / 2)
        } else {
            SymmetryClass::Even((-1 - ends) / 2)
        }
    }

    /// Largest palindrome mismatch `|r_j - r_{c-j}|` about the given class.
    pub fn symmetry_residual(&self, class: SymmetryClass) -> f64 {
        let (centre2, shift) = match class {
            SymmetryClass::Odd(s) => (0, s),
            SymmetryClass::Even(s) => (-1, s),
            SymmetryClass::None => return f64::INFINITY,
        };
        let b = self.shift(shift);
        if b.is_zero() {
            return 0.0;
        }
        (b.lo()..=b.hi())
            .map(|j| abs64(b.coeff(j) - b.coeff(centre2 - j)))
            .fold(0.0, f64::max)
    }

    /// Drops imaginary parts, failing when they are not negligible.
    pub fn realize(&self, tol: f64) -> Result<RealMask> {
        let max_im = self.coeffs.iter().map(|c| c.im.to_f64().abs()).fold(0.0, f64::max);
        let max_re = self.coeffs.iter().map(|c| c.re.to_f64().abs()).fold(0.0, f64::max);
        let limit = tol * (1.0 + max_re);
        if max_im > limit {
            return Err(Error::Realization { residue: max_im, limit });
        }
        Ok(RealMask {
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| c.re.to_f64()).collect(),
        })
    }

    /// Re-expresses the coefficients in another precision.
    pub fn convert<S: Real>(&self) -> LaurentPoly<S> {
        LaurentPoly {
            lo: self.lo,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Cx::new(S::from_f64(c.re.to_f64()), S::from_f64(c.im.to_f64())))
                .collect(),
        }
    }
}

/// `j (j-1) ... (j-r+1)`, also for negative `j`.
fn falling_factorial(j: i64, r: u32) -> f64 {
    (0..r as i64).map(|i| (j - i) as f64).product()
}

impl<R: Real> Add for &LaurentPoly<R> {
    type Output = LaurentPoly<R>;

    fn add(self, rhs: Self) -> LaurentPoly<R> {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(rhs.lo);
        let hi = self.hi().max(rhs.hi());
        LaurentPoly::new(lo, (lo..=hi).map(|j| self.coeff(j) + rhs.coeff(j)).collect())
    }
}

impl<R: Real> Sub for &LaurentPoly<R> {
    type Output = LaurentPoly<R>;

    fn sub(self, rhs: Self) -> LaurentPoly<R> {
        self + &(-rhs)
    }
}

impl<R: Real> Neg for &LaurentPoly<R> {
    type Output = LaurentPoly<R>;

    fn neg(self) -> LaurentPoly<R> {
        LaurentPoly { lo: self.lo, coeffs: self.coeffs.iter().map(|&c| -c).collect() }
    }
}

impl<R: Real> Mul for &LaurentPoly<R> {
    type Output = LaurentPoly<R>;

    fn mul(self, rhs: Self) -> LaurentPoly<R> {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        let mut coeffs = vec![Cx::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j] + a * b;
            }
        }
        LaurentPoly::new(self.lo + rhs.lo, coeffs)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl<R: Real> $tr for LaurentPoly<R> {
            type Output = LaurentPoly<R>;

            fn $f(self, rhs: Self) -> LaurentPoly<R> {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<R: Real> fmt::Display for LaurentPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let j = self.lo + i as i64;
            let re = c.re.to_f64();
            let im = c.im.to_f64();
            let value = if im == 0.0 {
                format!("{}", re.abs())
            } else {
                format!("({re}{im:+}i)")
            };
            let sign = if im == 0.0 && re < 0.0 { '-' } else { '+' };
            if first {
                if sign == '-' {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{value}")?,
                1 => write!(f, "{value} z")?,
                _ => write!(f, "{value} z^{j}")?,
            }
        }
        Ok(())
    }
}

/// A real mask `{a_lo, ..., a_hi}`; the JSON form is `{"lo": int, "coeffs": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealMask {
    pub lo: i64,
    pub coeffs: Vec<f64>,
}

impl RealMask {
    pub fn new(lo: i64, coeffs: Vec<f64>) -> Self {
        RealMask { lo, coeffs }
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn get(&self, j: i64) -> f64 {
        let i = j - self.lo;
        if i < 0 || i >= self.coeffs.len() as i64 {
            0.0
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    pub fn to_laurent<R: Real>(&self) -> LaurentPoly<R> {
        LaurentPoly::from_real(self.lo, &self.coeffs)
    }

    /// Sup-norm distance over the union of supports.
    pub fn sup_distance(&self, other: &RealMask) -> f64 {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        (lo..=hi).map(|j| (self.get(j) - other.get(j)).abs()).fold(0.0, f64::max)
    }

    /// Canonical JSON text: compact, shortest round-trip float formatting.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("mask serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mask: RealMask = serde_json::from_str(text)?;
        if mask.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Format("mask coefficients must be finite".into()));
        }
        Ok(mask)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cx, Dd};
    use proptest::prelude::*;

    fn b2() -> LaurentPoly {
        LaurentPoly::from_real(-1, &[0.5, 1.0, 0.5])
    }

    fn c(re: f64) -> Cx<f64> {
        real(re)
    }

    #[test]
    fn eval_derivative_of_b2() {
        let p = b2();
        assert_eq!(p.eval_derivative(c(1.0), 0).unwrap(), c(2.0));
        assert_eq!(p.eval_derivative(c(-1.0), 0).unwrap(), c(0.0));
        assert_eq!(p.eval_derivative(c(1.0), 1).unwrap(), c(0.0));
        // (z + 2 + 1/z)/2 has second derivative z^-3
        assert_eq!(p.eval_derivative(c(1.0), 2).unwrap(), c(1.0));
        let z = c(2.0);
        assert!((p.eval_derivative(z, 2).unwrap() - c(0.125)).norm() < 1e-15);
    }

    #[test]
    fn eval_at_zero_is_domain_error() {
        assert!(matches!(b2().eval_derivative(c(0.0), 0), Err(Error::Domain(_))));
    }

    #[test]
    fn multiply_examples() {
        let a = LaurentPoly::<f64>::from_real(0, &[1.0, 1.0]);
        let b = LaurentPoly::from_real(-1, &[1.0, 1.0]);
        assert_eq!(&a * &b, LaurentPoly::from_real(-1, &[1.0, 2.0, 1.0]));
        assert_eq!(&a * &LaurentPoly::one(), a);

        let b4 = LaurentPoly::from_real(-2, &[1.0, 4.0, 6.0, 4.0, 1.0]).scale(c(1.0 / 8.0));
        let c4 = LaurentPoly::from_real(-1, &[-0.5, 2.0, -0.5]);
        let dd4 = &b4 * &c4;
        let expected = [-1.0 / 16.0, 0.0, 9.0 / 16.0, 1.0, 9.0 / 16.0, 0.0, -1.0 / 16.0];
        assert_eq!(dd4.lo(), -3);
        for (j, e) in (-3..=3).zip(expected) {
            assert!((dd4.coeff(j) - c(e)).norm() < 1e-15, "tap {j}");
        }
    }

    #[test]
    fn reflect_and_shift() {
        assert_eq!(b2().reflect(), b2());
        let one_plus_z = LaurentPoly::<f64>::from_real(0, &[1.0, 1.0]);
        let shifted = one_plus_z.shift(-1);
        assert_eq!(shifted, LaurentPoly::from_real(-1, &[1.0, 1.0]));
        // z a(z) = a(1/z) for a = 1/z + 1
        assert_eq!(shifted.reflect(), shifted.shift(1));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(b2().classify_symmetry(1e-12), SymmetryClass::Odd(0));
        let one_plus_z = LaurentPoly::<f64>::from_real(0, &[1.0, 1.0]);
        assert_eq!(one_plus_z.classify_symmetry(1e-12), SymmetryClass::Even(-1));
        let p = LaurentPoly::<f64>::from_real(0, &[1.0, 2.0]);
        assert_eq!(p.classify_symmetry(1e-12), SymmetryClass::None);
        let q = LaurentPoly::<f64>::from_real(0, &[1.0, 2.0, 1.0, 3.0]);
        assert_eq!(q.classify_symmetry(1e-12), SymmetryClass::None);
        // z^2 + 2z^3 + z^4 needs z^-3
        let r = LaurentPoly::<f64>::from_real(2, &[1.0, 2.0, 1.0]);
        assert_eq!(r.classify_symmetry(1e-12), SymmetryClass::Odd(-3));
        assert_eq!(r.symmetry_residual(SymmetryClass::Odd(-3)), 0.0);
    }

    #[test]
    fn realize_examples() {
        let p = b2();
        assert_eq!(p.realize(REALIZE_TOL).unwrap(), RealMask::new(-1, vec![0.5, 1.0, 0.5]));
        let bad = LaurentPoly::<f64>::new(0, vec![cx(1.0, 1e-3)]);
        assert!(matches!(bad.realize(1e-10), Err(Error::Realization { .. })));
    }

    #[test]
    fn trimming_keeps_width_invariant() {
        let p = LaurentPoly::<f64>::from_real(-3, &[0.0, 0.0, 1.0, 0.0, 2.0, 0.0]);
        assert_eq!(p.support(), Some((-1, 1)));
        assert_eq!(p.width() as i64, p.hi() - p.lo() + 1);
        assert!(LaurentPoly::<f64>::from_real(5, &[0.0, 0.0]).is_zero());
    }

    #[test]
    fn mask_json_is_bit_exact() {
        let m = RealMask::new(-3, vec![-0.043589793803102403, 0.0, 0.1 + 0.2, 1.0, 1e-300]);
        let text = m.to_json();
        let back = RealMask::from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn display_is_readable() {
        let p = LaurentPoly::<f64>::from_real(-1, &[-0.5, 2.0, -0.5]);
        assert_eq!(p.to_string(), "-0.5 z + 2 - 0.5 z^-1");
    }

    #[test]
    fn double_double_convolution() {
        let p = LaurentPoly::<Dd>::from_real(-1, &[1.0, 2.0, 1.0]);
        let q = p.pow(3);
        assert_eq!(q.support(), Some((-3, 3)));
        assert_eq!(q.coeff(0).re.to_f64(), 20.0);
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly<f64>> {
        (-4i64..4, prop::collection::vec(-2.0f64..2.0, 1..7))
            .prop_map(|(lo, c)| LaurentPoly::from_real(lo, &c))
    }

    proptest! {
        #[test]
        fn termwise_eval_matches_horner(p in arb_poly(), re in 0.3f64..2.0, im in -1.0f64..1.0) {
            let z = cx(re, im);
            let a = p.eval(z);
            let b = p.eval_derivative(z, 0).unwrap();
            let scale = 1.0 + p.max_abs_coeff() * 50.0;
            prop_assert!((a - b).norm() <= 1e-13 * scale);
        }

        #[test]
        fn multiply_commutes_and_associates(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
            prop_assert!((&p * &q).sup_distance(&(&q * &p)) <= 1e-13);
            let left = &(&p * &q) * &r;
            let right = &p * &(&q * &r);
            prop_assert!(left.sup_distance(&right) <= 1e-13 * (1.0 + left.max_abs_coeff()));
        }

        #[test]
        fn reflect_is_an_involution(p in arb_poly()) {
            prop_assert_eq!(p.reflect().reflect(), p);
        }

        #[test]
        fn products_of_odd_symmetric_polys_stay_odd(a in prop::collection::vec(-2.0f64..2.0, 0..3),
                                                    b in prop::collection::vec(-2.0f64..2.0, 0..3),
                                                    ca in 0.5f64..2.0, cb in 0.5f64..2.0) {
            let sym = |half: &[f64], centre: f64| {
                let mut c: Vec<f64> = half.iter().rev().copied().collect();
                c.push(centre);
                c.extend(half.iter().copied());
                LaurentPoly::<f64>::from_real(-(half.len() as i64), &c)
            };
            let p = sym(&a, ca);
            let q = sym(&b, cb);
            prop_assume!(p.support().map(|(l, h)| l + h) == Some(0));
            prop_assume!(q.support().map(|(l, h)| l + h) == Some(0));
            prop_assert_eq!((&p * &q).classify_symmetry(1e-12), SymmetryClass::Odd(0));
        }
    }
}
