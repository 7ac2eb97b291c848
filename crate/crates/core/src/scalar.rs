//! Scalar abstraction shared by every symbol computation.
//!
//! Symbols are built over `Complex<R>` where `R` is either `f64` or the
//! double-double type [`Dd`]. The double-double path exists because the
//! non-stationary masks approach their stationary limits at rate `2^{-kN}`;
//! below roughly `1e-16` those differences are invisible to `f64`.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use std::ops::Neg;

use num_traits::Num;

pub use crate::dd::Dd;

/// Complex scalar over a [`Real`] base field.
pub type Cx<R> = Complex<R>;

pub trait Real:
    Num + Copy + Neg<Output = Self> + PartialOrd + Debug + Display + Send + Sync + 'static
{
    fn from_f64(x: f64) -> Self;

    fn to_f64(self) -> f64;

    /// Unit roundoff of the format.
    fn unit_roundoff() -> f64;

    /// Complex exponential accurate to the working precision.
    fn cexp(w: Cx<Self>) -> Cx<Self>;
}

impl Real for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self
    }

    fn unit_roundoff() -> f64 {
        f64::EPSILON / 2.0
    }

    fn cexp(w: Cx<f64>) -> Cx<f64> {
        w.exp()
    }
}

impl Real for Dd {
    #[inline]
    fn from_f64(x: f64) -> Self {
        Dd::from(x)
    }

    #[inline]
    fn to_f64(self) -> f64 {
        f64::from(self)
    }

    fn unit_roundoff() -> f64 {
        // 2^-104
        4.930380657631324e-32
    }

    // Taylor series after halving the argument into |w| <= 1/8.
    fn cexp(w: Cx<Dd>) -> Cx<Dd> {
        let modulus = w.re.to_f64().hypot(w.im.to_f64());
        let mut halvings = 0u32;
        let mut scale = 1.0;
        while modulus * scale > 0.125 {
            scale *= 0.5;
            halvings += 1;
        }
        let w = w * Dd::from(scale);
        let one = Cx::new(Dd::from(1.0), Dd::from(0.0));
        let mut sum = one;
        let mut term = one;
        for n in 1..60u32 {
            term = term * w / Dd::from(n as f64);
            sum = sum + term;
            let t = term.re.to_f64().abs() + term.im.to_f64().abs();
            if t < 1e-36 {
                break;
            }
        }
        for _ in 0..halvings {
            sum = sum * sum;
        }
        sum
    }
}

#[inline]
pub fn real<R: Real>(x: f64) -> Cx<R> {
    Cx::new(R::from_f64(x), R::zero())
}

#[inline]
pub fn cx<R: Real>(re: f64, im: f64) -> Cx<R> {
    Cx::new(R::from_f64(re), R::from_f64(im))
}

/// Round a complex value of any precision down to `Complex<f64>`.
#[inline]
pub fn to_c64<R: Real>(z: Cx<R>) -> Cx<f64> {
    Cx::new(z.re.to_f64(), z.im.to_f64())
}

/// Modulus rounded to `f64`.
#[inline]
pub fn abs64<R: Real>(z: Cx<R>) -> f64 {
    let re = z.re.to_f64();
    let im = z.im.to_f64();
    re.hypot(im)
}

/// Binomial coefficient `C(n, k)` as a real scalar.
pub fn binomial<R: Real>(n: usize, k: usize) -> R {
    if k > n {
        return R::zero();
    }
    let k = k.min(n - k);
    let mut acc = R::one();
    for i in 0..k {
        acc = acc * R::from_f64((n - i) as f64) / R::from_f64((i + 1) as f64);
    }
    acc
}
