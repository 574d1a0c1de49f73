//! Exact Gaussian rationals `a + b·i` with `a, b ∈ ℚ`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact complex constant with rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gq {
    pub re: BigRational,
    pub im: BigRational,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Gq {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Gq { re, im }
    }

    pub fn zero() -> Self {
        Gq::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Gq::int(1)
    }

    pub fn i() -> Self {
        Gq::new(BigRational::zero(), BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Gq::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    /// The rational `n/d`. Panics on `d == 0`.
    pub fn ratio(n: i64, d: i64) -> Self {
        Gq::new(rat(n, d), BigRational::zero())
    }

    /// `(re_n/re_d) + (im_n/im_d)·i`.
    pub fn complex(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> Self {
        Gq::new(rat(re_n, re_d), rat(im_n, im_d))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Gq::new(r, BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Gq::new(self.re.clone(), -self.im.clone())
    }

    /// Squared modulus `a² + b²`.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Gq::new(&self.re / &n, -(&self.im / &n)))
    }

    /// Integer power; negative exponents require a nonzero base.
    pub fn powi(&self, k: i64) -> Option<Self> {
        if k < 0 {
            return self.recip()?.powi(-k);
        }
        let mut acc = Gq::one();
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Some(acc)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Returns the value as an `i64` when it is a real integer.
    pub fn as_integer(&self) -> Option<i64> {
        if self.im.is_zero() && self.re.is_integer() {
            self.re.to_integer().to_i64()
        } else {
            None
        }
    }

    /// Returns the real rational value when the imaginary part vanishes.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.im.is_zero().then_some(&self.re)
    }

    /// True when the real part is negative, or the real part is zero and
    /// the imaginary part is negative. Used to print leading minus signs.
    pub fn is_negative_like(&self) -> bool {
        self.re.is_negative() || (self.re.is_zero() && self.im.is_negative())
    }
}

impl Default for Gq {
    fn default() -> Self {
        Gq::zero()
    }
}

impl From<i64> for Gq {
    fn from(n: i64) -> Self {
        Gq::int(n)
    }
}

impl<'a> Add<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn add(self, o: &Gq) -> Gq {
        Gq::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Add for Gq {
    type Output = Gq;
    fn add(self, o: Gq) -> Gq {
        &self + &o
    }
}

impl AddAssign<&Gq> for Gq {
    fn add_assign(&mut self, o: &Gq) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl<'a> Sub<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn sub(self, o: &Gq) -> Gq {
        Gq::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Sub for Gq {
    type Output = Gq;
    fn sub(self, o: Gq) -> Gq {
        &self - &o
    }
}

impl<'a> Mul<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn mul(self, o: &Gq) -> Gq {
        if self.im.is_zero() && o.im.is_zero() {
            return Gq::from_rational(&self.re * &o.re);
        }
        Gq::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Mul for Gq {
    type Output = Gq;
    fn mul(self, o: Gq) -> Gq {
        &self * &o
    }
}

impl<'a> Div<&'a Gq> for &'a Gq {
    type Output = Gq;
    /// Panics on division by zero.
    fn div(self, o: &Gq) -> Gq {
        self * &o.recip().expect("division by exact zero")
    }
}

impl Neg for Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        Gq::new(-self.re, -self.im)
    }
}

impl Neg for &Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        Gq::new(-self.re.clone(), -self.im.clone())
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Gq {
    /// Real constants print bare (`3`, `-1/2`); purely imaginary ones as
    /// `i`, `-2i`, `(1/2)i`; mixed ones as `(a+bi)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imag = |im: &BigRational| -> String {
            if im.is_one() {
                "i".to_string()
            } else if (-im).is_one() {
                "-i".to_string()
            } else if im.is_integer() {
                format!("{}i", im.numer())
            } else {
                format!("({})i", fmt_rat(im))
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rat(&self.re)),
            (true, false) => write!(f, "{}", imag(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                let mag = imag(&self.im.abs());
                write!(f, "({}{}{})", fmt_rat(&self.re), sign, mag)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_product_folds_exactly() {
        // (2+3i)(1-i) = 2 - 2i + 3i + 3 = 5 + i
        let a = Gq::complex(2, 1, 3, 1);
        let b = Gq::complex(1, 1, -1, 1);
        assert_eq!(&a * &b, Gq::complex(5, 1, 1, 1));
    }

    #[test]
    fn recip_and_powers() {
        let z = Gq::complex(1, 2, 1, 1);
        let r = z.recip().unwrap();
        assert!((&z * &r).is_one());
        assert_eq!(Gq::i().powi(2).unwrap(), Gq::int(-1));
        assert_eq!(Gq::int(2).powi(-3).unwrap(), Gq::ratio(1, 8));
        assert!(Gq::zero().powi(-1).is_none());
    }

    #[test]
    fn display_forms() {
        assert_eq!(Gq::ratio(-1, 2).to_string(), "-1/2");
        assert_eq!(Gq::i().to_string(), "i");
        assert_eq!(Gq::complex(0, 1, 1, 2).to_string(), "(1/2)i");
        assert_eq!(Gq::complex(5, 1, -1, 1).to_string(), "(5-i)");
    }
}
