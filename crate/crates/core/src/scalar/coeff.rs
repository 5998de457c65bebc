use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Element of Q(i): `re + im * i` with exact rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn zero() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        GaussRat::from_int(1)
    }

    pub fn i() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        GaussRat::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn from_rational(r: BigRational) -> Self {
        GaussRat::new(r, BigRational::zero())
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
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    /// |z|^2, always a nonnegative rational.
    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(GaussRat::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = GaussRat::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rat(&self.re)),
            (true, false) => {
                if self.im.is_one() {
                    write!(f, "i")
                } else if (-self.im.clone()).is_one() {
                    write!(f, "-i")
                } else {
                    write!(f, "{}*i", fmt_rat(&self.im))
                }
            }
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                let mag = self.im.abs();
                if mag.is_one() {
                    write!(f, "({}{}i)", fmt_rat(&self.re), sign)
                } else {
                    write!(f, "({}{}{}*i)", fmt_rat(&self.re), sign, fmt_rat(&mag))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_gaussian() {
        let z = GaussRat::new(BigRational::from_integer(1.into()), BigRational::from_integer(2.into()));
        let w = z.inv().unwrap();
        assert!((&z * &w).is_one());
        assert!(GaussRat::zero().inv().is_none());
    }

    #[test]
    fn i_squared_is_minus_one() {
        let m = &GaussRat::i() * &GaussRat::i();
        assert_eq!(m, GaussRat::from_int(-1));
    }

    #[test]
    fn display_forms() {
        assert_eq!(GaussRat::from_ratio(-3, 6).to_string(), "-1/2");
        assert_eq!(GaussRat::i().to_string(), "i");
        let z = GaussRat::new(BigRational::from_integer(1.into()), BigRational::from_integer((-2).into()));
        assert_eq!(z.to_string(), "(1-2*i)");
    }
}
