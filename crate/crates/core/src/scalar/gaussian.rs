//! Elements of Q(i) with exact arbitrary-precision components.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An exact complex rational `re + im*i`.
///
/// Both components are [`BigRational`]s, which maintain lowest terms with a
/// positive denominator, so structural equality is arithmetic equality and
/// the type can serve as a map value without further normalisation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    /// Exact `p/q`; panics if `q == 0`.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(p), BigInt::from(q)),
            BigRational::zero(),
        )
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self::new(r, BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    /// `true` when the imaginary part vanishes.
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|^2 = re^2 + im^2`, an exact non-negative rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self::new(&self.re / &n, -&self.im / &n))
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self * &r)
    }

    /// Integer power; `None` only for a negative power of zero.
    pub fn powi(&self, k: i64) -> Option<Self> {
        if k < 0 {
            return self.inv().and_then(|v| v.powi(-k));
        }
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        Some(acc)
    }

    /// An exact square root inside Q(i), if one exists.
    ///
    /// Every Gaussian rational has a complex square root, but it only rarely
    /// stays inside Q(i); callers use `None` to report that an eigenvalue or
    /// similar quantity has left the coefficient field.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.im.is_zero() {
            return if self.re.is_negative() {
                rational_sqrt(&(-self.re.clone())).map(|y| Self::new(BigRational::zero(), y))
            } else {
                rational_sqrt(&self.re).map(Self::from_rational)
            };
        }
        // For im != 0 solve x^2 - y^2 = re, 2xy = im with x^2 = (re + |z|)/2.
        let norm = rational_sqrt(&self.norm_sqr())?;
        let two = BigRational::from_integer(BigInt::from(2));
        let x = rational_sqrt(&((&self.re + &norm) / &two))?;
        if x.is_zero() {
            return None;
        }
        let y = &self.im / &(&two * &x);
        let root = Self::new(x, y);
        (&root * &root == *self).then_some(root)
    }

    /// Compare `|z|^2` against `1` exactly: `Less`, `Equal`, or `Greater`.
    pub fn cmp_modulus_one(&self) -> std::cmp::Ordering {
        self.norm_sqr().cmp(&BigRational::one())
    }
}

/// Exact square root of a non-negative rational, if it is a perfect square.
fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    debug_assert!(!q.is_negative());
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

/// Panics on a zero divisor; library code uses [`GaussianRational::checked_div`].
impl Div for &GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        self.checked_div(rhs).expect("division by zero")
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);
forward_owned_binop!(Div, div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

/// Canonical, parseable rendering: `0`, `-1`, `1/2`, `i`, `-2*i`, `1-3/4*i`.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn imag_part(im: &BigRational) -> String {
            let a = im.abs();
            if a.is_one() {
                "i".to_string()
            } else {
                format!("{a}*i")
            }
        }
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            let sign = if self.im.is_negative() { "-" } else { "" };
            return write!(f, "{}{}", sign, imag_part(&self.im));
        }
        let sign = if self.im.is_negative() { "-" } else { "+" };
        write!(f, "{}{}{}", self.re, sign, imag_part(&self.im))
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        super::parse::parse_gaussian(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> GaussianRational {
        GaussianRational::new(
            BigRational::from_integer(BigInt::from(re)),
            BigRational::from_integer(BigInt::from(im)),
        )
    }

    #[test]
    fn conjugate_division() {
        // (1+i)/(1-i) = i, by multiplying through with the conjugate.
        let q = g(1, 1).checked_div(&g(1, -1)).unwrap();
        assert_eq!(q, GaussianRational::i());
    }

    #[test]
    fn inverse_of_zero_is_none() {
        assert_eq!(GaussianRational::zero().inv(), None);
        assert_eq!(g(0, 2).inv(), Some(GaussianRational::new(
            BigRational::zero(),
            BigRational::new(BigInt::from(-1), BigInt::from(2)),
        )));
    }

    #[test]
    fn powers() {
        assert_eq!(GaussianRational::i().powi(2).unwrap(), g(-1, 0));
        assert_eq!(GaussianRational::i().powi(-1).unwrap(), g(0, -1));
        assert_eq!(g(2, 0).powi(-2).unwrap(), GaussianRational::from_ratio(1, 4));
        assert_eq!(GaussianRational::zero().powi(-1), None);
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(g(4, 0).sqrt(), Some(g(2, 0)));
        assert_eq!(g(-4, 0).sqrt(), Some(g(0, 2)));
        assert_eq!(g(0, 2).sqrt(), Some(g(1, 1))); // (1+i)^2 = 2i
        assert_eq!(GaussianRational::from_ratio(9, 4).sqrt().unwrap(), GaussianRational::from_ratio(3, 2));
        assert_eq!(g(2, 0).sqrt(), None); // sqrt(2) is not rational
        assert_eq!(g(3, 4).sqrt(), Some(g(2, 1))); // (2+i)^2 = 3+4i
        assert_eq!(g(1, 1).sqrt(), None); // modulus sqrt(2) not rational
    }

    #[test]
    fn modulus_comparison() {
        use std::cmp::Ordering;
        assert_eq!(g(0, 1).cmp_modulus_one(), Ordering::Equal);
        assert_eq!(GaussianRational::from_ratio(1, 2).cmp_modulus_one(), Ordering::Less);
        assert_eq!(g(1, 1).cmp_modulus_one(), Ordering::Greater);
    }

    #[test]
    fn display_round_trips() {
        for z in [
            GaussianRational::zero(),
            g(-1, 0),
            GaussianRational::from_ratio(1, 2),
            GaussianRational::i(),
            -GaussianRational::i(),
            g(0, 2),
            g(1, 1),
            g(1, -2),
            GaussianRational::new(
                BigRational::new(BigInt::from(1), BigInt::from(2)),
                BigRational::new(BigInt::from(-3), BigInt::from(4)),
            ),
        ] {
            let text = z.to_string();
            let back = crate::scalar::parse::parse_gaussian(&text).unwrap();
            assert_eq!(back, z, "round-trip failed for `{text}`");
        }
    }
}
