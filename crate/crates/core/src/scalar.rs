//! Exact scalars: arbitrary-precision rationals and Gaussian rationals ℚ(i).

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Field operations used by the sparse linear algebra.
///
/// The reference-taking methods exist so that elimination loops can avoid
/// cloning big rationals on every step.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Div<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
{
    fn mul_ref(&self, other: &Self) -> Self;
    fn inv(&self) -> Self;
    /// Complex conjugate; the identity on real fields.
    fn conj(&self) -> Self;
}

impl Field for BigRational {
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn conj(&self) -> Self {
        self.clone()
    }
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Renders a rational as `p/q` with `q > 0`, always including the denominator.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

/// A Gaussian rational `re + im·i` with exact rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussScalar {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussScalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussScalar { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussScalar::new(int(re), int(im))
    }

    pub fn real(re: BigRational) -> Self {
        GaussScalar::new(re, BigRational::zero())
    }

    pub fn from_i64(v: i64) -> Self {
        GaussScalar::from_ints(v, 0)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussScalar::from_ints(0, 1)
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        GaussScalar::new(&self.re * r, &self.im * r)
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        GaussScalar::new(-self.im.clone(), self.re.clone())
    }

    pub fn to_complex(&self) -> num_complex::Complex64 {
        use num_traits::ToPrimitive;
        num_complex::Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    pub fn to_strings(&self) -> [String; 2] {
        [format_rational(&self.re), format_rational(&self.im)]
    }

    pub fn from_strings(re: &str, im: &str) -> Result<Self, Error> {
        Ok(GaussScalar::new(parse_rational(re)?, parse_rational(im)?))
    }
}

impl fmt::Debug for GaussScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GaussScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{}-{}i", self.re, -self.im.clone())
                } else {
                    write!(f, "{}+{}i", self.re, self.im)
                }
            }
        }
    }
}

// Lexicographic on (re, im); only used to give formal exponents a canonical order.
impl Ord for GaussScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

impl PartialOrd for GaussScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for GaussScalar {
    fn from(v: i64) -> Self {
        GaussScalar::from_i64(v)
    }
}

impl From<BigRational> for GaussScalar {
    fn from(v: BigRational) -> Self {
        GaussScalar::real(v)
    }
}

impl Zero for GaussScalar {
    fn zero() -> Self {
        GaussScalar::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussScalar {
    fn one() -> Self {
        GaussScalar::new(BigRational::one(), BigRational::zero())
    }
}

fn mul_parts(a: &GaussScalar, b: &GaussScalar) -> GaussScalar {
    if a.im.is_zero() && b.im.is_zero() {
        return GaussScalar::real(&a.re * &b.re);
    }
    GaussScalar::new(&a.re * &b.re - &a.im * &b.im, &a.re * &b.im + &a.im * &b.re)
}

fn inv_parts(a: &GaussScalar) -> GaussScalar {
    assert!(!a.is_zero(), "division by zero Gaussian rational");
    if a.im.is_zero() {
        return GaussScalar::real(a.re.recip());
    }
    let n = a.norm_sqr();
    GaussScalar::new(&a.re / &n, -(&a.im / &n))
}

impl Add for GaussScalar {
    type Output = GaussScalar;
    fn add(mut self, rhs: GaussScalar) -> GaussScalar {
        self += &rhs;
        self
    }
}

impl<'a> Add<&'a GaussScalar> for &'a GaussScalar {
    type Output = GaussScalar;
    fn add(self, rhs: &GaussScalar) -> GaussScalar {
        GaussScalar::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for GaussScalar {
    type Output = GaussScalar;
    fn sub(mut self, rhs: GaussScalar) -> GaussScalar {
        self -= &rhs;
        self
    }
}

impl<'a> Sub<&'a GaussScalar> for &'a GaussScalar {
    type Output = GaussScalar;
    fn sub(self, rhs: &GaussScalar) -> GaussScalar {
        GaussScalar::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for GaussScalar {
    type Output = GaussScalar;
    fn mul(self, rhs: GaussScalar) -> GaussScalar {
        mul_parts(&self, &rhs)
    }
}

impl<'a> Mul<&'a GaussScalar> for &'a GaussScalar {
    type Output = GaussScalar;
    fn mul(self, rhs: &GaussScalar) -> GaussScalar {
        mul_parts(self, rhs)
    }
}

impl Div for GaussScalar {
    type Output = GaussScalar;
    fn div(self, rhs: GaussScalar) -> GaussScalar {
        mul_parts(&self, &inv_parts(&rhs))
    }
}

impl<'a> Div<&'a GaussScalar> for &'a GaussScalar {
    type Output = GaussScalar;
    fn div(self, rhs: &GaussScalar) -> GaussScalar {
        mul_parts(self, &inv_parts(rhs))
    }
}

impl Neg for GaussScalar {
    type Output = GaussScalar;
    fn neg(self) -> GaussScalar {
        GaussScalar::new(-self.re, -self.im)
    }
}

impl Neg for &GaussScalar {
    type Output = GaussScalar;
    fn neg(self) -> GaussScalar {
        GaussScalar::new(-self.re.clone(), -self.im.clone())
    }
}

impl AddAssign<&GaussScalar> for GaussScalar {
    fn add_assign(&mut self, rhs: &GaussScalar) {
        self.re += &rhs.re;
        if !rhs.im.is_zero() {
            self.im += &rhs.im;
        }
    }
}

impl AddAssign for GaussScalar {
    fn add_assign(&mut self, rhs: GaussScalar) {
        *self += &rhs;
    }
}

impl SubAssign<&GaussScalar> for GaussScalar {
    fn sub_assign(&mut self, rhs: &GaussScalar) {
        self.re -= &rhs.re;
        if !rhs.im.is_zero() {
            self.im -= &rhs.im;
        }
    }
}

impl SubAssign for GaussScalar {
    fn sub_assign(&mut self, rhs: GaussScalar) {
        *self -= &rhs;
    }
}

impl MulAssign<&GaussScalar> for GaussScalar {
    fn mul_assign(&mut self, rhs: &GaussScalar) {
        *self = mul_parts(self, rhs);
    }
}

impl Sum for GaussScalar {
    fn sum<I: Iterator<Item = GaussScalar>>(iter: I) -> Self {
        iter.fold(GaussScalar::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl Product for GaussScalar {
    fn product<I: Iterator<Item = GaussScalar>>(iter: I) -> Self {
        iter.fold(GaussScalar::one(), |acc, x| acc * x)
    }
}

impl Field for GaussScalar {
    fn mul_ref(&self, other: &Self) -> Self {
        mul_parts(self, other)
    }
    fn inv(&self) -> Self {
        inv_parts(self)
    }
    fn conj(&self) -> Self {
        GaussScalar::new(self.re.clone(), -self.im.clone())
    }
}
