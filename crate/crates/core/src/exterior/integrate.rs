//! Closed-form integrals of polynomial forms over the unit sphere and ball.
//!
//! For even `n` every integral of a monomial is a rational multiple of
//! `π^{n/2}`; [`MeasureValue`] stores that rational (or Gaussian rational)
//! coefficient and keeps the transcendental factor symbolic.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{BasisKey, PolyForm};
use crate::error::{Error, Result};
use crate::scalar::{Field, GaussScalar};

/// An exact integral value `value · π^{n/2}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MeasureValue {
    pub value: GaussScalar,
    pub n: usize,
}

impl MeasureValue {
    pub fn zero(n: usize) -> Self {
        MeasureValue { value: GaussScalar::zero(), n }
    }

    pub fn new(value: GaussScalar, n: usize) -> Self {
        MeasureValue { value, n }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// `"pi^{n/2}"` with `n/2` substituted, e.g. `"pi^3"`.
    pub fn unit(&self) -> String {
        format!("pi^{}", self.n / 2)
    }

    pub fn conj(&self) -> Self {
        MeasureValue { value: self.value.conj(), n: self.n }
    }

    pub fn scale(&self, c: &GaussScalar) -> Self {
        MeasureValue { value: self.value.mul_ref(c), n: self.n }
    }

    /// Sign of a real value; `None` when the imaginary part is nonzero.
    pub fn real_sign(&self) -> Option<std::cmp::Ordering> {
        self.value.is_real().then(|| self.value.re.cmp(&BigRational::zero()))
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.value.re.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI.powi(self.n as i32 / 2)
    }
}

impl Add for MeasureValue {
    type Output = MeasureValue;
    fn add(mut self, rhs: MeasureValue) -> MeasureValue {
        assert_eq!(self.n, rhs.n, "adding measure values in different units");
        self.value += &rhs.value;
        self
    }
}

impl Sub for MeasureValue {
    type Output = MeasureValue;
    fn sub(mut self, rhs: MeasureValue) -> MeasureValue {
        assert_eq!(self.n, rhs.n, "subtracting measure values in different units");
        self.value -= &rhs.value;
        self
    }
}

impl Neg for MeasureValue {
    type Output = MeasureValue;
    fn neg(self) -> MeasureValue {
        MeasureValue { value: -self.value, n: self.n }
    }
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})·{}", self.value, self.unit())
    }
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    value: [String; 2],
    unit: String,
}

impl Serialize for MeasureValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureJson { value: self.value.to_strings(), unit: self.unit() }.serialize(s)
    }
}

fn factorial(k: u64) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

/// `Γ(m + 1/2) / √π = (2m)! / (4^m m!)`.
fn half_gamma_ratio(m: u64) -> BigRational {
    BigRational::new(factorial(2 * m), BigInt::from(4u32).pow(m as u32) * factorial(m))
}

/// `∫_{S^{n-1}} x^a dS / π^{n/2}` as a rational.
fn sphere_coefficient(exps: &[u16]) -> Option<BigRational> {
    let n = exps.len();
    if n % 2 == 1 {
        return None;
    }
    if exps.iter().any(|&a| a % 2 == 1) {
        return Some(BigRational::zero());
    }
    let mut prod = BigRational::from_integer(BigInt::from(2));
    let mut half_total = 0u64;
    for &a in exps {
        let m = (a / 2) as u64;
        prod *= half_gamma_ratio(m);
        half_total += m;
    }
    // Γ((|a| + n)/2) with (|a| + n)/2 a positive integer
    let s = half_total + (n / 2) as u64;
    Some(prod / BigRational::from_integer(factorial(s - 1)))
}

fn require_even(n: usize) -> Result<()> {
    if n % 2 == 1 {
        return Err(Error::Structure(format!("closed-form integrals need even dimension, got {n}")));
    }
    Ok(())
}

/// `∫_{S^{n-1}} x^a dS` in units of `π^{n/2}`.
pub fn sphere_monomial_integral(exps: &[u16]) -> Result<MeasureValue> {
    require_even(exps.len())?;
    let v = sphere_coefficient(exps).expect("even dimension");
    Ok(MeasureValue::new(GaussScalar::real(v), exps.len()))
}

/// `∫_{B^n} x^a dV = ∫_{S^{n-1}} x^a dS / (|a| + n)` in units of `π^{n/2}`.
pub fn ball_monomial_integral(exps: &[u16]) -> Result<MeasureValue> {
    require_even(exps.len())?;
    let total: u64 = exps.iter().map(|&a| a as u64).sum::<u64>() + exps.len() as u64;
    let v = sphere_coefficient(exps).expect("even dimension") / BigRational::from_integer(BigInt::from(total));
    Ok(MeasureValue::new(GaussScalar::real(v), exps.len()))
}

#[derive(Clone, Copy)]
enum Domain {
    Sphere,
    Ball,
}

fn monomial_integral(domain: Domain, exps: &[u16]) -> BigRational {
    let s = sphere_coefficient(exps).expect("even dimension checked by caller");
    match domain {
        Domain::Sphere => s,
        Domain::Ball => {
            let total: u64 = exps.iter().map(|&a| a as u64).sum::<u64>() + exps.len() as u64;
            s / BigRational::from_integer(BigInt::from(total))
        }
    }
}

/// Pointwise Hermitian inner product `Σ_I f_I · conj(g_I)` integrated over
/// the domain. Pairs of terms with unequal parity masks integrate to zero
/// and are skipped.
fn pointwise_inner(domain: Domain, a: &PolyForm, b: &PolyForm) -> Result<MeasureValue> {
    if a.n() != b.n() {
        return Err(Error::Structure(format!("forms on R^{} and R^{}", a.n(), b.n())));
    }
    if a.degree() != b.degree() {
        return Err(Error::Degree(format!("inner product of a {}-form with a {}-form", a.degree(), b.degree())));
    }
    require_even(a.n())?;
    let n = a.n();
    if let (Some(ma), Some(mb)) = (a.parity_mask(), b.parity_mask()) {
        if ma != mb {
            return Ok(MeasureValue::zero(n));
        }
    }
    let mut by_index: BTreeMap<&[u8], Vec<(&BasisKey, GaussScalar)>> = BTreeMap::new();
    for (k, v) in b.terms() {
        by_index.entry(k.indices.as_slice()).or_default().push((k, v.conj()));
    }
    let mut acc = GaussScalar::zero();
    let mut exps = vec![0u16; n];
    for (ka, va) in a.terms() {
        let Some(partners) = by_index.get(ka.indices.as_slice()) else {
            continue;
        };
        for (kb, vb) in partners {
            let mut odd = false;
            for (j, e) in exps.iter_mut().enumerate() {
                *e = ka.exps[j] + kb.exps[j];
                odd |= *e % 2 == 1;
            }
            if odd {
                continue;
            }
            let w = monomial_integral(domain, &exps);
            acc += &va.mul_ref(vb).scale(&w);
        }
    }
    Ok(MeasureValue::new(acc, n))
}

/// `(a, b)_{L²}` over the unit ball: Hermitian, conjugate-linear in `b`.
pub fn l2_inner_ball(a: &PolyForm, b: &PolyForm) -> Result<MeasureValue> {
    pointwise_inner(Domain::Ball, a, b)
}

/// L² inner product on the unit sphere of the restrictions of two tangential
/// forms (vanishing Euler contraction). For such forms the ambient pointwise
/// norm equals the norm of the pulled-back form.
pub fn sphere_l2_inner_tangential(a: &PolyForm, b: &PolyForm) -> Result<MeasureValue> {
    for (name, f) in [("first", a), ("second", b)] {
        if !f.is_tangential() {
            return Err(Error::Precondition(format!("{name} argument has nonzero Euler contraction")));
        }
    }
    pointwise_inner(Domain::Sphere, a, b)
}

/// [`sphere_l2_inner_tangential`] without re-checking tangentiality.
pub(crate) fn sphere_inner_unchecked(a: &PolyForm, b: &PolyForm) -> Result<MeasureValue> {
    pointwise_inner(Domain::Sphere, a, b)
}

/// Sphere L² inner product of the restrictions of arbitrary polynomial forms.
pub fn sphere_l2_inner(a: &PolyForm, b: &PolyForm) -> Result<MeasureValue> {
    let ta = if a.is_tangential() { a.clone() } else { a.tangential_part() };
    let tb = if b.is_tangential() { b.clone() } else { b.tangential_part() };
    pointwise_inner(Domain::Sphere, &ta, &tb)
}

/// `∫_{S^{n-1}} B ∧ dB₂` for forms of degree `(n−2)/2`, evaluated by Stokes
/// as `∫_{B^n} dB ∧ dB₂` with the sphere oriented as the boundary of the ball.
pub fn sphere_wedge_d_pair(b: &PolyForm, b2: &PolyForm) -> Result<MeasureValue> {
    if b.n() != b2.n() {
        return Err(Error::Structure(format!("forms on R^{} and R^{}", b.n(), b2.n())));
    }
    let n = b.n();
    require_even(n)?;
    if b.degree() != b2.degree() || 2 * b.degree() + 2 != n {
        return Err(Error::Degree(format!(
            "pairing needs two {}-forms on R^{n}, got degrees {} and {}",
            (n - 2) / 2,
            b.degree(),
            b2.degree()
        )));
    }
    let (db, db2) = (b.ext_d(), b2.ext_d());
    if let (Some(ma), Some(mb)) = (db.parity_mask(), db2.parity_mask()) {
        if ma ^ mb != (1u32 << n) - 1 {
            return Ok(MeasureValue::zero(n));
        }
    }
    let top = db.wedge(&db2)?;
    let mut acc = GaussScalar::zero();
    for (k, v) in top.terms() {
        let w = monomial_integral(Domain::Ball, &k.exps);
        if !w.is_zero() {
            acc += &v.scale(&w);
        }
    }
    Ok(MeasureValue::new(acc, n))
}

impl MeasureValue {
    /// Exact comparison `self ≥ 0` for real values.
    pub fn is_nonnegative(&self) -> bool {
        self.value.is_real() && !self.value.re.is_negative()
    }
}
