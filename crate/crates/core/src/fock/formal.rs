use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Field, GaussScalar};

/// An exact element `Σ c_j·e^{q_j}` of the group ring of `(ℚ(i), +)`.
///
/// Exponentials of distinct algebraic numbers are linearly independent over
/// the algebraic numbers, so comparing the `(q, c)` terms decides equality of
/// the complex values.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FormalScalar {
    terms: BTreeMap<GaussScalar, GaussScalar>,
}

impl FormalScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussScalar::one())
    }

    pub fn constant(c: GaussScalar) -> Self {
        Self::term(c, GaussScalar::zero())
    }

    /// `e^q`.
    pub fn exp(q: GaussScalar) -> Self {
        Self::term(GaussScalar::one(), q)
    }

    /// `c·e^q`.
    pub fn term(c: GaussScalar, q: GaussScalar) -> Self {
        let mut out = Self::zero();
        out.add_term(q, c);
        out
    }

    fn add_term(&mut self, q: GaussScalar, c: GaussScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&q) {
            Some(slot) => {
                *slot += &c;
                if slot.is_zero() {
                    self.terms.remove(&q);
                }
            }
            None => {
                self.terms.insert(q, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// `(c, q)` pairs in increasing order of `q`.
    pub fn terms(&self) -> impl Iterator<Item = (&GaussScalar, &GaussScalar)> {
        self.terms.iter().map(|(q, c)| (c, q))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The single `(c, q)` term, if there is exactly one.
    pub fn as_single(&self) -> Option<(&GaussScalar, &GaussScalar)> {
        (self.terms.len() == 1).then(|| self.terms()).and_then(|mut it| it.next())
    }

    pub fn scale(&self, c: &GaussScalar) -> Self {
        let mut out = Self::zero();
        for (q, v) in &self.terms {
            out.add_term(q.clone(), v.mul_ref(c));
        }
        out
    }

    /// Multiplies by `e^q`.
    pub fn shift(&self, q: &GaussScalar) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (e + q, c.clone())).collect() }
    }

    /// Complex conjugate of the represented value.
    pub fn conj(&self) -> Self {
        Self { terms: self.terms.iter().map(|(q, c)| (q.conj(), c.conj())).collect() }
    }

    /// Quotient by a single-term divisor.
    pub fn checked_div(&self, divisor: &FormalScalar) -> Result<Self> {
        let (c, q) =
            divisor.as_single().ok_or_else(|| Error::Structure("division by a multi-term formal scalar".into()))?;
        Ok(self.shift(&-q).scale(&c.inv()))
    }

    /// Numerical value; only meaningful for modest exponents.
    pub fn to_complex(&self) -> num_complex::Complex64 {
        self.terms.iter().map(|(q, c)| c.to_complex() * q.to_complex().exp()).sum()
    }
}

impl Add for &FormalScalar {
    type Output = FormalScalar;
    fn add(self, rhs: &FormalScalar) -> FormalScalar {
        let mut out = self.clone();
        for (q, c) in &rhs.terms {
            out.add_term(q.clone(), c.clone());
        }
        out
    }
}

impl Add for FormalScalar {
    type Output = FormalScalar;
    fn add(self, rhs: FormalScalar) -> FormalScalar {
        &self + &rhs
    }
}

impl Mul for &FormalScalar {
    type Output = FormalScalar;
    // exponents add under multiplication
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &FormalScalar) -> FormalScalar {
        let mut out = FormalScalar::zero();
        for (qa, ca) in &self.terms {
            for (qb, cb) in &rhs.terms {
                out.add_term(qa + qb, ca.mul_ref(cb));
            }
        }
        out
    }
}

impl Mul for FormalScalar {
    type Output = FormalScalar;
    fn mul(self, rhs: FormalScalar) -> FormalScalar {
        &self * &rhs
    }
}

impl Neg for &FormalScalar {
    type Output = FormalScalar;
    fn neg(self) -> FormalScalar {
        self.scale(&-GaussScalar::one())
    }
}

impl fmt::Debug for FormalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FormalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (t, (q, c)) in self.terms.iter().enumerate() {
            if t > 0 {
                write!(f, " + ")?;
            }
            if q.is_zero() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})·e^({q})")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    c: [String; 2],
    q: [String; 2],
}

impl Serialize for FormalScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermJson> =
            self.terms.iter().map(|(q, c)| TermJson { c: c.to_strings(), q: q.to_strings() }).collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FormalScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<TermJson>::deserialize(d)?;
        let mut out = FormalScalar::zero();
        for t in terms {
            let c = GaussScalar::from_strings(&t.c[0], &t.c[1]).map_err(serde::de::Error::custom)?;
            let q = GaussScalar::from_strings(&t.q[0], &t.q[1]).map_err(serde::de::Error::custom)?;
            out.add_term(q, c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> GaussScalar {
        GaussScalar::from_ints(re, im)
    }

    #[test]
    fn merging_and_cancellation() {
        let a = FormalScalar::term(g(2, 0), g(1, 1));
        let b = FormalScalar::term(g(-2, 0), g(1, 1));
        assert!((&a + &b).is_zero());
        let c = &a + &FormalScalar::term(g(3, 0), g(1, 1));
        assert_eq!(c.len(), 1);
        assert_eq!(c.as_single().unwrap().0, &g(5, 0));
    }

    #[test]
    fn products_add_exponents() {
        let a = FormalScalar::exp(g(1, 0));
        let b = FormalScalar::exp(g(0, 2));
        assert_eq!(&a * &b, FormalScalar::exp(g(1, 2)));
        assert!((&a * &FormalScalar::exp(g(-1, 0))).is_one());
    }

    #[test]
    fn division_and_conjugation() {
        let a = FormalScalar::term(g(3, 1), g(2, -1));
        assert!(a.checked_div(&a).unwrap().is_one());
        let two = &FormalScalar::one() + &FormalScalar::exp(g(1, 0));
        assert!(a.checked_div(&two).is_err());
        assert_eq!(a.conj(), FormalScalar::term(g(3, -1), g(2, 1)));
    }

    #[test]
    fn json_round_trip() {
        let a = &FormalScalar::term(g(1, 0), g(0, 0)) + &FormalScalar::term(g(0, -1), g(2, 0));
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"[{"c":["1/1","0/1"],"q":["0/1","0/1"]},{"c":["0/1","-1/1"],"q":["2/1","0/1"]}]"#);
        assert_eq!(serde_json::from_str::<FormalScalar>(&s).unwrap(), a);
    }
}
