//! Polynomial-coefficient differential forms on ℝⁿ.
//!
//! A [`PolyForm`] is a finite sum `Σ c · x^a dx_I` with Gaussian-rational
//! coefficients. Coordinates and index sets are 0-based in the API and
//! 1-based in the JSON encoding.

mod integrate;
mod json;
mod ops;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Field, GaussScalar};

pub(crate) use integrate::sphere_inner_unchecked;
pub use integrate::{
    ball_monomial_integral, l2_inner_ball, sphere_l2_inner, sphere_l2_inner_tangential, sphere_monomial_integral,
    sphere_wedge_d_pair, MeasureValue,
};

/// One basis element `x^a dx_I` of the polynomial forms.
///
/// Ordering is lexicographic on `(indices, exps)`, which is also the order
/// of terms in the canonical JSON encoding.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BasisKey {
    /// Strictly increasing, 0-based.
    pub indices: Vec<u8>,
    /// Exponent vector of length `n`.
    pub exps: Vec<u16>,
}

impl BasisKey {
    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    /// Bit `j` is the parity of `a_j + [j ∈ I]`. Every flat operator in this
    /// module either preserves this mask (d, d*, Δ, Euler contraction) or
    /// complements it (Hodge star).
    pub fn parity_mask(&self) -> u32 {
        let mut mask = 0u32;
        for (j, &e) in self.exps.iter().enumerate() {
            if e % 2 == 1 {
                mask ^= 1 << j;
            }
        }
        for &j in &self.indices {
            mask ^= 1 << j;
        }
        mask
    }
}

/// A differential form of fixed degree `p` on ℝⁿ with polynomial coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyForm {
    n: usize,
    p: usize,
    terms: BTreeMap<BasisKey, GaussScalar>,
}

impl PolyForm {
    pub fn zero(n: usize, p: usize) -> Self {
        assert!(p <= n, "form degree {p} exceeds dimension {n}");
        assert!(n <= 32, "dimension {n} too large");
        PolyForm { n, p, terms: BTreeMap::new() }
    }

    /// `coeff · x^exps dx_{indices}`; `indices` need not be sorted.
    pub fn monomial(n: usize, exps: &[u16], indices: &[usize], coeff: GaussScalar) -> Result<Self> {
        if exps.len() != n {
            return Err(Error::Structure(format!("exponent vector of length {} in dimension {n}", exps.len())));
        }
        let mut sorted: Vec<usize> = indices.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Ok(PolyForm::zero(n, indices.len()));
        }
        if sorted.last().is_some_and(|&j| j >= n) {
            return Err(Error::Structure(format!("index out of range for dimension {n}")));
        }
        let sign = permutation_sign(indices);
        let mut out = PolyForm::zero(n, indices.len());
        let key = BasisKey { indices: sorted.into_iter().map(|j| j as u8).collect(), exps: exps.to_vec() };
        out.add_term(key, if sign { -coeff } else { coeff });
        Ok(out)
    }

    pub fn from_key(n: usize, key: BasisKey, coeff: GaussScalar) -> Self {
        let mut out = PolyForm::zero(n, key.indices.len());
        out.add_term(key, coeff);
        out
    }

    /// The constant 0-form `c`.
    pub fn constant(n: usize, c: GaussScalar) -> Self {
        PolyForm::from_key(n, BasisKey { indices: vec![], exps: vec![0; n] }, c)
    }

    /// The coordinate function `x_j` (0-based).
    pub fn coord(n: usize, j: usize) -> Self {
        let mut exps = vec![0; n];
        exps[j] = 1;
        PolyForm::from_key(n, BasisKey { indices: vec![], exps }, GaussScalar::one())
    }

    /// The coordinate 1-form `dx_j` (0-based).
    pub fn dx(n: usize, j: usize) -> Self {
        PolyForm::from_key(n, BasisKey { indices: vec![j as u8], exps: vec![0; n] }, GaussScalar::one())
    }

    /// `|x|² = Σ x_j²` as a 0-form.
    pub fn radius_squared(n: usize) -> Self {
        let mut out = PolyForm::zero(n, 0);
        for j in 0..n {
            let mut exps = vec![0; n];
            exps[j] = 2;
            out.add_term(BasisKey { indices: vec![], exps }, GaussScalar::one());
        }
        out
    }

    /// The radial 1-form `Σ x_j dx_j = d(|x|²/2)`.
    pub fn radial_form(n: usize) -> Self {
        let mut out = PolyForm::zero(n, 1);
        for j in 0..n {
            let mut exps = vec![0; n];
            exps[j] = 1;
            out.add_term(BasisKey { indices: vec![j as u8], exps }, GaussScalar::one());
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisKey, &GaussScalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &BasisKey) -> GaussScalar {
        self.terms.get(key).cloned().unwrap_or_else(GaussScalar::zero)
    }

    /// Adds `c · key`, dropping the entry if it cancels.
    pub fn add_term(&mut self, key: BasisKey, c: GaussScalar) {
        debug_assert_eq!(key.indices.len(), self.p);
        debug_assert_eq!(key.exps.len(), self.n);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(slot) => {
                *slot += &c;
                if slot.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    /// Common polynomial degree of all terms; `None` for the zero form or a
    /// mixed-degree form.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(BasisKey::degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Common parity mask of all terms (see [`BasisKey::parity_mask`]).
    pub fn parity_mask(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(BasisKey::parity_mask);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(GaussScalar::is_real)
    }

    pub fn scale(&self, c: &GaussScalar) -> PolyForm {
        let mut out = PolyForm::zero(self.n, self.p);
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.terms {
            out.terms.insert(k.clone(), v.mul_ref(c));
        }
        out
    }

    pub fn conj(&self) -> PolyForm {
        PolyForm { n: self.n, p: self.p, terms: self.terms.iter().map(|(k, v)| (k.clone(), v.conj())).collect() }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, c: &GaussScalar, other: &PolyForm) {
        assert_eq!((self.n, self.p), (other.n, other.p), "form shape mismatch in sum");
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v.mul_ref(c));
        }
    }

    /// `Σ c_j · forms_j`.
    pub fn linear_combination<'a>(
        n: usize,
        p: usize,
        items: impl IntoIterator<Item = (&'a GaussScalar, &'a PolyForm)>,
    ) -> PolyForm {
        let mut out = PolyForm::zero(n, p);
        for (c, f) in items {
            out.add_scaled(c, f);
        }
        out
    }

    /// Graded-commutative exterior product.
    pub fn wedge(&self, other: &PolyForm) -> Result<PolyForm> {
        if self.n != other.n {
            return Err(Error::Structure(format!("wedge of forms on R^{} and R^{}", self.n, other.n)));
        }
        if self.p + other.p > self.n {
            return Err(Error::Degree(format!("wedge degree {} exceeds dimension {}", self.p + other.p, self.n)));
        }
        let mut out = PolyForm::zero(self.n, self.p + other.p);
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                let Some((indices, negate)) = merge_indices(&ka.indices, &kb.indices) else {
                    continue;
                };
                let exps = ka.exps.iter().zip(&kb.exps).map(|(a, b)| a + b).collect();
                let c = va.mul_ref(vb);
                out.add_term(BasisKey { indices, exps }, if negate { -c } else { c });
            }
        }
        Ok(out)
    }

    /// Multiplies every coefficient by the polynomial 0-form `f`.
    pub fn mul_function(&self, f: &PolyForm) -> PolyForm {
        assert_eq!(f.p, 0, "mul_function expects a 0-form");
        f.wedge(self).expect("0-form product cannot overflow the degree")
    }
}

/// `true` when the permutation sorting `indices` is odd.
fn permutation_sign(indices: &[usize]) -> bool {
    let mut inversions = 0usize;
    for a in 0..indices.len() {
        for b in a + 1..indices.len() {
            if indices[a] > indices[b] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

/// Sorted union of disjoint index sets and whether `dx_I ∧ dx_J` picks up a sign.
pub(crate) fn merge_indices(a: &[u8], b: &[u8]) -> Option<(Vec<u8>, bool)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut swaps = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            // b[j] jumps over the remaining a-indices
            swaps += a.len() - i;
            out.push(b[j]);
            j += 1;
        } else {
            return None;
        }
    }
    Some((out, swaps % 2 == 1))
}

impl Add<&PolyForm> for &PolyForm {
    type Output = PolyForm;
    fn add(self, rhs: &PolyForm) -> PolyForm {
        let mut out = self.clone();
        out.add_scaled(&GaussScalar::one(), rhs);
        out
    }
}

impl Sub<&PolyForm> for &PolyForm {
    type Output = PolyForm;
    fn sub(self, rhs: &PolyForm) -> PolyForm {
        let mut out = self.clone();
        out.add_scaled(&-GaussScalar::one(), rhs);
        out
    }
}

impl Neg for &PolyForm {
    type Output = PolyForm;
    fn neg(self) -> PolyForm {
        self.scale(&-GaussScalar::one())
    }
}

impl fmt::Debug for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (t, (k, v)) in self.terms.iter().enumerate() {
            if t > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({v})")?;
            for (j, &e) in k.exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "·x{}", j + 1)?,
                    _ => write!(f, "·x{}^{e}", j + 1)?,
                }
            }
            for (pos, &j) in k.indices.iter().enumerate() {
                write!(f, "{}dx{}", if pos == 0 { " " } else { "∧" }, j + 1)?;
            }
        }
        Ok(())
    }
}

/// Iterates exponent vectors of length `n` and total degree `d` in
/// descending lexicographic order.
pub fn monomials(n: usize, d: u32) -> Vec<Vec<u16>> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if n == 1 {
            prefix.push(d as u16);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=d).rev() {
            prefix.push(a as u16);
            rec(n - 1, d - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(vec![]);
        }
        return out;
    }
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// All strictly increasing index sets of size `p` in `0..n`, lexicographic.
pub fn index_sets(n: usize, p: usize) -> Vec<Vec<u8>> {
    fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j as u8);
            rec(j + 1, n, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, p, &mut Vec::new(), &mut out);
    out
}

/// The monomial basis of `P^p_i` (degree-`i` coefficients, degree-`p`
/// forms on ℝⁿ) in canonical `(I, a)` order.
pub fn basis_keys(n: usize, p: usize, i: u32) -> Vec<BasisKey> {
    let mons = monomials(n, i);
    let mut out: Vec<BasisKey> = index_sets(n, p)
        .into_iter()
        .flat_map(|indices| mons.iter().map(move |exps| BasisKey { indices: indices.clone(), exps: exps.clone() }))
        .collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(v: i64) -> GaussScalar {
        GaussScalar::from_i64(v)
    }

    #[test]
    fn wedge_basis_and_anticommutativity() {
        let n = 2;
        let dx1 = PolyForm::dx(n, 0);
        let dx2 = PolyForm::dx(n, 1);
        let vol = PolyForm::monomial(n, &[0, 0], &[0, 1], g(1)).unwrap();
        assert_eq!(dx1.wedge(&dx2).unwrap(), vol);
        assert_eq!(dx2.wedge(&dx1).unwrap(), -&vol);
        assert!(dx1.wedge(&dx1).unwrap().is_zero());
    }

    #[test]
    fn wedge_is_bilinear_in_coefficients() {
        let n = 2;
        let a = PolyForm::coord(n, 0).wedge(&PolyForm::dx(n, 0)).unwrap();
        let b = PolyForm::coord(n, 1).wedge(&PolyForm::dx(n, 1)).unwrap();
        let expected = PolyForm::monomial(n, &[1, 1], &[0, 1], g(1)).unwrap();
        assert_eq!(a.wedge(&b).unwrap(), expected);
    }

    #[test]
    fn wedge_errors() {
        let a = PolyForm::dx(2, 0);
        let b = PolyForm::dx(3, 0);
        assert!(matches!(a.wedge(&b), Err(Error::Structure(_))));
        let vol = PolyForm::monomial(2, &[0, 0], &[0, 1], g(1)).unwrap();
        assert!(matches!(vol.wedge(&a), Err(Error::Degree(_))));
    }

    #[test]
    fn monomial_constructor_sorts_with_sign() {
        let f = PolyForm::monomial(3, &[0, 0, 0], &[2, 0], g(1)).unwrap();
        let h = PolyForm::monomial(3, &[0, 0, 0], &[0, 2], g(-1)).unwrap();
        assert_eq!(f, h);
        assert!(PolyForm::monomial(3, &[0, 0, 0], &[1, 1], g(1)).unwrap().is_zero());
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(basis_keys(2, 0, 1).len(), 2);
        assert_eq!(basis_keys(6, 2, 1).len(), 90);
        assert_eq!(basis_keys(2, 1, 0).len(), 2);
        assert_eq!(basis_keys(6, 2, 3).len(), 840);
    }

    #[test]
    fn homogeneity_and_parity() {
        let f = &PolyForm::coord(2, 0) + &PolyForm::radius_squared(2);
        assert_eq!(f.homogeneous_degree(), None);
        assert_eq!(PolyForm::radius_squared(2).homogeneous_degree(), Some(2));
        assert_eq!(PolyForm::radial_form(4).parity_mask(), Some(0));
    }
}
