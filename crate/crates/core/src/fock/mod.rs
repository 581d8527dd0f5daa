//! The Heisenberg projective representation on coherent states.
//!
//! `E` is spanned by symbols `ε_ξ` for `ξ ∈ W_fin`, with
//! `⟨ε_ξ, ε_η⟩ = e^{2(ξ,η)_V}`. An element `v = v₊ + v₋` of `W ⊕ W̄` acts by
//! `ρ(v)ε_ξ = exp(−(v₊, v̄₋)_V − 2(ξ, v̄₋)_V)·ε_{ξ+v₊}`. Coordinates of `v₋`
//! are taken against the conjugate basis `w̄_a`, so `v̄₋` has coordinates
//! `conj(b)` over `w_a` and `(x, v̄₋)_V = xᵀ g b`.

mod formal;
mod truncated;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

pub use formal::FormalScalar;
pub use truncated::{
    invariant_functional_dim, loop_sector_dim, monomials_up_to, FockVector, InvarianceMode, InvariantSolution,
    SectorResult,
};

use crate::error::{Error, Result};
use crate::exterior::{sphere_wedge_d_pair, MeasureValue, PolyForm};
use crate::linalg::Matrix;
use crate::scalar::{Field, GaussScalar};
use crate::spectra::WBasis;

/// A finite-dimensional `W` with its Hermitian `( , )_V` Gram matrix and the
/// cross Gram `(w_a, w̄_b)_V` used when extending to `V_ℂ = W ⊕ W̄`.
#[derive(Clone, Debug)]
pub struct WFin {
    pub k: usize,
    pub max_level: usize,
    pub gram: Matrix<GaussScalar>,
    pub cross_gram: Matrix<GaussScalar>,
}

impl WFin {
    pub fn from_basis(w: &WBasis) -> Self {
        WFin { k: w.k, max_level: w.max_level(), gram: w.gram.clone(), cross_gram: w.cross_gram.clone() }
    }

    /// A model space with a given Gram and `W ⟂ W̄`.
    pub fn from_gram(gram: Matrix<GaussScalar>) -> Result<Self> {
        if !gram.is_hermitian() || !gram.is_positive_definite() {
            return Err(Error::Precondition("Gram matrix must be Hermitian positive definite".into()));
        }
        let m = gram.nrows();
        Ok(WFin { k: 0, max_level: 0, gram, cross_gram: Matrix::zeros(m, m) })
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    /// `(x, y)_V = xᵀ g ȳ`.
    pub fn inner(&self, x: &[GaussScalar], y: &[GaussScalar]) -> GaussScalar {
        let yb: Vec<GaussScalar> = y.iter().map(GaussScalar::conj).collect();
        dot(x, &self.gram.mul_vec(&yb))
    }

    /// `xᵀ g y`.
    pub fn bilinear(&self, x: &[GaussScalar], y: &[GaussScalar]) -> GaussScalar {
        dot(x, &self.gram.mul_vec(y))
    }

    /// The same space with Gram multiplied by a positive rational.
    pub fn rescaled(&self, factor: &GaussScalar) -> Result<Self> {
        if !factor.is_real() || factor.re <= num_rational::BigRational::zero() {
            return Err(Error::Precondition("rescaling factor must be a positive rational".into()));
        }
        Ok(WFin { gram: self.gram.scale(factor), cross_gram: self.cross_gram.scale(factor), ..self.clone() })
    }

    fn check(&self, v: &[GaussScalar]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::Structure(format!(
                "coordinate vector of length {} over a W basis of dimension {}",
                v.len(),
                self.dim()
            )));
        }
        Ok(())
    }
}

fn dot(x: &[GaussScalar], y: &[GaussScalar]) -> GaussScalar {
    x.iter().zip(y).map(|(a, b)| a.mul_ref(b)).sum()
}

fn add_vecs(x: &[GaussScalar], y: &[GaussScalar]) -> Vec<GaussScalar> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

/// A finite combination `Σ c_ξ ε_ξ` with formal-exponential coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CoherentVector {
    terms: BTreeMap<Vec<GaussScalar>, FormalScalar>,
}

impl CoherentVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The single symbol `ε_ξ`.
    pub fn epsilon(xi: Vec<GaussScalar>) -> Self {
        let mut out = Self::zero();
        out.add(xi, FormalScalar::one());
        out
    }

    pub fn add(&mut self, xi: Vec<GaussScalar>, c: FormalScalar) {
        let slot = self.terms.entry(xi.clone()).or_default();
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&xi);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<GaussScalar>, &FormalScalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &FormalScalar) -> Self {
        let mut out = Self::zero();
        for (xi, v) in &self.terms {
            out.add(xi.clone(), v * c);
        }
        out
    }
}

impl Serialize for CoherentVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            xi: Vec<[String; 2]>,
            c: &'a FormalScalar,
        }
        let terms: Vec<Term<'_>> =
            self.terms.iter().map(|(xi, c)| Term { xi: xi.iter().map(GaussScalar::to_strings).collect(), c }).collect();
        terms.serialize(s)
    }
}

/// `v₊ + v₋ ∈ W ⊕ W̄` with a central factor.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HeisenbergElement {
    /// Coordinates over `w_a`.
    pub v_plus: Vec<GaussScalar>,
    /// Coordinates over `w̄_a`.
    pub v_minus: Vec<GaussScalar>,
    pub central: FormalScalar,
}

impl HeisenbergElement {
    pub fn new(v_plus: Vec<GaussScalar>, v_minus: Vec<GaussScalar>) -> Self {
        HeisenbergElement { v_plus, v_minus, central: FormalScalar::one() }
    }

    pub fn zero(m: usize) -> Self {
        Self::new(vec![GaussScalar::zero(); m], vec![GaussScalar::zero(); m])
    }

    /// Sum of the underlying vectors with central factor 1.
    pub fn vector_sum(&self, other: &Self) -> Self {
        Self::new(add_vecs(&self.v_plus, &other.v_plus), add_vecs(&self.v_minus, &other.v_minus))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.v_plus.iter().map(|x| -x).collect(), self.v_minus.iter().map(|x| -x).collect())
    }
}

/// `⟨ε_ξ, ε_η⟩ = e^{2(ξ,η)_V}`.
pub fn gram_coherent(w: &WFin, xi: &[GaussScalar], eta: &[GaussScalar]) -> Result<FormalScalar> {
    w.check(xi)?;
    w.check(eta)?;
    Ok(FormalScalar::exp(w.inner(xi, eta).scale(&crate::scalar::int(2))))
}

/// Linear extension of the coherent-state action, times `v.central`.
pub fn rho_act(w: &WFin, v: &HeisenbergElement, u: &CoherentVector) -> Result<CoherentVector> {
    w.check(&v.v_plus)?;
    w.check(&v.v_minus)?;
    if v.central.is_zero() {
        return Err(Error::Precondition("central factor must be nonzero".into()));
    }
    let base = -&w.bilinear(&v.v_plus, &v.v_minus);
    let mut out = CoherentVector::zero();
    for (xi, c) in u.terms() {
        w.check(xi)?;
        let q = &base - &w.bilinear(xi, &v.v_minus).scale(&crate::scalar::int(2));
        let coeff = &c.shift(&q) * &v.central;
        out.add(add_vecs(xi, &v.v_plus), coeff);
    }
    Ok(out)
}

/// The multiplier `e^{√−1 (v, J v̄')_V}`, evaluated on `V_ℂ = W ⊕ W̄` with
/// its full Gram `[[g, h], [h*, ḡ]]` and `J = diag(√−1, −√−1)`.
pub fn multiplier(w: &WFin, v: &HeisenbergElement, v2: &HeisenbergElement) -> FormalScalar {
    let m = w.dim();
    let i = GaussScalar::i();
    // v as a vector in V_ℂ coordinates (W part, W̄ part)
    let left: Vec<GaussScalar> = v.v_plus.iter().chain(&v.v_minus).cloned().collect();
    // conj(v2): conj of x' sits on W̄, conj of b' on W
    let conj_w: Vec<GaussScalar> = v2.v_minus.iter().map(GaussScalar::conj).collect();
    let conj_wbar: Vec<GaussScalar> = v2.v_plus.iter().map(GaussScalar::conj).collect();
    let right: Vec<GaussScalar> =
        conj_w.iter().map(|x| x.mul_ref(&i)).chain(conj_wbar.iter().map(|x| -x.mul_ref(&i))).collect();
    let full = Matrix::from_fn(2 * m, 2 * m, |r, c| match (r < m, c < m) {
        (true, true) => w.gram[(r, c)].clone(),
        (true, false) => w.cross_gram[(r, c - m)].clone(),
        (false, true) => w.cross_gram[(c, r - m)].conj(),
        (false, false) => w.gram[(r - m, c - m)].conj(),
    });
    let rb: Vec<GaussScalar> = right.iter().map(GaussScalar::conj).collect();
    let inner = dot(&left, &full.mul_vec(&rb));
    FormalScalar::exp(inner.mul_ref(&i))
}

/// Ratio of `ρ(v)ρ(v′)u` to `e^{√−1(v,Jv̄′)_V}·ρ(v+v′)u`. Exactly 1 when the
/// projective relation holds on the probe.
pub fn projective_defect(
    w: &WFin,
    v: &HeisenbergElement,
    v2: &HeisenbergElement,
    probe: &CoherentVector,
) -> Result<FormalScalar> {
    let lhs = rho_act(w, v, &rho_act(w, v2, probe)?)?;
    let mut sum = v.vector_sum(v2);
    sum.central = &v.central * &v2.central;
    let rhs = rho_act(w, &sum, probe)?.scale(&multiplier(w, v, v2));
    if lhs.len() != rhs.len() || lhs.terms().zip(rhs.terms()).any(|((a, _), (b, _))| a != b) {
        return Err(Error::Structure("probe images have different supports".into()));
    }
    let mut ratio: Option<FormalScalar> = None;
    for ((_, a), (_, b)) in lhs.terms().zip(rhs.terms()) {
        let r = a.checked_div(b)?;
        match &ratio {
            None => ratio = Some(r),
            Some(prev) if *prev != r => return Err(Error::Invariant("ratio differs across the probe support".into())),
            Some(_) => {}
        }
    }
    Ok(ratio.unwrap_or_else(FormalScalar::one))
}

/// `∫_S α ∧ dβ` for restrictions of 2k-forms; the real-valued pairing,
/// without reduction mod ℤ.
pub fn cocycle_pairing(alpha: &PolyForm, beta: &PolyForm) -> Result<MeasureValue> {
    sphere_wedge_d_pair(alpha, beta)
}

/// `χ(u) = ⟨u, ε₀⟩ = Σ c_ξ`.
pub fn chi(u: &CoherentVector) -> FormalScalar {
    u.terms().fold(FormalScalar::zero(), |acc, (_, c)| &acc + c)
}

/// Numerical coherent Gram matrix `[e^{2(ξ_a, ξ_b)_V}]`.
pub fn coherent_gram_f64(w: &WFin, labels: &[Vec<GaussScalar>]) -> Result<DMatrix<Complex64>> {
    let mut out = DMatrix::from_element(labels.len(), labels.len(), Complex64::new(0.0, 0.0));
    for (a, xa) in labels.iter().enumerate() {
        for (b, xb) in labels.iter().enumerate() {
            out[(a, b)] = gram_coherent(w, xa, xb)?.to_complex();
        }
    }
    Ok(out)
}

/// Smallest eigenvalue of the numerical coherent Gram matrix.
pub fn coherent_gram_min_eigenvalue(w: &WFin, labels: &[Vec<GaussScalar>]) -> Result<f64> {
    let m = coherent_gram_f64(w, labels)?;
    let eig = m.symmetric_eigen();
    Ok(eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min))
}

impl FormalScalar {
    /// `true` for the value `1·e⁰`.
    pub fn is_unit_one(&self) -> bool {
        self.as_single().is_some_and(|(c, q)| *c == GaussScalar::one() && q.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> GaussScalar {
        GaussScalar::from_ints(re, im)
    }

    fn model() -> WFin {
        let gram = Matrix::from_rows(vec![vec![g(2, 0), g(0, 1)], vec![g(0, -1), g(3, 0)]]);
        WFin::from_gram(gram).unwrap()
    }

    #[test]
    fn coherent_gram_values() {
        let w = model();
        assert!(gram_coherent(&w, &[g(0, 0), g(0, 0)], &[g(0, 0), g(0, 0)]).unwrap().is_one());
        let e1 = [g(1, 0), g(0, 0)];
        assert_eq!(gram_coherent(&w, &e1, &e1).unwrap(), FormalScalar::exp(g(4, 0)));
        let a = [g(1, 2), g(-1, 0)];
        let b = [g(0, 1), g(3, -2)];
        let ab = gram_coherent(&w, &a, &b).unwrap();
        let ba = gram_coherent(&w, &b, &a).unwrap();
        assert_eq!(ab, ba.conj());
    }

    #[test]
    fn rho_examples() {
        let w = model();
        let xi = vec![g(1, -1), g(2, 0)];
        let eps = CoherentVector::epsilon(xi.clone());
        assert_eq!(rho_act(&w, &HeisenbergElement::zero(2), &eps).unwrap(), eps);
        let vp = vec![g(0, 1), g(1, 1)];
        let zero = vec![g(0, 0); 2];
        let plus = HeisenbergElement::new(vp.clone(), zero.clone());
        assert_eq!(
            rho_act(&w, &plus, &CoherentVector::epsilon(zero.clone())).unwrap(),
            CoherentVector::epsilon(vp.clone())
        );
        let minus = HeisenbergElement::new(zero.clone(), vp);
        let origin = CoherentVector::epsilon(zero);
        assert_eq!(rho_act(&w, &minus, &origin).unwrap(), origin);
    }

    #[test]
    fn projective_relation_examples() {
        let w = model();
        let wv = vec![g(1, 0), g(0, 2)];
        let zero = vec![g(0, 0); 2];
        let v = HeisenbergElement::new(wv.clone(), zero.clone());
        let v2 = HeisenbergElement::new(zero.clone(), wv.iter().map(GaussScalar::conj).collect());
        let probe = CoherentVector::epsilon(zero.clone());
        assert!(projective_defect(&w, &v, &v2, &probe).unwrap().is_unit_one());
        let full = HeisenbergElement::new(vec![g(1, 1), g(-2, 0)], vec![g(0, 3), g(1, -1)]);
        assert!(projective_defect(&w, &full, &full.neg(), &probe).unwrap().is_unit_one());
        // ρ(v)ρ(−v) is a scalar on probes
        let u = rho_act(&w, &full, &rho_act(&w, &full.neg(), &probe).unwrap()).unwrap();
        assert_eq!(u.len(), 1);
        assert_eq!(u.terms().next().unwrap().0, &zero);
    }

    #[test]
    fn chi_examples() {
        let w = model();
        let xi = vec![g(1, 0), g(0, 1)];
        let eta = vec![g(2, 0), g(0, 0)];
        assert!(chi(&CoherentVector::epsilon(xi.clone())).is_one());
        let mut u = CoherentVector::epsilon(xi.clone()).scale(&FormalScalar::constant(g(3, 0)));
        u.add(eta, FormalScalar::constant(g(-2, 0)));
        assert!(chi(&u).is_one());
        let plus = HeisenbergElement::new(vec![g(5, -1), g(0, 2)], vec![g(0, 0); 2]);
        assert_eq!(chi(&rho_act(&w, &plus, &u).unwrap()), chi(&u));
    }

    #[test]
    fn numerical_gram_is_positive() {
        let w = model();
        let labels =
            vec![vec![g(0, 0), g(0, 0)], vec![g(1, 0), g(0, 0)], vec![g(0, 0), g(0, 1)], vec![g(1, 1), g(-1, 0)]];
        assert!(coherent_gram_min_eigenvalue(&w, &labels).unwrap() > 0.0);
    }
}
