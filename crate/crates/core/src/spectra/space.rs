use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{basis_keys, BasisKey, PolyForm};
use crate::linalg::{kernel, row_space_rref, SparseVec};
use crate::scalar::GaussScalar;

/// `n = 4k + 2`.
pub fn ambient_dim(k: usize) -> usize {
    4 * k + 2
}

fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    (0..r).fold(1u64, |acc, j| acc * (n - j) / (j + 1))
}

/// `2·C(4k+i, 2k)·C(2k+i−1, 2k)`, the expected dimension of `''H^{2k}_i`.
pub fn hpp_dim_formula(k: usize, i: usize) -> usize {
    if i == 0 {
        return 0;
    }
    let (k, i) = (k as u64, i as u64);
    (2 * binomial(4 * k + i, 2 * k) * binomial(2 * k + i - 1, 2 * k)) as usize
}

/// A subspace of `P^p_i` with a basis in reduced echelon form with respect
/// to the canonical `(I, a)` monomial order.
#[derive(Clone, Debug, Serialize)]
pub struct FormSpace {
    n: usize,
    p: usize,
    i: u32,
    basis: Vec<PolyForm>,
    #[serde(skip)]
    pivots: Vec<BasisKey>,
}

impl FormSpace {
    /// Canonicalises an arbitrary spanning family.
    pub fn from_spanning(n: usize, p: usize, i: u32, forms: &[PolyForm]) -> Result<Self> {
        let keys = basis_keys(n, p, i);
        let index: HashMap<&BasisKey, usize> = keys.iter().enumerate().map(|(j, k)| (k, j)).collect();
        let mut rows = Vec::with_capacity(forms.len());
        for f in forms {
            if f.n() != n || f.degree() != p {
                return Err(Error::Structure(format!(
                    "form of shape ({}, {}) in a space of shape ({n}, {p})",
                    f.n(),
                    f.degree()
                )));
            }
            let mut pairs = Vec::with_capacity(f.len());
            for (k, v) in f.terms() {
                let Some(&j) = index.get(k) else {
                    return Err(Error::Degree(format!("term of coefficient degree {} in P^{p}_{i}", k.degree())));
                };
                pairs.push((j, v.clone()));
            }
            rows.push(SparseVec::from_pairs(pairs));
        }
        let rref = row_space_rref(&rows, keys.len());
        Ok(Self::from_rref_rows(n, p, i, &keys, rref))
    }

    fn from_rref_rows(n: usize, p: usize, i: u32, keys: &[BasisKey], rows: Vec<SparseVec<GaussScalar>>) -> Self {
        let mut basis = Vec::with_capacity(rows.len());
        let mut pivots = Vec::with_capacity(rows.len());
        for r in rows {
            let mut f = PolyForm::zero(n, p);
            for (j, v) in r.entries() {
                f.add_term(keys[*j].clone(), v.clone());
            }
            pivots.push(keys[r.leading().expect("nonzero row")].clone());
            basis.push(f);
        }
        FormSpace { n, p, i, basis, pivots }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn i(&self) -> u32 {
        self.i
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[PolyForm] {
        &self.basis
    }

    /// Coordinates of `f` in the echelon basis, or `None` when `f` lies
    /// outside the space.
    pub fn coordinates(&self, f: &PolyForm) -> Option<Vec<GaussScalar>> {
        if f.n() != self.n || f.degree() != self.p {
            return None;
        }
        let coords: Vec<GaussScalar> = self.pivots.iter().map(|k| f.coefficient(k)).collect();
        let rebuilt = self.combine(&coords);
        (&rebuilt == f).then_some(coords)
    }

    pub fn contains(&self, f: &PolyForm) -> bool {
        self.coordinates(f).is_some()
    }

    /// `Σ c_j · basis_j`.
    pub fn combine(&self, coords: &[GaussScalar]) -> PolyForm {
        assert_eq!(coords.len(), self.dim());
        PolyForm::linear_combination(self.n, self.p, coords.iter().zip(&self.basis))
    }
}

type LinearMap<'a> = &'a (dyn Fn(&PolyForm) -> PolyForm + Sync);

/// Kernel of the stacked linear maps on `span(basis)`, as coordinate vectors
/// in reduced echelon form.
pub fn kernel_of_maps(basis: &[PolyForm], maps: &[LinearMap<'_>]) -> Vec<SparseVec<GaussScalar>> {
    let images: Vec<Vec<PolyForm>> = basis.par_iter().map(|b| maps.iter().map(|m| m(b)).collect()).collect();
    let mut row_index: BTreeMap<(usize, &BasisKey), usize> = BTreeMap::new();
    let mut entries: Vec<Vec<(usize, GaussScalar)>> = Vec::new();
    for (col, imgs) in images.iter().enumerate() {
        for (which, img) in imgs.iter().enumerate() {
            for (key, v) in img.terms() {
                let next = entries.len();
                let r = *row_index.entry((which, key)).or_insert(next);
                if r == next {
                    entries.push(Vec::new());
                }
                entries[r].push((col, v.clone()));
            }
        }
    }
    let rows: Vec<SparseVec<GaussScalar>> = entries.into_iter().map(SparseVec::from_pairs).collect();
    kernel(&rows, basis.len())
}

fn check_shape(k: usize, p: usize) -> Result<usize> {
    let n = ambient_dim(k);
    if p > n {
        return Err(Error::Degree(format!("form degree {p} exceeds dimension {n}")));
    }
    Ok(n)
}

fn monomial_space(n: usize, p: usize, i: u32) -> (Vec<BasisKey>, Vec<PolyForm>) {
    let keys = basis_keys(n, p, i);
    let forms = keys.iter().map(|k| PolyForm::from_key(n, k.clone(), GaussScalar::one())).collect();
    (keys, forms)
}

/// Kernel of `maps` on the full monomial space; the kernel RREF in monomial
/// coordinates is already canonical.
fn kernel_on_monomials(n: usize, p: usize, i: u32, maps: &[LinearMap<'_>]) -> FormSpace {
    let (keys, forms) = monomial_space(n, p, i);
    let ker = kernel_of_maps(&forms, maps);
    FormSpace::from_rref_rows(n, p, i, &keys, ker)
}

/// Kernel of `maps` inside an existing space, re-canonicalised.
fn kernel_within(space: &FormSpace, maps: &[LinearMap<'_>]) -> FormSpace {
    let ker = kernel_of_maps(space.basis(), maps);
    let forms: Vec<PolyForm> = ker.iter().map(|v| space.combine(&v.to_dense(space.dim()))).collect();
    FormSpace::from_spanning(space.n, space.p, space.i, &forms).expect("subspace of a valid space")
}

/// `P^p_i` on ℝ^{4k+2} with its monomial basis.
pub fn build_ppi(k: usize, p: usize, i: u32) -> Result<FormSpace> {
    let n = check_shape(k, p)?;
    let (keys, forms) = monomial_space(n, p, i);
    Ok(FormSpace { n, p, i, basis: forms, pivots: keys })
}

/// `H^p_i = ker Δ ∩ ker d* ∩ P^p_i`.
pub fn build_hpi(k: usize, p: usize, i: u32) -> Result<FormSpace> {
    let n = check_shape(k, p)?;
    Ok(kernel_on_monomials(n, p, i, &[&PolyForm::laplacian, &PolyForm::codiff]))
}

/// `('H^p_i, ''H^p_i)`: the closed and the tangential (Euler-contraction-free)
/// subspaces of `H^p_i`.
pub fn build_hpp_primes(k: usize, p: usize, i: u32) -> Result<(FormSpace, FormSpace)> {
    let h = build_hpi(k, p, i)?;
    let closed = kernel_within(&h, &[&PolyForm::ext_d]);
    let tangential = kernel_within(&h, &[&PolyForm::euler_contract]);
    Ok((closed, tangential))
}

/// `''H^p_i` computed in one pass on `P^p_i`; agrees with the second
/// component of [`build_hpp_primes`].
pub fn build_hpp_second(k: usize, p: usize, i: u32) -> Result<FormSpace> {
    let n = check_shape(k, p)?;
    Ok(kernel_on_monomials(n, p, i, &[&PolyForm::laplacian, &PolyForm::codiff, &PolyForm::euler_contract]))
}

impl FormSpace {
    /// `true` when every basis element is annihilated by `op`.
    pub fn annihilated_by(&self, op: impl Fn(&PolyForm) -> PolyForm + Sync) -> bool {
        self.basis.par_iter().all(|b| op(b).is_zero())
    }

    pub fn is_real(&self) -> bool {
        self.basis.iter().all(PolyForm::is_real)
    }

    pub(crate) fn zero_coords(&self) -> Vec<GaussScalar> {
        vec![GaussScalar::zero(); self.dim()]
    }
}
