use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::space::{ambient_dim, build_hpp_second, hpp_dim_formula, kernel_of_maps, FormSpace};
use crate::error::{Error, Result};
use crate::exterior::{sphere_inner_unchecked, sphere_wedge_d_pair, PolyForm};
use crate::linalg::{is_scalar_matrix, Matrix};
use crate::scalar::{Field, GaussScalar};

/// Chiral and antichiral halves of a level, as coordinates in the level's
/// real echelon basis together with the corresponding forms.
#[derive(Clone, Debug)]
pub struct ChiralSplit {
    pub chiral_coords: Vec<Vec<GaussScalar>>,
    pub antichiral_coords: Vec<Vec<GaussScalar>>,
    pub chiral_forms: Vec<PolyForm>,
    pub antichiral_forms: Vec<PolyForm>,
}

/// The eigenlevel `V_{λ_i}` represented by `''H^{2k}_i`.
///
/// `gram` is the sphere L² Gram matrix of the basis in units of `π^{n/2}`,
/// `pairing` holds `A_ab = ∫_S B_a ∧ dB_b`, and `jtilde` is the matrix `M`
/// with `G·M = A`, so that `J̃ B_b = Σ_c M_cb B_c`.
#[derive(Clone, Debug)]
pub struct EigenLevel {
    pub k: usize,
    pub i: usize,
    pub lambda: u64,
    pub space: FormSpace,
    pub gram: Matrix<GaussScalar>,
    pub pairing: Matrix<GaussScalar>,
    pub jtilde: Matrix<GaussScalar>,
    pub split: Option<ChiralSplit>,
}

impl EigenLevel {
    /// `√λ = 2k + i`.
    pub fn sqrt_lambda(&self) -> u64 {
        (2 * self.k + self.i) as u64
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn n(&self) -> usize {
        ambient_dim(self.k)
    }

    /// Gram matrix of `( , )_V = √λ · L²`.
    pub fn gram_v(&self) -> Matrix<GaussScalar> {
        self.gram.scale(&GaussScalar::from_i64(self.sqrt_lambda() as i64))
    }

    /// `J = J̃ / √λ`.
    pub fn j_matrix(&self) -> Matrix<GaussScalar> {
        let inv = GaussScalar::from_i64(self.sqrt_lambda() as i64).inv();
        self.jtilde.scale(&inv)
    }

    /// Panics unless [`chiral_split`] has been applied.
    pub fn split(&self) -> &ChiralSplit {
        self.split.as_ref().expect("chiral split not computed for this level")
    }

    /// `xᵀ G ȳ` for coordinate vectors in the level basis.
    pub fn l2_coords(&self, x: &[GaussScalar], y: &[GaussScalar]) -> GaussScalar {
        let yb: Vec<GaussScalar> = y.iter().map(GaussScalar::conj).collect();
        let gy = self.gram.mul_vec(&yb);
        x.iter().zip(&gy).map(|(a, b)| a.mul_ref(b)).sum()
    }

    /// `(x, y)_V` in coordinates.
    pub fn v_coords(&self, x: &[GaussScalar], y: &[GaussScalar]) -> GaussScalar {
        self.l2_coords(x, y).scale(&crate::scalar::int(self.sqrt_lambda() as i64))
    }

    /// Coordinates of `J̃ f` given coordinates of `f`.
    pub fn apply_jtilde(&self, x: &[GaussScalar]) -> Vec<GaussScalar> {
        self.jtilde.mul_vec(x)
    }

    /// Every chiral coordinate vector is `V`-orthogonal to every antichiral
    /// one.
    pub fn halves_orthogonal(&self) -> bool {
        let split = self.split();
        split.chiral_coords.iter().all(|c| split.antichiral_coords.iter().all(|a| self.v_coords(c, a).is_zero()))
    }
}

fn invariant(what: &str, k: usize, i: usize) -> Error {
    Error::Invariant(format!("{what} (k={k}, i={i})"))
}

/// Hermitian Gram matrix of sphere L² products; pairs of basis elements
/// with different parity masks are skipped since their product integrates
/// to zero.
pub(crate) fn sphere_gram(left: &[PolyForm], right: &[PolyForm]) -> Matrix<GaussScalar> {
    let lm: Vec<Option<u32>> = left.iter().map(PolyForm::parity_mask).collect();
    let rm: Vec<Option<u32>> = right.iter().map(PolyForm::parity_mask).collect();
    let rows: Vec<Vec<GaussScalar>> = left
        .par_iter()
        .enumerate()
        .map(|(a, fa)| {
            right
                .iter()
                .enumerate()
                .map(|(b, fb)| match (lm[a], rm[b]) {
                    (Some(x), Some(y)) if x != y => GaussScalar::zero(),
                    _ => sphere_inner_unchecked(fa, fb).expect("shapes checked").value,
                })
                .collect()
        })
        .collect();
    Matrix::from_rows(rows)
}

fn pairing_matrix(basis: &[PolyForm]) -> Matrix<GaussScalar> {
    let rows: Vec<Vec<GaussScalar>> = basis
        .par_iter()
        .map(|a| basis.iter().map(|b| sphere_wedge_d_pair(a, b).expect("middle-degree pairing").value).collect())
        .collect();
    Matrix::from_rows(rows)
}

/// Builds the eigenlevel `(k, i)` and certifies `λ_i = (2k+i)²` through
/// `[J̃]² = −λ·I`.
pub fn eigenlevel(k: usize, i: usize) -> Result<EigenLevel> {
    if i == 0 {
        return Err(Error::Degree("eigenlevels start at i = 1".into()));
    }
    let space = build_hpp_second(k, 2 * k, i as u32)?;
    let expected = hpp_dim_formula(k, i);
    if space.dim() != expected {
        return Err(invariant(
            &format!("dim ''H^{{2k}}_i = {} differs from 2·C(4k+i,2k)·C(2k+i−1,2k) = {expected}", space.dim()),
            k,
            i,
        ));
    }
    // d must embed ''H^{2k}_i into 'H^{2k+1}_{i-1}
    let images: Vec<PolyForm> = space.basis().par_iter().map(PolyForm::ext_d).collect();
    if !images.par_iter().all(|w| w.codiff().is_zero() && w.laplacian().is_zero()) {
        return Err(invariant("d(''H) is not harmonic and coclosed", k, i));
    }
    let image_space = FormSpace::from_spanning(ambient_dim(k), 2 * k + 1, (i - 1) as u32, &images)?;
    if image_space.dim() != space.dim() {
        return Err(invariant("d is not injective on ''H", k, i));
    }

    let gram = sphere_gram(space.basis(), space.basis());
    if !gram.is_hermitian() || !gram.is_positive_definite() {
        return Err(invariant("sphere Gram is not positive definite", k, i));
    }
    let pairing = pairing_matrix(space.basis());
    let jtilde = gram.solve(&pairing)?;
    let lambda = ((2 * k + i) * (2 * k + i)) as u64;
    let square = jtilde.mul(&jtilde);
    if !is_scalar_matrix(&square, &GaussScalar::from_i64(-(lambda as i64))) {
        return Err(invariant("[J̃]² ≠ −λ·I", k, i));
    }
    Ok(EigenLevel { k, i, lambda, space, gram, pairing, jtilde, split: None })
}

fn chiral_kernel(level: &EigenLevel, sign: i64) -> Vec<Vec<GaussScalar>> {
    let map = move |b: &PolyForm| b.ext_d().chirality_defect(sign);
    kernel_of_maps(level.space.basis(), &[&map]).into_iter().map(|v| v.to_dense(level.dim())).collect()
}

/// Splits a level into the kernels of `(1 ∓ √−1·*)∘d` and certifies that
/// chiral restrictions are `+√−1` eigenvectors of `J` (antichiral `−√−1`).
pub fn chiral_split(mut level: EigenLevel) -> Result<EigenLevel> {
    let (k, i) = (level.k, level.i);
    let chiral = chiral_kernel(&level, 1);
    let antichiral = chiral_kernel(&level, -1);
    if 2 * chiral.len() != level.dim() || 2 * antichiral.len() != level.dim() {
        return Err(invariant(
            &format!("unequal chirality split {}/{} of {}", chiral.len(), antichiral.len(), level.dim()),
            k,
            i,
        ));
    }
    let conj_ok = chiral.iter().zip(&antichiral).all(|(c, a)| c.iter().zip(a).all(|(x, y)| &x.conj() == y));
    if !conj_ok {
        return Err(invariant("antichiral basis is not the conjugate of the chiral basis", k, i));
    }
    let root = GaussScalar::from_ints(0, level.sqrt_lambda() as i64);
    for (coords, eigen) in [(&chiral, root.clone()), (&antichiral, -root)] {
        for c in coords.iter() {
            let mc = level.apply_jtilde(c);
            let expected: Vec<GaussScalar> = c.iter().map(|x| x.mul_ref(&eigen)).collect();
            if mc != expected {
                return Err(invariant("chiral restriction is not a ±√−1 eigenvector of J", k, i));
            }
        }
    }
    let chiral_forms = chiral.iter().map(|c| level.space.combine(c)).collect();
    let antichiral_forms = antichiral.iter().map(|c| level.space.combine(c)).collect();
    level.split =
        Some(ChiralSplit { chiral_coords: chiral, antichiral_coords: antichiral, chiral_forms, antichiral_forms });
    Ok(level)
}

type LevelCache = Mutex<BTreeMap<(usize, usize), Arc<EigenLevel>>>;

fn cache() -> &'static LevelCache {
    static CACHE: OnceLock<LevelCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Split eigenlevel, memoised for the lifetime of the process.
pub fn eigenlevel_cached(k: usize, i: usize) -> Result<Arc<EigenLevel>> {
    if let Some(hit) = cache().lock().expect("cache lock").get(&(k, i)) {
        return Ok(hit.clone());
    }
    let level = Arc::new(chiral_split(eigenlevel(k, i)?)?);
    cache().lock().expect("cache lock").insert((k, i), level.clone());
    Ok(level)
}

fn matrix_strings(m: &Matrix<GaussScalar>) -> Vec<Vec<[String; 2]>> {
    (0..m.nrows()).map(|r| m.row(r).iter().map(GaussScalar::to_strings).collect()).collect()
}

impl Serialize for EigenLevel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("EigenLevel", 11)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("i", &self.i)?;
        st.serialize_field("lambda", &self.lambda)?;
        st.serialize_field("dim", &self.dim())?;
        st.serialize_field("dim_chiral", &self.split.as_ref().map(|s| s.chiral_forms.len()))?;
        st.serialize_field("gram_unit", "pi^{n/2}")?;
        st.serialize_field("basis", self.space.basis())?;
        st.serialize_field("chiral_basis", &self.split.as_ref().map(|s| &s.chiral_forms))?;
        st.serialize_field("antichiral_basis", &self.split.as_ref().map(|s| &s.antichiral_forms))?;
        st.serialize_field("gram", &matrix_strings(&self.gram))?;
        st.serialize_field("jtilde", &matrix_strings(&self.jtilde))?;
        st.end()
    }
}
