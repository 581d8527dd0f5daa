//! The symmetric algebra `S(W)` truncated at a total degree `D`, and the
//! linear system for invariant functionals on it.
//!
//! Under `ε_ξ ↦ exp(Σ ξ_a t_a)` the action of `w ∈ W` becomes multiplication
//! by `exp(w)`. A functional `ψ` is invariant at truncation `D` when
//! `ψ(exp_{≤D}(w)·m) = ψ(m)` for every monomial `m` of degree `≤ D − 1`.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{CoherentVector, WFin};
use crate::error::{Error, Result};
use crate::exterior::monomials;
use crate::linalg::{rank, SparseVec};
use crate::scalar::{int, Field, GaussScalar};

/// All exponent vectors in `m` variables of total degree `≤ D`, highest
/// degree first. This is the column order of the invariance system, so
/// leading entries of its rows sit on the highest-degree monomials.
pub fn monomials_up_to(m: usize, degree: usize) -> Vec<Vec<u16>> {
    (0..=degree as u32).rev().flat_map(|d| monomials(m, d)).collect()
}

fn factorial(n: usize) -> GaussScalar {
    GaussScalar::real(int((1..=n as i64).product()))
}

fn multi_factorial(exps: &[u16]) -> GaussScalar {
    exps.iter().fold(GaussScalar::one(), |acc, &e| acc * factorial(e as usize))
}

/// A vector of the truncated symmetric algebra in the W basis variables.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct FockVector {
    pub vars: usize,
    pub degree: usize,
    #[serde(serialize_with = "serialize_coeffs")]
    coeffs: BTreeMap<Vec<u16>, GaussScalar>,
}

fn serialize_coeffs<S: serde::Serializer>(
    coeffs: &BTreeMap<Vec<u16>, GaussScalar>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Term<'a> {
        exps: &'a [u16],
        c: [String; 2],
    }
    let terms: Vec<Term<'_>> = coeffs.iter().map(|(e, c)| Term { exps: e, c: c.to_strings() }).collect();
    serde::Serialize::serialize(&terms, s)
}

impl FockVector {
    pub fn zero(vars: usize, degree: usize) -> Self {
        FockVector { vars, degree, coeffs: BTreeMap::new() }
    }

    pub fn add_term(&mut self, exps: Vec<u16>, c: GaussScalar) {
        assert_eq!(exps.len(), self.vars);
        if c.is_zero() || exps.iter().map(|&e| e as usize).sum::<usize>() > self.degree {
            return;
        }
        let slot = self.coeffs.entry(exps.clone()).or_insert_with(GaussScalar::zero);
        *slot += &c;
        if slot.is_zero() {
            self.coeffs.remove(&exps);
        }
    }

    pub fn coefficient(&self, exps: &[u16]) -> GaussScalar {
        self.coeffs.get(exps).cloned().unwrap_or_else(GaussScalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &GaussScalar)> {
        self.coeffs.iter()
    }

    /// Image of a coherent vector with constant coefficients:
    /// `ε_ξ ↦ Σ_{|β|≤D} ξ^β/β! t^β`.
    pub fn from_coherent(u: &CoherentVector, vars: usize, degree: usize) -> Result<Self> {
        let mut out = FockVector::zero(vars, degree);
        let mons = monomials_up_to(vars, degree);
        for (xi, c) in u.terms() {
            if xi.len() != vars {
                return Err(Error::Structure("coherent label length differs from W dimension".into()));
            }
            let c = match c.as_single() {
                Some((c, q)) if q.is_zero() => c.clone(),
                _ => return Err(Error::Precondition("only constant coefficients have a truncated Fock image".into())),
            };
            for beta in &mons {
                let mut v = c.clone();
                for (x, &e) in xi.iter().zip(beta) {
                    for _ in 0..e {
                        v = v.mul_ref(x);
                    }
                }
                out.add_term(beta.clone(), v / multi_factorial(beta));
            }
        }
        Ok(out)
    }

    /// Truncated Fock inner product `⟨t^α, t^β⟩ = 2^{|α|} perm(g_{α,β})`
    /// for `|α| = |β|`, zero otherwise; conjugate-linear in `other`.
    pub fn inner(&self, w: &WFin, other: &FockVector) -> Result<GaussScalar> {
        if self.vars != w.dim() || other.vars != w.dim() {
            return Err(Error::Structure("Fock vector over a different W basis".into()));
        }
        let mut acc = GaussScalar::zero();
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                let n: u16 = a.iter().sum();
                if n != b.iter().sum::<u16>() {
                    continue;
                }
                let rows = expand(a);
                let cols = expand(b);
                let sub: Vec<Vec<GaussScalar>> =
                    rows.iter().map(|&r| cols.iter().map(|&c| w.gram[(r, c)].clone()).collect()).collect();
                let weight = GaussScalar::real(int(1i64 << n)) * permanent(&sub);
                acc += &ca.mul_ref(&cb.conj()).mul_ref(&weight);
            }
        }
        Ok(acc)
    }
}

fn expand(exps: &[u16]) -> Vec<usize> {
    exps.iter().enumerate().flat_map(|(j, &e)| std::iter::repeat_n(j, e as usize)).collect()
}

/// Permanent by Laplace expansion along the first row; the truncation
/// degrees in use keep matrices tiny.
fn permanent(m: &[Vec<GaussScalar>]) -> GaussScalar {
    fn rec(m: &[Vec<GaussScalar>], row: usize, used: &mut Vec<bool>) -> GaussScalar {
        if row == m.len() {
            return GaussScalar::one();
        }
        let mut acc = GaussScalar::zero();
        for c in 0..m.len() {
            if used[c] || m[row][c].is_zero() {
                continue;
            }
            used[c] = true;
            acc += &m[row][c].mul_ref(&rec(m, row + 1, used));
            used[c] = false;
        }
        acc
    }
    rec(m, 0, &mut vec![false; m.len()])
}

/// Which form of the invariance condition to impose.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InvarianceMode {
    /// `ψ(exp_{≤D}(w)·m) = ψ(m)`.
    Group,
    /// `ψ(w·m) = 0`.
    Infinitesimal,
}

/// Outcome of the invariant-functional solver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantSolution {
    pub dim: usize,
    pub unknowns: usize,
    pub rank: usize,
    /// Whether the generators span `W_fin`.
    pub spans: bool,
    /// Whether `χ` (the functional dual to the constant monomial) satisfies
    /// every constraint.
    pub chi_in_kernel: bool,
}

type SparsePoly = HashMap<Vec<u16>, GaussScalar>;

fn poly_mul_linear(p: &SparsePoly, w: &[(usize, GaussScalar)]) -> SparsePoly {
    let mut out: SparsePoly = HashMap::new();
    for (exps, c) in p {
        for (j, x) in w {
            let mut e = exps.clone();
            e[*j] += 1;
            let slot = out.entry(e).or_insert_with(GaussScalar::zero);
            *slot += &c.mul_ref(x);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// `w^j / j!` for `j = 1..=D`, each as a sparse polynomial.
fn scaled_powers(w: &[(usize, GaussScalar)], vars: usize, degree: usize) -> Vec<SparsePoly> {
    let mut out = Vec::with_capacity(degree);
    let mut cur: SparsePoly = HashMap::from([(vec![0u16; vars], GaussScalar::one())]);
    for j in 1..=degree {
        cur = poly_mul_linear(&cur, w);
        let inv = GaussScalar::real(int(j as i64)).inv();
        for v in cur.values_mut() {
            *v = v.mul_ref(&inv);
        }
        out.push(cur.clone());
    }
    out
}

fn generator_rank(gens: &[Vec<GaussScalar>], vars: usize) -> usize {
    let rows: Vec<SparseVec<GaussScalar>> = gens.iter().map(|g| SparseVec::from_dense(g)).collect();
    rank(&rows, vars)
}

/// Dimension of the space of functionals on `S^{≤D}(W_fin)` invariant under
/// every generator.
pub fn invariant_functional_dim(
    w: &WFin,
    degree: usize,
    generators: &[Vec<GaussScalar>],
    mode: InvarianceMode,
) -> Result<InvariantSolution> {
    if generators.is_empty() {
        return Err(Error::Precondition("empty generator set".into()));
    }
    if degree == 0 {
        return Err(Error::Degree("truncation degree must be at least 1".into()));
    }
    let vars = w.dim();
    if let Some(bad) = generators.iter().find(|g| g.len() != vars) {
        return Err(Error::Structure(format!("generator of length {} over a W basis of dimension {vars}", bad.len())));
    }
    let mons = monomials_up_to(vars, degree);
    let index: HashMap<&[u16], usize> = mons.iter().enumerate().map(|(j, m)| (m.as_slice(), j)).collect();
    let lower: Vec<&Vec<u16>> = mons.iter().filter(|m| m.iter().map(|&e| e as usize).sum::<usize>() < degree).collect();

    let mut rows: Vec<SparseVec<GaussScalar>> = Vec::new();
    for g in generators {
        let sparse: Vec<(usize, GaussScalar)> =
            g.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (j, v.clone())).collect();
        if sparse.is_empty() {
            continue;
        }
        let max_power = match mode {
            InvarianceMode::Group => degree,
            InvarianceMode::Infinitesimal => 1,
        };
        let powers = scaled_powers(&sparse, vars, max_power);
        let block: Vec<SparseVec<GaussScalar>> = lower
            .par_iter()
            .map(|m| {
                let e: usize = m.iter().map(|&x| x as usize).sum();
                let mut pairs = Vec::new();
                for p in powers.iter().take(degree - e) {
                    for (beta, c) in p {
                        let target: Vec<u16> = beta.iter().zip(m.iter()).map(|(a, b)| a + b).collect();
                        pairs.push((index[target.as_slice()], c.clone()));
                    }
                }
                SparseVec::from_pairs(pairs)
            })
            .filter(|r| !r.is_zero())
            .collect();
        rows.extend(block);
    }
    let unit_col = mons.len() - 1;
    let chi_in_kernel = rows.iter().all(|r| r.get(unit_col).is_none());
    let r = rank(&rows, mons.len());
    Ok(InvariantSolution {
        dim: mons.len() - r,
        unknowns: mons.len(),
        rank: r,
        spans: generator_rank(generators, vars) == vars,
        chi_in_kernel,
    })
}

/// Result of the weight filter on the sectors `E_{λ+2ξ}`, `ξ ∈ ℤ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectorResult {
    pub lambda: u32,
    /// Whether some sector has weight zero.
    pub weight_zero_sector: bool,
    pub dim: usize,
    pub solution: Option<InvariantSolution>,
}

/// Invariant functionals on `⊕_ξ E_{λ+2ξ}` for the loop model of the circle.
///
/// Constant loops act on `E_{λ+2ξ}` with weight `λ + 2ξ`, so only a sector of
/// weight zero can carry an invariant functional. That happens exactly when
/// `λ` is even; its invariant space is then computed on `E_0`.
pub fn loop_sector_dim(
    lambda: u32,
    w: &WFin,
    degree: usize,
    generators: &[Vec<GaussScalar>],
    mode: InvarianceMode,
) -> Result<SectorResult> {
    if lambda > 1 {
        return Err(Error::Precondition(format!("λ = {lambda} is not a level of the circle")));
    }
    if lambda % 2 == 1 {
        return Ok(SectorResult { lambda, weight_zero_sector: false, dim: 0, solution: None });
    }
    let solution = invariant_functional_dim(w, degree, generators, mode)?;
    Ok(SectorResult { lambda, weight_zero_sector: true, dim: solution.dim, solution: Some(solution) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn g(re: i64, im: i64) -> GaussScalar {
        GaussScalar::from_ints(re, im)
    }

    fn model(m: usize) -> WFin {
        let gram = Matrix::from_fn(m, m, |r, c| if r == c { g(r as i64 + 1, 0) } else { g(0, 0) });
        WFin::from_gram(gram).unwrap()
    }

    fn units(m: usize) -> Vec<Vec<GaussScalar>> {
        (0..m).map(|j| (0..m).map(|c| if c == j { g(1, 0) } else { g(0, 0) }).collect()).collect()
    }

    #[test]
    fn monomial_order_is_degree_descending() {
        let mons = monomials_up_to(2, 2);
        assert_eq!(mons.len(), 6);
        assert_eq!(mons[0], vec![2, 0]);
        assert_eq!(mons[5], vec![0, 0]);
    }

    #[test]
    fn one_dimensional_invariants() {
        let w = model(2);
        for mode in [InvarianceMode::Group, InvarianceMode::Infinitesimal] {
            let sol = invariant_functional_dim(&w, 4, &units(2), mode).unwrap();
            assert_eq!(sol.dim, 1);
            assert!(sol.chi_in_kernel && sol.spans);
        }
    }

    #[test]
    fn non_spanning_generators_leave_more_invariants() {
        let w = model(2);
        let sol = invariant_functional_dim(&w, 3, &units(2)[..1], InvarianceMode::Group).unwrap();
        assert!(!sol.spans);
        assert!(sol.dim > 1);
    }

    #[test]
    fn dense_generators_agree() {
        let w = model(3);
        let gens =
            vec![vec![g(1, 1), g(2, 0), g(0, -1)], vec![g(0, 1), g(1, 0), g(3, 0)], vec![g(1, 0), g(0, 0), g(1, 2)]];
        let sol = invariant_functional_dim(&w, 3, &gens, InvarianceMode::Group).unwrap();
        assert!(sol.spans);
        assert_eq!(sol.dim, 1);
    }

    #[test]
    fn errors() {
        let w = model(2);
        assert!(invariant_functional_dim(&w, 3, &[], InvarianceMode::Group).is_err());
        assert!(invariant_functional_dim(&w, 0, &units(2), InvarianceMode::Group).is_err());
        assert!(invariant_functional_dim(&w, 2, &[vec![g(1, 0)]], InvarianceMode::Group).is_err());
    }

    #[test]
    fn sector_filter() {
        let w = model(2);
        assert_eq!(loop_sector_dim(0, &w, 3, &units(2), InvarianceMode::Group).unwrap().dim, 1);
        assert_eq!(loop_sector_dim(1, &w, 3, &units(2), InvarianceMode::Group).unwrap().dim, 0);
        assert!(loop_sector_dim(2, &w, 3, &units(2), InvarianceMode::Group).is_err());
    }

    #[test]
    fn fock_inner_matches_truncated_exponential() {
        let w = WFin::from_gram(Matrix::from_rows(vec![vec![g(2, 0), g(0, 1)], vec![g(0, -1), g(1, 0)]])).unwrap();
        let xi = vec![g(1, -1), g(0, 2)];
        let eta = vec![g(2, 0), g(1, 1)];
        let degree = 4;
        let a = FockVector::from_coherent(&CoherentVector::epsilon(xi.clone()), 2, degree).unwrap();
        let b = FockVector::from_coherent(&CoherentVector::epsilon(eta.clone()), 2, degree).unwrap();
        let s = w.inner(&xi, &eta).scale(&int(2));
        let mut expected = GaussScalar::zero();
        let mut power = GaussScalar::one();
        for n in 0..=degree {
            expected += &(power.clone() / factorial(n));
            power = power.mul_ref(&s);
        }
        assert_eq!(a.inner(&w, &b).unwrap(), expected);
    }
}
