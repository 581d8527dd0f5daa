//! Exact sparse linear algebra over a [`Field`].
//!
//! Every solver first splits the problem into connected components of the
//! row/column incidence graph. The operators in this crate respect a parity
//! grading on monomials, so the components are small even when the ambient
//! spaces have hundreds of coordinates.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{Field, GaussScalar};

/// Sparse vector with strictly increasing indices and no stored zeros.
#[derive(Clone, PartialEq)]
pub struct SparseVec<F> {
    entries: Vec<(usize, F)>,
}

impl<F: Field> SparseVec<F> {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(index: usize) -> Self {
        SparseVec { entries: vec![(index, F::one())] }
    }

    /// Builds from unsorted `(index, value)` pairs, summing duplicates.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, F)>) -> Self {
        let mut map: BTreeMap<usize, F> = BTreeMap::new();
        for (i, v) in pairs {
            match map.get_mut(&i) {
                Some(slot) => *slot += &v,
                None => {
                    map.insert(i, v);
                }
            }
        }
        SparseVec { entries: map.into_iter().filter(|(_, v)| !v.is_zero()).collect() }
    }

    pub fn from_dense(values: &[F]) -> Self {
        SparseVec {
            entries: values.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v.clone())).collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<F> {
        let mut out = vec![F::zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, F)] {
        &self.entries
    }

    pub fn leading(&self) -> Option<usize> {
        self.entries.first().map(|(i, _)| *i)
    }

    pub fn get(&self, index: usize) -> Option<&F> {
        self.entries.binary_search_by_key(&index, |(i, _)| *i).ok().map(|pos| &self.entries[pos].1)
    }

    pub fn scale(&mut self, alpha: &F) {
        if alpha.is_zero() {
            self.entries.clear();
            return;
        }
        for (_, v) in &mut self.entries {
            *v = v.mul_ref(alpha);
        }
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: &F, other: &SparseVec<F>) {
        if alpha.is_zero() || other.is_zero() {
            return;
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let mut a = std::mem::take(&mut self.entries).into_iter().peekable();
        let mut b = other.entries.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((ia, _)), Some((ib, _))) if ia < ib => out.push(a.next().unwrap()),
                (Some((ia, _)), Some((ib, _))) if ia > ib => {
                    let (ib, vb) = b.next().unwrap();
                    out.push((*ib, alpha.mul_ref(vb)));
                }
                (Some(_), Some(_)) => {
                    let (i, mut va) = a.next().unwrap();
                    let (_, vb) = b.next().unwrap();
                    va += &alpha.mul_ref(vb);
                    if !va.is_zero() {
                        out.push((i, va));
                    }
                }
                (Some(_), None) => out.push(a.next().unwrap()),
                (None, Some(_)) => {
                    let (ib, vb) = b.next().unwrap();
                    out.push((*ib, alpha.mul_ref(vb)));
                }
                (None, None) => break,
            }
        }
        self.entries = out;
    }

    pub fn dot_dense(&self, dense: &[F]) -> F {
        let mut acc = F::zero();
        for (i, v) in &self.entries {
            acc += &v.mul_ref(&dense[*i]);
        }
        acc
    }

    pub fn map_indices(&self, f: impl Fn(usize) -> usize) -> SparseVec<F> {
        SparseVec::from_pairs(self.entries.iter().map(|(i, v)| (f(*i), v.clone())))
    }
}

impl<F: Field> Default for SparseVec<F> {
    fn default() -> Self {
        SparseVec::new()
    }
}

impl<F: Field> fmt::Debug for SparseVec<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter().map(|(i, v)| (i, v))).finish()
    }
}

/// Incremental row echelon form. Pivot rows are normalised to a leading 1.
#[derive(Clone)]
pub struct Echelon<F> {
    pivots: BTreeMap<usize, SparseVec<F>>,
}

impl<F: Field> Default for Echelon<F> {
    fn default() -> Self {
        Echelon { pivots: BTreeMap::new() }
    }
}

impl<F: Field> Echelon<F> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    /// Clears leading entries against existing pivots. The result is zero
    /// exactly when `row` lies in the current row space.
    pub fn reduce_leading(&self, mut row: SparseVec<F>) -> SparseVec<F> {
        while let Some(lead) = row.leading() {
            match self.pivots.get(&lead) {
                Some(pivot) => {
                    let alpha = -row.entries[0].1.clone();
                    row.axpy(&alpha, pivot);
                }
                None => break,
            }
        }
        row
    }

    /// Returns `true` when the row was independent of the rows seen so far.
    pub fn insert(&mut self, row: SparseVec<F>) -> bool {
        let mut row = self.reduce_leading(row);
        let Some(lead) = row.leading() else {
            return false;
        };
        let inv = row.entries[0].1.inv();
        row.scale(&inv);
        self.pivots.insert(lead, row);
        true
    }

    pub fn contains(&self, row: SparseVec<F>) -> bool {
        self.reduce_leading(row).is_zero()
    }

    /// Back-substitutes into the unique reduced row echelon form.
    pub fn into_rref(self) -> Vec<SparseVec<F>> {
        let mut done: BTreeMap<usize, SparseVec<F>> = BTreeMap::new();
        for (col, mut row) in self.pivots.into_iter().rev() {
            let hits: Vec<(usize, F)> = row
                .entries
                .iter()
                .skip(1)
                .filter(|(c, _)| done.contains_key(c))
                .map(|(c, v)| (*c, v.clone()))
                .collect();
            for (c, v) in hits {
                row.axpy(&-v, &done[&c]);
            }
            done.insert(col, row);
        }
        done.into_values().collect()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Groups rows into connected components (rows sharing a column are joined).
/// Returns, per component, the column set and the row indices.
fn components<F: Field>(rows: &[SparseVec<F>], ncols: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut uf = UnionFind::new(ncols);
    for row in rows {
        let mut it = row.entries.iter();
        if let Some((first, _)) = it.next() {
            for (c, _) in it {
                uf.union(*first, *c);
            }
        }
    }
    let mut by_root: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for c in 0..ncols {
        let r = uf.find(c);
        by_root.entry(r).or_default().0.push(c);
    }
    for (ri, row) in rows.iter().enumerate() {
        if let Some(lead) = row.leading() {
            let r = uf.find(lead);
            by_root.get_mut(&r).expect("root registered").1.push(ri);
        }
    }
    by_root.into_values().collect()
}

fn echelon_of<F: Field>(rows: &[SparseVec<F>], select: &[usize]) -> Echelon<F> {
    let mut order: Vec<usize> = select.to_vec();
    order.sort_by_key(|&r| (rows[r].nnz(), rows[r].leading()));
    let mut ech = Echelon::new();
    for r in order {
        ech.insert(rows[r].clone());
    }
    ech
}

/// Rank of a sparse row set.
pub fn rank<F: Field>(rows: &[SparseVec<F>], ncols: usize) -> usize {
    components(rows, ncols).par_iter().map(|(_, rs)| if rs.is_empty() { 0 } else { echelon_of(rows, rs).rank() }).sum()
}

/// The reduced row echelon basis of the row space of `rows`.
pub fn row_space_rref<F: Field>(rows: &[SparseVec<F>], ncols: usize) -> Vec<SparseVec<F>> {
    let mut out: Vec<SparseVec<F>> = components(rows, ncols)
        .par_iter()
        .filter(|(_, rs)| !rs.is_empty())
        .flat_map_iter(|(_, rs)| echelon_of(rows, rs).into_rref())
        .collect();
    out.sort_by_key(|r| r.leading());
    out
}

/// Null space `{x : row·x = 0 for every row}` of a matrix with `ncols`
/// columns, returned as its reduced row echelon basis (deterministic).
pub fn kernel<F: Field>(rows: &[SparseVec<F>], ncols: usize) -> Vec<SparseVec<F>> {
    let comps = components(rows, ncols);
    let mut out: Vec<SparseVec<F>> = comps
        .par_iter()
        .flat_map_iter(|(cols, rs)| {
            let rref = echelon_of(rows, rs).into_rref();
            let pivots: BTreeMap<usize, &SparseVec<F>> = rref.iter().map(|r| (r.leading().unwrap(), r)).collect();
            let raw: Vec<SparseVec<F>> = cols
                .iter()
                .filter(|c| !pivots.contains_key(c))
                .map(|&free| {
                    let mut pairs = vec![(free, F::one())];
                    for (&p, row) in &pivots {
                        if let Some(v) = row.get(free) {
                            pairs.push((p, -v.clone()));
                        }
                    }
                    SparseVec::from_pairs(pairs)
                })
                .collect();
            let mut ech = Echelon::new();
            for v in raw {
                ech.insert(v);
            }
            ech.into_rref()
        })
        .collect();
    out.sort_by_key(|r| r.leading());
    out
}

/// Solution rows of one block, tagged with their global row index.
type SolvedBlock<F> = Result<Vec<(usize, Vec<F>)>>;

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<F> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn conj(&self) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(F::conj).collect() }
    }

    pub fn scale(&self, alpha: &F) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.mul_ref(alpha)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    /// Product that skips zero entries of `self`; cheap for block-sparse data.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if !b.is_zero() {
                        out.data[r * other.cols + c] += &a.mul_ref(b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = F::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &a.mul_ref(b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn rows_sparse(&self) -> Vec<SparseVec<F>> {
        (0..self.rows).map(|r| SparseVec::from_dense(self.row(r))).collect()
    }

    pub fn rank(&self) -> usize {
        rank(&self.rows_sparse(), self.cols)
    }

    /// Connected blocks of a square matrix (indices coupled by a nonzero entry).
    pub fn square_blocks(&self) -> Vec<Vec<usize>> {
        assert_eq!(self.rows, self.cols);
        let mut uf = UnionFind::new(self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if !self[(r, c)].is_zero() {
                    uf.union(r, c);
                }
            }
        }
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..self.rows {
            let root = uf.find(i);
            by_root.entry(root).or_default().push(i);
        }
        by_root.into_values().collect()
    }

    /// Solves `self · X = rhs` for square invertible `self`, block by block.
    pub fn solve(&self, rhs: &Matrix<F>) -> Result<Matrix<F>> {
        if self.rows != self.cols || rhs.rows != self.rows {
            return Err(Error::Structure(format!(
                "solve: {}x{} system with {}x{} right-hand side",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let blocks = self.square_blocks();
        let solved: Vec<SolvedBlock<F>> = blocks
            .par_iter()
            .map(|block| {
                let b = block.len();
                let aug: Vec<SparseVec<F>> = block
                    .iter()
                    .map(|&r| {
                        let mut pairs: Vec<(usize, F)> =
                            block.iter().enumerate().map(|(j, &c)| (j, self[(r, c)].clone())).collect();
                        pairs.extend((0..rhs.cols).map(|c| (b + c, rhs[(r, c)].clone())));
                        SparseVec::from_pairs(pairs)
                    })
                    .collect();
                let mut ech = Echelon::new();
                for row in aug {
                    ech.insert(row);
                }
                let rref = ech.into_rref();
                let pivots_ok = rref.len() >= b && rref.iter().take(b).enumerate().all(|(j, r)| r.leading() == Some(j));
                if !pivots_ok {
                    return Err(Error::Singular(format!("block of size {b} is singular")));
                }
                Ok(rref
                    .iter()
                    .take(b)
                    .enumerate()
                    .map(|(j, row)| {
                        let mut x = vec![F::zero(); rhs.cols];
                        for (c, v) in row.entries().iter().skip(1) {
                            if *c < b {
                                // unreachable for a full-rank block in RREF
                                continue;
                            }
                            x[c - b] = v.clone();
                        }
                        (block[j], x)
                    })
                    .collect())
            })
            .collect();
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for part in solved {
            for (r, x) in part? {
                for (c, v) in x.into_iter().enumerate() {
                    out[(r, c)] = v;
                }
            }
        }
        Ok(out)
    }
}

impl<F> std::ops::Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (r, c): (usize, usize)) -> &F {
        &self.data[r * self.cols + c]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut F {
        &mut self.data[r * self.cols + c]
    }
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for r in 0..self.rows {
            list.entry(&self.row(r));
        }
        list.finish()
    }
}

impl Matrix<GaussScalar> {
    pub fn is_hermitian(&self) -> bool {
        self.rows == self.cols && *self == self.adjoint()
    }

    /// Exact positive-definiteness test by Hermitian Gaussian elimination:
    /// every pivot must be real and strictly positive.
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_hermitian() {
            return false;
        }
        self.square_blocks().par_iter().all(|block| {
            let b = block.len();
            let mut a: Vec<Vec<GaussScalar>> =
                block.iter().map(|&r| block.iter().map(|&c| self[(r, c)].clone()).collect()).collect();
            for k in 0..b {
                let p = a[k][k].clone();
                if !p.is_real() || !p.re.is_positive() {
                    return false;
                }
                let pinv = p.inv();
                for i in k + 1..b {
                    if a[i][k].is_zero() {
                        continue;
                    }
                    let f = a[i][k].mul_ref(&pinv);
                    let (top, bottom) = a.split_at_mut(i);
                    for (x, y) in bottom[0][k..].iter_mut().zip(&top[k][k..]) {
                        if !y.is_zero() {
                            *x -= &f.mul_ref(y);
                        }
                    }
                }
            }
            true
        })
    }
}

/// `true` if every entry of `m` equals `alpha` on the diagonal and zero elsewhere.
pub fn is_scalar_matrix<F: Field>(m: &Matrix<F>, alpha: &F) -> bool {
    m.nrows() == m.ncols()
        && (0..m.nrows())
            .all(|r| (0..m.ncols()).all(|c| if r == c { m[(r, c)] == *alpha } else { m[(r, c)].is_zero() }))
}

/// Smallest eigenvalue of a Hermitian matrix, in floating point.
pub fn hermitian_min_eigenvalue_f64(m: &Matrix<GaussScalar>) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return f64::INFINITY;
    }
    let dense = nalgebra::DMatrix::from_fn(n, n, |r, c| m[(r, c)].to_complex());
    dense.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}
