use std::sync::Arc;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::level::{eigenlevel_cached, sphere_gram, EigenLevel};
use crate::error::{Error, Result};
use crate::exterior::{l2_inner_ball, sphere_inner_unchecked, sphere_l2_inner_tangential, MeasureValue, PolyForm};
use crate::linalg::Matrix;
use crate::scalar::{Field, GaussScalar};

/// `( , )_V` on representatives of one level: `√λ` times the sphere L² product.
pub fn v_inner(level: &EigenLevel, a: &PolyForm, b: &PolyForm) -> Result<MeasureValue> {
    for f in [a, b] {
        if !level.space.contains(f) {
            return Err(Error::Precondition(format!("representative is not in level i={} of k={}", level.i, level.k)));
        }
    }
    let l2 = sphere_l2_inner_tangential(a, b)?;
    Ok(l2.scale(&GaussScalar::from_i64(level.sqrt_lambda() as i64)))
}

/// The ordered basis of `W_fin = ⊕_{i≤N} W_{λ_i}` formed by the chiral
/// representatives of each level, with its `( , )_V` Gram matrix.
#[derive(Clone, Debug)]
pub struct WBasis {
    pub k: usize,
    pub levels: Vec<Arc<EigenLevel>>,
    /// Index of the first vector of each level.
    pub offsets: Vec<usize>,
    /// `g_ab = (w_a, w_b)_V`, Hermitian and positive definite.
    pub gram: Matrix<GaussScalar>,
    /// `h_ab = (w_a, w̄_b)_V`; zero by construction.
    pub cross_gram: Matrix<GaussScalar>,
}

impl WBasis {
    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn max_level(&self) -> usize {
        self.levels.len()
    }

    /// `(level position, index within the level)` of a basis vector.
    pub fn locate(&self, a: usize) -> (usize, usize) {
        let l = self.offsets.partition_point(|&o| o <= a) - 1;
        (l, a - self.offsets[l])
    }

    /// The representative form of basis vector `a`.
    pub fn form(&self, a: usize) -> &PolyForm {
        let (l, j) = self.locate(a);
        &self.levels[l].split().chiral_forms[j]
    }

    /// `xᵀ g ȳ` for coordinate vectors over the W basis.
    pub fn inner(&self, x: &[GaussScalar], y: &[GaussScalar]) -> GaussScalar {
        let yb: Vec<GaussScalar> = y.iter().map(GaussScalar::conj).collect();
        let gy = self.gram.mul_vec(&yb);
        x.iter().zip(&gy).map(|(a, b)| a.mul_ref(b)).sum()
    }

    /// `xᵀ g y` (no conjugation), i.e. `(x, ȳ)` pairing W with W̄ coordinates.
    pub fn bilinear(&self, x: &[GaussScalar], y: &[GaussScalar]) -> GaussScalar {
        let gy = self.gram.mul_vec(y);
        x.iter().zip(&gy).map(|(a, b)| a.mul_ref(b)).sum()
    }
}

fn block_gram(level: &EigenLevel, left: &[Vec<GaussScalar>], right: &[Vec<GaussScalar>]) -> Vec<Vec<GaussScalar>> {
    left.iter().map(|x| right.iter().map(|y| level.v_coords(x, y)).collect()).collect()
}

/// Assembles `W_fin` for levels `1..=N` and certifies cross-level
/// L²-orthogonality and orthogonality of `W` to `W̄`.
pub fn assemble_w(k: usize, max_level: usize) -> Result<WBasis> {
    if max_level == 0 {
        return Err(Error::Degree("assemble_w needs at least one level".into()));
    }
    let levels: Vec<Arc<EigenLevel>> =
        (1..=max_level).into_par_iter().map(|i| eigenlevel_cached(k, i)).collect::<Result<_>>()?;
    for a in 0..levels.len() {
        for b in a + 1..levels.len() {
            if !sphere_gram(levels[a].space.basis(), levels[b].space.basis()).is_zero() {
                return Err(Error::Invariant(format!("levels {} and {} of k={k} are not L²-orthogonal", a + 1, b + 1)));
            }
        }
    }
    let mut offsets = Vec::with_capacity(levels.len());
    let dim: usize = levels.iter().map(|l| l.split().chiral_coords.len()).sum();
    let mut gram = Matrix::zeros(dim, dim);
    let mut cross = Matrix::zeros(dim, dim);
    let mut start = 0;
    for level in &levels {
        offsets.push(start);
        let split = level.split();
        let g = block_gram(level, &split.chiral_coords, &split.chiral_coords);
        let h = block_gram(level, &split.chiral_coords, &split.antichiral_coords);
        for (r, (grow, hrow)) in g.into_iter().zip(h).enumerate() {
            for (c, (gv, hv)) in grow.into_iter().zip(hrow).enumerate() {
                gram[(start + r, start + c)] = gv;
                cross[(start + r, start + c)] = hv;
            }
        }
        start += split.chiral_coords.len();
    }
    if !cross.is_zero() {
        return Err(Error::Invariant(format!("W is not orthogonal to W̄ (k={k}, N={max_level})")));
    }
    if !gram.is_hermitian() || !gram.is_positive_definite() {
        return Err(Error::Invariant(format!("W Gram is not positive definite (k={k}, N={max_level})")));
    }
    Ok(WBasis { k, levels, offsets, gram, cross_gram: cross })
}

/// Orthogonal projection of the restriction of a form onto computed levels.
#[derive(Clone, Debug)]
pub struct LevelProjection {
    /// Coordinates in each level's real basis.
    pub coords: Vec<Vec<GaussScalar>>,
    /// Chiral (`W`) components per level.
    pub chiral: Vec<Vec<GaussScalar>>,
    /// Antichiral (`W̄`) components per level.
    pub antichiral: Vec<Vec<GaussScalar>>,
    /// Squared sphere norm of the part of the restriction outside the levels.
    pub residual: MeasureValue,
}

impl LevelProjection {
    pub fn lies_in_levels(&self) -> bool {
        self.residual.is_zero()
    }

    pub fn is_chiral(&self) -> bool {
        self.antichiral.iter().flatten().all(Zero::is_zero)
    }

    pub fn is_antichiral(&self) -> bool {
        self.chiral.iter().flatten().all(Zero::is_zero)
    }
}

/// Projects `i*B` onto the span of the given levels using the tangential
/// representative of `B`.
pub fn project_onto_levels(levels: &[Arc<EigenLevel>], b: &PolyForm) -> Result<LevelProjection> {
    let t = b.tangential_part();
    let n = b.n();
    let mut total = sphere_inner_unchecked(&t, &t)?;
    let mut coords = Vec::with_capacity(levels.len());
    let mut chiral = Vec::with_capacity(levels.len());
    let mut antichiral = Vec::with_capacity(levels.len());
    for level in levels {
        if level.n() != n || level.space.p() != b.degree() {
            return Err(Error::Structure("form does not match the level shape".into()));
        }
        let rhs: Vec<GaussScalar> = level
            .space
            .basis()
            .par_iter()
            .map(|ba| sphere_inner_unchecked(&t, ba).map(|m| m.value))
            .collect::<Result<_>>()?;
        let rhs = Matrix::from_fn(rhs.len(), 1, |r, _| rhs[r].clone());
        let x = level.gram.transpose().solve(&rhs)?.column(0);
        total = total - MeasureValue::new(level.l2_coords(&x, &x), n);

        let split = level.split();
        let half = split.chiral_coords.len();
        let basis_matrix = Matrix::from_fn(level.dim(), level.dim(), |r, c| {
            if c < half {
                split.chiral_coords[c][r].clone()
            } else {
                split.antichiral_coords[c - half][r].clone()
            }
        });
        let xm = Matrix::from_fn(level.dim(), 1, |r, _| x[r].clone());
        let ab = basis_matrix.solve(&xm)?.column(0);
        chiral.push(ab[..half].to_vec());
        antichiral.push(ab[half..].to_vec());
        coords.push(x);
    }
    Ok(LevelProjection { coords, chiral, antichiral, residual: total })
}

/// Both sides of `(i*B, J i*B')_V = −(dB, *dB')_{L²(ball)}`.
#[derive(Clone, Debug)]
pub struct StokesOutcome {
    pub lhs: MeasureValue,
    pub rhs: MeasureValue,
}

impl StokesOutcome {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

fn level_parts<'a>(levels: &'a [Arc<EigenLevel>], b: &PolyForm) -> Result<Vec<(&'a EigenLevel, Vec<GaussScalar>)>> {
    let mut out = Vec::new();
    for (deg, part) in b.homogeneous_parts() {
        let level = levels
            .iter()
            .find(|l| l.i as u32 == deg)
            .ok_or_else(|| Error::Precondition(format!("no computed level of degree {deg}")))?;
        let coords = level
            .space
            .coordinates(&part)
            .ok_or_else(|| Error::Precondition(format!("degree-{deg} part is not in level i={}", level.i)))?;
        out.push((level.as_ref(), coords));
    }
    Ok(out)
}

/// Evaluates both sides of the Stokes identity for 2k-forms whose
/// homogeneous parts lie in the given levels. The left side is a sphere
/// integral against `J̃` built from the level matrices; the right side is a
/// ball integral of the curvatures.
pub fn stokes_identity_check(levels: &[Arc<EigenLevel>], b: &PolyForm, b2: &PolyForm) -> Result<StokesOutcome> {
    let n = b.n();
    if b.degree() != b2.degree() || 2 * b.degree() + 2 != n {
        return Err(Error::Degree("Stokes identity needs two middle-minus-one forms".into()));
    }
    let parts2 = level_parts(levels, b2)?;
    let mut lhs = MeasureValue::zero(n);
    // parts of B outside B2's levels pair to zero against J̃B2
    level_parts(levels, b)?;
    for (deg, part) in b.homogeneous_parts() {
        for (level, y) in &parts2 {
            if level.i as u32 != deg {
                continue;
            }
            let jy = level.space.combine(&level.apply_jtilde(y));
            lhs = lhs + sphere_inner_unchecked(&part, &jy)?;
        }
    }
    let rhs = -l2_inner_ball(&b.ext_d(), &b2.ext_d().hodge_star())?;
    Ok(StokesOutcome { lhs, rhs })
}

/// Ball energies of `H^± = (1 ± √−1·*)dB/2` and V-norms of the chiral and
/// antichiral parts of `i*B`.
#[derive(Clone, Debug)]
pub struct EnergyOutcome {
    pub h_plus: MeasureValue,
    pub h_minus: MeasureValue,
    pub v_plus: MeasureValue,
    pub v_minus: MeasureValue,
}

impl EnergyOutcome {
    /// `‖H⁺‖² − ‖H⁻‖²`.
    pub fn difference(&self) -> MeasureValue {
        self.h_plus.clone() - self.h_minus.clone()
    }
}

/// Checks `‖H⁺‖² − ‖H⁻‖² = ‖α₊‖²_V − ‖α₋‖²_V` and its sign. With `sign = 1`
/// the restriction must be chiral and the difference is required to be
/// `≥ 0`; with `sign = −1` antichiral and `≤ 0`.
pub fn chirality_energy_check(levels: &[Arc<EigenLevel>], b: &PolyForm, sign: i64) -> Result<EnergyOutcome> {
    let n = b.n();
    let proj = project_onto_levels(levels, b)?;
    if !proj.lies_in_levels() {
        return Err(Error::Precondition("restriction is not in the computed levels".into()));
    }
    let ok = if sign >= 0 { proj.is_chiral() } else { proj.is_antichiral() };
    if !ok {
        return Err(Error::Precondition(format!(
            "restriction is not in the {} eigenspace of J",
            if sign >= 0 { "+√−1" } else { "−√−1" }
        )));
    }
    let db = b.ext_d();
    let half = GaussScalar::real(crate::scalar::rational(1, 2));
    let hp = db.chirality_defect(-1).scale(&half);
    let hm = db.chirality_defect(1).scale(&half);
    let h_plus = l2_inner_ball(&hp, &hp)?;
    let h_minus = l2_inner_ball(&hm, &hm)?;
    let mut v_plus = MeasureValue::zero(n);
    let mut v_minus = MeasureValue::zero(n);
    for (l, level) in levels.iter().enumerate() {
        let split = level.split();
        let combine = |coeffs: &[GaussScalar], basis: &[Vec<GaussScalar>]| {
            let mut out = level.space.zero_coords();
            for (a, v) in coeffs.iter().zip(basis) {
                for (o, x) in out.iter_mut().zip(v) {
                    *o += &a.mul_ref(x);
                }
            }
            out
        };
        let xp = combine(&proj.chiral[l], &split.chiral_coords);
        let xm = combine(&proj.antichiral[l], &split.antichiral_coords);
        v_plus = v_plus + MeasureValue::new(level.v_coords(&xp, &xp), n);
        v_minus = v_minus + MeasureValue::new(level.v_coords(&xm, &xm), n);
    }
    let outcome = EnergyOutcome { h_plus, h_minus, v_plus, v_minus };
    let diff = outcome.difference();
    if diff != outcome.v_plus.clone() - outcome.v_minus.clone() {
        return Err(Error::Invariant("energy difference differs from the V-norm difference".into()));
    }
    let signed = if sign >= 0 { diff } else { -diff };
    if !signed.value.is_real() || signed.value.re.is_negative() {
        return Err(Error::Invariant("chirality energy inequality fails".into()));
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn levels(k: usize, n: usize) -> Vec<Arc<EigenLevel>> {
        (1..=n).map(|i| eigenlevel_cached(k, i).unwrap()).collect()
    }

    #[test]
    fn worked_stokes_instance() {
        let ls = levels(0, 1);
        let out = stokes_identity_check(&ls, &PolyForm::coord(2, 0), &PolyForm::coord(2, 1)).unwrap();
        assert_eq!(out.lhs.value, GaussScalar::from_i64(1));
        assert!(out.holds());
        let same = stokes_identity_check(&ls, &PolyForm::coord(2, 0), &PolyForm::coord(2, 0)).unwrap();
        assert!(same.lhs.is_zero() && same.holds());
    }

    #[test]
    fn v_inner_examples() {
        let l1 = eigenlevel_cached(0, 1).unwrap();
        let x1 = PolyForm::coord(2, 0);
        assert_eq!(v_inner(&l1, &x1, &x1).unwrap().value, GaussScalar::from_i64(1));
        let l2 = eigenlevel_cached(0, 2).unwrap();
        // x1·x2 has L² norm 1/4 on the circle, so V-norm 2·(1/4)
        let q = PolyForm::coord(2, 0).mul_function(&PolyForm::coord(2, 1));
        assert_eq!(v_inner(&l2, &q, &q).unwrap().value, GaussScalar::real(crate::scalar::rational(1, 2)));
        assert!(v_inner(&l2, &x1, &x1).is_err());
    }

    #[test]
    fn circle_w_basis() {
        let w = assemble_w(0, 3).unwrap();
        assert_eq!(w.dim(), 3);
        assert!(w.cross_gram.is_zero());
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(w.gram[(a, b)].is_zero(), a != b);
            }
        }
    }

    #[test]
    fn energy_of_z() {
        let ls = levels(0, 2);
        let z = &PolyForm::coord(2, 0) + &PolyForm::coord(2, 1).scale(&GaussScalar::i());
        let out = chirality_energy_check(&ls, &z, 1).unwrap();
        assert!(out.h_minus.is_zero());
        assert_eq!(out.h_plus.value, GaussScalar::real(int(2)));
        let zbar = z.conj();
        let mirrored = chirality_energy_check(&ls, &zbar, -1).unwrap();
        assert!(mirrored.h_plus.is_zero());
        assert!(chirality_energy_check(&ls, &zbar, 1).is_err());
        let zero = chirality_energy_check(&ls, &PolyForm::zero(2, 0), 1).unwrap();
        assert!(zero.h_plus.is_zero() && zero.h_minus.is_zero());
    }

    #[test]
    fn vanishing_restriction() {
        // (|x|² − 1)·x1 restricts to zero on the circle
        let ls = levels(0, 3);
        let x1 = PolyForm::coord(2, 0);
        let b = &PolyForm::radius_squared(2).mul_function(&x1) - &x1;
        let out = chirality_energy_check(&ls, &b, 1).unwrap();
        assert_eq!(out.h_plus, out.h_minus);
    }
}
