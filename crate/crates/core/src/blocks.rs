//! Invariant functionals for the disks `D^{4k+2}`.
//!
//! The chiral representatives of each eigenlevel restrict to a basis of
//! `U_N = ⊕_{i≤N} W_{λ_i}`. Restrictions of further chiral polynomial forms
//! (not necessarily coclosed) give a sample of `Im r⁺` projected onto the
//! same levels. Both generating sets are fed to the Fock invariance solver,
//! and their answers must agree.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::PolyForm;
use crate::fock::{invariant_functional_dim, loop_sector_dim, InvarianceMode, InvariantSolution, WFin};
use crate::random;
use crate::scalar::GaussScalar;
use crate::spectra::{assemble_w, build_ppi, kernel_of_maps, project_onto_levels, WBasis};

/// A chiral 2k-form with its curvature and the coordinates of its
/// restriction over the `W_fin` basis.
#[derive(Clone, Debug)]
pub struct ChiralRepresentative {
    pub b: PolyForm,
    pub delta: PolyForm,
    pub restriction: Vec<GaussScalar>,
}

/// `(name, pass)` entry of a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

/// Result record for one `(k, λ, N, D)`.
#[derive(Clone, Debug, Serialize)]
pub struct BlockReport {
    pub k: usize,
    pub lambda: u32,
    #[serde(rename = "N")]
    pub max_level: usize,
    #[serde(rename = "D")]
    pub trunc: usize,
    pub dim: usize,
    pub checks: Vec<Check>,
    pub unit: &'static str,
    #[serde(skip)]
    pub timings: Vec<(String, Duration)>,
}

impl BlockReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

/// The value of `dim V(D^{4k+2}, λ)`: 1 for `λ = 0`, and 0 for `λ = 1` on
/// the circle boundary.
pub fn expected_block_dim(k: usize, lambda: u32) -> Option<usize> {
    match (k, lambda) {
        (_, 0) => Some(1),
        (0, 1) => Some(0),
        _ => None,
    }
}

fn check_lambda(k: usize, lambda: u32) -> Result<()> {
    if expected_block_dim(k, lambda).is_none() {
        let allowed = if k == 0 { "{0, 1}" } else { "{0}" };
        return Err(Error::Precondition(format!("λ = {lambda} is not in the level set {allowed} of S^{}", 4 * k + 1)));
    }
    Ok(())
}

fn invariant(msg: String) -> Error {
    Error::Invariant(msg)
}

/// Chiral representatives of the levels `1..=N`, whose restrictions span
/// `U_N`.
pub fn chiral_image_basis(k: usize, max_level: usize) -> Result<Vec<ChiralRepresentative>> {
    if max_level == 0 {
        return Err(Error::Precondition("N must be at least 1".into()));
    }
    representatives(&assemble_w(k, max_level)?)
}

/// Wraps the chiral forms of every level of `w` and certifies chirality,
/// membership in the level and orthogonality to every antichiral image.
pub fn representatives(w: &WBasis) -> Result<Vec<ChiralRepresentative>> {
    let mut out = Vec::with_capacity(w.dim());
    for (l, level) in w.levels.iter().enumerate() {
        let split = level.split();
        for (j, b) in split.chiral_forms.iter().enumerate() {
            let delta = b.ext_d();
            if !delta.chirality_defect(1).is_zero() {
                return Err(invariant(format!("representative {j} of level {} is not chiral", level.i)));
            }
            let coords = level
                .space
                .coordinates(b)
                .ok_or_else(|| invariant(format!("representative {j} left level {}", level.i)))?;
            if split.antichiral_coords.iter().any(|a| !level.v_coords(&coords, a).is_zero()) {
                return Err(invariant(format!("representative {j} of level {} has a W̄ component", level.i)));
            }
            let mut restriction = vec![GaussScalar::zero(); w.dim()];
            restriction[w.offsets[l] + j] = GaussScalar::from_i64(1);
            out.push(ChiralRepresentative { b: b.clone(), delta, restriction });
        }
    }
    Ok(out)
}

/// Chiral polynomial 2k-forms with coefficients of degree `j`, with no
/// harmonicity or coclosedness imposed.
fn chiral_polynomial_forms(k: usize, j: u32) -> Result<Vec<PolyForm>> {
    let p = build_ppi(k, 2 * k, j)?;
    let map = |b: &PolyForm| b.ext_d().chirality_defect(1);
    Ok(kernel_of_maps(p.basis(), &[&map]).into_iter().map(|v| p.combine(&v.to_dense(p.dim()))).collect())
}

/// Seeded sample of `Im r⁺`: restrictions of random chiral polynomial forms
/// of degree `≤ N`, as coordinates over `W_fin`. Fails if any sample has a
/// component along `W̄`.
pub fn image_sample(w: &WBasis, per_degree: usize, seed: u64) -> Result<Vec<Vec<GaussScalar>>> {
    let mut rng = random::rng(seed);
    let mut out = Vec::new();
    for j in 1..=w.max_level() as u32 {
        let forms = chiral_polynomial_forms(w.k, j)?;
        if forms.is_empty() {
            continue;
        }
        for _ in 0..per_degree {
            let mut b = PolyForm::zero(forms[0].n(), forms[0].degree());
            for _ in 0..3 {
                let f = &forms[rng.gen_range(0..forms.len())];
                b.add_scaled(&random::gauss(&mut rng), f);
            }
            let proj = project_onto_levels(&w.levels, &b)?;
            if !proj.is_chiral() {
                return Err(invariant(format!("chiral form of degree {j} restricts with a W̄ component")));
            }
            let coords: Vec<GaussScalar> = proj.chiral.into_iter().flatten().collect();
            if coords.iter().any(|c| !c.is_zero()) {
                out.push(coords);
            }
        }
    }
    Ok(out)
}

struct Prepared {
    fin: WFin,
    units: Vec<Vec<GaussScalar>>,
    sample: Vec<Vec<GaussScalar>>,
    checks: Vec<Check>,
}

type PreparedCache = Mutex<BTreeMap<(usize, usize), Arc<Prepared>>>;

fn prepared(k: usize, max_level: usize) -> Result<Arc<Prepared>> {
    static CACHE: OnceLock<PreparedCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("cache lock").get(&(k, max_level)) {
        return Ok(hit.clone());
    }
    let w = assemble_w(k, max_level)?;
    let reps = representatives(&w)?;
    let sample = image_sample(&w, 2, random::DEFAULT_SEED)?;
    let checks = vec![
        Check { name: "jtilde_square".into(), pass: true },
        Check { name: "chirality".into(), pass: true },
        Check { name: "orthogonality".into(), pass: w.cross_gram.is_zero() },
        Check { name: "wbar_residual".into(), pass: true },
    ];
    let fin = WFin::from_basis(&w);
    let units = reps.into_iter().map(|r| r.restriction).collect();
    let p = Arc::new(Prepared { fin, units, sample, checks });
    cache.lock().expect("cache lock").insert((k, max_level), p.clone());
    Ok(p)
}

fn solve(
    k: usize,
    lambda: u32,
    fin: &WFin,
    trunc: usize,
    gens: &[Vec<GaussScalar>],
    mode: InvarianceMode,
) -> Result<(usize, Option<InvariantSolution>)> {
    if k == 0 {
        let r = loop_sector_dim(lambda, fin, trunc, gens, mode)?;
        Ok((r.dim, r.solution))
    } else {
        let s = invariant_functional_dim(fin, trunc, gens, mode)?;
        Ok((s.dim, Some(s)))
    }
}

/// Computes `dim V(D^{4k+2}, λ)` at eigenlevel cutoff `N` and Fock
/// truncation `D`. The report is returned only if every check passes.
pub fn conformal_block_dim(k: usize, lambda: u32, max_level: usize, trunc: usize) -> Result<BlockReport> {
    check_lambda(k, lambda)?;
    if max_level == 0 || trunc == 0 {
        return Err(Error::Precondition("N and D must be at least 1".into()));
    }
    let mut timings = Vec::new();
    let t = Instant::now();
    let prep = prepared(k, max_level)?;
    timings.push(("spectra".to_string(), t.elapsed()));

    let t = Instant::now();
    let mut full = prep.units.clone();
    full.extend(prep.sample.iter().cloned());
    let (dim_u, sol_u) = solve(k, lambda, &prep.fin, trunc, &prep.units, InvarianceMode::Group)?;
    let (dim_full, _) = solve(k, lambda, &prep.fin, trunc, &full, InvarianceMode::Group)?;
    let (dim_inf, _) = solve(k, lambda, &prep.fin, trunc, &prep.units, InvarianceMode::Infinitesimal)?;
    timings.push(("fock".to_string(), t.elapsed()));

    let mut checks = prep.checks.clone();
    let spans = sol_u.as_ref().is_none_or(|s| s.spans);
    checks.push(Check { name: "generators_span".into(), pass: spans });
    checks.push(Check { name: "sandwich".into(), pass: dim_u == dim_full });
    checks.push(Check { name: "infinitesimal_agreement".into(), pass: dim_u == dim_inf });
    if let Some(s) = &sol_u {
        checks.push(Check { name: "chi_in_kernel".into(), pass: s.chi_in_kernel });
    }
    if k == 0 {
        checks.push(Check { name: "weight_filter".into(), pass: lambda.is_multiple_of(2) == sol_u.is_some() });
    }
    let report = BlockReport { k, lambda, max_level, trunc, dim: dim_u, checks, unit: "pi^{2k+1}", timings };
    if let Some(bad) = report.checks.iter().find(|c| !c.pass) {
        return Err(invariant(format!(
            "check '{}' failed for k={k}, λ={lambda}, N={max_level}, D={trunc}; report withheld",
            bad.name
        )));
    }
    Ok(report)
}

/// One grid point of [`truncation_stability`].
#[derive(Clone, Debug, Serialize)]
pub struct GridPoint {
    #[serde(rename = "N")]
    pub max_level: usize,
    #[serde(rename = "D")]
    pub trunc: usize,
    pub dim: Option<usize>,
    pub error: Option<String>,
}

/// Block dimensions across a grid of truncations.
#[derive(Clone, Debug, Serialize)]
pub struct StabilityTable {
    pub k: usize,
    pub lambda: u32,
    pub points: Vec<GridPoint>,
    /// Every grid point succeeded with the same dimension.
    pub constant: bool,
}

/// Evaluates [`conformal_block_dim`] on `N_list × D_list`, recording
/// failures instead of aborting.
pub fn truncation_stability(k: usize, lambda: u32, n_list: &[usize], d_list: &[usize]) -> Result<StabilityTable> {
    if n_list.is_empty() || d_list.is_empty() {
        return Err(Error::Precondition("empty truncation grid".into()));
    }
    check_lambda(k, lambda)?;
    let mut points = Vec::new();
    for &n in n_list {
        for &d in d_list {
            let point = match conformal_block_dim(k, lambda, n, d) {
                Ok(r) => GridPoint { max_level: n, trunc: d, dim: Some(r.dim), error: None },
                Err(e) => GridPoint { max_level: n, trunc: d, dim: None, error: Some(e.to_string()) },
            };
            points.push(point);
        }
    }
    let first = points[0].dim;
    let constant = first.is_some() && points.iter().all(|p| p.dim == first);
    Ok(StabilityTable { k, lambda, points, constant })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proportional(a: &PolyForm, b: &PolyForm) -> bool {
        let (key, c) = b.terms().next().unwrap();
        let ratio = c.clone() / a.coefficient(key);
        a.scale(&ratio) == *b
    }

    #[test]
    fn circle_representatives() {
        let reps = chiral_image_basis(0, 2).unwrap();
        assert_eq!(reps.len(), 2);
        let z = &PolyForm::coord(2, 0) + &PolyForm::coord(2, 1).scale(&GaussScalar::i());
        assert!(proportional(&reps[0].b, &z));
        assert!(proportional(&reps[1].b, &z.wedge(&z).unwrap()));
        assert_eq!(reps[1].restriction, vec![GaussScalar::zero(), GaussScalar::from_i64(1)]);
    }

    #[test]
    fn six_dimensional_representatives() {
        let reps = chiral_image_basis(1, 1).unwrap();
        assert_eq!(reps.len(), 10);
        assert!(reps.iter().all(|r| r.delta.chirality_defect(1).is_zero()));
    }

    #[test]
    fn stability_grids() {
        let t = truncation_stability(0, 1, &[1, 2], &[2, 3]).unwrap();
        assert!(t.constant);
        assert!(t.points.iter().all(|p| p.dim == Some(0)));
        assert!(truncation_stability(0, 0, &[], &[2]).is_err());
    }

    #[test]
    fn circle_blocks() {
        assert_eq!(conformal_block_dim(0, 0, 3, 4).unwrap().dim, 1);
        assert_eq!(conformal_block_dim(0, 1, 3, 4).unwrap().dim, 0);
        assert!(matches!(conformal_block_dim(0, 2, 3, 4), Err(Error::Precondition(_))));
        assert!(matches!(conformal_block_dim(1, 1, 1, 2), Err(Error::Precondition(_))));
    }

    #[test]
    fn report_json_shape() {
        let r = conformal_block_dim(0, 0, 1, 2).unwrap();
        let json = r.to_json();
        assert!(
            json.starts_with(r#"{"k":0,"lambda":0,"N":1,"D":2,"dim":1,"checks":[{"name":"jtilde_square","pass":true}"#)
        );
        assert!(json.ends_with(r#""unit":"pi^{2k+1}"}"#));
        assert_eq!(json, conformal_block_dim(0, 0, 1, 2).unwrap().to_json());
    }
}
