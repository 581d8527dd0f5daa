//! Seeded verification suites over computed eigenlevels.
//!
//! Each suite draws its trials from a ChaCha stream seeded by the caller, so
//! a `(suite, k, trials, seed)` tuple always produces the same summary.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::PolyForm;
use crate::fock::{cocycle_pairing, projective_defect, CoherentVector, FormalScalar, HeisenbergElement, WFin};
use crate::random;
use crate::scalar::GaussScalar;
use crate::spectra::{
    assemble_w, chirality_energy_check, default_max_level, eigenlevel_cached, stokes_identity_check, EigenLevel,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Stokes,
    Energy,
    Projective,
    Cocycle,
    Ortho,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Stokes, Suite::Energy, Suite::Projective, Suite::Cocycle, Suite::Ortho];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Stokes => "stokes",
            Suite::Energy => "energy",
            Suite::Projective => "projective",
            Suite::Cocycle => "cocycle",
            Suite::Ortho => "ortho",
        }
    }

    /// Expands a CLI suite name, where `all` selects every suite.
    pub fn parse_selection(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            Ok(Self::ALL.to_vec())
        } else {
            Ok(vec![s.parse()?])
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::Precondition(format!("unknown suite '{s}'")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome counts of one suite run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub k: usize,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub failures: Vec<String>,
}

impl SuiteSummary {
    pub fn all_pass(&self) -> bool {
        self.passed == self.trials
    }

    fn collect(suite: Suite, k: usize, seed: u64, outcomes: Vec<std::result::Result<(), String>>) -> Self {
        let trials = outcomes.len();
        let failures: Vec<String> = outcomes.into_iter().filter_map(|o| o.err()).collect();
        SuiteSummary { suite: suite.name().into(), k, seed, trials, passed: trials - failures.len(), failures }
    }
}

/// Levels used by the suites: the default spectrum range of each `k`.
pub fn suite_levels(k: usize) -> Result<Vec<Arc<EigenLevel>>> {
    (1..=default_max_level(k)).map(|i| eigenlevel_cached(k, i)).collect()
}

/// A random combination of `terms` basis forms of one level.
fn level_form<R: Rng>(rng: &mut R, level: &EigenLevel, terms: usize) -> PolyForm {
    let basis = level.space.basis();
    let mut out = PolyForm::zero(level.n(), level.space.p());
    for _ in 0..terms {
        let b = &basis[rng.gen_range(0..basis.len())];
        out.add_scaled(&random::gauss(rng), b);
    }
    out
}

/// Sum of random level forms over one or two random levels.
fn mixed_form<R: Rng>(rng: &mut R, levels: &[Arc<EigenLevel>]) -> PolyForm {
    let count = rng.gen_range(1..=2.min(levels.len()));
    let mut out = PolyForm::zero(levels[0].n(), levels[0].space.p());
    for _ in 0..count {
        let level = &levels[rng.gen_range(0..levels.len())];
        out = &out + &level_form(rng, level, 2);
    }
    out
}

/// Draws every trial input up front so the outcome is independent of how
/// the checks are scheduled.
fn run_trials<T: Send + Sync>(
    inputs: Vec<T>,
    check: impl Fn(&T) -> std::result::Result<(), String> + Sync + Send,
) -> Vec<std::result::Result<(), String>> {
    inputs.par_iter().map(check).collect()
}

fn stokes(k: usize, trials: usize, seed: u64) -> Result<SuiteSummary> {
    let levels = suite_levels(k)?;
    let mut rng = random::rng(seed);
    let inputs: Vec<(PolyForm, PolyForm)> =
        (0..trials).map(|_| (mixed_form(&mut rng, &levels), mixed_form(&mut rng, &levels))).collect();
    let outcomes = run_trials(inputs, |(b, b2)| match stokes_identity_check(&levels, b, b2) {
        Ok(o) if o.holds() => Ok(()),
        Ok(o) => Err(format!("stokes: {} != {}", o.lhs, o.rhs)),
        Err(e) => Err(format!("stokes: {e}")),
    });
    Ok(SuiteSummary::collect(Suite::Stokes, k, seed, outcomes))
}

/// Every chiral and antichiral representative of every suite level, then
/// `trials` random combinations within single chirality classes.
fn energy(k: usize, trials: usize, seed: u64) -> Result<SuiteSummary> {
    let levels = suite_levels(k)?;
    let mut inputs: Vec<(usize, PolyForm, i64)> = Vec::new();
    for (l, level) in levels.iter().enumerate() {
        let split = level.split();
        inputs.extend(split.chiral_forms.iter().map(|b| (l, b.clone(), 1)));
        inputs.extend(split.antichiral_forms.iter().map(|b| (l, b.clone(), -1)));
    }
    let mut rng = random::rng(seed);
    for t in 0..trials {
        let l = rng.gen_range(0..levels.len());
        let split = levels[l].split();
        let (forms, sign) = if t % 2 == 0 { (&split.chiral_forms, 1) } else { (&split.antichiral_forms, -1) };
        let mut b = PolyForm::zero(levels[l].n(), levels[l].space.p());
        for _ in 0..3 {
            b.add_scaled(&random::gauss(&mut rng), &forms[rng.gen_range(0..forms.len())]);
        }
        if !b.is_zero() {
            inputs.push((l, b, sign));
        }
    }
    let outcomes = run_trials(inputs, |(l, b, sign)| {
        chirality_energy_check(&levels[*l..=*l], b, *sign)
            .map(|_| ())
            .map_err(|e| format!("energy (level {}): {e}", levels[*l].i))
    });
    Ok(SuiteSummary::collect(Suite::Energy, k, seed, outcomes))
}

fn sparse_vec<R: Rng>(rng: &mut R, len: usize) -> Vec<GaussScalar> {
    let mut v = vec![GaussScalar::zero(); len];
    for _ in 0..2.min(len) {
        v[rng.gen_range(0..len)] = random::gauss(rng);
    }
    v
}

fn projective(k: usize, trials: usize, seed: u64) -> Result<SuiteSummary> {
    let max_level = if k == 0 { 3 } else { 1 };
    let w = WFin::from_basis(&assemble_w(k, max_level)?);
    let m = w.dim();
    let mut rng = random::rng(seed);
    let mut inputs = Vec::with_capacity(trials);
    for _ in 0..trials {
        let v = HeisenbergElement::new(sparse_vec(&mut rng, m), sparse_vec(&mut rng, m));
        let v2 = HeisenbergElement::new(sparse_vec(&mut rng, m), sparse_vec(&mut rng, m));
        let mut probe = CoherentVector::zero();
        for _ in 0..rng.gen_range(1..=3) {
            let c = FormalScalar::constant(random::gauss(&mut rng));
            probe.add(sparse_vec(&mut rng, m), c);
        }
        if probe.is_empty() {
            probe = CoherentVector::epsilon(vec![GaussScalar::zero(); m]);
        }
        inputs.push((v, v2, probe));
    }
    let outcomes = run_trials(inputs, |(v, v2, probe)| match projective_defect(&w, v, v2, probe) {
        Ok(r) if r.is_unit_one() => Ok(()),
        Ok(r) => Err(format!("projective: defect {r}")),
        Err(e) => Err(format!("projective: {e}")),
    });
    Ok(SuiteSummary::collect(Suite::Projective, k, seed, outcomes))
}

/// Antisymmetry on pairs of level forms, plus linearity in the first slot
/// on every third trial.
fn cocycle(k: usize, trials: usize, seed: u64) -> Result<SuiteSummary> {
    let levels = suite_levels(k)?;
    let mut rng = random::rng(seed);
    let mut inputs = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut pick = |terms| {
            let l = rng.gen_range(0..levels.len());
            level_form(&mut rng, &levels[l], terms)
        };
        let (a, b, c) = (pick(2), pick(2), pick(1));
        inputs.push((a, b, c, random::gauss(&mut rng)));
    }
    let outcomes = run_trials(inputs, |(a, b, c, s)| {
        let ab = cocycle_pairing(a, b).map_err(|e| e.to_string())?;
        let ba = cocycle_pairing(b, a).map_err(|e| e.to_string())?;
        if !(ab.clone() + ba.clone()).is_zero() {
            return Err(format!("cocycle: S(a,b) = {ab}, S(b,a) = {ba}"));
        }
        let mix = &a.scale(s) + c;
        let lhs = cocycle_pairing(&mix, b).map_err(|e| e.to_string())?;
        let rhs = ab.scale(s) + cocycle_pairing(c, b).map_err(|e| e.to_string())?;
        if lhs != rhs {
            return Err(format!("cocycle: not linear, {lhs} != {rhs}"));
        }
        Ok(())
    });
    Ok(SuiteSummary::collect(Suite::Cocycle, k, seed, outcomes))
}

/// One trial per chiral representative: its `V`-inner product with every
/// antichiral image of its level vanishes, and with every other level's
/// representatives through the assembled cross Gram.
fn ortho(k: usize, seed: u64) -> Result<SuiteSummary> {
    let levels = suite_levels(k)?;
    let mut inputs = Vec::new();
    for (l, level) in levels.iter().enumerate() {
        for j in 0..level.split().chiral_coords.len() {
            inputs.push((l, j));
        }
    }
    let outcomes = run_trials(inputs, |&(l, j)| {
        let level = &levels[l];
        let split = level.split();
        let c = &split.chiral_coords[j];
        for (a, anti) in split.antichiral_coords.iter().enumerate() {
            let v = level.v_coords(c, anti);
            if !v.is_zero() {
                return Err(format!("ortho: level {} chiral {j} meets antichiral {a} with {v}", level.i));
            }
        }
        Ok(())
    });
    let mut summary = SuiteSummary::collect(Suite::Ortho, k, seed, outcomes);
    // cross-level vanishing is certified while assembling W
    let max_level = levels.len();
    summary.trials += 1;
    match assemble_w(k, max_level) {
        Ok(w) if w.cross_gram.is_zero() => summary.passed += 1,
        Ok(_) => summary.failures.push("ortho: cross Gram of W is nonzero".into()),
        Err(e) => summary.failures.push(format!("ortho: {e}")),
    }
    Ok(summary)
}

/// Runs one suite. `trials` is ignored by `ortho`, which is exhaustive.
pub fn run_suite(suite: Suite, k: usize, trials: usize, seed: u64) -> Result<SuiteSummary> {
    match suite {
        Suite::Stokes => stokes(k, trials, seed),
        Suite::Energy => energy(k, trials, seed),
        Suite::Projective => projective(k, trials, seed),
        Suite::Cocycle => cocycle(k, trials, seed),
        Suite::Ortho => ortho(k, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names() {
        assert_eq!(Suite::parse_selection("all").unwrap().len(), 5);
        assert_eq!("cocycle".parse::<Suite>().unwrap(), Suite::Cocycle);
        assert!(matches!("bogus".parse::<Suite>(), Err(Error::Precondition(_))));
    }

    #[test]
    fn circle_suites_pass() {
        for suite in Suite::ALL {
            let s = run_suite(suite, 0, 10, 7).unwrap();
            assert!(s.all_pass(), "{s:?}");
            assert_eq!(s, run_suite(suite, 0, 10, 7).unwrap());
        }
    }
}
