//! Seeded generators for reproducible test data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exterior::{basis_keys, PolyForm};
use crate::scalar::GaussScalar;

pub const DEFAULT_SEED: u64 = 42;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on `{−9..9} + {−9..9}·i`.
pub fn gauss<R: Rng>(rng: &mut R) -> GaussScalar {
    GaussScalar::from_ints(rng.gen_range(-9..=9), rng.gen_range(-9..=9))
}

/// A random element of `P^p_i` on ℝⁿ with `terms` randomly chosen monomials
/// (fewer if the space is smaller).
pub fn poly_form<R: Rng>(rng: &mut R, n: usize, p: usize, i: u32, terms: usize) -> PolyForm {
    let keys = basis_keys(n, p, i);
    let mut out = PolyForm::zero(n, p);
    if keys.is_empty() {
        return out;
    }
    for _ in 0..terms {
        let key = keys[rng.gen_range(0..keys.len())].clone();
        out.add_term(key, gauss(rng));
    }
    out
}

/// Random Gaussian-rational coefficient vector.
pub fn gauss_vec<R: Rng>(rng: &mut R, len: usize) -> Vec<GaussScalar> {
    (0..len).map(|_| gauss(rng)).collect()
}
