//! Harmonic polynomial forms and the coexact eigenlevels of S^{4k+1}.
//!
//! The spaces `H^p_i`, `'H^p_i` and `''H^p_i` are exact kernels inside the
//! monomial space `P^p_i` of degree-`p` forms on ℝ^{4k+2} with degree-`i`
//! coefficients. An [`EigenLevel`] packages `''H^{2k}_i` together with the
//! sphere Gram matrix, the operator `J̃ = *d` on restrictions and the
//! chirality split.

mod level;
mod space;
mod wspace;

pub use level::{chiral_split, eigenlevel, eigenlevel_cached, ChiralSplit, EigenLevel};
pub use space::{
    ambient_dim, build_hpi, build_hpp_primes, build_hpp_second, build_ppi, hpp_dim_formula, kernel_of_maps, FormSpace,
};
pub use wspace::{
    assemble_w, chirality_energy_check, project_onto_levels, stokes_identity_check, v_inner, EnergyOutcome,
    LevelProjection, StokesOutcome, WBasis,
};

/// Default highest eigenlevel per `k`.
pub fn default_max_level(k: usize) -> usize {
    match k {
        0 => 8,
        1 => 3,
        _ => 1,
    }
}
