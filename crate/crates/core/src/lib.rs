//! Exact computation of chiral conformal-block spaces on the disks D^{4k+2}.
//!
//! The crate builds eigenforms of the sphere S^{4k+1} out of polynomial
//! differential forms on ℝ^{4k+2}, splits them by chirality, models the
//! Heisenberg/Fock representation on coherent states, and counts invariant
//! functionals at finite truncation. All arithmetic is exact over ℚ(i);
//! powers of π are carried as a symbolic unit.

pub mod blocks;
pub mod error;
pub mod exterior;
pub mod fock;
pub mod linalg;
pub mod random;
pub mod scalar;
pub mod spectra;
pub mod verify;

pub use blocks::{conformal_block_dim, BlockReport, ChiralRepresentative};
pub use error::{Error, Result};
pub use exterior::{MeasureValue, PolyForm};
pub use fock::{FormalScalar, WFin};
pub use scalar::GaussScalar;
pub use spectra::{assemble_w, eigenlevel, EigenLevel, WBasis};
pub use verify::{run_suite, Suite, SuiteSummary};
