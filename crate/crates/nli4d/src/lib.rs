//! Nonlinear interference (NLI) power coefficients of dual-polarization 4D
//! modulation formats.
//!
//! * [`constellation`]: formats, generators, catalog and exact moments.
//! * [`nli_model`]: closed-form 4D model, 4D-EGN baseline and kernel integrals.
//! * [`ssfm_sim`]: Manakov split-step reference simulation.
//! * [`bench_harness`]: comparisons, catalog sweeps and reports.

pub mod bench_harness;
pub mod constellation;
pub mod nli_model;
pub mod ssfm_sim;
