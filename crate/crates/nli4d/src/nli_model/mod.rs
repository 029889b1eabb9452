//! Closed-form NLI coefficient of 4D formats and the projection-based EGN
//! baseline, for a single channel over identical amplified spans.

mod coefficients;
mod eta;
mod integrals;
mod kernel;
mod link;
mod quad;

pub use coefficients::{
    class_members, compute_modulation_coefficients, compute_modulation_coefficients_for, ModulationCoefficients,
    CLASS_REPS, PAIRED,
};
pub use eta::{
    egn_closed_form, eta_4d, eta_egn_projection, eta_from_coefficients, eta_from_moments, eta_metrics, to_db,
    EtaEstimate, EtaMetrics, Method, ModelError,
};
pub use integrals::{
    compute_chi_integrals, kernel_tables, normalized_integrals, ChiError, KTable, LinkIntegrals, Primitives,
    QuadSettings, CLASS_BLOCKS,
};
pub use kernel::{kernel_of_theta, link_kernel, KernelTable, NormalizedKernel};
pub use link::{beta2_from_dispersion, LinkError, LinkSpec, C_LIGHT};
pub use quad::Rule;
