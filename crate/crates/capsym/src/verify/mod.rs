//! Inequality verification experiments and reports.

pub mod compare;
pub mod constants;
pub mod moser;
pub mod report;
pub mod sobolev;

pub use compare::{bossel_daners_compare, cap_comparison_grid, talenti_compare};
pub use constants::{MoserConstants, MoserConvention};
pub use moser::{moser_functional, moser_sequence};
pub use report::{inequality_tol, VerificationReport};
pub use sobolev::{
    best_constant_estimate, extremal_family, min_quotient, sobolev_quotient, subcritical_quotients,
    ExtremalFamily,
};
