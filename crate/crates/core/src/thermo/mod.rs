//! Finite-N free energies, outcome measures, the mean-field variational
//! formula and its BCH-corrected version.

mod gibbs;
mod legendre;
mod limit;
mod measure;
mod variational;

pub use gibbs::{f_n, golden_thompson_gap, log_trace_exp, GibbsEnsemble, GibbsPair, GtGap};
pub use legendre::{legendre, LegendreTransform};
pub use limit::{f_limit, f_limit_scan, Certificate, FLimit, LimitOptions};
pub use measure::{outcome_measure, Atom, Bin, OutcomeMeasure, DEFAULT_BINS};
pub use variational::{
    mean_field_sup, vn_entropy, VariationalOptions, VariationalResult, ENTROPY_SIGN,
};
