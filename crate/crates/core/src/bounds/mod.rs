//! Guaranteed correction radii and certified failure-rate bounds.

pub mod capability;
pub mod dfr;

pub use capability::{
    capability, chilappagari_bound, delta_z, max_col_intersection, mu_z, t_majority, t_mu, table1,
    CapabilityReport, Radius, Table1Row, ThresholdRange,
};
pub use dfr::{
    bsc_failure_bound, dfr_bound, dfr_bound_girth6_for, dfr_bound_girth6_regular, dfr_bound_qc, dfr_bound_regular_odd,
    optimize_threshold, qc_analyzer, BoundReport, DfrAnalyzer, Method,
};
