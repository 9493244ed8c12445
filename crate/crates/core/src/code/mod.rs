//! Parity-check matrices, their quasi-cyclic constructions and structural
//! properties.

pub mod gamma;
pub mod girth;
pub mod matrix;
pub mod search;
pub mod spec;

pub use gamma::{adjacency_row, distinct_row_profiles, GammaRow, RowProfile};
pub use girth::{girth, Girth, DEFAULT_GIRTH_CUTOFF};
pub use matrix::{build_monomial, build_qc2, ParityCheckMatrix, Structure};
pub use spec::{CodeKind, CodeSpecFile};
