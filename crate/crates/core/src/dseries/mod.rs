//! Dirichlet series: coefficient algebra, truncation planning and
//! evaluation in the half-plane of absolute convergence.

pub mod algebra;
pub mod euler;
mod eval;
pub mod grid;
pub mod ortho;
pub mod parse;
mod spec;
pub mod tail;

pub use eval::{coefficients, evaluate, evaluate_derivative, truncation_length, EvalResult, Precision, Series};
pub use euler::{log_derivative_local, log_local, log_local_factor};
pub use grid::{GridValues, RowMin};
pub use ortho::{orthogonality_partial_sum, orthogonality_report, OrthogonalityReport};
pub use parse::{parse_complex, parse_series, split_top_level};
pub use spec::{CoeffBound, EulerData, Periodicity, SeriesSpec};
