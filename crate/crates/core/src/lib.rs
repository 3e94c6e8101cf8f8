//! Exact fills of arrays `A: Z^2 -> F` annihilated by a template, a polynomial
//! in the shift operators `X` (one column right) and `Y` (one row down).
//!
//! A template is normalized into an [`Overlay`], a layout prescribes initial
//! values, and a [`FillStrategy`](fill::FillStrategy) solves the remaining
//! cells of a finite window. The [`oracle`] solves the same window by exact
//! elimination and serves as an independent check.

pub mod cli;
pub mod fill;
pub mod layout;
pub mod oracle;
pub mod overlay;
pub mod parser;
pub mod problem;
pub mod scalar;
pub mod template;
pub mod verify;
pub mod window;

pub use fill::{fill, FillResult, FillStatus, StrategyRegistry};
pub use layout::{Layout, ValueSource};
pub use oracle::{classify_and_solve, Classification, LinearSystem};
pub use overlay::Overlay;
pub use parser::parse_template;
pub use problem::{load_problem, load_problem_file, ProblemSpec};
pub use scalar::{FieldDescriptor, Scalar};
pub use template::Template;
pub use verify::oracle_equals_fill;
pub use window::{ArrayWindow, Bounds};
