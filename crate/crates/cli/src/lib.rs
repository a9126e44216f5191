//! Model documents and the `algebroid` command-line driver.

pub mod model;
pub mod run;
pub mod syntax;

pub use model::{Model, Value};
pub use run::{execute, Report};
pub use syntax::{parse, parse_expr, Document, DslError};
