//! Concrete syntax for formulas and models.

mod formula;
mod model;

pub use formula::{parse_formula, parse_measure_formula};
pub use model::{parse_model, serialize_model, ModelDocument, ModelKind};
