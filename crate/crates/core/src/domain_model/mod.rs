//! Ontology metamodel for refinement-level domain models.

mod chain;
mod dsl;
mod types;
mod validate;

pub use chain::ChainIndex;
pub use dsl::{parse_dsl, parse_dsl_with_spans, serialize_dsl, ParseError, ParseErrorKind, SourceMap};
pub use types::*;
pub use validate::validate;
