//! Translation of ontology domain models into B System components, and
//! synchronization of additive B-side edits back into the domain model.

pub mod bsystem;
pub mod domain_model;
pub mod report;
pub mod sync_back;
pub mod translator;

pub use report::{DiagCode, Diagnostic, Severity, ValidationReport};
