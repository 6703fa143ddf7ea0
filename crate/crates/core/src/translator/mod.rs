//! Forward translation from domain-model chains to B System components.

mod check;
mod driver;
mod guards;
mod store;

pub use check::check_store;
pub use driver::{translate, TranslateError};
pub use guards::{enabled_rules, EnabledRule};
pub use store::{ConceptImage, Correspondence, CorrespondenceStore, StoreFormatError};

pub(crate) use check::BView;
