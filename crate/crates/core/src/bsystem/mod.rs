//! B System components, their Atelier-B style text, and the canonical JSON form.

mod canonical;
mod model;
mod render;

pub use canonical::{load_canonical, save_canonical, SchemaError};
pub use model::*;
pub use render::{emit_atelier, emit_chain, render_formula, render_formula_with, render_init, EmitError, EmitMode, RenderError};
