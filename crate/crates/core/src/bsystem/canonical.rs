use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::model::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {message}")]
pub struct SchemaError {
    /// JSON pointer to the offending value, e.g. `/components/0/kind`.
    pub path: String,
    pub message: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    components: Vec<BSystemComponent>,
}

#[derive(Serialize)]
struct DocumentRef<'a> {
    components: &'a [BSystemComponent],
}

pub fn save_canonical(components: &[BSystemComponent]) -> String {
    let mut s = serde_json::to_string_pretty(&DocumentRef { components }).expect("component model is always serializable");
    s.push('\n');
    s
}

pub fn load_canonical(text: &str) -> Result<Vec<BSystemComponent>, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: Document = serde_path_to_error::deserialize(de).map_err(|e| {
        let mut path = pointer(e.path());
        let message = e.inner().to_string();
        if let Some(field) = missing_field(&message) {
            path.push('/');
            path.push_str(field);
        }
        SchemaError { path, message }
    })?;
    for (i, c) in doc.components.iter().enumerate() {
        check_component(i, c)?;
    }
    Ok(doc.components)
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

fn missing_field(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("missing field `")?;
    rest.split('`').next()
}

fn check_component(i: usize, c: &BSystemComponent) -> Result<(), SchemaError> {
    let at = |suffix: &str| format!("/components/{i}{suffix}");
    // Refinement links are left to the store checks (inv0_2/inv0_6), which
    // report them against the whole chain.
    for (clause, formulas) in [("properties", &c.properties), ("invariants", &c.invariants)] {
        for (j, f) in formulas.iter().enumerate() {
            if !f.op.accepts(f.args.len()) {
                return Err(SchemaError {
                    path: at(&format!("/{clause}/{j}/args")),
                    message: format!("{:?} cannot take {} operand(s)", f.op, f.args.len()),
                });
            }
        }
    }
    for (j, a) in c.initialisations.iter().enumerate() {
        if a.op == InitOperator::BecomeEqual2EmptySet && !a.args.is_empty() {
            return Err(SchemaError {
                path: at(&format!("/init/{j}/args")),
                message: "BecomeEqual2EmptySet takes no arguments".into(),
            });
        }
    }
    Ok(())
}
