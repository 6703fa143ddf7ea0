use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bsystem::{Formula, InitialisationAction};

/// Which domain element a fresh abstract set stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hint {
    Concept,
    Dataset,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Change {
    NewAbstractSet { name: String },
    NewEnumeratedSet { name: String, items: Vec<String> },
    NewSetItem { item: String, set: String },
    /// `relation` names the constant relation whose closure a maplet
    /// constant joins; other constants leave it empty.
    NewConstant { name: String, typing: Formula, relation: Option<String> },
    NewVariable { name: String, typing: Formula, init: Option<InitialisationAction> },
}

impl Change {
    pub fn kind(&self) -> &'static str {
        match self {
            Change::NewAbstractSet { .. } => "new_abstract_set",
            Change::NewEnumeratedSet { .. } => "new_enumerated_set",
            Change::NewSetItem { .. } => "new_set_item",
            Change::NewConstant { .. } => "new_constant",
            Change::NewVariable { .. } => "new_variable",
        }
    }

    /// Name of the B element being added.
    pub fn subject(&self) -> &str {
        match self {
            Change::NewAbstractSet { name }
            | Change::NewEnumeratedSet { name, .. }
            | Change::NewConstant { name, .. }
            | Change::NewVariable { name, .. } => name,
            Change::NewSetItem { item, .. } => item,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Addition {
    pub component: String,
    pub change: Change,
    pub hint: Option<Hint>,
}

/// Ordered additive edits against a component chain.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelDelta {
    pub additions: Vec<Addition>,
}

#[derive(Debug, Error)]
#[error("delta entry {index}: {message}")]
pub struct DeltaFormatError {
    pub index: usize,
    pub message: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAddition {
    kind: String,
    component: String,
    payload: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hint: Option<Hint>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetPayload {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    items: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ItemPayload {
    item: String,
    set: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantPayload {
    name: String,
    typing: Formula,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    relation: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariablePayload {
    name: String,
    typing: Formula,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    init: Option<InitialisationAction>,
}

impl ModelDelta {
    pub fn new(additions: Vec<Addition>) -> Self {
        ModelDelta { additions }
    }

    pub fn is_empty(&self) -> bool {
        self.additions.is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self, DeltaFormatError> {
        let raw: Vec<RawAddition> =
            serde_json::from_str(text).map_err(|e| DeltaFormatError { index: 0, message: e.to_string() })?;
        let mut additions = Vec::with_capacity(raw.len());
        for (index, r) in raw.into_iter().enumerate() {
            let err = |e: serde_json::Error| DeltaFormatError { index, message: format!("{}: {e}", r.kind) };
            let change = match r.kind.as_str() {
                "new_abstract_set" => {
                    let p: SetPayload = serde_json::from_value(r.payload.clone()).map_err(err)?;
                    Change::NewAbstractSet { name: p.name }
                }
                "new_enumerated_set" => {
                    let p: SetPayload = serde_json::from_value(r.payload.clone()).map_err(err)?;
                    Change::NewEnumeratedSet { name: p.name, items: p.items.unwrap_or_default() }
                }
                "new_set_item" => {
                    let p: ItemPayload = serde_json::from_value(r.payload.clone()).map_err(err)?;
                    Change::NewSetItem { item: p.item, set: p.set }
                }
                "new_constant" => {
                    let p: ConstantPayload = serde_json::from_value(r.payload.clone()).map_err(err)?;
                    Change::NewConstant { name: p.name, typing: p.typing, relation: p.relation }
                }
                "new_variable" => {
                    let p: VariablePayload = serde_json::from_value(r.payload.clone()).map_err(err)?;
                    Change::NewVariable { name: p.name, typing: p.typing, init: p.init }
                }
                other => return Err(DeltaFormatError { index, message: format!("unknown addition kind `{other}`") }),
            };
            additions.push(Addition { component: r.component, change, hint: r.hint });
        }
        Ok(ModelDelta { additions })
    }

    pub fn to_json(&self) -> String {
        let raw: Vec<RawAddition> = self
            .additions
            .iter()
            .map(|a| {
                let payload = match &a.change {
                    Change::NewAbstractSet { name } => serde_json::to_value(SetPayload { name: name.clone(), items: None }),
                    Change::NewEnumeratedSet { name, items } => {
                        serde_json::to_value(SetPayload { name: name.clone(), items: Some(items.clone()) })
                    }
                    Change::NewSetItem { item, set } => {
                        serde_json::to_value(ItemPayload { item: item.clone(), set: set.clone() })
                    }
                    Change::NewConstant { name, typing, relation } => serde_json::to_value(ConstantPayload {
                        name: name.clone(),
                        typing: typing.clone(),
                        relation: relation.clone(),
                    }),
                    Change::NewVariable { name, typing, init } => serde_json::to_value(VariablePayload {
                        name: name.clone(),
                        typing: typing.clone(),
                        init: init.clone(),
                    }),
                }
                .expect("payloads are plain data");
                RawAddition { kind: a.change.kind().to_string(), component: a.component.clone(), payload, hint: a.hint }
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&raw).expect("plain data");
        s.push('\n');
        s
    }
}
