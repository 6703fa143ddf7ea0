use serde::{Deserialize, Serialize};

use crate::domain_model::DefaultKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ComponentKind {
    System,
    Refinement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BSystemComponent {
    pub name: String,
    pub kind: ComponentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refines: Option<String>,
    pub sets: Vec<BSet>,
    pub constants: Vec<Constant>,
    pub properties: Vec<Formula>,
    pub variables: Vec<Variable>,
    pub invariants: Vec<Formula>,
    #[serde(rename = "init")]
    pub initialisations: Vec<InitialisationAction>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<EventStub>,
}

impl BSystemComponent {
    pub fn system(name: impl Into<String>) -> Self {
        Self::empty(name.into(), ComponentKind::System, None)
    }

    pub fn refinement(name: impl Into<String>, refines: impl Into<String>) -> Self {
        Self::empty(name.into(), ComponentKind::Refinement, Some(refines.into()))
    }

    fn empty(name: String, kind: ComponentKind, refines: Option<String>) -> Self {
        BSystemComponent {
            name,
            kind,
            refines,
            sets: Vec::new(),
            constants: Vec::new(),
            properties: Vec::new(),
            variables: Vec::new(),
            invariants: Vec::new(),
            initialisations: Vec::new(),
            events: Vec::new(),
        }
    }

    pub fn set(&self, name: &str) -> Option<&BSet> {
        self.sets.iter().find(|s| s.name == name)
    }

    pub fn has_constant(&self, name: &str) -> bool {
        self.constants.iter().any(|c| c.name == name)
    }

    pub fn has_variable(&self, name: &str) -> bool {
        self.variables.iter().any(|v| v.name == name)
    }

    /// Typing properties whose subject is constant `name`.
    pub fn typing_properties<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Formula> + 'a {
        self.properties
            .iter()
            .filter(move |f| f.typing && matches!(f.args.first(), Some(Operand::Constant { name: n }) if n == name))
    }

    /// Typing invariants whose subject is variable `name`.
    pub fn typing_invariants<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Formula> + 'a {
        self.invariants
            .iter()
            .filter(move |f| f.typing && matches!(f.args.first(), Some(Operand::Variable { name: n }) if n == name))
    }

    pub fn initialisations_of<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a InitialisationAction> + 'a {
        self.initialisations.iter().filter(move |a| a.target == name)
    }

    /// Every identifier this component declares: sets, set items, constants, variables.
    pub fn declared_names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for s in &self.sets {
            out.push(s.name.as_str());
            if let SetVariant::Enumerated { items } = &s.variant {
                out.extend(items.iter().map(String::as_str));
            }
        }
        out.extend(self.constants.iter().map(|c| c.name.as_str()));
        out.extend(self.variables.iter().map(|v| v.name.as_str()));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BSet {
    pub name: String,
    #[serde(flatten)]
    pub variant: SetVariant,
}

impl BSet {
    pub fn abstract_set(name: impl Into<String>) -> Self {
        BSet { name: name.into(), variant: SetVariant::Abstract }
    }

    pub fn enumerated(name: impl Into<String>, items: Vec<String>) -> Self {
        BSet { name: name.into(), variant: SetVariant::Enumerated { items } }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum SetVariant {
    Abstract,
    Enumerated { items: Vec<String> },
    /// Built-in set; never printed in a SETS clause.
    Default { kind: DefaultKind },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Constant {
    pub name: String,
}

impl Constant {
    pub fn new(name: impl Into<String>) -> Self {
        Constant { name: name.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Variable {
    pub name: String,
}

impl Variable {
    pub fn new(name: impl Into<String>) -> Self {
        Variable { name: name.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operator {
    Inclusion,
    Belonging,
    RelationSet,
    FunctionSet,
    Maplet,
    RelationComposition,
    Equal2SetOf,
    Inversion,
    Equality,
    /// Extension: bounded image cardinality over a set.
    CardinalityForAll,
    /// Extension: verbatim predicate text.
    Raw,
}

impl Operator {
    /// Expected operand count: `(min, Some(max))`, or unbounded above.
    pub fn arity(self) -> (usize, Option<usize>) {
        match self {
            Operator::Inclusion | Operator::Belonging | Operator::Inversion | Operator::Equality => (2, Some(2)),
            Operator::RelationSet
            | Operator::FunctionSet
            | Operator::Maplet
            | Operator::RelationComposition
            | Operator::CardinalityForAll => (3, Some(3)),
            Operator::Equal2SetOf => (1, None),
            Operator::Raw => (1, Some(1)),
        }
    }

    pub fn accepts(self, n: usize) -> bool {
        let (min, max) = self.arity();
        n >= min && max.is_none_or(|m| n <= m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    Eq,
    Ge,
    Le,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "ref_kind", rename_all = "snake_case")]
pub enum Operand {
    Constant { name: String },
    Variable { name: String },
    Set { name: String },
    SetItem { name: String },
    Maplet {
        antecedent: String,
        image: String,
        /// The image is a literal value rather than a B identifier.
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        literal_image: bool,
    },
    /// Value without a B identifier (e.g. a NATURAL literal).
    Literal { name: String },
    Cardinality { inverse: bool, comparator: Comparator, value: u32 },
    Raw { text: String },
}

impl Operand {
    pub fn constant(name: impl Into<String>) -> Self {
        Operand::Constant { name: name.into() }
    }

    pub fn variable(name: impl Into<String>) -> Self {
        Operand::Variable { name: name.into() }
    }

    pub fn set(name: impl Into<String>) -> Self {
        Operand::Set { name: name.into() }
    }

    pub fn set_item(name: impl Into<String>) -> Self {
        Operand::SetItem { name: name.into() }
    }

    pub fn maplet(antecedent: impl Into<String>, image: impl Into<String>) -> Self {
        Operand::Maplet { antecedent: antecedent.into(), image: image.into(), literal_image: false }
    }

    pub fn maplet_to_literal(antecedent: impl Into<String>, image: impl Into<String>) -> Self {
        Operand::Maplet { antecedent: antecedent.into(), image: image.into(), literal_image: true }
    }

    /// Identifier this operand names, if it names exactly one.
    pub fn name(&self) -> Option<&str> {
        match self {
            Operand::Constant { name }
            | Operand::Variable { name }
            | Operand::Set { name }
            | Operand::SetItem { name }
            | Operand::Literal { name } => Some(name),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Formula {
    pub op: Operator,
    pub args: Vec<Operand>,
    /// Marks the formula that types its first operand.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub typing: bool,
}

impl Formula {
    pub fn new(op: Operator, args: Vec<Operand>) -> Self {
        Formula { op, args, typing: false }
    }

    pub fn typing(op: Operator, args: Vec<Operand>) -> Self {
        Formula { op, args, typing: true }
    }

    pub fn raw(text: impl Into<String>) -> Self {
        Formula::new(Operator::Raw, vec![Operand::Raw { text: text.into() }])
    }

    /// Identifiers mentioned by the formula, maplet endpoints included.
    pub fn referenced_names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for a in &self.args {
            match a {
                Operand::Maplet { antecedent, image, literal_image } => {
                    out.push(antecedent.as_str());
                    if !literal_image {
                        out.push(image.as_str());
                    }
                }
                Operand::Literal { .. } | Operand::Cardinality { .. } | Operand::Raw { .. } => {}
                other => out.extend(other.name()),
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InitOperator {
    BecomeEqual2SetOf,
    BecomeEqual2EmptySet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitialisationAction {
    pub target: String,
    pub op: InitOperator,
    #[serde(default)]
    pub args: Vec<Operand>,
}

impl InitialisationAction {
    pub fn empty(target: impl Into<String>) -> Self {
        InitialisationAction { target: target.into(), op: InitOperator::BecomeEqual2EmptySet, args: Vec::new() }
    }

    pub fn set_of(target: impl Into<String>, args: Vec<Operand>) -> Self {
        InitialisationAction { target: target.into(), op: InitOperator::BecomeEqual2SetOf, args }
    }
}

/// Placeholder for an event; bodies are never generated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventStub {
    pub name: String,
}
