use std::fmt;

use serde::{Deserialize, Serialize};

/// One ontology attached to a refinement level. Cross references are held by
/// name and resolved against the visible chain (the model plus its ancestors).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DomainModel {
    pub name: String,
    pub parent: Option<String>,
    pub concepts: Vec<Concept>,
    pub relations: Vec<Relation>,
    pub attributes: Vec<Attribute>,
    pub data_sets: Vec<DataSet>,
    pub individuals: Vec<Individual>,
    /// Values of custom and default data sets. Enumerated values live in
    /// their [`DataSet`].
    pub data_values: Vec<DataValue>,
    pub relation_maplets: Vec<RelationMaplet>,
    pub attribute_maplets: Vec<AttributeMaplet>,
    pub predicates: Vec<Predicate>,
}

impl DomainModel {
    pub fn new(name: impl Into<String>) -> Self {
        DomainModel { name: name.into(), ..Default::default() }
    }

    pub fn with_parent(name: impl Into<String>, parent: impl Into<String>) -> Self {
        DomainModel { name: name.into(), parent: Some(parent.into()), ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub name: String,
    pub is_variable: bool,
    pub parent_concept: Option<String>,
}

impl Concept {
    pub fn new(name: impl Into<String>) -> Self {
        Concept { name: name.into(), is_variable: false, parent_concept: None }
    }
}

/// Upper bound of a cardinality. `Star` is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaxCard {
    Bounded(u32),
    Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cardinality {
    pub min: u32,
    pub max: MaxCard,
}

impl Cardinality {
    /// `0..*`, the unconstrained cardinality.
    pub const ANY: Cardinality = Cardinality { min: 0, max: MaxCard::Star };

    pub fn exact(n: u32) -> Self {
        Cardinality { min: n, max: MaxCard::Bounded(n) }
    }

    pub fn range(min: u32, max: MaxCard) -> Self {
        Cardinality { min, max }
    }

    pub fn is_valid(&self) -> bool {
        match self.max {
            MaxCard::Star => true,
            MaxCard::Bounded(max) => max >= self.min,
        }
    }

    pub fn is_unconstrained(&self) -> bool {
        *self == Cardinality::ANY
    }
}

impl Default for Cardinality {
    fn default() -> Self {
        Cardinality::ANY
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.max {
            MaxCard::Star => write!(f, "{}..*", self.min),
            MaxCard::Bounded(max) => write!(f, "{}..{}", self.min, max),
        }
    }
}

/// Relation characteristics. Only transitivity and symmetry have a
/// translation; the other three are carried but produce warnings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RelationFlags {
    pub transitive: bool,
    pub symmetric: bool,
    pub asymmetric: bool,
    pub reflexive: bool,
    pub irreflexive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub is_variable: bool,
    pub domain: String,
    pub range: String,
    pub domain_cardinality: Cardinality,
    pub range_cardinality: Cardinality,
    pub flags: RelationFlags,
}

impl Relation {
    pub fn new(name: impl Into<String>, domain: impl Into<String>, range: impl Into<String>) -> Self {
        Relation {
            name: name.into(),
            is_variable: false,
            domain: domain.into(),
            range: range.into(),
            domain_cardinality: Cardinality::ANY,
            range_cardinality: Cardinality::ANY,
            flags: RelationFlags::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DefaultKind {
    Natural,
    Integer,
    Float,
    Bool,
    String,
}

impl DefaultKind {
    pub const ALL: [DefaultKind; 5] = [
        DefaultKind::Natural,
        DefaultKind::Integer,
        DefaultKind::Float,
        DefaultKind::Bool,
        DefaultKind::String,
    ];

    /// Keyword used both in the DSL and as the built-in B set name.
    pub fn keyword(self) -> &'static str {
        match self {
            DefaultKind::Natural => "NATURAL",
            DefaultKind::Integer => "INTEGER",
            DefaultKind::Float => "FLOAT",
            DefaultKind::Bool => "BOOL",
            DefaultKind::String => "STRING",
        }
    }

    pub fn from_keyword(s: &str) -> Option<DefaultKind> {
        DefaultKind::ALL.into_iter().find(|k| k.keyword() == s)
    }
}

/// Reference to a data set: one of the five built-ins or a declared one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DataSetRef {
    Default(DefaultKind),
    Named(String),
}

impl DataSetRef {
    pub fn name(&self) -> &str {
        match self {
            DataSetRef::Default(k) => k.keyword(),
            DataSetRef::Named(n) => n,
        }
    }
}

impl fmt::Display for DataSetRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub is_variable: bool,
    pub is_functional: bool,
    pub domain: String,
    pub range: DataSetRef,
}

impl Attribute {
    pub fn new(name: impl Into<String>, domain: impl Into<String>, range: DataSetRef) -> Self {
        Attribute {
            name: name.into(),
            is_variable: false,
            is_functional: true,
            domain: domain.into(),
            range,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DataSet {
    Custom { name: String },
    Enumerated { name: String, values: Vec<String> },
}

impl DataSet {
    pub fn name(&self) -> &str {
        match self {
            DataSet::Custom { name } | DataSet::Enumerated { name, .. } => name,
        }
    }

    pub fn is_enumerated(&self) -> bool {
        matches!(self, DataSet::Enumerated { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Individual {
    pub name: String,
    pub concept: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataValue {
    pub lexical_form: String,
    pub data_set: DataSetRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationMaplet {
    pub relation: String,
    pub antecedent: String,
    pub image: String,
}

impl RelationMaplet {
    pub fn key(&self) -> String {
        format!("{}({}, {})", self.relation, self.antecedent, self.image)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeMaplet {
    pub attribute: String,
    pub antecedent: String,
    /// Lexical form of the image data value, resolved in the attribute's range.
    pub image: String,
}

impl AttributeMaplet {
    pub fn key(&self) -> String {
        format!("{}({}, {})", self.attribute, self.antecedent, self.image)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PredicateKind {
    Plain,
    Gluing,
}

/// First-order constraint kept as opaque text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predicate {
    pub kind: PredicateKind,
    pub text: String,
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
