use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => f.write_str("error"),
            Severity::Warning => f.write_str("warning"),
        }
    }
}

/// Diagnostic class. Domain checks use the named classes; correspondence
/// store checks carry the tag of the invariant they enforce (`inv1_23`, ...).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiagCode {
    UnresolvedReference,
    DuplicateName,
    CyclicParent,
    BranchingChain,
    CardinalityViolation,
    MapletTypeMismatch,
    InvalidDataSet,
    UnhousedCharacteristic,
    Invariant(String),
}

impl DiagCode {
    pub fn invariant(tag: &str) -> Self {
        DiagCode::Invariant(tag.to_string())
    }
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagCode::UnresolvedReference => f.write_str("unresolved-reference"),
            DiagCode::DuplicateName => f.write_str("duplicate-name"),
            DiagCode::CyclicParent => f.write_str("cyclic-parent"),
            DiagCode::BranchingChain => f.write_str("branching-chain"),
            DiagCode::CardinalityViolation => f.write_str("cardinality"),
            DiagCode::MapletTypeMismatch => f.write_str("maplet-type"),
            DiagCode::InvalidDataSet => f.write_str("invalid-data-set"),
            DiagCode::UnhousedCharacteristic => f.write_str("unhoused-characteristic"),
            DiagCode::Invariant(tag) => f.write_str(tag),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagCode,
    /// Element path, e.g. `lg_system_ref_1/relation LgOfLs`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: [{}] {}: {}", self.severity, self.code, self.path, self.message)
    }
}

/// Outcome of a validation pass. Warnings never make a report non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Diagnostic>,
    pub warnings: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn error(&mut self, code: DiagCode, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Diagnostic {
            severity: Severity::Error,
            code,
            path: path.into(),
            message: message.into(),
        });
    }

    pub fn warn(&mut self, code: DiagCode, path: impl Into<String>, message: impl Into<String>) {
        self.warnings.push(Diagnostic {
            severity: Severity::Warning,
            code,
            path: path.into(),
            message: message.into(),
        });
    }

    pub fn has_code(&self, code: &DiagCode) -> bool {
        self.violations.iter().any(|d| &d.code == code)
    }

    pub fn has_invariant(&self, tag: &str) -> bool {
        self.violations
            .iter()
            .any(|d| matches!(&d.code, DiagCode::Invariant(t) if t == tag))
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
        self.warnings.extend(other.warnings);
    }

    pub fn iter(&self) -> impl Iterator<Item = &Diagnostic> {
        self.violations.iter().chain(self.warnings.iter())
    }
}
