use serde::{Deserialize, Serialize};

/// One partial map from domain element names to B System element names,
/// kept in insertion order. Injectivity is checked, not enforced, so a
/// corrupted store can still be loaded and reported on.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Correspondence(Vec<(String, String)>);

impl Correspondence {
    pub fn insert(&mut self, domain: impl Into<String>, b: impl Into<String>) {
        let domain = domain.into();
        let b = b.into();
        match self.0.iter_mut().find(|(d, _)| *d == domain) {
            Some(entry) => entry.1 = b,
            None => self.0.push((domain, b)),
        }
    }

    /// Append without replacing an existing entry for `domain`.
    pub fn push_raw(&mut self, domain: impl Into<String>, b: impl Into<String>) {
        self.0.push((domain.into(), b.into()));
    }

    pub fn get(&self, domain: &str) -> Option<&str> {
        self.0.iter().find(|(d, _)| d == domain).map(|(_, b)| b.as_str())
    }

    pub fn domain_of(&self, b: &str) -> Option<&str> {
        self.0.iter().find(|(_, x)| x == b).map(|(d, _)| d.as_str())
    }

    pub fn contains_domain(&self, domain: &str) -> bool {
        self.get(domain).is_some()
    }

    pub fn contains_b(&self, b: &str) -> bool {
        self.domain_of(b).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(d, b)| (d.as_str(), b.as_str()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Domain keys that occur more than once.
    pub fn duplicate_domains(&self) -> Vec<&str> {
        duplicates(self.0.iter().map(|(d, _)| d.as_str()))
    }

    /// B names shared by more than one domain element.
    pub fn duplicate_images(&self) -> Vec<&str> {
        duplicates(self.0.iter().map(|(_, b)| b.as_str()))
    }
}

fn duplicates<'a>(it: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for x in it {
        if !seen.insert(x) && !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// Links between domain-model elements and the B System elements that
/// realize them. Keys are element names (names are unique along a chain);
/// maplet keys use `R(a, b)`, characteristic keys `R.isTransitive` /
/// `R.isSymmetric` with the rendered characteristic formula as image.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrespondenceStore {
    pub domainmodel_to_component: Correspondence,
    pub concept_to_abstract_set: Correspondence,
    pub concept_to_constant: Correspondence,
    pub concept_to_variable: Correspondence,
    pub dataset_to_set: Correspondence,
    pub enumerated_to_enumerated_set: Correspondence,
    pub custom_to_abstract_set: Correspondence,
    pub default_to_default_set: Correspondence,
    pub datavalue_to_setitem: Correspondence,
    pub datavalue_to_constant: Correspondence,
    pub individual_to_constant: Correspondence,
    pub relation_to_type_constant: Correspondence,
    pub relation_to_constant: Correspondence,
    pub relation_to_variable: Correspondence,
    pub attribute_to_type_constant: Correspondence,
    pub attribute_to_constant: Correspondence,
    pub attribute_to_variable: Correspondence,
    pub relationmaplet_to_constant: Correspondence,
    pub attributemaplet_to_constant: Correspondence,
    pub characteristic_to_formula: Correspondence,
}

#[derive(Debug, thiserror::Error)]
#[error("malformed correspondence store: {0}")]
pub struct StoreFormatError(#[from] serde_json::Error);

impl CorrespondenceStore {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("store is always serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, StoreFormatError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Every map with its field name, in declaration order.
    pub fn maps(&self) -> [(&'static str, &Correspondence); 20] {
        [
            ("domainmodel_to_component", &self.domainmodel_to_component),
            ("concept_to_abstract_set", &self.concept_to_abstract_set),
            ("concept_to_constant", &self.concept_to_constant),
            ("concept_to_variable", &self.concept_to_variable),
            ("dataset_to_set", &self.dataset_to_set),
            ("enumerated_to_enumerated_set", &self.enumerated_to_enumerated_set),
            ("custom_to_abstract_set", &self.custom_to_abstract_set),
            ("default_to_default_set", &self.default_to_default_set),
            ("datavalue_to_setitem", &self.datavalue_to_setitem),
            ("datavalue_to_constant", &self.datavalue_to_constant),
            ("individual_to_constant", &self.individual_to_constant),
            ("relation_to_type_constant", &self.relation_to_type_constant),
            ("relation_to_constant", &self.relation_to_constant),
            ("relation_to_variable", &self.relation_to_variable),
            ("attribute_to_type_constant", &self.attribute_to_type_constant),
            ("attribute_to_constant", &self.attribute_to_constant),
            ("attribute_to_variable", &self.attribute_to_variable),
            ("relationmaplet_to_constant", &self.relationmaplet_to_constant),
            ("attributemaplet_to_constant", &self.attributemaplet_to_constant),
            ("characteristic_to_formula", &self.characteristic_to_formula),
        ]
    }

    /// B image of a concept usable as a set operand: its abstract set or,
    /// for a sub-concept, its constant.
    pub fn concept_image(&self, concept: &str) -> Option<ConceptImage<'_>> {
        if let Some(s) = self.concept_to_abstract_set.get(concept) {
            Some(ConceptImage::Set(s))
        } else {
            self.concept_to_constant.get(concept).map(ConceptImage::Constant)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConceptImage<'a> {
    Set(&'a str),
    Constant(&'a str),
}

impl ConceptImage<'_> {
    pub fn name(&self) -> &str {
        match self {
            ConceptImage::Set(n) | ConceptImage::Constant(n) => n,
        }
    }

    pub fn operand(&self) -> crate::bsystem::Operand {
        match self {
            ConceptImage::Set(n) => crate::bsystem::Operand::set(*n),
            ConceptImage::Constant(n) => crate::bsystem::Operand::constant(*n),
        }
    }
}
