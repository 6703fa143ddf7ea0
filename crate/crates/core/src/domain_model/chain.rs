use std::collections::HashMap;

use super::types::*;

/// Name-based view over a list of domain models. Lookups from a model see
/// that model and its transitive parents, nearest first.
#[derive(Debug)]
pub struct ChainIndex<'a> {
    models: &'a [DomainModel],
    by_name: HashMap<&'a str, usize>,
}

impl<'a> ChainIndex<'a> {
    pub fn new(models: &'a [DomainModel]) -> Self {
        let mut by_name = HashMap::new();
        for (i, m) in models.iter().enumerate() {
            by_name.entry(m.name.as_str()).or_insert(i);
        }
        ChainIndex { models, by_name }
    }

    pub fn models(&self) -> &'a [DomainModel] {
        self.models
    }

    pub fn model_index(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn parent_index(&self, idx: usize) -> Option<usize> {
        self.models[idx].parent.as_deref().and_then(|p| self.model_index(p))
    }

    /// `idx` followed by its ancestors. Stops at a repeated model, so a
    /// cyclic parent chain still terminates.
    pub fn visible(&self, idx: usize) -> Vec<usize> {
        let mut out = vec![idx];
        let mut cur = idx;
        while let Some(p) = self.parent_index(cur) {
            if out.contains(&p) {
                break;
            }
            out.push(p);
            cur = p;
        }
        out
    }

    pub fn has_parent_cycle(&self, idx: usize) -> bool {
        let mut seen = vec![idx];
        let mut cur = idx;
        while let Some(p) = self.parent_index(cur) {
            if seen.contains(&p) {
                return true;
            }
            seen.push(p);
            cur = p;
        }
        false
    }

    fn find<T: 'a>(
        &self,
        from: usize,
        items: impl Fn(&'a DomainModel) -> &'a [T],
        pred: impl Fn(&T) -> bool,
    ) -> Option<(usize, &'a T)> {
        self.visible(from)
            .into_iter()
            .find_map(|m| items(&self.models[m]).iter().find(|x| pred(x)).map(|x| (m, x)))
    }

    pub fn concept(&self, from: usize, name: &str) -> Option<(usize, &'a Concept)> {
        self.find(from, |m| &m.concepts, |c| c.name == name)
    }

    pub fn relation(&self, from: usize, name: &str) -> Option<(usize, &'a Relation)> {
        self.find(from, |m| &m.relations, |r| r.name == name)
    }

    pub fn attribute(&self, from: usize, name: &str) -> Option<(usize, &'a Attribute)> {
        self.find(from, |m| &m.attributes, |a| a.name == name)
    }

    pub fn data_set(&self, from: usize, name: &str) -> Option<(usize, &'a DataSet)> {
        self.find(from, |m| &m.data_sets, |d| d.name() == name)
    }

    pub fn individual(&self, from: usize, name: &str) -> Option<(usize, &'a Individual)> {
        self.find(from, |m| &m.individuals, |i| i.name == name)
    }

    pub fn data_value(
        &self,
        from: usize,
        lexical: &str,
        set: &DataSetRef,
    ) -> Option<(usize, &'a DataValue)> {
        self.find(from, |m| &m.data_values, |v| v.lexical_form == lexical && &v.data_set == set)
    }

    /// Whether `lexical` is a value of `set` as seen from model `from`.
    pub fn resolves_value(&self, from: usize, lexical: &str, set: &DataSetRef) -> bool {
        match set {
            DataSetRef::Named(name) => match self.data_set(from, name) {
                Some((_, DataSet::Enumerated { values, .. })) => values.iter().any(|v| v == lexical),
                Some((_, DataSet::Custom { .. })) => self.data_value(from, lexical, set).is_some(),
                None => false,
            },
            DataSetRef::Default(_) => self.data_value(from, lexical, set).is_some(),
        }
    }

    /// Parent concept chain of `name` (excluding itself), cycle-safe.
    pub fn concept_ancestors(&self, from: usize, name: &str) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut cur = self.concept(from, name).and_then(|(_, c)| c.parent_concept.clone());
        while let Some(p) = cur {
            if p == name || out.contains(&p) {
                break;
            }
            cur = self.concept(from, &p).and_then(|(_, c)| c.parent_concept.clone());
            out.push(p);
        }
        out
    }
}
