use std::collections::{HashMap, HashSet};

use super::chain::ChainIndex;
use super::types::*;
use crate::report::{DiagCode, ValidationReport};

pub(crate) fn path(model: &str, kind: &str, name: &str) -> String {
    format!("{model}/{kind} {name}")
}

/// Check every metamodel constraint on a root-first model chain.
pub fn validate(chain: &[DomainModel]) -> ValidationReport {
    let mut report = ValidationReport::default();
    let index = ChainIndex::new(chain);

    let mut seen_models = HashSet::new();
    for m in chain {
        if !is_identifier(&m.name) {
            report.error(DiagCode::DuplicateName, m.name.clone(), "model name is not an identifier");
        }
        if !seen_models.insert(m.name.as_str()) {
            report.error(DiagCode::DuplicateName, m.name.clone(), "domain model declared twice");
        }
    }

    let mut usable = vec![true; chain.len()];
    let mut children: HashMap<&str, &str> = HashMap::new();
    for (i, m) in chain.iter().enumerate() {
        if let Some(p) = &m.parent {
            match index.model_index(p) {
                None => report.error(
                    DiagCode::UnresolvedReference,
                    m.name.clone(),
                    format!("parent domain model `{p}` is not declared"),
                ),
                Some(_) if index.has_parent_cycle(i) => {
                    report.error(DiagCode::CyclicParent, m.name.clone(), "parent chain is cyclic");
                    usable[i] = false;
                }
                Some(pi) if pi > i => report.error(
                    DiagCode::UnresolvedReference,
                    m.name.clone(),
                    format!("parent domain model `{p}` must be declared before its child"),
                ),
                Some(_) => {}
            }
            if let Some(sibling) = children.insert(p.as_str(), m.name.as_str()) {
                report.error(
                    DiagCode::BranchingChain,
                    m.name.clone(),
                    format!("`{p}` is already refined by `{sibling}`; a chain has one child per level"),
                );
            }
        }
    }

    for (i, m) in chain.iter().enumerate() {
        if usable[i] {
            check_names(&index, i, m, &mut report);
            check_references(&index, i, m, &mut report);
        }
    }
    report
}

/// Names declared by a model that become B identifiers.
fn declared_names(m: &DomainModel) -> Vec<(&'static str, &str)> {
    let mut out = Vec::new();
    out.extend(m.concepts.iter().map(|c| ("concept", c.name.as_str())));
    out.extend(m.relations.iter().map(|r| ("relation", r.name.as_str())));
    out.extend(m.attributes.iter().map(|a| ("attribute", a.name.as_str())));
    out.extend(m.data_sets.iter().map(|d| ("dataset", d.name())));
    out.extend(m.individuals.iter().map(|i| ("individual", i.name.as_str())));
    for d in &m.data_sets {
        if let DataSet::Enumerated { values, .. } = d {
            // A value repeated inside one set is reported as an invalid set.
            let mut seen = HashSet::new();
            out.extend(values.iter().filter(|v| seen.insert(*v)).map(|v| ("data value", v.as_str())));
        }
    }
    out.extend(
        m.data_values
            .iter()
            .filter(|v| matches!(v.data_set, DataSetRef::Named(_)))
            .map(|v| ("data value", v.lexical_form.as_str())),
    );
    out
}

fn check_names(index: &ChainIndex<'_>, i: usize, m: &DomainModel, report: &mut ValidationReport) {
    let mut inherited: HashMap<&str, &str> = HashMap::new();
    for &a in index.visible(i).iter().skip(1) {
        let am = &index.models()[a];
        for (_, n) in declared_names(am) {
            inherited.entry(n).or_insert(am.name.as_str());
        }
    }

    let mut local: HashSet<&str> = HashSet::new();
    for (kind, name) in declared_names(m) {
        let p = path(&m.name, kind, name);
        if !is_identifier(name) {
            let code = if kind == "data value" { DiagCode::InvalidDataSet } else { DiagCode::DuplicateName };
            report.error(code, p, format!("`{name}` is not a valid identifier"));
            continue;
        }
        if DefaultKind::from_keyword(name).is_some() {
            report.error(DiagCode::DuplicateName, p, format!("`{name}` is a reserved data set name"));
        } else if let Some(owner) = inherited.get(name) {
            report.error(DiagCode::DuplicateName, p, format!("`{name}` redeclares a name from `{owner}`"));
        } else if !local.insert(name) {
            report.error(DiagCode::DuplicateName, p, format!("`{name}` is declared more than once"));
        }
    }
}

fn check_references(index: &ChainIndex<'_>, i: usize, m: &DomainModel, report: &mut ValidationReport) {
    let mn = m.name.as_str();

    for c in &m.concepts {
        if let Some(parent) = &c.parent_concept {
            let p = path(mn, "concept", &c.name);
            if index.concept(i, parent).is_none() {
                report.error(DiagCode::UnresolvedReference, p, format!("parent concept `{parent}` is not visible"));
            } else if concept_cycle(index, i, &c.name) {
                report.error(DiagCode::CyclicParent, p, "parent concept chain is cyclic");
            }
        }
    }

    for d in &m.data_sets {
        if let DataSet::Enumerated { name, values } = d {
            let p = path(mn, "dataset", name);
            if values.is_empty() {
                report.error(DiagCode::InvalidDataSet, p.clone(), "enumerated data set has no values");
            }
            let mut seen = HashSet::new();
            for v in values {
                if !seen.insert(v) {
                    report.error(DiagCode::InvalidDataSet, p.clone(), format!("value \"{v}\" listed twice"));
                }
            }
        }
    }

    let mut seen_values = HashSet::new();
    for v in &m.data_values {
        let p = path(mn, "data value", &v.lexical_form);
        if !seen_values.insert((&v.lexical_form, &v.data_set)) {
            report.error(DiagCode::DuplicateName, p.clone(), "data value declared twice");
        }
        if let DataSetRef::Default(k) = &v.data_set {
            if !literal_fits(*k, &v.lexical_form) {
                report.error(
                    DiagCode::InvalidDataSet,
                    p.clone(),
                    format!("\"{}\" is not a {} literal", v.lexical_form, k.keyword()),
                );
            }
        }
        if let DataSetRef::Named(ds) = &v.data_set {
            match index.data_set(i, ds) {
                None => report.error(DiagCode::UnresolvedReference, p, format!("data set `{ds}` is not visible")),
                Some((_, DataSet::Enumerated { .. })) => report.error(
                    DiagCode::InvalidDataSet,
                    p,
                    format!("values of enumerated data set `{ds}` must be listed in its declaration"),
                ),
                Some(_) => {}
            }
        }
    }

    for r in &m.relations {
        let p = path(mn, "relation", &r.name);
        for (role, c) in [("domain", &r.domain), ("range", &r.range)] {
            if index.concept(i, c).is_none() {
                report.error(DiagCode::UnresolvedReference, p.clone(), format!("{role} concept `{c}` is not visible"));
            }
        }
        for (role, card) in [("domain", &r.domain_cardinality), ("range", &r.range_cardinality)] {
            if !card.is_valid() {
                report.error(
                    DiagCode::CardinalityViolation,
                    p.clone(),
                    format!("{role} cardinality {card} has max < min"),
                );
            }
        }
        if r.is_variable {
            for (set, flag) in [(r.flags.transitive, "transitive"), (r.flags.symmetric, "symmetric")] {
                if set {
                    report.warn(
                        DiagCode::UnhousedCharacteristic,
                        p.clone(),
                        format!("`{flag}` is only translated for constant relations and is ignored"),
                    );
                }
            }
        }
        for (set, flag) in [
            (r.flags.asymmetric, "asymmetric"),
            (r.flags.reflexive, "reflexive"),
            (r.flags.irreflexive, "irreflexive"),
        ] {
            if set {
                report.warn(
                    DiagCode::UnhousedCharacteristic,
                    p.clone(),
                    format!("`{flag}` has no translation and is ignored"),
                );
            }
        }
    }

    for a in &m.attributes {
        let p = path(mn, "attribute", &a.name);
        if index.concept(i, &a.domain).is_none() {
            report.error(DiagCode::UnresolvedReference, p.clone(), format!("domain concept `{}` is not visible", a.domain));
        }
        if let DataSetRef::Named(ds) = &a.range {
            if index.data_set(i, ds).is_none() {
                report.error(DiagCode::UnresolvedReference, p, format!("range data set `{ds}` is not visible"));
            }
        }
    }

    for ind in &m.individuals {
        if index.concept(i, &ind.concept).is_none() {
            report.error(
                DiagCode::UnresolvedReference,
                path(mn, "individual", &ind.name),
                format!("concept `{}` is not visible", ind.concept),
            );
        }
    }

    for rm in &m.relation_maplets {
        let p = path(mn, "maplet", &rm.key());
        let Some((_, rel)) = index.relation(i, &rm.relation) else {
            report.error(DiagCode::UnresolvedReference, p, format!("relation `{}` is not visible", rm.relation));
            continue;
        };
        for (role, ind, expected) in [
            ("antecedent", &rm.antecedent, &rel.domain),
            ("image", &rm.image, &rel.range),
        ] {
            match index.individual(i, ind) {
                None => report.error(DiagCode::UnresolvedReference, p.clone(), format!("{role} individual `{ind}` is not visible")),
                Some((_, found)) if &found.concept != expected => report.error(
                    DiagCode::MapletTypeMismatch,
                    p.clone(),
                    format!(
                        "{role} `{ind}` is an individual of `{}` but relation `{}` expects `{expected}`",
                        found.concept, rel.name
                    ),
                ),
                Some(_) => {}
            }
        }
    }

    for am in &m.attribute_maplets {
        let p = path(mn, "attr_maplet", &am.key());
        let Some((_, attr)) = index.attribute(i, &am.attribute) else {
            report.error(DiagCode::UnresolvedReference, p, format!("attribute `{}` is not visible", am.attribute));
            continue;
        };
        match index.individual(i, &am.antecedent) {
            None => report.error(
                DiagCode::UnresolvedReference,
                p.clone(),
                format!("antecedent individual `{}` is not visible", am.antecedent),
            ),
            Some((_, found)) if found.concept != attr.domain => report.error(
                DiagCode::MapletTypeMismatch,
                p.clone(),
                format!(
                    "antecedent `{}` is an individual of `{}` but attribute `{}` expects `{}`",
                    am.antecedent, found.concept, attr.name, attr.domain
                ),
            ),
            Some(_) => {}
        }
        if !index.resolves_value(i, &am.image, &attr.range) {
            // Distinguish a value of some other data set from a missing one.
            let elsewhere = m.data_values.iter().any(|v| v.lexical_form == am.image)
                || index.visible(i).iter().any(|&v| {
                    index.models()[v].data_sets.iter().any(|d| match d {
                        DataSet::Enumerated { values, .. } => values.contains(&am.image),
                        DataSet::Custom { .. } => false,
                    })
                });
            let code = if elsewhere { DiagCode::MapletTypeMismatch } else { DiagCode::UnresolvedReference };
            report.error(code, p, format!("image \"{}\" is not a value of `{}`", am.image, attr.range));
        }
    }
}

fn literal_fits(kind: DefaultKind, lexical: &str) -> bool {
    match kind {
        DefaultKind::Natural => lexical.parse::<u64>().is_ok(),
        DefaultKind::Integer => lexical.parse::<i64>().is_ok(),
        DefaultKind::Float => lexical.parse::<f64>().is_ok(),
        DefaultKind::Bool => matches!(lexical, "TRUE" | "FALSE" | "true" | "false"),
        DefaultKind::String => true,
    }
}

fn concept_cycle(index: &ChainIndex<'_>, from: usize, name: &str) -> bool {
    let mut seen = vec![name.to_string()];
    let mut cur = index.concept(from, name).and_then(|(_, c)| c.parent_concept.clone());
    while let Some(p) = cur {
        if seen.contains(&p) {
            return true;
        }
        cur = index.concept(from, &p).and_then(|(_, c)| c.parent_concept.clone());
        seen.push(p);
    }
    false
}
