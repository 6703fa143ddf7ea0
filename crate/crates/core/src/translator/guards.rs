//! Guard evaluation for every forward rule, computed from the domain chain,
//! the components and the store alone. After a complete translation no
//! guard holds.

use super::check::{BView, DView};
use super::driver::cardinality_bounds;
use super::store::CorrespondenceStore;
use crate::bsystem::*;
use crate::domain_model::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnabledRule {
    pub rule: &'static str,
    pub element: String,
}

pub fn enabled_rules(chain: &[DomainModel], components: &[BSystemComponent], store: &CorrespondenceStore) -> Vec<EnabledRule> {
    let b = BView::new(components);
    let d = DView::new(chain);
    let index = ChainIndex::new(chain);
    let mut out = Vec::new();
    let mut hit = |rule: &'static str, element: &str| out.push(EnabledRule { rule, element: element.to_string() });

    for m in chain {
        if !store.domainmodel_to_component.contains_domain(&m.name) {
            let parent_done = m.parent.as_deref().is_none_or(|p| store.domainmodel_to_component.contains_domain(p));
            if parent_done {
                hit(if m.parent.is_some() { "rule_2" } else { "rule_1" }, &m.name);
            }
        }
    }
    for k in DefaultKind::ALL {
        if !store.default_to_default_set.contains_domain(k.keyword()) {
            hit("initialize_default_datasets", k.keyword());
        }
    }

    for m in chain {
        for c in &m.concepts {
            match &c.parent_concept {
                None if !store.concept_to_abstract_set.contains_domain(&c.name) => hit("rule_3", &c.name),
                Some(p) if !store.concept_to_constant.contains_domain(&c.name) => {
                    if store.concept_to_abstract_set.contains_domain(p) {
                        hit("rule_6_1", &c.name);
                    } else if store.concept_to_constant.contains_domain(p) {
                        hit("rule_6_2", &c.name);
                    }
                }
                _ => {}
            }
            if c.is_variable && !store.concept_to_variable.contains_domain(&c.name) {
                let inds_done = chain
                    .iter()
                    .flat_map(|x| &x.individuals)
                    .filter(|i| i.concept == c.name)
                    .all(|i| store.individual_to_constant.contains_domain(&i.name));
                if inds_done && store.concept_image(&c.name).is_some() {
                    hit(if c.parent_concept.is_none() { "rule_9_1" } else { "rule_9_2" }, &c.name);
                }
            }
            if !c.is_variable {
                let has_members = chain.iter().enumerate().any(|(xi, x)| {
                    x.individuals.iter().any(|i| {
                        i.concept == c.name || index.concept_ancestors(xi, &i.concept).iter().any(|a| a == &c.name)
                    })
                });
                if let Some(img) = store.concept_image(&c.name) {
                    if has_members && b.closure(img.name()).is_none() {
                        hit("concept_extent_closure", &c.name);
                    }
                }
            }
        }
        for ds in &m.data_sets {
            match ds {
                DataSet::Enumerated { name, .. } if !store.enumerated_to_enumerated_set.contains_domain(name) => {
                    hit("rule_4", name)
                }
                DataSet::Custom { name } if !store.custom_to_abstract_set.contains_domain(name) => hit("rule_5", name),
                _ => {}
            }
        }
        for ind in &m.individuals {
            if !store.individual_to_constant.contains_domain(&ind.name) {
                if store.concept_to_abstract_set.contains_domain(&ind.concept) {
                    hit("rule_7_1", &ind.name);
                } else if store.concept_to_constant.contains_domain(&ind.concept) {
                    hit("rule_7_2", &ind.name);
                }
            }
        }
        for v in &m.data_values {
            if let DataSetRef::Named(ds) = &v.data_set {
                if store.custom_to_abstract_set.contains_domain(ds) && !store.datavalue_to_constant.contains_domain(&v.lexical_form) {
                    hit("rule_8", &v.lexical_form);
                }
            }
        }
        for r in &m.relations {
            let images_ready = store.concept_image(&r.domain).is_some() && store.concept_image(&r.range).is_some();
            let translated = store.relation_to_constant.contains_domain(&r.name) || store.relation_to_variable.contains_domain(&r.name);
            if images_ready && !translated {
                hit(if r.is_variable { "rule_13" } else { "rule_10" }, &r.name);
            }
            if !r.is_variable && store.relation_to_constant.contains_domain(&r.name) {
                let maplets_done = d
                    .relation_maplets
                    .values()
                    .filter(|rm| rm.relation == r.name)
                    .all(|rm| store.relationmaplet_to_constant.contains_domain(&rm.key()));
                if maplets_done && b.closure(&r.name).is_none() {
                    hit("rule_12_1", &r.name);
                }
                if r.flags.transitive && !store.characteristic_to_formula.contains_domain(&format!("{}.isTransitive", r.name)) {
                    hit("rule_16_1", &r.name);
                }
                if r.flags.symmetric && !store.characteristic_to_formula.contains_domain(&format!("{}.isSymmetric", r.name)) {
                    hit("rule_16_2", &r.name);
                }
            }
            if r.is_variable && store.relation_to_variable.contains_domain(&r.name) && still_empty(&b, &r.name) {
                hit("rule_12_2", &r.name);
            }
            if translated {
                for (card, inverse) in [(&r.range_cardinality, false), (&r.domain_cardinality, true)] {
                    for (cmp, value) in cardinality_bounds(card) {
                        if !has_cardinality(&b, &r.name, inverse, cmp, value) {
                            hit("cardinality_translation", &r.name);
                        }
                    }
                }
            }
        }
        for a in &m.attributes {
            let ready = store.concept_image(&a.domain).is_some() && store.dataset_to_set.contains_domain(a.range.name());
            let translated = store.attribute_to_constant.contains_domain(&a.name) || store.attribute_to_variable.contains_domain(&a.name);
            if ready && !translated {
                hit(if a.is_variable { "rule_13_attribute" } else { "rule_14" }, &a.name);
            }
            if !a.is_variable && store.attribute_to_constant.contains_domain(&a.name) {
                let maplets_done = d
                    .attribute_maplets
                    .values()
                    .filter(|am| am.attribute == a.name)
                    .all(|am| store.attributemaplet_to_constant.contains_domain(&am.key()));
                if maplets_done && b.closure(&a.name).is_none() {
                    hit("rule_15_1", &a.name);
                }
            }
            if a.is_variable && store.attribute_to_variable.contains_domain(&a.name) && still_empty(&b, &a.name) {
                hit("rule_15_2", &a.name);
            }
        }
        for rm in &m.relation_maplets {
            let rel_done = store.relation_to_constant.contains_domain(&rm.relation) || store.relation_to_variable.contains_domain(&rm.relation);
            let ends_done = store.individual_to_constant.contains_domain(&rm.antecedent) && store.individual_to_constant.contains_domain(&rm.image);
            if rel_done && ends_done && !store.relationmaplet_to_constant.contains_domain(&rm.key()) {
                hit("rule_11_1", &rm.key());
            }
        }
        for am in &m.attribute_maplets {
            let attr_done = store.attribute_to_constant.contains_domain(&am.attribute) || store.attribute_to_variable.contains_domain(&am.attribute);
            if attr_done
                && store.individual_to_constant.contains_domain(&am.antecedent)
                && !store.attributemaplet_to_constant.contains_domain(&am.key())
            {
                hit("rule_11_2", &am.key());
            }
        }
        let comp = store.domainmodel_to_component.get(&m.name).and_then(|n| components.iter().find(|c| c.name == n));
        for p in &m.predicates {
            let present = comp.is_some_and(|c| {
                c.properties.iter().chain(&c.invariants).any(|f| {
                    f.op == Operator::Raw && matches!(f.args.first(), Some(Operand::Raw { text }) if text == &p.text)
                })
            });
            if !present {
                hit("predicate_passthrough", &p.text);
            }
        }
    }
    out
}

fn still_empty(b: &BView<'_>, variable: &str) -> bool {
    b.initialisations().any(|a| a.target == variable && a.op == InitOperator::BecomeEqual2EmptySet)
}

fn has_cardinality(b: &BView<'_>, relation: &str, inverse: bool, cmp: Comparator, value: u32) -> bool {
    b.properties().chain(b.invariants()).any(|f| {
        f.op == Operator::CardinalityForAll
            && f.args.get(1).and_then(Operand::name) == Some(relation)
            && matches!(f.args.get(2), Some(Operand::Cardinality { inverse: i, comparator: c, value: v })
                if *i == inverse && *c == cmp && *v == value)
    })
}
