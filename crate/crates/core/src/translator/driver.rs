use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::store::CorrespondenceStore;
use crate::bsystem::*;
use crate::domain_model::*;
use crate::report::ValidationReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("domain model chain is invalid ({} violation(s))", .0.violations.len())]
    Invalid(ValidationReport),
    #[error("generated name `{name}` collides: declared in {}", .components.join(", "))]
    Collision { name: String, components: Vec<String> },
}

/// Forward translation of a root-first chain. Component `i` corresponds to
/// model `i`.
pub fn translate(chain: &[DomainModel]) -> Result<(Vec<BSystemComponent>, CorrespondenceStore), TranslateError> {
    let report = validate(chain);
    if !report.is_empty() {
        return Err(TranslateError::Invalid(report));
    }
    let mut d = Driver { chain, store: CorrespondenceStore::default(), comps: Vec::new() };
    d.components();
    d.default_datasets();
    d.sets();
    d.constants();
    d.typing();
    d.maplets();
    d.closures();
    d.characteristics();
    d.cardinalities();
    d.variables();
    d.predicates();
    check_collisions(&d.comps)?;
    Ok((d.comps, d.store))
}

fn check_collisions(comps: &[BSystemComponent]) -> Result<(), TranslateError> {
    let mut owners: HashMap<&str, Vec<String>> = HashMap::new();
    let mut order = Vec::new();
    for c in comps {
        for n in c.declared_names() {
            let e = owners.entry(n).or_default();
            if e.is_empty() {
                order.push(n);
            }
            e.push(c.name.clone());
        }
    }
    for n in order {
        if owners[n].len() > 1 {
            return Err(TranslateError::Collision { name: n.to_string(), components: owners[n].clone() });
        }
    }
    Ok(())
}

pub(crate) fn type_constant_name(name: &str) -> String {
    format!("T_{name}")
}

pub(crate) fn composition_name(relation: &str) -> String {
    format!("comp_{relation}")
}

pub(crate) fn inverse_name(relation: &str) -> String {
    format!("inv_{relation}")
}

pub(crate) fn concept_variable_name(concept: &str) -> String {
    format!("x_{concept}")
}

pub(crate) fn inline_maplet_name(owner: &str, antecedent: &str, image: &str) -> String {
    format!("{owner}({antecedent} |-> {image})")
}

/// Literal text of a value of a built-in data set.
pub(crate) fn literal(kind: DefaultKind, lexical: &str) -> String {
    match kind {
        DefaultKind::String => {
            format!("\"{}\"", lexical.replace('\\', "\\\\").replace('"', "\\\""))
        }
        DefaultKind::Bool => lexical.to_ascii_uppercase(),
        _ => lexical.to_string(),
    }
}

struct Driver<'a> {
    chain: &'a [DomainModel],
    store: CorrespondenceStore,
    comps: Vec<BSystemComponent>,
}

fn image_operand(store: &CorrespondenceStore, concept: &str) -> Operand {
    store
        .concept_image(concept)
        .map(|i| i.operand())
        .unwrap_or_else(|| panic!("concept `{concept}` translated out of order"))
}

impl<'a> Driver<'a> {
    fn models(&self) -> impl Iterator<Item = (usize, &'a DomainModel)> {
        self.chain.iter().enumerate()
    }

    fn data_set(&self, name: &str) -> &'a DataSet {
        self.chain.iter().flat_map(|m| &m.data_sets).find(|d| d.name() == name).expect("validated")
    }

    /// Individuals of `concept` or of any of its transitive sub-concepts,
    /// with their model index, in chain order.
    fn extent(&self, concept: &str, transitive: bool) -> Vec<(usize, &'a Individual)> {
        let index = ChainIndex::new(self.chain);
        let mut out = Vec::new();
        for (mi, m) in self.models() {
            for ind in &m.individuals {
                let hit = ind.concept == concept
                    || (transitive && index.concept_ancestors(mi, &ind.concept).iter().any(|a| a == concept));
                if hit {
                    out.push((mi, ind));
                }
            }
        }
        out
    }

    fn property(&mut self, comp: usize, f: Formula) {
        self.comps[comp].properties.push(f);
    }

    fn constant(&mut self, comp: usize, name: &str) {
        self.comps[comp].constants.push(Constant::new(name));
    }

    // Rules 1 and 2.
    fn components(&mut self) {
        for m in self.chain {
            let c = match &m.parent {
                None => BSystemComponent::system(&m.name),
                Some(p) => {
                    let refined = self.store.domainmodel_to_component.get(p).expect("root-first chain").to_string();
                    BSystemComponent::refinement(&m.name, refined)
                }
            };
            self.store.domainmodel_to_component.insert(&m.name, &c.name);
            self.comps.push(c);
        }
    }

    fn default_datasets(&mut self) {
        for k in DefaultKind::ALL {
            self.store.dataset_to_set.insert(k.keyword(), k.keyword());
            self.store.default_to_default_set.insert(k.keyword(), k.keyword());
        }
    }

    // Rules 3, 4 and 5.
    fn sets(&mut self) {
        for (mi, m) in self.models() {
            for c in m.concepts.iter().filter(|c| c.parent_concept.is_none()) {
                self.comps[mi].sets.push(BSet::abstract_set(&c.name));
                self.store.concept_to_abstract_set.insert(&c.name, &c.name);
            }
            for ds in &m.data_sets {
                let name = ds.name();
                self.store.dataset_to_set.insert(name, name);
                match ds {
                    DataSet::Enumerated { values, .. } => {
                        self.comps[mi].sets.push(BSet::enumerated(name, values.clone()));
                        self.store.enumerated_to_enumerated_set.insert(name, name);
                        for v in values {
                            self.store.datavalue_to_setitem.insert(v, v);
                        }
                    }
                    DataSet::Custom { .. } => {
                        self.comps[mi].sets.push(BSet::abstract_set(name));
                        self.store.custom_to_abstract_set.insert(name, name);
                    }
                }
            }
        }
    }

    // Rules 6, 7 and 8.
    fn constants(&mut self) {
        let mut pending: Vec<(usize, &'a Concept)> = self
            .models()
            .flat_map(|(mi, m)| m.concepts.iter().filter(|c| c.parent_concept.is_some()).map(move |c| (mi, c)))
            .collect();
        // A sub-concept waits until its parent has an image.
        while !pending.is_empty() {
            let before = pending.len();
            let mut rest = Vec::new();
            for (mi, c) in pending {
                let parent = c.parent_concept.as_deref().expect("filtered");
                match self.store.concept_image(parent).map(|i| i.operand()) {
                    Some(parent_img) => {
                        self.constant(mi, &c.name);
                        self.property(
                            mi,
                            Formula::typing(Operator::Inclusion, vec![Operand::constant(&c.name), parent_img]),
                        );
                        self.store.concept_to_constant.insert(&c.name, &c.name);
                    }
                    None => rest.push((mi, c)),
                }
            }
            assert!(rest.len() < before, "concept hierarchy validated acyclic");
            pending = rest;
        }

        for (mi, m) in self.models() {
            for ind in &m.individuals {
                let img = image_operand(&self.store, &ind.concept);
                self.constant(mi, &ind.name);
                self.property(mi, Formula::typing(Operator::Belonging, vec![Operand::constant(&ind.name), img]));
                self.store.individual_to_constant.insert(&ind.name, &ind.name);
            }
        }

        for (mi, m) in self.models() {
            for v in &m.data_values {
                let DataSetRef::Named(ds) = &v.data_set else { continue };
                let Some(set) = self.store.custom_to_abstract_set.get(ds).map(str::to_string) else { continue };
                self.constant(mi, &v.lexical_form);
                self.property(
                    mi,
                    Formula::typing(Operator::Belonging, vec![Operand::constant(&v.lexical_form), Operand::set(set)]),
                );
                self.store.datavalue_to_constant.insert(&v.lexical_form, &v.lexical_form);
            }
        }
    }

    // Rules 10, 13 and 14. The four variants of each differ only in whether
    // the domain/range images are sets or constants, which the operand kind
    // carries.
    fn typing(&mut self) {
        for (mi, m) in self.models() {
            for r in &m.relations {
                let t = type_constant_name(&r.name);
                let dom = image_operand(&self.store, &r.domain);
                let ran = image_operand(&self.store, &r.range);
                self.constant(mi, &t);
                self.property(mi, Formula::typing(Operator::RelationSet, vec![Operand::constant(&t), dom, ran]));
                self.store.relation_to_type_constant.insert(&r.name, &t);
                if r.is_variable {
                    // Rule 13; variants other than set/set are analogues.
                    self.declare_variable(mi, &r.name, &t);
                    self.store.relation_to_variable.insert(&r.name, &r.name);
                } else {
                    self.constant(mi, &r.name);
                    self.property(mi, Formula::typing(Operator::Belonging, vec![Operand::constant(&r.name), Operand::constant(&t)]));
                    self.store.relation_to_constant.insert(&r.name, &r.name);
                }
            }
            for a in &m.attributes {
                let t = type_constant_name(&a.name);
                let dom = image_operand(&self.store, &a.domain);
                let ran = Operand::set(self.store.dataset_to_set.get(a.range.name()).expect("validated"));
                let op = if a.is_functional { Operator::FunctionSet } else { Operator::RelationSet };
                self.constant(mi, &t);
                self.property(mi, Formula::typing(op, vec![Operand::constant(&t), dom, ran]));
                self.store.attribute_to_type_constant.insert(&a.name, &t);
                if a.is_variable {
                    // Analogue of rule 13 for attributes.
                    self.declare_variable(mi, &a.name, &t);
                    self.store.attribute_to_variable.insert(&a.name, &a.name);
                } else {
                    self.constant(mi, &a.name);
                    self.property(mi, Formula::typing(Operator::Belonging, vec![Operand::constant(&a.name), Operand::constant(&t)]));
                    self.store.attribute_to_constant.insert(&a.name, &a.name);
                }
            }
        }
    }

    fn declare_variable(&mut self, comp: usize, name: &str, type_constant: &str) {
        let c = &mut self.comps[comp];
        c.variables.push(Variable::new(name));
        c.invariants
            .push(Formula::typing(Operator::Belonging, vec![Operand::variable(name), Operand::constant(type_constant)]));
        c.initialisations.push(InitialisationAction::empty(name));
    }

    // Rule 11. Maplets are inlined, so only the correspondence is recorded.
    fn maplets(&mut self) {
        for m in self.chain {
            for rm in &m.relation_maplets {
                let b = inline_maplet_name(&rm.relation, &rm.antecedent, &rm.image);
                self.store.relationmaplet_to_constant.insert(rm.key(), b);
            }
            for am in &m.attribute_maplets {
                let b = inline_maplet_name(&am.attribute, &am.antecedent, &am.image);
                self.store.attributemaplet_to_constant.insert(am.key(), b);
            }
        }
    }

    fn relation_members(&self, relation: &str) -> (Vec<Operand>, usize) {
        let mut deepest = 0;
        let mut members = Vec::new();
        for (mi, m) in self.models() {
            for rm in m.relation_maplets.iter().filter(|rm| rm.relation == relation) {
                let a = self.store.individual_to_constant.get(&rm.antecedent).expect("rule 7 ran");
                let b = self.store.individual_to_constant.get(&rm.image).expect("rule 7 ran");
                members.push(Operand::maplet(a, b));
                deepest = deepest.max(mi);
            }
        }
        (members, deepest)
    }

    fn attribute_members(&self, attr: &Attribute) -> (Vec<Operand>, usize) {
        let mut deepest = 0;
        let mut members = Vec::new();
        for (mi, m) in self.models() {
            for am in m.attribute_maplets.iter().filter(|am| am.attribute == attr.name) {
                let a = self.store.individual_to_constant.get(&am.antecedent).expect("rule 7 ran");
                let op = match &attr.range {
                    DataSetRef::Default(k) => Operand::maplet_to_literal(a, literal(*k, &am.image)),
                    DataSetRef::Named(ds) => match self.data_set(ds) {
                        DataSet::Enumerated { .. } => {
                            Operand::maplet(a, self.store.datavalue_to_setitem.get(&am.image).expect("rule 4 ran"))
                        }
                        DataSet::Custom { .. } => {
                            Operand::maplet(a, self.store.datavalue_to_constant.get(&am.image).expect("rule 8 ran"))
                        }
                    },
                };
                members.push(op);
                deepest = deepest.max(mi);
            }
        }
        (members, deepest)
    }

    /// Closures are placed in the deepest component that can see every
    /// member: the owner's, or a descendant contributing maplets or individuals.
    fn closures(&mut self) {
        for (mi, m) in self.models() {
            // Rule 12_1.
            for r in m.relations.iter().filter(|r| !r.is_variable) {
                let (members, deepest) = self.relation_members(&r.name);
                let mut args = vec![Operand::constant(&r.name)];
                args.extend(members);
                self.property(mi.max(deepest), Formula::new(Operator::Equal2SetOf, args));
            }
            // Rule 15_1.
            for a in m.attributes.iter().filter(|a| !a.is_variable) {
                let (members, deepest) = self.attribute_members(a);
                let mut args = vec![Operand::constant(&a.name)];
                args.extend(members);
                self.property(mi.max(deepest), Formula::new(Operator::Equal2SetOf, args));
            }
            // Extent of a constant concept.
            for c in m.concepts.iter().filter(|c| !c.is_variable) {
                let extent = self.extent(&c.name, true);
                if extent.is_empty() {
                    continue;
                }
                let deepest = extent.iter().map(|(i, _)| *i).max().unwrap_or(mi).max(mi);
                let mut args = vec![image_operand(&self.store, &c.name)];
                args.extend(extent.iter().map(|(_, ind)| Operand::constant(&ind.name)));
                self.property(deepest, Formula::new(Operator::Equal2SetOf, args));
            }
        }
    }

    // Rule 16, constant relations only.
    fn characteristics(&mut self) {
        for (mi, m) in self.models() {
            for r in m.relations.iter().filter(|r| !r.is_variable) {
                let rel = Operand::constant(&r.name);
                if r.flags.transitive {
                    let comp = composition_name(&r.name);
                    self.constant(mi, &comp);
                    self.property(
                        mi,
                        Formula::typing(Operator::RelationComposition, vec![Operand::constant(&comp), rel.clone(), rel.clone()]),
                    );
                    let ch = Formula::new(Operator::Inclusion, vec![Operand::constant(&comp), rel.clone()]);
                    let text = render_formula(&ch).expect("well-formed");
                    self.property(mi, ch);
                    self.store.characteristic_to_formula.insert(format!("{}.isTransitive", r.name), text);
                }
                if r.flags.symmetric {
                    let inv = inverse_name(&r.name);
                    self.constant(mi, &inv);
                    self.property(mi, Formula::typing(Operator::Inversion, vec![Operand::constant(&inv), rel.clone()]));
                    let ch = Formula::new(Operator::Equality, vec![Operand::constant(&inv), rel.clone()]);
                    let text = render_formula(&ch).expect("well-formed");
                    self.property(mi, ch);
                    self.store.characteristic_to_formula.insert(format!("{}.isSymmetric", r.name), text);
                }
            }
        }
    }

    fn cardinalities(&mut self) {
        for (mi, m) in self.models() {
            for r in &m.relations {
                let rel = if r.is_variable { Operand::variable(&r.name) } else { Operand::constant(&r.name) };
                let mut formulas = Vec::new();
                // The range cardinality bounds the images of each domain element.
                for (card, over, inverse) in
                    [(&r.range_cardinality, &r.domain, false), (&r.domain_cardinality, &r.range, true)]
                {
                    for (comparator, value) in cardinality_bounds(card) {
                        formulas.push(Formula::new(
                            Operator::CardinalityForAll,
                            vec![
                                image_operand(&self.store, over),
                                rel.clone(),
                                Operand::Cardinality { inverse, comparator, value },
                            ],
                        ));
                    }
                }
                let c = &mut self.comps[mi];
                if r.is_variable {
                    c.invariants.extend(formulas);
                } else {
                    c.properties.extend(formulas);
                }
            }
        }
    }

    // Rules 9 and 12_2 (with its attribute analogue).
    fn variables(&mut self) {
        for (mi, m) in self.models() {
            for c in m.concepts.iter().filter(|c| c.is_variable) {
                let x = concept_variable_name(&c.name);
                let img = image_operand(&self.store, &c.name);
                let extent = self.extent(&c.name, false);
                let deepest = extent.iter().map(|(i, _)| *i).max().unwrap_or(mi).max(mi);
                let comp = &mut self.comps[mi];
                comp.variables.push(Variable::new(&x));
                comp.invariants.push(Formula::typing(Operator::Inclusion, vec![Operand::variable(&x), img]));
                let members = extent.iter().map(|(_, ind)| Operand::constant(&ind.name)).collect();
                self.comps[deepest].initialisations.push(InitialisationAction::set_of(&x, members));
                self.store.concept_to_variable.insert(&c.name, &x);
            }
            for r in m.relations.iter().filter(|r| r.is_variable) {
                let (members, deepest) = self.relation_members(&r.name);
                self.close_variable(mi, mi.max(deepest), &r.name, members);
            }
            for a in m.attributes.iter().filter(|a| a.is_variable) {
                let (members, deepest) = self.attribute_members(a);
                self.close_variable(mi, mi.max(deepest), &a.name, members);
            }
        }
    }

    fn close_variable(&mut self, owner: usize, target: usize, name: &str, members: Vec<Operand>) {
        self.comps[owner].initialisations.retain(|a| a.target != name);
        self.comps[target].initialisations.push(InitialisationAction::set_of(name, members));
    }

    fn predicates(&mut self) {
        let index = ChainIndex::new(self.chain);
        for (mi, m) in self.models() {
            let visible_vars: HashSet<String> = index
                .visible(mi)
                .into_iter()
                .flat_map(|i| self.comps[i].variables.iter().map(|v| v.name.clone()))
                .collect();
            for p in &m.predicates {
                let f = Formula::raw(&p.text);
                let dynamic = p.kind == PredicateKind::Gluing || identifiers(&p.text).any(|w| visible_vars.contains(w));
                if dynamic {
                    self.comps[mi].invariants.push(f);
                } else {
                    self.comps[mi].properties.push(f);
                }
            }
        }
    }
}

/// Comparisons a cardinality imposes: one equality when the bounds meet,
/// otherwise a lower bound (unless 0) and an upper bound (unless unbounded).
pub(crate) fn cardinality_bounds(card: &Cardinality) -> Vec<(Comparator, u32)> {
    match card.max {
        MaxCard::Bounded(max) if max == card.min => vec![(Comparator::Eq, max)],
        max => {
            let mut out = Vec::new();
            if card.min > 0 {
                out.push((Comparator::Ge, card.min));
            }
            if let MaxCard::Bounded(max) = max {
                out.push((Comparator::Le, max));
            }
            out
        }
    }
}

pub(crate) fn identifiers(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).filter(|w| !w.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain_model::parse_dsl;

    const SAMPLE: &str = r#"domain_model m {
    concept A
    concept B extends A
    concept V variable
    custom_dataset D
    data_value "d1" : D
    data_value "hello" : STRING
    data_value "true" : BOOL
    relation r { domain A range A transitive symmetric card_range 1..2 card_domain 2..* }
    relation w { domain A range V variable card_range 0..1 }
    attribute name { domain A range STRING }
    attribute flag { domain B range BOOL functional false }
    attribute tag { domain A range D variable }
    individual a : A
    individual b : B
    individual v : V
    maplet a -> a : r
    attr_maplet a -> "hello" : name
    attr_maplet b -> "true" : flag
    attr_maplet a -> "d1" : tag
    predicate "card(A) > 0"
    predicate "card(w) >= 0"
}
domain_model c parent m {
    individual a2 : A
    maplet a2 -> a : r
}
"#;

    fn lines(fs: &[Formula]) -> Vec<String> {
        fs.iter().map(|f| render_formula(f).unwrap()).collect()
    }

    fn sample() -> (Vec<BSystemComponent>, CorrespondenceStore) {
        translate(&parse_dsl(SAMPLE).unwrap()).unwrap()
    }

    #[test]
    fn concepts_become_sets_or_constants() {
        let (comps, store) = sample();
        let root = &comps[0];
        assert!(root.set("A").is_some() && root.set("V").is_some());
        assert!(root.has_constant("B"));
        assert!(lines(&root.properties).contains(&"B <: A".to_string()));
        assert_eq!(store.concept_to_constant.get("B"), Some("B"));
    }

    #[test]
    fn relations_and_attributes_are_typed() {
        let (comps, _) = sample();
        let props = lines(&comps[0].properties);
        for want in ["T_r = A <-> A", "r : T_r", "T_name = A --> STRING", "T_flag = B <-> BOOL", "T_tag = A --> D"] {
            assert!(props.contains(&want.to_string()), "missing {want}");
        }
        assert!(comps[0].has_variable("w") && comps[0].has_variable("tag"));
        assert!(lines(&comps[0].invariants).contains(&"w : T_w".to_string()));
    }

    #[test]
    fn default_literals_are_rendered_as_b_literals() {
        let (comps, _) = sample();
        let props = lines(&comps[0].properties);
        assert!(props.contains(&r#"name = {a |-> "hello"}"#.to_string()));
        assert!(props.contains(&"flag = {b |-> TRUE}".to_string()));
    }

    #[test]
    fn characteristics_use_helper_constants() {
        let (comps, store) = sample();
        let props = lines(&comps[0].properties);
        for want in ["comp_r = r ; r", "comp_r <: r", "inv_r = r~", "inv_r = r"] {
            assert!(props.contains(&want.to_string()), "missing {want}");
        }
        assert_eq!(store.characteristic_to_formula.get("r.isTransitive"), Some("comp_r <: r"));
    }

    #[test]
    fn cardinalities_bound_images() {
        let (comps, _) = sample();
        let props = lines(&comps[0].properties);
        assert!(props.contains(&"!xx.(xx : A => card(r[{xx}]) >= 1)".to_string()));
        assert!(props.contains(&"!xx.(xx : A => card(r[{xx}]) <= 2)".to_string()));
        assert!(props.contains(&"!xx.(xx : A => card(r~[{xx}]) >= 2)".to_string()));
        // Variable relations are bounded by invariants instead.
        assert!(lines(&comps[0].invariants).contains(&"!xx.(xx : A => card(w[{xx}]) <= 1)".to_string()));
    }

    #[test]
    fn variable_concept_gets_a_variable() {
        let (comps, store) = sample();
        assert_eq!(store.concept_to_variable.get("V"), Some("x_V"));
        assert!(lines(&comps[0].invariants).contains(&"x_V <: V".to_string()));
        let init: Vec<String> = comps[0].initialisations.iter().map(|a| render_init(a, EmitMode::Ascii)).collect();
        assert_eq!(init, ["x_V := {v}", "w := {}", "tag := {a |-> d1}"]);
    }

    #[test]
    fn closures_move_to_the_deepest_contributor() {
        let (comps, _) = sample();
        let child = lines(&comps[1].properties);
        assert!(child.contains(&"r = {a |-> a, a2 |-> a}".to_string()));
        assert!(child.contains(&"A = {a, b, a2}".to_string()));
        assert!(!lines(&comps[0].properties).iter().any(|p| p.starts_with("r = {")));
    }

    #[test]
    fn predicates_follow_the_names_they_mention() {
        let (comps, _) = sample();
        assert!(lines(&comps[0].properties).contains(&"card(A) > 0".to_string()));
        assert!(lines(&comps[0].invariants).contains(&"card(w) >= 0".to_string()));
    }

    #[test]
    fn invalid_chain_is_not_translated() {
        let chain = parse_dsl("domain_model m {\n    concept A\n    relation r { domain A range A card_range 2..1 }\n}\n").unwrap();
        assert!(matches!(translate(&chain), Err(TranslateError::Invalid(_))));
    }

    #[test]
    fn generated_names_may_collide() {
        let chain = parse_dsl("domain_model m {\n    concept A\n    concept T_r\n    relation r { domain A range A }\n}\n").unwrap();
        match translate(&chain) {
            Err(TranslateError::Collision { name, .. }) => assert_eq!(name, "T_r"),
            other => panic!("expected a collision, got {other:?}"),
        }
    }

    #[test]
    fn empty_chain_translates_to_nothing() {
        let (comps, store) = translate(&[]).unwrap();
        assert!(comps.is_empty() && store.domainmodel_to_component.is_empty());
    }
}
