#![allow(dead_code)]

use std::collections::BTreeSet;

use ontb_core::bsystem::*;
use ontb_core::domain_model::*;
use ontb_core::translator::CorrespondenceStore;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub const LANDING_GEAR: &str = include_str!("../fixtures/landing_gear.ont");

pub fn landing_gear() -> Vec<DomainModel> {
    parse_dsl(LANDING_GEAR).expect("fixture parses")
}

/// Order-insensitive view of a component: every clause as a set of rendered lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    pub name: String,
    pub kind: ComponentKind,
    pub refines: Option<String>,
    pub sets: BTreeSet<String>,
    pub constants: BTreeSet<String>,
    pub properties: BTreeSet<String>,
    pub variables: BTreeSet<String>,
    pub invariants: BTreeSet<String>,
    pub init: BTreeSet<String>,
}

pub fn shape(c: &BSystemComponent) -> Shape {
    let set = |s: &BSet| match &s.variant {
        SetVariant::Enumerated { items } => {
            let mut items = items.clone();
            items.sort();
            format!("{} = {{{}}}", s.name, items.join(", "))
        }
        _ => s.name.clone(),
    };
    let f = |x: &Formula| canonical_formula(&render_formula(x).expect("renders"));
    Shape {
        name: c.name.clone(),
        kind: c.kind,
        refines: c.refines.clone(),
        sets: c.sets.iter().map(set).collect(),
        constants: c.constants.iter().map(|k| k.name.clone()).collect(),
        properties: c.properties.iter().map(f).collect(),
        variables: c.variables.iter().map(|v| v.name.clone()).collect(),
        invariants: c.invariants.iter().map(f).collect(),
        init: c.initialisations.iter().map(|a| canonical_formula(&render_init(a, EmitMode::Ascii))).collect(),
    }
}

/// Store contents with each map as an ordered set of pairs.
pub fn store_shape(store: &CorrespondenceStore) -> Vec<(&'static str, BTreeSet<(String, String)>)> {
    store
        .maps()
        .into_iter()
        .map(|(name, m)| (name, m.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()))
        .collect()
}

pub fn shapes(cs: &[BSystemComponent]) -> Vec<Shape> {
    cs.iter().map(shape).collect()
}

/// Sort the members of a top-level `{...}` extension so member order does
/// not matter.
pub fn canonical_formula(text: &str) -> String {
    match (text.find(" = {").or_else(|| text.find(" := {")), text.ends_with('}')) {
        (Some(i), true) => {
            let open = text[i..].find('{').unwrap() + i;
            let inner = &text[open + 1..text.len() - 1];
            if inner.contains('{') {
                return text.to_string();
            }
            let mut parts: Vec<&str> = inner.split(", ").filter(|p| !p.is_empty()).collect();
            parts.sort();
            format!("{}{{{}}}", &text[..open], parts.join(", "))
        }
        _ => text.to_string(),
    }
}

/// Parameters for random chain generation.
#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub max_models: usize,
    pub max_per_kind: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_models: 3, max_per_kind: 4 }
    }
}

/// Random valid linear chain. Names carry the model index so they stay
/// unique chain-wide.
pub fn gen_chain(seed: u64, cfg: GenConfig) -> Vec<DomainModel> {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.gen_range(1..=cfg.max_models);
    let mut chain: Vec<DomainModel> = Vec::new();
    // Visible elements so far, across ancestors.
    let mut concepts: Vec<String> = Vec::new();
    let mut individuals: Vec<(String, String)> = Vec::new();
    let mut enums: Vec<(String, Vec<String>)> = Vec::new();
    let mut customs: Vec<(String, Vec<String>)> = Vec::new();
    let mut naturals: Vec<String> = Vec::new();
    let mut variable_names: Vec<String> = Vec::new();

    for k in 0..n {
        let mut m = if k == 0 {
            DomainModel::new(format!("m{k}"))
        } else {
            DomainModel::with_parent(format!("m{k}"), format!("m{}", k - 1))
        };
        let count = |rng: &mut StdRng, lo: usize| rng.gen_range(lo..=cfg.max_per_kind);

        for j in 0..count(&mut rng, if k == 0 { 1 } else { 0 }) {
            let name = format!("C{k}_{j}");
            let parent = (!concepts.is_empty() && rng.gen_bool(0.3)).then(|| concepts.choose(&mut rng).unwrap().clone());
            let is_variable = rng.gen_bool(0.2);
            if is_variable {
                variable_names.push(name.clone());
            }
            m.concepts.push(Concept { name: name.clone(), is_variable, parent_concept: parent });
            concepts.push(name);
        }
        for j in 0..count(&mut rng, 0) {
            let name = format!("E{k}_{j}");
            let vals: Vec<String> = (0..rng.gen_range(1..=3)).map(|i| format!("e{k}_{j}_{i}")).collect();
            m.data_sets.push(DataSet::Enumerated { name: name.clone(), values: vals.clone() });
            enums.push((name, vals));
        }
        for j in 0..rng.gen_range(0..=2) {
            let name = format!("D{k}_{j}");
            m.data_sets.push(DataSet::Custom { name: name.clone() });
            customs.push((name, Vec::new()));
        }
        for (ds, vals) in customs.iter_mut() {
            for i in 0..rng.gen_range(0..=2) {
                let v = format!("d{k}_{}_{i}", ds.to_lowercase());
                m.data_values.push(DataValue { lexical_form: v.clone(), data_set: DataSetRef::Named(ds.clone()) });
                vals.push(v);
            }
        }
        for _ in 0..rng.gen_range(0..=2) {
            let v = format!("{}", rng.gen_range(0..1000u32) + 1000 * k as u32);
            if !naturals.contains(&v) {
                m.data_values.push(DataValue { lexical_form: v.clone(), data_set: DataSetRef::Default(DefaultKind::Natural) });
                naturals.push(v);
            }
        }
        for j in 0..count(&mut rng, 0) {
            let name = format!("I{k}_{j}");
            let c = concepts.choose(&mut rng).unwrap().clone();
            m.individuals.push(Individual { name: name.clone(), concept: c.clone() });
            individuals.push((name, c));
        }
        for j in 0..count(&mut rng, 0) {
            let name = format!("R{k}_{j}");
            let mut r = Relation::new(&name, concepts.choose(&mut rng).unwrap(), concepts.choose(&mut rng).unwrap());
            r.is_variable = rng.gen_bool(0.3);
            r.domain_cardinality = gen_card(&mut rng);
            r.range_cardinality = gen_card(&mut rng);
            if !r.is_variable {
                r.flags.transitive = rng.gen_bool(0.2);
                r.flags.symmetric = rng.gen_bool(0.2);
            }
            r.flags.reflexive = rng.gen_bool(0.05);
            let doms: Vec<&(String, String)> = individuals.iter().filter(|(_, c)| *c == r.domain).collect();
            let rans: Vec<&(String, String)> = individuals.iter().filter(|(_, c)| *c == r.range).collect();
            let mut pairs = BTreeSet::new();
            if !doms.is_empty() && !rans.is_empty() {
                for _ in 0..rng.gen_range(0..=3) {
                    pairs.insert((doms.choose(&mut rng).unwrap().0.clone(), rans.choose(&mut rng).unwrap().0.clone()));
                }
            }
            for (a, b) in pairs {
                m.relation_maplets.push(RelationMaplet { relation: name.clone(), antecedent: a, image: b });
            }
            if r.is_variable {
                variable_names.push(name.clone());
            }
            m.relations.push(r);
        }
        for j in 0..count(&mut rng, 0) {
            let name = format!("a{k}_{j}");
            let domain = concepts.choose(&mut rng).unwrap().clone();
            let (range, values): (DataSetRef, Vec<String>) = match rng.gen_range(0..3) {
                0 if !enums.is_empty() => {
                    let (n, v) = enums.choose(&mut rng).unwrap();
                    (DataSetRef::Named(n.clone()), v.clone())
                }
                1 if !customs.is_empty() => {
                    let (n, v) = customs.choose(&mut rng).unwrap();
                    (DataSetRef::Named(n.clone()), v.clone())
                }
                _ => (DataSetRef::Default(DefaultKind::Natural), naturals.clone()),
            };
            let mut a = Attribute::new(&name, &domain, range);
            a.is_variable = rng.gen_bool(0.4);
            a.is_functional = rng.gen_bool(0.7);
            let holders: Vec<&String> = individuals.iter().filter(|(_, c)| *c == domain).map(|(i, _)| i).collect();
            if !values.is_empty() {
                let mut used = BTreeSet::new();
                for h in holders {
                    if rng.gen_bool(0.6) && used.insert(h.clone()) {
                        let v = values.choose(&mut rng).unwrap().clone();
                        m.attribute_maplets.push(AttributeMaplet { attribute: name.clone(), antecedent: h.clone(), image: v });
                    }
                }
            }
            if a.is_variable {
                variable_names.push(name.clone());
            }
            m.attributes.push(a);
        }
        if rng.gen_bool(0.3) {
            let c = concepts.choose(&mut rng).unwrap();
            m.predicates.push(Predicate { kind: PredicateKind::Plain, text: format!("card({c}) >= 0") });
        }
        if k > 0 && !variable_names.is_empty() && rng.gen_bool(0.3) {
            let v = variable_names.choose(&mut rng).unwrap();
            m.predicates.push(Predicate { kind: PredicateKind::Gluing, text: format!("{v} = {v}") });
        }
        chain.push(m);
    }
    chain
}

fn gen_card(rng: &mut StdRng) -> Cardinality {
    match rng.gen_range(0..4) {
        0 => Cardinality::ANY,
        1 => Cardinality::exact(rng.gen_range(0..4)),
        2 => {
            let min = rng.gen_range(0..3);
            Cardinality::range(min, MaxCard::Bounded(min + rng.gen_range(0..3)))
        }
        _ => Cardinality::range(rng.gen_range(1..3), MaxCard::Star),
    }
}
