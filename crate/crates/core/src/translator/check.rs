use std::collections::{HashMap, HashSet};

use super::store::{Correspondence, CorrespondenceStore};
use crate::bsystem::*;
use crate::domain_model::*;
use crate::report::{DiagCode, ValidationReport};

/// Name-level view of every B element declared along a component chain.
pub(crate) struct BView<'a> {
    pub comps: &'a [BSystemComponent],
    pub sets: HashMap<&'a str, &'a BSet>,
    pub items: HashSet<&'a str>,
    pub constants: HashSet<&'a str>,
    pub variables: HashSet<&'a str>,
}

impl<'a> BView<'a> {
    pub fn new(comps: &'a [BSystemComponent]) -> Self {
        let mut v = BView { comps, sets: HashMap::new(), items: HashSet::new(), constants: HashSet::new(), variables: HashSet::new() };
        for c in comps {
            for s in &c.sets {
                v.sets.insert(&s.name, s);
                if let SetVariant::Enumerated { items } = &s.variant {
                    v.items.extend(items.iter().map(String::as_str));
                }
            }
            v.constants.extend(c.constants.iter().map(|k| k.name.as_str()));
            v.variables.extend(c.variables.iter().map(|x| x.name.as_str()));
        }
        v
    }

    pub fn properties(&self) -> impl Iterator<Item = &'a Formula> {
        self.comps.iter().flat_map(|c| &c.properties)
    }

    pub fn invariants(&self) -> impl Iterator<Item = &'a Formula> {
        self.comps.iter().flat_map(|c| &c.invariants)
    }

    pub fn initialisations(&self) -> impl Iterator<Item = &'a InitialisationAction> {
        self.comps.iter().flat_map(|c| &c.initialisations)
    }

    pub fn is_abstract_set(&self, name: &str) -> bool {
        matches!(self.sets.get(name), Some(BSet { variant: SetVariant::Abstract, .. }))
    }

    pub fn is_enumerated_set(&self, name: &str) -> bool {
        matches!(self.sets.get(name), Some(BSet { variant: SetVariant::Enumerated { .. }, .. }))
    }

    /// Closure formula `name = {...}` among properties.
    pub fn closure(&self, name: &str) -> Option<&'a Formula> {
        self.properties().find(|f| f.op == Operator::Equal2SetOf && f.args.first().and_then(Operand::name) == Some(name))
    }
}

/// Name-level view of every domain element along a chain.
pub(crate) struct DView<'a> {
    pub models: HashSet<&'a str>,
    pub concepts: HashMap<&'a str, &'a Concept>,
    pub relations: HashMap<&'a str, &'a Relation>,
    pub attributes: HashMap<&'a str, &'a Attribute>,
    pub data_sets: HashMap<&'a str, &'a DataSet>,
    pub individuals: HashMap<&'a str, &'a Individual>,
    /// Lexical forms of enumerated values and of custom-set data values.
    pub enum_values: HashSet<&'a str>,
    pub custom_values: HashSet<&'a str>,
    pub relation_maplets: HashMap<String, &'a RelationMaplet>,
    pub attribute_maplets: HashMap<String, &'a AttributeMaplet>,
}

impl<'a> DView<'a> {
    pub fn new(chain: &'a [DomainModel]) -> Self {
        let mut v = DView {
            models: HashSet::new(),
            concepts: HashMap::new(),
            relations: HashMap::new(),
            attributes: HashMap::new(),
            data_sets: HashMap::new(),
            individuals: HashMap::new(),
            enum_values: HashSet::new(),
            custom_values: HashSet::new(),
            relation_maplets: HashMap::new(),
            attribute_maplets: HashMap::new(),
        };
        for m in chain {
            v.models.insert(&m.name);
            v.concepts.extend(m.concepts.iter().map(|c| (c.name.as_str(), c)));
            v.relations.extend(m.relations.iter().map(|r| (r.name.as_str(), r)));
            v.attributes.extend(m.attributes.iter().map(|a| (a.name.as_str(), a)));
            v.individuals.extend(m.individuals.iter().map(|i| (i.name.as_str(), i)));
            for d in &m.data_sets {
                v.data_sets.insert(d.name(), d);
                if let DataSet::Enumerated { values, .. } = d {
                    v.enum_values.extend(values.iter().map(String::as_str));
                }
            }
            v.relation_maplets.extend(m.relation_maplets.iter().map(|rm| (rm.key(), rm)));
            v.attribute_maplets.extend(m.attribute_maplets.iter().map(|am| (am.key(), am)));
        }
        for m in chain {
            for dv in &m.data_values {
                if let DataSetRef::Named(ds) = &dv.data_set {
                    if matches!(v.data_sets.get(ds.as_str()), Some(DataSet::Custom { .. })) {
                        v.custom_values.insert(&dv.lexical_form);
                    }
                }
            }
        }
        v
    }

    pub fn has_data_set(&self, name: &str) -> bool {
        self.data_sets.contains_key(name) || DefaultKind::from_keyword(name).is_some()
    }
}

fn at(map: &str, key: &str) -> String {
    format!("store/{map}/{key}")
}

/// Injectivity of one map: no domain key twice, no image shared.
fn injective(report: &mut ValidationReport, tag: &str, field: &str, map: &Correspondence) {
    for d in map.duplicate_domains() {
        report.error(DiagCode::invariant(tag), at(field, d), "domain element has more than one image");
    }
    for b in map.duplicate_images() {
        let owners: Vec<&str> = map.iter().filter(|(_, x)| *x == b).map(|(d, _)| d).collect();
        report.error(
            DiagCode::invariant(tag),
            at(field, b),
            format!("`{b}` is the image of {} elements ({})", owners.len(), owners.join(", ")),
        );
    }
}

struct MapCheck<'s> {
    field: &'static str,
    map: &'s Correspondence,
    tag: &'static str,
    domain_tag: &'static str,
    domain_ok: Box<dyn Fn(&str) -> bool + 's>,
    target_tag: &'static str,
    target_ok: Box<dyn Fn(&str) -> bool + 's>,
    target_what: &'static str,
}

/// Consistency of a store against the domain chain it was built from and the
/// component chain it describes. Each violation carries its invariant tag.
pub fn check_store(store: &CorrespondenceStore, chain: &[DomainModel], components: &[BSystemComponent]) -> ValidationReport {
    let mut report = ValidationReport::default();
    let b = BView::new(components);
    let d = DView::new(chain);

    check_components(&mut report, store, chain, components);

    let comp_names: HashSet<&str> = components.iter().map(|c| c.name.as_str()).collect();
    let is_constant = |n: &str| b.constants.contains(n);
    let checks: Vec<MapCheck<'_>> = vec![
        MapCheck {
            field: "domainmodel_to_component",
            map: &store.domainmodel_to_component,
            tag: "inv0_5",
            domain_tag: "inv0_3",
            domain_ok: Box::new(|n| d.models.contains(n)),
            target_tag: "inv1_6",
            target_ok: Box::new(|n| comp_names.contains(n)),
            target_what: "component",
        },
        MapCheck {
            field: "concept_to_abstract_set",
            map: &store.concept_to_abstract_set,
            tag: "inv1_23",
            domain_tag: "inv1_10",
            domain_ok: Box::new(|n| d.concepts.contains_key(n)),
            target_tag: "inv1_7",
            target_ok: Box::new(|n| b.is_abstract_set(n)),
            target_what: "abstract set",
        },
        MapCheck {
            field: "enumerated_to_enumerated_set",
            map: &store.enumerated_to_enumerated_set,
            tag: "inv1_24",
            domain_tag: "inv1_11",
            domain_ok: Box::new(|n| matches!(d.data_sets.get(n), Some(DataSet::Enumerated { .. }))),
            target_tag: "inv1_7",
            target_ok: Box::new(|n| b.is_enumerated_set(n)),
            target_what: "enumerated set",
        },
        MapCheck {
            field: "datavalue_to_setitem",
            map: &store.datavalue_to_setitem,
            tag: "inv1_25",
            domain_tag: "inv1_12",
            domain_ok: Box::new(|n| d.enum_values.contains(n)),
            target_tag: "inv1_7",
            target_ok: Box::new(|n| b.items.contains(n)),
            target_what: "set item",
        },
        MapCheck {
            field: "custom_to_abstract_set",
            map: &store.custom_to_abstract_set,
            tag: "inv1_27",
            domain_tag: "inv1_11",
            domain_ok: Box::new(|n| matches!(d.data_sets.get(n), Some(DataSet::Custom { .. }))),
            target_tag: "inv1_7",
            target_ok: Box::new(|n| b.is_abstract_set(n)),
            target_what: "abstract set",
        },
        MapCheck {
            field: "default_to_default_set",
            map: &store.default_to_default_set,
            tag: "inv1_29",
            domain_tag: "inv1_11",
            domain_ok: Box::new(|n| DefaultKind::from_keyword(n).is_some()),
            target_tag: "inv1_7",
            target_ok: Box::new(|n| DefaultKind::from_keyword(n).is_some()),
            target_what: "built-in set",
        },
        MapCheck {
            field: "dataset_to_set",
            map: &store.dataset_to_set,
            tag: "inv1_101",
            domain_tag: "inv1_11",
            domain_ok: Box::new(|n| d.has_data_set(n)),
            target_tag: "inv1_7",
            target_ok: Box::new(|n| b.sets.contains_key(n) || DefaultKind::from_keyword(n).is_some()),
            target_what: "set",
        },
        MapCheck {
            field: "concept_to_constant",
            map: &store.concept_to_constant,
            tag: "inv1_31",
            domain_tag: "inv1_10",
            domain_ok: Box::new(|n| d.concepts.contains_key(n)),
            target_tag: "inv1_8",
            target_ok: Box::new(is_constant),
            target_what: "constant",
        },
        MapCheck {
            field: "individual_to_constant",
            map: &store.individual_to_constant,
            tag: "inv1_44",
            domain_tag: "inv1_13",
            domain_ok: Box::new(|n| d.individuals.contains_key(n)),
            target_tag: "inv1_8",
            target_ok: Box::new(is_constant),
            target_what: "constant",
        },
        MapCheck {
            field: "datavalue_to_constant",
            map: &store.datavalue_to_constant,
            tag: "inv1_45",
            domain_tag: "inv1_12",
            domain_ok: Box::new(|n| d.custom_values.contains(n)),
            target_tag: "inv1_8",
            target_ok: Box::new(is_constant),
            target_what: "constant",
        },
        MapCheck {
            field: "concept_to_variable",
            map: &store.concept_to_variable,
            tag: "inv1_46",
            domain_tag: "inv1_10",
            domain_ok: Box::new(|n| d.concepts.get(n).is_some_and(|c| c.is_variable)),
            target_tag: "inv1_8",
            target_ok: Box::new(|n| b.variables.contains(n)),
            target_what: "variable",
        },
        MapCheck {
            field: "relation_to_type_constant",
            map: &store.relation_to_type_constant,
            tag: "inv1_89",
            domain_tag: "inv1_53",
            domain_ok: Box::new(|n| d.relations.contains_key(n)),
            target_tag: "inv1_8",
            target_ok: Box::new(is_constant),
            target_what: "constant",
        },
        MapCheck {
            field: "relation_to_constant",
            map: &store.relation_to_constant,
            tag: "inv1_90",
            domain_tag: "inv1_53",
            domain_ok: Box::new(|n| d.relations.get(n).is_some_and(|r| !r.is_variable)),
            target_tag: "inv1_8",
            target_ok: Box::new(is_constant),
            target_what: "constant",
        },
        MapCheck {
            field: "relation_to_variable",
            map: &store.relation_to_variable,
            tag: "inv1_91",
            domain_tag: "inv1_53",
            domain_ok: Box::new(|n| d.relations.get(n).is_some_and(|r| r.is_variable)),
            target_tag: "inv1_8",
            target_ok: Box::new(|n| b.variables.contains(n)),
            target_what: "variable",
        },
        MapCheck {
            field: "attribute_to_type_constant",
            map: &store.attribute_to_type_constant,
            tag: "inv1_93",
            domain_tag: "inv1_56",
            domain_ok: Box::new(|n| d.attributes.contains_key(n)),
            target_tag: "inv1_8",
            target_ok: Box::new(is_constant),
            target_what: "constant",
        },
        MapCheck {
            field: "attribute_to_constant",
            map: &store.attribute_to_constant,
            tag: "inv1_94",
            domain_tag: "inv1_56",
            domain_ok: Box::new(|n| d.attributes.get(n).is_some_and(|a| !a.is_variable)),
            target_tag: "inv1_8",
            target_ok: Box::new(is_constant),
            target_what: "constant",
        },
        MapCheck {
            field: "attribute_to_variable",
            map: &store.attribute_to_variable,
            tag: "inv1_95",
            domain_tag: "inv1_56",
            domain_ok: Box::new(|n| d.attributes.get(n).is_some_and(|a| a.is_variable)),
            target_tag: "inv1_8",
            target_ok: Box::new(|n| b.variables.contains(n)),
            target_what: "variable",
        },
        MapCheck {
            field: "relationmaplet_to_constant",
            map: &store.relationmaplet_to_constant,
            tag: "inv1_100",
            domain_tag: "inv1_57",
            domain_ok: Box::new(|n| d.relation_maplets.contains_key(n)),
            target_tag: "inv1_100",
            target_ok: Box::new(|_| true),
            target_what: "maplet",
        },
        MapCheck {
            field: "attributemaplet_to_constant",
            map: &store.attributemaplet_to_constant,
            tag: "inv1_102",
            domain_tag: "inv1_58",
            domain_ok: Box::new(|n| d.attribute_maplets.contains_key(n)),
            target_tag: "inv1_102",
            target_ok: Box::new(|_| true),
            target_what: "maplet",
        },
        MapCheck {
            field: "characteristic_to_formula",
            map: &store.characteristic_to_formula,
            tag: "inv1_99",
            domain_tag: "inv1_53",
            domain_ok: Box::new(|n| characteristic_holds(&d, n)),
            target_tag: "inv1_99",
            target_ok: Box::new(|_| true),
            target_what: "formula",
        },
    ];

    for c in &checks {
        injective(&mut report, c.tag, c.field, c.map);
        for (dom, img) in c.map.iter() {
            if !(c.domain_ok)(dom) {
                report.error(DiagCode::invariant(c.domain_tag), at(c.field, dom), "domain element does not exist");
            }
            if !(c.target_ok)(img) {
                report.error(
                    DiagCode::invariant(c.target_tag),
                    at(c.field, dom),
                    format!("{} `{img}` is not declared in any component", c.target_what),
                );
            }
        }
    }
    drop(checks);

    check_dataset_partition(&mut report, store);
    check_typed_images(&mut report, store);
    check_maplets(&mut report, store, &b, &d);
    check_characteristics(&mut report, store, &b);
    check_typing_totality(&mut report, &b);
    report
}

fn characteristic_holds(d: &DView<'_>, key: &str) -> bool {
    let Some((rel, flag)) = key.rsplit_once('.') else { return false };
    match (d.relations.get(rel), flag) {
        (Some(r), "isTransitive") => r.flags.transitive && !r.is_variable,
        (Some(r), "isSymmetric") => r.flags.symmetric && !r.is_variable,
        _ => false,
    }
}

fn check_components(report: &mut ValidationReport, store: &CorrespondenceStore, chain: &[DomainModel], comps: &[BSystemComponent]) {
    let by_name: HashMap<&str, &BSystemComponent> = comps.iter().map(|c| (c.name.as_str(), c)).collect();
    for c in comps {
        let p = format!("components/{}", c.name);
        match (c.kind, &c.refines) {
            (ComponentKind::System, Some(r)) => {
                report.error(DiagCode::invariant("inv0_2"), p, format!("SYSTEM component also refines `{r}`"))
            }
            (ComponentKind::Refinement, None) => {
                report.error(DiagCode::invariant("inv0_6"), p, "REFINEMENT does not refine any component")
            }
            (ComponentKind::Refinement, Some(r)) if !by_name.contains_key(r.as_str()) || r == &c.name => {
                report.error(DiagCode::invariant("inv0_6"), p, format!("refined component `{r}` does not exist"))
            }
            _ => {}
        }
    }
    for m in chain {
        let p = format!("store/domainmodel_to_component/{}", m.name);
        let Some(cn) = store.domainmodel_to_component.get(&m.name) else {
            report.error(DiagCode::invariant("inv0_5"), p, "domain model has no component");
            continue;
        };
        let Some(c) = by_name.get(cn) else { continue };
        match &m.parent {
            None if c.kind != ComponentKind::System => {
                report.error(DiagCode::invariant("inv0_7"), p, format!("root model's component `{cn}` is not a SYSTEM"))
            }
            Some(parent) => {
                let expected = store.domainmodel_to_component.get(parent);
                if expected.is_none() || c.refines.as_deref() != expected {
                    report.error(
                        DiagCode::invariant("inv0_7"),
                        p,
                        format!(
                            "component `{cn}` must refine `{}`, the component of parent model `{parent}`",
                            expected.unwrap_or("?")
                        ),
                    );
                }
            }
            None => {}
        }
    }
}

fn check_dataset_partition(report: &mut ValidationReport, store: &CorrespondenceStore) {
    let subs = [
        ("enumerated_to_enumerated_set", &store.enumerated_to_enumerated_set),
        ("custom_to_abstract_set", &store.custom_to_abstract_set),
        ("default_to_default_set", &store.default_to_default_set),
    ];
    for (field, sub) in subs {
        for (dom, img) in sub.iter() {
            if store.dataset_to_set.get(dom) != Some(img) {
                report.error(DiagCode::invariant("inv1_104"), at(field, dom), "entry missing from dataset_to_set");
            }
        }
    }
    for (dom, _) in store.dataset_to_set.iter() {
        let n = subs.iter().filter(|(_, m)| m.contains_domain(dom)).count();
        if n != 1 {
            report.error(
                DiagCode::invariant("inv1_105"),
                at("dataset_to_set", dom),
                format!("data set is classified by {n} sub-maps, expected exactly one"),
            );
        }
    }
}

fn check_typed_images(report: &mut ValidationReport, store: &CorrespondenceStore) {
    for (tag, field, types, consts, vars) in [
        (
            "inv1_92",
            "relation_to_type_constant",
            &store.relation_to_type_constant,
            &store.relation_to_constant,
            &store.relation_to_variable,
        ),
        (
            "inv1_96",
            "attribute_to_type_constant",
            &store.attribute_to_type_constant,
            &store.attribute_to_constant,
            &store.attribute_to_variable,
        ),
    ] {
        let mut keys: Vec<&str> = types.iter().map(|(d, _)| d).collect();
        keys.extend(consts.iter().map(|(d, _)| d));
        keys.extend(vars.iter().map(|(d, _)| d));
        let mut seen = HashSet::new();
        for k in keys {
            if !seen.insert(k) {
                continue;
            }
            let images = usize::from(consts.contains_domain(k)) + usize::from(vars.contains_domain(k));
            let typed = types.contains_domain(k);
            if typed != (images == 1) {
                let msg = if typed {
                    format!("has a type constant but {images} constant/variable images")
                } else {
                    "has a constant/variable image but no type constant".to_string()
                };
                report.error(DiagCode::invariant(tag), at(field, k), msg);
            }
        }
    }
}

fn closure_has(b: &BView<'_>, owner: &str, a: &str, img: &str) -> bool {
    b.closure(owner).is_some_and(|f| {
        f.args[1..].iter().any(|o| matches!(o, Operand::Maplet { antecedent, image, .. } if antecedent == a && image == img))
    }) || b.initialisations().any(|ia| {
        ia.target == owner
            && ia.args.iter().any(|o| matches!(o, Operand::Maplet { antecedent, image, .. } if antecedent == a && image == img))
    })
}

/// A maplet image is either an inline `R(a |-> b)` that occurs in R's
/// closure or initialisation, or a constant typed `m = a |-> b`.
fn check_maplets(report: &mut ValidationReport, store: &CorrespondenceStore, b: &BView<'_>, d: &DView<'_>) {
    for (dom, img) in store.relationmaplet_to_constant.iter() {
        let Some(rm) = d.relation_maplets.get(dom) else { continue };
        let a = store.individual_to_constant.get(&rm.antecedent).unwrap_or(&rm.antecedent);
        let i = store.individual_to_constant.get(&rm.image).unwrap_or(&rm.image);
        if !maplet_image_ok(b, img, &rm.relation, a, i) {
            report.error(
                DiagCode::invariant("inv1_100"),
                at("relationmaplet_to_constant", dom),
                format!("`{img}` does not realize `{a} |-> {i}` in `{}`", rm.relation),
            );
        }
    }
    for (dom, img) in store.attributemaplet_to_constant.iter() {
        let Some(am) = d.attribute_maplets.get(dom) else { continue };
        let a = store.individual_to_constant.get(&am.antecedent).unwrap_or(&am.antecedent);
        let candidates = [
            store.datavalue_to_setitem.get(&am.image).map(str::to_string),
            store.datavalue_to_constant.get(&am.image).map(str::to_string),
            d.attributes.get(am.attribute.as_str()).and_then(|attr| match &attr.range {
                DataSetRef::Default(k) => Some(super::driver::literal(*k, &am.image)),
                DataSetRef::Named(_) => None,
            }),
        ];
        let ok = candidates.iter().flatten().any(|i| maplet_image_ok(b, img, &am.attribute, a, i));
        if !ok {
            report.error(
                DiagCode::invariant("inv1_102"),
                at("attributemaplet_to_constant", dom),
                format!("`{img}` does not realize a maplet of `{}` from `{a}`", am.attribute),
            );
        }
    }
}

fn maplet_image_ok(b: &BView<'_>, img: &str, owner: &str, a: &str, i: &str) -> bool {
    if img == super::driver::inline_maplet_name(owner, a, i) {
        return closure_has(b, owner, a, i);
    }
    b.constants.contains(img)
        && b.properties().any(|f| {
            f.op == Operator::Maplet
                && f.args.first().and_then(Operand::name) == Some(img)
                && f.args.get(1).and_then(Operand::name) == Some(a)
                && f.args.get(2).and_then(Operand::name) == Some(i)
        })
}

fn check_characteristics(report: &mut ValidationReport, store: &CorrespondenceStore, b: &BView<'_>) {
    for (dom, text) in store.characteristic_to_formula.iter() {
        let found = b.properties().any(|f| render_formula(f).ok().as_deref() == Some(text));
        if !found {
            report.error(
                DiagCode::invariant("inv1_99"),
                at("characteristic_to_formula", dom),
                format!("characteristic formula `{text}` is not a property of any component"),
            );
        }
    }
}

fn check_typing_totality(report: &mut ValidationReport, b: &BView<'_>) {
    for c in b.comps {
        for k in &c.constants {
            let n = b.comps.iter().map(|x| x.typing_properties(&k.name).count()).sum::<usize>();
            if n != 1 {
                report.error(
                    DiagCode::invariant("inv1_98"),
                    format!("components/{}/constant {}", c.name, k.name),
                    format!("constant has {n} typing properties, expected exactly one"),
                );
            }
            let involved = b.properties().any(|f| f.referenced_names().contains(&k.name.as_str()));
            if !involved {
                report.error(
                    DiagCode::invariant("inv1_40"),
                    format!("components/{}/constant {}", c.name, k.name),
                    "constant occurs in no property",
                );
            }
        }
        for v in &c.variables {
            let n = b.comps.iter().map(|x| x.typing_invariants(&v.name).count()).sum::<usize>();
            if n != 1 {
                report.error(
                    DiagCode::invariant("inv1_97"),
                    format!("components/{}/variable {}", c.name, v.name),
                    format!("variable has {n} typing invariants, expected exactly one"),
                );
            }
            let n = b.initialisations().filter(|a| a.target == v.name).count();
            if n != 1 {
                report.error(
                    DiagCode::invariant("inv1_50"),
                    format!("components/{}/variable {}", c.name, v.name),
                    format!("variable has {n} initialisations, expected exactly one"),
                );
            }
        }
    }
}
