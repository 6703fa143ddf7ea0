mod common;

use common::{landing_gear, shapes, store_shape, LANDING_GEAR};
use ontb_core::bsystem::*;
use ontb_core::domain_model::*;
use ontb_core::sync_back::*;
use ontb_core::translator::*;

const ROOT: &str = "lg_system_ref_0";
const REF: &str = "lg_system_ref_1";

fn add(component: &str, change: Change, hint: Option<Hint>) -> Addition {
    Addition { component: component.into(), change, hint }
}

fn constant(name: &str, op: Operator, target: &str) -> Change {
    Change::NewConstant {
        name: name.into(),
        typing: Formula::typing(op, vec![Operand::constant(name), Operand::set(target)]),
        relation: None,
    }
}

fn maplet(name: &str, a: &str, b: &str, relation: Option<&str>) -> Change {
    Change::NewConstant {
        name: name.into(),
        typing: Formula::typing(Operator::Maplet, vec![Operand::constant(name), Operand::constant(a), Operand::constant(b)]),
        relation: relation.map(str::to_string),
    }
}

fn run(chain: &[DomainModel], additions: Vec<Addition>) -> SyncOutcome {
    let (comps, store) = translate(chain).unwrap();
    apply_delta(&ModelDelta::new(additions), chain, &comps, &store).unwrap()
}

fn concept<'a>(chain: &'a [DomainModel], name: &str) -> Option<&'a Concept> {
    chain.iter().flat_map(|m| &m.concepts).find(|c| c.name == name)
}

fn rules(out: &SyncOutcome) -> Vec<&'static str> {
    out.report.synced.iter().map(|s| s.rule).collect()
}

#[test]
fn abstract_set_with_concept_hint_becomes_concept() {
    let out = run(&landing_gear(), vec![add(REF, Change::NewAbstractSet { name: "Pilot".into() }, Some(Hint::Concept))]);
    assert_eq!(rules(&out), ["rule_101"]);
    assert!(out.chain[1].concepts.iter().any(|c| c.name == "Pilot" && !c.is_variable));
    assert_eq!(out.store.concept_to_abstract_set.get("Pilot"), Some("Pilot"));
    assert!(out.report.warnings.is_empty());
}

#[test]
fn abstract_set_without_hint_defaults_to_concept_with_warning() {
    let out = run(&landing_gear(), vec![add(REF, Change::NewAbstractSet { name: "Pilot".into() }, None)]);
    assert_eq!(rules(&out), ["rule_101"]);
    assert_eq!(out.report.warnings.len(), 1);
}

#[test]
fn abstract_set_with_dataset_hint_becomes_custom_dataset() {
    let out = run(&landing_gear(), vec![add(REF, Change::NewAbstractSet { name: "Sensor".into() }, Some(Hint::Dataset))]);
    assert_eq!(rules(&out), ["rule_102"]);
    assert!(out.chain[1].data_sets.contains(&DataSet::Custom { name: "Sensor".into() }));
    assert_eq!(out.store.custom_to_abstract_set.get("Sensor"), Some("Sensor"));
}

#[test]
fn enumerated_set_becomes_enumerated_dataset() {
    let change = Change::NewEnumeratedSet { name: "Mode".into(), items: vec!["auto".into(), "manual".into()] };
    let out = run(&landing_gear(), vec![add(ROOT, change, None)]);
    assert_eq!(rules(&out), ["rule_103"]);
    assert!(out.chain[0]
        .data_sets
        .contains(&DataSet::Enumerated { name: "Mode".into(), values: vec!["auto".into(), "manual".into()] }));
    assert_eq!(out.store.datavalue_to_setitem.get("manual"), Some("manual"));
}

#[test]
fn set_item_extends_enumerated_dataset() {
    let change = Change::NewSetItem { item: "lg_moving".into(), set: "DataSet_1".into() };
    let out = run(&landing_gear(), vec![add(REF, change, None)]);
    assert_eq!(rules(&out), ["rule_104"]);
    let DataSet::Enumerated { values, .. } = &out.chain[0].data_sets[0] else { panic!() };
    assert_eq!(values.last().unwrap(), "lg_moving");
    let SetVariant::Enumerated { items } = &out.components[0].set("DataSet_1").unwrap().variant else { panic!() };
    assert!(items.contains(&"lg_moving".to_string()));
}

#[test]
fn inclusion_becomes_subconcept() {
    let out = run(
        &landing_gear(),
        vec![
            add(REF, constant("FrontGear", Operator::Inclusion, "LandingGear"), None),
            add(REF, constant("NoseGear", Operator::Inclusion, "FrontGear"), None),
        ],
    );
    assert_eq!(rules(&out), ["rule_105_1", "rule_105_2"]);
    assert_eq!(concept(&out.chain, "FrontGear").unwrap().parent_concept.as_deref(), Some("LandingGear"));
    assert_eq!(concept(&out.chain, "NoseGear").unwrap().parent_concept.as_deref(), Some("FrontGear"));
    assert_eq!(out.store.concept_to_constant.get("NoseGear"), Some("NoseGear"));
}

#[test]
fn membership_becomes_individual_and_extends_extent() {
    let out = run(&landing_gear(), vec![add(REF, constant("LG2", Operator::Belonging, "LandingGear"), None)]);
    assert_eq!(rules(&out), ["rule_106_1"]);
    assert!(out.chain[1].individuals.contains(&Individual { name: "LG2".into(), concept: "LandingGear".into() }));
    // The extent closure moves down to where LG2 is visible.
    let closure = BSystemComponent::clone(&out.components[1])
        .properties
        .into_iter()
        .find(|f| f.op == Operator::Equal2SetOf && f.args[0].name() == Some("LandingGear"))
        .unwrap();
    assert_eq!(render_formula(&closure).unwrap(), "LandingGear = {LG1, LG2}");
    assert!(emit_chain(&out.components, EmitMode::Ascii).is_ok());
}

#[test]
fn membership_in_subconcept_constant() {
    let out = run(
        &landing_gear(),
        vec![
            add(REF, constant("FrontGear", Operator::Inclusion, "LandingGear"), None),
            add(REF, constant("FG1", Operator::Belonging, "FrontGear"), None),
        ],
    );
    assert_eq!(rules(&out), ["rule_105_1", "rule_106_2"]);
    assert_eq!(out.store.individual_to_constant.get("FG1"), Some("FG1"));
}

#[test]
fn membership_in_custom_set_becomes_data_value() {
    let out = run(
        &landing_gear(),
        vec![
            add(REF, Change::NewAbstractSet { name: "Sensor".into() }, Some(Hint::Dataset)),
            add(REF, constant("s1", Operator::Belonging, "Sensor"), None),
        ],
    );
    assert_eq!(rules(&out), ["rule_102", "rule_107"]);
    assert!(out.chain[1]
        .data_values
        .contains(&DataValue { lexical_form: "s1".into(), data_set: DataSetRef::Named("Sensor".into()) }));
    assert_eq!(out.store.datavalue_to_constant.get("s1"), Some("s1"));
}

#[test]
fn variable_subset_makes_concept_variable() {
    let typing = Formula::typing(Operator::Inclusion, vec![Operand::variable("activeSets"), Operand::set("LandingSet")]);
    let out = run(&landing_gear(), vec![add(REF, Change::NewVariable { name: "activeSets".into(), typing, init: None }, None)]);
    assert_eq!(rules(&out), ["rule_108_1"]);
    assert!(concept(&out.chain, "LandingSet").unwrap().is_variable);
    assert_eq!(out.store.concept_to_variable.get("LandingSet"), Some("activeSets"));
    let init = out.components[1].initialisations_of("activeSets").next().unwrap();
    assert_eq!(render_init(init, EmitMode::Ascii), "activeSets := {LS1, LS2, LS3}");
    assert!(check_store(&out.store, &out.chain, &out.components).is_empty());
    // Re-translating the synced chain leaves no rule enabled.
    let (comps, store) = translate(&out.chain).unwrap();
    assert!(enabled_rules(&out.chain, &comps, &store).is_empty());
}

#[test]
fn maplet_constant_becomes_relation_maplet() {
    let out = run(
        &landing_gear(),
        vec![
            add(REF, constant("LS4", Operator::Belonging, "LandingSet"), None),
            add(REF, maplet("m4", "LS4", "LG1", None), None),
            add(REF, maplet("m5", "HD1", "LG1", Some("LgOfHd")), None),
        ],
    );
    assert_eq!(rules(&out), ["rule_106_1", "rule_109"]);
    assert_eq!(out.report.unsyncable.len(), 1, "HD1 -> LG1 already exists");
    let rm = RelationMaplet { relation: "LgOfLs".into(), antecedent: "LS4".into(), image: "LG1".into() };
    assert!(out.chain[1].relation_maplets.contains(&rm));
    assert_eq!(out.store.relationmaplet_to_constant.get(&rm.key()), Some("m4"));
    let text = emit_atelier(&out.components[1], EmitMode::Ascii).unwrap();
    assert!(text.contains("LgOfLs = {LS1 |-> LG1, LS2 |-> LG1, LS3 |-> LG1, m4}"), "{text}");
    assert!(check_store(&out.store, &out.chain, &out.components).is_empty());
}

#[test]
fn maplet_of_variable_relation_is_unsyncable() {
    let src = LANDING_GEAR.replace(
        "relation LgOfHd { domain Handle range LandingGear",
        "relation LgOfHd { domain Handle range LandingGear variable",
    );
    let chain = parse_dsl(&src).unwrap();
    let out = run(
        &chain,
        vec![
            add(REF, constant("HD2", Operator::Belonging, "Handle"), None),
            add(REF, maplet("m9", "HD2", "LG1", None), None),
        ],
    );
    assert_eq!(rules(&out), ["rule_106_1"]);
    assert_eq!(out.report.unsyncable.len(), 1);
    let u = &out.report.unsyncable[0];
    assert_eq!((u.index, u.element.as_str()), (1, "m9"));
    assert!(u.reason.contains("variable relation `LgOfHd`"), "{}", u.reason);
    assert!(out.chain[1].relation_maplets.iter().all(|rm| rm.antecedent != "HD2"));
}

#[test]
fn redeclared_names_are_unsyncable() {
    let out = run(
        &landing_gear(),
        vec![
            add(REF, Change::NewAbstractSet { name: "Handle".into() }, None),
            add(REF, constant("LG1", Operator::Belonging, "LandingGear"), None),
            add(REF, Change::NewSetItem { item: "x".into(), set: "LandingGear".into() }, None),
        ],
    );
    assert!(out.report.synced.is_empty());
    assert_eq!(out.report.unsyncable.len(), 3);
    assert_eq!(out.chain, landing_gear());
}

#[test]
fn unknown_component_is_an_error() {
    let chain = landing_gear();
    let (comps, store) = translate(&chain).unwrap();
    let delta = ModelDelta::new(vec![add("nowhere", Change::NewAbstractSet { name: "X".into() }, None)]);
    assert!(matches!(apply_delta(&delta, &chain, &comps, &store), Err(SyncError::UnknownComponent { index: 0, .. })));
}

#[test]
fn inconsistent_store_is_rejected_before_syncing() {
    let chain = landing_gear();
    let (comps, mut store) = translate(&chain).unwrap();
    store.individual_to_constant.insert("LG1", "NoSuchConstant");
    let delta = ModelDelta::new(vec![]);
    assert!(matches!(apply_delta(&delta, &chain, &comps, &store), Err(SyncError::InconsistentStore(_))));
}

#[test]
fn synced_components_match_retranslation() {
    let out = run(
        &landing_gear(),
        vec![
            add(REF, Change::NewAbstractSet { name: "Pilot".into() }, Some(Hint::Concept)),
            add(REF, Change::NewAbstractSet { name: "Sensor".into() }, Some(Hint::Dataset)),
            add(ROOT, Change::NewEnumeratedSet { name: "Mode".into(), items: vec!["auto".into()] }, None),
            add(REF, Change::NewSetItem { item: "up_moving".into(), set: "DataSet_3".into() }, None),
            add(REF, constant("FrontGear", Operator::Inclusion, "LandingGear"), None),
            add(REF, constant("FG1", Operator::Belonging, "FrontGear"), None),
            add(REF, constant("LG2", Operator::Belonging, "LandingGear"), None),
            add(REF, constant("s1", Operator::Belonging, "Sensor"), None),
        ],
    );
    assert!(out.report.all_synced(), "{:?}", out.report.unsyncable);
    let (again, store) = translate(&out.chain).unwrap();
    assert_eq!(shapes(&again), shapes(&out.components));
    assert_eq!(store_shape(&store), store_shape(&out.store));
}

#[test]
fn delta_json_drives_sync() {
    let json = r#"[
        {"kind": "new_abstract_set", "component": "lg_system_ref_1", "payload": {"name": "Pilot"}, "hint": "concept"}
    ]"#;
    let delta = ModelDelta::from_json(json).unwrap();
    let chain = landing_gear();
    let (comps, store) = translate(&chain).unwrap();
    let out = apply_delta(&delta, &chain, &comps, &store).unwrap();
    assert_eq!(rules(&out), ["rule_101"]);
}
