mod common;

use common::{gen_chain, shapes, store_shape, GenConfig};
use ontb_core::bsystem::*;
use ontb_core::domain_model::*;
use ontb_core::report::DiagCode;
use ontb_core::sync_back::*;
use ontb_core::translator::*;
use proptest::prelude::*;

fn chain_seed() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn generated_chains_are_valid(seed in chain_seed()) {
        let chain = gen_chain(seed, GenConfig::default());
        let report = validate(&chain);
        prop_assert!(report.is_empty(), "{:?}", report.violations);
    }

    #[test]
    fn dsl_round_trip(seed in chain_seed()) {
        let chain = gen_chain(seed, GenConfig::default());
        let text = serialize_dsl(&chain);
        let back = parse_dsl(&text).unwrap();
        prop_assert_eq!(&back, &chain);
        prop_assert_eq!(serialize_dsl(&back), text);
    }

    #[test]
    fn store_invariants_hold_after_translation(seed in chain_seed()) {
        let chain = gen_chain(seed, GenConfig::default());
        let (comps, store) = translate(&chain).unwrap();
        let report = check_store(&store, &chain, &comps);
        prop_assert!(report.is_empty(), "{:?}", report.violations);
        prop_assert!(emit_chain(&comps, EmitMode::Ascii).is_ok());
    }

    #[test]
    fn store_json_round_trip(seed in chain_seed()) {
        let chain = gen_chain(seed, GenConfig::default());
        let (_, store) = translate(&chain).unwrap();
        prop_assert_eq!(CorrespondenceStore::from_json(&store.to_json()).unwrap(), store);
    }

    #[test]
    fn canonical_round_trip(seed in chain_seed()) {
        let chain = gen_chain(seed, GenConfig::default());
        let (comps, _) = translate(&chain).unwrap();
        let text = save_canonical(&comps);
        prop_assert_eq!(load_canonical(&text).unwrap(), comps);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn translation_reaches_fixpoint(seed in chain_seed()) {
        let chain = gen_chain(seed, GenConfig::default());
        let (comps, store) = translate(&chain).unwrap();
        let left = enabled_rules(&chain, &comps, &store);
        prop_assert!(left.is_empty(), "{:?}", left);
    }

    #[test]
    fn translation_is_deterministic(seed in chain_seed()) {
        let chain = gen_chain(seed, GenConfig::default());
        let (a, sa) = translate(&chain).unwrap();
        let (b, sb) = translate(&chain).unwrap();
        prop_assert_eq!(save_canonical(&a), save_canonical(&b));
        prop_assert_eq!(sa.to_json(), sb.to_json());
    }

    #[test]
    fn back_projection_is_a_fixpoint(seed in chain_seed()) {
        let chain = gen_chain(seed, GenConfig::default());
        let (comps, store) = translate(&chain).unwrap();
        let reparsed = parse_dsl(&serialize_dsl(&chain)).unwrap();
        let (again, again_store) = translate(&reparsed).unwrap();
        prop_assert_eq!(again, comps);
        prop_assert_eq!(again_store, store);
    }

    #[test]
    fn empty_delta_changes_nothing(seed in chain_seed()) {
        let chain = gen_chain(seed, GenConfig::default());
        let (comps, store) = translate(&chain).unwrap();
        let out = apply_delta(&ModelDelta::default(), &chain, &comps, &store).unwrap();
        prop_assert_eq!(out.chain, chain);
        prop_assert_eq!(out.components, comps);
        prop_assert_eq!(out.store, store);
    }

    #[test]
    fn validate_is_pure(seed in chain_seed()) {
        let chain = gen_chain(seed, GenConfig::default());
        let copy = chain.clone();
        let first = validate(&chain);
        prop_assert_eq!(&chain, &copy);
        prop_assert_eq!(validate(&chain), first);
    }

    #[test]
    fn retyped_maplet_is_rejected(seed in chain_seed()) {
        let mut chain = gen_chain(seed, GenConfig::default());
        // Point some maplet's antecedent at an individual of another concept.
        let index_inds: Vec<(String, String)> = chain
            .iter()
            .flat_map(|m| m.individuals.iter().map(|i| (i.name.clone(), i.concept.clone())))
            .collect();
        let rels: Vec<(String, String)> = chain
            .iter()
            .flat_map(|m| m.relations.iter().map(|r| (r.name.clone(), r.domain.clone())))
            .collect();
        let target = chain.iter().enumerate().rev().find_map(|(mi, m)| {
            m.relation_maplets.iter().enumerate().find_map(|(j, rm)| {
                let domain = &rels.iter().find(|(n, _)| *n == rm.relation)?.1;
                let visible: Vec<&str> = chain[..=mi].iter().flat_map(|x| x.individuals.iter().map(|i| i.name.as_str())).collect();
                let wrong = index_inds.iter().find(|(n, c)| c != domain && visible.contains(&n.as_str()))?;
                Some((mi, j, wrong.0.clone()))
            })
        });
        prop_assume!(target.is_some());
        let (mi, j, wrong) = target.unwrap();
        chain[mi].relation_maplets[j].antecedent = wrong;
        prop_assert!(validate(&chain).has_code(&DiagCode::MapletTypeMismatch));
    }

    /// Each addition matches at most one reverse rule, and syncing it then
    /// translating the updated chain reproduces the synced components.
    #[test]
    fn sync_dispatch_partitions_and_round_trips(seed in chain_seed(), pick in any::<u64>()) {
        let chain = gen_chain(seed, GenConfig::default());
        let (comps, store) = translate(&chain).unwrap();
        let additions = candidate_additions(&chain, &comps, &store, pick);
        for add in &additions {
            let n = dispatch(add, &(chain.as_slice(), comps.as_slice(), &store)).len();
            prop_assert!(n <= 1, "{:?} matched {} rules", add, n);
        }
        let expected = additions.len();
        let out = apply_delta(&ModelDelta::new(additions), &chain, &comps, &store).unwrap();
        prop_assert!(out.report.all_synced(), "{:?}", out.report.unsyncable);
        prop_assert_eq!(out.report.synced.len(), expected);
        prop_assert!(validate(&out.chain).is_empty());
        // Sync only adds: every original domain element survives.
        let before = serialize_dsl(&chain);
        let after = serialize_dsl(&out.chain);
        for line in before.lines().filter(|l| !l.contains("enumerated_dataset")) {
            prop_assert!(after.contains(line), "lost `{}`", line);
        }
        prop_assert!(check_store(&out.store, &out.chain, &out.components).is_empty());
        let (again, again_store) = translate(&out.chain).unwrap();
        prop_assert_eq!(shapes(&again), shapes(&out.components));
        prop_assert_eq!(store_shape(&again_store), store_shape(&out.store));
    }
}

/// Additions for rules 101 to 107 against the given translation.
fn candidate_additions(
    chain: &[DomainModel],
    comps: &[BSystemComponent],
    store: &CorrespondenceStore,
    pick: u64,
) -> Vec<Addition> {
    let last = comps.last().unwrap().name.clone();
    let mut out = vec![
        Addition { component: last.clone(), change: Change::NewAbstractSet { name: "NewConcept".into() }, hint: Some(Hint::Concept) },
        Addition { component: last.clone(), change: Change::NewAbstractSet { name: "NewData".into() }, hint: Some(Hint::Dataset) },
        Addition {
            component: last.clone(),
            change: Change::NewEnumeratedSet { name: "NewEnum".into(), items: vec!["ne_a".into(), "ne_b".into()] },
            hint: None,
        },
    ];
    if let Some((_, set)) = store.enumerated_to_enumerated_set.iter().nth(pick as usize % store.enumerated_to_enumerated_set.len().max(1)) {
        out.push(Addition {
            component: last.clone(),
            change: Change::NewSetItem { item: "fresh_item".into(), set: set.to_string() },
            hint: None,
        });
    }
    let concepts: Vec<&Concept> = chain.iter().flat_map(|m| &m.concepts).collect();
    let c = concepts[(pick >> 8) as usize % concepts.len()];
    let img = store.concept_image(&c.name).unwrap().name().to_string();
    out.push(Addition {
        component: last.clone(),
        change: Change::NewConstant {
            name: "SubOfPick".into(),
            typing: Formula::typing(Operator::Inclusion, vec![Operand::constant("SubOfPick"), Operand::set(&img)]),
            relation: None,
        },
        hint: None,
    });
    out.push(Addition {
        component: last.clone(),
        change: Change::NewConstant {
            name: "IndOfPick".into(),
            typing: Formula::typing(Operator::Belonging, vec![Operand::constant("IndOfPick"), Operand::set(&img)]),
            relation: None,
        },
        hint: None,
    });
    if let Some((_, set)) = store.custom_to_abstract_set.iter().next() {
        out.push(Addition {
            component: last,
            change: Change::NewConstant {
                name: "dv_new".into(),
                typing: Formula::typing(Operator::Belonging, vec![Operand::constant("dv_new"), Operand::set(set)]),
                relation: None,
            },
            hint: None,
        });
    }
    out
}
