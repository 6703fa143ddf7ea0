use std::collections::HashSet;

use thiserror::Error;

use super::delta::{Addition, Change, Hint, ModelDelta};
use crate::bsystem::*;
use crate::domain_model::*;
use crate::report::ValidationReport;
use crate::translator::{check_store, BView, CorrespondenceStore};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synced {
    pub index: usize,
    pub rule: &'static str,
    pub element: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unsyncable {
    pub index: usize,
    pub element: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SyncReport {
    pub synced: Vec<Synced>,
    pub unsyncable: Vec<Unsyncable>,
    pub warnings: Vec<String>,
}

impl SyncReport {
    pub fn all_synced(&self) -> bool {
        self.unsyncable.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncOutcome {
    pub chain: Vec<DomainModel>,
    pub components: Vec<BSystemComponent>,
    pub store: CorrespondenceStore,
    pub report: SyncReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyncError {
    #[error("correspondence store is inconsistent ({} violation(s))", .0.violations.len())]
    InconsistentStore(ValidationReport),
    #[error("addition {index}: unknown component `{component}`")]
    UnknownComponent { index: usize, component: String },
    #[error("addition {index}: ambiguous, rules {} all apply", .rules.join(", "))]
    Ambiguous { index: usize, rules: Vec<&'static str> },
}

/// Reverse rule selected for one addition, with what its guard resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Dispatch {
    NewConcept,
    NewCustomDataSet,
    NewEnumeratedDataSet,
    NewEnumeratedValue { data_set: String },
    SubConcept { rule: &'static str, parent: String },
    NewIndividual { rule: &'static str, concept: String },
    NewDataValue { data_set: String },
    VariableConcept { rule: &'static str, concept: String },
    NewRelationMaplet { relation: String, antecedent: String, image: String },
}

impl Dispatch {
    pub fn rule(&self) -> &'static str {
        match self {
            Dispatch::NewConcept => "rule_101",
            Dispatch::NewCustomDataSet => "rule_102",
            Dispatch::NewEnumeratedDataSet => "rule_103",
            Dispatch::NewEnumeratedValue { .. } => "rule_104",
            Dispatch::SubConcept { rule, .. }
            | Dispatch::NewIndividual { rule, .. }
            | Dispatch::VariableConcept { rule, .. } => rule,
            Dispatch::NewDataValue { .. } => "rule_107",
            Dispatch::NewRelationMaplet { .. } => "rule_109",
        }
    }
}

#[derive(Clone)]
struct State {
    chain: Vec<DomainModel>,
    comps: Vec<BSystemComponent>,
    store: CorrespondenceStore,
}

/// Apply additive B-side edits, updating the domain chain, the components
/// and the store. Additions no reverse rule accepts are reported and skipped.
pub fn apply_delta(
    delta: &ModelDelta,
    chain: &[DomainModel],
    components: &[BSystemComponent],
    store: &CorrespondenceStore,
) -> Result<SyncOutcome, SyncError> {
    let pre = check_store(store, chain, components);
    if !pre.is_empty() {
        return Err(SyncError::InconsistentStore(pre));
    }
    let mut state = State { chain: chain.to_vec(), comps: components.to_vec(), store: store.clone() };
    let mut report = SyncReport::default();

    for (index, add) in delta.additions.iter().enumerate() {
        let Some(ci) = state.comps.iter().position(|c| c.name == add.component) else {
            return Err(SyncError::UnknownComponent { index, component: add.component.clone() });
        };
        let mi = state
            .store
            .domainmodel_to_component
            .domain_of(&add.component)
            .and_then(|m| state.chain.iter().position(|x| x.name == m))
            .ok_or_else(|| SyncError::UnknownComponent { index, component: add.component.clone() })?;

        let matches = dispatch(add, &state);
        let element = add.change.subject().to_string();
        match matches.as_slice() {
            [] => {
                let reason = why_unsyncable(add, &state);
                report.unsyncable.push(Unsyncable { index, element, reason });
            }
            [d] => {
                let before = validate(&state.chain).violations.len();
                let mut next = state.clone();
                apply(&mut next, add, d, mi, ci);
                let after = validate(&next.chain);
                if after.violations.len() > before {
                    let reason = after.violations.last().map(|v| v.to_string()).unwrap_or_default();
                    report.unsyncable.push(Unsyncable { index, element, reason });
                    continue;
                }
                if matches!(d, Dispatch::NewConcept) && add.hint.is_none() {
                    report.warnings.push(format!(
                        "addition {index}: abstract set `{element}` has no hint, synced as a concept"
                    ));
                }
                state = next;
                report.synced.push(Synced { index, rule: d.rule(), element });
            }
            many => {
                return Err(SyncError::Ambiguous { index, rules: many.iter().map(Dispatch::rule).collect() });
            }
        }
    }

    Ok(SyncOutcome { chain: state.chain, components: state.comps, store: state.store, report })
}

fn fresh(b: &BView<'_>, name: &str) -> bool {
    is_identifier(name)
        && DefaultKind::from_keyword(name).is_none()
        && !b.sets.contains_key(name)
        && !b.items.contains(name)
        && !b.constants.contains(name)
        && !b.variables.contains(name)
}

/// Typed subject and target of a two-operand typing formula.
fn typed_target<'f>(typing: &'f Formula, op: Operator, subject: &Operand) -> Option<&'f str> {
    (typing.op == op && typing.args.len() == 2 && &typing.args[0] == subject)
        .then(|| typing.args[1].name())
        .flatten()
}

/// Every reverse rule whose guard holds for `add`. The rules are checked
/// independently so an overlap shows up as more than one match.
pub fn dispatch(add: &Addition, state_chain_comps_store: &impl DispatchInput) -> Vec<Dispatch> {
    let (chain, comps, store) = state_chain_comps_store.parts();
    let b = BView::new(comps);
    let mut out = Vec::new();
    match &add.change {
        Change::NewAbstractSet { name } => {
            if fresh(&b, name) {
                // Rules 101 and 102 share a guard; the hint picks one.
                if add.hint != Some(Hint::Dataset) {
                    out.push(Dispatch::NewConcept);
                }
                if add.hint == Some(Hint::Dataset) {
                    out.push(Dispatch::NewCustomDataSet);
                }
            }
        }
        Change::NewEnumeratedSet { name, items } => {
            let distinct: HashSet<&String> = items.iter().collect();
            if fresh(&b, name) && !items.is_empty() && distinct.len() == items.len() && items.iter().all(|i| fresh(&b, i)) {
                out.push(Dispatch::NewEnumeratedDataSet);
            }
        }
        Change::NewSetItem { item, set } => {
            if let Some(ds) = store.enumerated_to_enumerated_set.domain_of(set) {
                if fresh(&b, item) {
                    out.push(Dispatch::NewEnumeratedValue { data_set: ds.to_string() });
                }
            }
        }
        Change::NewConstant { name, typing, relation } => {
            if !fresh(&b, name) {
                return out;
            }
            let me = Operand::constant(name);
            if let Some(target) = typed_target(typing, Operator::Inclusion, &me) {
                if let Some(c) = store.concept_to_abstract_set.domain_of(target) {
                    out.push(Dispatch::SubConcept { rule: "rule_105_1", parent: c.to_string() });
                }
                if let Some(c) = store.concept_to_constant.domain_of(target) {
                    out.push(Dispatch::SubConcept { rule: "rule_105_2", parent: c.to_string() });
                }
            }
            if let Some(target) = typed_target(typing, Operator::Belonging, &me) {
                if let Some(c) = store.concept_to_abstract_set.domain_of(target) {
                    out.push(Dispatch::NewIndividual { rule: "rule_106_1", concept: c.to_string() });
                }
                if let Some(c) = store.concept_to_constant.domain_of(target) {
                    out.push(Dispatch::NewIndividual { rule: "rule_106_2", concept: c.to_string() });
                }
                if let Some(ds) = store.custom_to_abstract_set.domain_of(target) {
                    out.push(Dispatch::NewDataValue { data_set: ds.to_string() });
                }
            }
            if let Some(d) = maplet_guard(chain, store, name, typing, relation.as_deref()) {
                out.push(d);
            }
        }
        Change::NewVariable { name, typing, .. } => {
            if !fresh(&b, name) {
                return out;
            }
            if let Some(target) = typed_target(typing, Operator::Inclusion, &Operand::variable(name)) {
                for (rule, map) in [("rule_108_1", &store.concept_to_abstract_set), ("rule_108_2", &store.concept_to_constant)] {
                    if let Some(c) = map.domain_of(target) {
                        let constant = chain.iter().flat_map(|m| &m.concepts).any(|k| k.name == c && !k.is_variable);
                        if constant && !store.concept_to_variable.contains_domain(c) {
                            out.push(Dispatch::VariableConcept { rule, concept: c.to_string() });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Borrowed view of the synchronization state, so dispatch can be probed
/// from tests without running a whole delta.
pub trait DispatchInput {
    fn parts(&self) -> (&[DomainModel], &[BSystemComponent], &CorrespondenceStore);
}

impl DispatchInput for State {
    fn parts(&self) -> (&[DomainModel], &[BSystemComponent], &CorrespondenceStore) {
        (&self.chain, &self.comps, &self.store)
    }
}

impl DispatchInput for (&[DomainModel], &[BSystemComponent], &CorrespondenceStore) {
    fn parts(&self) -> (&[DomainModel], &[BSystemComponent], &CorrespondenceStore) {
        (self.0, self.1, self.2)
    }
}

fn individual_concept<'a>(chain: &'a [DomainModel], store: &CorrespondenceStore, constant: &str) -> Option<(&'a str, &'a str)> {
    let ind = store.individual_to_constant.domain_of(constant)?;
    chain.iter().flat_map(|m| &m.individuals).find(|i| i.name == ind).map(|i| (i.name.as_str(), i.concept.as_str()))
}

/// Rule 109: `m = a |-> b` where a and b are individuals fitting the domain
/// and range of a constant relation.
fn maplet_guard(
    chain: &[DomainModel],
    store: &CorrespondenceStore,
    name: &str,
    typing: &Formula,
    relation: Option<&str>,
) -> Option<Dispatch> {
    if typing.op != Operator::Maplet || typing.args.len() != 3 || typing.args[0] != Operand::constant(name) {
        return None;
    }
    let (a_ind, a_concept) = individual_concept(chain, store, typing.args[1].name()?)?;
    let (b_ind, b_concept) = individual_concept(chain, store, typing.args[2].name()?)?;
    let fits = |r: &&Relation| {
        store.relation_to_constant.contains_domain(&r.name) && r.domain == a_concept && r.range == b_concept
    };
    let candidates: Vec<&Relation> = chain.iter().flat_map(|m| &m.relations).filter(fits).collect();
    let rel = match relation {
        Some(rb) => {
            let r = store.relation_to_constant.domain_of(rb)?;
            *candidates.iter().find(|c| c.name == r)?
        }
        None if candidates.len() == 1 => candidates[0],
        None => return None,
    };
    let exists = chain
        .iter()
        .flat_map(|m| &m.relation_maplets)
        .any(|rm| rm.relation == rel.name && rm.antecedent == a_ind && rm.image == b_ind);
    (!exists).then(|| Dispatch::NewRelationMaplet {
        relation: rel.name.clone(),
        antecedent: a_ind.to_string(),
        image: b_ind.to_string(),
    })
}

fn why_unsyncable(add: &Addition, state: &State) -> String {
    let b = BView::new(&state.comps);
    let store = &state.store;
    if !fresh(&b, add.change.subject()) {
        return format!("`{}` is already declared or is not a valid identifier", add.change.subject());
    }
    match &add.change {
        Change::NewSetItem { set, .. } => format!("`{set}` is not the image of an enumerated data set"),
        Change::NewEnumeratedSet { .. } => "enumerated set needs distinct, fresh items".into(),
        Change::NewConstant { typing, relation, .. } if typing.op == Operator::Maplet => {
            let variable = relation
                .as_deref()
                .filter(|r| store.relation_to_variable.contains_b(r))
                .or_else(|| {
                    // Without a named relation, look for a variable relation the endpoints fit.
                    let a = individual_concept(&state.chain, store, typing.args.get(1)?.name()?)?.1;
                    let i = individual_concept(&state.chain, store, typing.args.get(2)?.name()?)?.1;
                    state
                        .chain
                        .iter()
                        .flat_map(|m| &m.relations)
                        .find(|r| r.is_variable && r.domain == a && r.range == i)
                        .map(|r| r.name.as_str())
                });
            match variable {
                Some(r) => format!("maplet of variable relation `{r}`: no reverse rule handles variable relations"),
                None => "maplet endpoints do not fit a constant relation, or the maplet already exists".into(),
            }
        }
        Change::NewConstant { typing, .. } => format!(
            "typing `{}` is not an inclusion or membership in a concept or custom data set image",
            render_formula(typing).unwrap_or_else(|e| e.to_string())
        ),
        Change::NewVariable { .. } => {
            "variable is not typed as a subset of a constant concept's image".into()
        }
        Change::NewAbstractSet { .. } => "no reverse rule applies".into(),
    }
}

fn apply(s: &mut State, add: &Addition, d: &Dispatch, mi: usize, ci: usize) {
    let name = add.change.subject().to_string();
    match (d, &add.change) {
        (Dispatch::NewConcept, _) => {
            s.chain[mi].concepts.push(Concept::new(&name));
            s.comps[ci].sets.push(BSet::abstract_set(&name));
            s.store.concept_to_abstract_set.insert(&name, &name);
        }
        (Dispatch::NewCustomDataSet, _) => {
            s.chain[mi].data_sets.push(DataSet::Custom { name: name.clone() });
            s.comps[ci].sets.push(BSet::abstract_set(&name));
            s.store.dataset_to_set.insert(&name, &name);
            s.store.custom_to_abstract_set.insert(&name, &name);
        }
        (Dispatch::NewEnumeratedDataSet, Change::NewEnumeratedSet { items, .. }) => {
            s.chain[mi].data_sets.push(DataSet::Enumerated { name: name.clone(), values: items.clone() });
            s.comps[ci].sets.push(BSet::enumerated(&name, items.clone()));
            s.store.dataset_to_set.insert(&name, &name);
            s.store.enumerated_to_enumerated_set.insert(&name, &name);
            for i in items {
                s.store.datavalue_to_setitem.insert(i, i);
            }
        }
        (Dispatch::NewEnumeratedValue { data_set }, Change::NewSetItem { set, .. }) => {
            for m in &mut s.chain {
                for ds in &mut m.data_sets {
                    if let DataSet::Enumerated { name: n, values } = ds {
                        if n == data_set {
                            values.push(name.clone());
                        }
                    }
                }
            }
            for c in &mut s.comps {
                for bs in &mut c.sets {
                    if let (true, SetVariant::Enumerated { items }) = (&bs.name == set, &mut bs.variant) {
                        items.push(name.clone());
                    }
                }
            }
            s.store.datavalue_to_setitem.insert(&name, &name);
        }
        (Dispatch::SubConcept { parent, .. }, Change::NewConstant { typing, .. }) => {
            s.chain[mi].concepts.push(Concept { name: name.clone(), is_variable: false, parent_concept: Some(parent.clone()) });
            add_typed_constant(&mut s.comps[ci], &name, typing);
            s.store.concept_to_constant.insert(&name, &name);
        }
        (Dispatch::NewIndividual { concept, .. }, Change::NewConstant { typing, .. }) => {
            s.chain[mi].individuals.push(Individual { name: name.clone(), concept: concept.clone() });
            add_typed_constant(&mut s.comps[ci], &name, typing);
            s.store.individual_to_constant.insert(&name, &name);
            let index = ChainIndex::new(&s.chain);
            let mut owners = vec![concept.clone()];
            owners.extend(index.concept_ancestors(mi, concept));
            for c in owners {
                let Some((_, found)) = index.concept(mi, &c) else { continue };
                if found.is_variable {
                    // Only direct individuals seed a variable concept.
                    if c == *concept {
                        if let Some(x) = s.store.concept_to_variable.get(&c).map(str::to_string) {
                            extend_init(&mut s.comps, ci, &x, Operand::constant(&name));
                        }
                    }
                } else if let Some(img) = s.store.concept_image(&c) {
                    extend_closure(&mut s.comps, ci, img.operand(), Operand::constant(&name));
                }
            }
        }
        (Dispatch::NewDataValue { data_set }, Change::NewConstant { typing, .. }) => {
            s.chain[mi]
                .data_values
                .push(DataValue { lexical_form: name.clone(), data_set: DataSetRef::Named(data_set.clone()) });
            add_typed_constant(&mut s.comps[ci], &name, typing);
            s.store.datavalue_to_constant.insert(&name, &name);
        }
        (Dispatch::VariableConcept { concept, .. }, Change::NewVariable { typing, init, .. }) => {
            for m in &mut s.chain {
                for c in m.concepts.iter_mut().filter(|c| &c.name == concept) {
                    c.is_variable = true;
                }
            }
            let members: Vec<Operand> = s
                .chain
                .iter()
                .flat_map(|m| &m.individuals)
                .filter(|i| &i.concept == concept)
                .filter_map(|i| s.store.individual_to_constant.get(&i.name).map(Operand::constant))
                .collect();
            // A variable concept has no extent closure; its members seed the init instead.
            if let Some(img) = s.store.concept_image(concept) {
                let img = img.name().to_string();
                for c in &mut s.comps {
                    c.properties.retain(|f| !(f.op == Operator::Equal2SetOf && f.args.first().and_then(Operand::name) == Some(img.as_str())));
                }
            }
            let deepest = members
                .iter()
                .filter_map(|o| o.name().and_then(|n| s.comps.iter().position(|c| c.has_constant(n))))
                .fold(ci, usize::max);
            let comp = &mut s.comps[ci];
            comp.variables.push(Variable::new(&name));
            comp.invariants.push(Formula { typing: true, ..typing.clone() });
            let target = if init.is_some() { ci } else { deepest };
            s.comps[target]
                .initialisations
                .push(init.clone().unwrap_or_else(|| InitialisationAction::set_of(&name, members)));
            s.store.concept_to_variable.insert(concept, &name);
        }
        (Dispatch::NewRelationMaplet { relation, antecedent, image }, Change::NewConstant { typing, .. }) => {
            let rm = RelationMaplet { relation: relation.clone(), antecedent: antecedent.clone(), image: image.clone() };
            s.store.relationmaplet_to_constant.insert(rm.key(), &name);
            s.chain[mi].relation_maplets.push(rm);
            add_typed_constant(&mut s.comps[ci], &name, typing);
            let rel_b = s.store.relation_to_constant.get(relation).expect("guarded").to_string();
            extend_closure(&mut s.comps, ci, Operand::constant(&rel_b), Operand::constant(&name));
        }
        (d, c) => unreachable!("dispatch {d:?} does not fit {}", c.kind()),
    }
}

fn add_typed_constant(comp: &mut BSystemComponent, name: &str, typing: &Formula) {
    comp.constants.push(Constant::new(name));
    comp.properties.push(Formula { typing: true, ..typing.clone() });
}

/// Append `member` to the closure `owner = {...}`, moving the closure down to
/// component `at` when the new member is declared deeper than it.
fn extend_closure(comps: &mut [BSystemComponent], at: usize, owner: Operand, member: Operand) {
    let is_closure = |f: &Formula| f.op == Operator::Equal2SetOf && f.args.first() == Some(&owner);
    let found = comps.iter().enumerate().find_map(|(k, c)| c.properties.iter().position(is_closure).map(|j| (k, j)));
    match found {
        Some((k, j)) if k >= at => comps[k].properties[j].args.push(member),
        Some((k, j)) => {
            let mut f = comps[k].properties.remove(j);
            f.args.push(member);
            comps[at].properties.push(f);
        }
        None => comps[at].properties.push(Formula::new(Operator::Equal2SetOf, vec![owner, member])),
    }
}

/// Same as [`extend_closure`] for the `:=` initialisation of a variable.
fn extend_init(comps: &mut [BSystemComponent], at: usize, target: &str, member: Operand) {
    let found = comps
        .iter()
        .enumerate()
        .find_map(|(k, c)| c.initialisations.iter().position(|a| a.target == target).map(|j| (k, j)));
    match found {
        Some((k, j)) => {
            let mut a = comps[k].initialisations.remove(j);
            a.op = InitOperator::BecomeEqual2SetOf;
            a.args.push(member);
            comps[k.max(at)].initialisations.push(a);
        }
        None => comps[at].initialisations.push(InitialisationAction::set_of(target, vec![member])),
    }
}
