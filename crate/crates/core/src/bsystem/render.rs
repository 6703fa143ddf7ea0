use std::collections::HashSet;
use std::fmt::Write;

use thiserror::Error;

use super::model::*;
use crate::domain_model::DefaultKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmitMode {
    #[default]
    Ascii,
    Unicode,
}

struct Symbols {
    belongs: &'static str,
    includes: &'static str,
    relations: &'static str,
    functions: &'static str,
    maps_to: &'static str,
    inverse: &'static str,
    forall: &'static str,
    and: &'static str,
    implies: &'static str,
    ge: &'static str,
    le: &'static str,
}

const ASCII: Symbols = Symbols {
    belongs: ":",
    includes: "<:",
    relations: "<->",
    functions: "-->",
    maps_to: "|->",
    inverse: "~",
    forall: "!",
    and: "&",
    implies: "=>",
    ge: ">=",
    le: "<=",
};

const UNICODE: Symbols = Symbols {
    belongs: "∈",
    includes: "⊆",
    relations: "↔",
    functions: "⟶",
    maps_to: "↦",
    inverse: "⁻¹",
    forall: "∀",
    and: "∧",
    implies: "⇒",
    ge: "≥",
    le: "≤",
};

fn symbols(mode: EmitMode) -> &'static Symbols {
    match mode {
        EmitMode::Ascii => &ASCII,
        EmitMode::Unicode => &UNICODE,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("{op:?} takes {expected} operand(s), found {found}")]
    Arity { op: Operator, expected: String, found: usize },
    #[error("{op:?} operand {position}: {message}")]
    Operand { op: Operator, position: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("component `{component}`: {source}")]
    Render { component: String, source: RenderError },
    #[error("component `{component}` references undeclared `{name}`")]
    Dangling { component: String, name: String },
    #[error("component `{component}`: {message}")]
    Structure { component: String, message: String },
}

fn operand(o: &Operand, s: &Symbols) -> String {
    match o {
        Operand::Maplet { antecedent, image, .. } => format!("{antecedent} {} {image}", s.maps_to),
        Operand::Raw { text } => text.clone(),
        Operand::Cardinality { inverse, comparator, value } => {
            // Only meaningful inside CardinalityForAll; kept readable for debugging.
            format!("card{} {:?} {value}", if *inverse { s.inverse } else { "" }, comparator)
        }
        other => other.name().unwrap_or_default().to_string(),
    }
}

fn check_arity(f: &Formula) -> Result<(), RenderError> {
    if f.op.accepts(f.args.len()) {
        return Ok(());
    }
    let expected = match f.op.arity() {
        (min, None) => format!("at least {min}"),
        (min, Some(max)) if min == max => min.to_string(),
        (min, Some(max)) => format!("{min}..{max}"),
    };
    Err(RenderError::Arity { op: f.op, expected, found: f.args.len() })
}

pub fn render_formula(f: &Formula) -> Result<String, RenderError> {
    render_formula_with(f, EmitMode::Ascii)
}

pub fn render_formula_with(f: &Formula, mode: EmitMode) -> Result<String, RenderError> {
    check_arity(f)?;
    let s = symbols(mode);
    let a: Vec<String> = f.args.iter().map(|o| operand(o, s)).collect();
    let bad = |position: usize, message: &str| RenderError::Operand { op: f.op, position, message: message.into() };
    for (i, o) in f.args.iter().enumerate() {
        let payload_ok = match f.op {
            Operator::CardinalityForAll if i == 2 => matches!(o, Operand::Cardinality { .. }),
            Operator::Raw => matches!(o, Operand::Raw { .. }),
            _ => !matches!(o, Operand::Cardinality { .. } | Operand::Raw { .. }),
        };
        if !payload_ok {
            return Err(bad(i, "operand kind not allowed here"));
        }
    }
    Ok(match f.op {
        Operator::Inclusion => format!("{} {} {}", a[0], s.includes, a[1]),
        Operator::Belonging => format!("{} {} {}", a[0], s.belongs, a[1]),
        Operator::RelationSet => format!("{} = {} {} {}", a[0], a[1], s.relations, a[2]),
        Operator::FunctionSet => format!("{} = {} {} {}", a[0], a[1], s.functions, a[2]),
        Operator::Maplet => format!("{} = {} {} {}", a[0], a[1], s.maps_to, a[2]),
        Operator::RelationComposition => format!("{} = {} ; {}", a[0], a[1], a[2]),
        Operator::Equal2SetOf => format!("{} = {{{}}}", a[0], a[1..].join(", ")),
        Operator::Inversion => format!("{} = {}{}", a[0], a[1], s.inverse),
        Operator::Equality => format!("{} = {}", a[0], a[1]),
        Operator::Raw => a[0].clone(),
        Operator::CardinalityForAll => {
            let Operand::Cardinality { inverse, comparator, value } = &f.args[2] else {
                unreachable!("checked above")
            };
            let inv = if *inverse { s.inverse } else { "" };
            let cmp = match comparator {
                Comparator::Eq => "=",
                Comparator::Ge => s.ge,
                Comparator::Le => s.le,
            };
            format!(
                "{}xx.(xx {} {} {} card({}{inv}[{{xx}}]) {cmp} {value})",
                s.forall, s.belongs, a[0], s.implies, a[1]
            )
        }
    })
}

pub fn render_init(action: &InitialisationAction, mode: EmitMode) -> String {
    let s = symbols(mode);
    match action.op {
        InitOperator::BecomeEqual2EmptySet => format!("{} := {{}}", action.target),
        InitOperator::BecomeEqual2SetOf => {
            let members: Vec<String> = action.args.iter().map(|o| operand(o, s)).collect();
            format!("{} := {{{}}}", action.target, members.join(", "))
        }
    }
}

fn render_set(set: &BSet) -> Option<String> {
    match &set.variant {
        SetVariant::Abstract => Some(set.name.clone()),
        SetVariant::Enumerated { items } => Some(format!("{} = {{{}}}", set.name, items.join(", "))),
        SetVariant::Default { .. } => None,
    }
}

fn clause(out: &mut String, title: &str, lines: &[String]) {
    if lines.is_empty() {
        return;
    }
    out.push_str(title);
    out.push('\n');
    for l in lines {
        let _ = writeln!(out, "    {l}");
    }
}

fn conjoined(formulas: &[Formula], mode: EmitMode, component: &str) -> Result<Vec<String>, EmitError> {
    let and = symbols(mode).and;
    formulas
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let text = render_formula_with(f, mode)
                .map_err(|source| EmitError::Render { component: component.to_string(), source })?;
            Ok(if i == 0 { text } else { format!("{and} {text}") })
        })
        .collect()
}

/// Atelier-B style text of one component.
pub fn emit_atelier(component: &BSystemComponent, mode: EmitMode) -> Result<String, EmitError> {
    let c = component;
    match (c.kind, &c.refines) {
        (ComponentKind::System, None) | (ComponentKind::Refinement, Some(_)) => {}
        (ComponentKind::System, Some(_)) => {
            return Err(EmitError::Structure { component: c.name.clone(), message: "SYSTEM cannot refine".into() })
        }
        (ComponentKind::Refinement, None) => {
            return Err(EmitError::Structure {
                component: c.name.clone(),
                message: "REFINEMENT without REFINES".into(),
            })
        }
    }

    let mut out = String::new();
    let header = match c.kind {
        ComponentKind::System => "SYSTEM",
        ComponentKind::Refinement => "REFINEMENT",
    };
    clause(&mut out, header, std::slice::from_ref(&c.name));
    if let Some(r) = &c.refines {
        clause(&mut out, "REFINES", std::slice::from_ref(r));
    }
    let sets: Vec<String> = c.sets.iter().filter_map(render_set).collect();
    if !sets.is_empty() {
        clause(&mut out, "SETS", &[sets.join("; ")]);
    }
    if !c.constants.is_empty() {
        let names: Vec<&str> = c.constants.iter().map(|k| k.name.as_str()).collect();
        clause(&mut out, "CONSTANTS", &[names.join(", ")]);
    }
    clause(&mut out, "PROPERTIES", &conjoined(&c.properties, mode, &c.name)?);
    if !c.variables.is_empty() {
        let names: Vec<&str> = c.variables.iter().map(|v| v.name.as_str()).collect();
        clause(&mut out, "VARIABLES", &[names.join(", ")]);
    }
    clause(&mut out, "INVARIANT", &conjoined(&c.invariants, mode, &c.name)?);
    let inits: Vec<String> = c
        .initialisations
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let text = render_init(a, mode);
            if i == 0 {
                text
            } else {
                format!("|| {text}")
            }
        })
        .collect();
    clause(&mut out, "INITIALISATION", &inits);
    let events: Vec<String> = c
        .events
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let sep = if i + 1 < c.events.len() { ";" } else { "" };
            format!("{} = skip{sep}", e.name)
        })
        .collect();
    clause(&mut out, "EVENTS", &events);
    out.push_str("END\n");
    Ok(out)
}

/// Emit every component of a root-first chain after checking that each
/// `REFINES` target precedes it and every referenced identifier is declared
/// in the component or one of the components it refines.
pub fn emit_chain(components: &[BSystemComponent], mode: EmitMode) -> Result<Vec<(String, String)>, EmitError> {
    let mut out = Vec::new();
    for (i, c) in components.iter().enumerate() {
        let mut visible: HashSet<&str> = DefaultKind::ALL.iter().map(|k| k.keyword()).collect();
        let mut cur = Some(i);
        let mut hops = 0;
        while let Some(idx) = cur {
            visible.extend(components[idx].declared_names());
            cur = match &components[idx].refines {
                None => None,
                Some(r) => match components[..idx].iter().position(|p| &p.name == r) {
                    Some(p) => Some(p),
                    None => {
                        return Err(EmitError::Dangling { component: components[idx].name.clone(), name: r.clone() })
                    }
                },
            };
            hops += 1;
            if hops > components.len() {
                break;
            }
        }
        let formulas = c.properties.iter().chain(&c.invariants);
        let mut referenced: Vec<&str> = formulas.flat_map(|f| f.referenced_names()).collect();
        for a in &c.initialisations {
            referenced.push(&a.target);
            let f = Formula::new(Operator::Equal2SetOf, a.args.clone());
            for n in f.referenced_names() {
                if !visible.contains(n) {
                    return Err(EmitError::Dangling { component: c.name.clone(), name: n.to_string() });
                }
            }
        }
        if let Some(n) = referenced.into_iter().find(|n| !visible.contains(n)) {
            return Err(EmitError::Dangling { component: c.name.clone(), name: n.to_string() });
        }
        out.push((c.name.clone(), emit_atelier(c, mode)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lg_root() -> BSystemComponent {
        let mut c = BSystemComponent::system("lg_system_ref_0");
        c.sets.push(BSet::abstract_set("LandingGear"));
        c.sets.push(BSet::enumerated("DataSet_1", vec!["lg_extended".into(), "lg_retracted".into()]));
        c.constants.push(Constant::new("T_landingGearState"));
        c.constants.push(Constant::new("LG1"));
        c.properties.push(Formula::typing(
            Operator::Belonging,
            vec![Operand::constant("LG1"), Operand::set("LandingGear")],
        ));
        c.properties.push(Formula::new(
            Operator::Equal2SetOf,
            vec![Operand::set("LandingGear"), Operand::constant("LG1")],
        ));
        c.properties.push(Formula::typing(
            Operator::FunctionSet,
            vec![Operand::constant("T_landingGearState"), Operand::set("LandingGear"), Operand::set("DataSet_1")],
        ));
        c.variables.push(Variable::new("landingGearState"));
        c.invariants.push(Formula::typing(
            Operator::Belonging,
            vec![Operand::variable("landingGearState"), Operand::constant("T_landingGearState")],
        ));
        c.initialisations.push(InitialisationAction::set_of(
            "landingGearState",
            vec![Operand::maplet("LG1", "lg_extended")],
        ));
        c
    }

    #[test]
    fn root_component_text() {
        let text = emit_atelier(&lg_root(), EmitMode::Ascii).unwrap();
        let expected = "\
SYSTEM
    lg_system_ref_0
SETS
    LandingGear; DataSet_1 = {lg_extended, lg_retracted}
CONSTANTS
    T_landingGearState, LG1
PROPERTIES
    LG1 : LandingGear
    & LandingGear = {LG1}
    & T_landingGearState = LandingGear --> DataSet_1
VARIABLES
    landingGearState
INVARIANT
    landingGearState : T_landingGearState
INITIALISATION
    landingGearState := {LG1 |-> lg_extended}
END
";
        assert_eq!(text, expected);
    }

    #[test]
    fn unicode_symbols() {
        let text = emit_atelier(&lg_root(), EmitMode::Unicode).unwrap();
        assert!(text.contains("LG1 ∈ LandingGear"));
        assert!(text.contains("∧ T_landingGearState = LandingGear ⟶ DataSet_1"));
        assert!(text.contains("{LG1 ↦ lg_extended}"));
    }

    #[test]
    fn refinement_header() {
        let c = BSystemComponent::refinement("lg_system_ref_1", "lg_system_ref_0");
        assert_eq!(
            emit_atelier(&c, EmitMode::Ascii).unwrap(),
            "REFINEMENT\n    lg_system_ref_1\nREFINES\n    lg_system_ref_0\nEND\n"
        );
    }

    #[test]
    fn empty_system_is_header_and_end() {
        let c = BSystemComponent::system("s");
        assert_eq!(emit_atelier(&c, EmitMode::Ascii).unwrap(), "SYSTEM\n    s\nEND\n");
    }

    #[test]
    fn operator_shapes() {
        let k = Operand::constant;
        let cases = [
            (Formula::new(Operator::Inclusion, vec![k("a"), k("b")]), "a <: b"),
            (Formula::new(Operator::RelationSet, vec![k("T"), k("A"), k("B")]), "T = A <-> B"),
            (Formula::new(Operator::Maplet, vec![k("m"), k("a"), k("b")]), "m = a |-> b"),
            (Formula::new(Operator::RelationComposition, vec![k("comp_r"), k("r"), k("r")]), "comp_r = r ; r"),
            (Formula::new(Operator::Inversion, vec![k("inv_r"), k("r")]), "inv_r = r~"),
            (Formula::new(Operator::Equality, vec![k("inv_r"), k("r")]), "inv_r = r"),
            (Formula::new(Operator::Equality, vec![k("x"), k("x")]), "x = x"),
            (Formula::new(Operator::Equal2SetOf, vec![k("r")]), "r = {}"),
            (Formula::raw("x > 0"), "x > 0"),
        ];
        for (f, want) in cases {
            assert_eq!(render_formula(&f).unwrap(), want);
        }
    }

    #[test]
    fn closure_over_maplets() {
        let f = Formula::new(
            Operator::Equal2SetOf,
            vec![
                Operand::constant("LgOfLs"),
                Operand::maplet("LS1", "LG1"),
                Operand::maplet("LS2", "LG1"),
                Operand::maplet("LS3", "LG1"),
            ],
        );
        assert_eq!(render_formula(&f).unwrap(), "LgOfLs = {LS1 |-> LG1, LS2 |-> LG1, LS3 |-> LG1}");
    }

    #[test]
    fn cardinality_quantifier() {
        let f = Formula::new(
            Operator::CardinalityForAll,
            vec![
                Operand::set("LandingGear"),
                Operand::constant("LgOfLs"),
                Operand::Cardinality { inverse: true, comparator: Comparator::Eq, value: 3 },
            ],
        );
        assert_eq!(render_formula(&f).unwrap(), "!xx.(xx : LandingGear => card(LgOfLs~[{xx}]) = 3)");
        assert_eq!(
            render_formula_with(&f, EmitMode::Unicode).unwrap(),
            "∀xx.(xx ∈ LandingGear ⇒ card(LgOfLs⁻¹[{xx}]) = 3)"
        );
    }

    #[test]
    fn arity_mismatch() {
        let f = Formula::new(Operator::Belonging, vec![Operand::constant("a")]);
        assert!(matches!(render_formula(&f), Err(RenderError::Arity { found: 1, .. })));
        let f = Formula::new(Operator::CardinalityForAll, vec![Operand::set("A"), Operand::constant("r"), Operand::set("B")]);
        assert!(matches!(render_formula(&f), Err(RenderError::Operand { position: 2, .. })));
    }

    #[test]
    fn chain_rejects_dangling_names() {
        let mut c = BSystemComponent::system("s");
        c.properties.push(Formula::new(Operator::Belonging, vec![Operand::constant("a"), Operand::set("Nope")]));
        assert!(matches!(emit_chain(&[c], EmitMode::Ascii), Err(EmitError::Dangling { .. })));

        let child = BSystemComponent::refinement("r", "missing");
        assert!(matches!(emit_chain(&[child], EmitMode::Ascii), Err(EmitError::Dangling { .. })));
    }

    #[test]
    fn chain_sees_refined_names() {
        let root = lg_root();
        let mut child = BSystemComponent::refinement("lg_system_ref_1", "lg_system_ref_0");
        child.sets.push(BSet::abstract_set("Handle"));
        child.constants.push(Constant::new("T_LgOfHd"));
        child.properties.push(Formula::typing(
            Operator::RelationSet,
            vec![Operand::constant("T_LgOfHd"), Operand::set("Handle"), Operand::set("LandingGear")],
        ));
        let files = emit_chain(&[root, child], EmitMode::Ascii).unwrap();
        assert_eq!(files.len(), 2);
        assert!(files[1].1.contains("T_LgOfHd = Handle <-> LandingGear"));
    }
}
