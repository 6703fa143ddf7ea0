//! Textual syntax for domain-model chains.
//!
//! ```text
//! domain_model lg_system_ref_0 {
//!     concept LandingGear
//!     enumerated_dataset DataSet_1 { "lg_extended", "lg_retracted" }
//!     attribute landingGearState { domain LandingGear range DataSet_1 variable }
//!     individual LG1 : LandingGear
//!     attr_maplet LG1 -> "lg_extended" : landingGearState
//! }
//! ```
//!
//! `serialize_dsl` writes the canonical form: items grouped by kind in a
//! fixed order, one per line, four-space indent, models separated by a blank
//! line. Parsing canonical text and serializing it again is byte-identical.

use std::collections::{BTreeMap, HashSet};
use std::fmt::{self, Write};

use thiserror::Error;

use super::types::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownKeyword,
    Redeclaration,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Line/column of each declared element, keyed by the element path used in
/// diagnostics (`model/kind name`; a bare model name for the model itself).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceMap {
    spans: BTreeMap<String, (usize, usize)>,
}

impl SourceMap {
    pub fn get(&self, path: &str) -> Option<(usize, usize)> {
        self.spans.get(path).copied()
    }

    /// Position of `path`, falling back to its model when the element is unknown.
    pub fn locate(&self, path: &str) -> Option<(usize, usize)> {
        self.get(path).or_else(|| path.split('/').next().and_then(|m| self.get(m)))
    }

    fn insert(&mut self, path: String, pos: (usize, usize)) {
        self.spans.entry(path).or_insert(pos);
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Nat(u32),
    LBrace,
    RBrace,
    Comma,
    Colon,
    Arrow,
    DotDot,
    Star,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Str(s) => write!(f, "string \"{s}\""),
            Tok::Nat(n) => write!(f, "number {n}"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::DotDot => f.write_str("`..`"),
            Tok::Star => f.write_str("`*`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, message: String| ParseError { kind: ParseErrorKind::Syntax, line, column: col, message };

    while i < chars.len() {
        let c = chars[i];
        let (sl, sc) = (line, col);
        let advance = |i: &mut usize, n: usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(&mut i, 1, &mut col),
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '{' => {
                out.push(Spanned { tok: Tok::LBrace, line: sl, col: sc });
                advance(&mut i, 1, &mut col);
            }
            '}' => {
                out.push(Spanned { tok: Tok::RBrace, line: sl, col: sc });
                advance(&mut i, 1, &mut col);
            }
            ',' => {
                out.push(Spanned { tok: Tok::Comma, line: sl, col: sc });
                advance(&mut i, 1, &mut col);
            }
            ':' => {
                out.push(Spanned { tok: Tok::Colon, line: sl, col: sc });
                advance(&mut i, 1, &mut col);
            }
            '*' => {
                out.push(Spanned { tok: Tok::Star, line: sl, col: sc });
                advance(&mut i, 1, &mut col);
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push(Spanned { tok: Tok::Arrow, line: sl, col: sc });
                advance(&mut i, 2, &mut col);
            }
            '.' if chars.get(i + 1) == Some(&'.') => {
                out.push(Spanned { tok: Tok::DotDot, line: sl, col: sc });
                advance(&mut i, 2, &mut col);
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                col += 1;
                loop {
                    match chars.get(i) {
                        None | Some('\n') => return Err(err(sl, sc, "unterminated string literal".into())),
                        Some('"') => {
                            i += 1;
                            col += 1;
                            break;
                        }
                        Some('\\') => {
                            let e = match chars.get(i + 1) {
                                Some('"') => '"',
                                Some('\\') => '\\',
                                Some('n') => '\n',
                                Some('t') => '\t',
                                other => {
                                    return Err(err(line, col, format!("invalid escape `\\{}`", other.copied().unwrap_or(' '))))
                                }
                            };
                            s.push(e);
                            i += 2;
                            col += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                            col += 1;
                        }
                    }
                }
                out.push(Spanned { tok: Tok::Str(s), line: sl, col: sc });
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                col += i - start;
                let n = text.parse::<u32>().map_err(|_| err(sl, sc, format!("number `{text}` is too large")))?;
                out.push(Spanned { tok: Tok::Nat(n), line: sl, col: sc });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                col += i - start;
                out.push(Spanned { tok: Tok::Ident(chars[start..i].iter().collect()), line: sl, col: sc });
            }
            other => return Err(err(sl, sc, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    eof: (usize, usize),
    spans: SourceMap,
    anon_counter: usize,
    dataset_names: HashSet<String>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|s| (s.line, s.col)).unwrap_or(self.eof)
    }

    fn error(&self, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
        let (line, column) = self.here();
        ParseError { kind, line, column, message: message.into() }
    }

    fn found(&self) -> String {
        self.peek().map(|t| t.to_string()).unwrap_or_else(|| "end of input".into())
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> PResult<()> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(ParseErrorKind::Syntax, format!("expected {want}, found {}", self.found())))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(ParseErrorKind::Syntax, format!("expected {what}, found {}", self.found()))),
        }
    }

    fn string(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(Tok::Str(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(ParseErrorKind::Syntax, format!("expected {what}, found {}", self.found()))),
        }
    }

    fn nat(&mut self) -> PResult<u32> {
        match self.peek() {
            Some(Tok::Nat(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.error(ParseErrorKind::Syntax, format!("expected a natural number, found {}", self.found()))),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(ParseErrorKind::Syntax, format!("expected `{kw}`, found {}", self.found()))),
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn chain(&mut self) -> PResult<Vec<DomainModel>> {
        let mut models: Vec<DomainModel> = Vec::new();
        while self.peek().is_some() {
            let pos = self.here();
            match self.peek() {
                Some(Tok::Ident(s)) if s == "domain_model" => {}
                Some(Tok::Ident(s)) => {
                    return Err(self.error(ParseErrorKind::UnknownKeyword, format!("unknown keyword `{s}`, expected `domain_model`")))
                }
                _ => return Err(self.error(ParseErrorKind::Syntax, format!("expected `domain_model`, found {}", self.found()))),
            }
            self.pos += 1;
            let name_pos = self.here();
            let name = self.ident("a model name")?;
            if models.iter().any(|m| m.name == name) {
                let (line, column) = name_pos;
                return Err(ParseError {
                    kind: ParseErrorKind::Redeclaration,
                    line,
                    column,
                    message: format!("domain model `{name}` is declared twice"),
                });
            }
            self.spans.insert(name.clone(), pos);
            let parent = if self.eat_keyword("parent") { Some(self.ident("a parent model name")?) } else { None };
            let mut model = DomainModel { name, parent, ..Default::default() };
            self.expect(Tok::LBrace)?;
            let mut declared: HashSet<(String, String)> = HashSet::new();
            while self.peek() != Some(&Tok::RBrace) {
                if self.peek().is_none() {
                    return Err(self.error(ParseErrorKind::Syntax, format!("unclosed block of model `{}`", model.name)));
                }
                self.item(&mut model, &mut declared)?;
            }
            self.expect(Tok::RBrace)?;
            models.push(model);
        }
        Ok(models)
    }

    fn declare(
        &mut self,
        declared: &mut HashSet<(String, String)>,
        model: &str,
        kind: &str,
        name: &str,
        pos: (usize, usize),
    ) -> PResult<()> {
        if !declared.insert((kind.to_string(), name.to_string())) {
            return Err(ParseError {
                kind: ParseErrorKind::Redeclaration,
                line: pos.0,
                column: pos.1,
                message: format!("{kind} `{name}` is declared twice in model `{model}`"),
            });
        }
        self.spans.insert(format!("{model}/{kind} {name}"), pos);
        Ok(())
    }

    fn item(&mut self, model: &mut DomainModel, declared: &mut HashSet<(String, String)>) -> PResult<()> {
        let pos = self.here();
        let kw = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            _ => return Err(self.error(ParseErrorKind::Syntax, format!("expected a declaration, found {}", self.found()))),
        };
        let mn = model.name.clone();
        match kw.as_str() {
            "concept" => {
                self.pos += 1;
                let name = self.ident("a concept name")?;
                let is_variable = self.eat_keyword("variable");
                let parent_concept = if self.eat_keyword("extends") { Some(self.ident("a parent concept")?) } else { None };
                self.declare(declared, &mn, "concept", &name, pos)?;
                model.concepts.push(Concept { name, is_variable, parent_concept });
            }
            "enumerated_dataset" => {
                self.pos += 1;
                let name = self.ident("a data set name")?;
                let values = self.string_list()?;
                self.declare(declared, &mn, "dataset", &name, pos)?;
                self.dataset_names.insert(name.clone());
                model.data_sets.push(DataSet::Enumerated { name, values });
            }
            "custom_dataset" => {
                self.pos += 1;
                let name = self.ident("a data set name")?;
                self.declare(declared, &mn, "dataset", &name, pos)?;
                self.dataset_names.insert(name.clone());
                model.data_sets.push(DataSet::Custom { name });
            }
            "data_value" => {
                self.pos += 1;
                let lexical_form = self.string("a data value")?;
                self.expect(Tok::Colon)?;
                let data_set = self.range_ref()?;
                self.spans.insert(format!("{mn}/data value {lexical_form}"), pos);
                model.data_values.push(DataValue { lexical_form, data_set });
            }
            "relation" => {
                self.pos += 1;
                let name = self.ident("a relation name")?;
                let rel = self.relation_body(name.clone())?;
                self.declare(declared, &mn, "relation", &name, pos)?;
                model.relations.push(rel);
            }
            "attribute" => {
                self.pos += 1;
                let name = self.ident("an attribute name")?;
                let attr = self.attribute_body(name.clone(), model, pos)?;
                self.declare(declared, &mn, "attribute", &name, pos)?;
                model.attributes.push(attr);
            }
            "individual" => {
                self.pos += 1;
                let name = self.ident("an individual name")?;
                self.expect(Tok::Colon)?;
                let concept = self.ident("a concept name")?;
                self.declare(declared, &mn, "individual", &name, pos)?;
                model.individuals.push(Individual { name, concept });
            }
            "maplet" => {
                self.pos += 1;
                let antecedent = self.ident("an antecedent individual")?;
                self.expect(Tok::Arrow)?;
                let image = self.ident("an image individual")?;
                self.expect(Tok::Colon)?;
                let relation = self.ident("a relation name")?;
                let m = RelationMaplet { relation, antecedent, image };
                self.spans.insert(format!("{mn}/maplet {}", m.key()), pos);
                model.relation_maplets.push(m);
            }
            "attr_maplet" => {
                self.pos += 1;
                let antecedent = self.ident("an antecedent individual")?;
                self.expect(Tok::Arrow)?;
                let image = self.string("an image data value")?;
                self.expect(Tok::Colon)?;
                let attribute = self.ident("an attribute name")?;
                let m = AttributeMaplet { attribute, antecedent, image };
                self.spans.insert(format!("{mn}/attr_maplet {}", m.key()), pos);
                model.attribute_maplets.push(m);
            }
            "predicate" | "gluing_invariant" => {
                self.pos += 1;
                let text = self.string("predicate text")?;
                let kind = if kw == "predicate" { PredicateKind::Plain } else { PredicateKind::Gluing };
                model.predicates.push(Predicate { kind, text });
            }
            other => {
                return Err(self.error(ParseErrorKind::UnknownKeyword, format!("unknown keyword `{other}`")));
            }
        }
        Ok(())
    }

    fn string_list(&mut self) -> PResult<Vec<String>> {
        self.expect(Tok::LBrace)?;
        let mut values = vec![self.string("a data value")?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            values.push(self.string("a data value")?);
        }
        self.expect(Tok::RBrace)?;
        Ok(values)
    }

    fn range_ref(&mut self) -> PResult<DataSetRef> {
        let name = self.ident("a data set")?;
        Ok(match DefaultKind::from_keyword(&name) {
            Some(k) => DataSetRef::Default(k),
            None => DataSetRef::Named(name),
        })
    }

    fn card(&mut self) -> PResult<Cardinality> {
        let min = self.nat()?;
        self.expect(Tok::DotDot)?;
        let max = if self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            MaxCard::Star
        } else {
            MaxCard::Bounded(self.nat()?)
        };
        Ok(Cardinality { min, max })
    }

    fn relation_body(&mut self, name: String) -> PResult<Relation> {
        self.expect(Tok::LBrace)?;
        self.keyword("domain")?;
        let domain = self.ident("a domain concept")?;
        self.keyword("range")?;
        let range = self.ident("a range concept")?;
        let mut rel = Relation::new(name, domain, range);
        loop {
            match self.next() {
                Some(Tok::RBrace) => break,
                Some(Tok::Ident(kw)) => match kw.as_str() {
                    "variable" => rel.is_variable = true,
                    "transitive" => rel.flags.transitive = true,
                    "symmetric" => rel.flags.symmetric = true,
                    "asymmetric" => rel.flags.asymmetric = true,
                    "reflexive" => rel.flags.reflexive = true,
                    "irreflexive" => rel.flags.irreflexive = true,
                    "card_domain" => rel.domain_cardinality = self.card()?,
                    "card_range" => rel.range_cardinality = self.card()?,
                    other => {
                        self.pos -= 1;
                        return Err(self.error(ParseErrorKind::UnknownKeyword, format!("unknown relation keyword `{other}`")));
                    }
                },
                Some(t) => {
                    self.pos -= 1;
                    return Err(self.error(ParseErrorKind::Syntax, format!("unexpected {t} in relation `{}`", rel.name)));
                }
                None => return Err(self.error(ParseErrorKind::Syntax, format!("unclosed relation `{}`", rel.name))),
            }
        }
        Ok(rel)
    }

    fn attribute_body(&mut self, name: String, model: &mut DomainModel, pos: (usize, usize)) -> PResult<Attribute> {
        self.expect(Tok::LBrace)?;
        self.keyword("domain")?;
        let domain = self.ident("a domain concept")?;
        self.keyword("range")?;
        let range = if self.peek() == Some(&Tok::LBrace) {
            let values = self.string_list()?;
            let ds_name = self.fresh_dataset_name();
            self.spans.insert(format!("{}/dataset {ds_name}", model.name), pos);
            model.data_sets.push(DataSet::Enumerated { name: ds_name.clone(), values });
            DataSetRef::Named(ds_name)
        } else {
            self.range_ref()?
        };
        let mut attr = Attribute::new(name, domain, range);
        loop {
            match self.next() {
                Some(Tok::RBrace) => break,
                Some(Tok::Ident(kw)) => match kw.as_str() {
                    "variable" => attr.is_variable = true,
                    "functional" => {
                        attr.is_functional = match self.next() {
                            Some(Tok::Ident(b)) if b == "true" => true,
                            Some(Tok::Ident(b)) if b == "false" => false,
                            _ => {
                                self.pos -= 1;
                                return Err(self.error(ParseErrorKind::Syntax, "expected `true` or `false` after `functional`"));
                            }
                        }
                    }
                    other => {
                        self.pos -= 1;
                        return Err(self.error(ParseErrorKind::UnknownKeyword, format!("unknown attribute keyword `{other}`")));
                    }
                },
                Some(t) => {
                    self.pos -= 1;
                    return Err(self.error(ParseErrorKind::Syntax, format!("unexpected {t} in attribute `{}`", attr.name)));
                }
                None => return Err(self.error(ParseErrorKind::Syntax, format!("unclosed attribute `{}`", attr.name))),
            }
        }
        Ok(attr)
    }

    /// `DataSet_<k>` for the next free k, counting anonymous sets in order of
    /// appearance across the whole chain.
    fn fresh_dataset_name(&mut self) -> String {
        loop {
            self.anon_counter += 1;
            let name = format!("DataSet_{}", self.anon_counter);
            if self.dataset_names.insert(name.clone()) {
                return name;
            }
        }
    }
}

pub fn parse_dsl(source: &str) -> Result<Vec<DomainModel>, ParseError> {
    parse_dsl_with_spans(source).map(|(m, _)| m)
}

pub fn parse_dsl_with_spans(source: &str) -> Result<(Vec<DomainModel>, SourceMap), ParseError> {
    let toks = lex(source)?;
    let last_line = source.lines().count().max(1);
    let last_col = source.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
    let mut p = Parser {
        toks,
        pos: 0,
        eof: (last_line, last_col),
        spans: SourceMap::default(),
        anon_counter: 0,
        dataset_names: HashSet::new(),
    };
    // Explicit data set names are reserved up front so an anonymous set
    // never takes a name declared later in the file.
    for w in p.toks.windows(2) {
        if let [Spanned { tok: Tok::Ident(kw), .. }, Spanned { tok: Tok::Ident(name), .. }] = w {
            if kw == "enumerated_dataset" || kw == "custom_dataset" {
                p.dataset_names.insert(name.clone());
            }
        }
    }
    let models = p.chain()?;
    Ok((models, p.spans))
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn string_list(values: &[String]) -> String {
    values.iter().map(|v| quote(v)).collect::<Vec<_>>().join(", ")
}

pub fn serialize_dsl(models: &[DomainModel]) -> String {
    let mut out = String::new();
    for (i, m) in models.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_model(&mut out, m).expect("writing to a String cannot fail");
    }
    out
}

fn write_model(out: &mut String, m: &DomainModel) -> fmt::Result {
    match &m.parent {
        Some(p) => writeln!(out, "domain_model {} parent {} {{", m.name, p)?,
        None => writeln!(out, "domain_model {} {{", m.name)?,
    }
    for c in &m.concepts {
        write!(out, "    concept {}", c.name)?;
        if c.is_variable {
            out.push_str(" variable");
        }
        if let Some(p) = &c.parent_concept {
            write!(out, " extends {p}")?;
        }
        out.push('\n');
    }
    for d in &m.data_sets {
        match d {
            DataSet::Custom { name } => writeln!(out, "    custom_dataset {name}")?,
            DataSet::Enumerated { name, values } => {
                writeln!(out, "    enumerated_dataset {name} {{ {} }}", string_list(values))?
            }
        }
    }
    for v in &m.data_values {
        writeln!(out, "    data_value {} : {}", quote(&v.lexical_form), v.data_set)?;
    }
    for r in &m.relations {
        write!(out, "    relation {} {{ domain {} range {}", r.name, r.domain, r.range)?;
        if r.is_variable {
            out.push_str(" variable");
        }
        for (set, kw) in [
            (r.flags.transitive, "transitive"),
            (r.flags.symmetric, "symmetric"),
            (r.flags.asymmetric, "asymmetric"),
            (r.flags.reflexive, "reflexive"),
            (r.flags.irreflexive, "irreflexive"),
        ] {
            if set {
                write!(out, " {kw}")?;
            }
        }
        if !r.domain_cardinality.is_unconstrained() {
            write!(out, " card_domain {}", r.domain_cardinality)?;
        }
        if !r.range_cardinality.is_unconstrained() {
            write!(out, " card_range {}", r.range_cardinality)?;
        }
        out.push_str(" }\n");
    }
    for a in &m.attributes {
        write!(out, "    attribute {} {{ domain {} range {}", a.name, a.domain, a.range)?;
        if a.is_variable {
            out.push_str(" variable");
        }
        if !a.is_functional {
            out.push_str(" functional false");
        }
        out.push_str(" }\n");
    }
    for i in &m.individuals {
        writeln!(out, "    individual {} : {}", i.name, i.concept)?;
    }
    for rm in &m.relation_maplets {
        writeln!(out, "    maplet {} -> {} : {}", rm.antecedent, rm.image, rm.relation)?;
    }
    for am in &m.attribute_maplets {
        writeln!(out, "    attr_maplet {} -> {} : {}", am.antecedent, quote(&am.image), am.attribute)?;
    }
    for p in &m.predicates {
        let kw = match p.kind {
            PredicateKind::Plain => "predicate",
            PredicateKind::Gluing => "gluing_invariant",
        };
        writeln!(out, "    {kw} {}", quote(&p.text))?;
    }
    out.push_str("}\n");
    Ok(())
}
