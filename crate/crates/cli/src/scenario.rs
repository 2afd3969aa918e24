//! Line-oriented scenario files.
//!
//! ```text
//! model macro
//! atom r Q=0 S=0/1
//! atom v Q=1 S=1/1
//! state rr = (r + r)
//! eidostate Ib = { r, rr }
//! ```
//!
//! Quantum scenarios declare atoms as `atom <name> dim=<int> len=<int>`.
//! Anything after `#` is a comment. Built-in atoms such as `s[1/2]` (macro)
//! or `d[3]` (quantum) may appear in expressions without a declaration.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use thiserror::Error;

use eidos_core::macrostate::AtomDef;
use eidos_core::quantum::QAtom;
use eidos_core::{AtomId, Eidostate, MacroModel, ModelOracle, QuantumModel, StateExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// 1-based; 0 for text given on the command line.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: ", self.line)?;
        }
        f.write_str(&self.message)
    }
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

type Parsed<T> = Result<T, ParseError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModelKind {
    #[default]
    Macro,
    Quantum,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Macro => "macro",
            ModelKind::Quantum => "quantum",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomSpec {
    Macro(AtomDef),
    Quantum(QAtom),
}

/// A parsed scenario: declarations in file order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Scenario {
    pub model: ModelKind,
    pub atoms: Vec<(String, AtomSpec)>,
    pub states: Vec<(String, StateExpr)>,
    /// Member names as written.
    pub eidostates: Vec<(String, Vec<String>)>,
}

/// The model a scenario runs against.
#[derive(Debug, Clone)]
pub enum Model {
    Macro(MacroModel),
    Quantum(QuantumModel),
}

impl Model {
    pub fn empty(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Macro => Model::Macro(MacroModel::new()),
            ModelKind::Quantum => Model::Quantum(QuantumModel::new()),
        }
    }

    pub fn oracle(&self) -> &dyn ModelOracle {
        match self {
            Model::Macro(m) => m,
            Model::Quantum(m) => m,
        }
    }

    fn register(&mut self, name: &str, spec: &AtomSpec) -> eidos_core::Result<()> {
        match (self, spec) {
            (Model::Macro(m), AtomSpec::Macro(def)) => m.register(name, def.clone()).map(drop),
            (Model::Quantum(m), AtomSpec::Quantum(a)) => m.register(name, a.clone()).map(drop),
            _ => Err(eidos_core::Error::InvalidAtom("atom does not match the model".into())),
        }
    }

    fn knows(&self, id: &AtomId) -> bool {
        match self {
            Model::Macro(m) => m.resolve(id).is_ok(),
            Model::Quantum(m) => m.resolve(id).is_ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Num(String),
    Sym(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(s) | Tok::Num(s) => f.write_str(s),
            Tok::Sym(c) => write!(f, "{c}"),
        }
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn tokenize(text: &str, line: usize) -> Parsed<Vec<Tok>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && (chars[i] == '.' || chars[i] == 'e' || chars[i] == 'E') {
                return Err(ParseError::new(line, "floating-point literals are not accepted; write p/q"));
            }
            out.push(Tok::Num(chars[start..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && is_word_char(chars[i]) {
                i += 1;
            }
            if i < chars.len() && chars[i] == '[' {
                let close = chars[i..]
                    .iter()
                    .position(|&c| c == ']')
                    .ok_or_else(|| ParseError::new(line, "unclosed `[`"))?;
                i += close + 1;
            }
            let word: String = chars[start..i].iter().filter(|c| !c.is_whitespace()).collect();
            out.push(Tok::Word(word));
        } else if "()+{},=/-".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(ParseError::new(line, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Cursor<'t> {
    toks: &'t [Tok],
    pos: usize,
    line: usize,
}

impl<'t> Cursor<'t> {
    fn new(toks: &'t [Tok], line: usize) -> Self {
        Cursor { toks, pos: 0, line }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Parsed<T> {
        Err(ParseError::new(self.line, msg))
    }

    fn peek(&self) -> Option<&'t Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&'t Tok> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn expect(&mut self, c: char) -> Parsed<()> {
        match self.next() {
            Some(Tok::Sym(s)) if *s == c => Ok(()),
            Some(t) => self.err(format!("expected `{c}`, found `{t}`")),
            None => self.err(format!("expected `{c}` at end of line")),
        }
    }

    fn word(&mut self, what: &str) -> Parsed<String> {
        match self.next() {
            Some(Tok::Word(w)) => Ok(w.clone()),
            Some(t) => self.err(format!("expected {what}, found `{t}`")),
            None => self.err(format!("expected {what} at end of line")),
        }
    }

    fn number(&mut self, what: &str) -> Parsed<String> {
        match self.next() {
            Some(Tok::Num(n)) => Ok(n.clone()),
            Some(Tok::Sym('-')) => self.err(format!("{what} must be nonnegative")),
            Some(t) => self.err(format!("expected {what}, found `{t}`")),
            None => self.err(format!("expected {what} at end of line")),
        }
    }

    fn finish(&self) -> Parsed<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => self.err(format!("unexpected `{t}` after the end of the declaration")),
        }
    }
}

fn is_identifier(name: &str) -> bool {
    let mut cs = name.chars();
    cs.next().is_some_and(|c| c.is_alphabetic() || c == '_') && cs.all(is_word_char)
}

impl Scenario {
    pub fn empty(model: ModelKind) -> Self {
        Scenario {
            model,
            ..Scenario::default()
        }
    }

    pub fn atom(&self, name: &str) -> Option<&AtomSpec> {
        self.atoms.iter().find(|(n, _)| n == name).map(|(_, a)| a)
    }

    pub fn state(&self, name: &str) -> Option<&StateExpr> {
        self.states.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn eidostate_members(&self, name: &str) -> Option<&[String]> {
        self.eidostates
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m.as_slice())
    }

    fn defined(&self, name: &str) -> bool {
        self.atom(name).is_some() || self.state(name).is_some() || self.eidostate_members(name).is_some()
    }

    /// A fresh model with every declared atom registered.
    pub fn model(&self) -> Model {
        let mut m = Model::empty(self.model);
        for (name, spec) in &self.atoms {
            m.register(name, spec).expect("atoms were validated when parsed");
        }
        m
    }

    /// A declared state, or an atom name, as a state.
    fn named_state(&self, name: &str, model: &Model, line: usize) -> Parsed<StateExpr> {
        if let Some(s) = self.state(name) {
            return Ok(s.clone());
        }
        let id = AtomId::new(name);
        if self.atom(name).is_some() || model.knows(&id) {
            return Ok(StateExpr::Atom(id));
        }
        if self.eidostate_members(name).is_some() {
            return Err(ParseError::new(line, format!("`{name}` is an eidostate, not a state")));
        }
        Err(ParseError::new(line, format!("unknown name `{name}`")))
    }

    fn expr(&self, cur: &mut Cursor<'_>, model: &Model) -> Parsed<StateExpr> {
        match cur.next() {
            Some(Tok::Sym('(')) => {
                let l = self.expr(cur, model)?;
                cur.expect('+')?;
                let r = self.expr(cur, model)?;
                cur.expect(')')?;
                Ok(StateExpr::pair(l, r))
            }
            Some(Tok::Word(w)) => self.named_state(w, model, cur.line),
            Some(t) => cur.err(format!("expected a state, found `{t}`")),
            None => cur.err("expected a state at end of line"),
        }
    }

    fn members(&self, cur: &mut Cursor<'_>, model: &Model) -> Parsed<Vec<String>> {
        cur.expect('{')?;
        let mut names = Vec::new();
        loop {
            let name = cur.word("a state name")?;
            self.named_state(&name, model, cur.line)?;
            if names.contains(&name) {
                return cur.err(format!("`{name}` listed twice"));
            }
            names.push(name);
            match cur.next() {
                Some(Tok::Sym(',')) => continue,
                Some(Tok::Sym('}')) => break,
                Some(t) => return cur.err(format!("expected `,` or `}}`, found `{t}`")),
                None => return cur.err("unclosed `{`"),
            }
        }
        Ok(names)
    }

    fn resolve_members(&self, names: &[String], model: &Model, line: usize) -> Parsed<Eidostate> {
        let mut states = Vec::with_capacity(names.len());
        for n in names {
            states.push(self.named_state(n, model, line)?);
        }
        Eidostate::from_states(states).map_err(|e| ParseError::new(line, e.to_string()))
    }

    /// The eidostate named `name`.
    pub fn eidostate(&self, name: &str) -> Option<Eidostate> {
        let names = self.eidostate_members(name)?;
        self.resolve_members(names, &self.model(), 0).ok()
    }

    /// A state written on the command line: a name or an expression.
    pub fn parse_state(&self, text: &str) -> Parsed<StateExpr> {
        let toks = tokenize(text, 0)?;
        let mut cur = Cursor::new(&toks, 0);
        let s = self.expr(&mut cur, &self.model())?;
        cur.finish()?;
        Ok(s)
    }

    /// An eidostate written on the command line: an eidostate name, a
    /// `{ ... }` list, or a state (taken as a singleton).
    pub fn parse_eidostate(&self, text: &str) -> Parsed<Eidostate> {
        let model = self.model();
        if let Some(names) = self.eidostate_members(text.trim()) {
            return self.resolve_members(names, &model, 0);
        }
        let toks = tokenize(text, 0)?;
        let mut cur = Cursor::new(&toks, 0);
        let e = if toks.first() == Some(&Tok::Sym('{')) {
            let names = self.members(&mut cur, &model)?;
            self.resolve_members(&names, &model, 0)?
        } else {
            Eidostate::singleton(self.expr(&mut cur, &model)?)
        };
        cur.finish()?;
        Ok(e)
    }

    fn declare_name(&self, cur: &mut Cursor<'_>) -> Parsed<String> {
        let name = cur.word("a name")?;
        if !is_identifier(&name) {
            return cur.err(format!("`{name}` is not a valid name"));
        }
        if self.defined(&name) {
            return cur.err(format!("`{name}` is already defined"));
        }
        Ok(name)
    }

    fn atom_line(&mut self, cur: &mut Cursor<'_>, model: &mut Model) -> Parsed<()> {
        let name = self.declare_name(cur)?;
        let mut fields: Vec<(String, Tok, Option<String>)> = Vec::new();
        while cur.peek().is_some() {
            let key = cur.word("a field name")?;
            cur.expect('=')?;
            if cur.peek() == Some(&Tok::Sym('-')) {
                return cur.err(format!("{key} must be nonnegative"));
            }
            let value = cur.number(&key)?;
            let denom = if cur.peek() == Some(&Tok::Sym('/')) {
                cur.next();
                Some(cur.number("a denominator")?)
            } else {
                None
            };
            if fields.iter().any(|(k, _, _)| *k == key) {
                return cur.err(format!("field {key} given twice"));
            }
            fields.push((key, Tok::Num(value), denom));
        }
        let take = |key: &str| fields.iter().find(|(k, _, _)| k == key);
        let allowed: &[&str] = match self.model {
            ModelKind::Macro => &["Q", "S"],
            ModelKind::Quantum => &["dim", "len"],
        };
        if let Some((k, _, _)) = fields.iter().find(|(k, _, _)| !allowed.contains(&k.as_str())) {
            return cur.err(format!(
                "unknown field {k} for a {} atom (expected {})",
                self.model.name(),
                allowed.join(", ")
            ));
        }
        let int = |key: &str| -> Parsed<BigUint> {
            match take(key) {
                Some((_, Tok::Num(n), None)) => Ok(n.parse().expect("digits")),
                Some(_) => cur.err(format!("{key} must be an integer")),
                None => cur.err(format!("missing field {key}")),
            }
        };
        let spec = match self.model {
            ModelKind::Macro => {
                let q = int("Q")?;
                let q = u64::try_from(&q).or_else(|_| cur.err("Q is too large"))?;
                let s = match take("S") {
                    Some((_, Tok::Num(p), Some(d))) => {
                        let d: BigInt = d.parse().expect("digits");
                        if d == BigInt::from(0) {
                            return cur.err("S has a zero denominator");
                        }
                        BigRational::new(p.parse().expect("digits"), d)
                    }
                    Some(_) => return cur.err("S must be a rational written p/q"),
                    None => return cur.err("missing field S"),
                };
                AtomSpec::Macro(AtomDef::new(q, s).or_else(|e| cur.err(e.to_string()))?)
            }
            ModelKind::Quantum => {
                let dim = int("dim")?;
                let len = int("len")?;
                let len = u64::try_from(&len).or_else(|_| cur.err("len is too large"))?;
                AtomSpec::Quantum(QAtom::new(dim, len).or_else(|e| cur.err(e.to_string()))?)
            }
        };
        model.register(&name, &spec).or_else(|e| cur.err(e.to_string()))?;
        self.atoms.push((name, spec));
        Ok(())
    }

    fn line(&mut self, toks: &[Tok], line: usize, model: &mut Model) -> Parsed<()> {
        let mut cur = Cursor::new(toks, line);
        let keyword = cur.word("a keyword")?;
        match keyword.as_str() {
            "model" => {
                if !self.atoms.is_empty() || !self.states.is_empty() || !self.eidostates.is_empty() {
                    return cur.err("`model` must come before any declaration");
                }
                self.model = match cur.word("`macro` or `quantum`")?.as_str() {
                    "macro" => ModelKind::Macro,
                    "quantum" => ModelKind::Quantum,
                    other => return cur.err(format!("unknown model `{other}`")),
                };
                *model = Model::empty(self.model);
            }
            "atom" => self.atom_line(&mut cur, model)?,
            "state" => {
                let name = self.declare_name(&mut cur)?;
                cur.expect('=')?;
                let s = self.expr(&mut cur, model)?;
                self.states.push((name, s));
            }
            "eidostate" => {
                let name = self.declare_name(&mut cur)?;
                cur.expect('=')?;
                let names = self.members(&mut cur, model)?;
                self.eidostates.push((name, names));
            }
            other => return cur.err(format!("unknown keyword `{other}`")),
        }
        cur.finish()
    }
}

pub fn parse_scenario(text: &str) -> Parsed<Scenario> {
    let mut sc = Scenario::default();
    let mut model = Model::empty(sc.model);
    let mut seen_model = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let toks = tokenize(body, line)?;
        if toks.is_empty() {
            continue;
        }
        if toks[0] == Tok::Word("model".into()) {
            if seen_model {
                return Err(ParseError::new(line, "`model` given twice"));
            }
            seen_model = true;
        }
        sc.line(&toks, line, &mut model)?;
    }
    Ok(sc)
}

fn write_rational(f: &mut fmt::Formatter<'_>, x: &BigRational) -> fmt::Result {
    write!(f, "{}/{}", x.numer(), x.denom())
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model {}", self.model.name())?;
        for (name, spec) in &self.atoms {
            match spec {
                AtomSpec::Macro(d) => {
                    write!(f, "atom {name} Q={} S=", d.q)?;
                    write_rational(f, &d.s)?;
                    writeln!(f)?;
                }
                AtomSpec::Quantum(a) => writeln!(f, "atom {name} dim={} len={}", a.dim, a.len)?,
            }
        }
        for (name, s) in &self.states {
            writeln!(f, "state {name} = {s}")?;
        }
        for (name, members) in &self.eidostates {
            writeln!(f, "eidostate {name} = {{ {} }}", members.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BIT: &str = "model macro\natom r Q=0 S=0/1\nstate rr = (r + r)\neidostate Ib = { r, rr }\n";

    #[test]
    fn bit_state_scenario() {
        let sc = parse_scenario(BIT).unwrap();
        let ib = sc.eidostate("Ib").unwrap();
        assert_eq!(ib.len_usize(), Some(2));
        assert_eq!(sc.state("rr").unwrap().to_string(), "(r + r)");
    }

    #[test]
    fn half_entropy_atom() {
        let sc = parse_scenario("atom sh Q=1 S=1/2").unwrap();
        match sc.atom("sh").unwrap() {
            AtomSpec::Macro(d) => {
                assert_eq!(d.q, 1);
                assert_eq!(d.s, BigRational::new(1.into(), 2.into()));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_name_reports_its_line() {
        let err = parse_scenario("atom r Q=0 S=0/1\n\nstate bad = (r + missing)").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("missing"));
    }

    #[test]
    fn invariant_violations() {
        let err = parse_scenario("atom x Q=1 S=3/2").unwrap_err();
        assert!(err.message.contains("outside"), "{err}");
        let err = parse_scenario("model quantum\natom q dim=5 len=2").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("exceeds"), "{err}");
        let err = parse_scenario("atom x Q=1 S=0.5").unwrap_err();
        assert!(err.message.contains("p/q"), "{err}");
        let err = parse_scenario("atom x Q=1 S=-1/2").unwrap_err();
        assert!(err.message.contains("nonnegative"), "{err}");
    }

    #[test]
    fn duplicates_are_rejected() {
        let err = parse_scenario("atom r Q=0 S=0/1\nstate r = (r + r)").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("already defined"));
        let err = parse_scenario("model macro\nmodel quantum").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn whitespace_and_comments() {
        let sc = parse_scenario("  atom   a   Q = 1   S = 1 / 4   # an atom\nstate p=(a+(a+a))").unwrap();
        assert_eq!(sc.state("p").unwrap().to_string(), "(a + (a + a))");
    }

    #[test]
    fn builtins_resolve_without_declaration() {
        let sc = parse_scenario("state p = (s[1/2] + r)").unwrap();
        assert_eq!(sc.state("p").unwrap().to_string(), "(s[1/2] + r)");
        let q = parse_scenario("model quantum\nstate p = (d[3] + d[1])").unwrap();
        assert!(q.state("p").is_some());
        assert!(parse_scenario("state p = (s[3/2] + r)").is_err());
    }

    #[test]
    fn command_line_arguments() {
        let sc = parse_scenario(BIT).unwrap();
        assert_eq!(sc.parse_eidostate("Ib").unwrap().len_usize(), Some(2));
        assert_eq!(sc.parse_eidostate("{ rr, r }").unwrap(), sc.eidostate("Ib").unwrap());
        assert!(sc.parse_eidostate("(rr + r)").unwrap().is_singleton());
        assert!(sc.parse_state("Ib").is_err());
        assert_eq!(sc.parse_state("nope").unwrap_err().line, 0);
    }

    #[test]
    fn display_round_trips() {
        let text = "model quantum\natom q dim=3 len=2\natom one dim=1 len=1\nstate p = (q + (one + d[2]))\neidostate e = { p, q }\n";
        let sc = parse_scenario(text).unwrap();
        assert_eq!(sc.to_string(), text);
        assert_eq!(parse_scenario(&sc.to_string()).unwrap(), sc);
    }
}
