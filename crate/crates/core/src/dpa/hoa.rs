//! Parser for the Hanoi Omega-Automata format, version 1.

use super::AutomatonError;

/// Boolean expression over atomic-proposition indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelExpr {
    True,
    False,
    Ap(usize),
    Alias(String),
    Not(Box<LabelExpr>),
    And(Box<LabelExpr>, Box<LabelExpr>),
    Or(Box<LabelExpr>, Box<LabelExpr>),
}

/// Acceptance condition over acceptance-set indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AccCond {
    True,
    False,
    /// `Inf(k)`, or `Inf(!k)` when the flag is set.
    Inf(usize, bool),
    Fin(usize, bool),
    And(Box<AccCond>, Box<AccCond>),
    Or(Box<AccCond>, Box<AccCond>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoaEdge {
    pub label: Option<LabelExpr>,
    pub target: usize,
    pub marks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoaState {
    pub id: usize,
    pub label: Option<LabelExpr>,
    pub name: Option<String>,
    pub marks: Vec<usize>,
    pub edges: Vec<HoaEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HoaAutomaton {
    pub version: String,
    pub states: Option<usize>,
    pub start: Vec<usize>,
    pub ap: Vec<String>,
    pub aliases: Vec<(String, LabelExpr)>,
    pub acc_sets: usize,
    pub acceptance: Option<AccCond>,
    pub acc_name: Option<Vec<String>>,
    pub properties: Vec<String>,
    pub tool: Vec<String>,
    pub name: Option<String>,
    pub body: Vec<HoaState>,
}

impl LabelExpr {
    /// Evaluates under a letter (bit `i` = AP `i`), resolving aliases.
    pub fn eval(
        &self,
        letter: u32,
        aliases: &[(String, LabelExpr)],
    ) -> Result<bool, AutomatonError> {
        Ok(match self {
            LabelExpr::True => true,
            LabelExpr::False => false,
            LabelExpr::Ap(i) => letter >> i & 1 == 1,
            LabelExpr::Alias(a) => {
                let (_, e) = aliases
                    .iter()
                    .find(|(n, _)| n == a)
                    .ok_or_else(|| AutomatonError::hoa(None, format!("undefined alias @{a}")))?;
                e.eval(letter, aliases)?
            }
            LabelExpr::Not(e) => !e.eval(letter, aliases)?,
            LabelExpr::And(a, b) => a.eval(letter, aliases)? && b.eval(letter, aliases)?,
            LabelExpr::Or(a, b) => a.eval(letter, aliases)? || b.eval(letter, aliases)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Header(String),
    Ident(String),
    Str(String),
    Int(usize),
    Alias(String),
    Sym(char),
    Body,
    End,
    Abort,
    Eof,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, AutomatonError> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line = 1;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            let mut depth = 1;
            i += 2;
            while i < chars.len() && depth > 0 {
                if chars[i] == '/' && chars.get(i + 1) == Some(&'*') {
                    depth += 1;
                    i += 2;
                } else if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    depth -= 1;
                    i += 2;
                } else {
                    if chars[i] == '\n' {
                        line += 1;
                    }
                    i += 1;
                }
            }
            if depth > 0 {
                return Err(AutomatonError::hoa(Some(line), "unterminated comment"));
            }
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err(AutomatonError::hoa(Some(line), "unterminated string")),
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => {
                        if let Some(&e) = chars.get(i + 1) {
                            s.push(e);
                        }
                        i += 2;
                    }
                    Some(&ch) => {
                        if ch == '\n' {
                            line += 1;
                        }
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            out.push((Tok::Str(s), line));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let n = s.parse().map_err(|_| {
                AutomatonError::hoa(Some(line), format!("integer out of range: {s}"))
            })?;
            out.push((Tok::Int(n), line));
        } else if c == '@' {
            let start = i + 1;
            i += 1;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '-')
            {
                i += 1;
            }
            out.push((Tok::Alias(chars[start..i].iter().collect()), line));
        } else if c == '-' && chars[i..].starts_with(&['-', '-']) {
            let rest: String = chars[i..chars.len().min(i + 9)].iter().collect();
            let (tok, len) = if rest.starts_with("--BODY--") {
                (Tok::Body, 8)
            } else if rest.starts_with("--END--") {
                (Tok::End, 7)
            } else if rest.starts_with("--ABORT--") {
                (Tok::Abort, 9)
            } else {
                return Err(AutomatonError::hoa(Some(line), "unexpected `--`"));
            };
            out.push((tok, line));
            i += len;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '-')
            {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if chars.get(i) == Some(&':') {
                i += 1;
                out.push((Tok::Header(word), line));
            } else {
                out.push((Tok::Ident(word), line));
            }
        } else if "[](){}!&|".contains(c) {
            out.push((Tok::Sym(c), line));
            i += 1;
        } else {
            return Err(AutomatonError::hoa(
                Some(line),
                format!("unexpected character `{c}`"),
            ));
        }
    }
    out.push((Tok::Eof, line));
    Ok(out)
}

struct P {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl P {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn line(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, AutomatonError> {
        Err(AutomatonError::hoa(Some(self.line()), msg))
    }

    fn sym(&mut self, c: char) -> Result<(), AutomatonError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{c}`, found {:?}", self.peek()))
        }
    }

    fn int(&mut self) -> Result<usize, AutomatonError> {
        match self.bump() {
            Tok::Int(n) => Ok(n),
            other => {
                self.pos -= 1;
                self.err(format!("expected integer, found {other:?}"))
            }
        }
    }

    fn label_or(&mut self) -> Result<LabelExpr, AutomatonError> {
        let mut lhs = self.label_and()?;
        while *self.peek() == Tok::Sym('|') {
            self.bump();
            lhs = LabelExpr::Or(Box::new(lhs), Box::new(self.label_and()?));
        }
        Ok(lhs)
    }

    fn label_and(&mut self) -> Result<LabelExpr, AutomatonError> {
        let mut lhs = self.label_atom()?;
        while *self.peek() == Tok::Sym('&') {
            self.bump();
            lhs = LabelExpr::And(Box::new(lhs), Box::new(self.label_atom()?));
        }
        Ok(lhs)
    }

    fn label_atom(&mut self) -> Result<LabelExpr, AutomatonError> {
        match self.bump() {
            Tok::Sym('!') => Ok(LabelExpr::Not(Box::new(self.label_atom()?))),
            Tok::Sym('(') => {
                let e = self.label_or()?;
                self.sym(')')?;
                Ok(e)
            }
            Tok::Ident(t) if t == "t" => Ok(LabelExpr::True),
            Tok::Ident(f) if f == "f" => Ok(LabelExpr::False),
            Tok::Int(n) => Ok(LabelExpr::Ap(n)),
            Tok::Alias(a) => Ok(LabelExpr::Alias(a)),
            other => {
                self.pos -= 1;
                self.err(format!("unexpected {other:?} in label"))
            }
        }
    }

    fn acc_or(&mut self) -> Result<AccCond, AutomatonError> {
        let mut lhs = self.acc_and()?;
        while *self.peek() == Tok::Sym('|') {
            self.bump();
            lhs = AccCond::Or(Box::new(lhs), Box::new(self.acc_and()?));
        }
        Ok(lhs)
    }

    fn acc_and(&mut self) -> Result<AccCond, AutomatonError> {
        let mut lhs = self.acc_atom()?;
        while *self.peek() == Tok::Sym('&') {
            self.bump();
            lhs = AccCond::And(Box::new(lhs), Box::new(self.acc_atom()?));
        }
        Ok(lhs)
    }

    fn acc_atom(&mut self) -> Result<AccCond, AutomatonError> {
        match self.bump() {
            Tok::Sym('(') => {
                let e = self.acc_or()?;
                self.sym(')')?;
                Ok(e)
            }
            Tok::Ident(t) if t == "t" => Ok(AccCond::True),
            Tok::Ident(f) if f == "f" => Ok(AccCond::False),
            Tok::Ident(kind) if kind == "Inf" || kind == "Fin" => {
                self.sym('(')?;
                let neg = *self.peek() == Tok::Sym('!');
                if neg {
                    self.bump();
                }
                let n = self.int()?;
                self.sym(')')?;
                Ok(if kind == "Inf" {
                    AccCond::Inf(n, neg)
                } else {
                    AccCond::Fin(n, neg)
                })
            }
            other => {
                self.pos -= 1;
                self.err(format!("unexpected {other:?} in acceptance condition"))
            }
        }
    }

    fn marks(&mut self) -> Result<Vec<usize>, AutomatonError> {
        let mut out = Vec::new();
        if *self.peek() == Tok::Sym('{') {
            self.bump();
            while let Tok::Int(n) = *self.peek() {
                self.bump();
                out.push(n);
            }
            self.sym('}')?;
        }
        Ok(out)
    }

    fn state_conj(&mut self) -> Result<Vec<usize>, AutomatonError> {
        let mut v = vec![self.int()?];
        while *self.peek() == Tok::Sym('&') {
            self.bump();
            v.push(self.int()?);
        }
        Ok(v)
    }

    fn optional_label(&mut self) -> Result<Option<LabelExpr>, AutomatonError> {
        if *self.peek() == Tok::Sym('[') {
            self.bump();
            let e = self.label_or()?;
            self.sym(']')?;
            Ok(Some(e))
        } else {
            Ok(None)
        }
    }

    fn header_values(&mut self) -> Vec<String> {
        let mut v = Vec::new();
        loop {
            match self.peek() {
                Tok::Ident(s) | Tok::Str(s) => v.push(s.clone()),
                Tok::Int(n) => v.push(n.to_string()),
                _ => return v,
            }
            self.bump();
        }
    }
}

/// Parses a single HOA automaton.
pub fn parse_hoa(text: &str) -> Result<HoaAutomaton, AutomatonError> {
    let mut p = P {
        toks: lex(text)?,
        pos: 0,
    };
    let mut h = HoaAutomaton::default();
    match p.bump() {
        Tok::Header(h0) if h0 == "HOA" => match p.bump() {
            Tok::Ident(v) => h.version = v,
            _ => return p.err("expected format version after `HOA:`"),
        },
        _ => return Err(AutomatonError::hoa(Some(1), "missing `HOA:` header")),
    }
    loop {
        match p.bump() {
            Tok::Body => break,
            Tok::Eof => return p.err("missing `--BODY--`"),
            Tok::Abort => return p.err("automaton aborted"),
            Tok::Header(name) => match name.as_str() {
                "States" => h.states = Some(p.int()?),
                "Start" => {
                    let conj = p.state_conj()?;
                    if conj.len() != 1 {
                        return p.err("alternating initial states are not supported");
                    }
                    h.start.push(conj[0]);
                }
                "AP" => {
                    let n = p.int()?;
                    for _ in 0..n {
                        match p.bump() {
                            Tok::Str(s) => h.ap.push(s),
                            _ => return p.err("expected quoted atomic proposition"),
                        }
                    }
                }
                "Alias" => {
                    let name = match p.bump() {
                        Tok::Alias(a) => a,
                        _ => return p.err("expected @alias name"),
                    };
                    let e = p.label_or()?;
                    h.aliases.push((name, e));
                }
                "Acceptance" => {
                    h.acc_sets = p.int()?;
                    h.acceptance = Some(p.acc_or()?);
                }
                "acc-name" => h.acc_name = Some(p.header_values()),
                "properties" => h.properties.extend(p.header_values()),
                "tool" => h.tool = p.header_values(),
                "name" => h.name = p.header_values().into_iter().next(),
                _ => {
                    p.header_values();
                }
            },
            other => {
                p.pos -= 1;
                return p.err(format!("unexpected {other:?} in header"));
            }
        }
    }
    if h.acceptance.is_none() {
        return p.err("missing `Acceptance:` header");
    }
    loop {
        match p.bump() {
            Tok::End => break,
            Tok::Abort => return p.err("automaton aborted"),
            Tok::Eof => return p.err("missing `--END--`"),
            Tok::Header(s) if s == "State" => {
                let label = p.optional_label()?;
                let id = p.int()?;
                let name = match p.peek() {
                    Tok::Str(s) => {
                        let s = s.clone();
                        p.bump();
                        Some(s)
                    }
                    _ => None,
                };
                let marks = p.marks()?;
                let mut edges = Vec::new();
                while matches!(p.peek(), Tok::Sym('[') | Tok::Int(_)) {
                    let label = p.optional_label()?;
                    let targets = p.state_conj()?;
                    if targets.len() != 1 {
                        return p.err("alternating transitions are not supported");
                    }
                    let marks = p.marks()?;
                    edges.push(HoaEdge {
                        label,
                        target: targets[0],
                        marks,
                    });
                }
                h.body.push(HoaState {
                    id,
                    label,
                    name,
                    marks,
                    edges,
                });
            }
            other => {
                p.pos -= 1;
                return p.err(format!("unexpected {other:?} in body"));
            }
        }
    }
    let declared = h.states;
    let max_id = h
        .body
        .iter()
        .map(|s| s.id)
        .chain(h.start.iter().copied())
        .max();
    if let (Some(n), Some(m)) = (declared, max_id) {
        if m >= n {
            return Err(AutomatonError::hoa(
                None,
                format!("state {m} out of range for `States: {n}`"),
            ));
        }
    }
    for s in &h.body {
        for e in &s.edges {
            if declared.is_some_and(|n| e.target >= n) {
                return Err(AutomatonError::hoa(
                    None,
                    format!("edge target {} out of range", e.target),
                ));
            }
        }
    }
    Ok(h)
}
