use std::collections::BTreeSet;

use thiserror::Error;

use super::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    Next,
    Finally,
    Globally,
    Until,
    LParen,
    RParen,
    OpenCoalition,
    CloseCoalition,
    Comma,
    True,
    False,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Next => "`X`".into(),
            Tok::Finally => "`F`".into(),
            Tok::Globally => "`G`".into(),
            Tok::Until => "`U`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::OpenCoalition => "`<<`".into(),
            Tok::CloseCoalition => "`>>`".into(),
            Tok::Comma => "`,`".into(),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Lexed {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1usize, 1usize);
    let mut i = 0;
    let err = |line, column, message: String| ParseError {
        line,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        let mut push = |tok: Tok, width: usize, i: &mut usize, column: &mut usize| {
            out.push(Lexed {
                tok,
                line: l0,
                column: c0,
            });
            *i += width;
            *column += width;
        };
        match c {
            '\n' => {
                line += 1;
                column = 1;
                i += 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                column += 1;
            }
            '!' | '¬' | '~' => push(Tok::Not, 1, &mut i, &mut column),
            '&' | '∧' => {
                let w = if chars.get(i + 1) == Some(&'&') { 2 } else { 1 };
                push(Tok::And, w, &mut i, &mut column)
            }
            '|' | '∨' => {
                let w = if chars.get(i + 1) == Some(&'|') { 2 } else { 1 };
                push(Tok::Or, w, &mut i, &mut column)
            }
            '→' => push(Tok::Implies, 1, &mut i, &mut column),
            '-' if chars.get(i + 1) == Some(&'>') => push(Tok::Implies, 2, &mut i, &mut column),
            '(' => push(Tok::LParen, 1, &mut i, &mut column),
            ')' => push(Tok::RParen, 1, &mut i, &mut column),
            ',' => push(Tok::Comma, 1, &mut i, &mut column),
            '⟨' if chars.get(i + 1) == Some(&'⟨') => {
                push(Tok::OpenCoalition, 2, &mut i, &mut column)
            }
            '⟩' if chars.get(i + 1) == Some(&'⟩') => {
                push(Tok::CloseCoalition, 2, &mut i, &mut column)
            }
            '<' if chars.get(i + 1) == Some(&'<') => {
                push(Tok::OpenCoalition, 2, &mut i, &mut column)
            }
            '>' if chars.get(i + 1) == Some(&'>') => {
                push(Tok::CloseCoalition, 2, &mut i, &mut column)
            }
            '⊤' => push(Tok::True, 1, &mut i, &mut column),
            '⊥' => push(Tok::False, 1, &mut i, &mut column),
            '◯' => push(Tok::Next, 1, &mut i, &mut column),
            '◇' => push(Tok::Finally, 1, &mut i, &mut column),
            '□' => push(Tok::Globally, 1, &mut i, &mut column),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                column += i - start;
                let at = |tok| Lexed {
                    tok,
                    line: l0,
                    column: c0,
                };
                match word.as_str() {
                    "true" => out.push(at(Tok::True)),
                    "false" => out.push(at(Tok::False)),
                    "U" => out.push(at(Tok::Until)),
                    // Stacked unary operators such as `GF` or `XX`.
                    w if w.chars().all(|c| matches!(c, 'X' | 'F' | 'G')) => {
                        for (k, op) in w.chars().enumerate() {
                            let tok = match op {
                                'X' => Tok::Next,
                                'F' => Tok::Finally,
                                _ => Tok::Globally,
                            };
                            out.push(Lexed {
                                tok,
                                line: l0,
                                column: c0 + k,
                            });
                        }
                    }
                    _ => out.push(at(Tok::Ident(word))),
                }
            }
            other => return Err(err(l0, c0, format!("unknown operator `{other}`"))),
        }
    }
    out.push(Lexed {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: String) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            column: t.column,
            message,
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            )))
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.until()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.until()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if *self.peek() == Tok::Until {
            self.bump();
            let rhs = self.until()?;
            return Ok(Formula::until(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Next => {
                self.bump();
                Ok(Formula::next(self.unary()?))
            }
            Tok::Finally => {
                self.bump();
                Ok(Formula::finally(self.unary()?))
            }
            Tok::Globally => {
                self.bump();
                Ok(Formula::globally(self.unary()?))
            }
            Tok::OpenCoalition => {
                self.bump();
                let agents = self.coalition()?;
                // The quantifier scopes as far to the right as possible.
                let body = self.implication()?;
                Ok(Formula::Strategic(agents, Box::new(body)))
            }
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(name) => {
                if !name.starts_with(|c: char| c.is_ascii_lowercase() || c == '_') {
                    return Err(self.error(format!(
                        "`{name}` is not an atom; atoms start with a lowercase letter"
                    )));
                }
                self.bump();
                Ok(Formula::Atom(name))
            }
            Tok::LParen => {
                self.bump();
                let f = self.implication()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            other => Err(self.error(format!("unexpected {}", other.describe()))),
        }
    }

    fn coalition(&mut self) -> Result<BTreeSet<String>, ParseError> {
        let mut agents = BTreeSet::new();
        if *self.peek() == Tok::CloseCoalition {
            self.bump();
            return Ok(agents);
        }
        loop {
            match self.bump() {
                Tok::Ident(a) => {
                    agents.insert(a);
                }
                // Single-letter agent names collide with operator keywords.
                Tok::Next => {
                    agents.insert("X".into());
                }
                Tok::Finally => {
                    agents.insert("F".into());
                }
                Tok::Globally => {
                    agents.insert("G".into());
                }
                Tok::Until => {
                    agents.insert("U".into());
                }
                other => {
                    self.pos -= 1;
                    return Err(
                        self.error(format!("expected agent name, found {}", other.describe()))
                    );
                }
            }
            match self.bump() {
                Tok::Comma => continue,
                Tok::CloseCoalition => return Ok(agents),
                other => {
                    self.pos -= 1;
                    return Err(
                        self.error(format!("expected `,` or `>>`, found {}", other.describe()))
                    );
                }
            }
        }
    }
}

/// Parses the textual formula syntax.
///
/// Precedence from tightest: `! X F G`, `U` (right associative), `&`, `|`,
/// `->` (right associative). `<<A,B>> ψ` extends as far right as possible,
/// so `<<A>> p & q` quantifies the conjunction.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.implication()?;
    if *p.peek() != Tok::End {
        return Err(p.error(format!("unexpected {}", p.peek().describe())));
    }
    Ok(f)
}
