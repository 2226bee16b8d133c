//! Problem-file reader.
//!
//! ```text
//! schema:
//!   L[i] -> f(f(X[i+1], Z[i]), L[i+1]);
//! problem:
//!   f(X[4], L[0]) = f(Y[3], Y[0]);
//! # expect = cycle
//! ```

use std::collections::BTreeMap;

use thiserror::Error;

use crate::schema::{Schema, SchemaClass};
use crate::solver::SchematicProblem;
use crate::term::{Equation, Symbol, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: function {symbol} has arity {found} here but arity {expected} at {first_line}:{first_col}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
        line: usize,
        col: usize,
        first_line: usize,
        first_col: usize,
    },
    #[error("schema is {class}; only uniform schemas can be solved")]
    NotUniform { class: SchemaClass },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemFile {
    pub schema: Schema,
    pub equations: Vec<Equation>,
    pub directives: BTreeMap<String, String>,
}

impl ProblemFile {
    pub fn problem(&self) -> SchematicProblem {
        SchematicProblem::new(self.equations.iter().cloned(), self.schema.clone())
    }

    /// The problem, or a diagnostic if the schema is not uniform.
    pub fn uniform_problem(&self) -> Result<SchematicProblem, ParseError> {
        let class = self.schema.classify();
        if !class.is_uniform() {
            return Err(ParseError::NotUniform { class });
        }
        Ok(self.problem())
    }

    pub fn expect(&self) -> Option<&str> {
        self.directives.get("expect").map(String::as_str)
    }
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        arities: BTreeMap::new(),
    };
    p.file()
}

/// A single term with absolute indices, e.g. `f(X[0], a)`.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        arities: BTreeMap::new(),
    };
    let t = p.term(IndexMode::Absolute)?;
    p.expect_end()?;
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(usize),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Arrow,
    Eq,
    Plus,
    Directive(String, String),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Directive(..) => "directive".into(),
            Tok::End => "end of input".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Plus => "`+`".into(),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    let err = |line, col, msg: String| ParseError::Syntax { line, col, msg };
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        let tok = match c {
            c if c.is_whitespace() => {
                bump(&mut chars);
                continue;
            }
            '#' => {
                bump(&mut chars);
                let mut rest = String::new();
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    rest.push(c);
                    bump(&mut chars);
                }
                let Some((k, v)) = rest.split_once('=') else {
                    return Err(err(l0, c0, "directive must have the form `# key = value`".into()));
                };
                let key = k.trim();
                if key.is_empty() {
                    return Err(err(l0, c0, "directive key is empty".into()));
                }
                Tok::Directive(key.to_string(), v.trim().to_string())
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' || c == '@' {
                        s.push(c);
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                Tok::Ident(s)
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        s.push(c);
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                let n = s
                    .parse()
                    .map_err(|_| err(l0, c0, format!("number `{s}` is too large")))?;
                Tok::Num(n)
            }
            '-' => {
                bump(&mut chars);
                if chars.peek() != Some(&'>') {
                    return Err(err(l0, c0, "expected `->`".into()));
                }
                bump(&mut chars);
                Tok::Arrow
            }
            _ => {
                bump(&mut chars);
                match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    ':' => Tok::Colon,
                    '=' => Tok::Eq,
                    '+' => Tok::Plus,
                    _ => return Err(err(l0, c0, format!("unexpected character `{c}`"))),
                }
            }
        };
        out.push(Spanned {
            tok,
            line: l0,
            col: c0,
        });
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        col,
    });
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum IndexMode {
    /// `X[3]`
    Absolute,
    /// `X[i]`, `X[i+2]`
    Relative,
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    arities: BTreeMap<String, (usize, usize, usize)>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn here(&self) -> (usize, usize) {
        let s = &self.tokens[self.pos];
        (s.line, s.col)
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn next(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            self.error(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            ))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            self.error(format!("unexpected {}", self.peek().describe()))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == kw && *self.peek_at(1) == Tok::Colon => {
                self.next();
                self.next();
                Ok(())
            }
            other => self.error(format!("expected `{kw}:`, found {}", other.describe())),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw) && *self.peek_at(1) == Tok::Colon
    }

    fn file(&mut self) -> Result<ProblemFile, ParseError> {
        self.keyword("schema")?;
        let mut rules: BTreeMap<Symbol, Term> = BTreeMap::new();
        loop {
            let (sym, base) = self.rule()?;
            if rules.contains_key(&*sym) {
                return self.error(format!("second rule for {sym}"));
            }
            rules.insert(sym, base);
            if self.at_keyword("problem") {
                break;
            }
        }
        self.keyword("problem")?;
        let mut equations = Vec::new();
        loop {
            let lhs = self.term(IndexMode::Absolute)?;
            self.expect(Tok::Eq)?;
            let rhs = self.term(IndexMode::Absolute)?;
            self.expect(Tok::Semi)?;
            equations.push(Equation::new(lhs, rhs));
            if matches!(self.peek(), Tok::Directive(..) | Tok::End) {
                break;
            }
        }
        let mut directives = BTreeMap::new();
        while let Tok::Directive(k, v) = self.peek().clone() {
            self.next();
            directives.insert(k, v);
        }
        self.expect_end()?;
        Ok(ProblemFile {
            schema: Schema::new(rules),
            equations,
            directives,
        })
    }

    fn rule(&mut self) -> Result<(Symbol, Term), ParseError> {
        let sym = match self.peek().clone() {
            Tok::Ident(s) if is_sym(&s) => {
                self.next();
                s
            }
            other => {
                return self.error(format!(
                    "expected a rule `SYM[i] -> term;`, found {}",
                    other.describe()
                ))
            }
        };
        self.expect(Tok::LBracket)?;
        match self.next() {
            Tok::Ident(s) if s == "i" => {}
            _ => {
                self.pos -= 1;
                return self.error("the left side of a rule must be indexed by `i`");
            }
        }
        self.expect(Tok::RBracket)?;
        self.expect(Tok::Arrow)?;
        let base = self.term(IndexMode::Relative)?;
        self.expect(Tok::Semi)?;
        Ok((sym.into(), base))
    }

    fn term(&mut self, mode: IndexMode) -> Result<Term, ParseError> {
        let (line, col) = self.here();
        let name = match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                s
            }
            other => return self.error(format!("expected a term, found {}", other.describe())),
        };
        if is_sym(&name) {
            let idx = self.index(mode)?;
            return Ok(Term::Var(Var::new(name, idx)));
        }
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.next();
            loop {
                args.push(self.term(mode)?);
                match self.next() {
                    Tok::Comma => continue,
                    Tok::RParen => break,
                    other => {
                        self.pos -= 1;
                        return self.error(format!(
                            "expected `,` or `)`, found {}",
                            other.describe()
                        ));
                    }
                }
            }
        }
        match self.arities.get(&name) {
            Some(&(expected, first_line, first_col)) if expected != args.len() => {
                return Err(ParseError::Arity {
                    symbol: name,
                    expected,
                    found: args.len(),
                    line,
                    col,
                    first_line,
                    first_col,
                })
            }
            Some(_) => {}
            None => {
                self.arities.insert(name.clone(), (args.len(), line, col));
            }
        }
        Ok(Term::app(name, args))
    }

    fn index(&mut self, mode: IndexMode) -> Result<usize, ParseError> {
        self.expect(Tok::LBracket)?;
        let idx = match (mode, self.peek().clone()) {
            (IndexMode::Absolute, Tok::Num(n)) => {
                self.next();
                n
            }
            (IndexMode::Relative, Tok::Ident(s)) if s == "i" => {
                self.next();
                if *self.peek() == Tok::Plus {
                    self.next();
                    match self.next() {
                        Tok::Num(n) => n,
                        _ => {
                            self.pos -= 1;
                            return self.error("expected a natural number after `i+`");
                        }
                    }
                } else {
                    0
                }
            }
            (IndexMode::Absolute, _) => {
                return self.error("expected a natural-number index")
            }
            (IndexMode::Relative, _) => {
                return self.error("rule variables must be indexed as `i` or `i+c`")
            }
        };
        self.expect(Tok::RBracket)?;
        Ok(idx)
    }
}

fn is_sym(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_file() {
        let f = parse_problem(
            "schema: L[i] -> h(h(X[i], h(X[i+1], X[i])), L[i+1]); problem: L[0] = h(Y[0], h(Y[1], Y[0]));",
        )
        .unwrap();
        assert_eq!(
            f.schema.base("L").unwrap(),
            &parse_term("h(h(X[0],h(X[1],X[0])),L[1])").unwrap()
        );
        assert_eq!(f.equations.len(), 1);
        assert_eq!(f.equations[0].lhs, Term::var("L", 0));
    }

    #[test]
    fn missing_semicolon() {
        let e = parse_problem("schema: L[i] -> f(L[i+1]) problem: L[0] = a;").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { line: 1, col: 27, .. }), "{e}");
    }

    #[test]
    fn arity_mismatch() {
        let e = parse_problem("schema: L[i] -> f(X[i]); problem: L[0] = f(a, b);").unwrap_err();
        assert!(matches!(e, ParseError::Arity { expected: 1, found: 2, .. }), "{e}");
    }

    #[test]
    fn absolute_index_in_rule_rejected() {
        assert!(parse_problem("schema: L[i] -> f(X[0]); problem: L[0] = a;").is_err());
        assert!(parse_problem("schema: L[0] -> f(X[i]); problem: L[0] = a;").is_err());
    }

    #[test]
    fn relative_index_in_problem_rejected() {
        assert!(parse_problem("schema: L[i] -> f(X[i]); problem: L[i] = a;").is_err());
    }

    #[test]
    fn negative_offset_rejected() {
        let e = parse_problem("schema: L[i] -> f(X[i-1]); problem: L[0] = a;").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { .. }));
    }

    #[test]
    fn directives_and_lines() {
        let f = parse_problem(
            "schema:\n  L[i] -> f(X[i], L[i+1]);\nproblem:\n  L[0] = Y[0];\n# expect = cycle\n# note = demo run\n",
        )
        .unwrap();
        assert_eq!(f.expect(), Some("cycle"));
        assert_eq!(f.directives["note"], "demo run");
        let e = parse_problem("schema:\n  L[i] -> f(X[i];\nproblem: L[0] = a;").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { line: 2, .. }), "{e}");
    }

    #[test]
    fn non_uniform_diagnostic() {
        let f = parse_problem("schema: L[i] -> h(L[i+4], L[i+1]); problem: L[0] = a;").unwrap();
        assert_eq!(
            f.uniform_problem().unwrap_err(),
            ParseError::NotUniform {
                class: SchemaClass::Simple
            }
        );
    }
}
