//! Recursive-descent parser for the concrete formula syntax.
//!
//! ```text
//! formula  := ("forall" | "exists") ident "." formula | implies
//! implies  := disj ("->" formula)?
//! disj     := conj ("|" conj)*
//! conj     := unary ("&" unary)*
//! unary    := "!" unary | quantified | "(" formula ")" | atom
//! atom     := term ("=" | "!=") term | R "(" terms ")"
//! term     := ident | "@" ident | f "(" terms ")"
//! ```
//!
//! A quantifier body extends as far right as possible. Bare identifiers are
//! bound variables, declared free variables, or nullary function symbols.

use thiserror::Error;

use super::formula::{Formula, Quantifier, Term};
use crate::structure::Signature;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Expected { expected: &'static str, found: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{name}` expects {expected} argument(s), got {got}")]
    ArityMismatch { name: String, expected: usize, got: usize },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("variable `{0}` is already bound on this path")]
    Shadowed(String),
    #[error("`{0}` is a relation symbol and cannot be used as a term")]
    RelationAsTerm(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Named(String),
    LParen,
    RParen,
    Comma,
    Dot,
    And,
    Or,
    Implies,
    Bang,
    Eq,
    Neq,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Named(s) => format!("`@{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Neq => "`!=`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let ident_end = |mut j: usize| {
        while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
            j += 1;
        }
        j
    };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'=' => Tok::Eq,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Implies
            }
            b'!' if bytes.get(i + 1) == Some(&b'=') => {
                i += 1;
                Tok::Neq
            }
            b'!' => Tok::Bang,
            b'@' => {
                let end = ident_end(i + 1);
                if end == i + 1 || bytes[i + 1].is_ascii_digit() {
                    return Err(ParseError { kind: ParseErrorKind::UnexpectedChar('@'), position: i });
                }
                let name = text[i + 1..end].to_string();
                i = end;
                out.push((Tok::Named(name), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let end = ident_end(i);
                let name = text[i..end].to_string();
                i = end;
                out.push((Tok::Ident(name), start));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError { kind: ParseErrorKind::UnexpectedChar(ch), position: i });
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    sig: &'a Signature,
    bound: Vec<String>,
    free: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { kind, position: self.offset() }
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(ParseErrorKind::Expected { expected, found: self.peek().describe() }))
        }
    }

    fn quantifier_keyword(&self) -> Option<Quantifier> {
        match self.peek() {
            Tok::Ident(s) if s == "forall" => Some(Quantifier::Forall),
            Tok::Ident(s) if s == "exists" => Some(Quantifier::Exists),
            _ => None,
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        if self.quantifier_keyword().is_some() {
            return self.quantified();
        }
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::or(Formula::not(lhs), rhs));
        }
        Ok(lhs)
    }

    fn quantified(&mut self) -> Result<Formula, ParseError> {
        let q = self.quantifier_keyword().expect("caller checked");
        self.bump();
        let at = self.offset();
        let var = match self.bump() {
            Tok::Ident(v) if v != "forall" && v != "exists" => v,
            other => {
                return Err(ParseError {
                    kind: ParseErrorKind::Expected { expected: "a variable", found: other.describe() },
                    position: at,
                })
            }
        };
        if self.bound.contains(&var) || self.free.contains(&var) {
            return Err(ParseError { kind: ParseErrorKind::Shadowed(var), position: at });
        }
        self.expect(Tok::Dot, "`.`")?;
        self.bound.push(var.clone());
        let body = self.formula();
        self.bound.pop();
        Ok(Formula::Quant(q, var, Box::new(body?)))
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.quantifier_keyword().is_some() {
            return self.quantified();
        }
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        if let Tok::Ident(name) = self.peek().clone() {
            if let Some(ri) = self.sig.relation_index(&name) {
                let at = self.offset();
                self.bump();
                if *self.peek() != Tok::LParen {
                    return Err(ParseError { kind: ParseErrorKind::RelationAsTerm(name), position: at });
                }
                let args = self.arguments()?;
                let arity = self.sig.relations()[ri].arity;
                if args.len() != arity {
                    return Err(ParseError {
                        kind: ParseErrorKind::ArityMismatch { name, expected: arity, got: args.len() },
                        position: at,
                    });
                }
                return Ok(Formula::Rel(name, args));
            }
        }
        let lhs = self.term()?;
        match self.peek() {
            Tok::Eq => {
                self.bump();
                Ok(Formula::Eq(lhs, self.term()?))
            }
            Tok::Neq => {
                self.bump();
                Ok(Formula::neq(lhs, self.term()?))
            }
            other => Err(self.error(ParseErrorKind::Expected { expected: "`=` or `!=`", found: other.describe() })),
        }
    }

    fn arguments(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        if *self.peek() == Tok::RParen {
            self.bump();
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RParen => {
                    self.bump();
                    return Ok(args);
                }
                other => {
                    return Err(self.error(ParseErrorKind::Expected { expected: "`,` or `)`", found: other.describe() }))
                }
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Named(c) => Ok(Term::Const(c)),
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    if self.sig.relation_index(&name).is_some() {
                        return Err(ParseError { kind: ParseErrorKind::RelationAsTerm(name), position: at });
                    }
                    let Some(fi) = self.sig.function_index(&name) else {
                        return Err(ParseError { kind: ParseErrorKind::UnknownSymbol(name), position: at });
                    };
                    let args = self.arguments()?;
                    let arity = self.sig.functions()[fi].arity;
                    if args.len() != arity {
                        return Err(ParseError {
                            kind: ParseErrorKind::ArityMismatch { name, expected: arity, got: args.len() },
                            position: at,
                        });
                    }
                    return Ok(Term::App(name, args));
                }
                if self.bound.contains(&name) || self.free.contains(&name) {
                    return Ok(Term::Var(name));
                }
                match self.sig.function_index(&name) {
                    Some(fi) if self.sig.functions()[fi].arity == 0 => Ok(Term::App(name, vec![])),
                    Some(fi) => Err(ParseError {
                        kind: ParseErrorKind::ArityMismatch { name, expected: self.sig.functions()[fi].arity, got: 0 },
                        position: at,
                    }),
                    None if self.sig.relation_index(&name).is_some() => {
                        Err(ParseError { kind: ParseErrorKind::RelationAsTerm(name), position: at })
                    }
                    None => Err(ParseError { kind: ParseErrorKind::UnboundVariable(name), position: at }),
                }
            }
            other => Err(ParseError {
                kind: ParseErrorKind::Expected { expected: "a term", found: other.describe() },
                position: at,
            }),
        }
    }
}

/// Parses a sentence (no free variables) over `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    parse_formula_with_free(text, sig, &[])
}

/// Parses a formula whose free variables must be among `free`.
pub fn parse_formula_with_free(text: &str, sig: &Signature, free: &[String]) -> Result<Formula, ParseError> {
    let mut parser = Parser { tokens: tokenize(text)?, pos: 0, sig, bound: Vec::new(), free };
    let f = parser.formula()?;
    if *parser.peek() != Tok::End {
        return Err(
            parser.error(ParseErrorKind::Expected { expected: "end of input", found: parser.peek().describe() })
        );
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Symbol;

    fn order_sig() -> Signature {
        Signature::new(vec![], vec![Symbol::new("le", 2), Symbol::new("E", 1)]).unwrap()
    }

    fn group_sig() -> Signature {
        Signature::new(vec![Symbol::new("add", 2), Symbol::new("zero", 0)], vec![]).unwrap()
    }

    #[test]
    fn parses_the_even_top_sentence() {
        let f = parse_formula("exists x. (E(x) & forall y. le(y,x))", &order_sig()).unwrap();
        let expected = Formula::exists(
            "x",
            Formula::and(
                Formula::rel("E", vec![Term::var("x")]),
                Formula::forall("y", Formula::rel("le", vec![Term::var("y"), Term::var("x")])),
            ),
        );
        assert_eq!(f, expected);
        assert_eq!(f.quantifier_rank(), 2);
    }

    #[test]
    fn reflexivity() {
        let f = parse_formula("forall x. x = x", &Signature::empty()).unwrap();
        assert_eq!(f, Formula::forall("x", Formula::eq(Term::var("x"), Term::var("x"))));
    }

    #[test]
    fn unknown_symbol_is_reported() {
        let err = parse_formula("exists x. P(x, x)", &order_sig()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownSymbol("P".into()));
        assert_eq!(err.position, 10);
    }

    #[test]
    fn distinct_error_kinds() {
        let sig = order_sig();
        assert!(matches!(
            parse_formula("exists x. le(x)", &sig).unwrap_err().kind,
            ParseErrorKind::ArityMismatch { .. }
        ));
        assert_eq!(
            parse_formula("exists x. le(x, y)", &sig).unwrap_err().kind,
            ParseErrorKind::UnboundVariable("y".into())
        );
        assert!(matches!(parse_formula("exists x. (x = ", &sig).unwrap_err().kind, ParseErrorKind::Expected { .. }));
        assert_eq!(
            parse_formula("exists x. exists x. x = x", &sig).unwrap_err().kind,
            ParseErrorKind::Shadowed("x".into())
        );
        assert_eq!(
            parse_formula("x # y", &sig).unwrap_err(),
            ParseError { kind: ParseErrorKind::UnexpectedChar('#'), position: 2 }
        );
    }

    #[test]
    fn implication_is_desugared() {
        let sig = order_sig();
        let f = parse_formula("forall x. E(x) -> le(x, x)", &sig).unwrap();
        let g = parse_formula("forall x. !E(x) | le(x, x)", &sig).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn terms_and_constants() {
        let sig = group_sig();
        let f = parse_formula("forall x. add(x, x) = zero", &sig).unwrap();
        let g = parse_formula("forall x. add(x, x) = zero()", &sig).unwrap();
        assert_eq!(f, g);
        let h = parse_formula("add(@a, zero()) != @b", &sig).unwrap();
        assert_eq!(h.constants().len(), 2);
        assert!(h.is_sentence());
    }

    #[test]
    fn free_variables_must_be_declared() {
        let sig = order_sig();
        let free = vec!["x".to_string(), "y".to_string()];
        let f = parse_formula_with_free("le(x, y)", &sig, &free).unwrap();
        assert_eq!(f.free_variables().len(), 2);
    }

    #[test]
    fn printed_form_parses_back() {
        let sig = order_sig();
        for text in [
            "exists x. (E(x) & forall y. le(y,x))",
            "(exists x. E(x)) & (exists y. E(y))",
            "!(forall x. E(x)) | exists y. !E(y) & le(y, y)",
            "forall x. forall y. !(x = y) | (le(x, y) | le(y, x))",
            "exists x. E(x) & (exists y. le(x, y)) & E(x)",
        ] {
            let f = parse_formula(text, &sig).unwrap();
            let printed = f.to_string();
            assert_eq!(parse_formula(&printed, &sig).unwrap(), f, "{printed}");
        }
    }
}
