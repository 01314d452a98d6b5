//! Propositional formulas over feature ids and component option references,
//! used for interface constraints and behavior applicability.
//!
//! ```text
//! formula := disj [ "implies" formula ]
//! disj    := conj { "or" conj }
//! conj    := unary { "and" unary }
//! unary   := "not" unary | "(" formula ")" | "true" | "false" | atom
//! atom    := IDENT                         feature
//!          | IDENT "." IDENT [ "=" IDENT ]  option (flag, or equality test)
//! ```

use std::collections::BTreeSet;
use std::fmt;

use crate::text::{unexpected, Scanner, SyntaxError, Token};

const SYMBOLS: &[&str] = &["(", ")", ".", "="];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(bool),
    Feature(String),
    Option { component: String, name: String },
    OptionEq { component: String, name: String, value: String },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

/// Truth values for atoms.
pub trait Valuation {
    fn feature(&self, id: &str) -> bool;
    /// Textual value of an option (`"true"`/`"false"` for flags).
    fn option(&self, component: &str, name: &str) -> Option<String>;
}

impl Formula {
    pub fn parse(source: &str) -> Result<Formula, SyntaxError> {
        let mut sc = Scanner::new(source, SYMBOLS);
        let f = parse_implies(&mut sc)?;
        sc.expect_eof()?;
        Ok(f)
    }

    pub fn feature(id: &str) -> Formula {
        Formula::Feature(id.to_string())
    }

    pub fn implies(self, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(rhs))
    }

    pub fn eval(&self, v: &dyn Valuation) -> bool {
        match self {
            Formula::Const(b) => *b,
            Formula::Feature(id) => v.feature(id),
            Formula::Option { component, name } => {
                v.option(component, name).as_deref() == Some("true")
            }
            Formula::OptionEq {
                component,
                name,
                value,
            } => v.option(component, name).as_deref() == Some(value.as_str()),
            Formula::Not(f) => !f.eval(v),
            Formula::And(a, b) => a.eval(v) && b.eval(v),
            Formula::Or(a, b) => a.eval(v) || b.eval(v),
            Formula::Implies(a, b) => !a.eval(v) || b.eval(v),
        }
    }

    pub fn features(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Feature(id) = f {
                out.insert(id.as_str());
            }
        });
        out
    }

    /// `(component, option)` pairs referenced by the formula.
    pub fn options(&self) -> BTreeSet<(&str, &str)> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Option { component, name } | Formula::OptionEq { component, name, .. } => {
                out.insert((component.as_str(), name.as_str()));
            }
            _ => {}
        });
        out
    }

    fn walk<'a>(&'a self, visit: &mut dyn FnMut(&'a Formula)) {
        visit(self);
        match self {
            Formula::Not(f) => f.walk(visit),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
            _ => {}
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            _ => 4,
        }
    }
}

fn parse_implies(sc: &mut Scanner<'_>) -> Result<Formula, SyntaxError> {
    let lhs = parse_or(sc)?;
    if sc.eat_keyword("implies")? {
        let rhs = parse_implies(sc)?;
        return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
    }
    Ok(lhs)
}

fn parse_or(sc: &mut Scanner<'_>) -> Result<Formula, SyntaxError> {
    let mut f = parse_and(sc)?;
    while sc.eat_keyword("or")? {
        f = Formula::Or(Box::new(f), Box::new(parse_and(sc)?));
    }
    Ok(f)
}

fn parse_and(sc: &mut Scanner<'_>) -> Result<Formula, SyntaxError> {
    let mut f = parse_unary(sc)?;
    while sc.eat_keyword("and")? {
        f = Formula::And(Box::new(f), Box::new(parse_unary(sc)?));
    }
    Ok(f)
}

fn parse_unary(sc: &mut Scanner<'_>) -> Result<Formula, SyntaxError> {
    let (tok, pos) = sc.next()?;
    match tok {
        Token::Ident("not") => Ok(Formula::Not(Box::new(parse_unary(sc)?))),
        Token::Ident("true") => Ok(Formula::Const(true)),
        Token::Ident("false") => Ok(Formula::Const(false)),
        Token::Sym("(") => {
            let f = parse_implies(sc)?;
            sc.expect_sym(")")?;
            Ok(f)
        }
        Token::Ident(kw @ ("and" | "or" | "implies")) => {
            Err(unexpected(pos, "an operand", &Token::Ident(kw)))
        }
        Token::Ident(id) => {
            if !sc.eat_sym(".")? {
                return Ok(Formula::Feature(id.to_string()));
            }
            let (name, _) = sc.expect_ident("option name")?;
            if sc.eat_sym("=")? {
                let (value, _) = sc.expect_ident("option value")?;
                return Ok(Formula::OptionEq {
                    component: id.to_string(),
                    name: name.to_string(),
                    value: value.to_string(),
                });
            }
            Ok(Formula::Option {
                component: id.to_string(),
                name: name.to_string(),
            })
        }
        other => Err(unexpected(pos, "an operand", &other)),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |f: &mut fmt::Formatter<'_>, child: &Formula, min: u8| {
            if child.precedence() < min {
                write!(f, "({child})")
            } else {
                write!(f, "{child}")
            }
        };
        match self {
            Formula::Const(b) => write!(f, "{b}"),
            Formula::Feature(id) => f.write_str(id),
            Formula::Option { component, name } => write!(f, "{component}.{name}"),
            Formula::OptionEq {
                component,
                name,
                value,
            } => write!(f, "{component}.{name} = {value}"),
            Formula::Not(inner) => {
                f.write_str("not ")?;
                sub(f, inner, 4)
            }
            Formula::And(a, b) => {
                sub(f, a, 3)?;
                f.write_str(" and ")?;
                sub(f, b, 4)
            }
            Formula::Or(a, b) => {
                sub(f, a, 2)?;
                f.write_str(" or ")?;
                sub(f, b, 3)
            }
            Formula::Implies(a, b) => {
                sub(f, a, 2)?;
                f.write_str(" implies ")?;
                sub(f, b, 1)
            }
        }
    }
}
