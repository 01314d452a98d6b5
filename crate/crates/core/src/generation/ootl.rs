//! Syntax gate for the object-oriented target language (OOTL).
//!
//! ```text
//! unit     := "package" IDENT ";" typedecl
//! typedecl := classd | ifaced | enumd
//! classd   := "class" IDENT ["extends" IDENT] ["implements" IDENT {"," IDENT}] "{" {member} "}"
//! member   := type IDENT ";"
//!           | IDENT "(" [params] ")" block
//!           | type IDENT "(" [params] ")" (block | ";")
//! ifaced   := "interface" IDENT "{" { type IDENT "(" [params] ")" ";" } "}"
//! enumd    := "enum" IDENT "{" IDENT {"," IDENT} "}"
//! params   := type IDENT {"," type IDENT}
//! block    := "{" {stmt} "}"
//! stmt     := type IDENT "=" expr ";" | lval "=" expr ";" | "return" [expr] ";" | expr ";"
//! expr     := "new" IDENT "(" ")" | "this" | lval | lval "(" [expr {"," expr}] ")"
//! lval     := IDENT {"." IDENT}
//! type     := "int" | "boolean" | "string" | "void" | IDENT
//! ```
//!
//! Keywords are reserved and cannot be used as identifiers.

use super::{ArtifactContainer, SyntaxStatus};
use crate::text::{unexpected, Scanner, SyntaxError, Token};

const SYMBOLS: &[&str] = &["{", "}", "(", ")", ";", ",", ".", "="];

const KEYWORDS: &[&str] = &[
    "package",
    "class",
    "extends",
    "implements",
    "interface",
    "enum",
    "return",
    "new",
    "this",
    "int",
    "boolean",
    "string",
    "void",
];

const BUILTIN_TYPES: &[&str] = &["int", "boolean", "string", "void"];

/// Parses the container's content and records the outcome on it.
pub fn validate_syntax(container: &mut ArtifactContainer) -> SyntaxStatus {
    let status = match check_ootl(&container.content()) {
        Ok(()) => SyntaxStatus::Valid,
        Err(e) => SyntaxStatus::Invalid {
            message: e.message,
            line: e.pos.line,
            column: e.pos.column,
        },
    };
    container.syntax_status = status.clone();
    status
}

pub fn check_ootl(source: &str) -> Result<(), SyntaxError> {
    let mut p = Parser {
        sc: Scanner::new(source, SYMBOLS),
    };
    p.unit()
}

struct Parser<'a> {
    sc: Scanner<'a>,
}

impl Parser<'_> {
    fn ident(&mut self, what: &str) -> Result<(), SyntaxError> {
        let (tok, pos) = self.sc.next()?;
        match tok {
            Token::Ident(s) if !KEYWORDS.contains(&s) => Ok(()),
            other => Err(unexpected(pos, what, &other)),
        }
    }

    fn is_type_start(tok: &Token<'_>) -> bool {
        matches!(tok, Token::Ident(s) if BUILTIN_TYPES.contains(s) || !KEYWORDS.contains(s))
    }

    fn ty(&mut self) -> Result<(), SyntaxError> {
        let (tok, pos) = self.sc.next()?;
        if Self::is_type_start(&tok) {
            Ok(())
        } else {
            Err(unexpected(pos, "a type", &tok))
        }
    }

    fn unit(&mut self) -> Result<(), SyntaxError> {
        self.sc.expect_keyword("package")?;
        self.ident("package name")?;
        self.sc.expect_sym(";")?;
        let (tok, pos) = self.sc.next()?;
        match tok {
            Token::Ident("class") => self.class_body()?,
            Token::Ident("interface") => self.interface_body()?,
            Token::Ident("enum") => self.enum_body()?,
            other => return Err(unexpected(pos, "`class`, `interface` or `enum`", &other)),
        }
        self.sc.expect_eof()
    }

    fn class_body(&mut self) -> Result<(), SyntaxError> {
        self.ident("class name")?;
        if self.sc.eat_keyword("extends")? {
            self.ident("superclass name")?;
        }
        if self.sc.eat_keyword("implements")? {
            self.ident("interface name")?;
            while self.sc.eat_sym(",")? {
                self.ident("interface name")?;
            }
        }
        self.sc.expect_sym("{")?;
        while !self.sc.eat_sym("}")? {
            self.member()?;
        }
        Ok(())
    }

    fn member(&mut self) -> Result<(), SyntaxError> {
        if self.sc.peek_nth(1)? == Token::Sym("(") {
            // constructor
            self.ident("constructor name")?;
            self.params()?;
            return self.block();
        }
        self.ty()?;
        self.ident("member name")?;
        if self.sc.eat_sym(";")? {
            return Ok(());
        }
        self.params()?;
        if self.sc.eat_sym(";")? {
            return Ok(());
        }
        self.block()
    }

    fn params(&mut self) -> Result<(), SyntaxError> {
        self.sc.expect_sym("(")?;
        if self.sc.eat_sym(")")? {
            return Ok(());
        }
        loop {
            self.ty()?;
            self.ident("parameter name")?;
            if !self.sc.eat_sym(",")? {
                break;
            }
        }
        self.sc.expect_sym(")")?;
        Ok(())
    }

    fn interface_body(&mut self) -> Result<(), SyntaxError> {
        self.ident("interface name")?;
        self.sc.expect_sym("{")?;
        while !self.sc.eat_sym("}")? {
            self.ty()?;
            self.ident("operation name")?;
            self.params()?;
            self.sc.expect_sym(";")?;
        }
        Ok(())
    }

    fn enum_body(&mut self) -> Result<(), SyntaxError> {
        self.ident("enum name")?;
        self.sc.expect_sym("{")?;
        loop {
            self.ident("enum constant")?;
            if !self.sc.eat_sym(",")? {
                break;
            }
        }
        self.sc.expect_sym("}")?;
        Ok(())
    }

    fn block(&mut self) -> Result<(), SyntaxError> {
        self.sc.expect_sym("{")?;
        while !self.sc.eat_sym("}")? {
            self.stmt()?;
        }
        Ok(())
    }

    fn stmt(&mut self) -> Result<(), SyntaxError> {
        if self.sc.eat_keyword("return")? {
            if !self.sc.eat_sym(";")? {
                self.expr()?;
                self.sc.expect_sym(";")?;
            }
            return Ok(());
        }
        let first = self.sc.peek_nth(0)?;
        let second = self.sc.peek_nth(1)?;
        let is_decl = Self::is_type_start(&first)
            && matches!(second, Token::Ident(s) if !KEYWORDS.contains(&s));
        if is_decl {
            self.ty()?;
            self.ident("variable name")?;
            self.sc.expect_sym("=")?;
            self.expr()?;
            return self.sc.expect_sym(";").map(drop);
        }
        if matches!(first, Token::Ident(s) if !KEYWORDS.contains(&s)) {
            self.lval()?;
            if self.sc.eat_sym("=")? {
                self.expr()?;
            } else if self.sc.peek_is_sym("(") {
                self.args()?;
            }
            return self.sc.expect_sym(";").map(drop);
        }
        self.expr()?;
        self.sc.expect_sym(";").map(drop)
    }

    fn lval(&mut self) -> Result<(), SyntaxError> {
        self.ident("identifier")?;
        while self.sc.eat_sym(".")? {
            self.ident("member name")?;
        }
        Ok(())
    }

    fn args(&mut self) -> Result<(), SyntaxError> {
        self.sc.expect_sym("(")?;
        if self.sc.eat_sym(")")? {
            return Ok(());
        }
        loop {
            self.expr()?;
            if !self.sc.eat_sym(",")? {
                break;
            }
        }
        self.sc.expect_sym(")").map(drop)
    }

    fn expr(&mut self) -> Result<(), SyntaxError> {
        if self.sc.eat_keyword("new")? {
            self.ident("class name")?;
            self.sc.expect_sym("(")?;
            self.sc.expect_sym(")")?;
            return Ok(());
        }
        if self.sc.eat_keyword("this")? {
            return Ok(());
        }
        self.lval()?;
        if self.sc.peek_is_sym("(") {
            self.args()?;
        }
        Ok(())
    }
}
