//! CDL, the class-diagram input language.
//!
//! ```text
//! diagram   := "classdiagram" IDENT "{" { element } "}"
//! element   := classdecl | ifacedecl | enumdecl
//! classdecl := { tag } "class" IDENT [ "extends" IDENT ]
//!              [ "implements" IDENT { "," IDENT } ] "{" { attr } "}"
//! tag       := "<<" IDENT ">>"
//! attr      := IDENT ":" type ";"
//! ifacedecl := "interface" IDENT "{" { opsig } "}"
//! opsig     := IDENT "(" ")" ":" type ";"
//! enumdecl  := "enum" IDENT "{" IDENT { "," IDENT } "}"
//! ```

use super::{Attribute, ClassDecl, ClassDiagram, EnumDecl, InterfaceDecl, Operation, TypeDecl};
use crate::text::{unexpected, Pos, Scanner, SyntaxError, Token};

const SYMBOLS: &[&str] = &["<<", ">>", "{", "}", "(", ")", ":", ";", ","];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CdlError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("duplicate attribute `{attribute}` in class `{class}` at {pos}")]
    DuplicateAttribute {
        class: String,
        attribute: String,
        pos: Pos,
    },
    #[error("duplicate constant `{constant}` in enum `{name}` at {pos}")]
    DuplicateConstant {
        name: String,
        constant: String,
        pos: Pos,
    },
}

impl CdlError {
    pub fn pos(&self) -> Pos {
        match self {
            CdlError::Syntax(e) => e.pos,
            CdlError::DuplicateAttribute { pos, .. } | CdlError::DuplicateConstant { pos, .. } => {
                *pos
            }
        }
    }
}

pub fn parse_class_diagram(source: &str) -> Result<ClassDiagram, CdlError> {
    let mut sc = Scanner::new(source, SYMBOLS);
    sc.expect_keyword("classdiagram")?;
    let (name, _) = sc.expect_ident("diagram name")?;
    sc.expect_sym("{")?;
    let mut types = Vec::new();
    while !sc.eat_sym("}")? {
        types.push(parse_element(&mut sc)?);
    }
    sc.expect_eof()?;
    Ok(ClassDiagram {
        name: name.to_string(),
        types,
    })
}

fn parse_element(sc: &mut Scanner<'_>) -> Result<TypeDecl, CdlError> {
    let start = sc.pos();
    let mut tags = Vec::new();
    while sc.eat_sym("<<")? {
        tags.push(sc.expect_ident("tag name")?.0.to_string());
        sc.expect_sym(">>")?;
    }
    let (tok, pos) = sc.next()?;
    match tok {
        Token::Ident("class") => parse_class(sc, tags, start).map(TypeDecl::Class),
        Token::Ident("interface") if tags.is_empty() => parse_interface(sc, pos),
        Token::Ident("enum") if tags.is_empty() => parse_enum(sc, pos),
        other if tags.is_empty() => Err(unexpected(pos, "`class`, `interface` or `enum`", &other).into()),
        other => Err(unexpected(pos, "`class` after tags", &other).into()),
    }
}

fn parse_class(sc: &mut Scanner<'_>, tags: Vec<String>, pos: Pos) -> Result<ClassDecl, CdlError> {
    let (name, _) = sc.expect_ident("class name")?;
    let superclass = if sc.eat_keyword("extends")? {
        Some(sc.expect_ident("superclass name")?.0.to_string())
    } else {
        None
    };
    let mut interfaces = Vec::new();
    if sc.eat_keyword("implements")? {
        interfaces.push(sc.expect_ident("interface name")?.0.to_string());
        while sc.eat_sym(",")? {
            interfaces.push(sc.expect_ident("interface name")?.0.to_string());
        }
    }
    sc.expect_sym("{")?;
    let mut attributes: Vec<Attribute> = Vec::new();
    while !sc.eat_sym("}")? {
        let (attr, apos) = sc.expect_ident("attribute name or `}`")?;
        sc.expect_sym(":")?;
        let (ty, _) = sc.expect_ident("type")?;
        sc.expect_sym(";")?;
        if attributes.iter().any(|a| a.name == attr) {
            return Err(CdlError::DuplicateAttribute {
                class: name.to_string(),
                attribute: attr.to_string(),
                pos: apos,
            });
        }
        attributes.push(Attribute {
            name: attr.to_string(),
            type_name: ty.to_string(),
            pos: apos,
        });
    }
    Ok(ClassDecl {
        name: name.to_string(),
        tags,
        superclass,
        interfaces,
        attributes,
        pos,
    })
}

fn parse_interface(sc: &mut Scanner<'_>, pos: Pos) -> Result<TypeDecl, CdlError> {
    let (name, _) = sc.expect_ident("interface name")?;
    sc.expect_sym("{")?;
    let mut operations = Vec::new();
    while !sc.eat_sym("}")? {
        let (op, opos) = sc.expect_ident("operation name or `}`")?;
        sc.expect_sym("(")?;
        sc.expect_sym(")")?;
        sc.expect_sym(":")?;
        let (ty, _) = sc.expect_ident("return type")?;
        sc.expect_sym(";")?;
        operations.push(Operation {
            name: op.to_string(),
            return_type: ty.to_string(),
            pos: opos,
        });
    }
    Ok(TypeDecl::Interface(InterfaceDecl {
        name: name.to_string(),
        operations,
        pos,
    }))
}

fn parse_enum(sc: &mut Scanner<'_>, pos: Pos) -> Result<TypeDecl, CdlError> {
    let (name, _) = sc.expect_ident("enum name")?;
    sc.expect_sym("{")?;
    let mut constants: Vec<String> = Vec::new();
    loop {
        let (c, cpos) = sc.expect_ident("enum constant")?;
        if constants.iter().any(|k| k == c) {
            return Err(CdlError::DuplicateConstant {
                name: name.to_string(),
                constant: c.to_string(),
                pos: cpos,
            });
        }
        constants.push(c.to_string());
        if !sc.eat_sym(",")? {
            break;
        }
    }
    sc.expect_sym("}")?;
    Ok(TypeDecl::Enum(EnumDecl {
        name: name.to_string(),
        constants,
        pos,
    }))
}
