//! The generator front-end: class diagrams, their symbol table and context
//! conditions.

mod cdl;
mod conditions;
mod symbols;

use std::fmt::Write;

pub use cdl::{parse_class_diagram, CdlError};
pub use conditions::{
    check_context_conditions, core_conditions, CheckContext, ConditionCheck, ContextCondition,
    Finding, CORE_ORIGIN,
};
pub use symbols::{SymbolKind, SymbolTable, BUILTIN_TYPES};

use crate::text::Pos;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDiagram {
    pub name: String,
    pub types: Vec<TypeDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub type_name: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: String,
    pub tags: Vec<String>,
    pub superclass: Option<String>,
    pub interfaces: Vec<String>,
    pub attributes: Vec<Attribute>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operation {
    pub name: String,
    pub return_type: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterfaceDecl {
    pub name: String,
    pub operations: Vec<Operation>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumDecl {
    pub name: String,
    pub constants: Vec<String>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeDecl {
    Class(ClassDecl),
    Interface(InterfaceDecl),
    Enum(EnumDecl),
}

impl TypeDecl {
    pub fn name(&self) -> &str {
        match self {
            TypeDecl::Class(c) => &c.name,
            TypeDecl::Interface(i) => &i.name,
            TypeDecl::Enum(e) => &e.name,
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            TypeDecl::Class(c) => c.pos,
            TypeDecl::Interface(i) => i.pos,
            TypeDecl::Enum(e) => e.pos,
        }
    }

    pub fn kind(&self) -> SymbolKind {
        match self {
            TypeDecl::Class(_) => SymbolKind::Class,
            TypeDecl::Interface(_) => SymbolKind::Interface,
            TypeDecl::Enum(_) => SymbolKind::Enum,
        }
    }

    /// Position-free CDL text of this declaration. Used as the canonical
    /// input element when fingerprinting generated artifacts.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        match self {
            TypeDecl::Class(c) => {
                for tag in &c.tags {
                    let _ = write!(out, "<<{tag}>> ");
                }
                let _ = write!(out, "class {}", c.name);
                if let Some(sup) = &c.superclass {
                    let _ = write!(out, " extends {sup}");
                }
                if !c.interfaces.is_empty() {
                    let _ = write!(out, " implements {}", c.interfaces.join(", "));
                }
                out.push_str(" {");
                for a in &c.attributes {
                    let _ = write!(out, " {}: {};", a.name, a.type_name);
                }
                out.push_str(" }");
            }
            TypeDecl::Interface(i) => {
                let _ = write!(out, "interface {} {{", i.name);
                for op in &i.operations {
                    let _ = write!(out, " {}(): {};", op.name, op.return_type);
                }
                out.push_str(" }");
            }
            TypeDecl::Enum(e) => {
                let _ = write!(out, "enum {} {{ {} }}", e.name, e.constants.join(", "));
            }
        }
        out
    }
}

impl ClassDecl {
    pub fn has_tag(&self, tag: &str) -> bool {
        self.tags.iter().any(|t| t == tag)
    }
}

impl ClassDiagram {
    pub fn classes(&self) -> impl Iterator<Item = &ClassDecl> {
        self.types.iter().filter_map(|t| match t {
            TypeDecl::Class(c) => Some(c),
            _ => None,
        })
    }

    pub fn interfaces(&self) -> impl Iterator<Item = &InterfaceDecl> {
        self.types.iter().filter_map(|t| match t {
            TypeDecl::Interface(i) => Some(i),
            _ => None,
        })
    }

    pub fn enums(&self) -> impl Iterator<Item = &EnumDecl> {
        self.types.iter().filter_map(|t| match t {
            TypeDecl::Enum(e) => Some(e),
            _ => None,
        })
    }

    pub fn find(&self, name: &str) -> Option<&TypeDecl> {
        self.types.iter().find(|t| t.name() == name)
    }

    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes().find(|c| c.name == name)
    }

    /// Pretty CDL text; parsing it yields the same diagram up to positions.
    pub fn to_cdl(&self) -> String {
        let mut out = format!("classdiagram {} {{\n", self.name);
        for t in &self.types {
            match t {
                TypeDecl::Class(c) => {
                    out.push_str("  ");
                    for tag in &c.tags {
                        let _ = write!(out, "<<{tag}>> ");
                    }
                    let _ = write!(out, "class {}", c.name);
                    if let Some(sup) = &c.superclass {
                        let _ = write!(out, " extends {sup}");
                    }
                    if !c.interfaces.is_empty() {
                        let _ = write!(out, " implements {}", c.interfaces.join(", "));
                    }
                    out.push_str(" {\n");
                    for a in &c.attributes {
                        let _ = writeln!(out, "    {}: {};", a.name, a.type_name);
                    }
                    out.push_str("  }\n");
                }
                TypeDecl::Interface(i) => {
                    let _ = writeln!(out, "  interface {} {{", i.name);
                    for op in &i.operations {
                        let _ = writeln!(out, "    {}(): {};", op.name, op.return_type);
                    }
                    out.push_str("  }\n");
                }
                TypeDecl::Enum(e) => {
                    let _ = writeln!(out, "  enum {} {{ {} }}", e.name, e.constants.join(", "));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}
