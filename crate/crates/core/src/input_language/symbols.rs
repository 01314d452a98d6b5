use std::collections::BTreeMap;

use super::ClassDiagram;

pub const BUILTIN_TYPES: [&str; 3] = ["int", "boolean", "string"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Class,
    Interface,
    Enum,
    Builtin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Symbol {
    pub kind: SymbolKind,
    /// Index into `ClassDiagram::types`; `None` for builtins.
    pub decl: Option<usize>,
}

/// Type names of one diagram. The first declaration of a name wins; later
/// duplicates are kept aside for the unique-names condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolTable {
    symbols: BTreeMap<String, Symbol>,
    duplicates: Vec<usize>,
}

impl SymbolTable {
    pub fn build(diagram: &ClassDiagram) -> Self {
        let mut symbols: BTreeMap<String, Symbol> = BUILTIN_TYPES
            .iter()
            .map(|b| {
                (
                    b.to_string(),
                    Symbol {
                        kind: SymbolKind::Builtin,
                        decl: None,
                    },
                )
            })
            .collect();
        let mut duplicates = Vec::new();
        for (i, t) in diagram.types.iter().enumerate() {
            if symbols.contains_key(t.name()) {
                duplicates.push(i);
            } else {
                symbols.insert(
                    t.name().to_string(),
                    Symbol {
                        kind: t.kind(),
                        decl: Some(i),
                    },
                );
            }
        }
        Self {
            symbols,
            duplicates,
        }
    }

    pub fn lookup(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get(name)
    }

    pub fn kind_of(&self, name: &str) -> Option<SymbolKind> {
        self.lookup(name).map(|s| s.kind)
    }

    /// Indices of declarations whose name was already taken.
    pub fn duplicates(&self) -> &[usize] {
        &self.duplicates
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input_language::parse_class_diagram;

    #[test]
    fn builtins_and_declared_names() {
        let d = parse_class_diagram("classdiagram D { class A { } enum E { X } class A { } }")
            .unwrap();
        let st = SymbolTable::build(&d);
        assert_eq!(st.kind_of("int"), Some(SymbolKind::Builtin));
        assert_eq!(st.kind_of("A"), Some(SymbolKind::Class));
        assert_eq!(st.lookup("A").unwrap().decl, Some(0));
        assert_eq!(st.kind_of("E"), Some(SymbolKind::Enum));
        assert_eq!(st.kind_of("Missing"), None);
        assert_eq!(st.duplicates(), &[2]);
        assert_eq!(st.len(), 5);
    }

    #[test]
    fn type_named_like_builtin_is_a_duplicate() {
        let d = parse_class_diagram("classdiagram D { class string { } }").unwrap();
        let st = SymbolTable::build(&d);
        assert_eq!(st.duplicates(), &[0]);
    }
}
