//! Context conditions: well-formedness predicates over a parsed diagram.
//!
//! The core set (CC-01..CC-05) is always active. Front-end components add
//! further conditions for a given variant; each condition is an independent
//! predicate, so the report for a union of sets is the union of reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::{ClassDiagram, SymbolKind, SymbolTable};
use crate::report::{ValidationReport, Violation};
use crate::text::Pos;

pub const CORE_ORIGIN: &str = "core";

pub struct CheckContext<'a> {
    pub diagram: &'a ClassDiagram,
    pub symbols: &'a SymbolTable,
}

/// What a condition reports for one offending element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub subjects: Vec<String>,
    pub message: String,
    pub pos: Option<Pos>,
}

impl Finding {
    pub fn new(subject: impl Into<String>, message: impl Into<String>, pos: Pos) -> Self {
        Self {
            subjects: vec![subject.into()],
            message: message.into(),
            pos: Some(pos),
        }
    }
}

pub type ConditionCheck = Arc<dyn Fn(&CheckContext<'_>) -> Vec<Finding> + Send + Sync>;

#[derive(Clone)]
pub struct ContextCondition {
    pub code: String,
    pub description: String,
    pub origin: String,
    check: ConditionCheck,
}

impl fmt::Debug for ContextCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContextCondition")
            .field("code", &self.code)
            .field("description", &self.description)
            .field("origin", &self.origin)
            .finish_non_exhaustive()
    }
}

impl ContextCondition {
    pub fn new<F>(code: &str, description: &str, origin: &str, check: F) -> Self
    where
        F: Fn(&CheckContext<'_>) -> Vec<Finding> + Send + Sync + 'static,
    {
        Self {
            code: code.to_string(),
            description: description.to_string(),
            origin: origin.to_string(),
            check: Arc::new(check),
        }
    }

    pub fn evaluate(&self, cx: &CheckContext<'_>) -> Vec<Violation> {
        (self.check)(cx)
            .into_iter()
            .map(|f| Violation {
                code: self.code.clone(),
                subjects: f.subjects,
                message: f.message,
                pos: f.pos,
            })
            .collect()
    }
}

/// Builds the symbol table and evaluates every condition, in the given
/// order. Two conditions sharing a code are reported as `CC-CODE-CLASH`.
pub fn check_context_conditions(
    diagram: &ClassDiagram,
    conditions: &[ContextCondition],
) -> ValidationReport {
    let symbols = SymbolTable::build(diagram);
    let cx = CheckContext {
        diagram,
        symbols: &symbols,
    };
    let mut report = ValidationReport::default();
    let mut origins: BTreeMap<&str, &str> = BTreeMap::new();
    for c in conditions {
        if let Some(prev) = origins.insert(&c.code, &c.origin) {
            report.push(Violation::new(
                "CC-CODE-CLASH",
                vec![prev.to_string(), c.origin.clone()],
                format!("condition code {} is contributed twice", c.code),
            ));
            continue;
        }
        report.violations.extend(c.evaluate(&cx));
    }
    report
}

pub fn core_conditions() -> Vec<ContextCondition> {
    vec![
        ContextCondition::new("CC-01", "type names are unique", CORE_ORIGIN, unique_names),
        ContextCondition::new(
            "CC-02",
            "superclass exists and is a class",
            CORE_ORIGIN,
            superclass_is_class,
        ),
        ContextCondition::new("CC-03", "no inheritance cycles", CORE_ORIGIN, no_cycles),
        ContextCondition::new(
            "CC-04",
            "attribute and return types resolve",
            CORE_ORIGIN,
            types_resolve,
        ),
        ContextCondition::new(
            "CC-05",
            "implemented names are interfaces",
            CORE_ORIGIN,
            implements_interfaces,
        ),
    ]
}

fn unique_names(cx: &CheckContext<'_>) -> Vec<Finding> {
    cx.symbols
        .duplicates()
        .iter()
        .map(|&i| {
            let t = &cx.diagram.types[i];
            Finding::new(
                t.name(),
                format!("type name {} is already declared", t.name()),
                t.pos(),
            )
        })
        .collect()
}

fn superclass_is_class(cx: &CheckContext<'_>) -> Vec<Finding> {
    cx.diagram
        .classes()
        .filter_map(|c| {
            let sup = c.superclass.as_ref()?;
            match cx.symbols.kind_of(sup) {
                Some(SymbolKind::Class) => None,
                Some(kind) => Some(Finding::new(
                    sup,
                    format!("superclass {sup} of {} is a {kind:?}, not a class", c.name),
                    c.pos,
                )),
                None => Some(Finding::new(
                    sup,
                    format!("superclass {sup} of {} is not declared", c.name),
                    c.pos,
                )),
            }
        })
        .collect()
}

fn no_cycles(cx: &CheckContext<'_>) -> Vec<Finding> {
    let parent_of = |name: &str| -> Option<&str> {
        let sym = cx.symbols.lookup(name)?;
        match &cx.diagram.types[sym.decl?] {
            super::TypeDecl::Class(c) => c.superclass.as_deref(),
            _ => None,
        }
    };
    let mut seen_cycles = BTreeSet::new();
    let mut out = Vec::new();
    for class in cx.diagram.classes() {
        let mut path: Vec<&str> = vec![&class.name];
        let mut cur: &str = &class.name;
        while let Some(next) = parent_of(cur) {
            if let Some(start) = path.iter().position(|p| *p == next) {
                let mut cycle: Vec<String> = path[start..].iter().map(|s| s.to_string()).collect();
                let min = cycle
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, n)| n.as_str())
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                cycle.rotate_left(min);
                if seen_cycles.insert(cycle.clone()) {
                    let pos = cx
                        .diagram
                        .find(&cycle[0])
                        .map(|t| t.pos())
                        .unwrap_or(class.pos);
                    let mut shown = cycle.clone();
                    shown.push(cycle[0].clone());
                    out.push(Finding {
                        message: format!("inheritance cycle {}", shown.join(" -> ")),
                        subjects: cycle,
                        pos: Some(pos),
                    });
                }
                break;
            }
            path.push(next);
            cur = next;
        }
    }
    out
}

fn types_resolve(cx: &CheckContext<'_>) -> Vec<Finding> {
    let mut out = Vec::new();
    for t in &cx.diagram.types {
        let uses: Vec<(&str, Pos, &str)> = match t {
            super::TypeDecl::Class(c) => c
                .attributes
                .iter()
                .map(|a| (a.type_name.as_str(), a.pos, a.name.as_str()))
                .collect(),
            super::TypeDecl::Interface(i) => i
                .operations
                .iter()
                .map(|o| (o.return_type.as_str(), o.pos, o.name.as_str()))
                .collect(),
            super::TypeDecl::Enum(_) => Vec::new(),
        };
        for (ty, pos, member) in uses {
            if cx.symbols.lookup(ty).is_none() {
                out.push(Finding::new(
                    ty,
                    format!("type {ty} of {}.{member} does not resolve", t.name()),
                    pos,
                ));
            }
        }
    }
    out
}

fn implements_interfaces(cx: &CheckContext<'_>) -> Vec<Finding> {
    let mut out = Vec::new();
    for c in cx.diagram.classes() {
        for name in &c.interfaces {
            if cx.symbols.kind_of(name) != Some(SymbolKind::Interface) {
                out.push(Finding::new(
                    name,
                    format!("{} implements {name}, which is not an interface", c.name),
                    c.pos,
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input_language::parse_class_diagram;

    fn check(src: &str) -> ValidationReport {
        check_context_conditions(&parse_class_diagram(src).unwrap(), &core_conditions())
    }

    #[test]
    fn clean_diagram_is_valid() {
        let r = check(
            "classdiagram S { interface N { n(): string; } class A implements N { x: int; b: B; } \
             class B extends A { } enum E { X } class C { e: E; } }",
        );
        assert!(r.valid(), "{r}");
    }

    #[test]
    fn undeclared_superclass() {
        let r = check("classdiagram S { class B extends A { } }");
        assert_eq!(r.codes(), vec!["CC-02"]);
        assert_eq!(r.violations[0].subjects, vec!["A"]);
    }

    #[test]
    fn superclass_must_be_a_class() {
        let r = check("classdiagram S { enum A { X } class B extends A { } }");
        assert_eq!(r.codes(), vec!["CC-02"]);
    }

    #[test]
    fn two_class_cycle_reported_once() {
        let r = check("classdiagram S { class A extends B { } class B extends A { } }");
        assert_eq!(r.codes(), vec!["CC-03"]);
        assert_eq!(r.violations[0].subjects, vec!["A", "B"]);
        assert!(r.violations[0].message.contains("A -> B -> A"));
    }

    #[test]
    fn self_inheritance_and_tail_into_cycle() {
        let r = check(
            "classdiagram S { class A extends A { } class C extends D { } class D extends E { } \
             class E extends D { } }",
        );
        let cycles: Vec<_> = r.violations.iter().map(|v| v.subjects.clone()).collect();
        assert_eq!(cycles, vec![vec!["A".to_string()], vec!["D".into(), "E".into()]]);
    }

    #[test]
    fn unresolved_types_and_non_interfaces() {
        let r = check(
            "classdiagram S { class A implements B { x: Nope; } class B { } \
             interface I { f(): void; } }",
        );
        assert_eq!(r.codes(), vec!["CC-04", "CC-04", "CC-05"]);
        assert_eq!(r.violations[0].subjects, vec!["Nope"]);
        assert_eq!(r.violations[1].subjects, vec!["void"]);
    }

    #[test]
    fn duplicate_type_names() {
        let r = check("classdiagram S { class A { } enum A { X } }");
        assert_eq!(r.codes(), vec!["CC-01"]);
        assert_eq!(r.violations[0].pos, Some(Pos::new(1, 30)));
    }

    #[test]
    fn code_clash_is_reported() {
        let d = parse_class_diagram("classdiagram S { }").unwrap();
        let dup = ContextCondition::new("CC-01", "again", "X", |_| Vec::new());
        let mut set = core_conditions();
        set.push(dup);
        let r = check_context_conditions(&d, &set);
        assert_eq!(r.codes(), vec!["CC-CODE-CLASH"]);
    }
}
