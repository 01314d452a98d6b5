use std::collections::BTreeSet;
use std::sync::Arc;

use crate::component::{
    Behavior, BindingMode, ComponentInterface, ComponentKind, ComponentLogic, Concern,
    GeneratorComponent, Phase, VariantContext,
};
use crate::input_language::{core_conditions, ContextCondition, Finding};

pub const FG_ENUM: &str = "FG-ENUM";
pub const FG_INTERFACE: &str = "FG-INTERFACE";
pub const FG_TAG_NOBUILDER: &str = "FG-TAG-NOBUILDER";
pub const FG_TAG_EXTERNAL: &str = "FG-TAG-EXTERNAL";
pub const FG_TAG_UNKNOWN: &str = "FG-TAG-UNKNOWN";

pub const KNOWN_TAGS: [&str; 2] = ["nobuilder", "external"];

const ORIGIN: &str = super::FEATURE_GUARD;

fn front_end(id: &str, concern: (&str, &str), behavior: &str, logic: impl ComponentLogic + 'static) -> GeneratorComponent {
    GeneratorComponent {
        id: id.to_string(),
        version: "1.0.0".to_string(),
        kind: ComponentKind::FrontEnd,
        realizes: BTreeSet::new(),
        interface: ComponentInterface {
            concerns: BTreeSet::from([Concern {
                id: concern.0.to_string(),
                description: concern.1.to_string(),
            }]),
            ..ComponentInterface::default()
        },
        behaviors: vec![Behavior::new(behavior, Phase::Restrict, "true")],
        logic: Arc::new(logic),
    }
}

struct Core;

impl ComponentLogic for Core {
    fn conditions(&self, _behavior: &str, _cx: &VariantContext<'_>) -> Vec<ContextCondition> {
        core_conditions()
    }
}

pub(super) fn core_front_end() -> GeneratorComponent {
    front_end(
        super::CORE_FRONT_END,
        ("well_formedness", "well-formedness of class diagrams"),
        "core_conditions",
        Core,
    )
}

struct Guard;

impl ComponentLogic for Guard {
    fn conditions(&self, _behavior: &str, cx: &VariantContext<'_>) -> Vec<ContextCondition> {
        let mut out = Vec::new();
        if !cx.selected("Enum") {
            out.push(ContextCondition::new(
                FG_ENUM,
                "no enumerations without Enum",
                ORIGIN,
                |cx| {
                    cx.diagram
                        .enums()
                        .map(|e| {
                            Finding::new(&e.name, format!("enum {} needs feature Enum", e.name), e.pos)
                        })
                        .collect()
                },
            ));
        }
        if !cx.selected("Interface") {
            out.push(ContextCondition::new(
                FG_INTERFACE,
                "no interfaces or implements clauses without Interface",
                ORIGIN,
                |cx| {
                    let decls = cx.diagram.interfaces().map(|i| {
                        Finding::new(&i.name, format!("interface {} needs feature Interface", i.name), i.pos)
                    });
                    let clauses = cx.diagram.classes().filter(|c| !c.interfaces.is_empty()).map(|c| {
                        Finding::new(
                            &c.name,
                            format!("implements clause of {} needs feature Interface", c.name),
                            c.pos,
                        )
                    });
                    decls.chain(clauses).collect()
                },
            ));
        }
        if !cx.selected("Builder") {
            out.push(tag_condition(
                FG_TAG_NOBUILDER,
                "<<nobuilder>> needs Builder",
                "nobuilder",
                "feature Builder",
            ));
        }
        if cx.mode != BindingMode::Hybrid {
            out.push(tag_condition(
                FG_TAG_EXTERNAL,
                "<<external>> needs hybrid binding",
                "external",
                "hybrid binding mode",
            ));
        }
        out.push(ContextCondition::new(
            FG_TAG_UNKNOWN,
            "only known tags",
            ORIGIN,
            |cx| {
                cx.diagram
                    .classes()
                    .flat_map(|c| {
                        c.tags
                            .iter()
                            .filter(|t| !KNOWN_TAGS.contains(&t.as_str()))
                            .map(move |t| {
                                Finding::new(&c.name, format!("unknown tag <<{t}>> on {}", c.name), c.pos)
                            })
                    })
                    .collect()
            },
        ));
        out
    }
}

fn tag_condition(code: &str, description: &str, tag: &'static str, needs: &'static str) -> ContextCondition {
    ContextCondition::new(code, description, ORIGIN, move |cx| {
        cx.diagram
            .classes()
            .filter(|c| c.has_tag(tag))
            .map(|c| Finding::new(&c.name, format!("<<{tag}>> on {} needs {needs}", c.name), c.pos))
            .collect()
    })
}

pub(super) fn feature_guard() -> GeneratorComponent {
    front_end(
        super::FEATURE_GUARD,
        ("feature_restrictions", "input restrictions for deselected features"),
        "feature_guard",
        Guard,
    )
}
