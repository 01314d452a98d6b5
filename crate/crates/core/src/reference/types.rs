use std::collections::BTreeSet;
use std::sync::Arc;

use super::package_line;
use crate::component::{
    Behavior, ComponentInterface, ComponentKind, ComponentLogic, Concern, ConfigOption,
    GeneratorComponent, OptionValue, Phase, VariantContext,
};
use crate::formula::Formula;
use crate::generation::{ArtifactContainer, ArtifactPlan, BoardReader, BoardView, Topic};
use crate::input_language::{ClassDecl, ClassDiagram, TypeDecl};
use crate::report::Violation;

const ID: &str = super::TYPES;

pub(super) fn provider_name(class: &str) -> String {
    format!("{class}Provider")
}

struct Types;

fn find<'d>(diagram: &'d ClassDiagram, name: &str) -> Result<&'d TypeDecl, Violation> {
    diagram.find(name).ok_or_else(|| {
        Violation::new(
            crate::generation::GEN_EMIT,
            vec![ID.to_string(), name.to_string()],
            format!("{name} is not in the diagram"),
        )
    })
}

fn class_header(c: &ClassDecl) -> String {
    let mut s = format!("class {}", c.name);
    if let Some(sup) = &c.superclass {
        s.push_str(&format!(" extends {sup}"));
    }
    if !c.interfaces.is_empty() {
        s.push_str(&format!(" implements {}", c.interfaces.join(", ")));
    }
    s.push_str(" {\n");
    s
}

fn emit_class(diagram: &ClassDiagram, c: &ClassDecl, cx: &VariantContext<'_>) -> ArtifactContainer {
    let mut out = ArtifactContainer::new(format!("{}.oo", c.name));
    let header = format!("{}{}", package_line(diagram), class_header(c));
    if c.interfaces.is_empty() {
        out.push(header, &["Class"], ID);
    } else {
        out.push(header, &["Class", "Interface"], ID);
    }
    let fields: String = c
        .attributes
        .iter()
        .map(|a| format!("  {} {};\n", a.type_name, a.name))
        .collect();
    out.push(fields, &["Class"], ID);
    if cx.flag("default_constructor") {
        out.push(format!("  {}() {{ }}\n", c.name), &["DefaultConstructor"], ID);
    }
    out.push("}\n", &["Class"], ID);
    out
}

impl ComponentLogic for Types {
    fn declare(
        &self,
        _behavior: &str,
        diagram: &ClassDiagram,
        cx: &VariantContext<'_>,
        board: &mut BoardView<'_>,
    ) -> Result<Vec<ArtifactPlan>, Violation> {
        let mut plans = Vec::new();
        let providers = cx.mode.uses_hooks() && cx.flag("provide_hooks");
        for t in &diagram.types {
            let (behavior, kind) = match t {
                TypeDecl::Class(_) => ("emit_classes", "class"),
                TypeDecl::Enum(_) if cx.flag("generate_enums") => ("emit_enums", "enum"),
                TypeDecl::Interface(_) if cx.flag("generate_interfaces") => {
                    ("emit_interfaces", "interface")
                }
                _ => continue,
            };
            let name = t.name();
            let path = format!("{name}.oo");
            board.claim(&path)?;
            board.publish(Topic::TypeGenerated, name, &[("kind", kind)])?;
            plans.push(
                ArtifactPlan::new(&path, behavior, name)
                    .input(format!("{}\n{}", diagram.name, t.canonical_text())),
            );
            if kind != "class" {
                continue;
            }
            if cx.flag("default_constructor") {
                board.publish(
                    Topic::ConstructorGenerated,
                    name,
                    &[("signature", &format!("{name}()"))],
                )?;
            }
            if providers {
                let provider = provider_name(name);
                let path = format!("{provider}.oo");
                board.claim(&path)?;
                board.publish(Topic::HookProvided, &provider, &[("method", "provide")])?;
                plans.push(
                    ArtifactPlan::new(&path, "emit_providers", name)
                        .input(format!("{}\n{name}", diagram.name)),
                );
            }
        }
        Ok(plans)
    }

    fn emit(
        &self,
        behavior: &str,
        plan: &ArtifactPlan,
        diagram: &ClassDiagram,
        cx: &VariantContext<'_>,
        _board: &BoardReader<'_>,
    ) -> Result<ArtifactContainer, Violation> {
        let decl = find(diagram, &plan.subject)?;
        let out = match (behavior, decl) {
            ("emit_classes", TypeDecl::Class(c)) => emit_class(diagram, c, cx),
            ("emit_providers", TypeDecl::Class(c)) => {
                let mut out = ArtifactContainer::new(plan.path.clone());
                out.push(
                    format!(
                        "{}interface {} {{\n  {} provide();\n}}\n",
                        package_line(diagram),
                        provider_name(&c.name),
                        c.name
                    ),
                    &[],
                    ID,
                );
                out
            }
            ("emit_interfaces", TypeDecl::Interface(i)) => {
                let mut out = ArtifactContainer::new(plan.path.clone());
                let mut text = format!("{}interface {} {{\n", package_line(diagram), i.name);
                for op in &i.operations {
                    text.push_str(&format!("  {} {}();\n", op.return_type, op.name));
                }
                text.push_str("}\n");
                out.push(text, &["Interface"], ID);
                out
            }
            ("emit_enums", TypeDecl::Enum(e)) => {
                let mut out = ArtifactContainer::new(plan.path.clone());
                let constants: Vec<String> = e.constants.iter().map(|k| format!("  {k}")).collect();
                out.push(
                    format!(
                        "{}enum {} {{\n{}\n}}\n",
                        package_line(diagram),
                        e.name,
                        constants.join(",\n")
                    ),
                    &["Enum"],
                    ID,
                );
                out
            }
            _ => {
                return Err(Violation::new(
                    crate::generation::GEN_EMIT,
                    vec![ID.to_string(), plan.path.clone()],
                    format!("{behavior} cannot emit {}", plan.subject),
                ))
            }
        };
        Ok(out)
    }
}

fn concern(id: &str, description: &str) -> Concern {
    Concern {
        id: id.to_string(),
        description: description.to_string(),
    }
}

fn formula(s: &str) -> Formula {
    Formula::parse(s).expect("constraint parses")
}

pub(super) fn component() -> GeneratorComponent {
    GeneratorComponent {
        id: ID.to_string(),
        version: "1.0.0".to_string(),
        kind: ComponentKind::BackEnd,
        realizes: ["Types", "Class", "Enum", "Interface", "DefaultConstructor"]
            .into_iter()
            .map(str::to_string)
            .collect(),
        interface: ComponentInterface {
            concerns: BTreeSet::from([
                concern("classes", "one artifact per class"),
                concern("interfaces", "one artifact per interface"),
                concern("enumerations", "one artifact per enumeration"),
                concern("default_constructors", "no-argument constructors"),
                concern("providers", "provider interfaces for deferred binding"),
            ]),
            constraints: vec![
                formula("Types.default_constructor implies DefaultConstructor"),
                formula("Types.generate_enums implies Enum"),
                formula("Types.generate_interfaces implies Interface"),
            ],
            options: vec![
                ConfigOption::flag("default_constructor", false)
                    .forced_by("DefaultConstructor", OptionValue::Flag(true)),
                ConfigOption::flag("generate_enums", false)
                    .forced_by("Enum", OptionValue::Flag(true)),
                ConfigOption::flag("generate_interfaces", false)
                    .forced_by("Interface", OptionValue::Flag(true)),
                ConfigOption::flag("provide_hooks", true),
            ],
            variation_points: Vec::new(),
            produces: BTreeSet::from([
                Topic::TypeGenerated,
                Topic::ConstructorGenerated,
                Topic::HookProvided,
                Topic::ArtifactClaimed,
            ]),
            consumes: BTreeSet::new(),
            hooks_provided: BTreeSet::from(["*Provider".to_string()]),
            hooks_required: BTreeSet::new(),
        },
        behaviors: vec![
            Behavior::new("declare_types", Phase::Declare, "Types"),
            Behavior::new("emit_classes", Phase::Emit, "Class"),
            Behavior::new("emit_enums", Phase::Emit, "Types.generate_enums"),
            Behavior::new("emit_interfaces", Phase::Emit, "Types.generate_interfaces"),
            Behavior::new("emit_providers", Phase::Emit, "Types.provide_hooks"),
        ],
        logic: Arc::new(Types),
    }
}
