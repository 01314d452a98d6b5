use std::collections::BTreeSet;
use std::sync::Arc;

use super::package_line;
use crate::component::{
    Behavior, ComponentInterface, ComponentKind, ComponentLogic, Concern, GeneratorComponent,
    Phase, VariantContext,
};
use crate::formula::Formula;
use crate::generation::{ArtifactContainer, ArtifactPlan, BoardReader, BoardView, Topic, GEN_EMIT};
use crate::input_language::{ClassDiagram, TypeDecl};
use crate::report::Violation;

const ID: &str = super::BUILDER;

fn builder_name(class: &str) -> String {
    format!("{class}Builder")
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

struct Builder;

impl ComponentLogic for Builder {
    fn declare(
        &self,
        _behavior: &str,
        diagram: &ClassDiagram,
        _cx: &VariantContext<'_>,
        board: &mut BoardView<'_>,
    ) -> Result<Vec<ArtifactPlan>, Violation> {
        let mut plans = Vec::new();
        for c in diagram.classes().filter(|c| !c.has_tag("nobuilder")) {
            let builder = builder_name(&c.name);
            let path = format!("{builder}.oo");
            board.claim(&path)?;
            for a in &c.attributes {
                let method = format!("with{}", capitalize(&a.name));
                board.publish(Topic::MethodGenerated, &format!("{builder}.{method}"), &[])?;
            }
            board.publish(Topic::MethodGenerated, &format!("{builder}.build"), &[])?;
            plans.push(
                ArtifactPlan::new(&path, "emit_builders", &c.name)
                    .input(format!(
                        "{}\n{}",
                        diagram.name,
                        TypeDecl::Class(c.clone()).canonical_text()
                    ))
                    .depends_on(Topic::TypeGenerated, Some(&c.name))
                    .depends_on(Topic::ConstructorGenerated, Some(&c.name)),
            );
        }
        Ok(plans)
    }

    fn emit(
        &self,
        _behavior: &str,
        plan: &ArtifactPlan,
        diagram: &ClassDiagram,
        _cx: &VariantContext<'_>,
        board: &BoardReader<'_>,
    ) -> Result<ArtifactContainer, Violation> {
        let name = &plan.subject;
        let missing = |what: &str| {
            Violation::new(
                GEN_EMIT,
                vec![ID.to_string(), name.clone()],
                format!("builder for {name} needs {what}"),
            )
        };
        let class = diagram.class(name).ok_or_else(|| missing("the class"))?;
        board
            .find(Topic::ConstructorGenerated, name)?
            .ok_or_else(|| missing("a generated no-argument constructor"))?;
        let builder = builder_name(name);
        let mut text = format!(
            "{}class {builder} {{\n  {name} result;\n  {builder}() {{ result = new {name}(); }}\n",
            package_line(diagram)
        );
        for a in &class.attributes {
            text.push_str(&format!(
                "  {builder} with{}({} v) {{ result.{} = v; return this; }}\n",
                capitalize(&a.name),
                a.type_name,
                a.name
            ));
        }
        text.push_str(&format!("  {name} build() {{ return result; }}\n}}\n"));
        let mut out = ArtifactContainer::new(plan.path.clone());
        out.push(text, &["Builder"], ID);
        Ok(out)
    }
}

pub(super) fn component() -> GeneratorComponent {
    GeneratorComponent {
        id: ID.to_string(),
        version: "1.0.0".to_string(),
        kind: ComponentKind::BackEnd,
        realizes: BTreeSet::from(["Builder".to_string()]),
        interface: ComponentInterface {
            concerns: BTreeSet::from([Concern {
                id: "builders".to_string(),
                description: "one builder class per class".to_string(),
            }]),
            constraints: vec![Formula::parse("Builder implies DefaultConstructor").expect("parses")],
            produces: BTreeSet::from([Topic::ArtifactClaimed, Topic::MethodGenerated]),
            consumes: BTreeSet::from([Topic::TypeGenerated, Topic::ConstructorGenerated]),
            ..ComponentInterface::default()
        },
        behaviors: vec![
            Behavior::new("declare_builders", Phase::Declare, "Builder"),
            Behavior::new("emit_builders", Phase::Emit, "Builder"),
        ],
        logic: Arc::new(Builder),
    }
}

#[cfg(test)]
mod tests {
    use super::capitalize;

    #[test]
    fn capitalizes_first_letter() {
        assert_eq!(capitalize("name"), "Name");
        assert_eq!(capitalize("x"), "X");
        assert_eq!(capitalize(""), "");
    }
}
