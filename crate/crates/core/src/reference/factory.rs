use std::collections::BTreeSet;
use std::sync::Arc;

use super::package_line;
use super::types::provider_name;
use crate::component::{
    apply_name_pattern, Behavior, BindingMode, ComponentInterface, ComponentKind, ComponentLogic,
    Concern, GeneratorComponent, Phase, VariantContext, VariationPoint,
};
use crate::formula::Formula;
use crate::generation::{ArtifactContainer, ArtifactPlan, BoardReader, BoardView, Topic};
use crate::input_language::{ClassDecl, ClassDiagram};
use crate::report::Violation;

const ID: &str = super::FACTORY;
const PREFIX_VP: &str = "factory_method_prefix";

fn factory_path(diagram: &ClassDiagram) -> String {
    format!("{}Factory.oo", diagram.name)
}

fn delegated(class: &ClassDecl, mode: BindingMode) -> bool {
    match mode {
        BindingMode::GenerationTime => false,
        BindingMode::RunTime => true,
        BindingMode::Hybrid => class.has_tag("external"),
    }
}

fn lower_first(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => first.to_lowercase().chain(chars).collect(),
        None => String::new(),
    }
}

struct Factory;

impl ComponentLogic for Factory {
    fn declare(
        &self,
        _behavior: &str,
        diagram: &ClassDiagram,
        cx: &VariantContext<'_>,
        board: &mut BoardView<'_>,
    ) -> Result<Vec<ArtifactPlan>, Violation> {
        let path = factory_path(diagram);
        board.claim(&path)?;
        let mut classes: Vec<&ClassDecl> = diagram.classes().collect();
        classes.sort_by(|a, b| a.name.cmp(&b.name));
        let mut input = format!("{}\n{}\n", diagram.name, cx.mode);
        for c in &classes {
            input.push_str(&format!("{} {}\n", c.name, c.tags.join(",")));
            if delegated(c, cx.mode) {
                board.publish(Topic::HookRequired, &provider_name(&c.name), &[])?;
            }
        }
        Ok(vec![ArtifactPlan::new(&path, "emit_factory", &diagram.name)
            .input(input)
            .depends_on(Topic::TypeGenerated, None)
            .uses_vp(PREFIX_VP)])
    }

    fn emit(
        &self,
        _behavior: &str,
        plan: &ArtifactPlan,
        diagram: &ClassDiagram,
        cx: &VariantContext<'_>,
        board: &BoardReader<'_>,
    ) -> Result<ArtifactContainer, Violation> {
        let generated: BTreeSet<String> = board
            .read(Topic::TypeGenerated)?
            .into_iter()
            .filter(|f| f.get("kind") == Some("class"))
            .map(|f| f.subject.clone())
            .collect();
        let mut classes: Vec<&ClassDecl> = diagram
            .classes()
            .filter(|c| generated.contains(&c.name))
            .collect();
        classes.sort_by(|a, b| a.name.cmp(&b.name));

        let factory = plan.path.trim_end_matches(".oo");
        let mut text = format!("{}class {factory} {{\n", package_line(diagram));
        for c in classes.iter().filter(|c| delegated(c, cx.mode)) {
            let provider = provider_name(&c.name);
            text.push_str(&format!("  {provider} {};\n", lower_first(&provider)));
        }
        for c in &classes {
            let method = apply_name_pattern(cx.vp(PREFIX_VP), &c.name);
            let body = if delegated(c, cx.mode) {
                format!("return {}.provide();", lower_first(&provider_name(&c.name)))
            } else {
                format!("return new {}();", c.name)
            };
            text.push_str(&format!("  {} {method}() {{ {body} }}\n", c.name));
        }
        text.push_str("}\n");
        let mut out = ArtifactContainer::new(plan.path.clone());
        out.push(text, &["Factory"], ID);
        Ok(out)
    }
}

pub(super) fn component() -> GeneratorComponent {
    GeneratorComponent {
        id: ID.to_string(),
        version: "1.0.0".to_string(),
        kind: ComponentKind::BackEnd,
        realizes: BTreeSet::from(["Factory".to_string()]),
        interface: ComponentInterface {
            concerns: BTreeSet::from([Concern {
                id: "factories".to_string(),
                description: "one factory class per diagram".to_string(),
            }]),
            constraints: vec![Formula::parse("Factory implies DefaultConstructor").expect("parses")],
            variation_points: vec![VariationPoint::name_pattern(PREFIX_VP, "create%s")],
            produces: BTreeSet::from([Topic::ArtifactClaimed, Topic::HookRequired]),
            consumes: BTreeSet::from([Topic::TypeGenerated]),
            hooks_required: BTreeSet::from(["*Provider".to_string()]),
            ..ComponentInterface::default()
        },
        behaviors: vec![
            Behavior::new("declare_factory", Phase::Declare, "Factory"),
            Behavior::new("emit_factory", Phase::Emit, "Factory"),
        ],
        logic: Arc::new(Factory),
    }
}
