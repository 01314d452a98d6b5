//! Generator components and their explicit interfaces.
//!
//! A component is an opaque unit of generator logic behind a
//! [`ComponentInterface`]: the interface lists what the component is about
//! (concerns), which feature/option combinations it supports (constraints),
//! its local variability (options and variation points), and what it
//! exchanges with other components (fact topics and hook patterns).

mod registry;
mod variant;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

pub use registry::{resolve_components, Registry, RegistryError, ResolveError};
pub use variant::{
    effective_configuration, effective_variation_points, parse_variant_spec, BindingMode,
    BindingValue, OptionBinding, OptionError, VariantSpec, VpBinding,
};

use crate::feature_model::Configuration;
use crate::formula::Formula;
use crate::generation::{ArtifactContainer, ArtifactPlan, BoardReader, BoardView, Topic};
use crate::input_language::{ClassDiagram, ContextCondition};
use crate::report::Violation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    FrontEnd,
    BackEnd,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OptionType {
    Flag,
    Choice(Vec<String>),
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OptionValue {
    Flag(bool),
    Choice(String),
    Text(String),
}

impl OptionValue {
    pub fn as_flag(&self) -> Option<bool> {
        match self {
            OptionValue::Flag(b) => Some(*b),
            _ => None,
        }
    }

    pub fn fits(&self, ty: &OptionType) -> bool {
        match (self, ty) {
            (OptionValue::Flag(_), OptionType::Flag) => true,
            (OptionValue::Choice(v), OptionType::Choice(allowed)) => allowed.contains(v),
            (OptionValue::Text(_), OptionType::Text) => true,
            _ => false,
        }
    }
}

impl fmt::Display for OptionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptionValue::Flag(b) => write!(f, "{b}"),
            OptionValue::Choice(s) => f.write_str(s),
            OptionValue::Text(s) => write!(f, "{s:?}"),
        }
    }
}

/// A configuration option for local variability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigOption {
    pub name: String,
    pub ty: OptionType,
    pub default: OptionValue,
    /// Selecting the feature pins the option to the value.
    pub forced_by: Vec<(String, OptionValue)>,
}

impl ConfigOption {
    pub fn flag(name: &str, default: bool) -> Self {
        Self {
            name: name.to_string(),
            ty: OptionType::Flag,
            default: OptionValue::Flag(default),
            forced_by: Vec::new(),
        }
    }

    pub fn forced_by(mut self, feature: &str, value: OptionValue) -> Self {
        self.forced_by.push((feature.to_string(), value));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VariationPointKind {
    TextFragment,
    /// A naming scheme containing exactly one `%s` placeholder.
    NamePattern,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariationPoint {
    pub name: String,
    pub kind: VariationPointKind,
    pub default: String,
}

impl VariationPoint {
    pub fn name_pattern(name: &str, default: &str) -> Self {
        Self {
            name: name.to_string(),
            kind: VariationPointKind::NamePattern,
            default: default.to_string(),
        }
    }

    pub fn text_fragment(name: &str, default: &str) -> Self {
        Self {
            name: name.to_string(),
            kind: VariationPointKind::TextFragment,
            default: default.to_string(),
        }
    }

    /// Checks a candidate value against the kind's shape rule.
    pub fn accepts(&self, value: &str) -> bool {
        match self.kind {
            VariationPointKind::TextFragment => true,
            VariationPointKind::NamePattern => value.matches("%s").count() == 1,
        }
    }
}

/// Applies a name pattern such as `create%s`.
pub fn apply_name_pattern(pattern: &str, name: &str) -> String {
    pattern.replacen("%s", name, 1)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Concern {
    pub id: String,
    pub description: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ComponentInterface {
    pub concerns: BTreeSet<Concern>,
    pub constraints: Vec<Formula>,
    pub options: Vec<ConfigOption>,
    pub variation_points: Vec<VariationPoint>,
    pub produces: BTreeSet<Topic>,
    pub consumes: BTreeSet<Topic>,
    pub hooks_provided: BTreeSet<String>,
    pub hooks_required: BTreeSet<String>,
}

impl ComponentInterface {
    pub fn option(&self, name: &str) -> Option<&ConfigOption> {
        self.options.iter().find(|o| o.name == name)
    }

    pub fn variation_point(&self, name: &str) -> Option<&VariationPoint> {
        self.variation_points.iter().find(|v| v.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    Restrict,
    Transform,
    Declare,
    Emit,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Restrict => "restrict",
            Phase::Transform => "transform",
            Phase::Declare => "declare",
            Phase::Emit => "emit",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Behavior {
    pub name: String,
    pub phase: Phase,
    pub applicability: Formula,
}

impl Behavior {
    pub fn new(name: &str, phase: Phase, applicability: &str) -> Self {
        Self {
            name: name.to_string(),
            phase,
            applicability: Formula::parse(applicability)
                .unwrap_or_else(|e| panic!("applicability of {name}: {e}")),
        }
    }
}

/// What a behavior sees of the variant it runs in.
#[derive(Debug, Clone, Copy)]
pub struct VariantContext<'a> {
    pub configuration: &'a Configuration,
    pub mode: BindingMode,
    /// Effective options of the running component.
    pub options: &'a BTreeMap<String, OptionValue>,
    /// Effective variation-point values of the running component.
    pub variation_points: &'a BTreeMap<String, String>,
}

impl VariantContext<'_> {
    pub fn selected(&self, feature: &str) -> bool {
        self.configuration.contains(feature)
    }

    pub fn flag(&self, option: &str) -> bool {
        self.options
            .get(option)
            .and_then(OptionValue::as_flag)
            .unwrap_or(false)
    }

    pub fn vp(&self, name: &str) -> &str {
        self.variation_points
            .get(name)
            .map(String::as_str)
            .unwrap_or("")
    }
}

/// The hidden internals of a component. The engine calls the method that
/// matches the phase of each scheduled behavior.
pub trait ComponentLogic: Send + Sync {
    /// `restrict`: context conditions to enforce on the input model.
    fn conditions(&self, _behavior: &str, _cx: &VariantContext<'_>) -> Vec<ContextCondition> {
        Vec::new()
    }

    /// `transform`: rewrite the model before any artifact is declared.
    fn transform(
        &self,
        _behavior: &str,
        _diagram: &mut ClassDiagram,
        _cx: &VariantContext<'_>,
    ) -> Result<(), Violation> {
        Ok(())
    }

    /// `declare`: claim artifacts, publish facts and return the artifacts
    /// this component will emit.
    fn declare(
        &self,
        _behavior: &str,
        _diagram: &ClassDiagram,
        _cx: &VariantContext<'_>,
        _board: &mut BoardView<'_>,
    ) -> Result<Vec<ArtifactPlan>, Violation> {
        Ok(Vec::new())
    }

    /// `emit`: fill the container for one declared artifact.
    fn emit(
        &self,
        _behavior: &str,
        plan: &ArtifactPlan,
        _diagram: &ClassDiagram,
        _cx: &VariantContext<'_>,
        _board: &BoardReader<'_>,
    ) -> Result<ArtifactContainer, Violation> {
        Err(Violation::new(
            crate::generation::GEN_EMIT,
            vec![plan.path.clone()],
            format!("component has no emitter for {}", plan.behavior),
        ))
    }
}

#[derive(Clone)]
pub struct GeneratorComponent {
    pub id: String,
    pub version: String,
    pub kind: ComponentKind,
    pub realizes: BTreeSet<String>,
    pub interface: ComponentInterface,
    pub behaviors: Vec<Behavior>,
    pub logic: Arc<dyn ComponentLogic>,
}

impl fmt::Debug for GeneratorComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorComponent")
            .field("id", &self.id)
            .field("version", &self.version)
            .field("kind", &self.kind)
            .field("realizes", &self.realizes)
            .field("interface", &self.interface)
            .field("behaviors", &self.behaviors)
            .finish_non_exhaustive()
    }
}

impl PartialEq for GeneratorComponent {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.version == other.version
            && self.kind == other.kind
            && self.realizes == other.realizes
            && self.interface == other.interface
            && self.behaviors == other.behaviors
    }
}

impl GeneratorComponent {
    pub fn behavior(&self, name: &str) -> Option<&Behavior> {
        self.behaviors.iter().find(|b| b.name == name)
    }

    pub fn is_always_on(&self) -> bool {
        self.realizes.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn name_patterns() {
        let vp = VariationPoint::name_pattern("p", "create%s");
        assert!(vp.accepts("make%s"));
        assert!(!vp.accepts("make"));
        assert!(!vp.accepts("%s%s"));
        assert_eq!(apply_name_pattern("create%s", "Person"), "createPerson");
        assert!(VariationPoint::text_fragment("t", "").accepts("{"));
    }

    #[test]
    fn option_value_types() {
        assert!(OptionValue::Flag(true).fits(&OptionType::Flag));
        assert!(!OptionValue::Text("x".into()).fits(&OptionType::Flag));
        let ty = OptionType::Choice(vec!["a".into(), "b".into()]);
        assert!(OptionValue::Choice("a".into()).fits(&ty));
        assert!(!OptionValue::Choice("c".into()).fits(&ty));
    }

    #[test]
    fn phases_are_ordered() {
        assert!(Phase::Restrict < Phase::Transform);
        assert!(Phase::Transform < Phase::Declare);
        assert!(Phase::Declare < Phase::Emit);
    }
}
