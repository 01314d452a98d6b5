//! The composition operator.
//!
//! Composition runs in two stages. [`compose`] sticks two operands
//! together, merging their interfaces, and only performs structural checks.
//! [`validate_composition`] then evaluates the merged constraints and the
//! fact-exchange wiring for a concrete variant, and [`schedule`] orders the
//! applicable behaviors. The operator is a set union, so the result does
//! not depend on operand order or grouping.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::component::{
    effective_configuration, effective_variation_points, resolve_components, ConfigOption,
    GeneratorComponent, OptionValue, Phase, Registry, ResolveError, VariantSpec, VariationPoint,
};
use crate::feature_model::{validate_configuration, FeatureModel};
use crate::formula::Valuation;
use crate::generation::Topic;
use crate::report::{ValidationReport, Violation};

pub const CMP_DUP_ID: &str = "CMP-DUP-ID";
pub const CMP_CONSTRAINT: &str = "CMP-CONSTRAINT";
pub const CMP_NO_PRODUCER: &str = "CMP-NO-PRODUCER";
pub const CMP_FACT_CYCLE: &str = "CMP-FACT-CYCLE";
pub const CMP_CONCERN_CLASH: &str = "CMP-CONCERN-CLASH";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{code}: {detail}")]
pub struct CompositionError {
    pub code: String,
    pub detail: String,
    pub involved: Vec<String>,
}

impl CompositionError {
    fn new(code: &str, detail: impl Into<String>, involved: Vec<String>) -> Self {
        Self {
            code: code.to_string(),
            detail: detail.into(),
            involved,
        }
    }
}

impl From<CompositionError> for Violation {
    fn from(e: CompositionError) -> Self {
        Violation::new(&e.code, e.involved, e.detail)
    }
}

/// Union of the operands' interfaces. Options and variation points are
/// qualified as `Component.name`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MergedInterface {
    pub concerns: BTreeMap<String, String>,
    /// `(component, constraint text)`
    pub constraints: BTreeSet<(String, String)>,
    pub options: BTreeMap<String, ConfigOption>,
    pub variation_points: BTreeMap<String, VariationPoint>,
    pub produces: BTreeSet<Topic>,
    pub consumes: BTreeSet<Topic>,
    pub hooks_provided: BTreeSet<String>,
    pub hooks_required: BTreeSet<String>,
}

#[derive(Debug, Clone)]
pub struct ComposedGenerator {
    components: Vec<Arc<GeneratorComponent>>,
    merged_interface: MergedInterface,
    feature_model: Arc<FeatureModel>,
}

impl ComposedGenerator {
    /// The neutral element of composition.
    pub fn empty(feature_model: Arc<FeatureModel>) -> Self {
        Self {
            components: Vec::new(),
            merged_interface: MergedInterface::default(),
            feature_model,
        }
    }

    /// Lifts a single component into a composable operand.
    pub fn of(component: Arc<GeneratorComponent>, feature_model: Arc<FeatureModel>) -> Self {
        let mut merged = MergedInterface::default();
        let i = &component.interface;
        for c in &i.concerns {
            merged.concerns.insert(c.id.clone(), c.description.clone());
        }
        for f in &i.constraints {
            merged
                .constraints
                .insert((component.id.clone(), f.to_string()));
        }
        for o in &i.options {
            merged
                .options
                .insert(format!("{}.{}", component.id, o.name), o.clone());
        }
        for vp in &i.variation_points {
            merged
                .variation_points
                .insert(format!("{}.{}", component.id, vp.name), vp.clone());
        }
        merged.produces = i.produces.clone();
        merged.consumes = i.consumes.clone();
        merged.hooks_provided = i.hooks_provided.clone();
        merged.hooks_required = i.hooks_required.clone();
        Self {
            components: vec![component],
            merged_interface: merged,
            feature_model,
        }
    }

    pub fn components(&self) -> &[Arc<GeneratorComponent>] {
        &self.components
    }

    pub fn component(&self, id: &str) -> Option<&Arc<GeneratorComponent>> {
        self.components.iter().find(|c| c.id == id)
    }

    pub fn component_ids(&self) -> BTreeSet<&str> {
        self.components.iter().map(|c| c.id.as_str()).collect()
    }

    pub fn merged_interface(&self) -> &MergedInterface {
        &self.merged_interface
    }

    pub fn feature_model(&self) -> &Arc<FeatureModel> {
        &self.feature_model
    }
}

/// `a ⊗ b`: concatenates the component lists and unions the interfaces.
pub fn compose(
    a: &ComposedGenerator,
    b: &ComposedGenerator,
) -> Result<ComposedGenerator, CompositionError> {
    if a.feature_model != b.feature_model && *a.feature_model != *b.feature_model {
        return Err(CompositionError::new(
            CMP_CONSTRAINT,
            "operands belong to different feature models",
            Vec::new(),
        ));
    }
    let left = a.component_ids();
    let dups: Vec<String> = b
        .components
        .iter()
        .filter(|c| left.contains(c.id.as_str()))
        .map(|c| c.id.clone())
        .collect();
    if !dups.is_empty() {
        return Err(CompositionError::new(
            CMP_DUP_ID,
            format!("component ids on both sides: {}", dups.join(", ")),
            dups,
        ));
    }

    let mut merged = a.merged_interface.clone();
    let bi = &b.merged_interface;
    for (id, desc) in &bi.concerns {
        match merged.concerns.get(id) {
            Some(existing) if existing != desc => {
                let involved = a
                    .components
                    .iter()
                    .chain(&b.components)
                    .filter(|c| c.interface.concerns.iter().any(|k| &k.id == id))
                    .map(|c| c.id.clone())
                    .collect();
                return Err(CompositionError::new(
                    CMP_CONCERN_CLASH,
                    format!("concern {id} is described as {existing:?} and as {desc:?}"),
                    involved,
                ));
            }
            _ => {
                merged.concerns.insert(id.clone(), desc.clone());
            }
        }
    }
    merged.constraints.extend(bi.constraints.iter().cloned());
    merged
        .options
        .extend(bi.options.iter().map(|(k, v)| (k.clone(), v.clone())));
    merged
        .variation_points
        .extend(bi.variation_points.iter().map(|(k, v)| (k.clone(), v.clone())));
    merged.produces.extend(bi.produces.iter().copied());
    merged.consumes.extend(bi.consumes.iter().copied());
    merged.hooks_provided.extend(bi.hooks_provided.iter().cloned());
    merged.hooks_required.extend(bi.hooks_required.iter().cloned());

    let mut components = a.components.clone();
    components.extend(b.components.iter().cloned());
    Ok(ComposedGenerator {
        components,
        merged_interface: merged,
        feature_model: a.feature_model.clone(),
    })
}

/// Left fold of [`compose`] over the components, in the given order.
pub fn compose_all(
    feature_model: Arc<FeatureModel>,
    components: impl IntoIterator<Item = Arc<GeneratorComponent>>,
) -> Result<ComposedGenerator, CompositionError> {
    let mut acc = ComposedGenerator::empty(feature_model.clone());
    for c in components {
        acc = compose(&acc, &ComposedGenerator::of(c, feature_model.clone()))?;
    }
    Ok(acc)
}

/// Effective option and variation-point values of every component in a
/// composition, keyed by component id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EffectiveBindings {
    pub options: BTreeMap<String, BTreeMap<String, OptionValue>>,
    pub variation_points: BTreeMap<String, BTreeMap<String, String>>,
}

pub fn effective_bindings(
    composed: &ComposedGenerator,
    spec: &VariantSpec,
) -> Result<EffectiveBindings, Vec<Violation>> {
    let mut out = EffectiveBindings::default();
    let mut errors = Vec::new();
    let ids = composed.component_ids();
    let stray = spec
        .option_bindings
        .iter()
        .map(|b| (&b.component, format!("option {}.{}", b.component, b.option)))
        .chain(spec.vp_bindings.iter().map(|b| {
            (
                &b.component,
                format!("variation point {}.{}", b.component, b.variation_point),
            )
        }));
    for (component, what) in stray {
        if !ids.contains(component.as_str()) {
            errors.push(Violation::new(
                CMP_CONSTRAINT,
                vec![component.clone()],
                format!("binding of {what} names a component that is not part of the variant"),
            ));
        }
    }
    for c in &composed.components {
        match effective_configuration(c, spec) {
            Ok(opts) => {
                out.options.insert(c.id.clone(), opts);
            }
            Err(e) => errors.push(Violation::new(CMP_CONSTRAINT, vec![c.id.clone()], e.to_string())),
        }
        match effective_variation_points(c, spec) {
            Ok(vps) => {
                out.variation_points.insert(c.id.clone(), vps);
            }
            Err(e) => errors.push(Violation::new(CMP_CONSTRAINT, vec![c.id.clone()], e.to_string())),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

/// Truth assignment for formulas: selected features plus effective options.
pub struct VariantValuation<'a> {
    pub spec: &'a VariantSpec,
    pub bindings: &'a EffectiveBindings,
}

impl Valuation for VariantValuation<'_> {
    fn feature(&self, id: &str) -> bool {
        self.spec.configuration.contains(id)
    }

    fn option(&self, component: &str, name: &str) -> Option<String> {
        self.bindings
            .options
            .get(component)?
            .get(name)
            .map(|v| match v {
                OptionValue::Flag(b) => b.to_string(),
                OptionValue::Choice(s) | OptionValue::Text(s) => s.clone(),
            })
    }
}

/// Glob match with `*` wildcards, used for hook patterns.
pub fn pattern_matches(pattern: &str, text: &str) -> bool {
    fn go(p: &[u8], t: &[u8]) -> bool {
        match p.split_first() {
            None => t.is_empty(),
            Some((b'*', rest)) => (0..=t.len()).any(|i| go(rest, &t[i..])),
            Some((c, rest)) => t.first() == Some(c) && go(rest, &t[1..]),
        }
    }
    go(pattern.as_bytes(), text.as_bytes())
}

/// Components of a topic-exchange graph left over after repeatedly
/// removing nodes without incoming edges, i.e. those on or behind a cycle.
fn fact_cycle_members(components: &[Arc<GeneratorComponent>]) -> Vec<String> {
    let edges = fact_edges(components.iter().map(|c| c.as_ref()));
    let mut indegree: BTreeMap<&str, usize> =
        components.iter().map(|c| (c.id.as_str(), 0)).collect();
    for (_, to) in &edges {
        *indegree.get_mut(to).expect("node") += 1;
    }
    let mut ready: Vec<&str> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(n, _)| *n)
        .collect();
    while let Some(n) = ready.pop() {
        indegree.remove(n);
        for (from, to) in &edges {
            if *from == n {
                let d = indegree.get_mut(to).expect("node");
                *d -= 1;
                if *d == 0 {
                    ready.push(to);
                }
            }
        }
    }
    indegree.keys().map(|s| s.to_string()).collect()
}

/// Producer-to-consumer edges between distinct components.
fn fact_edges<'c>(
    components: impl Iterator<Item = &'c GeneratorComponent> + Clone,
) -> BTreeSet<(&'c str, &'c str)> {
    let mut edges = BTreeSet::new();
    for p in components.clone() {
        for c in components.clone() {
            if p.id != c.id
                && p
                    .interface
                    .produces
                    .intersection(&c.interface.consumes)
                    .next()
                    .is_some()
            {
                edges.insert((p.id.as_str(), c.id.as_str()));
            }
        }
    }
    edges
}

/// Second stage of composition: checks the composed generator against a
/// variant. Never modifies `composed`.
pub fn validate_composition(composed: &ComposedGenerator, spec: &VariantSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    match effective_bindings(composed, spec) {
        Err(errors) => report.violations.extend(errors),
        Ok(bindings) => {
            let valuation = VariantValuation {
                spec,
                bindings: &bindings,
            };
            for c in &composed.components {
                for f in &c.interface.constraints {
                    if !f.eval(&valuation) {
                        report.push(Violation::new(
                            CMP_CONSTRAINT,
                            vec![c.id.clone()],
                            format!("constraint `{f}` of {} is violated", c.id),
                        ));
                    }
                }
            }
        }
    }

    for c in &composed.components {
        for topic in &c.interface.consumes {
            let produced = composed
                .components
                .iter()
                .any(|p| p.interface.produces.contains(topic));
            if !produced {
                report.push(Violation::new(
                    CMP_NO_PRODUCER,
                    vec![c.id.clone(), topic.to_string()],
                    format!("{} consumes {topic}, which no component produces", c.id),
                ));
            }
        }
    }

    let cyclic = fact_cycle_members(&composed.components);
    if !cyclic.is_empty() {
        report.push(Violation::new(
            CMP_FACT_CYCLE,
            cyclic.clone(),
            format!("fact exchange between {} is cyclic", cyclic.join(", ")),
        ));
    }

    if spec.mode.uses_hooks() {
        let provided = &composed.merged_interface.hooks_provided;
        for c in &composed.components {
            for req in &c.interface.hooks_required {
                let matched = provided
                    .iter()
                    .any(|p| p == req || pattern_matches(p, req));
                if !matched {
                    report.push(Violation::new(
                        CMP_NO_PRODUCER,
                        vec![c.id.clone(), req.clone()],
                        format!("{} requires hooks {req}, which no component provides", c.id),
                    ));
                }
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScheduledBehavior {
    pub component: String,
    pub behavior: String,
    pub phase: Phase,
}

impl fmt::Display for ScheduledBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}.{}", self.phase, self.component, self.behavior)
    }
}

/// Orders the behaviors whose applicability holds for `spec`: by phase;
/// within declare and emit, producers of a topic before its consumers;
/// remaining ties by component id, then behavior name.
pub fn schedule(
    composed: &ComposedGenerator,
    spec: &VariantSpec,
) -> Result<Vec<ScheduledBehavior>, CompositionError> {
    let bindings = effective_bindings(composed, spec).map_err(|errors| {
        let involved = errors.iter().flat_map(|v| v.subjects.clone()).collect();
        let detail = errors
            .iter()
            .map(|v| v.message.clone())
            .collect::<Vec<_>>()
            .join("; ");
        CompositionError::new(CMP_CONSTRAINT, detail, involved)
    })?;
    let valuation = VariantValuation {
        spec,
        bindings: &bindings,
    };
    let by_id: BTreeMap<&str, &GeneratorComponent> = composed
        .components
        .iter()
        .map(|c| (c.id.as_str(), c.as_ref()))
        .collect();

    let mut out = Vec::new();
    for phase in [Phase::Restrict, Phase::Transform, Phase::Declare, Phase::Emit] {
        let nodes: BTreeSet<(&str, &str)> = by_id
            .values()
            .flat_map(|c| {
                c.behaviors
                    .iter()
                    .filter(|b| b.phase == phase && b.applicability.eval(&valuation))
                    .map(|b| (c.id.as_str(), b.name.as_str()))
            })
            .collect();
        let component_edges = if matches!(phase, Phase::Declare | Phase::Emit) {
            let active: BTreeSet<&str> = nodes.iter().map(|(c, _)| *c).collect();
            fact_edges(active.iter().map(|id| by_id[id]))
        } else {
            BTreeSet::new()
        };
        // Kahn's algorithm over behaviors; an edge runs from every behavior
        // of a producing component to every behavior of a consumer.
        let mut indegree: BTreeMap<(&str, &str), usize> = nodes
            .iter()
            .map(|n| {
                let d = component_edges
                    .iter()
                    .filter(|(_, to)| *to == n.0)
                    .map(|(from, _)| nodes.iter().filter(|m| m.0 == *from).count())
                    .sum();
                (*n, d)
            })
            .collect();
        let mut ready: BTreeSet<(&str, &str)> = indegree
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(n, _)| *n)
            .collect();
        while let Some(n) = ready.pop_first() {
            indegree.remove(&n);
            out.push(ScheduledBehavior {
                component: n.0.to_string(),
                behavior: n.1.to_string(),
                phase,
            });
            for (_, to) in component_edges.iter().filter(|(from, _)| *from == n.0) {
                for (m, d) in indegree.iter_mut().filter(|(m, _)| m.0 == *to) {
                    *d -= 1;
                    if *d == 0 {
                        ready.insert(*m);
                    }
                }
            }
        }
        if !indegree.is_empty() {
            let involved: BTreeSet<String> =
                indegree.keys().map(|(c, _)| c.to_string()).collect();
            let involved: Vec<String> = involved.into_iter().collect();
            return Err(CompositionError::new(
                CMP_FACT_CYCLE,
                format!(
                    "no producer-before-consumer order exists for {} in the {phase} phase",
                    involved.join(", ")
                ),
                involved,
            ));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeriveError {
    #[error("configuration {0}")]
    Configuration(ValidationReport),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error(transparent)]
    Composition(#[from] CompositionError),
    #[error("composition {0}")]
    Invalid(ValidationReport),
}

/// Application engineering in one step: validate the configuration, pick
/// the components, compose them in id order and validate the result.
pub fn derive_variant(
    registry: &Registry,
    spec: &VariantSpec,
) -> Result<ComposedGenerator, DeriveError> {
    let report = validate_configuration(registry.model(), &spec.configuration);
    if !report.valid() {
        return Err(DeriveError::Configuration(report));
    }
    let components = resolve_components(&spec.configuration, registry)?;
    let composed = compose_all(registry.model().clone(), components)?;
    let report = validate_composition(&composed, spec);
    if !report.valid() {
        return Err(DeriveError::Invalid(report));
    }
    Ok(composed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glob_patterns() {
        assert!(pattern_matches("*Provider", "PersonProvider"));
        assert!(pattern_matches("*Provider", "*Provider"));
        assert!(pattern_matches("a*b*c", "aXbYc"));
        assert!(!pattern_matches("*Provider", "PersonSource"));
        assert!(pattern_matches("*", ""));
    }
}
