use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{ComponentKind, GeneratorComponent, OptionType, Phase};
use crate::feature_model::{Configuration, FeatureModel};
use crate::formula::Formula;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("component id `{0}` registered twice")]
    DuplicateId(String),
    #[error("component `{component}` realizes unknown feature `{feature}`")]
    UnknownRealizedFeature { component: String, feature: String },
    #[error("component `{component}`: {phase} behavior `{behavior}` is not allowed on a {kind:?} component")]
    KindDiscipline {
        component: String,
        behavior: String,
        phase: Phase,
        kind: ComponentKind,
    },
    #[error("component `{component}`: {context} references unknown feature `{feature}`")]
    UnknownFeature {
        component: String,
        context: String,
        feature: String,
    },
    #[error("component `{component}`: {context} references undeclared option `{option}`")]
    UnknownOption {
        component: String,
        context: String,
        option: String,
    },
    #[error("component `{component}` declares `{name}` twice")]
    DuplicateName { component: String, name: String },
    #[error("component `{component}`: value for `{name}` does not fit its type")]
    IllTyped { component: String, name: String },
    #[error("component `{component}`: default of name pattern `{name}` must contain `%s` exactly once")]
    BadNamePattern { component: String, name: String },
}

/// A read-only set of components checked against one feature model.
#[derive(Debug, Clone)]
pub struct Registry {
    model: Arc<FeatureModel>,
    components: BTreeMap<String, Arc<GeneratorComponent>>,
}

impl Registry {
    /// Registers the components, enforcing interface closure, kind
    /// discipline and well-formed option/variation-point declarations.
    pub fn new(
        model: Arc<FeatureModel>,
        components: impl IntoIterator<Item = GeneratorComponent>,
    ) -> Result<Self, RegistryError> {
        let mut map = BTreeMap::new();
        for c in components {
            check_component(&model, &c)?;
            if map.contains_key(&c.id) {
                return Err(RegistryError::DuplicateId(c.id));
            }
            map.insert(c.id.clone(), Arc::new(c));
        }
        Ok(Self {
            model,
            components: map,
        })
    }

    pub fn model(&self) -> &Arc<FeatureModel> {
        &self.model
    }

    pub fn get(&self, id: &str) -> Option<&Arc<GeneratorComponent>> {
        self.components.get(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.components.keys().map(String::as_str)
    }

    pub fn components(&self) -> impl Iterator<Item = &Arc<GeneratorComponent>> {
        self.components.values()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

fn check_component(model: &FeatureModel, c: &GeneratorComponent) -> Result<(), RegistryError> {
    let id = &c.id;
    for f in &c.realizes {
        if !model.contains(f) {
            return Err(RegistryError::UnknownRealizedFeature {
                component: id.clone(),
                feature: f.clone(),
            });
        }
    }
    for b in &c.behaviors {
        let allowed = match c.kind {
            ComponentKind::FrontEnd => b.phase == Phase::Restrict,
            ComponentKind::BackEnd => b.phase != Phase::Restrict,
        };
        if !allowed {
            return Err(RegistryError::KindDiscipline {
                component: id.clone(),
                behavior: b.name.clone(),
                phase: b.phase,
                kind: c.kind,
            });
        }
    }

    let mut names = BTreeSet::new();
    for b in &c.behaviors {
        if !names.insert(("behavior", b.name.as_str())) {
            return Err(RegistryError::DuplicateName {
                component: id.clone(),
                name: b.name.clone(),
            });
        }
    }
    for o in &c.interface.options {
        if !names.insert(("option", o.name.as_str())) {
            return Err(RegistryError::DuplicateName {
                component: id.clone(),
                name: o.name.clone(),
            });
        }
        let ill = || RegistryError::IllTyped {
            component: id.clone(),
            name: o.name.clone(),
        };
        if !o.default.fits(&o.ty) {
            return Err(ill());
        }
        for (feature, value) in &o.forced_by {
            if !value.fits(&o.ty) {
                return Err(ill());
            }
            if !model.contains(feature) {
                return Err(RegistryError::UnknownFeature {
                    component: id.clone(),
                    context: format!("forcing of option {}", o.name),
                    feature: feature.clone(),
                });
            }
        }
    }
    for vp in &c.interface.variation_points {
        if !names.insert(("vp", vp.name.as_str())) {
            return Err(RegistryError::DuplicateName {
                component: id.clone(),
                name: vp.name.clone(),
            });
        }
        if !vp.accepts(&vp.default) {
            return Err(RegistryError::BadNamePattern {
                component: id.clone(),
                name: vp.name.clone(),
            });
        }
    }

    let formulas = c
        .interface
        .constraints
        .iter()
        .map(|f| (format!("constraint `{f}`"), f))
        .chain(
            c.behaviors
                .iter()
                .map(|b| (format!("applicability of {}", b.name), &b.applicability)),
        );
    for (context, formula) in formulas {
        check_closure(model, c, &context, formula)?;
    }
    Ok(())
}

fn check_closure(
    model: &FeatureModel,
    c: &GeneratorComponent,
    context: &str,
    formula: &Formula,
) -> Result<(), RegistryError> {
    for f in formula.features() {
        if !model.contains(f) {
            return Err(RegistryError::UnknownFeature {
                component: c.id.clone(),
                context: context.to_string(),
                feature: f.to_string(),
            });
        }
    }
    let mut bad = None;
    for (comp, name) in formula.options() {
        let declared = comp == c.id && c.interface.option(name).is_some();
        if !declared {
            bad = Some(format!("{comp}.{name}"));
            break;
        }
    }
    // Flag atoms must name flags; equality atoms must compare against a
    // value the option can take.
    if bad.is_none() {
        check_atom_types(formula, c, &mut bad);
    }
    match bad {
        Some(option) => Err(RegistryError::UnknownOption {
            component: c.id.clone(),
            context: context.to_string(),
            option,
        }),
        None => Ok(()),
    }
}

fn check_atom_types(formula: &Formula, c: &GeneratorComponent, bad: &mut Option<String>) {
    match formula {
        Formula::Option { component, name } => {
            if c.interface.option(name).map(|o| &o.ty) != Some(&OptionType::Flag) {
                *bad = Some(format!("{component}.{name} (not a flag)"));
            }
        }
        Formula::OptionEq {
            component,
            name,
            value,
        } => {
            let ok = match c.interface.option(name).map(|o| &o.ty) {
                Some(OptionType::Flag) => value == "true" || value == "false",
                Some(OptionType::Choice(allowed)) => allowed.contains(value),
                Some(OptionType::Text) => true,
                None => false,
            };
            if !ok {
                *bad = Some(format!("{component}.{name} = {value}"));
            }
        }
        Formula::Not(f) => check_atom_types(f, c, bad),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            check_atom_types(a, c, bad);
            check_atom_types(b, c, bad);
        }
        Formula::Const(_) | Formula::Feature(_) => {}
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolveError {
    #[error("selected feature `{0}` is not part of the feature model")]
    UnknownFeature(String),
    #[error("selected feature `{0}` is realized by no component")]
    UnrealizedFeature(String),
    #[error("feature `{feature}` is realized by several components: {}", components.join(", "))]
    MultiplyRealized {
        feature: String,
        components: Vec<String>,
    },
}

/// Components needed for a configuration: every component realizing a
/// selected feature plus the always-on ones, ordered by id.
pub fn resolve_components(
    config: &Configuration,
    registry: &Registry,
) -> Result<Vec<Arc<GeneratorComponent>>, ResolveError> {
    let model = registry.model();
    for f in &config.selected {
        if !model.contains(f) {
            return Err(ResolveError::UnknownFeature(f.clone()));
        }
        if *f == model.root {
            continue;
        }
        let realizers: Vec<String> = registry
            .components()
            .filter(|c| c.realizes.contains(f))
            .map(|c| c.id.clone())
            .collect();
        match realizers.len() {
            0 => return Err(ResolveError::UnrealizedFeature(f.clone())),
            1 => {}
            _ => {
                return Err(ResolveError::MultiplyRealized {
                    feature: f.clone(),
                    components: realizers,
                })
            }
        }
    }
    Ok(registry
        .components()
        .filter(|c| c.is_always_on() || c.realizes.iter().any(|f| config.contains(f)))
        .cloned()
        .collect())
}
