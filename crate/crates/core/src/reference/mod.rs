//! The reference product line: a class-diagram to OOTL generator with an
//! optional default constructor, builders and a factory.

mod builder;
mod factory;
mod guard;
mod types;

use std::sync::Arc;

use crate::component::{GeneratorComponent, Registry};
use crate::feature_model::{parse_feature_model, FeatureModel};

pub use guard::{
    FG_ENUM, FG_INTERFACE, FG_TAG_EXTERNAL, FG_TAG_NOBUILDER, FG_TAG_UNKNOWN, KNOWN_TAGS,
};

pub const REFERENCE_FML: &str = "\
featuremodel CD2Java {
  CD2Java! {
    Types! {
      Class!
      Enum?
      Interface?
      DefaultConstructor?
    }
    Builder?
    Factory?
  }
}
constraints {
  DefaultConstructor requires Class;
  Builder requires Class;
  Factory requires Class;
}
";

pub const CORE_FRONT_END: &str = "CoreFrontEnd";
pub const FEATURE_GUARD: &str = "FeatureGuard";
pub const TYPES: &str = "Types";
pub const BUILDER: &str = "Builder";
pub const FACTORY: &str = "Factory";

pub fn reference_model() -> Arc<FeatureModel> {
    Arc::new(parse_feature_model(REFERENCE_FML).expect("reference model parses"))
}

/// The five components, in id order.
pub fn reference_components() -> Vec<GeneratorComponent> {
    vec![
        builder::component(),
        guard::core_front_end(),
        factory::component(),
        guard::feature_guard(),
        types::component(),
    ]
}

pub fn build_reference_registry() -> Registry {
    Registry::new(reference_model(), reference_components())
        .expect("reference components pass registration")
}

fn package_line(diagram: &crate::input_language::ClassDiagram) -> String {
    format!("package {};\n", diagram.name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature_model::enumerate_configurations;

    #[test]
    fn registry_holds_the_five_components() {
        let r = build_reference_registry();
        let ids: Vec<&str> = r.ids().collect();
        assert_eq!(ids, [BUILDER, CORE_FRONT_END, FACTORY, FEATURE_GUARD, TYPES]);
    }

    #[test]
    fn model_has_32_configurations() {
        assert_eq!(enumerate_configurations(&reference_model(), None).unwrap().count, 32);
    }

    #[test]
    fn realizes_sets_partition_the_non_root_features() {
        let r = build_reference_registry();
        let model = r.model();
        for f in model.features.keys().filter(|f| **f != model.root) {
            let n = r.components().filter(|c| c.realizes.contains(f)).count();
            assert_eq!(n, 1, "{f}");
        }
    }
}
