#![allow(dead_code)]

use cgpl_core::component::{BindingMode, VariantSpec};
use cgpl_core::composition::{derive_variant, ComposedGenerator, DeriveError};
use cgpl_core::feature_model::Configuration;
use cgpl_core::input_language::{parse_class_diagram, ClassDiagram, TypeDecl};
use cgpl_core::reference::build_reference_registry;

pub const ALL_FEATURES: &str =
    "CD2Java,Types,Class,Enum,Interface,DefaultConstructor,Builder,Factory";

/// Exercises every input concept and both tags.
pub const COVERING_CDL: &str = "\
classdiagram Shop {
  interface Named { getName(): string; }
  enum Color { RED, GREEN }
  class Person implements Named { name: string; age: int; }
  class Order { color: Color; total: int; }
  <<nobuilder>> class Log { line: string; }
  <<external>> class Payment { amount: int; }
}
";

pub fn diagram(cdl: &str) -> ClassDiagram {
    parse_class_diagram(cdl).unwrap()
}

pub fn spec(features: &str, mode: BindingMode) -> VariantSpec {
    VariantSpec::new("test", Configuration::from_list(features), mode)
}

pub fn derive(spec: &VariantSpec) -> Result<ComposedGenerator, DeriveError> {
    derive_variant(&build_reference_registry(), spec)
}

/// The part of `diagram` a variant admits: enumerations (and attributes
/// typed by them) need Enum, interfaces and implements clauses need
/// Interface, <<nobuilder>> needs Builder, <<external>> needs hybrid mode.
pub fn project(diagram: &ClassDiagram, config: &Configuration, mode: BindingMode) -> ClassDiagram {
    let enums: Vec<String> = diagram.enums().map(|e| e.name.clone()).collect();
    let mut out = diagram.clone();
    out.types.retain(|t| match t {
        TypeDecl::Enum(_) => config.contains("Enum"),
        TypeDecl::Interface(_) => config.contains("Interface"),
        TypeDecl::Class(_) => true,
    });
    for t in &mut out.types {
        if let TypeDecl::Class(c) = t {
            if !config.contains("Enum") {
                c.attributes.retain(|a| !enums.contains(&a.type_name));
            }
            if !config.contains("Interface") {
                c.interfaces.clear();
            }
            c.tags.retain(|tag| match tag.as_str() {
                "nobuilder" => config.contains("Builder"),
                "external" => mode == BindingMode::Hybrid,
                _ => true,
            });
        }
    }
    out
}

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use cgpl_core::component::{
    Behavior, ComponentInterface, ComponentKind, ComponentLogic, Concern, GeneratorComponent,
};
use cgpl_core::generation::Topic;

/// An always-on back-end component with the given fact interface.
pub fn test_component(
    id: &str,
    produces: &[Topic],
    consumes: &[Topic],
    behaviors: Vec<Behavior>,
    logic: impl ComponentLogic + 'static,
) -> GeneratorComponent {
    GeneratorComponent {
        id: id.to_string(),
        version: "0.1.0".to_string(),
        kind: ComponentKind::BackEnd,
        realizes: BTreeSet::new(),
        interface: ComponentInterface {
            concerns: BTreeSet::from([Concern {
                id: format!("{id}_concern"),
                description: format!("test concern of {id}"),
            }]),
            produces: produces.iter().copied().collect(),
            consumes: consumes.iter().copied().collect(),
            ..ComponentInterface::default()
        },
        behaviors,
        logic: Arc::new(logic),
    }
}

/// Every file below `dir` with its bytes; `None` if `dir` does not exist.
pub fn snapshot(dir: &Path) -> Option<BTreeMap<String, Vec<u8>>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    if !dir.exists() {
        return None;
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    Some(out)
}
