//! Feature models and configurations: the global-variability layer.
//!
//! A [`FeatureModel`] is a FODA-style tree (mandatory/optional children,
//! xor/or groups) plus `requires`/`excludes` cross-tree constraints. Models
//! are read from FML text with [`parse_feature_model`] and printed back with
//! [`FeatureModel::to_fml`].

mod fml;

use std::collections::{BTreeMap, BTreeSet};

pub use fml::parse_feature_model;

use crate::report::{ValidationReport, Violation};
use crate::text::SyntaxError;

/// Upper bound on model size for [`enumerate_configurations`].
pub const MAX_ENUMERATION_FEATURES: usize = 24;

pub const CFG_ROOT: &str = "CFG-ROOT";
pub const CFG_PARENT: &str = "CFG-PARENT";
pub const CFG_MANDATORY: &str = "CFG-MANDATORY";
pub const CFG_XOR: &str = "CFG-XOR";
pub const CFG_OR: &str = "CFG-OR";
pub const CFG_REQUIRES: &str = "CFG-REQUIRES";
pub const CFG_EXCLUDES: &str = "CFG-EXCLUDES";
pub const CFG_UNKNOWN: &str = "CFG-UNKNOWN";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variability {
    Mandatory,
    Optional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Xor,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub kind: GroupKind,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feature {
    pub id: String,
    pub name: String,
    pub parent: Option<String>,
    pub variability: Variability,
    pub children: Vec<String>,
    pub groups: Vec<Group>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    Requires,
    Excludes,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossTreeConstraint {
    pub kind: ConstraintKind,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureModel {
    pub name: String,
    pub root: String,
    pub features: BTreeMap<String, Feature>,
    pub constraints: Vec<CrossTreeConstraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FeatureModelError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("duplicate feature id `{0}`")]
    DuplicateFeature(String),
    #[error("constraint references unknown feature `{0}`")]
    UnknownConstraintEndpoint(String),
    #[error("constraint `{0}` relates a feature to itself")]
    SelfConstraint(String),
    #[error("group member `{member}` is not a child of `{owner}`")]
    GroupMemberNotChild { owner: String, member: String },
    #[error("feature `{0}` appears in more than one group")]
    MemberInSeveralGroups(String),
    #[error("model has {0} features; enumeration is bounded to {MAX_ENUMERATION_FEATURES}")]
    TooManyFeatures(usize),
}

/// A set of selected feature ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub selected: BTreeSet<String>,
}

impl Configuration {
    pub fn new<I, S>(features: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            selected: features.into_iter().map(Into::into).collect(),
        }
    }

    /// Parses a comma-separated list such as `CD2Java,Types,Class`.
    pub fn from_list(list: &str) -> Self {
        Self::new(list.split(',').map(str::trim).filter(|s| !s.is_empty()))
    }

    pub fn contains(&self, feature: &str) -> bool {
        self.selected.contains(feature)
    }

    pub fn with(&self, feature: &str) -> Self {
        let mut next = self.clone();
        next.selected.insert(feature.to_string());
        next
    }

    pub fn without(&self, feature: &str) -> Self {
        let mut next = self.clone();
        next.selected.remove(feature);
        next
    }

    pub fn to_list(&self) -> String {
        self.selected.iter().cloned().collect::<Vec<_>>().join(",")
    }
}

impl FeatureModel {
    pub fn feature(&self, id: &str) -> Option<&Feature> {
        self.features.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.features.contains_key(id)
    }

    /// Feature ids in depth-first pre-order, following declared child order.
    pub fn preorder(&self) -> Vec<&str> {
        let mut out = Vec::with_capacity(self.features.len());
        let mut stack = vec![self.root.as_str()];
        while let Some(id) = stack.pop() {
            out.push(id);
            if let Some(f) = self.features.get(id) {
                stack.extend(f.children.iter().rev().map(String::as_str));
            }
        }
        out
    }

    /// Features that are neither the root nor forced by a mandatory chain
    /// from the root.
    pub fn optional_features(&self) -> Vec<&str> {
        self.preorder()
            .into_iter()
            .filter(|id| *id != self.root && !self.is_core(id))
            .collect()
    }

    fn is_core(&self, id: &str) -> bool {
        let mut cur = id;
        loop {
            let f = &self.features[cur];
            match &f.parent {
                None => return true,
                Some(p) => {
                    let grouped = self.features[p]
                        .groups
                        .iter()
                        .any(|g| g.members.iter().any(|m| m == cur));
                    if f.variability != Variability::Mandatory || grouped {
                        return false;
                    }
                    cur = p;
                }
            }
        }
    }

    pub fn to_fml(&self) -> String {
        fml::print(self)
    }
}

/// Checks a configuration against the tree semantics and cross-tree
/// constraints. Violations are reported in a stable order: unknown ids,
/// root, then per feature in pre-order (parent, mandatory, xor, or), then
/// constraints in declaration order.
pub fn validate_configuration(model: &FeatureModel, config: &Configuration) -> ValidationReport {
    let mut report = ValidationReport::default();
    for id in &config.selected {
        if !model.contains(id) {
            report.push(Violation::new(
                CFG_UNKNOWN,
                vec![id.clone()],
                format!("feature {id} is not part of model {}", model.name),
            ));
        }
    }
    let sel = |id: &str| config.contains(id);
    if !sel(&model.root) {
        report.push(Violation::new(
            CFG_ROOT,
            vec![model.root.clone()],
            format!("root feature {} not selected", model.root),
        ));
    }
    for id in model.preorder() {
        let f = &model.features[id];
        if let Some(parent) = &f.parent {
            if sel(id) && !sel(parent) {
                report.push(Violation::new(
                    CFG_PARENT,
                    vec![id.to_string(), parent.clone()],
                    format!("parent {parent} of selected {id} not selected"),
                ));
            }
        }
        if !sel(id) {
            continue;
        }
        for child in &f.children {
            let c = &model.features[child];
            if c.variability == Variability::Mandatory && !sel(child) {
                report.push(Violation::new(
                    CFG_MANDATORY,
                    vec![id.to_string(), child.clone()],
                    format!("mandatory child {child} of selected {id} not selected"),
                ));
            }
        }
        for group in &f.groups {
            let picked = group.members.iter().filter(|m| sel(m)).count();
            match group.kind {
                GroupKind::Xor if picked != 1 => report.push(Violation::new(
                    CFG_XOR,
                    group.members.clone(),
                    format!(
                        "xor group of {id} needs exactly one of {{{}}}, {picked} selected",
                        group.members.join(", ")
                    ),
                )),
                GroupKind::Or if picked == 0 => report.push(Violation::new(
                    CFG_OR,
                    group.members.clone(),
                    format!(
                        "or group of {id} needs at least one of {{{}}}",
                        group.members.join(", ")
                    ),
                )),
                _ => {}
            }
        }
    }
    for c in &model.constraints {
        match c.kind {
            ConstraintKind::Requires if sel(&c.lhs) && !sel(&c.rhs) => {
                report.push(Violation::new(
                    CFG_REQUIRES,
                    vec![c.lhs.clone(), c.rhs.clone()],
                    format!("{} requires {}", c.lhs, c.rhs),
                ))
            }
            ConstraintKind::Excludes if sel(&c.lhs) && sel(&c.rhs) => {
                report.push(Violation::new(
                    CFG_EXCLUDES,
                    vec![c.lhs.clone(), c.rhs.clone()],
                    format!("{} excludes {}", c.lhs, c.rhs),
                ))
            }
            _ => {}
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub count: usize,
    /// Present when a listing was requested; sorted lexicographically by
    /// the sorted feature-id tuple.
    pub configurations: Option<Vec<Configuration>>,
}

/// Brute-force enumeration of all valid configurations.
///
/// Every subset of features is encoded as a bit mask and checked against a
/// compiled form of the model semantics (independent of
/// [`validate_configuration`], which the tests cross-check it against).
/// `limit` requests a listing of at most that many configurations; the
/// count is always complete.
pub fn enumerate_configurations(
    model: &FeatureModel,
    limit: Option<usize>,
) -> Result<Enumeration, FeatureModelError> {
    let n = model.features.len();
    if n > MAX_ENUMERATION_FEATURES {
        return Err(FeatureModelError::TooManyFeatures(n));
    }
    let ids: Vec<&str> = model.features.keys().map(String::as_str).collect();
    let bit = |id: &str| -> u32 { 1 << ids.binary_search(&id).expect("feature id") };
    let compiled = Compiled::new(model, &bit);

    let mut count = 0;
    let mut listed: Vec<Vec<&str>> = Vec::new();
    for mask in 0u32..(1u32 << n) {
        if compiled.accepts(mask) {
            count += 1;
            if limit.is_some() {
                listed.push(
                    (0..n)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| ids[i])
                        .collect(),
                );
            }
        }
    }
    let configurations = limit.map(|limit| {
        listed.sort();
        listed
            .into_iter()
            .take(limit)
            .map(Configuration::new)
            .collect()
    });
    Ok(Enumeration {
        count,
        configurations,
    })
}

/// Model semantics lowered to mask tests.
struct Compiled {
    root: u32,
    /// (child, parent)
    parent: Vec<(u32, u32)>,
    /// (owner, mandatory child)
    mandatory: Vec<(u32, u32)>,
    /// (owner, member mask, is_xor)
    groups: Vec<(u32, u32, bool)>,
    requires: Vec<(u32, u32)>,
    excludes: Vec<(u32, u32)>,
}

impl Compiled {
    fn new(model: &FeatureModel, bit: &dyn Fn(&str) -> u32) -> Self {
        let mut c = Compiled {
            root: bit(&model.root),
            parent: Vec::new(),
            mandatory: Vec::new(),
            groups: Vec::new(),
            requires: Vec::new(),
            excludes: Vec::new(),
        };
        for f in model.features.values() {
            let me = bit(&f.id);
            if let Some(p) = &f.parent {
                c.parent.push((me, bit(p)));
                if f.variability == Variability::Mandatory {
                    c.mandatory.push((bit(p), me));
                }
            }
            for g in &f.groups {
                let members = g.members.iter().fold(0, |acc, m| acc | bit(m));
                c.groups.push((me, members, g.kind == GroupKind::Xor));
            }
        }
        for k in &model.constraints {
            let pair = (bit(&k.lhs), bit(&k.rhs));
            match k.kind {
                ConstraintKind::Requires => c.requires.push(pair),
                ConstraintKind::Excludes => c.excludes.push(pair),
            }
        }
        c
    }

    fn accepts(&self, mask: u32) -> bool {
        let has = |b: u32| mask & b != 0;
        has(self.root)
            && self.parent.iter().all(|&(c, p)| !has(c) || has(p))
            && self.mandatory.iter().all(|&(p, c)| !has(p) || has(c))
            && self.groups.iter().all(|&(owner, members, xor)| {
                let picked = (mask & members).count_ones();
                !has(owner) || if xor { picked == 1 } else { picked >= 1 }
            })
            && self.requires.iter().all(|&(l, r)| !has(l) || has(r))
            && self.excludes.iter().all(|&(l, r)| !(has(l) && has(r)))
    }
}
