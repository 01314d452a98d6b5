use std::collections::BTreeSet;

use cgpl_core::feature_model::{
    enumerate_configurations, parse_feature_model, validate_configuration, Configuration,
};
use cgpl_core::reference::{reference_model, REFERENCE_FML};
use proptest::prelude::*;

/// A random model kept in a flat form the oracle below can read directly.
#[derive(Debug, Clone)]
struct Shape {
    /// `parent[i]` for features 1.., feature 0 is the root.
    parent: Vec<usize>,
    mandatory: Vec<bool>,
    /// (owner, xor?, members)
    groups: Vec<(usize, bool, Vec<usize>)>,
    /// (lhs, requires?, rhs)
    constraints: Vec<(usize, bool, usize)>,
}

fn name(i: usize) -> String {
    format!("F{i}")
}

impl Shape {
    fn len(&self) -> usize {
        self.parent.len()
    }

    fn children(&self, p: usize) -> Vec<usize> {
        (1..self.len()).filter(|&i| self.parent[i] == p).collect()
    }

    fn fml(&self) -> String {
        fn node(s: &Shape, i: usize, out: &mut String) {
            out.push_str(&name(i));
            out.push(if i == 0 || s.mandatory[i] { '!' } else { '?' });
            let kids = s.children(i);
            let groups: Vec<_> = s.groups.iter().filter(|g| g.0 == i).collect();
            if kids.is_empty() {
                out.push('\n');
                return;
            }
            out.push_str(" {\n");
            for k in kids {
                node(s, k, out);
            }
            for (_, xor, members) in groups {
                let m: Vec<String> = members.iter().map(|&m| name(m)).collect();
                out.push_str(&format!("{} {{ {} }}\n", if *xor { "xor" } else { "or" }, m.join(", ")));
            }
            out.push_str("}\n");
        }
        let mut out = "featuremodel M {\n".to_string();
        node(self, 0, &mut out);
        out.push_str("}\nconstraints {\n");
        for (l, req, r) in &self.constraints {
            out.push_str(&format!(
                "{} {} {};\n",
                name(*l),
                if *req { "requires" } else { "excludes" },
                name(*r)
            ));
        }
        out.push_str("}\n");
        out
    }

    /// Direct reading of the tree semantics over a selection bitmask.
    fn oracle(&self, mask: u32) -> bool {
        let sel = |i: usize| mask & (1 << i) != 0;
        if !sel(0) {
            return false;
        }
        for i in 1..self.len() {
            let p = self.parent[i];
            if sel(i) && !sel(p) {
                return false;
            }
            if sel(p) && self.mandatory[i] && !sel(i) {
                return false;
            }
        }
        for (owner, xor, members) in &self.groups {
            if !sel(*owner) {
                continue;
            }
            let n = members.iter().filter(|&&m| sel(m)).count();
            if (*xor && n != 1) || (!*xor && n == 0) {
                return false;
            }
        }
        self.constraints
            .iter()
            .all(|&(l, req, r)| if req { !sel(l) || sel(r) } else { !(sel(l) && sel(r)) })
    }

    fn config(&self, mask: u32) -> Configuration {
        Configuration::new((0..self.len()).filter(|i| mask & (1 << i) != 0).map(name))
    }
}

fn arb_shape() -> impl Strategy<Value = Shape> {
    (2usize..=9)
        .prop_flat_map(|n| {
            (
                (1..n).map(|i| 0..i).collect::<Vec<_>>(),
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec((0..n, any::<bool>(), 0..n), 0..3),
                proptest::collection::vec((any::<bool>(), any::<u32>()), n),
            )
        })
        .prop_map(|(parents, mandatory, constraints, group_seeds)| {
            let mut parent = vec![0];
            parent.extend(parents);
            let mut shape = Shape {
                parent,
                mandatory,
                groups: Vec::new(),
                constraints: constraints.into_iter().filter(|(l, _, r)| l != r).collect(),
            };
            for (owner, (xor, seed)) in group_seeds.into_iter().enumerate() {
                let members: Vec<usize> = shape
                    .children(owner)
                    .into_iter()
                    .filter(|c| seed & (1 << (c % 32)) != 0)
                    .collect();
                if members.len() >= 2 {
                    shape.groups.push((owner, xor, members));
                }
            }
            shape
        })
}

#[test]
fn reference_model_has_32_configurations_and_agrees_with_oracle() {
    let model = reference_model();
    let e = enumerate_configurations(&model, Some(usize::MAX)).unwrap();
    assert_eq!(e.count, 32);
    let listed: BTreeSet<Configuration> = e.configurations.unwrap().into_iter().collect();
    assert_eq!(listed.len(), 32);

    // CD2Java, Types and Class are forced. The five optional features only
    // require Class, so any subset of them is valid.
    let features = ["CD2Java", "Types", "Class", "Enum", "Interface", "DefaultConstructor", "Builder", "Factory"];
    let mut valid = 0;
    for mask in 0u32..256 {
        let config = Configuration::new(
            features.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, f)| *f),
        );
        let expected = mask & 0b111 == 0b111;
        assert_eq!(validate_configuration(&model, &config).valid(), expected, "{config:?}");
        assert_eq!(listed.contains(&config), expected);
        valid += expected as usize;
    }
    assert_eq!(valid, 32);
}

#[test]
fn reference_fml_round_trips() {
    let model = parse_feature_model(REFERENCE_FML).unwrap();
    assert_eq!(parse_feature_model(&model.to_fml()).unwrap(), model);
}

proptest! {
    #[test]
    fn enumeration_and_validation_agree_with_oracle(shape in arb_shape()) {
        let model = parse_feature_model(&shape.fml()).unwrap();
        let n = shape.len();
        let mut expected = 0;
        for mask in 0u32..(1 << n) {
            let ok = shape.oracle(mask);
            expected += ok as usize;
            prop_assert_eq!(validate_configuration(&model, &shape.config(mask)).valid(), ok);
        }
        let e = enumerate_configurations(&model, Some(usize::MAX)).unwrap();
        prop_assert_eq!(e.count, expected);
        let listed = e.configurations.unwrap();
        prop_assert_eq!(listed.len(), expected);
        for c in &listed {
            prop_assert!(validate_configuration(&model, c).valid());
        }
    }

    #[test]
    fn printed_models_parse_back(shape in arb_shape()) {
        let model = parse_feature_model(&shape.fml()).unwrap();
        prop_assert_eq!(parse_feature_model(&model.to_fml()).unwrap(), model);
    }
}
