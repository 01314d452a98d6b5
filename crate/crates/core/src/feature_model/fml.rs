//! FML, the textual feature-model format.
//!
//! ```text
//! model  := "featuremodel" IDENT "{" node "}" [ "constraints" "{" { ctc } "}" ]
//! node   := IDENT marker [ "{" { node | group } "}" ]
//! marker := "!" | "?"
//! group  := ( "xor" | "or" ) "{" IDENT { "," IDENT } "}"
//! ctc    := IDENT ( "requires" | "excludes" ) IDENT ";"
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use super::{
    ConstraintKind, CrossTreeConstraint, Feature, FeatureModel, FeatureModelError, Group,
    GroupKind, Variability,
};
use crate::text::{unexpected, Scanner, Token};

const SYMBOLS: &[&str] = &["{", "}", "!", "?", ",", ";"];

pub fn parse_feature_model(source: &str) -> Result<FeatureModel, FeatureModelError> {
    let mut sc = Scanner::new(source, SYMBOLS);
    sc.expect_keyword("featuremodel")?;
    let (name, _) = sc.expect_ident("model name")?;
    sc.expect_sym("{")?;
    let mut features = BTreeMap::new();
    let root = parse_node(&mut sc, None, &mut features)?;
    sc.expect_sym("}")?;

    let mut constraints = Vec::new();
    if sc.eat_keyword("constraints")? {
        sc.expect_sym("{")?;
        while !sc.eat_sym("}")? {
            let (lhs, _) = sc.expect_ident("feature id")?;
            let (kw, pos) = sc.expect_ident("`requires` or `excludes`")?;
            let kind = match kw {
                "requires" => ConstraintKind::Requires,
                "excludes" => ConstraintKind::Excludes,
                other => {
                    return Err(unexpected(pos, "`requires` or `excludes`", &Token::Ident(other)).into())
                }
            };
            let (rhs, _) = sc.expect_ident("feature id")?;
            sc.expect_sym(";")?;
            constraints.push(CrossTreeConstraint {
                kind,
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
    }
    sc.expect_eof()?;

    for c in &constraints {
        for end in [&c.lhs, &c.rhs] {
            if !features.contains_key(end) {
                return Err(FeatureModelError::UnknownConstraintEndpoint(end.clone()));
            }
        }
        if c.lhs == c.rhs {
            return Err(FeatureModelError::SelfConstraint(c.lhs.clone()));
        }
    }

    Ok(FeatureModel {
        name: name.to_string(),
        root,
        features,
        constraints,
    })
}

fn parse_node(
    sc: &mut Scanner<'_>,
    parent: Option<&str>,
    features: &mut BTreeMap<String, Feature>,
) -> Result<String, FeatureModelError> {
    let (id, _) = sc.expect_ident("feature id")?;
    let (marker, pos) = sc.next()?;
    let variability = match marker {
        Token::Sym("!") => Variability::Mandatory,
        Token::Sym("?") => Variability::Optional,
        other => return Err(unexpected(pos, "`!` or `?`", &other).into()),
    };
    if features.contains_key(id) {
        return Err(FeatureModelError::DuplicateFeature(id.to_string()));
    }
    features.insert(
        id.to_string(),
        Feature {
            id: id.to_string(),
            name: id.to_string(),
            parent: parent.map(str::to_string),
            variability,
            children: Vec::new(),
            groups: Vec::new(),
        },
    );

    let mut children = Vec::new();
    let mut groups = Vec::new();
    if sc.eat_sym("{")? {
        while !sc.eat_sym("}")? {
            let is_group = matches!(sc.peek_nth(0)?, Token::Ident("xor" | "or"))
                && sc.peek_nth(1)? == Token::Sym("{");
            if is_group {
                let (kw, _) = sc.expect_ident("group kind")?;
                let kind = if kw == "xor" { GroupKind::Xor } else { GroupKind::Or };
                sc.expect_sym("{")?;
                let mut members = vec![sc.expect_ident("group member")?.0.to_string()];
                while sc.eat_sym(",")? {
                    members.push(sc.expect_ident("group member")?.0.to_string());
                }
                sc.expect_sym("}")?;
                groups.push(Group { kind, members });
            } else {
                children.push(parse_node(sc, Some(id), features)?);
            }
        }
    }

    let mut grouped = BTreeSet::new();
    for g in &groups {
        for m in &g.members {
            if !children.contains(m) {
                return Err(FeatureModelError::GroupMemberNotChild {
                    owner: id.to_string(),
                    member: m.clone(),
                });
            }
            if !grouped.insert(m.clone()) {
                return Err(FeatureModelError::MemberInSeveralGroups(m.clone()));
            }
        }
    }
    let f = features.get_mut(id).expect("inserted above");
    f.children = children;
    f.groups = groups;
    Ok(id.to_string())
}

pub(super) fn print(model: &FeatureModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "featuremodel {} {{", model.name);
    print_node(model, &model.root, 1, &mut out);
    out.push_str("}\n");
    if !model.constraints.is_empty() {
        out.push_str("constraints {\n");
        for c in &model.constraints {
            let kw = match c.kind {
                ConstraintKind::Requires => "requires",
                ConstraintKind::Excludes => "excludes",
            };
            let _ = writeln!(out, "  {} {kw} {};", c.lhs, c.rhs);
        }
        out.push_str("}\n");
    }
    out
}

fn print_node(model: &FeatureModel, id: &str, depth: usize, out: &mut String) {
    let f = &model.features[id];
    let indent = "  ".repeat(depth);
    let marker = match f.variability {
        Variability::Mandatory => '!',
        Variability::Optional => '?',
    };
    let _ = write!(out, "{indent}{id}{marker}");
    if f.children.is_empty() && f.groups.is_empty() {
        out.push('\n');
        return;
    }
    out.push_str(" {\n");
    for child in &f.children {
        print_node(model, child, depth + 1, out);
    }
    for g in &f.groups {
        let kw = match g.kind {
            GroupKind::Xor => "xor",
            GroupKind::Or => "or",
        };
        let _ = writeln!(out, "{indent}  {kw} {{ {} }}", g.members.join(", "));
    }
    let _ = writeln!(out, "{indent}}}");
}
