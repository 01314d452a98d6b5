use cgpl_core::input_language::{
    check_context_conditions, core_conditions, parse_class_diagram, ClassDiagram, ContextCondition,
    Finding,
};
use proptest::prelude::*;

const NAMES: [&str; 6] = ["Person", "Order", "Named", "Color", "Item", "Log"];

/// Random CDL text over a small name pool, so references resolve only
/// sometimes and duplicates occur.
fn arb_cdl() -> impl Strategy<Value = String> {
    let decl = (0usize..3, 0usize..6, proptest::option::of(0usize..6), proptest::collection::vec(0usize..6, 0..3), 0usize..3)
        .prop_map(|(kind, name, sup, refs, tag)| {
            let name = NAMES[name];
            match kind {
                0 => {
                    let mut s = String::new();
                    if tag == 1 {
                        s.push_str("<<nobuilder>> ");
                    }
                    s.push_str(&format!("class {name}"));
                    if let Some(sup) = sup {
                        s.push_str(&format!(" extends {}", NAMES[sup]));
                    }
                    s.push_str(" {");
                    for (i, r) in refs.iter().enumerate() {
                        let ty = if *r < 2 { ["int", "string"][*r] } else { NAMES[*r] };
                        s.push_str(&format!(" a{i}: {ty};"));
                    }
                    s.push_str(" }");
                    s
                }
                1 => format!("interface {name} {{ get(): {}; }}", NAMES[refs.first().copied().unwrap_or(0)]),
                _ => format!("enum {name} {{ A, B }}"),
            }
        });
    proptest::collection::vec(decl, 0..6)
        .prop_map(|decls| format!("classdiagram D {{\n{}\n}}\n", decls.join("\n")))
}

fn canonical(d: &ClassDiagram) -> Vec<String> {
    d.types.iter().map(|t| t.canonical_text()).collect()
}

fn codes_of(d: &ClassDiagram, conditions: &[ContextCondition]) -> Vec<(String, Vec<String>)> {
    check_context_conditions(d, conditions)
        .violations
        .into_iter()
        .map(|v| (v.code, v.subjects))
        .collect()
}

fn extra_condition() -> ContextCondition {
    ContextCondition::new("X-LOG", "no class named Log", "test", |cx| {
        cx.diagram
            .classes()
            .filter(|c| c.name == "Log")
            .map(|c| Finding::new(&c.name, "Log is reserved", c.pos))
            .collect()
    })
}

proptest! {
    #[test]
    fn printed_diagrams_parse_back(src in arb_cdl()) {
        let d = parse_class_diagram(&src).unwrap();
        let again = parse_class_diagram(&d.to_cdl()).unwrap();
        prop_assert_eq!(&again.name, &d.name);
        prop_assert_eq!(canonical(&again), canonical(&d));
    }

    /// Adding a condition set only adds that set's findings: each
    /// condition's verdict is independent of which others run.
    #[test]
    fn conditions_compose_modularly(src in arb_cdl(), mask in 0u32..64) {
        let d = parse_class_diagram(&src).unwrap();
        let mut all = core_conditions();
        all.push(extra_condition());
        let chosen: Vec<ContextCondition> = all
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, c)| c.clone())
            .collect();
        let mut expected = Vec::new();
        for c in &chosen {
            expected.extend(codes_of(&d, std::slice::from_ref(c)));
        }
        prop_assert_eq!(codes_of(&d, &chosen), expected);
    }
}

#[test]
fn clashing_condition_codes_are_reported() {
    let mut conditions = core_conditions();
    conditions.push(ContextCondition::new("CC-01", "again", "plugin", |_| Vec::new()));
    let d = parse_class_diagram("classdiagram D { }").unwrap();
    let report = check_context_conditions(&d, &conditions);
    assert_eq!(report.codes(), ["CC-CODE-CLASH"]);
    assert_eq!(report.violations[0].subjects, ["core", "plugin"]);
}
