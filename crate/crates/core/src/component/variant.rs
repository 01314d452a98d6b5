//! Variant descriptions and option resolution.
//!
//! VSP text format:
//!
//! ```text
//! variant IDENT "{"
//!   "model:" path ";"
//!   "features:" "[" IDENT { "," IDENT } "]" ";"
//!   { "option" IDENT "." IDENT "=" value ";" }
//!   { "bind" IDENT "." IDENT "=" quoted-text ";" }
//!   "mode:" ( "generation_time" | "run_time" | "hybrid" ) ";"
//!   "out:" path ";"
//! "}"
//! ```
//!
//! Paths may be bare (up to the `;`) or quoted. Option values are `true`,
//! `false`, an identifier or a quoted string; `option` and `bind` lines may
//! be interleaved.

use std::collections::BTreeMap;
use std::fmt::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use super::{GeneratorComponent, OptionType, OptionValue};
use crate::feature_model::Configuration;
use crate::text::{unexpected, Scanner, SyntaxError, Token};

const SYMBOLS: &[&str] = &["{", "}", "[", "]", ":", ";", ",", ".", "="];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum BindingMode {
    #[default]
    GenerationTime,
    RunTime,
    Hybrid,
}

impl BindingMode {
    pub const ALL: [BindingMode; 3] = [
        BindingMode::GenerationTime,
        BindingMode::RunTime,
        BindingMode::Hybrid,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BindingMode::GenerationTime => "generation_time",
            BindingMode::RunTime => "run_time",
            BindingMode::Hybrid => "hybrid",
        }
    }

    /// Run-time and hybrid variants wire components through generated hooks.
    pub fn uses_hooks(self) -> bool {
        self != BindingMode::GenerationTime
    }
}

impl fmt::Display for BindingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BindingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BindingMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown binding mode `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BindingValue {
    Flag(bool),
    Ident(String),
    Text(String),
}

impl BindingValue {
    fn to_option_value(&self, ty: &OptionType) -> Option<OptionValue> {
        let v = match (self, ty) {
            (BindingValue::Flag(b), OptionType::Flag) => OptionValue::Flag(*b),
            (BindingValue::Ident(s) | BindingValue::Text(s), OptionType::Choice(_)) => {
                OptionValue::Choice(s.clone())
            }
            (BindingValue::Ident(s) | BindingValue::Text(s), OptionType::Text) => {
                OptionValue::Text(s.clone())
            }
            _ => return None,
        };
        v.fits(ty).then_some(v)
    }
}

impl fmt::Display for BindingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BindingValue::Flag(b) => write!(f, "{b}"),
            BindingValue::Ident(s) => f.write_str(s),
            BindingValue::Text(s) => f.write_str(&quote(s)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptionBinding {
    pub component: String,
    pub option: String,
    pub value: BindingValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VpBinding {
    pub component: String,
    pub variation_point: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantSpec {
    pub name: String,
    pub model_path: PathBuf,
    pub configuration: Configuration,
    pub option_bindings: Vec<OptionBinding>,
    pub vp_bindings: Vec<VpBinding>,
    pub mode: BindingMode,
    pub output_path: PathBuf,
}

impl VariantSpec {
    pub fn new(name: &str, configuration: Configuration, mode: BindingMode) -> Self {
        Self {
            name: name.to_string(),
            model_path: PathBuf::new(),
            configuration,
            option_bindings: Vec::new(),
            vp_bindings: Vec::new(),
            mode,
            output_path: PathBuf::new(),
        }
    }

    pub fn bind_option(mut self, component: &str, option: &str, value: BindingValue) -> Self {
        self.option_bindings.push(OptionBinding {
            component: component.to_string(),
            option: option.to_string(),
            value,
        });
        self
    }

    pub fn bind_vp(mut self, component: &str, vp: &str, text: &str) -> Self {
        self.vp_bindings.push(VpBinding {
            component: component.to_string(),
            variation_point: vp.to_string(),
            text: text.to_string(),
        });
        self
    }

    pub fn to_vsp(&self) -> String {
        let mut out = format!("variant {} {{\n", self.name);
        let _ = writeln!(out, "  model: {};", quote(&self.model_path.to_string_lossy()));
        let features: Vec<&str> = self.configuration.selected.iter().map(String::as_str).collect();
        let _ = writeln!(out, "  features: [{}];", features.join(", "));
        for b in &self.option_bindings {
            let _ = writeln!(out, "  option {}.{} = {};", b.component, b.option, b.value);
        }
        for b in &self.vp_bindings {
            let _ = writeln!(
                out,
                "  bind {}.{} = {};",
                b.component,
                b.variation_point,
                quote(&b.text)
            );
        }
        let _ = writeln!(out, "  mode: {};", self.mode);
        let _ = writeln!(out, "  out: {};", quote(&self.output_path.to_string_lossy()));
        out.push_str("}\n");
        out
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn parse_variant_spec(source: &str) -> Result<VariantSpec, SyntaxError> {
    let mut sc = Scanner::new(source, SYMBOLS);
    sc.expect_keyword("variant")?;
    let (name, _) = sc.expect_ident("variant name")?;
    sc.expect_sym("{")?;

    sc.expect_keyword("model")?;
    sc.expect_sym(":")?;
    let model_path = path(&mut sc, "model path")?;
    sc.expect_sym(";")?;

    sc.expect_keyword("features")?;
    sc.expect_sym(":")?;
    sc.expect_sym("[")?;
    let mut features = vec![sc.expect_ident("feature id")?.0];
    while sc.eat_sym(",")? {
        features.push(sc.expect_ident("feature id")?.0);
    }
    sc.expect_sym("]")?;
    sc.expect_sym(";")?;

    let mut option_bindings = Vec::new();
    let mut vp_bindings = Vec::new();
    loop {
        if sc.eat_keyword("option")? {
            let (component, option) = qualified(&mut sc)?;
            sc.expect_sym("=")?;
            let (tok, pos) = sc.next()?;
            let value = match tok {
                Token::Ident("true") => BindingValue::Flag(true),
                Token::Ident("false") => BindingValue::Flag(false),
                Token::Ident(s) => BindingValue::Ident(s.to_string()),
                Token::Str(s) => BindingValue::Text(s),
                other => return Err(unexpected(pos, "option value", &other)),
            };
            sc.expect_sym(";")?;
            option_bindings.push(OptionBinding {
                component,
                option,
                value,
            });
        } else if sc.eat_keyword("bind")? {
            let (component, variation_point) = qualified(&mut sc)?;
            sc.expect_sym("=")?;
            let (text, _) = sc.expect_str("quoted text")?;
            sc.expect_sym(";")?;
            vp_bindings.push(VpBinding {
                component,
                variation_point,
                text,
            });
        } else {
            break;
        }
    }

    sc.expect_keyword("mode")?;
    sc.expect_sym(":")?;
    let (mode, pos) = sc.expect_ident("binding mode")?;
    let mode = mode
        .parse::<BindingMode>()
        .map_err(|msg| SyntaxError::new(pos, msg))?;
    sc.expect_sym(";")?;

    sc.expect_keyword("out")?;
    sc.expect_sym(":")?;
    let output_path = path(&mut sc, "output path")?;
    sc.expect_sym(";")?;
    sc.expect_sym("}")?;
    sc.expect_eof()?;

    Ok(VariantSpec {
        name: name.to_string(),
        model_path,
        configuration: Configuration::new(features),
        option_bindings,
        vp_bindings,
        mode,
        output_path,
    })
}

fn path(sc: &mut Scanner<'_>, what: &str) -> Result<PathBuf, SyntaxError> {
    if matches!(sc.peek()?.0, Token::Str(_)) {
        return Ok(PathBuf::from(sc.expect_str(what)?.0));
    }
    Ok(PathBuf::from(sc.raw_until(';', what)?.0))
}

fn qualified(sc: &mut Scanner<'_>) -> Result<(String, String), SyntaxError> {
    let (component, _) = sc.expect_ident("component id")?;
    sc.expect_sym(".")?;
    let (name, _) = sc.expect_ident("name")?;
    Ok((component.to_string(), name.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OptionError {
    #[error("component `{component}` has no option `{option}`")]
    UnknownOption { component: String, option: String },
    #[error("value {value} does not fit option `{component}.{option}`")]
    IllTyped {
        component: String,
        option: String,
        value: String,
    },
    #[error("option `{component}.{option}` is bound more than once")]
    DuplicateBinding { component: String, option: String },
    #[error("feature {feature} forces `{component}.{option}` = {forced}, but it is bound to {bound}")]
    Contradiction {
        component: String,
        option: String,
        feature: String,
        forced: String,
        bound: String,
    },
    #[error("component `{component}` has no variation point `{variation_point}`")]
    UnknownVariationPoint {
        component: String,
        variation_point: String,
    },
    #[error("value {value:?} does not fit variation point `{component}.{variation_point}`")]
    BadVariationPointValue {
        component: String,
        variation_point: String,
        value: String,
    },
}

/// Resolves every option of `component`: a value forced by a selected
/// feature wins, then an explicit binding, then the declared default. A
/// binding that disagrees with a forced value is an error.
pub fn effective_configuration(
    component: &GeneratorComponent,
    spec: &VariantSpec,
) -> Result<BTreeMap<String, OptionValue>, OptionError> {
    let mut bound: BTreeMap<&str, OptionValue> = BTreeMap::new();
    for b in spec
        .option_bindings
        .iter()
        .filter(|b| b.component == component.id)
    {
        let Some(opt) = component.interface.option(&b.option) else {
            return Err(OptionError::UnknownOption {
                component: component.id.clone(),
                option: b.option.clone(),
            });
        };
        let Some(value) = b.value.to_option_value(&opt.ty) else {
            return Err(OptionError::IllTyped {
                component: component.id.clone(),
                option: b.option.clone(),
                value: b.value.to_string(),
            });
        };
        if bound.insert(&opt.name, value).is_some() {
            return Err(OptionError::DuplicateBinding {
                component: component.id.clone(),
                option: b.option.clone(),
            });
        }
    }

    let mut out = BTreeMap::new();
    for opt in &component.interface.options {
        let forced = opt
            .forced_by
            .iter()
            .find(|(feature, _)| spec.configuration.contains(feature));
        let value = match (forced, bound.get(opt.name.as_str())) {
            (Some((feature, f)), Some(b)) if f != b => {
                return Err(OptionError::Contradiction {
                    component: component.id.clone(),
                    option: opt.name.clone(),
                    feature: feature.clone(),
                    forced: f.to_string(),
                    bound: b.to_string(),
                })
            }
            (Some((_, f)), _) => f.clone(),
            (None, Some(b)) => b.clone(),
            (None, None) => opt.default.clone(),
        };
        out.insert(opt.name.clone(), value);
    }
    Ok(out)
}

/// Variation-point values for `component`: explicit binding or default.
pub fn effective_variation_points(
    component: &GeneratorComponent,
    spec: &VariantSpec,
) -> Result<BTreeMap<String, String>, OptionError> {
    let mut out: BTreeMap<String, String> = component
        .interface
        .variation_points
        .iter()
        .map(|vp| (vp.name.clone(), vp.default.clone()))
        .collect();
    for b in spec.vp_bindings.iter().filter(|b| b.component == component.id) {
        let Some(vp) = component.interface.variation_point(&b.variation_point) else {
            return Err(OptionError::UnknownVariationPoint {
                component: component.id.clone(),
                variation_point: b.variation_point.clone(),
            });
        };
        if !vp.accepts(&b.text) {
            return Err(OptionError::BadVariationPointValue {
                component: component.id.clone(),
                variation_point: b.variation_point.clone(),
                value: b.text.clone(),
            });
        }
        out.insert(vp.name.clone(), b.text.clone());
    }
    Ok(out)
}
