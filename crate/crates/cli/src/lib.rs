//! The `cgpl` command line: validate configurations, enumerate variants,
//! derive composed generators, generate code and query traces.
//!
//! [`run`] does all the work and returns the exit code together with the
//! text for both streams, so the binary is a thin wrapper and tests can
//! call it in-process.

use std::ffi::OsString;
use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use cgpl_core::component::{parse_variant_spec, Registry, VariantSpec};
use cgpl_core::composition::{derive_variant, effective_bindings, schedule, ComposedGenerator, DeriveError};
use cgpl_core::feature_model::{
    enumerate_configurations, parse_feature_model, validate_configuration, Configuration,
    FeatureModel,
};
use cgpl_core::generation::{
    generate, incremental_generate, trace_query, GenCache, GenerationReport, TraceIndex,
    TraceQuery, CACHE_FILE, TRACE_FILE,
};
use cgpl_core::input_language::{parse_class_diagram, ClassDiagram};
use cgpl_core::reference::{build_reference_registry, reference_components, reference_model};
use cgpl_core::report::Violation;
use clap::{ArgGroup, Parser, Subcommand};

pub const EXIT_OK: i32 = 0;
/// Invalid configuration, input model or spec file.
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_COMPOSITION: i32 = 2;
pub const EXIT_GENERATION: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "cgpl", version, about = "Derive and run code generator variants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a configuration against the feature model.
    #[command(group(ArgGroup::new("selection").required(true).args(["config", "spec"])))]
    Validate {
        /// Feature model in FML; the built-in reference model if omitted.
        #[arg(short, long)]
        model: Option<PathBuf>,
        /// Comma-separated feature ids.
        #[arg(short, long)]
        config: Option<String>,
        /// Take the configuration from a variant spec.
        #[arg(short, long)]
        spec: Option<PathBuf>,
    },
    /// Count (and optionally list) the valid configurations.
    Enumerate {
        #[arg(short, long)]
        model: Option<PathBuf>,
        #[arg(long)]
        list: bool,
    },
    /// Resolve, compose and validate the generator for a variant spec.
    Derive {
        #[arg(short, long)]
        model: Option<PathBuf>,
        #[arg(short, long)]
        spec: PathBuf,
    },
    /// Run the derived generator on the spec's class diagram.
    Generate {
        #[arg(short, long)]
        model: Option<PathBuf>,
        #[arg(short, long)]
        spec: PathBuf,
        /// Reuse unchanged artifacts recorded in the cache.
        #[arg(long, requires = "cache")]
        incremental: bool,
        /// Directory holding the generation cache.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Look up trace regions in the spec's generated output.
    #[command(group(ArgGroup::new("query").required(true).args(["feature", "artifact"])))]
    Trace {
        #[arg(short, long)]
        spec: PathBuf,
        #[arg(long)]
        feature: Option<String>,
        #[arg(long)]
        artifact: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    lines: Vec<String>,
}

impl Failure {
    fn new(code: i32, line: impl Into<String>) -> Self {
        Self {
            code,
            lines: vec![line.into()],
        }
    }

    fn violations(code: i32, violations: &[Violation]) -> Self {
        Self {
            code,
            lines: violations.iter().map(Violation::to_string).collect(),
        }
    }
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut stdout = String::new();
    let result = match cli.command {
        Command::Validate {
            model,
            config,
            spec,
        } => validate(model.as_deref(), config.as_deref(), spec.as_deref(), &mut stdout),
        Command::Enumerate { model, list } => enumerate(model.as_deref(), list, &mut stdout),
        Command::Derive { model, spec } => derive(model.as_deref(), &spec, &mut stdout),
        Command::Generate {
            model,
            spec,
            incremental,
            cache,
        } => run_generate(
            model.as_deref(),
            &spec,
            cache.as_deref().filter(|_| incremental),
            &mut stdout,
        ),
        Command::Trace {
            spec,
            feature,
            artifact,
        } => {
            let query = match (feature, artifact) {
                (Some(f), _) => TraceQuery::Feature(f),
                (None, Some(a)) => TraceQuery::Artifact(a),
                (None, None) => unreachable!("clap enforces the query group"),
            };
            trace(&spec, &query, &mut stdout)
        }
    };
    match result {
        Ok(code) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(f) => {
            let mut stderr = String::new();
            for line in f.lines {
                let _ = writeln!(stderr, "{line}");
            }
            Outcome {
                code: f.code,
                stdout,
                stderr,
            }
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))
}

fn load_model(path: Option<&Path>) -> Result<Arc<FeatureModel>, Failure> {
    let Some(path) = path else {
        return Ok(reference_model());
    };
    parse_feature_model(&read(path)?)
        .map(Arc::new)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))
}

fn load_registry(model: Option<&Path>) -> Result<Registry, Failure> {
    if model.is_none() {
        return Ok(build_reference_registry());
    }
    Registry::new(load_model(model)?, reference_components())
        .map_err(|e| Failure::new(EXIT_COMPOSITION, format!("component registration: {e}")))
}

/// Reads a variant spec and resolves its relative paths against the
/// directory the spec lives in.
fn load_spec(path: &Path) -> Result<VariantSpec, Failure> {
    let mut spec = parse_variant_spec(&read(path)?)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new(""));
    if spec.model_path.is_relative() {
        spec.model_path = base.join(&spec.model_path);
    }
    if spec.output_path.is_relative() {
        spec.output_path = base.join(&spec.output_path);
    }
    Ok(spec)
}

fn load_diagram(spec: &VariantSpec) -> Result<ClassDiagram, Failure> {
    let path = &spec.model_path;
    parse_class_diagram(&read(path)?)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))
}

fn validate(
    model: Option<&Path>,
    config: Option<&str>,
    spec: Option<&Path>,
    out: &mut String,
) -> Result<i32, Failure> {
    let model = load_model(model)?;
    let config = match (config, spec) {
        (Some(list), _) => Configuration::from_list(list),
        (None, Some(spec)) => load_spec(spec)?.configuration,
        (None, None) => unreachable!("clap enforces the selection group"),
    };
    let report = validate_configuration(&model, &config);
    if report.valid() {
        out.push_str("valid\n");
        return Ok(EXIT_OK);
    }
    out.push_str("invalid\n");
    Err(Failure::violations(EXIT_INVALID, &report.violations))
}

fn enumerate(model: Option<&Path>, list: bool, out: &mut String) -> Result<i32, Failure> {
    let model = load_model(model)?;
    let limit = list.then_some(usize::MAX);
    let e = enumerate_configurations(&model, limit)
        .map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
    let _ = writeln!(out, "{}", e.count);
    for c in e.configurations.unwrap_or_default() {
        let _ = writeln!(out, "{}", c.to_list());
    }
    Ok(EXIT_OK)
}

fn derived(model: Option<&Path>, spec: &VariantSpec) -> Result<ComposedGenerator, Failure> {
    let registry = load_registry(model)?;
    derive_variant(&registry, spec).map_err(|e| match e {
        DeriveError::Configuration(r) => Failure::violations(EXIT_INVALID, &r.violations),
        DeriveError::Resolve(e) => Failure::new(EXIT_INVALID, e.to_string()),
        DeriveError::Composition(e) => Failure::violations(EXIT_COMPOSITION, &[e.into()]),
        DeriveError::Invalid(r) => Failure::violations(EXIT_COMPOSITION, &r.violations),
    })
}

fn derive(model: Option<&Path>, spec_path: &Path, out: &mut String) -> Result<i32, Failure> {
    let spec = load_spec(spec_path)?;
    let composed = derived(model, &spec)?;
    let bindings = effective_bindings(&composed, &spec)
        .map_err(|v| Failure::violations(EXIT_COMPOSITION, &v))?;
    let order = schedule(&composed, &spec).map_err(|e| Failure::violations(EXIT_COMPOSITION, &[e.into()]))?;

    let _ = writeln!(out, "variant {}", spec.name);
    let _ = writeln!(out, "mode {}", spec.mode);
    out.push_str("components\n");
    let mut components: Vec<_> = composed.components().iter().collect();
    components.sort_by(|a, b| a.id.cmp(&b.id));
    for c in components {
        let _ = writeln!(out, "  {} {}", c.id, c.version);
    }
    out.push_str("options\n");
    for (component, options) in &bindings.options {
        for (name, value) in options {
            let _ = writeln!(out, "  {component}.{name} = {value}");
        }
    }
    out.push_str("variation points\n");
    for (component, vps) in &bindings.variation_points {
        for (name, value) in vps {
            let _ = writeln!(out, "  {component}.{name} = {value:?}");
        }
    }
    out.push_str("schedule\n");
    for s in order {
        let _ = writeln!(out, "  {s}");
    }
    Ok(EXIT_OK)
}

/// Exit code for a failed generation run, by the stage that produced the
/// violations.
fn generation_exit_code(violations: &[Violation]) -> i32 {
    let stage = |v: &Violation| {
        if v.code.starts_with("CMP-") {
            EXIT_COMPOSITION
        } else if ["CFG-", "CC-", "FG-"].iter().any(|p| v.code.starts_with(p)) {
            EXIT_INVALID
        } else {
            EXIT_GENERATION
        }
    };
    violations.iter().map(stage).max().unwrap_or(EXIT_GENERATION)
}

fn run_generate(
    model: Option<&Path>,
    spec_path: &Path,
    cache_dir: Option<&Path>,
    out: &mut String,
) -> Result<i32, Failure> {
    let spec = load_spec(spec_path)?;
    let composed = derived(model, &spec)?;
    let diagram = load_diagram(&spec)?;
    let io_failure = |e: &dyn std::fmt::Display| Failure::new(EXIT_GENERATION, format!("GEN-IO: {e}"));

    let report: GenerationReport = match cache_dir {
        None => generate(&composed, &diagram, &spec, &spec.output_path),
        Some(dir) => {
            let cache = fs::read_to_string(dir.join(CACHE_FILE))
                .map(|t| GenCache::parse(&t))
                .unwrap_or_default();
            incremental_generate(&composed, &diagram, &spec, &spec.output_path, &cache)
        }
    }
    .map_err(|e| io_failure(&e))?;
    if !report.succeeded() {
        return Err(Failure::violations(
            generation_exit_code(&report.violations),
            &report.violations,
        ));
    }
    if let Some(dir) = cache_dir {
        fs::create_dir_all(dir)
            .and_then(|_| fs::write(dir.join(CACHE_FILE), report.cache.render()))
            .map_err(|e| io_failure(&e))?;
    }

    let _ = writeln!(out, "written {}", report.written.len());
    for p in &report.written {
        let _ = writeln!(out, "  {p}");
    }
    let _ = writeln!(out, "cache hits {}", report.skipped_cache_hits.len());
    for p in &report.skipped_cache_hits {
        let _ = writeln!(out, "  {p}");
    }
    let _ = writeln!(out, "facts {}", report.facts_count);
    let _ = writeln!(out, "trace {}", spec.output_path.join(TRACE_FILE).display());
    Ok(EXIT_OK)
}

fn trace(spec_path: &Path, query: &TraceQuery, out: &mut String) -> Result<i32, Failure> {
    let spec = load_spec(spec_path)?;
    let path = spec.output_path.join(TRACE_FILE);
    let index = TraceIndex::parse(&read(&path)?)
        .map_err(|e| Failure::new(EXIT_GENERATION, format!("{}: {e}", path.display())))?;
    let result = trace_query(&index, query);
    if result.unknown {
        let what = match query {
            TraceQuery::Feature(f) => format!("feature {f}"),
            TraceQuery::Artifact(a) => format!("artifact {a}"),
        };
        return Err(Failure::new(EXIT_INVALID, format!("no trace regions for {what}")));
    }
    for e in result.entries {
        let _ = writeln!(out, "{e}");
    }
    Ok(EXIT_OK)
}
