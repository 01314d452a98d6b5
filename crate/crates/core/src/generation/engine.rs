//! Phase pipeline and output commit.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use super::cache::{digest, GenCache};
use super::ootl::validate_syntax;
use super::trace::{TraceIndex, TRACE_FILE};
use super::{ArtifactContainer, ArtifactPlan, Blackboard, BoardReader, BoardView, SyntaxStatus, Topic};
use crate::component::{BindingMode, GeneratorComponent, Phase, VariantContext, VariantSpec};
use crate::composition::{
    effective_bindings, schedule, validate_composition, ComposedGenerator, EffectiveBindings,
};
use crate::feature_model::validate_configuration;
use crate::input_language::{check_context_conditions, ClassDiagram, ContextCondition};
use crate::report::Violation;

pub const GEN_EMIT: &str = "GEN-EMIT";
pub const GEN_SYNTAX: &str = "GEN-SYNTAX";
pub const GEN_HOOK_UNRESOLVED: &str = "GEN-HOOK-UNRESOLVED";

#[derive(Debug, thiserror::Error)]
pub enum GenError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> GenError + '_ {
    move |source| GenError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Outcome of a generation run. When `violations` is non-empty nothing was
/// written and `written`, `skipped_cache_hits` and `trace` are empty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GenerationReport {
    pub written: Vec<String>,
    pub skipped_cache_hits: Vec<String>,
    pub facts_count: usize,
    pub violations: Vec<Violation>,
    pub trace: TraceIndex,
    /// Cache describing the committed output; empty on failure.
    pub cache: GenCache,
}

impl GenerationReport {
    pub fn succeeded(&self) -> bool {
        self.violations.is_empty()
    }

    fn failed(violations: Vec<Violation>) -> Self {
        Self {
            violations,
            ..Self::default()
        }
    }
}

struct Declared<'g> {
    component: &'g GeneratorComponent,
    plan: ArtifactPlan,
}

/// Everything the run knows once the declare phase is over.
struct Prepared<'g> {
    diagram: ClassDiagram,
    board: Blackboard,
    bindings: EffectiveBindings,
    declared: Vec<Declared<'g>>,
}

fn context<'a>(
    spec: &'a VariantSpec,
    bindings: &'a EffectiveBindings,
    component: &str,
) -> VariantContext<'a> {
    static EMPTY_OPTIONS: BTreeMap<String, crate::component::OptionValue> = BTreeMap::new();
    static EMPTY_VPS: BTreeMap<String, String> = BTreeMap::new();
    VariantContext {
        configuration: &spec.configuration,
        mode: spec.mode,
        options: bindings.options.get(component).unwrap_or(&EMPTY_OPTIONS),
        variation_points: bindings
            .variation_points
            .get(component)
            .unwrap_or(&EMPTY_VPS),
    }
}

fn emit_violation(subjects: Vec<String>, message: String) -> Violation {
    Violation::new(GEN_EMIT, subjects, message)
}

/// Runs restrict, transform and declare, stopping at the first phase that
/// reports violations.
fn prepare<'g>(
    composed: &'g ComposedGenerator,
    diagram: &ClassDiagram,
    spec: &VariantSpec,
) -> Result<Prepared<'g>, Vec<Violation>> {
    let cfg = validate_configuration(composed.feature_model(), &spec.configuration);
    if !cfg.valid() {
        return Err(cfg.violations);
    }
    let cmp = validate_composition(composed, spec);
    if !cmp.valid() {
        return Err(cmp.violations);
    }
    let order = schedule(composed, spec).map_err(|e| vec![Violation::from(e)])?;
    let bindings = effective_bindings(composed, spec)?;
    let component = |id: &str| composed.component(id).expect("scheduled component").as_ref();

    let mut conditions: Vec<ContextCondition> = Vec::new();
    for s in order.iter().filter(|s| s.phase == Phase::Restrict) {
        let cx = context(spec, &bindings, &s.component);
        conditions.extend(component(&s.component).logic.conditions(&s.behavior, &cx));
    }
    let restricted = check_context_conditions(diagram, &conditions);
    if !restricted.valid() {
        return Err(restricted.violations);
    }

    let mut diagram = diagram.clone();
    for s in order.iter().filter(|s| s.phase == Phase::Transform) {
        let cx = context(spec, &bindings, &s.component);
        component(&s.component)
            .logic
            .transform(&s.behavior, &mut diagram, &cx)
            .map_err(|v| vec![v])?;
    }

    let emitters: BTreeSet<(&str, &str)> = order
        .iter()
        .filter(|s| s.phase == Phase::Emit)
        .map(|s| (s.component.as_str(), s.behavior.as_str()))
        .collect();
    let mut board = Blackboard::new();
    let mut declared = Vec::new();
    let mut violations = Vec::new();
    let mut paths: BTreeSet<String> = BTreeSet::new();
    for s in order.iter().filter(|s| s.phase == Phase::Declare) {
        let c = component(&s.component);
        let cx = context(spec, &bindings, &s.component);
        let mut view = BoardView::new(&mut board, c);
        let plans = match c.logic.declare(&s.behavior, &diagram, &cx, &mut view) {
            Ok(plans) => plans,
            Err(v) => {
                violations.push(v);
                continue;
            }
        };
        for plan in plans {
            let subjects = vec![c.id.clone(), plan.path.clone()];
            if !is_relative_artifact_path(&plan.path) {
                violations.push(emit_violation(
                    subjects,
                    format!("{} declared an invalid artifact path {:?}", c.id, plan.path),
                ));
            } else if board.holder(&plan.path) != Some(c.id.as_str()) {
                violations.push(emit_violation(
                    subjects,
                    format!("{} declared {} without holding its claim", c.id, plan.path),
                ));
            } else if !emitters.contains(&(c.id.as_str(), plan.behavior.as_str())) {
                violations.push(emit_violation(
                    subjects,
                    format!(
                        "{} declared {} for {}, which is not scheduled to emit",
                        c.id, plan.path, plan.behavior
                    ),
                ));
            } else if !paths.insert(plan.path.clone()) {
                violations.push(emit_violation(
                    subjects,
                    format!("{} is declared twice", plan.path),
                ));
            } else {
                declared.push(Declared { component: c, plan });
            }
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }
    let unresolved = resolve_hooks(&board, spec.mode);
    if !unresolved.is_empty() {
        return Err(unresolved);
    }
    Ok(Prepared {
        diagram,
        board,
        bindings,
        declared,
    })
}

fn is_relative_artifact_path(path: &str) -> bool {
    !path.is_empty()
        && path != TRACE_FILE
        && !path.starts_with('/')
        && path.split('/').all(|seg| !seg.is_empty() && seg != "." && seg != "..")
}

/// Every `hook.required` fact must be met by a `hook.provided` fact with
/// the same subject. Hooks only matter when binding is deferred.
pub fn resolve_hooks(board: &Blackboard, mode: BindingMode) -> Vec<Violation> {
    if !mode.uses_hooks() {
        return Vec::new();
    }
    let provided: BTreeSet<&str> = board
        .facts_on(Topic::HookProvided)
        .map(|f| f.subject.as_str())
        .collect();
    board
        .facts_on(Topic::HookRequired)
        .filter(|f| !provided.contains(f.subject.as_str()))
        .map(|f| {
            Violation::new(
                GEN_HOOK_UNRESOLVED,
                vec![f.producer.clone(), f.subject.clone()],
                format!("{} requires hook {}, which nothing provides", f.producer, f.subject),
            )
        })
        .collect()
}

fn emit_one(
    d: &Declared<'_>,
    prepared: &Prepared<'_>,
    spec: &VariantSpec,
) -> Result<ArtifactContainer, Violation> {
    let c = d.component;
    let cx = context(spec, &prepared.bindings, &c.id);
    let reader = BoardReader::new(&prepared.board, c);
    let container = c
        .logic
        .emit(&d.plan.behavior, &d.plan, &prepared.diagram, &cx, &reader)?;
    if container.path != d.plan.path {
        return Err(emit_violation(
            vec![c.id.clone(), d.plan.path.clone()],
            format!("{} emitted {} for plan {}", c.id, container.path, d.plan.path),
        ));
    }
    if container.regions.is_empty() {
        return Err(emit_violation(
            vec![c.id.clone(), d.plan.path.clone()],
            format!("{} emitted nothing for {}", c.id, d.plan.path),
        ));
    }
    Ok(container)
}

fn syntax_gate(containers: &mut [ArtifactContainer]) -> Vec<Violation> {
    let mut violations = Vec::new();
    for c in containers {
        if let SyntaxStatus::Invalid {
            message,
            line,
            column,
        } = validate_syntax(c)
        {
            violations.push(
                Violation::new(
                    GEN_SYNTAX,
                    vec![c.path.clone()],
                    format!("{}:{line}:{column}: {message}", c.path),
                )
                .at(crate::text::Pos::new(line, column)),
            );
        }
    }
    violations
}

/// Runs every phase in memory and returns the syntax-checked containers,
/// keyed by artifact path. Nothing is written.
pub fn render_artifacts(
    composed: &ComposedGenerator,
    diagram: &ClassDiagram,
    spec: &VariantSpec,
) -> Result<BTreeMap<String, ArtifactContainer>, Vec<Violation>> {
    let prepared = prepare(composed, diagram, spec)?;
    let mut containers = Vec::new();
    let mut violations = Vec::new();
    for d in &prepared.declared {
        match emit_one(d, &prepared, spec) {
            Ok(c) => containers.push(c),
            Err(v) => violations.push(v),
        }
    }
    violations.extend(syntax_gate(&mut containers));
    if !violations.is_empty() {
        return Err(violations);
    }
    Ok(containers.into_iter().map(|c| (c.path.clone(), c)).collect())
}

/// Digest of everything the artifact's content may depend on.
fn cache_key(d: &Declared<'_>, prepared: &Prepared<'_>, spec: &VariantSpec) -> String {
    let c = d.component;
    let plan = &d.plan;
    let mut key = format!(
        "component {} {}\nmode {}\npath {}\nbehavior {}\nsubject {}\n",
        c.id, c.version, spec.mode, plan.path, plan.behavior, plan.subject
    );
    for f in c.realizes.iter().filter(|f| spec.configuration.contains(f)) {
        key.push_str(&format!("feature {f}\n"));
    }
    if let Some(opts) = prepared.bindings.options.get(&c.id) {
        for (name, value) in opts {
            key.push_str(&format!("option {name}={value}\n"));
        }
    }
    let vps = prepared.bindings.variation_points.get(&c.id);
    let mut used: Vec<&String> = plan.variation_points.iter().collect();
    used.sort();
    used.dedup();
    for name in used {
        let value = vps.and_then(|m| m.get(name)).map(String::as_str).unwrap_or("");
        key.push_str(&format!("vp {name}={value:?}\n"));
    }
    let mut facts: BTreeSet<String> = BTreeSet::new();
    for q in &plan.depends_on {
        for f in prepared.board.facts_on(q.topic) {
            if q.subject.as_deref().is_none_or(|s| s == f.subject) {
                facts.insert(f.canonical());
            }
        }
    }
    for f in facts {
        key.push_str(&format!("fact {f}\n"));
    }
    key.push_str("input\n");
    key.push_str(&plan.input);
    digest(key.as_bytes())
}

/// Full regeneration into `out_dir`.
pub fn generate(
    composed: &ComposedGenerator,
    diagram: &ClassDiagram,
    spec: &VariantSpec,
    out_dir: &Path,
) -> Result<GenerationReport, GenError> {
    incremental_generate(composed, diagram, spec, out_dir, &GenCache::new())
}

/// Regenerates only artifacts whose cache key changed. An artifact is
/// reused only if its key matches, the file in `out_dir` still has the
/// recorded content digest and the old trace covers it; anything else is a
/// miss. The output directory is replaced as a whole, so artifacts that
/// are no longer declared disappear.
pub fn incremental_generate(
    composed: &ComposedGenerator,
    diagram: &ClassDiagram,
    spec: &VariantSpec,
    out_dir: &Path,
    cache: &GenCache,
) -> Result<GenerationReport, GenError> {
    let prepared = match prepare(composed, diagram, spec) {
        Ok(p) => p,
        Err(v) => return Ok(GenerationReport::failed(v)),
    };
    let old_trace = fs::read_to_string(out_dir.join(TRACE_FILE))
        .ok()
        .and_then(|t| TraceIndex::parse(&t).ok());

    let mut new_cache = GenCache::new();
    let mut trace = TraceIndex::default();
    let mut files: BTreeMap<String, String> = BTreeMap::new();
    let mut hits = Vec::new();
    let mut containers = Vec::new();
    let mut violations = Vec::new();
    for d in &prepared.declared {
        let key = cache_key(d, &prepared, spec);
        let path = &d.plan.path;
        let reusable = cache
            .get(path)
            .filter(|e| e.key_digest == key)
            .and_then(|e| {
                let content = fs::read_to_string(out_dir.join(path)).ok()?;
                let regions = old_trace.as_ref()?.by_artifact.get(path)?;
                (digest(content.as_bytes()) == e.content_digest)
                    .then(|| (content, regions.clone(), e.content_digest.clone()))
            });
        match reusable {
            Some((content, regions, content_digest)) => {
                trace.insert_artifact(path, regions);
                new_cache.insert(path, key, content_digest);
                files.insert(path.clone(), content);
                hits.push(path.clone());
            }
            None => match emit_one(d, &prepared, spec) {
                Ok(c) => {
                    new_cache.insert(path, key, digest(c.content().as_bytes()));
                    containers.push(c);
                }
                Err(v) => violations.push(v),
            },
        }
    }
    violations.extend(syntax_gate(&mut containers));
    if !violations.is_empty() {
        return Ok(GenerationReport::failed(violations));
    }
    for c in &containers {
        trace.insert_artifact(&c.path, TraceIndex::from_containers([c]).by_artifact[&c.path].clone());
        files.insert(c.path.clone(), c.content());
    }
    commit(out_dir, &files, &trace.render())?;
    let mut written: Vec<String> = containers.into_iter().map(|c| c.path).collect();
    written.sort();
    hits.sort();
    Ok(GenerationReport {
        written,
        skipped_cache_hits: hits,
        facts_count: prepared.board.len(),
        violations: Vec::new(),
        trace,
        cache: new_cache,
    })
}

/// Writes the complete output next to `out_dir` and swaps it in, so a
/// failed write leaves the previous output untouched.
fn commit(out_dir: &Path, files: &BTreeMap<String, String>, trace: &str) -> Result<(), GenError> {
    let parent = match out_dir.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = out_dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    fs::create_dir_all(&parent).map_err(io_err(&parent))?;
    let pid = std::process::id();
    let staging = parent.join(format!(".{name}.staging-{pid}"));
    let old = parent.join(format!(".{name}.old-{pid}"));
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(io_err(&staging))?;
    }
    let result = (|| {
        fs::create_dir_all(&staging).map_err(io_err(&staging))?;
        for (path, content) in files {
            let target = staging.join(path);
            if let Some(dir) = target.parent() {
                fs::create_dir_all(dir).map_err(io_err(dir))?;
            }
            fs::write(&target, content).map_err(io_err(&target))?;
        }
        let trace_path = staging.join(TRACE_FILE);
        fs::write(&trace_path, trace).map_err(io_err(&trace_path))
    })();
    if let Err(e) = result {
        let _ = fs::remove_dir_all(&staging);
        return Err(e);
    }
    if out_dir.exists() {
        fs::rename(out_dir, &old).map_err(io_err(out_dir))?;
        if let Err(source) = fs::rename(&staging, out_dir) {
            let _ = fs::rename(&old, out_dir);
            let _ = fs::remove_dir_all(&staging);
            return Err(GenError::Io {
                path: out_dir.to_path_buf(),
                source,
            });
        }
        fs::remove_dir_all(&old).map_err(io_err(&old))?;
    } else {
        fs::rename(&staging, out_dir).map_err(io_err(out_dir))?;
    }
    Ok(())
}
