//! Feature-to-code traceability.
//!
//! The index is built from container regions and persisted as `trace.map`,
//! one line per region:
//!
//! ```text
//! <artifact>:<start>-<end> <component> <feature>[,<feature>...]
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ArtifactContainer;

pub const TRACE_FILE: &str = "trace.map";

/// Inclusive, 1-based line range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LineRange {
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for LineRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TraceRegion {
    pub range: LineRange,
    pub features: BTreeSet<String>,
    pub component: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceIndex {
    pub by_feature: BTreeMap<String, BTreeSet<(String, LineRange)>>,
    pub by_artifact: BTreeMap<String, Vec<TraceRegion>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("trace line {line}: {message}")]
pub struct TraceParseError {
    pub line: usize,
    pub message: String,
}

impl TraceIndex {
    pub fn from_containers<'c>(containers: impl IntoIterator<Item = &'c ArtifactContainer>) -> Self {
        let mut index = TraceIndex::default();
        for c in containers {
            let regions = c
                .regions
                .iter()
                .map(|r| TraceRegion {
                    range: LineRange {
                        start: r.start_line,
                        end: r.end_line(),
                    },
                    features: r.features.clone(),
                    component: r.component.clone(),
                })
                .collect();
            index.insert_artifact(&c.path, regions);
        }
        index
    }

    /// Adds (or replaces) the regions of one artifact, keeping both
    /// mappings in step.
    pub fn insert_artifact(&mut self, path: &str, regions: Vec<TraceRegion>) {
        self.remove_artifact(path);
        for r in &regions {
            for f in &r.features {
                self.by_feature
                    .entry(f.clone())
                    .or_default()
                    .insert((path.to_string(), r.range));
            }
        }
        self.by_artifact.insert(path.to_string(), regions);
    }

    fn remove_artifact(&mut self, path: &str) {
        if self.by_artifact.remove(path).is_none() {
            return;
        }
        for set in self.by_feature.values_mut() {
            set.retain(|(p, _)| p != path);
        }
        self.by_feature.retain(|_, set| !set.is_empty());
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (path, regions) in &self.by_artifact {
            for r in regions {
                let features: Vec<&str> = r.features.iter().map(String::as_str).collect();
                out.push_str(&format!(
                    "{path}:{} {} {}\n",
                    r.range,
                    r.component,
                    features.join(",")
                ));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, TraceParseError> {
        let mut regions: BTreeMap<String, Vec<TraceRegion>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let err = |message: &str| TraceParseError {
                line: line_no,
                message: message.to_string(),
            };
            let mut parts = line.split(' ');
            let (Some(loc), Some(component), Some(features), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(err("expected `<artifact>:<start>-<end> <component> <features>`"));
            };
            let (path, range) = loc.rsplit_once(':').ok_or_else(|| err("missing `:`"))?;
            let (start, end) = range.split_once('-').ok_or_else(|| err("missing `-`"))?;
            let start: usize = start.parse().map_err(|_| err("bad start line"))?;
            let end: usize = end.parse().map_err(|_| err("bad end line"))?;
            if start == 0 || end < start {
                return Err(err("empty or inverted range"));
            }
            regions.entry(path.to_string()).or_default().push(TraceRegion {
                range: LineRange { start, end },
                features: features.split(',').map(str::to_string).collect(),
                component: component.to_string(),
            });
        }
        let mut index = TraceIndex::default();
        for (path, mut rs) in regions {
            rs.sort_by_key(|r| r.range);
            index.insert_artifact(&path, rs);
        }
        Ok(index)
    }

    /// Checks that both mappings describe the same region set and that each
    /// artifact's regions tile its lines `1..=n` without gaps or overlap.
    /// `line_counts` gives `n` per artifact where known.
    pub fn check_consistency(
        &self,
        line_counts: &BTreeMap<String, usize>,
    ) -> Result<(), String> {
        let mut derived: BTreeMap<&str, BTreeSet<(String, LineRange)>> = BTreeMap::new();
        for (path, regions) in &self.by_artifact {
            let mut next = 1;
            for r in regions {
                if r.range.start != next {
                    return Err(format!(
                        "{path}: region {} does not start at line {next}",
                        r.range
                    ));
                }
                next = r.range.end + 1;
                if r.features.is_empty() {
                    return Err(format!("{path}: region {} has no feature", r.range));
                }
                for f in &r.features {
                    derived
                        .entry(f.as_str())
                        .or_default()
                        .insert((path.clone(), r.range));
                }
            }
            if let Some(&n) = line_counts.get(path) {
                if next != n + 1 {
                    return Err(format!("{path}: regions cover {} of {n} lines", next - 1));
                }
            }
        }
        for path in line_counts.keys() {
            if !self.by_artifact.contains_key(path) {
                return Err(format!("{path}: no trace regions"));
            }
        }
        let actual: BTreeMap<&str, BTreeSet<(String, LineRange)>> = self
            .by_feature
            .iter()
            .map(|(f, s)| (f.as_str(), s.clone()))
            .collect();
        if derived != actual {
            return Err("by_feature and by_artifact disagree".to_string());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceQuery {
    Feature(String),
    Artifact(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub artifact: String,
    pub range: LineRange,
    pub component: String,
    pub features: BTreeSet<String>,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let features: Vec<&str> = self.features.iter().map(String::as_str).collect();
        write!(
            f,
            "{}:{} {} {}",
            self.artifact,
            self.range,
            self.component,
            features.join(",")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceResult {
    /// The queried feature or artifact does not occur in the trace.
    pub unknown: bool,
    pub entries: Vec<TraceEntry>,
}

pub fn trace_query(trace: &TraceIndex, query: &TraceQuery) -> TraceResult {
    let region_entry = |path: &str, r: &TraceRegion| TraceEntry {
        artifact: path.to_string(),
        range: r.range,
        component: r.component.clone(),
        features: r.features.clone(),
    };
    let entries: Option<Vec<TraceEntry>> = match query {
        TraceQuery::Feature(f) => trace.by_feature.get(f).map(|set| {
            set.iter()
                .filter_map(|(path, range)| {
                    trace.by_artifact[path]
                        .iter()
                        .find(|r| r.range == *range)
                        .map(|r| region_entry(path, r))
                })
                .collect()
        }),
        TraceQuery::Artifact(path) => trace
            .by_artifact
            .get(path)
            .map(|rs| rs.iter().map(|r| region_entry(path, r)).collect()),
    };
    TraceResult {
        unknown: entries.is_none(),
        entries: entries.unwrap_or_default(),
    }
}
