use std::collections::BTreeSet;

use super::Topic;

/// Sentinel feature for regions no feature is responsible for.
pub const CORE_FEATURE: &str = "core";

/// A contiguous run of whole lines contributed by one component on behalf
/// of a set of features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub text: String,
    pub features: BTreeSet<String>,
    pub component: String,
    /// 1-based line of the region's first line within the artifact.
    pub start_line: usize,
}

impl Region {
    pub fn line_count(&self) -> usize {
        self.text.matches('\n').count()
    }

    pub fn end_line(&self) -> usize {
        self.start_line + self.line_count() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SyntaxStatus {
    Unchecked,
    Valid,
    Invalid {
        message: String,
        line: u32,
        column: u32,
    },
}

/// In-memory buffer for one output artifact. Nothing reaches the file
/// system until every container of a run has passed the syntax gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtifactContainer {
    pub path: String,
    pub regions: Vec<Region>,
    pub syntax_status: SyntaxStatus,
}

impl ArtifactContainer {
    pub fn new(path: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            regions: Vec::new(),
            syntax_status: SyntaxStatus::Unchecked,
        }
    }

    /// Appends a region. Text is completed to whole lines; an empty feature
    /// list is recorded as [`CORE_FEATURE`].
    pub fn push(&mut self, text: impl Into<String>, features: &[&str], component: &str) {
        let mut text = text.into();
        if text.is_empty() {
            return;
        }
        if !text.ends_with('\n') {
            text.push('\n');
        }
        let mut features: BTreeSet<String> = features.iter().map(|f| f.to_string()).collect();
        if features.is_empty() {
            features.insert(CORE_FEATURE.to_string());
        }
        let start_line = self.line_count() + 1;
        self.regions.push(Region {
            text,
            features,
            component: component.to_string(),
            start_line,
        });
        self.syntax_status = SyntaxStatus::Unchecked;
    }

    pub fn content(&self) -> String {
        self.regions.iter().map(|r| r.text.as_str()).collect()
    }

    pub fn line_count(&self) -> usize {
        self.regions.iter().map(Region::line_count).sum()
    }
}

/// Restriction of a consumed topic an artifact depends on.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FactQuery {
    pub topic: Topic,
    /// `None` selects every fact on the topic.
    pub subject: Option<String>,
}

/// An artifact a component announces during the declare phase. The plan
/// carries everything the emitter depends on, which is what makes the
/// artifact's cache key complete.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtifactPlan {
    pub path: String,
    /// Emit behavior that fills the artifact.
    pub behavior: String,
    /// Model element the artifact is generated from.
    pub subject: String,
    /// Canonical text of the input elements the emitter reads.
    pub input: String,
    pub depends_on: Vec<FactQuery>,
    /// Names of variation points the emitter reads.
    pub variation_points: Vec<String>,
}

impl ArtifactPlan {
    pub fn new(path: impl Into<String>, behavior: &str, subject: &str) -> Self {
        Self {
            path: path.into(),
            behavior: behavior.to_string(),
            subject: subject.to_string(),
            input: String::new(),
            depends_on: Vec::new(),
            variation_points: Vec::new(),
        }
    }

    pub fn input(mut self, text: impl Into<String>) -> Self {
        self.input = text.into();
        self
    }

    pub fn depends_on(mut self, topic: Topic, subject: Option<&str>) -> Self {
        self.depends_on.push(FactQuery {
            topic,
            subject: subject.map(str::to_string),
        });
        self
    }

    pub fn uses_vp(mut self, name: &str) -> Self {
        self.variation_points.push(name.to_string());
        self
    }
}
