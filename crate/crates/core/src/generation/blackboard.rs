//! Generation-time fact exchange.
//!
//! Components never talk to each other directly. During the declare phase
//! they publish facts under a closed topic ontology and claim the artifact
//! paths they intend to write; emitters later read the facts their
//! interface says they consume.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::component::GeneratorComponent;
use crate::report::Violation;

pub const GEN_FACT: &str = "GEN-FACT";
pub const GEN_CLAIM_CONFLICT: &str = "GEN-CLAIM-CONFLICT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Topic {
    TypeGenerated,
    ConstructorGenerated,
    MethodGenerated,
    ArtifactClaimed,
    HookProvided,
    HookRequired,
}

impl Topic {
    pub const ALL: [Topic; 6] = [
        Topic::TypeGenerated,
        Topic::ConstructorGenerated,
        Topic::MethodGenerated,
        Topic::ArtifactClaimed,
        Topic::HookProvided,
        Topic::HookRequired,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Topic::TypeGenerated => "type.generated",
            Topic::ConstructorGenerated => "constructor.generated",
            Topic::MethodGenerated => "method.generated",
            Topic::ArtifactClaimed => "artifact.claimed",
            Topic::HookProvided => "hook.provided",
            Topic::HookRequired => "hook.required",
        }
    }
}

impl fmt::Display for Topic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Topic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Topic::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("`{s}` is not a topic of the fact ontology"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fact {
    pub topic: Topic,
    pub producer: String,
    pub subject: String,
    pub payload: BTreeMap<String, String>,
}

impl Fact {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.payload.get(key).map(String::as_str)
    }

    /// One-line canonical form, used in cache keys.
    pub fn canonical(&self) -> String {
        let payload: Vec<String> = self
            .payload
            .iter()
            .map(|(k, v)| format!("{k}={v:?}"))
            .collect();
        format!(
            "{} {} {} {{{}}}",
            self.topic,
            self.producer,
            self.subject,
            payload.join(",")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("artifact {path} is claimed by {holder}; {claimant} cannot claim it")]
pub struct ClaimConflict {
    pub path: String,
    pub holder: String,
    pub claimant: String,
}

impl From<ClaimConflict> for Violation {
    fn from(c: ClaimConflict) -> Self {
        let message = c.to_string();
        Violation::new(
            GEN_CLAIM_CONFLICT,
            vec![c.path, c.holder, c.claimant],
            message,
        )
    }
}

type FactKey = (Topic, String, String);

/// Append-only store of facts plus first-writer-wins artifact claims.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Blackboard {
    facts: BTreeMap<FactKey, Fact>,
    claims: BTreeMap<String, String>,
}

impl Blackboard {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `component` as the owner of `path` and publishes an
    /// `artifact.claimed` fact. Claiming a path twice from the same
    /// component is a no-op.
    pub fn claim_artifact(&mut self, path: &str, component: &str) -> Result<(), ClaimConflict> {
        if let Some(holder) = self.claims.get(path) {
            if holder == component {
                return Ok(());
            }
            return Err(ClaimConflict {
                path: path.to_string(),
                holder: holder.clone(),
                claimant: component.to_string(),
            });
        }
        self.claims.insert(path.to_string(), component.to_string());
        let fact = Fact {
            topic: Topic::ArtifactClaimed,
            producer: component.to_string(),
            subject: path.to_string(),
            payload: BTreeMap::new(),
        };
        self.facts.insert(key(&fact), fact);
        Ok(())
    }

    /// Adds a fact. Re-publishing an identical fact is a no-op; a different
    /// payload under the same (topic, producer, subject) is rejected.
    pub fn publish(&mut self, fact: Fact) -> Result<(), Violation> {
        let k = key(&fact);
        match self.facts.get(&k) {
            Some(existing) if *existing == fact => Ok(()),
            Some(_) => Err(Violation::new(
                GEN_FACT,
                vec![fact.producer.clone(), fact.subject.clone()],
                format!(
                    "{} already published {} for {} with a different payload",
                    fact.producer, fact.topic, fact.subject
                ),
            )),
            None => {
                self.facts.insert(k, fact);
                Ok(())
            }
        }
    }

    pub fn facts(&self) -> impl Iterator<Item = &Fact> {
        self.facts.values()
    }

    pub fn facts_on(&self, topic: Topic) -> impl Iterator<Item = &Fact> {
        self.facts.values().filter(move |f| f.topic == topic)
    }

    pub fn claims(&self) -> &BTreeMap<String, String> {
        &self.claims
    }

    pub fn holder(&self, path: &str) -> Option<&str> {
        self.claims.get(path).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }
}

fn key(f: &Fact) -> FactKey {
    (f.topic, f.producer.clone(), f.subject.clone())
}

fn discipline(component: &GeneratorComponent, topic: Topic, verb: &str) -> Violation {
    Violation::new(
        GEN_FACT,
        vec![component.id.clone()],
        format!(
            "{} may not {verb} {topic}: not declared in its interface",
            component.id
        ),
    )
}

fn read<'b>(
    board: &'b Blackboard,
    component: &GeneratorComponent,
    topic: Topic,
) -> Result<Vec<&'b Fact>, Violation> {
    if !component.interface.consumes.contains(&topic) {
        return Err(discipline(component, topic, "read"));
    }
    Ok(board.facts_on(topic).collect())
}

/// Read-write access for one component during the declare phase. Reads
/// are limited to consumed topics, writes to produced topics.
pub struct BoardView<'a> {
    board: &'a mut Blackboard,
    component: &'a GeneratorComponent,
}

impl<'a> BoardView<'a> {
    pub fn new(board: &'a mut Blackboard, component: &'a GeneratorComponent) -> Self {
        Self { board, component }
    }

    pub fn publish(
        &mut self,
        topic: Topic,
        subject: &str,
        payload: &[(&str, &str)],
    ) -> Result<(), Violation> {
        if !self.component.interface.produces.contains(&topic) {
            return Err(discipline(self.component, topic, "publish"));
        }
        self.board.publish(Fact {
            topic,
            producer: self.component.id.clone(),
            subject: subject.to_string(),
            payload: payload
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        })
    }

    pub fn claim(&mut self, path: &str) -> Result<(), Violation> {
        if !self
            .component
            .interface
            .produces
            .contains(&Topic::ArtifactClaimed)
        {
            return Err(discipline(self.component, Topic::ArtifactClaimed, "publish"));
        }
        Ok(self.board.claim_artifact(path, &self.component.id)?)
    }

    pub fn read(&self, topic: Topic) -> Result<Vec<&Fact>, Violation> {
        read(self.board, self.component, topic)
    }
}

/// Read-only access for one component during the emit phase.
pub struct BoardReader<'a> {
    board: &'a Blackboard,
    component: &'a GeneratorComponent,
}

impl<'a> BoardReader<'a> {
    pub fn new(board: &'a Blackboard, component: &'a GeneratorComponent) -> Self {
        Self { board, component }
    }

    pub fn read(&self, topic: Topic) -> Result<Vec<&'a Fact>, Violation> {
        read(self.board, self.component, topic)
    }

    pub fn find(&self, topic: Topic, subject: &str) -> Result<Option<&'a Fact>, Violation> {
        Ok(self.read(topic)?.into_iter().find(|f| f.subject == subject))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn claims_are_first_writer_wins() {
        let mut b = Blackboard::new();
        b.claim_artifact("Person.oo", "Types").unwrap();
        b.claim_artifact("PersonBuilder.oo", "Builder").unwrap();
        b.claim_artifact("Person.oo", "Types").unwrap();
        let err = b.claim_artifact("Person.oo", "Factory").unwrap_err();
        assert_eq!(err.holder, "Types");
        assert_eq!(err.claimant, "Factory");
        let v: Violation = err.into();
        assert_eq!(v.code, GEN_CLAIM_CONFLICT);
        assert!(v.subjects.contains(&"Types".to_string()));
        assert!(v.subjects.contains(&"Factory".to_string()));
        assert_eq!(b.holder("Person.oo"), Some("Types"));
        assert_eq!(b.facts_on(Topic::ArtifactClaimed).count(), 2);
    }

    #[test]
    fn publish_is_idempotent_but_not_overwriting() {
        let mut b = Blackboard::new();
        let fact = Fact {
            topic: Topic::TypeGenerated,
            producer: "Types".into(),
            subject: "Person".into(),
            payload: BTreeMap::from([("kind".into(), "class".into())]),
        };
        b.publish(fact.clone()).unwrap();
        b.publish(fact.clone()).unwrap();
        assert_eq!(b.len(), 1);
        let mut other = fact;
        other.payload.insert("kind".into(), "enum".into());
        assert_eq!(b.publish(other).unwrap_err().code, GEN_FACT);
    }

    #[test]
    fn topics_round_trip_through_text() {
        for t in Topic::ALL {
            assert_eq!(t.as_str().parse::<Topic>().unwrap(), t);
        }
        assert!("type.deleted".parse::<Topic>().is_err());
    }
}
