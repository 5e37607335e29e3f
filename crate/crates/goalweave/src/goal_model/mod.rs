//! i* Strategic Dependency / Strategic Rationale models for agent systems.
//!
//! A [`GoalModel`] holds actors, goals, softgoals, tasks and resources plus
//! the typed links between them (AND-decomposition, means-ends, contribution,
//! actor-to-actor dependency). Models are parsed from the line-oriented
//! `.istar` DSL (see [`parser`]), are immutable after construction, and are
//! safe to share across threads.

mod parser;
mod serialize;

pub use parser::{parse_model, ParseError};
pub use serialize::to_dsl;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::WorkbenchError;

/// Unique identifier of a model element.
///
/// Element ids default to the display name scoped by owning actor
/// (`Agent System/Call LLM Provider`); actors use their bare name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub String);

impl ElementId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ElementId {
    fn from(s: &str) -> Self {
        Self(s.to_string())
    }
}

/// Kind of a model element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Actor,
    Goal,
    Softgoal,
    Task,
    Resource,
}

impl ElementKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ElementKind::Actor => "actor",
            ElementKind::Goal => "goal",
            ElementKind::Softgoal => "softgoal",
            ElementKind::Task => "task",
            ElementKind::Resource => "resource",
        }
    }
}

/// A node in the goal model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Element {
    pub id: ElementId,
    pub kind: ElementKind,
    pub name: String,
    /// Owning actor; `None` for actors themselves.
    pub owner: Option<ElementId>,
}

/// Contribution polarity towards a softgoal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    StrongPositive,
    Positive,
    Negative,
    StrongNegative,
}

impl Polarity {
    pub fn token(self) -> &'static str {
        match self {
            Polarity::StrongPositive => "++",
            Polarity::Positive => "+",
            Polarity::Negative => "-",
            Polarity::StrongNegative => "--",
        }
    }

    pub fn from_token(tok: &str) -> Option<Self> {
        match tok {
            "++" => Some(Polarity::StrongPositive),
            "+" => Some(Polarity::Positive),
            "-" => Some(Polarity::Negative),
            "--" => Some(Polarity::StrongNegative),
            _ => None,
        }
    }

    /// Negative contributions mark concerns to mitigate; positive ones mark
    /// operationalizations.
    pub fn is_negative(self) -> bool {
        matches!(self, Polarity::Negative | Polarity::StrongNegative)
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Kind of a link between elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    AndDecomposition,
    MeansEnds,
    Contribution,
    Dependency,
}

/// A typed edge between two elements.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Link {
    pub kind: LinkKind,
    pub source: ElementId,
    pub target: ElementId,
    /// Present iff `kind == Contribution`.
    pub polarity: Option<Polarity>,
    /// Dependency annotation, e.g. `"task execution"`.
    pub label: Option<String>,
}

/// An i* model: a set of elements and a set of links.
///
/// Equality is set equality, insensitive to declaration order.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GoalModel {
    elements: BTreeMap<ElementId, Element>,
    links: BTreeSet<Link>,
}

impl PartialEq for GoalModel {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements && self.links == other.links
    }
}

impl Eq for GoalModel {}

impl GoalModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert an element. Returns the previous element with the same id, if any.
    pub fn insert_element(&mut self, element: Element) -> Option<Element> {
        self.elements.insert(element.id.clone(), element)
    }

    pub fn insert_link(&mut self, link: Link) -> bool {
        self.links.insert(link)
    }

    pub fn element(&self, id: &ElementId) -> Option<&Element> {
        self.elements.get(id)
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> {
        self.elements.values()
    }

    pub fn links(&self) -> impl Iterator<Item = &Link> {
        self.links.iter()
    }

    pub fn elements_of_kind(&self, kind: ElementKind) -> impl Iterator<Item = &Element> {
        self.elements.values().filter(move |e| e.kind == kind)
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty() && self.links.is_empty()
    }

    /// Contribution targets of a task: the set of `(softgoal id, polarity)`
    /// pairs reachable over contribution links whose source is `task_id`.
    pub fn contributions_of(
        &self,
        task_id: &ElementId,
    ) -> Result<BTreeSet<(ElementId, Polarity)>, WorkbenchError> {
        let element = self
            .element(task_id)
            .ok_or_else(|| WorkbenchError::UnknownElement(task_id.to_string()))?;
        if element.kind != ElementKind::Task {
            return Err(WorkbenchError::WrongElementKind {
                id: task_id.to_string(),
                expected: "task",
                actual: element.kind.keyword(),
            });
        }
        Ok(self
            .links
            .iter()
            .filter(|l| l.kind == LinkKind::Contribution && &l.source == task_id)
            .filter(|l| {
                self.element(&l.target)
                    .map(|e| e.kind == ElementKind::Softgoal)
                    .unwrap_or(false)
            })
            .filter_map(|l| l.polarity.map(|p| (l.target.clone(), p)))
            .collect())
    }

    /// Check every type invariant, returning one diagnostic per violation.
    ///
    /// Diagnostics are data, not failures: an empty list means the model is
    /// valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();

        for element in self.elements.values() {
            match (&element.kind, &element.owner) {
                (ElementKind::Actor, Some(owner)) => out.push(Diagnostic::new(
                    "actor-owner",
                    element.id.to_string(),
                    format!("actor must not declare an owner (found {owner})"),
                )),
                (ElementKind::Actor, None) => {}
                (_, None) => out.push(Diagnostic::new(
                    "missing-owner",
                    element.id.to_string(),
                    "non-actor element must be owned by an actor".to_string(),
                )),
                (_, Some(owner)) => match self.element(owner) {
                    Some(o) if o.kind == ElementKind::Actor => {}
                    Some(_) => out.push(Diagnostic::new(
                        "owner-not-actor",
                        element.id.to_string(),
                        format!("owner {owner} is not an actor"),
                    )),
                    None => out.push(Diagnostic::new(
                        "dangling-owner",
                        element.id.to_string(),
                        format!("owner {owner} does not exist"),
                    )),
                },
            }
        }

        for link in &self.links {
            let subject = format!("{} -> {}", link.source, link.target);
            let source = self.element(&link.source);
            let target = self.element(&link.target);
            if source.is_none() {
                out.push(Diagnostic::new(
                    "dangling-reference",
                    subject.clone(),
                    format!("link source {} does not exist", link.source),
                ));
            }
            if target.is_none() {
                out.push(Diagnostic::new(
                    "dangling-reference",
                    subject.clone(),
                    format!("link target {} does not exist", link.target),
                ));
            }
            if link.source == link.target {
                out.push(Diagnostic::new(
                    "self-link",
                    subject.clone(),
                    "links must connect two distinct elements".to_string(),
                ));
            }

            match link.kind {
                LinkKind::Contribution => {
                    if link.polarity.is_none() {
                        out.push(Diagnostic::new(
                            "missing-polarity",
                            subject.clone(),
                            "contribution link requires a polarity".to_string(),
                        ));
                    }
                    if let Some(s) = source {
                        if !matches!(s.kind, ElementKind::Task | ElementKind::Goal) {
                            out.push(Diagnostic::new(
                                "contribution-source",
                                subject.clone(),
                                "contribution source must be a task or goal".to_string(),
                            ));
                        }
                    }
                    if let Some(t) = target {
                        if t.kind != ElementKind::Softgoal {
                            out.push(Diagnostic::new(
                                "contribution-target",
                                subject.clone(),
                                "contribution target must be softgoal".to_string(),
                            ));
                        }
                    }
                }
                LinkKind::AndDecomposition | LinkKind::MeansEnds => {
                    if link.polarity.is_some() {
                        out.push(Diagnostic::new(
                            "unexpected-polarity",
                            subject.clone(),
                            "only contribution links carry a polarity".to_string(),
                        ));
                    }
                    if let (Some(s), Some(t)) = (source, target) {
                        if s.owner != t.owner || s.owner.is_none() {
                            out.push(Diagnostic::new(
                                "cross-actor-refinement",
                                subject.clone(),
                                "decomposition and means-ends links must stay within one actor"
                                    .to_string(),
                            ));
                        }
                    }
                }
                LinkKind::Dependency => {
                    if link.polarity.is_some() {
                        out.push(Diagnostic::new(
                            "unexpected-polarity",
                            subject.clone(),
                            "only contribution links carry a polarity".to_string(),
                        ));
                    }
                    for end in [source, target].into_iter().flatten() {
                        if end.kind != ElementKind::Actor {
                            out.push(Diagnostic::new(
                                "dependency-endpoint",
                                subject.clone(),
                                format!("dependency endpoint {} must be an actor", end.id),
                            ));
                        }
                    }
                }
            }
        }

        out
    }
}

/// One invariant violation found by [`GoalModel::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    /// Stable rule name, e.g. `dangling-reference`.
    pub rule: String,
    /// Offending element id or `source -> target` pair.
    pub subject: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(rule: &str, subject: String, message: String) -> Self {
        Self {
            rule: rule.to_string(),
            subject,
            message,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.rule, self.subject, self.message)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn actor(name: &str) -> Element {
        Element {
            id: ElementId::new(name),
            kind: ElementKind::Actor,
            name: name.to_string(),
            owner: None,
        }
    }

    fn owned(kind: ElementKind, actor: &str, name: &str) -> Element {
        Element {
            id: ElementId::new(format!("{actor}/{name}")),
            kind,
            name: name.to_string(),
            owner: Some(ElementId::new(actor)),
        }
    }

    fn contribution(source: &str, target: &str, polarity: Polarity) -> Link {
        Link {
            kind: LinkKind::Contribution,
            source: ElementId::new(source),
            target: ElementId::new(target),
            polarity: Some(polarity),
            label: None,
        }
    }

    #[test]
    fn contribution_targeting_task_is_diagnosed() {
        let mut model = GoalModel::new();
        model.insert_element(actor("A"));
        model.insert_element(owned(ElementKind::Task, "A", "t1"));
        model.insert_element(owned(ElementKind::Task, "A", "t2"));
        model.insert_link(contribution("A/t1", "A/t2", Polarity::Positive));

        let diags = model.validate();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].rule, "contribution-target");
        assert!(diags[0].message.contains("must be softgoal"));
    }

    #[test]
    fn dangling_link_reference_is_diagnosed() {
        let mut model = GoalModel::new();
        model.insert_element(actor("A"));
        model.insert_element(owned(ElementKind::Task, "A", "t"));
        model.insert_link(contribution("A/t", "A/missing", Polarity::Negative));

        let diags = model.validate();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].rule, "dangling-reference");
    }

    #[test]
    fn contributions_of_rejects_non_tasks() {
        let mut model = GoalModel::new();
        model.insert_element(actor("A"));
        model.insert_element(owned(ElementKind::Goal, "A", "g"));
        let err = model.contributions_of(&ElementId::new("A/g")).unwrap_err();
        assert!(matches!(err, WorkbenchError::WrongElementKind { .. }));

        let err = model.contributions_of(&ElementId::new("nope")).unwrap_err();
        assert!(matches!(err, WorkbenchError::UnknownElement(_)));
    }

    #[test]
    fn contributions_of_task_without_links_is_empty() {
        let mut model = GoalModel::new();
        model.insert_element(actor("A"));
        model.insert_element(owned(ElementKind::Task, "A", "t"));
        let set = model.contributions_of(&ElementId::new("A/t")).unwrap();
        assert!(set.is_empty());
    }
}
