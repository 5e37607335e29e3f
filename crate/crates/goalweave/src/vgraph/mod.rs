//! AspectFinder for agents: discovering crosscutting concerns in a goal
//! model.
//!
//! The five steps, each a pure function over an immutable model:
//!
//! 1. [`density`] enumerates tasks and computes crosscutting density δ(t) —
//!    the number of NFR softgoals a task contributes to.
//! 2. [`find_vgraphs`] constructs V-graphs: triples of a functional goal, an
//!    NFR softgoal, and the non-empty task set serving both.
//! 3. [`group_candidates`] partitions V-graphs by `(softgoal, role)` into
//!    aspect candidates — mitigation for negative contributions,
//!    operationalization for positive ones.
//! 4. [`validate_candidates`] checks candidates against measured scattering
//!    evidence: a concern scattered across `m ≥ 3` modules is confirmed
//!    crosscutting.
//! 5. [`instantiate`] suggests catalog patterns, an advice kind and a
//!    composition stage per candidate.
//!
//! δ(t) counts contributions of both polarities; the report shows δ and the
//! negative-only δ⁻ side by side since mitigation aspects arise only from
//! negative links.

mod evidence;
mod report;

pub use evidence::{ConcernEvidence, ConcernMap, ScatterEvidence};
pub use report::{report, AnalysisReport, MatrixRow, ReportContext};

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::aspect::Stage;
use crate::goal_model::{ElementId, ElementKind, GoalModel, LinkKind, Polarity};
use crate::patterns::NfrCategory;

/// Density of one task: the NFR softgoals it touches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskDensity {
    pub task: ElementId,
    pub nfr_set: BTreeSet<ElementId>,
    /// δ(t) = |NFR(t)|, contributions of either polarity.
    pub density: usize,
    /// δ⁻(t): softgoals reached through negative contributions only.
    pub negative_density: usize,
}

/// Crosscutting density for every task in a model, sorted by task id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub tasks: Vec<TaskDensity>,
}

impl DensityReport {
    pub fn for_task(&self, task: &ElementId) -> Option<&TaskDensity> {
        self.tasks.iter().find(|t| &t.task == task)
    }

    /// Σ_t δ(t): total task participations across all V-graph dimensions.
    pub fn total_participation(&self) -> usize {
        self.tasks.iter().map(|t| t.density).sum()
    }
}

/// Step 1: enumerate tasks and compute δ(t).
pub fn density(model: &GoalModel) -> DensityReport {
    let tasks = model
        .elements_of_kind(ElementKind::Task)
        .map(|task| {
            let contributions = model
                .contributions_of(&task.id)
                .expect("element came from the task iterator");
            let nfr_set: BTreeSet<ElementId> =
                contributions.iter().map(|(sg, _)| sg.clone()).collect();
            let negative: BTreeSet<&ElementId> = contributions
                .iter()
                .filter(|(_, p)| p.is_negative())
                .map(|(sg, _)| sg)
                .collect();
            TaskDensity {
                task: task.id.clone(),
                density: nfr_set.len(),
                negative_density: negative.len(),
                nfr_set,
            }
        })
        .collect();
    DensityReport { tasks }
}

/// A V-graph: the structural signature of crosscutting. `tasks` maps each
/// participating task to its contribution polarity towards the softgoal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VGraph {
    pub functional_goal: ElementId,
    pub nfr_softgoal: ElementId,
    pub tasks: BTreeMap<ElementId, Polarity>,
}

/// Tasks serving a functional goal, reached transitively over
/// AND-decomposition and means-ends links (through subgoals and subtasks).
pub fn attached_tasks(model: &GoalModel, goal: &ElementId) -> BTreeSet<ElementId> {
    let refinements: Vec<(&ElementId, &ElementId)> = model
        .links()
        .filter(|l| matches!(l.kind, LinkKind::AndDecomposition | LinkKind::MeansEnds))
        .map(|l| (&l.source, &l.target))
        .collect();

    let mut tasks = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([goal.clone()]);
    while let Some(node) = queue.pop_front() {
        if !seen.insert(node.clone()) {
            continue;
        }
        for (source, target) in &refinements {
            if **source == node {
                let child = (*target).clone();
                if let Some(element) = model.element(&child) {
                    if element.kind == ElementKind::Softgoal {
                        continue;
                    }
                    if element.kind == ElementKind::Task {
                        tasks.insert(child.clone());
                    }
                }
                queue.push_back(child);
            }
        }
    }
    tasks
}

/// Step 2: construct one V-graph per `(functional goal, NFR softgoal)` pair
/// sharing at least one task. Output is sorted by `(goal, softgoal)`.
pub fn find_vgraphs(model: &GoalModel) -> Vec<VGraph> {
    let mut out = Vec::new();
    for goal in model.elements_of_kind(ElementKind::Goal) {
        let tasks = attached_tasks(model, &goal.id);
        // softgoal -> task -> polarity
        let mut per_softgoal: BTreeMap<ElementId, BTreeMap<ElementId, Polarity>> = BTreeMap::new();
        for task in &tasks {
            let contributions = model
                .contributions_of(task)
                .expect("attached tasks exist in the model");
            for (softgoal, polarity) in contributions {
                per_softgoal
                    .entry(softgoal)
                    .or_default()
                    .entry(task.clone())
                    .and_modify(|existing| *existing = stronger(*existing, polarity))
                    .or_insert(polarity);
            }
        }
        for (softgoal, tasks) in per_softgoal {
            out.push(VGraph {
                functional_goal: goal.id.clone(),
                nfr_softgoal: softgoal,
                tasks,
            });
        }
    }
    out.sort_by(|a, b| {
        (&a.functional_goal, &a.nfr_softgoal).cmp(&(&b.functional_goal, &b.nfr_softgoal))
    });
    out
}

/// Pick the more alarming of two polarities towards the same softgoal.
fn stronger(a: Polarity, b: Polarity) -> Polarity {
    let rank = |p: Polarity| match p {
        Polarity::StrongNegative => 0,
        Polarity::Negative => 1,
        Polarity::StrongPositive => 2,
        Polarity::Positive => 3,
    };
    if rank(a) <= rank(b) {
        a
    } else {
        b
    }
}

/// Distinct `(task, softgoal)` participations across V-graphs. A task
/// serving two functional goals appears in two V-graphs on the same
/// softgoal but participates once; this count therefore equals Σ_t δ(t)
/// whenever every contributing task is attached to some goal.
pub fn participation_count(vgraphs: &[VGraph]) -> usize {
    let mut pairs = BTreeSet::new();
    for vg in vgraphs {
        for task in vg.tasks.keys() {
            pairs.insert((task.clone(), vg.nfr_softgoal.clone()));
        }
    }
    pairs.len()
}

/// Why an aspect candidate exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// Tasks hurt the softgoal; the aspect mitigates.
    Mitigation,
    /// Tasks help the softgoal; the aspect operationalizes it.
    Operationalization,
}

/// Advice kind a candidate should instantiate as.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdviceHint {
    Before,
    After,
    Around,
    BeforeAfterError,
}

/// Scattering verdict for a candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validation {
    Validated,
    BelowThreshold,
    AbsentInCode,
    Unmeasured,
}

/// A grouped aspect candidate: one softgoal, one role, the union of join
/// point tasks over all V-graphs in the group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AspectCandidate {
    pub nfr_softgoal: ElementId,
    pub role: Role,
    pub join_point_tasks: BTreeSet<ElementId>,
    /// `None` when the softgoal is not classifiable into an NFR category.
    pub advice_hint: Option<AdviceHint>,
    /// Stage 1–8 in the canonical composition order; `None` if unclassified.
    pub composition_rank: Option<u8>,
    pub validation: Validation,
}

/// Step 3: group V-graphs by `(softgoal, role)`. Output sorted by
/// `(softgoal, role)`; validation starts as `Unmeasured`.
pub fn group_candidates(vgraphs: &[VGraph]) -> Vec<AspectCandidate> {
    let mut groups: BTreeMap<(ElementId, Role), BTreeSet<ElementId>> = BTreeMap::new();
    for vg in vgraphs {
        for (task, polarity) in &vg.tasks {
            let role = if polarity.is_negative() {
                Role::Mitigation
            } else {
                Role::Operationalization
            };
            groups
                .entry((vg.nfr_softgoal.clone(), role))
                .or_default()
                .insert(task.clone());
        }
    }
    groups
        .into_iter()
        .map(|((softgoal, role), tasks)| {
            let hint = classify_softgoal(&softgoal);
            AspectCandidate {
                advice_hint: hint.map(advice_for),
                composition_rank: hint.map(|c| stage_for(c).rank()),
                nfr_softgoal: softgoal,
                role,
                join_point_tasks: tasks,
                validation: Validation::Unmeasured,
            }
        })
        .collect()
}

/// Softgoal ids embed the display name (`Agent System/Security`); classify
/// on the name segment.
pub fn classify_softgoal(softgoal: &ElementId) -> Option<NfrCategory> {
    NfrCategory::classify(softgoal_name(softgoal))
}

/// The display-name tail of a scoped element id.
pub fn softgoal_name(softgoal: &ElementId) -> &str {
    softgoal
        .as_str()
        .rsplit('/')
        .next()
        .unwrap_or(softgoal.as_str())
}

fn advice_for(category: NfrCategory) -> AdviceHint {
    match category {
        NfrCategory::Security => AdviceHint::Before,
        NfrCategory::Reliability => AdviceHint::Around,
        NfrCategory::Observability => AdviceHint::BeforeAfterError,
        NfrCategory::Cost => AdviceHint::Around,
    }
}

/// Earliest composition stage among the category's patterns.
fn stage_for(category: NfrCategory) -> Stage {
    match category {
        NfrCategory::Security => Stage::Authenticate,
        NfrCategory::Reliability => Stage::Throttle,
        NfrCategory::Observability => Stage::Observe,
        NfrCategory::Cost => Stage::Budget,
    }
}

/// Step 4: set each candidate's validation from scattering evidence.
///
/// `validated` iff the mapped concern spans at least `threshold` modules;
/// `absent_in_code` iff mapped but zero files; `unmeasured` iff the softgoal
/// has no concern mapping.
pub fn validate_candidates(
    candidates: &[AspectCandidate],
    evidence: &ScatterEvidence,
    concern_map: &ConcernMap,
    threshold: u64,
) -> Vec<AspectCandidate> {
    assert!(threshold >= 1, "threshold must be at least 1");
    candidates
        .iter()
        .map(|candidate| {
            let mut updated = candidate.clone();
            updated.validation = match concern_map.concern_for(softgoal_name(&candidate.nfr_softgoal))
            {
                None => Validation::Unmeasured,
                Some(concern) => verdict(evidence.get(concern), threshold),
            };
            updated
        })
        .collect()
}

pub(crate) fn verdict(evidence: Option<ConcernEvidence>, threshold: u64) -> Validation {
    let e = evidence.unwrap_or_default();
    if e.file_count == 0 {
        Validation::AbsentInCode
    } else if e.module_count >= threshold {
        Validation::Validated
    } else {
        Validation::BelowThreshold
    }
}

/// Step 5 output: how to turn a candidate into a concrete aspect.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstantiationHint {
    Classified {
        category: NfrCategory,
        advice: AdviceHint,
        composition_rank: u8,
        suggested_patterns: Vec<String>,
    },
    /// The softgoal fits no NFR category; instantiation needs a human.
    Unclassified,
}

/// Step 5: suggest advice kind, stage and catalog patterns for a candidate.
pub fn instantiate(candidate: &AspectCandidate) -> InstantiationHint {
    match classify_softgoal(&candidate.nfr_softgoal) {
        Some(category) => InstantiationHint::Classified {
            category,
            advice: advice_for(category),
            composition_rank: stage_for(category).rank(),
            suggested_patterns: category.patterns().iter().map(|s| s.to_string()).collect(),
        },
        None => InstantiationHint::Unclassified,
    }
}
