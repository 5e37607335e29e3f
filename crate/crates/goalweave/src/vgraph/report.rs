//! Analysis report: the finder's output as one deterministic document,
//! rendered both as plain text and as a serializable tree.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    instantiate, softgoal_name, verdict, AspectCandidate, ConcernMap, DensityReport,
    InstantiationHint, ScatterEvidence, VGraph, Validation,
};
use crate::goal_model::{ElementId, GoalModel};

/// Optional validation inputs for the report.
#[derive(Clone, Debug, Default)]
pub struct ReportContext {
    pub evidence: Option<ScatterEvidence>,
    pub concern_map: Option<ConcernMap>,
    pub threshold: u64,
}

impl ReportContext {
    pub fn new() -> Self {
        Self {
            evidence: None,
            concern_map: None,
            threshold: 3,
        }
    }
}

/// One row of the validation matrix: functional goal × NFR × tasks ×
/// scattering verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub functional_goal: String,
    pub nfr_softgoal: String,
    pub tasks: Vec<String>,
    pub concern: Option<String>,
    pub file_count: Option<u64>,
    pub module_count: Option<u64>,
    pub validation: Validation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityRow {
    pub task: String,
    pub density: usize,
    pub negative_density: usize,
    pub nfr_softgoals: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VGraphRow {
    pub functional_goal: String,
    pub nfr_softgoal: String,
    pub tasks: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRow {
    pub nfr_softgoal: String,
    pub role: String,
    pub join_point_tasks: Vec<String>,
    pub validation: Validation,
    pub hint: InstantiationHint,
}

/// The full analysis document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub density: Vec<DensityRow>,
    pub vgraphs: Vec<VGraphRow>,
    pub candidates: Vec<CandidateRow>,
    pub matrix: Vec<MatrixRow>,
    pub participation: usize,
}

/// Assemble the report. Matrix rows come from V-graphs resolvable through
/// the concern map (qualified `goal/softgoal` keys first, plain softgoal
/// keys as fallback); without a map every V-graph appears, unmeasured.
pub fn report(
    model: &GoalModel,
    density: &DensityReport,
    vgraphs: &[VGraph],
    candidates: &[AspectCandidate],
    context: &ReportContext,
) -> AnalysisReport {
    let name_of = |id: &ElementId| {
        model
            .element(id)
            .map(|e| e.name.clone())
            .unwrap_or_else(|| id.to_string())
    };

    let density_rows = density
        .tasks
        .iter()
        .map(|t| DensityRow {
            task: name_of(&t.task),
            density: t.density,
            negative_density: t.negative_density,
            nfr_softgoals: t.nfr_set.iter().map(&name_of).collect(),
        })
        .collect();

    let vgraph_rows = vgraphs
        .iter()
        .map(|vg| VGraphRow {
            functional_goal: name_of(&vg.functional_goal),
            nfr_softgoal: name_of(&vg.nfr_softgoal),
            tasks: vg
                .tasks
                .iter()
                .map(|(task, polarity)| format!("{} [{polarity}]", name_of(task)))
                .collect(),
        })
        .collect();

    let candidate_rows = candidates
        .iter()
        .map(|c| CandidateRow {
            nfr_softgoal: name_of(&c.nfr_softgoal),
            role: format!("{:?}", c.role).to_lowercase(),
            join_point_tasks: c.join_point_tasks.iter().map(&name_of).collect(),
            validation: c.validation,
            hint: instantiate(c),
        })
        .collect();

    let mut matrix = Vec::new();
    for vg in vgraphs {
        let goal_name = name_of(&vg.functional_goal);
        let sg_name = softgoal_name(&vg.nfr_softgoal).to_string();
        // Goal-specific matrix rows join on qualified keys when the map has
        // any; a plain-keys-only map joins on the softgoal name.
        let concern = context
            .concern_map
            .as_ref()
            .and_then(|map| {
                if map.has_qualified_keys() {
                    map.entries.get(&format!("{goal_name}/{sg_name}")).map(String::as_str)
                } else {
                    map.concern_for(&sg_name)
                }
            })
            .map(str::to_string);
        if context.concern_map.is_some() && concern.is_none() {
            // Unmapped pairs stay in the V-graph list but not the matrix.
            continue;
        }
        let evidence = concern
            .as_deref()
            .and_then(|c| context.evidence.as_ref().and_then(|e| e.get(c)));
        let validation = match (&concern, &context.evidence) {
            (Some(_), Some(_)) => verdict(evidence, context.threshold),
            _ => Validation::Unmeasured,
        };
        matrix.push(MatrixRow {
            functional_goal: goal_name,
            nfr_softgoal: sg_name,
            tasks: vg.tasks.keys().map(&name_of).collect(),
            concern,
            file_count: evidence.map(|e| e.file_count),
            module_count: evidence.map(|e| e.module_count),
            validation,
        });
    }

    AnalysisReport {
        density: density_rows,
        vgraphs: vgraph_rows,
        candidates: candidate_rows,
        matrix,
        participation: super::participation_count(vgraphs),
    }
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();

        writeln!(out, "## Crosscutting density").unwrap();
        if self.density.is_empty() {
            writeln!(out, "(no tasks)").unwrap();
        }
        for row in &self.density {
            writeln!(
                out,
                "{:<28} δ={} δ⁻={}  [{}]",
                row.task,
                row.density,
                row.negative_density,
                row.nfr_softgoals.join(", ")
            )
            .unwrap();
        }

        writeln!(out, "\n## V-graphs ({} task participations)", self.participation).unwrap();
        if self.vgraphs.is_empty() {
            writeln!(out, "(none)").unwrap();
        }
        for row in &self.vgraphs {
            writeln!(
                out,
                "({}, {}) via {{{}}}",
                row.functional_goal,
                row.nfr_softgoal,
                row.tasks.join(", ")
            )
            .unwrap();
        }

        writeln!(out, "\n## Aspect candidates").unwrap();
        if self.candidates.is_empty() {
            writeln!(out, "(none)").unwrap();
        }
        for row in &self.candidates {
            let hint = match &row.hint {
                InstantiationHint::Classified {
                    advice,
                    composition_rank,
                    suggested_patterns,
                    ..
                } => format!(
                    "{advice:?} @ stage {composition_rank}; try {}",
                    suggested_patterns.join(", ")
                ),
                InstantiationHint::Unclassified => "unclassified".to_string(),
            };
            writeln!(
                out,
                "{} ({}) -> {{{}}}  [{:?}]  {}",
                row.nfr_softgoal,
                row.role,
                row.join_point_tasks.join(", "),
                row.validation,
                hint
            )
            .unwrap();
        }

        writeln!(out, "\n## Validation matrix").unwrap();
        if self.matrix.is_empty() {
            writeln!(out, "(no mapped pairs)").unwrap();
        }
        for row in &self.matrix {
            let evidence = match (row.file_count, row.module_count) {
                (Some(f), Some(m)) => format!("{f} files / {m} modules"),
                _ => "no evidence".to_string(),
            };
            writeln!(
                out,
                "{:<20} × {:<16} {{{}}}  {}  {}  [{:?}]",
                row.functional_goal,
                row.nfr_softgoal,
                row.tasks.join(", "),
                row.concern.as_deref().unwrap_or("-"),
                evidence,
                row.validation
            )
            .unwrap();
        }

        out
    }
}
