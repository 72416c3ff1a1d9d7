//! Change-impact analysis over the trace graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{EdgeKind, GraphError, Step, StepRelation, TraceGraph};
use crate::model::{EntityId, EntityKind, Likelihood, LinkKind, Model, RiskSeverity, Tolerability};

/// How a change travels across one edge kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Propagation {
    Forward,
    Reverse,
    Both,
}

impl FromStr for Propagation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "forward" => Ok(Propagation::Forward),
            "reverse" => Ok(Propagation::Reverse),
            "both" => Ok(Propagation::Both),
            other => Err(format!(
                "unknown propagation '{other}' (expected forward, reverse, both or off)"
            )),
        }
    }
}

impl fmt::Display for Propagation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Propagation::Forward => "forward",
            Propagation::Reverse => "reverse",
            Propagation::Both => "both",
        })
    }
}

/// At most one propagation rule per edge kind; absent kinds do not propagate.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PropagationTable {
    entries: BTreeMap<EdgeKind, Propagation>,
}

impl PropagationTable {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn get(&self, kind: EdgeKind) -> Option<Propagation> {
        self.entries.get(&kind).copied()
    }

    /// `None` switches propagation off for `kind`.
    pub fn set(&mut self, kind: EdgeKind, propagation: Option<Propagation>) {
        match propagation {
            Some(p) => {
                self.entries.insert(kind, p);
            }
            None => {
                self.entries.remove(&kind);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeKind, Propagation)> + '_ {
        self.entries.iter().map(|(k, p)| (*k, *p))
    }

    /// The table as traversal steps; `Both` yields two steps.
    pub fn steps(&self) -> StepRelation {
        let mut steps = StepRelation::new();
        for (kind, p) in self.iter() {
            if matches!(p, Propagation::Forward | Propagation::Both) {
                steps.insert(Step::forward(kind));
            }
            if matches!(p, Propagation::Reverse | Propagation::Both) {
                steps.insert(Step::reverse(kind));
            }
        }
        steps
    }
}

/// The default table: requirement changes flow downstream to derived
/// requirements, children, satisfying elements, verifying test cases and
/// covered risks; specify pairs invalidate each other.
pub fn default_propagation() -> PropagationTable {
    let mut t = PropagationTable::empty();
    t.set(EdgeKind::Link(LinkKind::Derive), Some(Propagation::Forward));
    t.set(EdgeKind::Link(LinkKind::Refine), Some(Propagation::Forward));
    t.set(EdgeKind::Parent, Some(Propagation::Forward));
    t.set(
        EdgeKind::Link(LinkKind::Satisfy),
        Some(Propagation::Reverse),
    );
    t.set(EdgeKind::Link(LinkKind::Verify), Some(Propagation::Reverse));
    t.set(EdgeKind::Link(LinkKind::Specify), Some(Propagation::Both));
    t.set(
        EdgeKind::Link(LinkKind::Allocate),
        Some(Propagation::Forward),
    );
    t.set(EdgeKind::Link(LinkKind::Covers), Some(Propagation::Forward));
    t
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImpactError {
    #[error("the change set is empty")]
    EmptyChangeSet,
    #[error("unknown entity '{0}'")]
    UnknownReference(String),
}

impl From<GraphError> for ImpactError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::UnknownReference(id) => ImpactError::UnknownReference(id),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImpactedEntity {
    pub id: EntityId,
    /// Minimal number of hops from the change set.
    pub distance: usize,
    /// One shortest path, starting at a changed entity and ending at `id`.
    pub path: Vec<EntityId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImpactResult {
    pub changed: Vec<EntityId>,
    /// Sorted by id; never contains a changed entity.
    pub impacted: Vec<ImpactedEntity>,
    pub challenged_risks: Vec<EntityId>,
    pub stale_testcases: Vec<EntityId>,
}

impl ImpactResult {
    pub fn impacted_ids(&self) -> BTreeSet<EntityId> {
        self.impacted.iter().map(|i| i.id.clone()).collect()
    }

    pub fn distance(&self, id: &str) -> Option<usize> {
        self.impacted
            .iter()
            .find(|i| i.id.as_str() == id)
            .map(|i| i.distance)
    }
}

/// Computes what a change to `changed` affects under `table`. Risks covered
/// by a touched safety requirement count as challenged only while covers
/// propagates forward.
pub fn impact<'a, I>(
    model: &Model,
    graph: &TraceGraph,
    changed: I,
    table: &PropagationTable,
) -> Result<ImpactResult, ImpactError>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut start = BTreeSet::new();
    for id in changed {
        start.insert(
            model
                .resolve_id(id)
                .map_err(|_| ImpactError::UnknownReference(id.to_owned()))?,
        );
    }
    if start.is_empty() {
        return Err(ImpactError::EmptyChangeSet);
    }

    let visits = graph.bfs(start.iter().map(|id| id.as_str()), &table.steps())?;
    let impacted: Vec<ImpactedEntity> = visits
        .into_iter()
        .map(|v| ImpactedEntity {
            id: v.id,
            distance: v.distance,
            path: v.path,
        })
        .collect();

    let touched = || start.iter().copied().chain(impacted.iter().map(|i| &i.id));

    let mut risks: BTreeSet<EntityId> = impacted
        .iter()
        .filter(|i| model.risk(i.id.as_str()).is_some())
        .map(|i| i.id.clone())
        .collect();
    // covers turned off (or reverse only) also hides directly covered risks
    let covers_on = matches!(
        table.get(EdgeKind::Link(LinkKind::Covers)),
        Some(Propagation::Forward | Propagation::Both)
    );
    let mut stale = BTreeSet::new();
    for id in touched() {
        let Some(req) = model.requirement(id.as_str()) else {
            continue;
        };
        for e in graph.incoming(id.as_str()) {
            if e.kind == EdgeKind::Link(LinkKind::Verify)
                && model.testcase(e.source.as_str()).is_some()
            {
                stale.insert(e.source.clone());
            }
        }
        if covers_on && req.safety {
            for e in graph.outgoing(id.as_str()) {
                if e.kind == EdgeKind::Link(LinkKind::Covers)
                    && model.risk(e.target.as_str()).is_some()
                {
                    risks.insert(e.target.clone());
                }
            }
        }
    }

    Ok(ImpactResult {
        changed: start.into_iter().cloned().collect(),
        impacted,
        challenged_risks: risks.into_iter().collect(),
        stale_testcases: stale.into_iter().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImpactRow {
    pub id: EntityId,
    pub distance: usize,
    pub excerpt: String,
    pub path: Vec<EntityId>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImpactGroup {
    pub kind: String,
    pub rows: Vec<ImpactRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChallengedRisk {
    pub id: EntityId,
    pub description: String,
    pub severity: RiskSeverity,
    pub likelihood: Likelihood,
    pub tolerability: Tolerability,
    /// Set for unacceptable risks.
    pub flagged: bool,
}

/// Human-oriented view of an [`ImpactResult`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImpactReport {
    pub changed: Vec<EntityId>,
    pub groups: Vec<ImpactGroup>,
    pub challenged_risks: Vec<ChallengedRisk>,
    pub stale_testcases: Vec<EntityId>,
}

const EXCERPT_CHARS: usize = 60;

fn excerpt(text: &str) -> String {
    let flat: String = text.split_whitespace().collect::<Vec<_>>().join(" ");
    if flat.chars().count() <= EXCERPT_CHARS {
        flat
    } else {
        let mut s: String = flat.chars().take(EXCERPT_CHARS - 3).collect();
        s.push_str("...");
        s
    }
}

fn group_title(kind: EntityKind) -> String {
    match kind {
        EntityKind::Requirement(c) => format!("{c} requirements"),
        EntityKind::Logical => "logical elements".into(),
        EntityKind::Physical => "physical elements".into(),
        EntityKind::Interface => "interfaces".into(),
        EntityKind::TestCase => "test cases".into(),
        EntityKind::Risk => "risks".into(),
    }
}

pub fn impact_report(result: &ImpactResult, model: &Model) -> ImpactReport {
    let mut by_kind: BTreeMap<EntityKind, Vec<ImpactRow>> = BTreeMap::new();
    for i in &result.impacted {
        let Ok(kind) = model.entity_kind(i.id.as_str()) else {
            continue;
        };
        by_kind.entry(kind).or_default().push(ImpactRow {
            id: i.id.clone(),
            distance: i.distance,
            excerpt: excerpt(&model.describe(i.id.as_str())),
            path: i.path.clone(),
        });
    }
    let challenged_risks = result
        .challenged_risks
        .iter()
        .filter_map(|id| model.risk(id.as_str()))
        .map(|r| ChallengedRisk {
            id: r.id.clone(),
            description: r.description.clone(),
            severity: r.severity,
            likelihood: r.likelihood,
            tolerability: r.tolerability,
            flagged: r.tolerability == Tolerability::Unacceptable,
        })
        .collect();
    ImpactReport {
        changed: result.changed.clone(),
        groups: by_kind
            .into_iter()
            .map(|(kind, rows)| ImpactGroup {
                kind: group_title(kind),
                rows,
            })
            .collect(),
        challenged_risks,
        stale_testcases: result.stale_testcases.clone(),
    }
}

fn join(ids: &[EntityId], sep: &str) -> String {
    ids.iter()
        .map(EntityId::as_str)
        .collect::<Vec<_>>()
        .join(sep)
}

impl ImpactReport {
    pub fn impacted_count(&self) -> usize {
        self.groups.iter().map(|g| g.rows.len()).sum()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "changed: {}", join(&self.changed, ", "));
        if self.groups.is_empty() {
            out.push_str("no downstream impact\n");
        } else {
            let _ = writeln!(out, "impacted ({}):", self.impacted_count());
            for g in &self.groups {
                let _ = writeln!(out, "  {}:", g.kind);
                let width = g
                    .rows
                    .iter()
                    .map(|r| r.id.as_str().len())
                    .max()
                    .unwrap_or(0);
                for r in &g.rows {
                    let _ = write!(
                        out,
                        "    {:<width$}  d={}  via {}",
                        r.id.as_str(),
                        r.distance,
                        join(&r.path, " -> "),
                    );
                    if !r.excerpt.is_empty() {
                        let _ = write!(out, "  \"{}\"", r.excerpt);
                    }
                    out.push('\n');
                }
            }
        }
        if !self.challenged_risks.is_empty() {
            let _ = writeln!(out, "challenged risks ({}):", self.challenged_risks.len());
            for r in &self.challenged_risks {
                let marker = if r.flagged { "!!" } else { "  " };
                let _ = writeln!(
                    out,
                    "  {marker} {} [{}, {}, {}] {}",
                    r.id, r.tolerability, r.severity, r.likelihood, r.description
                );
            }
        }
        if !self.stale_testcases.is_empty() {
            let _ = writeln!(
                out,
                "stale test cases ({}): {}",
                self.stale_testcases.len(),
                join(&self.stale_testcases, ", ")
            );
        }
        out
    }
}
