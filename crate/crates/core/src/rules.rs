//! Rule catalog R1–R12 and coverage statistics.
//!
//! Rules are independent: each one reads the model and graph and returns
//! its own findings. [`validate`] merges them into one deterministic list.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::dsl::SourceSpan;
use crate::graph::{EdgeKind, Step, StepRelation, TraceGraph};
use crate::model::{ElementKind, EntityId, EntityKind, Link, LinkKind, Model, RequirementClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
    R11,
    R12,
}

impl RuleId {
    pub const ALL: [RuleId; 12] = [
        RuleId::R1,
        RuleId::R2,
        RuleId::R3,
        RuleId::R4,
        RuleId::R5,
        RuleId::R6,
        RuleId::R7,
        RuleId::R8,
        RuleId::R9,
        RuleId::R10,
        RuleId::R11,
        RuleId::R12,
    ];

    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn parse(text: &str) -> Option<Self> {
        let n: usize = text.strip_prefix('R')?.parse().ok()?;
        if text.len() > 1 && text.as_bytes()[1] == b'0' {
            return None;
        }
        RuleId::ALL.get(n.checked_sub(1)?).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleId::R1 => "SourceConsistency",
            RuleId::R2 => "StakeholderTransformation",
            RuleId::R3 => "TechnicalSatisfaction",
            RuleId::R4 => "VerificationCoverage",
            RuleId::R5 => "RiskCoverage",
            RuleId::R6 => "SafetyGrounding",
            RuleId::R7 => "LinkTypeCheck",
            RuleId::R8 => "AcyclicDerivation",
            RuleId::R9 => "InterfaceArity",
            RuleId::R10 => "ConceptSeparation",
            RuleId::R11 => "CriticalityMonotone",
            RuleId::R12 => "AllocationCompleteness",
        }
    }

    pub fn default_severity(self) -> Severity {
        match self {
            RuleId::R1 | RuleId::R5 | RuleId::R7 | RuleId::R8 | RuleId::R9 | RuleId::R10 => {
                Severity::Error
            }
            _ => Severity::Warning,
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}", self.number())
    }
}

impl FromStr for RuleId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleId::parse(s.trim()).ok_or_else(|| format!("unknown rule '{}'", s.trim()))
    }
}

impl Serialize for RuleId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Ordered so that `Error > Warning`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

impl FromStr for Severity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "error" => Ok(Severity::Error),
            "warning" => Ok(Severity::Warning),
            other => Err(format!("unknown severity '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    #[serde(rename = "rule_id")]
    pub rule: RuleId,
    pub severity: Severity,
    pub subjects: Vec<EntityId>,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<SourceSpan>,
    /// Matched a `tracekit:allow` comment: still reported and counted, but
    /// never fails a run.
    pub suppressed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleConfig {
    pub enabled: BTreeSet<RuleId>,
    pub severity_overrides: BTreeMap<RuleId, Severity>,
    pub criticality_monotone: bool,
}

impl Default for RuleConfig {
    fn default() -> Self {
        RuleConfig {
            enabled: RuleId::ALL.into_iter().collect(),
            severity_overrides: BTreeMap::new(),
            criticality_monotone: true,
        }
    }
}

impl RuleConfig {
    pub fn disable(mut self, rule: RuleId) -> Self {
        self.enabled.remove(&rule);
        self
    }

    fn is_enabled(&self, rule: RuleId) -> bool {
        self.enabled.contains(&rule) && (rule != RuleId::R11 || self.criticality_monotone)
    }
}

fn steps(list: &[(LinkKind, bool)]) -> StepRelation {
    list.iter()
        .map(|&(k, fwd)| {
            if fwd {
                Step::forward(EdgeKind::Link(k))
            } else {
                Step::reverse(EdgeKind::Link(k))
            }
        })
        .collect()
}

fn has_incoming(
    graph: &TraceGraph,
    id: &str,
    kind: LinkKind,
    from: impl Fn(EntityKind) -> bool,
) -> bool {
    graph.incoming(id).iter().any(|e| {
        e.kind == EdgeKind::Link(kind) && graph.kind_of(e.source.as_str()).is_some_and(&from)
    })
}

fn has_outgoing(
    graph: &TraceGraph,
    id: &str,
    kind: LinkKind,
    to: impl Fn(EntityKind) -> bool,
) -> bool {
    graph.outgoing(id).iter().any(|e| {
        e.kind == EdgeKind::Link(kind) && graph.kind_of(e.target.as_str()).is_some_and(&to)
    })
}

// Obligation predicates shared by the rules and the coverage statistics.

fn is_transformed(graph: &TraceGraph, id: &str) -> bool {
    graph
        .reachable([id], &steps(&[(LinkKind::Derive, true)]))
        .map(|set| {
            set.iter().any(|r| {
                graph.kind_of(r.as_str())
                    == Some(EntityKind::Requirement(RequirementClass::SystemTechnical))
            })
        })
        .unwrap_or(false)
}

fn is_satisfied(graph: &TraceGraph, id: &str) -> bool {
    has_incoming(graph, id, LinkKind::Satisfy, |_| true)
        || has_outgoing(graph, id, LinkKind::Derive, |_| true)
        || has_outgoing(graph, id, LinkKind::Refine, |_| true)
}

fn is_verified(graph: &TraceGraph, id: &str) -> bool {
    has_incoming(graph, id, LinkKind::Verify, |k| k == EntityKind::TestCase)
}

fn is_covered(graph: &TraceGraph, id: &str) -> bool {
    has_incoming(graph, id, LinkKind::Covers, |_| true)
}

fn is_allocated(graph: &TraceGraph, id: &str) -> bool {
    has_outgoing(graph, id, LinkKind::Allocate, |k| k == EntityKind::Physical)
}

fn is_stakeholder(class: RequirementClass) -> bool {
    matches!(
        class,
        RequirementClass::Acquirer | RequirementClass::OtherStakeholder
    )
}

struct Ctx<'a> {
    model: &'a Model,
    graph: &'a TraceGraph,
    out: Vec<Finding>,
}

impl Ctx<'_> {
    fn entity(&mut self, rule: RuleId, severity: Severity, id: &EntityId, message: String) {
        let span = self.model.location(id.as_str()).map(|l| SourceSpan {
            file: l.file.clone(),
            line: l.line,
            column: l.column,
            length: 0,
        });
        self.out.push(Finding {
            rule,
            severity,
            subjects: vec![id.clone()],
            message,
            span,
            suppressed: false,
        });
    }

    fn link(&mut self, rule: RuleId, index: usize, link: &Link, message: String) {
        let span = self.model.link_location(index).map(|l| SourceSpan {
            file: l.file.clone(),
            line: l.line,
            column: l.column,
            length: 0,
        });
        self.out.push(Finding {
            rule,
            severity: rule.default_severity(),
            subjects: vec![link.source.clone(), link.target.clone()],
            message,
            span,
            suppressed: false,
        });
    }

    fn describe(&self, id: &EntityId) -> String {
        match self.model.entity_kind(id.as_str()) {
            Ok(EntityKind::Requirement(c)) => {
                let safety = if self
                    .model
                    .requirement(id.as_str())
                    .is_some_and(|r| r.safety)
                {
                    "safety "
                } else {
                    ""
                };
                format!("{c} {safety}requirement '{id}'")
            }
            Ok(k) => format!("{} '{id}'", k.label()),
            Err(_) => format!("'{id}'"),
        }
    }
}

fn r1(cx: &mut Ctx) {
    for r in cx.model.requirements() {
        let has_source = r.source.as_deref().is_some_and(|s| !s.trim().is_empty());
        if r.class == RequirementClass::OtherStakeholder && !has_source {
            cx.entity(
                RuleId::R1,
                Severity::Error,
                &r.id,
                format!(
                    "stakeholder requirement '{}' has no source; the source must name the stakeholder consistent with its stereotype",
                    r.id
                ),
            );
        }
    }
}

fn r2(cx: &mut Ctx) {
    for r in cx.model.requirements() {
        if is_stakeholder(r.class) && !is_transformed(cx.graph, r.id.as_str()) {
            cx.entity(
                RuleId::R2,
                Severity::Warning,
                &r.id,
                format!(
                    "{} is not transformed into any technical requirement (no derive path)",
                    cx.describe(&r.id)
                ),
            );
        }
    }
}

fn r3(cx: &mut Ctx) {
    for r in cx.model.requirements() {
        if r.class == RequirementClass::SystemTechnical && !is_satisfied(cx.graph, r.id.as_str()) {
            cx.entity(
                RuleId::R3,
                Severity::Warning,
                &r.id,
                format!(
                    "technical requirement '{}' is neither satisfied by a solution element nor derived/refined further",
                    r.id
                ),
            );
        }
    }
}

fn r4(cx: &mut Ctx) {
    for r in cx.model.requirements() {
        if !is_verified(cx.graph, r.id.as_str()) {
            let severity = if r.safety {
                Severity::Error
            } else {
                Severity::Warning
            };
            cx.entity(
                RuleId::R4,
                severity,
                &r.id,
                format!("{} is not verified by any test case", cx.describe(&r.id)),
            );
        }
    }
}

fn r5(cx: &mut Ctx) {
    for r in cx.model.risks() {
        if !is_covered(cx.graph, r.id.as_str()) {
            cx.entity(
                RuleId::R5,
                Severity::Error,
                &r.id,
                format!("risk '{}' is not covered by any safety requirement", r.id),
            );
        }
    }
}

fn r6(cx: &mut Ctx) {
    let up = steps(&[(LinkKind::Derive, false), (LinkKind::Refine, false)]);
    let covers = |id: &str| has_outgoing(cx.graph, id, LinkKind::Covers, |_| true);
    let mut hits = Vec::new();
    for r in cx.model.requirements().iter().filter(|r| r.safety) {
        if covers(r.id.as_str()) {
            continue;
        }
        let ancestors = cx.graph.reachable([r.id.as_str()], &up).unwrap_or_default();
        if !ancestors.iter().any(|a| covers(a.as_str())) {
            hits.push(r.id.clone());
        }
    }
    for id in hits {
        cx.entity(
            RuleId::R6,
            Severity::Warning,
            &id,
            format!(
                "safety requirement '{id}' covers no risk and does not descend from a requirement that does"
            ),
        );
    }
}

fn r7(cx: &mut Ctx) {
    for (i, link) in cx.model.links().iter().enumerate() {
        if !cx.model.link_is_legal(link) {
            let message = format!(
                "'{}' link from {} to {} is not permitted",
                link.kind,
                cx.describe(&link.source),
                cx.describe(&link.target)
            );
            cx.link(RuleId::R7, i, link, message);
        }
    }
}

fn r8(cx: &mut Ctx) {
    let kinds: BTreeSet<EdgeKind> = [
        EdgeKind::Link(LinkKind::Derive),
        EdgeKind::Link(LinkKind::Refine),
    ]
    .into();
    for cycle in cx.graph.find_cycles(&kinds) {
        let shown: Vec<&str> = cycle
            .iter()
            .chain(cycle.first())
            .map(EntityId::as_str)
            .collect();
        let span = cx.model.location(cycle[0].as_str()).map(|l| SourceSpan {
            file: l.file.clone(),
            line: l.line,
            column: l.column,
            length: 0,
        });
        cx.out.push(Finding {
            rule: RuleId::R8,
            severity: Severity::Error,
            message: format!("derivation cycle: {}", shown.join(" -> ")),
            subjects: cycle,
            span,
            suppressed: false,
        });
    }
}

fn r9(cx: &mut Ctx) {
    for e in cx.model.elements() {
        if e.kind != ElementKind::Interface {
            continue;
        }
        let mut physical = BTreeSet::new();
        let mut other = BTreeSet::new();
        for c in &e.connects {
            if cx.model.entity_kind(c.as_str()) == Ok(EntityKind::Physical) {
                physical.insert(c.as_str());
            } else {
                other.insert(c.as_str());
            }
        }
        let problem = if !other.is_empty() {
            Some(format!(
                "interface '{}' connects non-physical entities: {}",
                e.id,
                other.into_iter().collect::<Vec<_>>().join(", ")
            ))
        } else if physical.len() < 2 {
            Some(format!(
                "interface '{}' connects {} distinct physical element(s); at least 2 are required",
                e.id,
                physical.len()
            ))
        } else {
            None
        };
        if let Some(message) = problem {
            cx.entity(RuleId::R9, Severity::Error, &e.id, message);
        }
    }
}

/// A link touching a test case or risk must be `verify testcase -> requirement`
/// or `covers requirement -> risk`.
fn separates_concepts(link: &Link, source: EntityKind, target: EntityKind) -> bool {
    let vv = |k: EntityKind| matches!(k, EntityKind::TestCase | EntityKind::Risk);
    if !vv(source) && !vv(target) {
        return true;
    }
    match link.kind {
        LinkKind::Verify => source == EntityKind::TestCase && target.is_requirement(),
        LinkKind::Covers => source.is_requirement() && target == EntityKind::Risk,
        _ => false,
    }
}

fn r10(cx: &mut Ctx) {
    for (i, link) in cx.model.links().iter().enumerate() {
        let (Ok(s), Ok(t)) = (
            cx.model.entity_kind(link.source.as_str()),
            cx.model.entity_kind(link.target.as_str()),
        ) else {
            continue;
        };
        if !separates_concepts(link, s, t) {
            let message = format!(
                "'{}' link from {} to {} mixes verification/risk concepts with the solution; test cases may only verify requirements and risks may only be covered by requirements",
                link.kind,
                cx.describe(&link.source),
                cx.describe(&link.target)
            );
            cx.link(RuleId::R10, i, link, message);
        }
    }
}

fn r11(cx: &mut Ctx) {
    for (i, link) in cx.model.links().iter().enumerate() {
        if !matches!(link.kind, LinkKind::Derive | LinkKind::Refine) {
            continue;
        }
        let (Some(s), Some(t)) = (
            cx.model.requirement(link.source.as_str()),
            cx.model.requirement(link.target.as_str()),
        ) else {
            continue;
        };
        if !(s.safety && t.safety) {
            continue;
        }
        if let (Some(cs), Some(ct)) = (s.criticality, t.criticality) {
            if ct < cs {
                let message = format!(
                    "criticality decreases along '{}' from '{}' ({cs}) to '{}' ({ct})",
                    link.kind, s.id, t.id
                );
                cx.link(RuleId::R11, i, link, message);
            }
        }
    }
}

fn r12(cx: &mut Ctx) {
    for e in cx.model.elements() {
        if e.kind == ElementKind::Logical && !is_allocated(cx.graph, e.id.as_str()) {
            cx.entity(
                RuleId::R12,
                Severity::Warning,
                &e.id,
                format!(
                    "logical element '{}' is not allocated to any physical element",
                    e.id
                ),
            );
        }
    }
}

fn run_rule(rule: RuleId, model: &Model, graph: &TraceGraph) -> Vec<Finding> {
    let mut cx = Ctx {
        model,
        graph,
        out: Vec::new(),
    };
    match rule {
        RuleId::R1 => r1(&mut cx),
        RuleId::R2 => r2(&mut cx),
        RuleId::R3 => r3(&mut cx),
        RuleId::R4 => r4(&mut cx),
        RuleId::R5 => r5(&mut cx),
        RuleId::R6 => r6(&mut cx),
        RuleId::R7 => r7(&mut cx),
        RuleId::R8 => r8(&mut cx),
        RuleId::R9 => r9(&mut cx),
        RuleId::R10 => r10(&mut cx),
        RuleId::R11 => r11(&mut cx),
        RuleId::R12 => r12(&mut cx),
    }
    cx.out
}

/// Evaluates every enabled rule. Findings are sorted by rule number, then
/// by subjects, then by message.
pub fn validate(model: &Model, graph: &TraceGraph, config: &RuleConfig) -> Vec<Finding> {
    let mut findings: Vec<Finding> = RuleId::ALL
        .into_iter()
        .filter(|&r| config.is_enabled(r))
        .flat_map(|rule| {
            let mut found = run_rule(rule, model, graph);
            for f in &mut found {
                if let Some(&s) = config.severity_overrides.get(&rule) {
                    f.severity = s;
                }
                f.suppressed = f.subjects.iter().any(|s| model.allows(s.as_str(), rule));
            }
            found
        })
        .collect();
    findings
        .sort_by(|a, b| (a.rule, &a.subjects, &a.message).cmp(&(b.rule, &b.subjects, &b.message)));
    findings
}

/// Unsuppressed error and warning counts plus the suppressed total.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct FindingCounts {
    pub errors: usize,
    pub warnings: usize,
    pub suppressed: usize,
}

impl FindingCounts {
    pub fn of(findings: &[Finding]) -> Self {
        let mut c = FindingCounts::default();
        for f in findings {
            if f.suppressed {
                c.suppressed += 1;
            } else if f.severity == Severity::Error {
                c.errors += 1;
            } else {
                c.warnings += 1;
            }
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageStats {
    /// Requirements verified by a test case (R4).
    pub verification_coverage: f64,
    /// Risks covered by a requirement (R5).
    pub risk_coverage: f64,
    /// Stakeholder requirements with a derive path to a technical one (R2).
    pub transformation_coverage: f64,
    /// Technical requirements satisfied or derived further (R3).
    pub satisfaction_coverage: f64,
    /// Logical elements allocated to a physical element (R12).
    pub allocation_coverage: f64,
    pub entity_counts: BTreeMap<String, usize>,
    pub link_counts: BTreeMap<String, usize>,
}

fn percent(done: usize, total: usize) -> f64 {
    if total == 0 {
        100.0
    } else {
        100.0 * done as f64 / total as f64
    }
}

fn ratio<'a>(ids: impl Iterator<Item = &'a EntityId>, ok: impl Fn(&str) -> bool) -> f64 {
    let (mut done, mut total) = (0, 0);
    for id in ids {
        total += 1;
        if ok(id.as_str()) {
            done += 1;
        }
    }
    percent(done, total)
}

/// Coverage percentages (100 when nothing is obliged) and raw counts.
pub fn coverage_stats(model: &Model, graph: &TraceGraph) -> CoverageStats {
    let reqs = model.requirements();
    let mut entity_counts: BTreeMap<String, usize> = EntityKind::ALL
        .iter()
        .map(|k| (k.label().to_owned(), 0))
        .collect();
    for id in model.ids() {
        if let Ok(k) = model.entity_kind(id.as_str()) {
            *entity_counts.entry(k.label().to_owned()).or_default() += 1;
        }
    }
    let mut link_counts: BTreeMap<String, usize> = LinkKind::ALL
        .iter()
        .map(|k| (k.keyword().to_owned(), 0))
        .collect();
    for l in model.links() {
        *link_counts.entry(l.kind.keyword().to_owned()).or_default() += 1;
    }

    CoverageStats {
        verification_coverage: ratio(reqs.iter().map(|r| &r.id), |id| is_verified(graph, id)),
        risk_coverage: ratio(model.risks().iter().map(|r| &r.id), |id| {
            is_covered(graph, id)
        }),
        transformation_coverage: ratio(
            reqs.iter()
                .filter(|r| is_stakeholder(r.class))
                .map(|r| &r.id),
            |id| is_transformed(graph, id),
        ),
        satisfaction_coverage: ratio(
            reqs.iter()
                .filter(|r| r.class == RequirementClass::SystemTechnical)
                .map(|r| &r.id),
            |id| is_satisfied(graph, id),
        ),
        allocation_coverage: ratio(
            model
                .elements()
                .iter()
                .filter(|e| e.kind == ElementKind::Logical)
                .map(|e| &e.id),
            |id| is_allocated(graph, id),
        ),
        entity_counts,
        link_counts,
    }
}
