//! The information model: requirements, solution elements, test cases,
//! risks and the typed links between them.
//!
//! A [`Model`] is only obtainable through [`build_model`] (or
//! [`ModelBuilder`]), which rejects structural defects: duplicate ids,
//! dangling references, duplicate links, parent cycles and per-entity
//! invariant violations. Semantic problems such as an illegal link type or
//! an uncovered risk are representable and left to the rule engine.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rules::RuleId;

/// Identifier shared by every entity kind. Matches `[A-Za-z][A-Za-z0-9_-]*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct EntityId(String);

impl EntityId {
    pub fn new(text: impl Into<String>) -> Result<Self, InvalidId> {
        let text = text.into();
        if Self::is_valid(&text) {
            Ok(EntityId(text))
        } else {
            Err(InvalidId(text))
        }
    }

    pub fn is_valid(text: &str) -> bool {
        let mut chars = text.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for EntityId {
    type Error = InvalidId;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        EntityId::new(value)
    }
}

impl From<EntityId> for String {
    fn from(id: EntityId) -> Self {
        id.0
    }
}

impl std::borrow::Borrow<str> for EntityId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid entity id '{0}': expected [A-Za-z][A-Za-z0-9_-]*")]
pub struct InvalidId(pub String);

macro_rules! keyword_enum {
    (
        $(#[$meta:meta])*
        pub enum $name:ident { $($variant:ident => $kw:literal),+ $(,)? }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            /// Keyword used in the modeling language and in reports.
            pub fn keyword(self) -> &'static str {
                match self { $($name::$variant => $kw),+ }
            }

            pub fn from_keyword(word: &str) -> Option<Self> {
                match word { $($kw => Some($name::$variant),)+ _ => None }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.keyword())
            }
        }
    };
}

keyword_enum! {
    /// Requirement stereotype.
    pub enum RequirementClass {
        Acquirer => "acquirer",
        OtherStakeholder => "stakeholder",
        SystemTechnical => "technical",
        Specified => "specified",
    }
}

keyword_enum! {
    /// Weight attached to a safety requirement; ordered Low < ... < Catastrophic.
    pub enum Criticality {
        Low => "low",
        Medium => "medium",
        High => "high",
        Catastrophic => "catastrophic",
    }
}

impl Criticality {
    pub fn weight(self) -> u8 {
        match self {
            Criticality::Low => 1,
            Criticality::Medium => 2,
            Criticality::High => 3,
            Criticality::Catastrophic => 4,
        }
    }
}

keyword_enum! {
    pub enum ElementKind {
        Logical => "logical",
        Physical => "physical",
        Interface => "interface",
    }
}

keyword_enum! {
    /// How a test case checks its requirements.
    pub enum TestMethod {
        Simulation => "simulation",
        Test => "test",
        Prototyping => "prototyping",
        ModelChecking => "model_checking",
        Review => "review",
    }
}

keyword_enum! {
    pub enum RiskSeverity {
        Minor => "minor",
        Major => "major",
        Hazardous => "hazardous",
        Catastrophic => "catastrophic",
    }
}

keyword_enum! {
    pub enum Likelihood {
        Frequent => "frequent",
        Probable => "probable",
        Remote => "remote",
        ExtremelyRemote => "extremely_remote",
    }
}

keyword_enum! {
    pub enum Tolerability {
        Acceptable => "acceptable",
        Tolerable => "tolerable",
        Unacceptable => "unacceptable",
    }
}

keyword_enum! {
    /// Traceability relationship. `Derive A -> B` reads "B is derived from A".
    pub enum LinkKind {
        Derive => "derive",
        Refine => "refine",
        Satisfy => "satisfy",
        Verify => "verify",
        Specify => "specify",
        Allocate => "allocate",
        Covers => "covers",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Requirement {
    pub id: EntityId,
    pub class: RequirementClass,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub safety: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criticality: Option<Criticality>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sil: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mtbf_hours: Option<f64>,
    /// Carried for completeness; no rule reads it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mtbr_hours: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_rate_per_hour: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<EntityId>,
}

impl Requirement {
    /// A non-safety requirement with only the mandatory fields set.
    pub fn new(id: EntityId, class: RequirementClass, text: impl Into<String>) -> Self {
        Requirement {
            id,
            class,
            text: text.into(),
            source: None,
            safety: false,
            criticality: None,
            sil: None,
            mtbf_hours: None,
            mtbr_hours: None,
            failure_rate_per_hour: None,
            parent: None,
        }
    }

    fn check(&self) -> Result<(), InvariantViolation> {
        if self.text.is_empty() {
            return Err(InvariantViolation::EmptyText);
        }
        if !self.safety {
            if self.sil.is_some() {
                return Err(InvariantViolation::SafetyAttributeWithoutSafety("sil"));
            }
            if self.mtbf_hours.is_some() {
                return Err(InvariantViolation::SafetyAttributeWithoutSafety(
                    "mtbf_hours",
                ));
            }
            if self.mtbr_hours.is_some() {
                return Err(InvariantViolation::SafetyAttributeWithoutSafety(
                    "mtbr_hours",
                ));
            }
            if self.failure_rate_per_hour.is_some() {
                return Err(InvariantViolation::SafetyAttributeWithoutSafety(
                    "failure_rate_per_hour",
                ));
            }
        } else if self.criticality.is_none() {
            return Err(InvariantViolation::MissingCriticality);
        }
        if let Some(sil) = self.sil {
            if !(1..=4).contains(&sil) {
                return Err(InvariantViolation::SilOutOfRange(sil));
            }
        }
        for (field, value) in [
            ("mtbf_hours", self.mtbf_hours),
            ("mtbr_hours", self.mtbr_hours),
            ("failure_rate_per_hour", self.failure_rate_per_hour),
        ] {
            if let Some(v) = value {
                if !(v.is_finite() && v > 0.0) {
                    return Err(InvariantViolation::NotPositive(field));
                }
            }
        }
        if self.parent.as_ref() == Some(&self.id) {
            return Err(InvariantViolation::SelfParent);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionElement {
    pub id: EntityId,
    pub kind: ElementKind,
    pub name: String,
    /// Physical elements joined by an interface; empty for other kinds.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub connects: Vec<EntityId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub id: EntityId,
    pub method: TestMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Risk {
    pub id: EntityId,
    pub description: String,
    pub severity: RiskSeverity,
    pub likelihood: Likelihood,
    pub tolerability: Tolerability,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Link {
    pub kind: LinkKind,
    pub source: EntityId,
    pub target: EntityId,
}

impl Link {
    pub fn new(kind: LinkKind, source: EntityId, target: EntityId) -> Self {
        Link {
            kind,
            source,
            target,
        }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} -> {}", self.kind, self.source, self.target)
    }
}

/// Kind of any entity in the single id namespace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Requirement(RequirementClass),
    Logical,
    Physical,
    Interface,
    TestCase,
    Risk,
}

impl EntityKind {
    pub const ALL: [EntityKind; 9] = [
        EntityKind::Requirement(RequirementClass::Acquirer),
        EntityKind::Requirement(RequirementClass::OtherStakeholder),
        EntityKind::Requirement(RequirementClass::SystemTechnical),
        EntityKind::Requirement(RequirementClass::Specified),
        EntityKind::Logical,
        EntityKind::Physical,
        EntityKind::Interface,
        EntityKind::TestCase,
        EntityKind::Risk,
    ];

    pub fn is_requirement(self) -> bool {
        matches!(self, EntityKind::Requirement(_))
    }

    pub fn is_solution(self) -> bool {
        matches!(
            self,
            EntityKind::Logical | EntityKind::Physical | EntityKind::Interface
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            EntityKind::Requirement(class) => class.keyword(),
            EntityKind::Logical => "logical",
            EntityKind::Physical => "physical",
            EntityKind::Interface => "interface",
            EntityKind::TestCase => "testcase",
            EntityKind::Risk => "risk",
        }
    }
}

impl From<ElementKind> for EntityKind {
    fn from(kind: ElementKind) -> Self {
        match kind {
            ElementKind::Logical => EntityKind::Logical,
            ElementKind::Physical => EntityKind::Physical,
            ElementKind::Interface => EntityKind::Interface,
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntityKind::Requirement(class) => write!(f, "requirement({class})"),
            other => f.write_str(other.label()),
        }
    }
}

/// One endpoint of a link as seen by the constraint table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Endpoint {
    pub kind: EntityKind,
    /// Only meaningful for requirements.
    pub safety: bool,
}

/// The link constraint table. Anything not listed here is a type error.
///
/// | kind     | source                              | target                      |
/// |----------|-------------------------------------|-----------------------------|
/// | derive   | acquirer, stakeholder, technical     | technical                   |
/// | derive   | technical                           | specified                   |
/// | refine   | requirement                         | requirement of same class   |
/// | satisfy  | logical, physical                   | technical                   |
/// | verify   | testcase                            | any requirement             |
/// | specify  | specified                           | logical, physical, interface|
/// | allocate | logical                             | physical                    |
/// | covers   | safety requirement                  | risk                        |
pub fn link_permitted(kind: LinkKind, source: Endpoint, target: Endpoint) -> bool {
    use EntityKind as K;
    use RequirementClass as C;
    match kind {
        LinkKind::Derive => matches!(
            (source.kind, target.kind),
            (
                K::Requirement(C::Acquirer | C::OtherStakeholder | C::SystemTechnical),
                K::Requirement(C::SystemTechnical)
            ) | (
                K::Requirement(C::SystemTechnical),
                K::Requirement(C::Specified)
            )
        ),
        LinkKind::Refine => matches!(
            (source.kind, target.kind),
            (K::Requirement(a), K::Requirement(b)) if a == b
        ),
        LinkKind::Satisfy => matches!(
            (source.kind, target.kind),
            (K::Logical | K::Physical, K::Requirement(C::SystemTechnical))
        ),
        LinkKind::Verify => {
            matches!((source.kind, target.kind), (K::TestCase, K::Requirement(_)))
        }
        LinkKind::Specify => matches!(
            (source.kind, target.kind),
            (
                K::Requirement(C::Specified),
                K::Logical | K::Physical | K::Interface
            )
        ),
        LinkKind::Allocate => matches!((source.kind, target.kind), (K::Logical, K::Physical)),
        LinkKind::Covers => source.kind.is_requirement() && source.safety && target.kind == K::Risk,
    }
}

/// Where a declaration lives in a source file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceLocation {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

/// Declaration sites and suppression annotations. Not part of a model's
/// structural identity.
#[derive(Debug, Clone, Default)]
pub struct SourceMap {
    pub entities: HashMap<EntityId, SourceLocation>,
    /// Indexed like [`Model::links`].
    pub links: Vec<Option<SourceLocation>>,
    /// Rules suppressed per entity by `tracekit:allow(...)` comments.
    pub allows: BTreeMap<EntityId, BTreeSet<RuleId>>,
}

/// Which input collection (and index) an error points at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Site {
    Requirement(usize),
    Element(usize),
    TestCase(usize),
    Risk(usize),
    Link(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantViolation {
    #[error("requirement text must not be empty")]
    EmptyText,
    #[error("'{0}' may only be set on a safety requirement (safety: true)")]
    SafetyAttributeWithoutSafety(&'static str),
    #[error("a safety requirement must declare a criticality")]
    MissingCriticality,
    #[error("sil must be in 1..=4, got {0}")]
    SilOutOfRange(u8),
    #[error("'{0}' must be a positive finite number")]
    NotPositive(&'static str),
    #[error("a requirement cannot be its own parent")]
    SelfParent,
    #[error("parent '{0}' is not a requirement")]
    ParentNotRequirement(EntityId),
    #[error("only interface elements may declare 'connects'")]
    ConnectsOnNonInterface,
    #[error("a link cannot connect an entity to itself")]
    SelfLink,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate id '{id}'")]
    DuplicateId { id: EntityId, site: Site },
    #[error("unknown entity '{id}'")]
    UnknownReference { id: EntityId, site: Option<Site> },
    #[error("duplicate link '{kind} {from} -> {to}'")]
    DuplicateLink {
        kind: LinkKind,
        from: EntityId,
        to: EntityId,
        site: Site,
    },
    #[error("cyclic parent chain: {}", join_ids(.ids))]
    CyclicParentChain { ids: Vec<EntityId>, site: Site },
    #[error("'{id}': {violation}")]
    Invariant {
        id: EntityId,
        site: Site,
        violation: InvariantViolation,
    },
    #[error("'{0}' is not a requirement")]
    NotARequirement(EntityId),
}

impl ModelError {
    pub fn site(&self) -> Option<Site> {
        match self {
            ModelError::DuplicateId { site, .. }
            | ModelError::DuplicateLink { site, .. }
            | ModelError::CyclicParentChain { site, .. }
            | ModelError::Invariant { site, .. } => Some(*site),
            ModelError::UnknownReference { site, .. } => *site,
            ModelError::NotARequirement(_) => None,
        }
    }
}

fn join_ids(ids: &[EntityId]) -> String {
    ids.iter()
        .map(EntityId::as_str)
        .collect::<Vec<_>>()
        .join(" -> ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Requirement(usize),
    Element(usize),
    TestCase(usize),
    Risk(usize),
}

/// A resolved, immutable system description.
#[derive(Debug, Clone, Default)]
pub struct Model {
    requirements: Vec<Requirement>,
    elements: Vec<SolutionElement>,
    testcases: Vec<TestCase>,
    risks: Vec<Risk>,
    links: Vec<Link>,
    index: HashMap<EntityId, Slot>,
    sources: SourceMap,
}

/// Collects entities and links, then validates them all at once.
#[derive(Debug, Clone, Default)]
pub struct ModelBuilder {
    pub requirements: Vec<Requirement>,
    pub elements: Vec<SolutionElement>,
    pub testcases: Vec<TestCase>,
    pub risks: Vec<Risk>,
    pub links: Vec<Link>,
}

impl ModelBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn requirement(mut self, r: Requirement) -> Self {
        self.requirements.push(r);
        self
    }

    pub fn element(mut self, e: SolutionElement) -> Self {
        self.elements.push(e);
        self
    }

    pub fn testcase(mut self, t: TestCase) -> Self {
        self.testcases.push(t);
        self
    }

    pub fn risk(mut self, r: Risk) -> Self {
        self.risks.push(r);
        self
    }

    pub fn link(mut self, l: Link) -> Self {
        self.links.push(l);
        self
    }

    /// Like [`build_model`] but reports every structural error, in input order.
    pub fn build_all(self) -> Result<Model, Vec<ModelError>> {
        let mut errors = Vec::new();
        let mut index: HashMap<EntityId, Slot> = HashMap::new();

        let ids = self
            .requirements
            .iter()
            .enumerate()
            .map(|(i, r)| (&r.id, Slot::Requirement(i), Site::Requirement(i)))
            .chain(
                self.elements
                    .iter()
                    .enumerate()
                    .map(|(i, e)| (&e.id, Slot::Element(i), Site::Element(i))),
            )
            .chain(
                self.testcases
                    .iter()
                    .enumerate()
                    .map(|(i, t)| (&t.id, Slot::TestCase(i), Site::TestCase(i))),
            )
            .chain(
                self.risks
                    .iter()
                    .enumerate()
                    .map(|(i, r)| (&r.id, Slot::Risk(i), Site::Risk(i))),
            );
        for (id, slot, site) in ids {
            if index.contains_key(id) {
                errors.push(ModelError::DuplicateId {
                    id: id.clone(),
                    site,
                });
            } else {
                index.insert(id.clone(), slot);
            }
        }

        for (i, req) in self.requirements.iter().enumerate() {
            let site = Site::Requirement(i);
            if let Err(violation) = req.check() {
                errors.push(ModelError::Invariant {
                    id: req.id.clone(),
                    site,
                    violation,
                });
            }
            if let Some(parent) = &req.parent {
                match index.get(parent) {
                    None => errors.push(ModelError::UnknownReference {
                        id: parent.clone(),
                        site: Some(site),
                    }),
                    Some(Slot::Requirement(_)) => {}
                    Some(_) => errors.push(ModelError::Invariant {
                        id: req.id.clone(),
                        site,
                        violation: InvariantViolation::ParentNotRequirement(parent.clone()),
                    }),
                }
            }
        }

        for (i, el) in self.elements.iter().enumerate() {
            let site = Site::Element(i);
            if el.kind != ElementKind::Interface && !el.connects.is_empty() {
                errors.push(ModelError::Invariant {
                    id: el.id.clone(),
                    site,
                    violation: InvariantViolation::ConnectsOnNonInterface,
                });
            }
            for c in &el.connects {
                if !index.contains_key(c) {
                    errors.push(ModelError::UnknownReference {
                        id: c.clone(),
                        site: Some(site),
                    });
                }
            }
        }

        let mut seen_links = BTreeSet::new();
        for (i, link) in self.links.iter().enumerate() {
            let site = Site::Link(i);
            for end in [&link.source, &link.target] {
                if !index.contains_key(end) {
                    errors.push(ModelError::UnknownReference {
                        id: end.clone(),
                        site: Some(site),
                    });
                }
            }
            if link.source == link.target {
                errors.push(ModelError::Invariant {
                    id: link.source.clone(),
                    site,
                    violation: InvariantViolation::SelfLink,
                });
            }
            if !seen_links.insert(link) {
                errors.push(ModelError::DuplicateLink {
                    kind: link.kind,
                    from: link.source.clone(),
                    to: link.target.clone(),
                    site,
                });
            }
        }

        errors.extend(parent_cycles(&self.requirements));

        if !errors.is_empty() {
            return Err(errors);
        }
        Ok(Model {
            sources: SourceMap {
                links: vec![None; self.links.len()],
                ..SourceMap::default()
            },
            requirements: self.requirements,
            elements: self.elements,
            testcases: self.testcases,
            risks: self.risks,
            links: self.links,
            index,
        })
    }

    pub fn build(self) -> Result<Model, ModelError> {
        self.build_all().map_err(|mut errs| errs.swap_remove(0))
    }
}

/// Detects cycles in the parent relation. Each cycle is reported once,
/// rotated so its smallest id comes first, at the site of that requirement.
fn parent_cycles(requirements: &[Requirement]) -> Vec<ModelError> {
    let positions: HashMap<&EntityId, usize> = requirements
        .iter()
        .enumerate()
        .map(|(i, r)| (&r.id, i))
        .collect();
    let parent_of = |i: usize| -> Option<usize> {
        requirements[i]
            .parent
            .as_ref()
            .and_then(|p| positions.get(p).copied())
    };

    // 0 = unvisited, 1 = on current walk, 2 = done
    let mut state = vec![0u8; requirements.len()];
    let mut errors = Vec::new();
    for start in 0..requirements.len() {
        let mut walk = Vec::new();
        let mut cur = Some(start);
        while let Some(i) = cur {
            match state[i] {
                2 => break,
                1 => {
                    let pos = walk.iter().position(|&w| w == i).unwrap_or(0);
                    let cycle: &[usize] = &walk[pos..];
                    if cycle.len() > 1 {
                        let min = (0..cycle.len())
                            .min_by_key(|&k: &usize| &requirements[cycle[k]].id)
                            .unwrap_or(0);
                        let ids: Vec<EntityId> = (0..cycle.len())
                            .map(|k| requirements[cycle[(min + k) % cycle.len()]].id.clone())
                            .collect();
                        errors.push(ModelError::CyclicParentChain {
                            ids,
                            site: Site::Requirement(cycle[min]),
                        });
                    }
                    break;
                }
                _ => {
                    state[i] = 1;
                    walk.push(i);
                    cur = parent_of(i);
                }
            }
        }
        for w in walk {
            state[w] = 2;
        }
    }
    errors
}

/// Validates the given entities and links and assembles a [`Model`].
pub fn build_model(
    requirements: Vec<Requirement>,
    elements: Vec<SolutionElement>,
    testcases: Vec<TestCase>,
    risks: Vec<Risk>,
    links: Vec<Link>,
) -> Result<Model, ModelError> {
    ModelBuilder {
        requirements,
        elements,
        testcases,
        risks,
        links,
    }
    .build()
}

impl Model {
    pub fn requirements(&self) -> &[Requirement] {
        &self.requirements
    }

    pub fn elements(&self) -> &[SolutionElement] {
        &self.elements
    }

    pub fn testcases(&self) -> &[TestCase] {
        &self.testcases
    }

    pub fn risks(&self) -> &[Risk] {
        &self.risks
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn entity_count(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty() && self.links.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// All entity ids in sorted order.
    pub fn ids(&self) -> Vec<&EntityId> {
        let mut ids: Vec<&EntityId> = self.index.keys().collect();
        ids.sort();
        ids
    }

    /// Looks `id` up in the model and returns the canonical [`EntityId`].
    pub fn resolve_id(&self, id: &str) -> Result<&EntityId, ModelError> {
        self.index
            .get_key_value(id)
            .map(|(k, _)| k)
            .ok_or_else(|| unknown(id))
    }

    pub fn entity_kind(&self, id: &str) -> Result<EntityKind, ModelError> {
        match self.index.get(id) {
            Some(Slot::Requirement(i)) => Ok(EntityKind::Requirement(self.requirements[*i].class)),
            Some(Slot::Element(i)) => Ok(self.elements[*i].kind.into()),
            Some(Slot::TestCase(_)) => Ok(EntityKind::TestCase),
            Some(Slot::Risk(_)) => Ok(EntityKind::Risk),
            None => Err(unknown(id)),
        }
    }

    pub fn is_safety_requirement(&self, id: &str) -> Result<bool, ModelError> {
        match self.index.get(id) {
            Some(Slot::Requirement(i)) => Ok(self.requirements[*i].safety),
            Some(_) => Err(ModelError::NotARequirement(self.resolve_id(id)?.clone())),
            None => Err(unknown(id)),
        }
    }

    pub fn requirement(&self, id: &str) -> Option<&Requirement> {
        match self.index.get(id) {
            Some(Slot::Requirement(i)) => Some(&self.requirements[*i]),
            _ => None,
        }
    }

    pub fn element(&self, id: &str) -> Option<&SolutionElement> {
        match self.index.get(id) {
            Some(Slot::Element(i)) => Some(&self.elements[*i]),
            _ => None,
        }
    }

    pub fn testcase(&self, id: &str) -> Option<&TestCase> {
        match self.index.get(id) {
            Some(Slot::TestCase(i)) => Some(&self.testcases[*i]),
            _ => None,
        }
    }

    pub fn risk(&self, id: &str) -> Option<&Risk> {
        match self.index.get(id) {
            Some(Slot::Risk(i)) => Some(&self.risks[*i]),
            _ => None,
        }
    }

    /// Kind plus safety flag, as consumed by [`link_permitted`].
    pub fn endpoint(&self, id: &str) -> Result<Endpoint, ModelError> {
        Ok(Endpoint {
            kind: self.entity_kind(id)?,
            safety: self.requirement(id).is_some_and(|r| r.safety),
        })
    }

    /// Whether the link is allowed by the constraint table.
    pub fn link_is_legal(&self, link: &Link) -> bool {
        match (
            self.endpoint(link.source.as_str()),
            self.endpoint(link.target.as_str()),
        ) {
            (Ok(s), Ok(t)) => link_permitted(link.kind, s, t),
            _ => false,
        }
    }

    /// Short human label: requirement text, element name, or description.
    pub fn describe(&self, id: &str) -> String {
        match self.index.get(id) {
            Some(Slot::Requirement(i)) => self.requirements[*i].text.clone(),
            Some(Slot::Element(i)) => self.elements[*i].name.clone(),
            Some(Slot::TestCase(i)) => self.testcases[*i].description.clone().unwrap_or_default(),
            Some(Slot::Risk(i)) => self.risks[*i].description.clone(),
            None => String::new(),
        }
    }

    pub fn source_map(&self) -> &SourceMap {
        &self.sources
    }

    pub fn location(&self, id: &str) -> Option<&SourceLocation> {
        self.sources.entities.get(id)
    }

    pub fn link_location(&self, index: usize) -> Option<&SourceLocation> {
        self.sources.links.get(index).and_then(Option::as_ref)
    }

    pub fn allows(&self, id: &str, rule: RuleId) -> bool {
        self.sources
            .allows
            .get(id)
            .is_some_and(|rules| rules.contains(&rule))
    }

    /// Attaches declaration sites; `links` is resized to match the link list.
    pub fn with_source_map(mut self, mut sources: SourceMap) -> Self {
        sources.links.resize(self.links.len(), None);
        self.sources = sources;
        self
    }

    /// Returns a builder holding copies of this model's entities and links.
    pub fn to_builder(&self) -> ModelBuilder {
        ModelBuilder {
            requirements: self.requirements.clone(),
            elements: self.elements.clone(),
            testcases: self.testcases.clone(),
            risks: self.risks.clone(),
            links: self.links.clone(),
        }
    }
}

fn unknown(id: &str) -> ModelError {
    ModelError::UnknownReference {
        id: EntityId(id.to_owned()),
        site: None,
    }
}

fn sorted_by_id<T: Clone, F: Fn(&T) -> &EntityId>(items: &[T], key: F) -> Vec<T> {
    let mut v = items.to_vec();
    v.sort_by(|a, b| key(a).cmp(key(b)));
    v
}

/// Structural equality: same entities and links, regardless of declaration
/// order or source locations.
impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        let mut links_a = self.links.clone();
        let mut links_b = other.links.clone();
        links_a.sort();
        links_b.sort();
        links_a == links_b
            && sorted_by_id(&self.requirements, |r| &r.id)
                == sorted_by_id(&other.requirements, |r| &r.id)
            && sorted_by_id(&self.elements, |e| &e.id) == sorted_by_id(&other.elements, |e| &e.id)
            && sorted_by_id(&self.testcases, |t| &t.id) == sorted_by_id(&other.testcases, |t| &t.id)
            && sorted_by_id(&self.risks, |r| &r.id) == sorted_by_id(&other.risks, |r| &r.id)
    }
}
