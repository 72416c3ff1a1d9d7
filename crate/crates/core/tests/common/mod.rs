//! Seeded random models and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tracekit::model::{
    Criticality, ElementKind, EntityKind, Likelihood, Link, LinkKind, ModelBuilder, Requirement,
    RequirementClass, Risk, RiskSeverity, SolutionElement, TestCase, TestMethod, Tolerability,
};
use tracekit::{EntityId, Model};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkMode {
    /// Only links permitted by the constraint table (written out below).
    Legal,
    /// Any kind between any two distinct entities.
    Arbitrary,
}

#[derive(Debug, Clone, Copy)]
pub struct GenOptions {
    pub max_entities: usize,
    pub mode: LinkMode,
    /// Link attempts per entity.
    pub link_density: f64,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            max_entities: 100,
            mode: LinkMode::Legal,
            link_density: 1.5,
        }
    }
}

const PREFIX: [(EntityKind, &str); 9] = [
    (EntityKind::Requirement(RequirementClass::Acquirer), "AR"),
    (
        EntityKind::Requirement(RequirementClass::OtherStakeholder),
        "SR",
    ),
    (
        EntityKind::Requirement(RequirementClass::SystemTechnical),
        "TR",
    ),
    (EntityKind::Requirement(RequirementClass::Specified), "SP"),
    (EntityKind::Logical, "LF"),
    (EntityKind::Physical, "PC"),
    (EntityKind::Interface, "IF"),
    (EntityKind::TestCase, "TC"),
    (EntityKind::Risk, "RK"),
];

fn pick<T: Copy>(rng: &mut ChaCha8Rng, items: &[T]) -> T {
    *items.choose(rng).unwrap()
}

fn text(rng: &mut ChaCha8Rng) -> String {
    const WORDS: [&str; 12] = [
        "brake",
        "shall",
        "stop",
        "within",
        "800 m",
        "\"quoted\"",
        "back\\slash",
        "ü-umlaut",
        "signal",
        "{brace}",
        "// not a comment",
        "->",
    ];
    let n = rng.gen_range(1..5);
    (0..n)
        .map(|_| pick(rng, &WORDS))
        .collect::<Vec<_>>()
        .join(" ")
}

fn positive(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..3) {
        0 => rng.gen_range(1..100_000) as f64,
        1 => rng.gen_range(1..1_000_000) as f64 / 1024.0,
        _ => rng.gen_range(1.0e-9..1.0e6),
    }
}

/// Kind and safety flag of an endpoint, as seen by the oracle table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fine {
    pub kind: EntityKind,
    pub safety: bool,
}

/// The constraint table, restated independently of the library.
pub fn oracle_permitted(kind: LinkKind, s: Fine, t: Fine) -> bool {
    use EntityKind::*;
    use RequirementClass::*;
    let req = |f: Fine| matches!(f.kind, Requirement(_));
    let class = |f: Fine| match f.kind {
        Requirement(c) => Some(c),
        _ => None,
    };
    match kind {
        LinkKind::Derive => {
            (matches!(
                class(s),
                Some(Acquirer | OtherStakeholder | SystemTechnical)
            ) && class(t) == Some(SystemTechnical))
                || (class(s) == Some(SystemTechnical) && class(t) == Some(Specified))
        }
        LinkKind::Refine => req(s) && class(s) == class(t),
        LinkKind::Satisfy => {
            matches!(s.kind, Logical | Physical) && class(t) == Some(SystemTechnical)
        }
        LinkKind::Verify => s.kind == TestCase && req(t),
        LinkKind::Specify => {
            class(s) == Some(Specified) && matches!(t.kind, Logical | Physical | Interface)
        }
        LinkKind::Allocate => s.kind == Logical && t.kind == Physical,
        LinkKind::Covers => req(s) && s.safety && t.kind == Risk,
    }
}

/// Every (kind, safety) combination an endpoint can take.
pub fn all_fine_kinds() -> Vec<Fine> {
    let mut out = Vec::new();
    for k in EntityKind::ALL {
        if k.is_requirement() {
            out.push(Fine {
                kind: k,
                safety: false,
            });
            out.push(Fine {
                kind: k,
                safety: true,
            });
        } else {
            out.push(Fine {
                kind: k,
                safety: false,
            });
        }
    }
    out
}

/// Declares one entity of the given kind on `b`.
pub fn add_entity(b: ModelBuilder, id: &str, f: Fine) -> ModelBuilder {
    let id = EntityId::new(id).unwrap();
    match f.kind {
        EntityKind::Requirement(class) => {
            let mut r = Requirement::new(id, class, "r");
            if class == RequirementClass::OtherStakeholder {
                r.source = Some("operator".into());
            }
            if f.safety {
                r.safety = true;
                r.criticality = Some(Criticality::High);
            }
            b.requirement(r)
        }
        EntityKind::TestCase => b.testcase(TestCase {
            id,
            method: TestMethod::Test,
            description: None,
        }),
        EntityKind::Risk => b.risk(Risk {
            id,
            description: "r".into(),
            severity: RiskSeverity::ALL[0],
            likelihood: Likelihood::ALL[0],
            tolerability: Tolerability::ALL[0],
        }),
        other => {
            let kind = match other {
                EntityKind::Logical => ElementKind::Logical,
                EntityKind::Physical => ElementKind::Physical,
                _ => ElementKind::Interface,
            };
            b.element(SolutionElement {
                id,
                kind,
                name: "e".into(),
                connects: Vec::new(),
            })
        }
    }
}

/// A random valid model. Parent chains point at earlier requirements, so
/// they are acyclic; links are deduplicated and never self-loops.
pub fn random_model(rng: &mut ChaCha8Rng, opts: GenOptions) -> Model {
    let n = rng.gen_range(1..=opts.max_entities);
    let mut fine: Vec<(EntityId, Fine)> = Vec::with_capacity(n);
    let mut b = ModelBuilder::new();
    let mut req_ids: Vec<EntityId> = Vec::new();
    let mut physical: Vec<EntityId> = Vec::new();

    for i in 0..n {
        let (kind, prefix) = pick(rng, &PREFIX);
        let id = EntityId::new(format!("{prefix}-{i}")).unwrap();
        let mut safety = false;
        match kind {
            EntityKind::Requirement(class) => {
                let mut r = Requirement::new(id.clone(), class, text(rng));
                if (class == RequirementClass::OtherStakeholder || rng.gen_bool(0.2))
                    && rng.gen_bool(0.9)
                {
                    r.source = Some(text(rng));
                }
                if rng.gen_bool(0.5) {
                    safety = true;
                    r.safety = true;
                    r.criticality = Some(pick(rng, Criticality::ALL));
                    if rng.gen_bool(0.5) {
                        r.sil = Some(rng.gen_range(1..=4));
                    }
                    if rng.gen_bool(0.3) {
                        r.mtbf_hours = Some(positive(rng));
                    }
                    if rng.gen_bool(0.2) {
                        r.mtbr_hours = Some(positive(rng));
                    }
                    if rng.gen_bool(0.2) {
                        r.failure_rate_per_hour = Some(positive(rng));
                    }
                }
                if !req_ids.is_empty() && rng.gen_bool(0.25) {
                    r.parent = Some(pick_id(rng, &req_ids));
                }
                req_ids.push(id.clone());
                b = b.requirement(r);
            }
            EntityKind::TestCase => {
                b = b.testcase(TestCase {
                    id: id.clone(),
                    method: pick(rng, TestMethod::ALL),
                    description: rng.gen_bool(0.5).then(|| text(rng)),
                });
            }
            EntityKind::Risk => {
                b = b.risk(Risk {
                    id: id.clone(),
                    description: text(rng),
                    severity: pick(rng, RiskSeverity::ALL),
                    likelihood: pick(rng, Likelihood::ALL),
                    tolerability: pick(rng, Tolerability::ALL),
                });
            }
            _ => {
                let ekind = match kind {
                    EntityKind::Logical => ElementKind::Logical,
                    EntityKind::Physical => ElementKind::Physical,
                    _ => ElementKind::Interface,
                };
                if ekind == ElementKind::Physical {
                    physical.push(id.clone());
                }
                b = b.element(SolutionElement {
                    id: id.clone(),
                    kind: ekind,
                    name: text(rng),
                    connects: Vec::new(),
                });
            }
        }
        fine.push((id, Fine { kind, safety }));
    }

    // interfaces connect already-declared physical elements (or anything, when arbitrary)
    let all_ids: Vec<EntityId> = fine.iter().map(|(id, _)| id.clone()).collect();
    for e in b
        .elements
        .iter_mut()
        .filter(|e| e.kind == ElementKind::Interface)
    {
        let pool = if opts.mode == LinkMode::Legal {
            &physical
        } else {
            &all_ids
        };
        if pool.is_empty() {
            continue;
        }
        let k = rng.gen_range(0..=pool.len().min(4));
        let mut c: Vec<EntityId> = pool.choose_multiple(rng, k).cloned().collect();
        c.retain(|x| *x != e.id);
        e.connects = c;
    }

    let attempts = (n as f64 * opts.link_density).ceil() as usize;
    let mut seen = BTreeSet::new();
    for _ in 0..attempts * 4 {
        if seen.len() >= attempts || n < 2 {
            break;
        }
        let (s, sf) = fine.choose(rng).unwrap().clone();
        let (t, tf) = fine.choose(rng).unwrap().clone();
        if s == t {
            continue;
        }
        let kind = pick(rng, LinkKind::ALL);
        if opts.mode == LinkMode::Legal && !oracle_permitted(kind, sf, tf) {
            continue;
        }
        if seen.insert((kind, s.clone(), t.clone())) {
            b = b.link(Link::new(kind, s, t));
        }
    }
    b.build().expect("generator produces valid models")
}

fn pick_id(rng: &mut ChaCha8Rng, ids: &[EntityId]) -> EntityId {
    ids.choose(rng).unwrap().clone()
}

/// `k` distinct random ids from the model.
pub fn random_ids(rng: &mut ChaCha8Rng, model: &Model, k: usize) -> Vec<String> {
    let ids: Vec<String> = model.ids().iter().map(|i| i.to_string()).collect();
    let k = k.clamp(1, ids.len().max(1));
    ids.choose_multiple(rng, k).cloned().collect()
}

/// Directed edges of the model's trace graph under the default propagation,
/// written out by hand: each `(from, to)` means a change to `from` impacts `to`.
pub fn default_impact_edges(model: &Model) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for l in model.links() {
        let (s, t) = (l.source.to_string(), l.target.to_string());
        match l.kind {
            LinkKind::Derive | LinkKind::Refine | LinkKind::Allocate | LinkKind::Covers => {
                out.push((s, t))
            }
            LinkKind::Satisfy | LinkKind::Verify => out.push((t, s)),
            LinkKind::Specify => {
                out.push((s.clone(), t.clone()));
                out.push((t, s));
            }
        }
    }
    for r in model.requirements() {
        if let Some(p) = &r.parent {
            out.push((p.to_string(), r.id.to_string()));
        }
    }
    out
}

/// Fixpoint closure: everything reachable from `changed` in one or more steps.
pub fn brute_closure(edges: &[(String, String)], changed: &[String]) -> BTreeSet<String> {
    let mut frontier: BTreeSet<String> = changed.iter().cloned().collect();
    let mut reached: BTreeSet<String> = BTreeSet::new();
    loop {
        let mut grew = false;
        for (a, b) in edges {
            if (frontier.contains(a) || reached.contains(a)) && reached.insert(b.clone()) {
                grew = true;
            }
        }
        if !grew {
            return reached;
        }
        frontier.clear();
    }
}

/// Unweighted shortest distances from the change set, by plain BFS.
pub fn brute_distances(edges: &[(String, String)], changed: &[String]) -> BTreeMap<String, usize> {
    let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (a, b) in edges {
        adj.entry(a).or_default().push(b);
    }
    let mut dist: BTreeMap<String, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for c in changed {
        dist.insert(c.clone(), 0);
        queue.push_back(c.as_str());
    }
    while let Some(u) = queue.pop_front() {
        let d = dist[u];
        for &v in adj.get(u).into_iter().flatten() {
            if !dist.contains_key(v) {
                dist.insert(v.to_owned(), d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Fine kind of every entity in the model.
pub fn fine_kinds(model: &Model) -> BTreeMap<String, Fine> {
    model
        .ids()
        .iter()
        .map(|id| {
            let kind = model.entity_kind(id.as_str()).unwrap();
            let safety = model.requirement(id.as_str()).is_some_and(|r| r.safety);
            (id.to_string(), Fine { kind, safety })
        })
        .collect()
}
