//! Directed, typed traceability graph over a [`Model`].
//!
//! Nodes are indexed in sorted id order, so every traversal that walks
//! neighbours by index also breaks ties by smallest id.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::model::{EntityId, EntityKind, LinkKind, Model, RequirementClass};

/// A link kind, or the requirement hierarchy (`parent` attribute).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Link(LinkKind),
    /// From a parent requirement to its child.
    Parent,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 8] = [
        EdgeKind::Link(LinkKind::Derive),
        EdgeKind::Link(LinkKind::Refine),
        EdgeKind::Link(LinkKind::Satisfy),
        EdgeKind::Link(LinkKind::Verify),
        EdgeKind::Link(LinkKind::Specify),
        EdgeKind::Link(LinkKind::Allocate),
        EdgeKind::Link(LinkKind::Covers),
        EdgeKind::Parent,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            EdgeKind::Link(k) => k.keyword(),
            EdgeKind::Parent => "parent",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        match word {
            "parent" => Some(EdgeKind::Parent),
            w => LinkKind::from_keyword(w).map(EdgeKind::Link),
        }
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl Serialize for EdgeKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.keyword())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Along the edge, source to target.
    Forward,
    /// Against the edge, target to source.
    Reverse,
}

/// One admissible traversal step: an edge kind walked in one direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub kind: EdgeKind,
    pub direction: Direction,
}

impl Step {
    pub fn forward(kind: EdgeKind) -> Self {
        Step {
            kind,
            direction: Direction::Forward,
        }
    }

    pub fn reverse(kind: EdgeKind) -> Self {
        Step {
            kind,
            direction: Direction::Reverse,
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.direction {
            Direction::Forward => write!(f, "{}", self.kind),
            Direction::Reverse => write!(f, "{}:reverse", self.kind),
        }
    }
}

impl Serialize for Step {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses `derive` or `derive:reverse` / `derive:forward`.
impl FromStr for Step {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, dir) = s.split_once(':').unwrap_or((s, "forward"));
        let kind = EdgeKind::from_keyword(kind.trim())
            .ok_or_else(|| format!("unknown relation kind '{}'", kind.trim()))?;
        match dir.trim() {
            "forward" => Ok(Step::forward(kind)),
            "reverse" => Ok(Step::reverse(kind)),
            other => Err(format!("unknown direction '{other}'")),
        }
    }
}

pub type StepRelation = BTreeSet<Step>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown entity '{0}'")]
    UnknownReference(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct RawEdge {
    kind: EdgeKind,
    source: usize,
    target: usize,
}

/// A resolved edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge<'g> {
    pub kind: EdgeKind,
    pub source: &'g EntityId,
    pub target: &'g EntityId,
}

#[derive(Debug, Clone)]
pub struct TraceGraph {
    nodes: Vec<EntityId>,
    kinds: Vec<EntityKind>,
    position: HashMap<EntityId, usize>,
    edges: Vec<RawEdge>,
    /// Edge indices leaving / entering each node.
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
}

/// Builds the graph: one node per entity, one edge per link (in model
/// order) followed by one `Parent` edge per requirement with a parent.
pub fn build_graph(model: &Model) -> TraceGraph {
    let nodes: Vec<EntityId> = model.ids().into_iter().cloned().collect();
    let position: HashMap<EntityId, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), i))
        .collect();
    let kinds = nodes
        .iter()
        .map(|id| {
            model
                .entity_kind(id.as_str())
                .expect("node ids come from the model")
        })
        .collect();

    let mut edges: Vec<RawEdge> = model
        .links()
        .iter()
        .map(|l| RawEdge {
            kind: EdgeKind::Link(l.kind),
            source: position[&l.source],
            target: position[&l.target],
        })
        .collect();
    edges.extend(model.requirements().iter().filter_map(|r| {
        r.parent.as_ref().map(|p| RawEdge {
            kind: EdgeKind::Parent,
            source: position[p],
            target: position[&r.id],
        })
    }));

    let mut outgoing = vec![Vec::new(); nodes.len()];
    let mut incoming = vec![Vec::new(); nodes.len()];
    for (i, e) in edges.iter().enumerate() {
        outgoing[e.source].push(i);
        incoming[e.target].push(i);
    }
    TraceGraph {
        nodes,
        kinds,
        position,
        edges,
        outgoing,
        incoming,
    }
}

/// Breadth-first discovery record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Visit {
    pub id: EntityId,
    pub distance: usize,
    /// Path from a start node to `id`, both ends included.
    pub path: Vec<EntityId>,
}

impl TraceGraph {
    /// Node ids in sorted order.
    pub fn nodes(&self) -> &[EntityId] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.position.contains_key(id)
    }

    pub fn kind_of(&self, id: &str) -> Option<EntityKind> {
        self.position.get(id).map(|&i| self.kinds[i])
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge<'_>> + '_ {
        self.edges.iter().map(|e| self.resolve_edge(e))
    }

    fn resolve_edge(&self, e: &RawEdge) -> Edge<'_> {
        Edge {
            kind: e.kind,
            source: &self.nodes[e.source],
            target: &self.nodes[e.target],
        }
    }

    /// Edges leaving `id`, in edge order.
    pub fn outgoing(&self, id: &str) -> Vec<Edge<'_>> {
        self.position
            .get(id)
            .map(|&i| {
                self.outgoing[i]
                    .iter()
                    .map(|&e| self.resolve_edge(&self.edges[e]))
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Edges entering `id`, in edge order.
    pub fn incoming(&self, id: &str) -> Vec<Edge<'_>> {
        self.position
            .get(id)
            .map(|&i| {
                self.incoming[i]
                    .iter()
                    .map(|&e| self.resolve_edge(&self.edges[e]))
                    .collect()
            })
            .unwrap_or_default()
    }

    fn index(&self, id: &str) -> Result<usize, GraphError> {
        self.position
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::UnknownReference(id.to_owned()))
    }

    /// Sorted, de-duplicated one-step successors of `node` under `steps`.
    fn successors(&self, node: usize, steps: &StepRelation) -> Vec<usize> {
        let mut out = Vec::new();
        for &e in &self.outgoing[node] {
            let edge = self.edges[e];
            if steps.contains(&Step::forward(edge.kind)) {
                out.push(edge.target);
            }
        }
        for &e in &self.incoming[node] {
            let edge = self.edges[e];
            if steps.contains(&Step::reverse(edge.kind)) {
                out.push(edge.source);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn indices<'a, I>(&self, ids: I) -> Result<Vec<usize>, GraphError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut v = ids
            .into_iter()
            .map(|id| self.index(id))
            .collect::<Result<Vec<_>, _>>()?;
        v.sort_unstable();
        v.dedup();
        Ok(v)
    }

    /// Nodes reachable from `start` by one or more steps. A start node is
    /// included only if it can be reached again from some start node.
    pub fn reachable<'a, I>(
        &self,
        start: I,
        steps: &StepRelation,
    ) -> Result<BTreeSet<EntityId>, GraphError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let start = self.indices(start)?;
        let mut seen = vec![false; self.nodes.len()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &s in &start {
            for n in self.successors(s, steps) {
                if !seen[n] {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        while let Some(v) = queue.pop_front() {
            for n in self.successors(v, steps) {
                if !seen[n] {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        Ok(seen
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(i, _)| self.nodes[i].clone())
            .collect())
    }

    /// Multi-source breadth-first search from `start` (distance 0). Returns
    /// every other discovered node with its minimal distance and the
    /// discovery path; frontiers are expanded in id order, so ties go to the
    /// smallest id. Sorted by id.
    pub fn bfs<'a, I>(&self, start: I, steps: &StepRelation) -> Result<Vec<Visit>, GraphError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let start = self.indices(start)?;
        let n = self.nodes.len();
        let mut distance: Vec<Option<usize>> = vec![None; n];
        let mut parent: Vec<Option<usize>> = vec![None; n];
        for &s in &start {
            distance[s] = Some(0);
        }
        let mut frontier = start.clone();
        let mut depth = 0;
        while !frontier.is_empty() {
            depth += 1;
            let mut next = Vec::new();
            for &v in &frontier {
                for w in self.successors(v, steps) {
                    if distance[w].is_none() {
                        distance[w] = Some(depth);
                        parent[w] = Some(v);
                        next.push(w);
                    }
                }
            }
            next.sort_unstable();
            frontier = next;
        }

        let mut visits = Vec::new();
        for (i, d) in distance.iter().enumerate() {
            let Some(d) = *d else { continue };
            if d == 0 {
                continue;
            }
            let mut path = vec![self.nodes[i].clone()];
            let mut cur = i;
            while let Some(p) = parent[cur] {
                path.push(self.nodes[p].clone());
                cur = p;
            }
            path.reverse();
            visits.push(Visit {
                id: self.nodes[i].clone(),
                distance: d,
                path,
            });
        }
        Ok(visits)
    }

    /// Every elementary cycle of the subgraph restricted to `kinds`. Each
    /// cycle starts at its smallest id; the list is sorted.
    pub fn find_cycles(&self, kinds: &BTreeSet<EdgeKind>) -> Vec<Vec<EntityId>> {
        let n = self.nodes.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &self.edges {
            if kinds.contains(&e.kind) {
                adj[e.source].push(e.target);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        let mut radj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (v, succ) in adj.iter().enumerate() {
            for &w in succ {
                radj[w].push(v);
            }
        }

        let mut cycles = Vec::new();
        let mut johnson = Johnson {
            adj: &adj,
            in_scope: vec![false; n],
            blocked: vec![false; n],
            blocked_by: vec![Vec::new(); n],
            stack: Vec::new(),
            out: &mut cycles,
        };
        for s in 0..n {
            let component = component_of(&adj, &radj, s);
            if component.len() < 2 {
                continue;
            }
            for &v in &component {
                johnson.in_scope[v] = true;
                johnson.blocked[v] = false;
                johnson.blocked_by[v].clear();
            }
            johnson.circuit(s, s);
            for &v in &component {
                johnson.in_scope[v] = false;
            }
        }

        let mut named: Vec<Vec<EntityId>> = cycles
            .into_iter()
            .map(|c| c.into_iter().map(|i| self.nodes[i].clone()).collect())
            .collect();
        named.sort();
        named
    }

    /// Boolean matrix of rows × columns under `steps`: a direct edge when
    /// `transitive` is false, a path of one or more steps otherwise.
    pub fn trace_matrix(
        &self,
        rows: KindFilter,
        columns: KindFilter,
        steps: &StepRelation,
        transitive: bool,
    ) -> TraceMatrix {
        let pick = |f: KindFilter| -> Vec<usize> {
            (0..self.nodes.len())
                .filter(|&i| f.matches(self.kinds[i]))
                .collect()
        };
        let row_idx = pick(rows);
        let col_idx = pick(columns);
        let cells = row_idx
            .iter()
            .map(|&r| {
                let reached: BTreeSet<usize> = if transitive {
                    self.reachable([self.nodes[r].as_str()], steps)
                        .expect("row ids come from the graph")
                        .iter()
                        .map(|id| self.position[id])
                        .collect()
                } else {
                    self.successors(r, steps).into_iter().collect()
                };
                col_idx.iter().map(|c| reached.contains(c)).collect()
            })
            .collect();
        TraceMatrix {
            rows: row_idx.iter().map(|&i| self.nodes[i].clone()).collect(),
            columns: col_idx.iter().map(|&i| self.nodes[i].clone()).collect(),
            cells,
            row_kind: rows,
            column_kind: columns,
            relation: steps.iter().copied().collect(),
            transitive,
        }
    }
}

/// Strongly connected component containing `s` within nodes `>= s`.
fn component_of(adj: &[Vec<usize>], radj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let walk = |edges: &[Vec<usize>]| -> Vec<bool> {
        let mut seen = vec![false; edges.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for &w in &edges[v] {
                if w >= s && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    };
    let fwd = walk(adj);
    if !adj[s].iter().any(|&w| w > s && fwd[w]) {
        return vec![s];
    }
    let bwd = walk(radj);
    (s..adj.len()).filter(|&v| fwd[v] && bwd[v]).collect()
}

/// Johnson's elementary-circuit search, one start vertex at a time.
struct Johnson<'a> {
    adj: &'a [Vec<usize>],
    in_scope: Vec<bool>,
    blocked: Vec<bool>,
    blocked_by: Vec<Vec<usize>>,
    stack: Vec<usize>,
    out: &'a mut Vec<Vec<usize>>,
}

impl Johnson<'_> {
    fn circuit(&mut self, v: usize, start: usize) -> bool {
        let mut found = false;
        self.stack.push(v);
        self.blocked[v] = true;
        let adj = self.adj;
        for &w in &adj[v] {
            if !self.in_scope[w] {
                continue;
            }
            if w == start {
                self.out.push(self.stack.clone());
                found = true;
            } else if !self.blocked[w] && self.circuit(w, start) {
                found = true;
            }
        }
        if found {
            self.unblock(v);
        } else {
            for &w in &adj[v] {
                if self.in_scope[w] && !self.blocked_by[w].contains(&v) {
                    self.blocked_by[w].push(v);
                }
            }
        }
        self.stack.pop();
        found
    }

    fn unblock(&mut self, u: usize) {
        self.blocked[u] = false;
        for w in std::mem::take(&mut self.blocked_by[u]) {
            if self.blocked[w] {
                self.unblock(w);
            }
        }
    }
}

/// Selects matrix rows or columns by entity kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindFilter {
    Any,
    AnyRequirement,
    AnyElement,
    Kind(EntityKind),
}

impl KindFilter {
    pub fn matches(self, kind: EntityKind) -> bool {
        match self {
            KindFilter::Any => true,
            KindFilter::AnyRequirement => kind.is_requirement(),
            KindFilter::AnyElement => kind.is_solution(),
            KindFilter::Kind(k) => k == kind,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KindFilter::Any => "any",
            KindFilter::AnyRequirement => "requirement",
            KindFilter::AnyElement => "element",
            KindFilter::Kind(k) => k.label(),
        }
    }
}

impl FromStr for KindFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "any" => KindFilter::Any,
            "requirement" => KindFilter::AnyRequirement,
            "element" => KindFilter::AnyElement,
            "logical" => KindFilter::Kind(EntityKind::Logical),
            "physical" => KindFilter::Kind(EntityKind::Physical),
            "interface" => KindFilter::Kind(EntityKind::Interface),
            "testcase" => KindFilter::Kind(EntityKind::TestCase),
            "risk" => KindFilter::Kind(EntityKind::Risk),
            other => match RequirementClass::from_keyword(other) {
                Some(c) => KindFilter::Kind(EntityKind::Requirement(c)),
                None => return Err(format!("unknown entity kind '{other}'")),
            },
        })
    }
}

impl fmt::Display for KindFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for KindFilter {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceMatrix {
    pub rows: Vec<EntityId>,
    pub columns: Vec<EntityId>,
    /// `cells[i][j]` relates `rows[i]` to `columns[j]`.
    pub cells: Vec<Vec<bool>>,
    pub row_kind: KindFilter,
    pub column_kind: KindFilter,
    pub relation: Vec<Step>,
    pub transitive: bool,
}

impl TraceMatrix {
    pub fn get(&self, row: &str, column: &str) -> Option<bool> {
        let r = self.rows.iter().position(|x| x.as_str() == row)?;
        let c = self.columns.iter().position(|x| x.as_str() == column)?;
        Some(self.cells[r][c])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_model;

    fn graph(src: &str) -> TraceGraph {
        build_graph(&parse_model(src, "g.sreq").unwrap())
    }

    const CHAIN: &str = "requirement AR-1 : acquirer { text: \"a\" }\n\
        requirement STR-1 : technical { text: \"t\" }\n\
        requirement SR-1 : specified { text: \"s\" }\n\
        link derive AR-1 -> STR-1\n\
        link derive STR-1 -> SR-1\n";

    fn derive_fwd() -> StepRelation {
        [Step::forward(EdgeKind::Link(LinkKind::Derive))].into()
    }

    fn ids(set: &BTreeSet<EntityId>) -> Vec<&str> {
        set.iter().map(EntityId::as_str).collect()
    }

    #[test]
    fn builds_nodes_and_edges() {
        let g = graph(
            "requirement A : acquirer { text: \"a\" }\n\
             requirement B : technical { text: \"b\" }\n\
             link derive A -> B\n",
        );
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(build_graph(&Model::default()).node_count(), 0);
    }

    #[test]
    fn parent_edge_runs_parent_to_child() {
        let g = graph(
            "requirement P : acquirer { text: \"p\" }\n\
             requirement C : acquirer { text: \"c\" parent: P }\n",
        );
        let e: Vec<_> = g.edges().collect();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].kind, EdgeKind::Parent);
        assert_eq!((e[0].source.as_str(), e[0].target.as_str()), ("P", "C"));
    }

    #[test]
    fn reachable_chain() {
        let g = graph(CHAIN);
        let r = g.reachable(["AR-1"], &derive_fwd()).unwrap();
        assert_eq!(ids(&r), ["SR-1", "STR-1"]);
        assert!(g
            .reachable(["AR-1"], &StepRelation::new())
            .unwrap()
            .is_empty());
        assert!(g.reachable(["SR-1"], &derive_fwd()).unwrap().is_empty());
        assert!(matches!(
            g.reachable(["NOPE"], &derive_fwd()),
            Err(GraphError::UnknownReference(_))
        ));
    }

    #[test]
    fn bfs_distances_and_paths() {
        let g = graph(CHAIN);
        let v = g.bfs(["AR-1"], &derive_fwd()).unwrap();
        assert_eq!(v.len(), 2);
        let sr = v.iter().find(|x| x.id.as_str() == "SR-1").unwrap();
        assert_eq!(sr.distance, 2);
        let path: Vec<&str> = sr.path.iter().map(EntityId::as_str).collect();
        assert_eq!(path, ["AR-1", "STR-1", "SR-1"]);
    }

    #[test]
    fn cycles() {
        let derive: BTreeSet<EdgeKind> = [EdgeKind::Link(LinkKind::Derive)].into();
        assert!(graph(CHAIN).find_cycles(&derive).is_empty());

        let g = graph(
            "requirement A : technical { text: \"a\" }\n\
             requirement B : technical { text: \"b\" }\n\
             link derive A -> B\n\
             link derive B -> A\n",
        );
        let c = g.find_cycles(&derive);
        assert_eq!(
            c,
            vec![vec![
                EntityId::new("A").unwrap(),
                EntityId::new("B").unwrap()
            ]]
        );
    }

    #[test]
    fn cycles_in_overlapping_loops() {
        // A->B->C->A and B->C->B share the edge B->C.
        let g = graph(
            "requirement A : technical { text: \"a\" }\n\
             requirement B : technical { text: \"b\" }\n\
             requirement C : technical { text: \"c\" }\n\
             link refine A -> B\n\
             link refine B -> C\n\
             link refine C -> A\n\
             link refine C -> B\n",
        );
        let kinds: BTreeSet<EdgeKind> = [EdgeKind::Link(LinkKind::Refine)].into();
        let cycles = g.find_cycles(&kinds);
        let c: Vec<Vec<&str>> = cycles
            .iter()
            .map(|c| c.iter().map(EntityId::as_str).collect())
            .collect();
        assert_eq!(c, vec![vec!["A", "B", "C"], vec!["B", "C"]]);
    }

    #[test]
    fn matrices() {
        let g = graph(CHAIN);
        let acq: KindFilter = "acquirer".parse().unwrap();
        let tech: KindFilter = "technical".parse().unwrap();
        let spec: KindFilter = "specified".parse().unwrap();
        let m = g.trace_matrix(acq, tech, &derive_fwd(), false);
        assert_eq!(m.cells, vec![vec![true]]);
        let m = g.trace_matrix(acq, spec, &derive_fwd(), false);
        assert_eq!(m.get("AR-1", "SR-1"), Some(false));
        let m = g.trace_matrix(acq, spec, &derive_fwd(), true);
        assert_eq!(m.get("AR-1", "SR-1"), Some(true));
        let satisfy: StepRelation = [Step::forward(EdgeKind::Link(LinkKind::Satisfy))].into();
        let m = g.trace_matrix(acq, tech, &satisfy, true);
        assert_eq!(m.cells, vec![vec![false]]);
        let m = g.trace_matrix(KindFilter::Kind(EntityKind::Risk), tech, &satisfy, true);
        assert!(m.rows.is_empty() && m.cells.is_empty());
        assert!("bogus".parse::<KindFilter>().is_err());
    }

    #[test]
    fn step_parsing() {
        assert_eq!(
            "satisfy:reverse".parse::<Step>().unwrap(),
            Step::reverse(EdgeKind::Link(LinkKind::Satisfy))
        );
        assert_eq!(
            "parent".parse::<Step>().unwrap(),
            Step::forward(EdgeKind::Parent)
        );
        assert!("derive:sideways".parse::<Step>().is_err());
    }
}
