//! Conflict hypergraphs: tuples as vertices, minimal violating tuple sets as
//! hyperedges.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::denial::{minimize_sets, violation_images, ConstraintSet};
use crate::eval::TupleIndex;
use crate::model::{DbTuple, Instance};
use crate::syntax::ParseError;

pub type VertexId = u32;
pub type VertexSet = BTreeSet<VertexId>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypergraphError {
    #[error("vertex {0} lies in a singleton hyperedge and is in no independent set")]
    ForcedOut(VertexId),
    #[error("vertex {0} is not in the hypergraph")]
    UnknownVertex(VertexId),
}

/// A hypergraph over stable vertex ids. Edges are sorted, nonempty,
/// pairwise incomparable under inclusion, and each carries a tag (the index
/// of the constraint that produced it, or 0 for plain graphs).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Hypergraph {
    vertices: Vec<VertexId>,
    edges: Vec<Vec<VertexId>>,
    tags: Vec<u32>,
}

impl Hypergraph {
    /// Builds a hypergraph, dropping edges that are supersets of others.
    ///
    /// Panics if an edge is empty or mentions a vertex outside `vertices`.
    pub fn new<V, E>(vertices: V, edges: E) -> Self
    where
        V: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = Vec<VertexId>>,
    {
        Self::with_tags(vertices, edges.into_iter().map(|e| (e, 0)))
    }

    pub fn with_tags<V, E>(vertices: V, edges: E) -> Self
    where
        V: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = (Vec<VertexId>, u32)>,
    {
        let mut vertices: Vec<VertexId> = vertices.into_iter().collect();
        vertices.sort_unstable();
        vertices.dedup();
        let mut tag_of: HashMap<Vec<VertexId>, u32> = HashMap::new();
        for (mut e, tag) in edges {
            e.sort_unstable();
            e.dedup();
            assert!(!e.is_empty(), "empty hyperedge");
            assert!(
                e.iter().all(|v| vertices.binary_search(v).is_ok()),
                "hyperedge {e:?} mentions an unknown vertex"
            );
            tag_of
                .entry(e)
                .and_modify(|t| *t = (*t).min(tag))
                .or_insert(tag);
        }
        let edges = minimize_sets(tag_of.keys().cloned().collect());
        let tags = edges.iter().map(|e| tag_of[e]).collect();
        Hypergraph {
            vertices,
            edges,
            tags,
        }
    }

    /// Builds from sorted vertices and edges already sorted, deduplicated
    /// and inclusion-minimal, skipping the normalisation `new` performs.
    pub(crate) fn from_minimal(vertices: Vec<VertexId>, edges: Vec<Vec<VertexId>>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges
            .iter()
            .all(|e| !e.is_empty() && e.windows(2).all(|w| w[0] < w[1])));
        let tags = vec![0; edges.len()];
        Hypergraph {
            vertices,
            edges,
            tags,
        }
    }

    /// Graph on vertices `0..n`.
    pub fn graph(n: u32, edges: &[(VertexId, VertexId)]) -> Self {
        Self::new(0..n, edges.iter().map(|&(a, b)| vec![a, b]))
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> &[Vec<VertexId>] {
        &self.edges
    }

    pub fn edge_tag(&self, i: usize) -> u32 {
        self.tags[i]
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn max_edge_size(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_edgeless(&self) -> bool {
        self.edges.is_empty()
    }

    /// Vertices lying in no hyperedge.
    pub fn isolated_vertices(&self) -> Vec<VertexId> {
        let mut touched = vec![false; self.vertices.len()];
        for e in &self.edges {
            for v in e {
                touched[self.vertices.binary_search(v).unwrap()] = true;
            }
        }
        self.vertices
            .iter()
            .zip(touched)
            .filter(|(_, t)| !t)
            .map(|(v, _)| *v)
            .collect()
    }

    /// True if `s` contains no hyperedge.
    pub fn is_independent(&self, s: &VertexSet) -> bool {
        !self.edges.iter().any(|e| e.iter().all(|v| s.contains(v)))
    }

    /// Vertex deletion: drops `removed` and every hyperedge meeting it.
    pub fn restrict(&self, removed: &VertexSet) -> Hypergraph {
        if removed.is_empty() {
            return self.clone();
        }
        let keep = |e: &Vec<VertexId>| !e.iter().any(|v| removed.contains(v));
        let (edges, tags) = self
            .edges
            .iter()
            .zip(&self.tags)
            .filter(|(e, _)| keep(e))
            .map(|(e, t)| (e.clone(), *t))
            .unzip();
        Hypergraph {
            vertices: self
                .vertices
                .iter()
                .copied()
                .filter(|v| !removed.contains(v))
                .collect(),
            edges,
            tags,
        }
    }

    /// Vertices that cannot join an independent set containing `v`: the
    /// other endpoints of 2-edges through `v`.
    pub fn forced_out_by(&self, v: VertexId) -> VertexSet {
        self.edges
            .iter()
            .filter(|e| e.len() == 2 && e.contains(&v))
            .map(|e| if e[0] == v { e[1] } else { e[0] })
            .collect()
    }

    /// Commits `v` to the independent set. The result's maximum independent
    /// sets are exactly `I - {v}` for the maximum ones among independent
    /// sets of `self` containing `v`: `v` is removed, the other endpoint of
    /// every 2-edge through `v` is deleted, and larger edges through `v`
    /// shrink to `e - {v}`.
    pub fn condition_on(&self, v: VertexId) -> Result<Hypergraph, HypergraphError> {
        if !self.contains_vertex(v) {
            return Err(HypergraphError::UnknownVertex(v));
        }
        if self.edges.iter().any(|e| e.len() == 1 && e[0] == v) {
            return Err(HypergraphError::ForcedOut(v));
        }
        let mut gone = self.forced_out_by(v);
        gone.insert(v);
        let vertices = self.vertices.iter().copied().filter(|u| !gone.contains(u));
        let edges: Vec<(Vec<VertexId>, u32)> = self
            .edges
            .iter()
            .zip(&self.tags)
            .filter_map(|(e, &t)| {
                let shrunk: Vec<VertexId> = e.iter().copied().filter(|&u| u != v).collect();
                if shrunk.iter().any(|u| gone.contains(u)) {
                    None
                } else {
                    Some((shrunk, t))
                }
            })
            .collect();
        Ok(Hypergraph::with_tags(vertices, edges))
    }

    /// Neighbourhood in the 2-section (vertices sharing an edge with `v`).
    pub fn neighbours(&self, v: VertexId) -> VertexSet {
        self.edges
            .iter()
            .filter(|e| e.contains(&v))
            .flatten()
            .copied()
            .filter(|&u| u != v)
            .collect()
    }
}

impl fmt::Display for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vertices.iter().map(ToString::to_string).collect();
        writeln!(f, "vertices {}", vs.join(" "))?;
        for e in &self.edges {
            let es: Vec<String> = e.iter().map(ToString::to_string).collect();
            writeln!(f, "edge {}", es.join(" "))?;
        }
        Ok(())
    }
}

/// The conflict hypergraph of an instance: the combinatorial structure plus
/// the tuple behind every vertex id and the constraint ids behind edge tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictHypergraph {
    graph: Hypergraph,
    tuples: Vec<DbTuple>,
    constraint_ids: Vec<String>,
}

impl ConflictHypergraph {
    pub fn graph(&self) -> &Hypergraph {
        &self.graph
    }

    pub fn tuple(&self, v: VertexId) -> &DbTuple {
        &self.tuples[v as usize]
    }

    /// Every tuple of the instance, indexed by vertex id.
    pub fn tuples(&self) -> &[DbTuple] {
        &self.tuples
    }

    pub fn vertex_of(&self, t: &DbTuple) -> Option<VertexId> {
        self.tuples
            .binary_search(t)
            .ok()
            .map(|i| i as VertexId)
            .filter(|&v| self.graph.contains_vertex(v))
    }

    pub fn edge_constraint(&self, i: usize) -> &str {
        &self.constraint_ids[self.graph.edge_tag(i) as usize]
    }

    pub fn to_tuples(&self, s: &VertexSet) -> BTreeSet<DbTuple> {
        s.iter().map(|&v| self.tuple(v).clone()).collect()
    }

    pub fn restrict(&self, removed: &VertexSet) -> ConflictHypergraph {
        ConflictHypergraph {
            graph: self.graph.restrict(removed),
            tuples: self.tuples.clone(),
            constraint_ids: self.constraint_ids.clone(),
        }
    }

    pub fn condition_on(&self, v: VertexId) -> Result<ConflictHypergraph, HypergraphError> {
        Ok(ConflictHypergraph {
            graph: self.graph.condition_on(v)?,
            tuples: self.tuples.clone(),
            constraint_ids: self.constraint_ids.clone(),
        })
    }

    /// Text export: a `vertex <id> <tuple>` header, then one
    /// `edge <constraint>: <id> <id> ...` line per hyperedge.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for &v in self.graph.vertices() {
            out.push_str(&format!("vertex {v} {}\n", self.tuple(v)));
        }
        for (i, e) in self.graph.edges().iter().enumerate() {
            let ids: Vec<String> = e.iter().map(ToString::to_string).collect();
            out.push_str(&format!(
                "edge {}: {}\n",
                self.edge_constraint(i),
                ids.join(" ")
            ));
        }
        out
    }

    /// Reads back the output of [`export`](Self::export).
    pub fn parse_export(text: &str) -> Result<ConflictHypergraph, ParseError> {
        let mut tuples: BTreeMap<VertexId, DbTuple> = BTreeMap::new();
        let mut edges: Vec<(Vec<VertexId>, String)> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let bad = |msg: &str| ParseError::Syntax {
                line: line_no,
                col: 1,
                msg: msg.to_string(),
            };
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("vertex ") {
                let (id, tuple) = rest
                    .split_once(' ')
                    .ok_or_else(|| bad("expected `vertex <id> <tuple>`"))?;
                let id: VertexId = id.parse().map_err(|_| bad("bad vertex id"))?;
                let inst = crate::syntax::parse_instance(tuple).map_err(|e| match e {
                    ParseError::Syntax { col, msg, .. } => ParseError::Syntax {
                        line: line_no,
                        col,
                        msg,
                    },
                    other => other,
                })?;
                let t = inst
                    .tuples()
                    .next()
                    .cloned()
                    .ok_or_else(|| bad("missing tuple"))?;
                tuples.insert(id, t);
            } else if let Some(rest) = line.strip_prefix("edge ") {
                let (tag, ids) = rest
                    .split_once(':')
                    .ok_or_else(|| bad("expected `edge <tag>: ids`"))?;
                let ids = ids
                    .split_whitespace()
                    .map(|s| s.parse::<VertexId>().map_err(|_| bad("bad vertex id")))
                    .collect::<Result<Vec<_>, _>>()?;
                if ids.is_empty() || ids.iter().any(|v| !tuples.contains_key(v)) {
                    return Err(bad("edge mentions an undeclared vertex"));
                }
                edges.push((ids, tag.trim().to_string()));
            } else {
                return Err(bad("expected `vertex` or `edge`"));
            }
        }
        let mut constraint_ids: Vec<String> = edges.iter().map(|(_, t)| t.clone()).collect();
        constraint_ids.sort();
        constraint_ids.dedup();
        let max = tuples.keys().next_back().map_or(0, |&m| m as usize + 1);
        if tuples.len() != max {
            return Err(ParseError::Syntax {
                line: 1,
                col: 1,
                msg: "vertex ids must be contiguous from 0".into(),
            });
        }
        let graph = Hypergraph::with_tags(
            tuples.keys().copied(),
            edges.into_iter().map(|(e, t)| {
                let tag = constraint_ids.binary_search(&t).unwrap() as u32;
                (e, tag)
            }),
        );
        Ok(ConflictHypergraph {
            graph,
            tuples: tuples.into_values().collect(),
            constraint_ids,
        })
    }
}

/// Conflict hypergraph over a prepared index, optionally restricted to the
/// tuples accepted by `alive`. Vertex ids are index ids.
pub(crate) fn build_from_index(
    index: &TupleIndex,
    ics: &ConstraintSet,
    alive: &dyn Fn(u32) -> bool,
) -> Hypergraph {
    let mut edges = Vec::new();
    for (ci, c) in ics.constraints().iter().enumerate() {
        for img in violation_images(index, c, alive, None) {
            edges.push((img, ci as u32));
        }
    }
    Hypergraph::with_tags((0..index.len() as u32).filter(|&v| alive(v)), edges)
}

/// Vertices are all tuples of `instance` (ids in canonical tuple order);
/// hyperedges are the minimal violating sets of every constraint,
/// re-minimized across constraints.
pub fn build_conflict_hypergraph(instance: &Instance, ics: &ConstraintSet) -> ConflictHypergraph {
    let index = TupleIndex::new(instance);
    let graph = build_from_index(&index, ics, &|_| true);
    ConflictHypergraph {
        graph,
        tuples: index.tuples().to_vec(),
        constraint_ids: ics.constraints().iter().map(|c| c.id.clone()).collect(),
    }
}

/// True if no hyperedge of `h` lies inside `s`.
pub fn is_independent(h: &ConflictHypergraph, s: &VertexSet) -> bool {
    h.graph.is_independent(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_constraints, parse_instance};

    fn example1() -> ConflictHypergraph {
        let d = parse_instance("P(a,b,c)\nP(a,c,d)\nP(a,c,e)").unwrap();
        let ics = parse_constraints(":- P(x,y,z), P(x,u,w), y != u.").unwrap();
        build_conflict_hypergraph(&d, &ics)
    }

    fn star(n: i64) -> ConflictHypergraph {
        let mut text = String::from("S(0)\n");
        for i in 1..=n {
            text.push_str(&format!("R({i})\n"));
        }
        let d = parse_instance(&text).unwrap();
        build_conflict_hypergraph(&d, &parse_constraints(":- R(x), S(y).").unwrap())
    }

    #[test]
    fn example1_structure() {
        let h = example1();
        assert_eq!(h.graph().vertex_count(), 3);
        // canonical order: P(a,b,c)=0, P(a,c,d)=1, P(a,c,e)=2
        assert_eq!(h.graph().edges(), &[vec![0, 1], vec![0, 2]]);
        assert_eq!(h.edge_constraint(0), "c1");
        assert!(is_independent(&h, &VertexSet::from([1, 2])));
        assert!(!is_independent(&h, &VertexSet::from([0, 1])));
        assert!(is_independent(&h, &VertexSet::new()));
    }

    #[test]
    fn consistent_instance_is_edgeless() {
        let d = parse_instance("P(a,c,d)\nP(a,c,e)").unwrap();
        let ics = parse_constraints(":- P(x,y,z), P(x,u,w), y != u.").unwrap();
        assert!(build_conflict_hypergraph(&d, &ics).graph().is_edgeless());
    }

    #[test]
    fn star_has_hub() {
        let h = star(3);
        let hub = h.vertex_of(&crate::tuple!("S", 0)).unwrap();
        assert_eq!(h.graph().edges().len(), 3);
        assert!(h
            .graph()
            .edges()
            .iter()
            .all(|e| e.len() == 2 && e.contains(&hub)));
        assert!(h.restrict(&VertexSet::from([hub])).graph().is_edgeless());
    }

    #[test]
    fn restrict_drops_incident_edges() {
        let h = example1();
        let r = h.restrict(&VertexSet::from([0]));
        assert_eq!(r.graph().vertices(), &[1, 2]);
        assert!(r.graph().is_edgeless());
        assert_eq!(h.restrict(&VertexSet::new()), h);
    }

    #[test]
    fn cross_constraint_minimization() {
        let d = parse_instance("R(1)\nR(2)").unwrap();
        let ics = parse_constraints(":- R(x), R(y), x < y.\n:- R(x), x = 1.").unwrap();
        let h = build_conflict_hypergraph(&d, &ics);
        assert_eq!(h.graph().edges(), &[vec![0]]);
        assert_eq!(h.edge_constraint(0), "c2");
    }

    #[test]
    fn conditioning_a_path_on_its_middle() {
        let g = Hypergraph::graph(3, &[(0, 1), (1, 2)]);
        let c = g.condition_on(1).unwrap();
        assert!(c.vertices().is_empty());
    }

    #[test]
    fn conditioning_edgeless_removes_vertex() {
        let g = Hypergraph::graph(3, &[]);
        assert_eq!(
            g.condition_on(2).unwrap(),
            g.restrict(&VertexSet::from([2]))
        );
    }

    #[test]
    fn conditioning_shrinks_large_edges() {
        let g = Hypergraph::new(0..3, [vec![0, 1, 2]]);
        let c = g.condition_on(0).unwrap();
        assert_eq!(c.vertices(), &[1, 2]);
        assert_eq!(c.edges(), &[vec![1, 2]]);
    }

    #[test]
    fn conditioning_errors() {
        let g = Hypergraph::new(0..2, [vec![0]]);
        assert_eq!(g.condition_on(0), Err(HypergraphError::ForcedOut(0)));
        assert_eq!(g.condition_on(7), Err(HypergraphError::UnknownVertex(7)));
    }

    #[test]
    fn superset_edges_are_dropped() {
        let g = Hypergraph::new(0..3, [vec![0, 1, 2], vec![1, 0], vec![2, 1, 0]]);
        assert_eq!(g.edges(), &[vec![0, 1]]);
    }

    #[test]
    fn export_round_trip() {
        let h = example1();
        let text = h.export();
        assert!(text.starts_with("vertex 0 P(a,b,c)\n"));
        assert!(text.contains("edge c1: 0 1\n"));
        assert_eq!(ConflictHypergraph::parse_export(&text).unwrap(), h);
    }
}
