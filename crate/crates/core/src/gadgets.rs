//! Graph gadgets relating "in some" and "in every" maximum independent set,
//! the block whose top vertex detects `alpha(G) = k`, and the encoding of a
//! graph as a database whose C-repairs are its maximum independent sets.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::denial::{Atom, DenialConstraint, Term};
use crate::hypergraph::{Hypergraph, VertexId, VertexSet};
use crate::model::{Constant, DbTuple, Instance, Schema};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("edge mentions vertex {0}, but the graph has {1} vertices")]
    UnknownVertex(VertexId, u32),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// An undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimpleGraph {
    n: u32,
    edges: BTreeSet<(VertexId, VertexId)>,
}

impl SimpleGraph {
    pub fn new(
        n: u32,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let mut g = SimpleGraph {
            n,
            edges: BTreeSet::new(),
        };
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn edgeless(n: u32) -> Self {
        SimpleGraph {
            n,
            edges: BTreeSet::new(),
        }
    }

    /// Adds a vertex and returns its id (always the current maximum plus one).
    pub fn add_vertex(&mut self) -> VertexId {
        self.n += 1;
        self.n - 1
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        for x in [u, v] {
            if x >= self.n {
                return Err(GraphError::UnknownVertex(x, self.n));
            }
        }
        self.edges.insert((u.min(v), u.max(v)));
        Ok(())
    }

    pub fn vertex_count(&self) -> u32 {
        self.n
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.n
    }

    pub fn edges(&self) -> &BTreeSet<(VertexId, VertexId)> {
        &self.edges
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn neighbours(&self, v: VertexId) -> Vec<VertexId> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn to_hypergraph(&self) -> Hypergraph {
        Hypergraph::new(0..self.n, self.edges.iter().map(|&(a, b)| vec![a, b]))
    }

    /// Disjoint union: `other`'s vertices are shifted above ours. Returns
    /// the shift.
    fn absorb(&mut self, other: &SimpleGraph) -> u32 {
        let shift = self.n;
        self.n += other.n;
        for &(a, b) in &other.edges {
            self.edges.insert((a + shift, b + shift));
        }
        shift
    }

    /// Reads the graph file format: a line with `n`, then `u v` lines.
    /// Lines starting with `#` are ignored, as is a `t <id>` marker.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        Ok(parse_graph_file(text)?.0)
    }
}

/// Parses a graph file and its optional `t <id>` marker.
pub fn parse_graph_file(text: &str) -> Result<(SimpleGraph, Option<VertexId>), GraphError> {
    let mut g: Option<SimpleGraph> = None;
    let mut marker = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| GraphError::Parse {
            line: i + 1,
            msg: msg.to_string(),
        };
        let words: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| bad(&format!("`{s}` is not a vertex id")))
        };
        match (&mut g, words.as_slice()) {
            (None, [n]) => g = Some(SimpleGraph::edgeless(num(n)?)),
            (None, _) => return Err(bad("expected the vertex count")),
            (Some(_), ["t", v]) => marker = Some(num(v)?),
            (Some(graph), [u, v]) => graph
                .add_edge(num(u)?, num(v)?)
                .map_err(|e| bad(&e.to_string()))?,
            (Some(_), _) => return Err(bad("expected `u v`")),
        }
    }
    let g = g.ok_or(GraphError::Parse {
        line: 1,
        msg: "empty graph file".into(),
    })?;
    if let Some(t) = marker {
        if t >= g.n {
            return Err(GraphError::UnknownVertex(t, g.n));
        }
    }
    Ok((g, marker))
}

impl fmt::Display for SimpleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for (a, b) in &self.edges {
            writeln!(f, "{a} {b}")?;
        }
        Ok(())
    }
}

/// Adds a twin `v'` of `v` with the same neighbourhood. Then `v` is in some
/// maximum independent set of `g` iff it is in every maximum independent
/// set of the result, iff the independence number grows by one.
pub fn twin_extension(g: &SimpleGraph, v: VertexId) -> SimpleGraph {
    assert!(v < g.n, "vertex {v} not in graph");
    let mut out = g.clone();
    let twin = out.add_vertex();
    for u in g.neighbours(v) {
        out.add_edge(twin, u).unwrap();
    }
    out
}

/// Hangs a rhombus from `v`: new vertices `a`, `b` adjacent to `v` and a
/// third vertex `c` adjacent to `a` and `b`. Then `v` is in every maximum
/// independent set of `g` iff it is in some maximum independent set of the
/// result.
pub fn rhombus_extension(g: &SimpleGraph, v: VertexId) -> SimpleGraph {
    assert!(v < g.n, "vertex {v} not in graph");
    let mut out = g.clone();
    let a = out.add_vertex();
    let b = out.add_vertex();
    let c = out.add_vertex();
    for (x, y) in [(v, a), (v, b), (a, c), (b, c)] {
        out.add_edge(x, y).unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockParts {
    pub g1: Vec<VertexId>,
    pub g2: Vec<VertexId>,
    pub i_k: Vec<VertexId>,
    pub i_k1: Vec<VertexId>,
}

/// The block `B_k(G, t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub graph: SimpleGraph,
    pub t: VertexId,
    pub b: VertexId,
    pub parts: BlockParts,
}

impl Block {
    /// The graph file with the `t <id>` marker appended.
    pub fn to_file(&self) -> String {
        format!("{}t {}\n", self.graph, self.t)
    }
}

/// Builds the block whose vertex `t` is in every maximum independent set
/// iff `alpha(g) = k`. Two copies `G1`, `G2` of `g`; `k` independent
/// vertices `I_k`, each adjacent to all of `G1` and to `t`; `k + 1`
/// independent vertices `I_{k+1}`, each adjacent to all of `G2` and to `b`;
/// and the edge `t b`.
pub fn block(g: &SimpleGraph, k: u32) -> Block {
    assert!(k >= 1, "block parameter k must be at least 1");
    let mut out = SimpleGraph::default();
    let s1 = out.absorb(g);
    let s2 = out.absorb(g);
    let g1: Vec<VertexId> = (s1..s1 + g.n).collect();
    let g2: Vec<VertexId> = (s2..s2 + g.n).collect();
    let i_k: Vec<VertexId> = (0..k).map(|_| out.add_vertex()).collect();
    let i_k1: Vec<VertexId> = (0..=k).map(|_| out.add_vertex()).collect();
    let t = out.add_vertex();
    let b = out.add_vertex();
    for &i in &i_k {
        for &u in &g1 {
            out.add_edge(i, u).unwrap();
        }
        out.add_edge(i, t).unwrap();
    }
    for &i in &i_k1 {
        for &u in &g2 {
            out.add_edge(i, u).unwrap();
        }
        out.add_edge(i, b).unwrap();
    }
    out.add_edge(t, b).unwrap();
    Block {
        graph: out,
        t,
        b,
        parts: BlockParts { g1, g2, i_k, i_k1 },
    }
}

pub const VERTEX_RELATION: &str = "Vertex";
pub const EDGES_RELATION: &str = "Edges";

/// Encodes `g` as a database: `Vertex(v)` per vertex and, per edge `{u,v}`
/// with `u < v`, the `n` tuples `Edges(u,v,i)` for `i = 1..=n`, under the
/// denial `:- Vertex(x), Vertex(y), Edges(x,y,z).` Deleting edge tuples is
/// never cardinality-optimal, so C-repairs keep the vertices of one
/// maximum independent set plus every `Edges` tuple.
pub fn graph_to_database(g: &SimpleGraph) -> (Instance, DenialConstraint) {
    let mut schema = Schema::new();
    schema
        .add_relation(VERTEX_RELATION, vec!["v".into()])
        .unwrap();
    schema
        .add_relation(EDGES_RELATION, vec!["v1".into(), "v2".into(), "e".into()])
        .unwrap();
    let mut db = Instance::new(schema);
    for v in g.vertices() {
        db.insert(vertex_tuple(v)).unwrap();
    }
    let n = g.n as i64;
    for &(a, b) in &g.edges {
        for i in 1..=n {
            db.insert(DbTuple::new(
                EDGES_RELATION,
                vec![
                    Constant::Int(a as i64),
                    Constant::Int(b as i64),
                    Constant::Int(i),
                ],
            ))
            .unwrap();
        }
    }
    let atom = |rel: &str, vars: &[&str]| Atom {
        relation: rel.to_string(),
        terms: vars.iter().map(|v| Term::var(v)).collect(),
    };
    let c = DenialConstraint::new(
        "edge",
        vec![
            atom(VERTEX_RELATION, &["x"]),
            atom(VERTEX_RELATION, &["y"]),
            atom(EDGES_RELATION, &["x", "y", "z"]),
        ],
        vec![],
    )
    .unwrap();
    (db, c)
}

pub fn vertex_tuple(v: VertexId) -> DbTuple {
    DbTuple::new(VERTEX_RELATION, vec![Constant::Int(v as i64)])
}

/// The vertex set kept by a repair of the encoding.
pub fn repair_to_vertex_set<'a>(retained: impl IntoIterator<Item = &'a DbTuple>) -> VertexSet {
    retained
        .into_iter()
        .filter(|t| &*t.relation == VERTEX_RELATION)
        .filter_map(|t| t.args[0].as_int())
        .map(|v| v as VertexId)
        .collect()
}
