//! Directed multigraphs with a designated sink.
//!
//! Vertices are dense indices `0..vertex_count`. The sink index is stored
//! explicitly. Parallel edges are kept as a single [`Edge`] carrying a
//! multiplicity, and loops are allowed.
//!
//! A [`MultiDigraph`] is validated once at construction: it has at least one
//! non-sink vertex, is weakly connected, and the sink is reachable from every
//! vertex. Everything downstream relies on those facts.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::engine::Config;
use crate::error::{Error, Result};

/// A set of vertex indices, iterated in increasing order.
pub type VertexSet = BTreeSet<usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiDigraph {
    vertex_count: usize,
    sink: usize,
    /// Sorted by `(tail, head)`, one entry per ordered pair.
    edges: Vec<Edge>,
    out: Vec<Vec<(usize, u64)>>,
    out_degree: Vec<u64>,
    non_sink: Vec<usize>,
    position: Vec<Option<usize>>,
    /// Out-edges in configuration coordinates, sink heads dropped.
    targets: Vec<Vec<(usize, u64)>>,
}

impl MultiDigraph {
    /// Builds and validates a graph. Repeated `(tail, head)` pairs are merged
    /// by adding their multiplicities.
    pub fn new<I>(vertex_count: usize, sink: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u64)>,
    {
        if vertex_count < 2 {
            return Err(Error::InvalidGraph(
                "a graph needs the sink and at least one other vertex".into(),
            ));
        }
        if sink >= vertex_count {
            return Err(Error::InvalidGraph(format!(
                "sink {sink} out of range for {vertex_count} vertices"
            )));
        }
        let mut merged: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for (tail, head, m) in edges {
            if tail >= vertex_count || head >= vertex_count {
                return Err(Error::InvalidGraph(format!(
                    "edge {tail} -> {head} out of range for {vertex_count} vertices"
                )));
            }
            if m == 0 {
                return Err(Error::InvalidGraph(format!(
                    "edge {tail} -> {head} has multiplicity 0"
                )));
            }
            let slot = merged.entry((tail, head)).or_insert(0);
            *slot = slot.checked_add(m).ok_or_else(|| {
                Error::InvalidGraph(format!("multiplicity overflow on {tail} -> {head}"))
            })?;
        }
        let edges: Vec<Edge> = merged
            .into_iter()
            .map(|((tail, head), multiplicity)| Edge {
                tail,
                head,
                multiplicity,
            })
            .collect();

        let mut out = vec![Vec::new(); vertex_count];
        let mut out_degree = vec![0u64; vertex_count];
        for e in &edges {
            out[e.tail].push((e.head, e.multiplicity));
            out_degree[e.tail] = out_degree[e.tail]
                .checked_add(e.multiplicity)
                .ok_or_else(|| Error::InvalidGraph(format!("out-degree overflow at {}", e.tail)))?;
        }

        let non_sink: Vec<usize> = (0..vertex_count).filter(|&v| v != sink).collect();
        let mut position = vec![None; vertex_count];
        for (p, &v) in non_sink.iter().enumerate() {
            position[v] = Some(p);
        }
        let targets = non_sink
            .iter()
            .map(|&v| {
                out[v]
                    .iter()
                    .filter_map(|&(w, m)| position[w].map(|p| (p, m)))
                    .collect()
            })
            .collect();

        let g = MultiDigraph {
            vertex_count,
            sink,
            edges,
            out,
            out_degree,
            non_sink,
            position,
            targets,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        // weak connectivity
        let mut undirected = vec![Vec::new(); self.vertex_count];
        for e in &self.edges {
            undirected[e.tail].push(e.head);
            undirected[e.head].push(e.tail);
        }
        let seen = bfs(&undirected, [self.sink]);
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidGraph(format!(
                "graph is not weakly connected (vertex {v} is cut off)"
            )));
        }

        // every vertex reaches the sink; walk in-edges backwards from it
        let mut reverse = vec![Vec::new(); self.vertex_count];
        for e in &self.edges {
            if e.tail != self.sink {
                reverse[e.head].push(e.tail);
            }
        }
        let seen = bfs(&reverse, [self.sink]);
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidGraph(format!(
                "the sink is not reachable from vertex {v}"
            )));
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_degree(&self, v: usize) -> u64 {
        self.out_degree[v]
    }

    /// Out-neighbours of `v` with multiplicities, sorted by head.
    pub fn out_edges(&self, v: usize) -> &[(usize, u64)] {
        &self.out[v]
    }

    pub fn multiplicity(&self, tail: usize, head: usize) -> u64 {
        self.out[tail]
            .binary_search_by_key(&head, |&(w, _)| w)
            .map(|i| self.out[tail][i].1)
            .unwrap_or(0)
    }

    pub fn has_loop(&self, v: usize) -> bool {
        self.multiplicity(v, v) > 0
    }

    /// Non-sink vertices in increasing order; a configuration's entry `p`
    /// belongs to `non_sink_vertices()[p]`.
    pub fn non_sink_vertices(&self) -> &[usize] {
        &self.non_sink
    }

    pub fn non_sink_count(&self) -> usize {
        self.non_sink.len()
    }

    /// Configuration coordinate of vertex `v`, `None` for the sink.
    pub fn position(&self, v: usize) -> Option<usize> {
        self.position.get(v).copied().flatten()
    }

    pub fn vertex_at(&self, p: usize) -> usize {
        self.non_sink[p]
    }

    pub(crate) fn degree_at(&self, p: usize) -> u64 {
        self.out_degree[self.non_sink[p]]
    }

    pub(crate) fn targets_at(&self, p: usize) -> &[(usize, u64)] {
        &self.targets[p]
    }

    /// Out-degrees of the non-sink vertices in configuration order.
    pub fn degrees(&self) -> Vec<u64> {
        self.non_sink.iter().map(|&v| self.out_degree[v]).collect()
    }

    /// `∏ deg⁺(v)` over non-sink vertices, the number of stable
    /// configurations.
    pub fn monoid_order(&self) -> u128 {
        self.non_sink
            .iter()
            .map(|&v| self.out_degree[v] as u128)
            .fold(1u128, |acc, d| acc.saturating_mul(d))
    }

    pub fn sink_out_degree(&self) -> u64 {
        self.out_degree[self.sink]
    }

    /// The same graph with every out-edge of the sink removed. Sandpile
    /// dynamics never look at those edges, so the monoid is unchanged.
    pub fn sink_strip(&self) -> MultiDigraph {
        if self.sink_out_degree() == 0 {
            return self.clone();
        }
        let sink = self.sink;
        MultiDigraph::new(
            self.vertex_count,
            sink,
            self.edges
                .iter()
                .filter(|e| e.tail != sink)
                .map(|e| (e.tail, e.head, e.multiplicity)),
        )
        .expect("removing sink out-edges keeps a valid graph")
    }

    fn check_non_sink(&self, w: &VertexSet) -> Result<()> {
        for &v in w {
            if v >= self.vertex_count {
                return Err(Error::Precondition(format!("vertex {v} out of range")));
            }
            if v == self.sink {
                return Err(Error::Precondition(
                    "vertex sets must not contain the sink".into(),
                ));
            }
        }
        Ok(())
    }

    /// `cl(W)`: every non-sink vertex reachable from `W` by a path (possibly
    /// trivial) that does not pass through the sink.
    pub fn closure(&self, w: &VertexSet) -> Result<VertexSet> {
        self.check_non_sink(w)?;
        Ok(self.closure_unchecked(w.iter().copied()))
    }

    pub(crate) fn closure_unchecked<I: IntoIterator<Item = usize>>(&self, w: I) -> VertexSet {
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::new();
        for v in w {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &(u, _) in &self.out[v] {
                if u != self.sink && !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen.iter()
            .enumerate()
            .filter(|&(v, &s)| s && v != self.sink)
            .map(|(v, _)| v)
            .collect()
    }

    /// `ι(S)`: the subgraph on `cl(S) ∪ {sink}` carrying every edge whose
    /// tail lies in `cl(S)`.
    pub fn iota_subgraph(&self, s: &VertexSet) -> Result<Subgraph> {
        if s.is_empty() {
            return Err(Error::Precondition("ι(S) needs a nonempty S".into()));
        }
        let cl = self.closure(s)?;
        self.induced_with_sink(&cl)
    }

    /// The subgraph on `vertices ∪ {sink}` with all out-edges of `vertices`.
    /// The set must be closed under out-neighbours (apart from the sink).
    pub fn induced_with_sink(&self, vertices: &VertexSet) -> Result<Subgraph> {
        self.check_non_sink(vertices)?;
        if vertices.is_empty() {
            return Err(Error::Precondition(
                "subgraph would contain only the sink".into(),
            ));
        }
        let mut keep: Vec<usize> = vertices.iter().copied().collect();
        keep.push(self.sink);
        keep.sort_unstable();
        let mut index = vec![usize::MAX; self.vertex_count];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let mut edges = Vec::new();
        for &v in vertices {
            for &(w, m) in &self.out[v] {
                if index[w] == usize::MAX {
                    return Err(Error::Precondition(format!(
                        "vertex set is not closed: edge {v} -> {w} leaves it"
                    )));
                }
                edges.push((index[v], index[w], m));
            }
        }
        let graph = MultiDigraph::new(keep.len(), index[self.sink], edges)?;
        Ok(Subgraph {
            graph,
            vertices: keep,
        })
    }

    /// True when every edge between non-sink vertices is matched by a reverse
    /// edge of the same multiplicity. Edges touching the sink are ignored,
    /// since stripping the sink's out-edges leaves them one-way.
    pub fn is_undirected(&self) -> bool {
        self.edges.iter().all(|e| {
            e.tail == self.sink
                || e.head == self.sink
                || self.multiplicity(e.head, e.tail) == e.multiplicity
        })
    }

    /// Whether `X` (the graph with the sink deleted) is weakly connected.
    pub fn non_sink_connected(&self) -> bool {
        let mut undirected = vec![Vec::new(); self.vertex_count];
        for e in &self.edges {
            if e.tail != self.sink && e.head != self.sink {
                undirected[e.tail].push(e.head);
                undirected[e.head].push(e.tail);
            }
        }
        let seen = bfs(&undirected, [self.non_sink[0]]);
        self.non_sink.iter().all(|&v| seen[v])
    }

    /// Serialises to the line-oriented text format:
    /// `n <vertex_count> <sink>` followed by `e <tail> <head> <multiplicity>`.
    pub fn to_text(&self) -> String {
        let mut s = format!("n {} {}\n", self.vertex_count, self.sink);
        for e in &self.edges {
            s.push_str(&format!("e {} {} {}\n", e.tail, e.head, e.multiplicity));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let tag = fields.next().unwrap_or("");
            let nums: Vec<&str> = fields.collect();
            let parse = |s: &str| -> Result<u64> {
                s.parse::<u64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("expected a nonnegative integer, found {s:?}"),
                })
            };
            match (tag, header) {
                ("n", None) => {
                    if nums.len() != 2 {
                        return Err(Error::Parse {
                            line: line_no,
                            message: "expected `n <vertex_count> <sink>`".into(),
                        });
                    }
                    header = Some((parse(nums[0])? as usize, parse(nums[1])? as usize));
                }
                ("n", Some(_)) => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "duplicate `n` header".into(),
                    })
                }
                ("e", Some(_)) => {
                    if nums.len() != 3 {
                        return Err(Error::Parse {
                            line: line_no,
                            message: "expected `e <tail> <head> <multiplicity>`".into(),
                        });
                    }
                    edges.push((
                        parse(nums[0])? as usize,
                        parse(nums[1])? as usize,
                        parse(nums[2])?,
                    ));
                }
                ("e", None) => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "edge before the `n` header".into(),
                    })
                }
                (other, _) => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("unknown record {other:?}"),
                    })
                }
            }
        }
        let (n, sink) = header.ok_or(Error::Parse {
            line: 0,
            message: "missing `n` header".into(),
        })?;
        MultiDigraph::new(n, sink, edges)
    }
}

impl fmt::Display for MultiDigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for MultiDigraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MultiDigraph::from_text(s)
    }
}

fn bfs<const K: usize>(adj: &[Vec<usize>], start: [usize; K]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for s in start {
        seen[s] = true;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// A sink-augmented subgraph together with the parent index of each of its
/// vertices. The subgraph's sink is the parent's sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub graph: MultiDigraph,
    /// `vertices[i]` is the parent vertex of subgraph vertex `i`; increasing.
    pub vertices: Vec<usize>,
}

impl Subgraph {
    /// Non-sink vertices of the subgraph, in parent indices.
    pub fn parent_vertices(&self) -> VertexSet {
        self.graph
            .non_sink_vertices()
            .iter()
            .map(|&v| self.vertices[v])
            .collect()
    }

    /// Zero-extends a configuration on the subgraph to the parent graph.
    pub fn embed(&self, parent: &MultiDigraph, c: &Config) -> Config {
        let mut grains = vec![0u64; parent.non_sink_count()];
        for (p, &g) in c.grains().iter().enumerate() {
            let v = self.vertices[self.graph.vertex_at(p)];
            grains[parent.position(v).expect("non-sink vertex")] = g;
        }
        Config::new(grains)
    }

    /// Restricts a parent configuration to the subgraph's vertices.
    pub fn restrict(&self, parent: &MultiDigraph, c: &Config) -> Config {
        Config::new(
            self.graph
                .non_sink_vertices()
                .iter()
                .map(|&v| c.grains()[parent.position(self.vertices[v]).expect("non-sink vertex")])
                .collect(),
        )
    }
}
