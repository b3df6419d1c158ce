//! Cyclic strong components, their reachability poset, and filters.
//!
//! Components live in `X`, the graph with the sink deleted: the sink is never
//! a member of a component and paths never pass through it. A component is
//! cyclic when it contains a cycle, i.e. it has more than one vertex or its
//! single vertex carries a loop. The remaining vertices are the acyclic ones.

use serde::Serialize;

use crate::error::Result;
use crate::graph::{MultiDigraph, Subgraph, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentPoset {
    /// Vertex lists, each sorted; components sorted by their least vertex.
    components: Vec<Vec<usize>>,
    /// `order[i][j]` iff `C_i ≤ C_j`, i.e. `C_j` is reachable from `C_i`.
    order: Vec<Vec<bool>>,
    acyclic: Vec<usize>,
    #[serde(skip)]
    component_of: Vec<Option<usize>>,
}

/// Computes the cyclic strong components of `g` and their partial order.
pub fn cyclic_strong_components(g: &MultiDigraph) -> ComponentPoset {
    let mut components: Vec<Vec<usize>> = strong_components(g)
        .into_iter()
        .filter(|c| c.len() > 1 || g.has_loop(c[0]))
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    components.sort_unstable_by_key(|c| c[0]);

    let mut component_of = vec![None; g.vertex_count()];
    for (i, c) in components.iter().enumerate() {
        for &v in c {
            component_of[v] = Some(i);
        }
    }
    let acyclic = g
        .non_sink_vertices()
        .iter()
        .copied()
        .filter(|&v| component_of[v].is_none())
        .collect();

    let order = components
        .iter()
        .map(|c| {
            let reach = g.closure_unchecked([c[0]]);
            components.iter().map(|d| reach.contains(&d[0])).collect()
        })
        .collect();

    ComponentPoset {
        components,
        order,
        acyclic,
        component_of,
    }
}

/// Tarjan's algorithm on `X` with an explicit call stack.
fn strong_components(g: &MultiDigraph) -> Vec<Vec<usize>> {
    const UNSET: usize = usize::MAX;
    let n = g.vertex_count();
    let sink = g.sink();
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut frames: Vec<(usize, usize)> = Vec::new();
    let mut next = 0usize;
    let mut out = Vec::new();

    for &root in g.non_sink_vertices() {
        if index[root] != UNSET {
            continue;
        }
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        frames.push((root, 0));

        while let Some(frame) = frames.last_mut() {
            let v = frame.0;
            let edges = g.out_edges(v);
            if frame.1 < edges.len() {
                let w = edges[frame.1].0;
                frame.1 += 1;
                if w == sink {
                    continue;
                }
                if index[w] == UNSET {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(parent, _)) = frames.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                out.push(comp);
            }
        }
    }
    out
}

impl ComponentPoset {
    pub fn of(g: &MultiDigraph) -> Self {
        cyclic_strong_components(g)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &[usize] {
        &self.components[i]
    }

    pub fn acyclic_vertices(&self) -> &[usize] {
        &self.acyclic
    }

    /// Index of the cyclic component containing `v`, if any.
    pub fn component_of(&self, v: usize) -> Option<usize> {
        self.component_of.get(v).copied().flatten()
    }

    /// `C_i ≤ C_j`: `C_j` is reachable from `C_i`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.order[i][j]
    }

    /// Every vertex lying on some cycle of `X`.
    pub fn cyclic_vertices(&self) -> VertexSet {
        self.components.iter().flatten().copied().collect()
    }

    pub fn vertices_of(&self, filter: &Filter) -> VertexSet {
        filter
            .members()
            .iter()
            .flat_map(|&i| self.components[i].iter().copied())
            .collect()
    }

    /// The components entirely contained in `set`.
    pub fn components_within(&self, set: &VertexSet) -> Filter {
        Filter {
            members: (0..self.len())
                .filter(|&i| self.components[i].iter().all(|v| set.contains(v)))
                .collect(),
        }
    }

    pub fn is_filter(&self, members: &[usize]) -> bool {
        members.iter().all(|&i| {
            i < self.len() && (0..self.len()).all(|j| !self.leq(i, j) || members.contains(&j))
        })
    }

    /// All filters (upward-closed subsets), the empty one included, sorted by
    /// size and then lexicographically.
    pub fn filters(&self) -> Vec<Filter> {
        let k = self.len();
        // up[i]: strict upper bounds of C_i. Deciding components in order of
        // increasing |up| means every upper bound is decided first.
        let up: Vec<Vec<usize>> = (0..k)
            .map(|i| (0..k).filter(|&j| j != i && self.leq(i, j)).collect())
            .collect();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&i| (up[i].len(), i));

        let mut out = Vec::new();
        let mut chosen = vec![false; k];
        fn walk(
            depth: usize,
            order: &[usize],
            up: &[Vec<usize>],
            chosen: &mut [bool],
            out: &mut Vec<Filter>,
        ) {
            if depth == order.len() {
                out.push(Filter {
                    members: (0..chosen.len()).filter(|&i| chosen[i]).collect(),
                });
                return;
            }
            let c = order[depth];
            walk(depth + 1, order, up, chosen, out);
            if up[c].iter().all(|&d| chosen[d]) {
                chosen[c] = true;
                walk(depth + 1, order, up, chosen, out);
                chosen[c] = false;
            }
        }
        walk(0, &order, &up, &mut chosen, &mut out);
        out.sort();
        out
    }
}

/// An upward-closed set of component indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Filter {
    members: Vec<usize>,
}

impl Filter {
    pub fn empty() -> Self {
        Filter {
            members: Vec::new(),
        }
    }

    /// Builds a filter after checking upward closure against `poset`.
    pub fn new(poset: &ComponentPoset, mut members: Vec<usize>) -> Option<Self> {
        members.sort_unstable();
        members.dedup();
        poset.is_filter(&members).then_some(Filter { members })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, component: usize) -> bool {
        self.members.binary_search(&component).is_ok()
    }
}

impl Ord for Filter {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.members.len(), &self.members).cmp(&(other.members.len(), &other.members))
    }
}

impl PartialOrd for Filter {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Vertices from which some cycle of `X` is reachable.
pub fn cycle_reaching_vertices(g: &MultiDigraph, p: &ComponentPoset) -> VertexSet {
    let mut reverse = vec![Vec::new(); g.vertex_count()];
    for e in g.edges() {
        if e.tail != g.sink() && e.head != g.sink() {
            reverse[e.head].push(e.tail);
        }
    }
    let mut seen = vec![false; g.vertex_count()];
    let mut stack: Vec<usize> = p.cyclic_vertices().into_iter().collect();
    for &v in &stack {
        seen[v] = true;
    }
    while let Some(v) = stack.pop() {
        for &u in &reverse[v] {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    (0..g.vertex_count()).filter(|&v| seen[v]).collect()
}

/// `A(e)`: acyclic vertices outside `cl(supp(e))` all of whose reachable
/// cyclic components lie inside `ι(supp(e))`.
pub fn a_set(g: &MultiDigraph, e_support: &VertexSet, p: &ComponentPoset) -> Result<VertexSet> {
    let cl = g.closure(e_support)?;
    let cyclic = p.cyclic_vertices();
    Ok(p.acyclic_vertices()
        .iter()
        .copied()
        .filter(|v| !cl.contains(v))
        .filter(|&v| {
            g.closure_unchecked([v])
                .iter()
                .all(|w| !cyclic.contains(w) || cl.contains(w))
        })
        .collect())
}

/// `S(e)`: the subgraph on `cl(supp(e)) ∪ A(e) ∪ {sink}`. Returns `None`
/// when that is the bare sink, which only happens for `e = 0`.
pub fn s_subgraph(
    g: &MultiDigraph,
    e_support: &VertexSet,
    p: &ComponentPoset,
) -> Result<Option<Subgraph>> {
    let mut vertices = g.closure(e_support)?;
    vertices.extend(a_set(g, e_support, p)?);
    if vertices.is_empty() {
        return Ok(None);
    }
    g.induced_with_sink(&vertices).map(Some)
}
