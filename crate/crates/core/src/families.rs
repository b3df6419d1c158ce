//! Deterministic graph constructors. Every generator puts the sink at
//! vertex 0 and numbers the remaining vertices from 1.

use crate::error::{Error, Result};
use crate::graph::MultiDigraph;

const EXAMPLE: &str = include_str!("../fixtures/example.graph");
const TWO_LAYER: &str = include_str!("../fixtures/two_layer.graph");

fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(what.into()))
    }
}

/// One vertex per `k` with `k` parallel edges to the sink, so the monoid is
/// the group `Z_{k_1} × Z_{k_2} × …`.
pub fn star_of_cyclic(ks: &[u64]) -> Result<MultiDigraph> {
    require(!ks.is_empty(), "need at least one cyclic factor")?;
    require(ks.iter().all(|&k| k >= 1), "each k must be at least 1")?;
    MultiDigraph::new(
        ks.len() + 1,
        0,
        ks.iter().enumerate().map(|(i, &k)| (i + 1, 0, k)),
    )
}

/// Undirected cycle `C_n` on `0..n` with vertex 0 as the sink.
pub fn cycle(n: usize) -> Result<MultiDigraph> {
    require(n >= 3, "a cycle needs n ≥ 3")?;
    MultiDigraph::new(
        n,
        0,
        (0..n).flat_map(|i| {
            let j = (i + 1) % n;
            [(i, j, 1), (j, i, 1)]
        }),
    )
}

/// The prism `C_n × P_d` as paired directed edges, with every vertex of the
/// innermost cycle sending one edge to a central sink. Ring `i` (1 is
/// innermost) holds vertices `1 + (i−1)n .. i·n`. For `n = 2` the two cycle
/// edges between the pair are parallel.
pub fn iterated_wheel(n: usize, d: usize) -> Result<MultiDigraph> {
    require(n >= 2, "a wheel needs n ≥ 2")?;
    require(d >= 1, "a wheel needs d ≥ 1")?;
    let v = |i: usize, j: usize| 1 + (i - 1) * n + j % n;
    let mut edges = Vec::new();
    for i in 1..=d {
        for j in 0..n {
            edges.push((v(i, j), v(i, j + 1), 1));
            edges.push((v(i, j + 1), v(i, j), 1));
            if i < d {
                edges.push((v(i, j), v(i + 1, j), 1));
                edges.push((v(i + 1, j), v(i, j), 1));
            }
        }
    }
    for j in 0..n {
        edges.push((v(1, j), 0, 1));
    }
    MultiDigraph::new(1 + n * d, 0, edges)
}

/// The `n`-regular tree with `d` levels of vertices, as paired directed
/// edges, numbered breadth first from the root at vertex 1. Each leaf sends
/// `n − 1` edges to the sink.
pub fn regular_tree(n: usize, d: usize) -> Result<MultiDigraph> {
    require(n >= 3, "a regular tree needs n ≥ 3")?;
    require(d >= 2, "a regular tree needs d ≥ 2")?;
    let mut edges = Vec::new();
    let mut level = vec![1usize];
    let mut next_id = 2;
    for depth in 1..d {
        let mut children = Vec::new();
        for &parent in &level {
            let fanout = if depth == 1 { n } else { n - 1 };
            for _ in 0..fanout {
                edges.push((parent, next_id, 1));
                edges.push((next_id, parent, 1));
                children.push(next_id);
                next_id += 1;
            }
        }
        level = children;
    }
    for &leaf in &level {
        edges.push((leaf, 0, (n - 1) as u64));
    }
    MultiDigraph::new(next_id, 0, edges)
}

/// The rotational tournament on `2k + 1` vertices, where the `i`th vertex
/// beats the next `k` modulo `2k + 1`, plus `r` edges from every vertex to
/// the sink. `seed` is accepted for other regular tournaments but the
/// rotational one ignores it.
pub fn regular_tournament(k: usize, r: u64, _seed: u64) -> Result<MultiDigraph> {
    require(k >= 1, "a tournament needs k ≥ 1")?;
    require(r >= 1, "need r ≥ 1 edges to the sink")?;
    let m = 2 * k + 1;
    let mut edges = Vec::new();
    for i in 0..m {
        edges.push((i + 1, 0, r));
        for s in 1..=k {
            edges.push((i + 1, (i + s) % m + 1, 1));
        }
    }
    MultiDigraph::new(m + 1, 0, edges)
}

/// The fourteen-vertex example with cyclic components `B = {4, 5, 6}`,
/// `C = {7, 8, 9, 10}` and `D = {13}`; see the fixture for vertex names.
pub fn example_graph() -> MultiDigraph {
    MultiDigraph::from_text(EXAMPLE).expect("example fixture is valid")
}

/// A small sink-distance-regular graph with `Γ_1 = {1, 2}` and
/// `Γ_2 = {3, 4, 5, 6}`.
pub fn two_layer_graph() -> MultiDigraph {
    MultiDigraph::from_text(TWO_LAYER).expect("two-layer fixture is valid")
}
