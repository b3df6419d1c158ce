//! Shared corpus generator and brute-force oracles. Nothing here calls the
//! library's stabilizer, component finder or monoid enumeration.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sandpile::{Config, MultiDigraph};

pub const CORPUS_SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// Any edge allowed.
    Free,
    /// Non-sink edges only go from higher to lower labels.
    Acyclic,
    /// Vertices fall into three blocks by label mod 3; edges stay inside a
    /// block except for occasional ones into a lower block, which tends to
    /// give several cyclic components.
    Blocks,
}

/// Random valid graph with `min_order < ∏ deg⁺ ≤ max_order`.
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    min_order: u128,
    max_order: u128,
    shape: Shape,
) -> MultiDigraph {
    loop {
        let n = rng.gen_range(2..=8);
        let sink = rng.gen_range(0..n);
        let mut edges = Vec::new();
        for v in (0..n).filter(|&v| v != sink) {
            let k = rng.gen_range(1..=3);
            for _ in 0..k {
                let pick = |rng: &mut ChaCha8Rng, pool: Vec<usize>| {
                    if pool.is_empty() || rng.gen_bool(0.3) {
                        sink
                    } else {
                        pool[rng.gen_range(0..pool.len())]
                    }
                };
                let h = match shape {
                    Shape::Free => rng.gen_range(0..n),
                    Shape::Acyclic => pick(rng, (0..v).filter(|&u| u != sink).collect()),
                    Shape::Blocks => {
                        let cross = rng.gen_bool(0.15);
                        let pool = (0..n)
                            .filter(|&u| u != sink)
                            .filter(|&u| if cross { u % 3 < v % 3 } else { u % 3 == v % 3 })
                            .collect();
                        pick(rng, pool)
                    }
                };
                edges.push((v, h, rng.gen_range(1..=2)));
            }
        }
        if let Ok(g) = MultiDigraph::new(n, sink, edges) {
            if (min_order + 1..=max_order).contains(&g.monoid_order()) {
                return g;
            }
        }
    }
}

/// The same graph with some random out-edges added at the sink.
pub fn with_sink_edges(rng: &mut ChaCha8Rng, g: &MultiDigraph) -> MultiDigraph {
    let n = g.vertex_count();
    let mut edges: Vec<(usize, usize, u64)> = g
        .edges()
        .iter()
        .map(|e| (e.tail, e.head, e.multiplicity))
        .collect();
    for _ in 0..rng.gen_range(1..=3) {
        edges.push((g.sink(), rng.gen_range(0..n), rng.gen_range(1..=3)));
    }
    MultiDigraph::new(n, g.sink(), edges).expect("adding sink edges keeps the graph valid")
}

/// 66 graphs with `∏ deg⁺ ≤ 10⁴`, split evenly between the order ranges
/// `1..=100`, `101..=1000` and `1001..=10⁴`, cycling through the shapes
/// free, acyclic, free, blocks.
pub fn corpus() -> Vec<MultiDigraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let ranges = [(0, 100), (100, 1000), (1000, 10_000)];
    (0..66)
        .map(|i| {
            let (lo, hi) = ranges[i % 3];
            let shape = [Shape::Free, Shape::Acyclic, Shape::Free, Shape::Blocks][i % 4];
            random_graph(&mut rng, lo, hi, shape)
        })
        .collect()
}

/// Single-grain stabilizer: repeatedly topples the lowest unstable vertex.
pub fn naive_stabilize(g: &MultiDigraph, c: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let verts = g.non_sink_vertices().to_vec();
    let pos: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut c = c.to_vec();
    let mut topples = vec![0u64; c.len()];
    loop {
        let Some(i) = (0..c.len()).find(|&i| c[i] >= g.out_degree(verts[i])) else {
            return (c, topples);
        };
        c[i] -= g.out_degree(verts[i]);
        topples[i] += 1;
        for e in g.edges().iter().filter(|e| e.tail == verts[i]) {
            if let Some(&j) = pos.get(&e.head) {
                c[j] += e.multiplicity;
            }
        }
    }
}

pub fn naive_oplus(g: &MultiDigraph, a: &[u64], b: &[u64]) -> Vec<u64> {
    let sum: Vec<u64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    naive_stabilize(g, &sum).0
}

/// Every configuration reachable from 0 by adding single grains and
/// stabilizing.
pub fn generated_monoid(g: &MultiDigraph) -> BTreeSet<Vec<u64>> {
    let k = g.non_sink_count();
    let zero = vec![0u64; k];
    let mut seen = BTreeSet::from([zero.clone()]);
    let mut queue = VecDeque::from([zero]);
    while let Some(c) = queue.pop_front() {
        for i in 0..k {
            let mut d = c.clone();
            d[i] += 1;
            let s = naive_stabilize(g, &d).0;
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    seen
}

/// Recurrent elements as `MAX ⊕ M`, which is the minimal ideal.
pub fn recurrent_set(g: &MultiDigraph, m: &BTreeSet<Vec<u64>>) -> BTreeSet<Vec<u64>> {
    let max: Vec<u64> = g
        .non_sink_vertices()
        .iter()
        .map(|&v| g.out_degree(v) - 1)
        .collect();
    m.iter().map(|x| naive_oplus(g, &max, x)).collect()
}

pub fn idempotent_set(g: &MultiDigraph, m: &BTreeSet<Vec<u64>>) -> BTreeSet<Vec<u64>> {
    m.iter()
        .filter(|x| naive_oplus(g, x, x) == **x)
        .cloned()
        .collect()
}

/// `reach[u][v]`: a path of length ≥ 1 from `u` to `v` avoiding the sink.
pub fn reach_matrix(g: &MultiDigraph) -> Vec<Vec<bool>> {
    let n = g.vertex_count();
    let mut r = vec![vec![false; n]; n];
    for e in g.edges() {
        if e.tail != g.sink() && e.head != g.sink() {
            r[e.tail][e.head] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Whether `X` (the graph without its sink) has a directed cycle.
pub fn x_has_cycle(g: &MultiDigraph) -> bool {
    let r = reach_matrix(g);
    (0..g.vertex_count()).any(|v| r[v][v])
}

/// Cyclic strong components by mutual reachability, each sorted, sorted by
/// first vertex.
pub fn brute_components(g: &MultiDigraph) -> Vec<Vec<usize>> {
    let r = reach_matrix(g);
    let mut out: Vec<Vec<usize>> = Vec::new();
    for v in 0..g.vertex_count() {
        if !r[v][v] || out.iter().any(|c| c.contains(&v)) {
            continue;
        }
        out.push(
            (0..g.vertex_count())
                .filter(|&u| u == v || (r[v][u] && r[u][v]))
                .collect(),
        );
    }
    out
}

pub fn grains(c: &Config) -> Vec<u64> {
    c.grains().to_vec()
}
