//! Sink-distance-regular graphs: layers by distance to the sink, the
//! layer parameters `a_i, b_i, c_i`, and the closed-form group identity.
//!
//! Layer `i` is `Γ_i`, the vertices at directed distance `i` from the sink.
//! A graph is sink-distance-regular when the sink has no out-edges, every
//! edge moves at most one layer, and inside each layer every vertex is the
//! tail of, and the head of, the same number of edges to and from each
//! neighbouring layer.

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use crate::engine::Config;
use crate::error::{Error, Result};
use crate::graph::MultiDigraph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SdrProfile {
    d: usize,
    /// `Γ_1..Γ_d`, each sorted.
    gamma: Vec<Vec<usize>>,
    a: Vec<u64>,
    /// `b_1..b_{d−1}`.
    b: Vec<u64>,
    c: Vec<u64>,
    /// `n_1..n_{d+1}`, with `n_{d+1} = 0`.
    n: Vec<u64>,
}

impl SdrProfile {
    pub fn d(&self) -> usize {
        self.d
    }

    /// `Γ_i` for `1 ≤ i ≤ d`.
    pub fn layer(&self, i: usize) -> &[usize] {
        &self.gamma[i - 1]
    }

    pub fn layers(&self) -> &[Vec<usize>] {
        &self.gamma
    }

    pub fn a(&self, i: usize) -> u64 {
        self.a[i - 1]
    }

    /// `b_i`, which is 0 for `i = d`.
    pub fn b(&self, i: usize) -> u64 {
        if i == self.d {
            0
        } else {
            self.b[i - 1]
        }
    }

    pub fn c(&self, i: usize) -> u64 {
        self.c[i - 1]
    }

    /// `n_i` for `1 ≤ i ≤ d + 1`.
    pub fn n(&self, i: usize) -> u64 {
        self.n[i - 1]
    }

    pub fn degree(&self, i: usize) -> u64 {
        self.a(i) + self.b(i) + self.c(i)
    }

    /// Grains on each vertex of `Γ_i` in the identity: `n_i c_i − n_{i+1} b_i`.
    pub fn coefficient(&self, i: usize) -> u64 {
        self.n(i) * self.c(i) - self.n(i + 1) * self.b(i)
    }

    /// `d`, then one `i a_i b_i c_i n_i` row per layer.
    pub fn to_text(&self) -> String {
        let mut s = format!("d {}\n", self.d);
        for i in 1..=self.d {
            s.push_str(&format!(
                "{i} {} {} {} {}\n",
                self.a(i),
                self.b(i),
                self.c(i),
                self.n(i)
            ));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SdrCondition {
    SinkHasOutEdges,
    /// An edge from `Γ_i` lands outside `Γ_{i−1} ∪ Γ_i ∪ Γ_{i+1}`.
    EdgeSkipsLayer,
    /// Tail count to the sink, for `Γ_1`.
    TailToSink,
    TailToPrevious,
    HeadFromPrevious,
    TailWithin,
    HeadWithin,
    TailToNext,
    HeadFromNext,
    /// `b_i = 0` for some `i < d`.
    ZeroForward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SdrViolation {
    pub vertex: usize,
    pub layer: usize,
    pub condition: SdrCondition,
    pub expected: u64,
    pub found: u64,
}

impl fmt::Display for SdrViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.condition {
            SdrCondition::SinkHasOutEdges => write!(f, "sink {} has out-edges", self.vertex),
            SdrCondition::EdgeSkipsLayer => write!(
                f,
                "vertex {} in layer {} has an edge to layer {}",
                self.vertex, self.layer, self.found
            ),
            cond => write!(
                f,
                "vertex {} in layer {}: {:?} is {}, layer expects {}",
                self.vertex, self.layer, cond, self.found, self.expected
            ),
        }
    }
}

/// `Γ_0..Γ_d`, found by breadth-first search from the sink along reversed
/// edges.
pub fn distance_partition(g: &MultiDigraph) -> Result<Vec<Vec<usize>>> {
    if g.sink_out_degree() > 0 {
        return Err(Error::Precondition(
            "distance layers need a sink with no out-edges".into(),
        ));
    }
    Ok(layers_of(&distances(g)))
}

fn distances(g: &MultiDigraph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut reverse = vec![Vec::new(); n];
    for e in g.edges() {
        reverse[e.head].push(e.tail);
    }
    let mut dist = vec![usize::MAX; n];
    dist[g.sink()] = 0;
    let mut queue = VecDeque::from([g.sink()]);
    while let Some(v) = queue.pop_front() {
        for &u in &reverse[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

fn layers_of(dist: &[usize]) -> Vec<Vec<usize>> {
    let d = dist.iter().copied().max().unwrap_or(0);
    let mut layers = vec![Vec::new(); d + 1];
    for (v, &k) in dist.iter().enumerate() {
        layers[k].push(v);
    }
    layers
}

/// Edge counts of one vertex, split by layer offset: `[previous, same, next]`.
#[derive(Default, Clone, Copy)]
struct Counts {
    tail: [u64; 3],
    head: [u64; 3],
}

/// A condition, the value the layer expects, and how to read it off a vertex.
type Check = (SdrCondition, u64, fn(&Counts) -> u64);

/// Returns the profile, or the first violation found. Layers are checked
/// in order, and each vertex against the smallest vertex of its layer.
pub fn check_sdr(g: &MultiDigraph) -> std::result::Result<SdrProfile, SdrViolation> {
    let sink = g.sink();
    if g.sink_out_degree() > 0 {
        return Err(SdrViolation {
            vertex: sink,
            layer: 0,
            condition: SdrCondition::SinkHasOutEdges,
            expected: 0,
            found: g.sink_out_degree(),
        });
    }
    let dist = distances(g);
    let layers = layers_of(&dist);
    let d = layers.len() - 1;

    let mut counts = vec![Counts::default(); g.vertex_count()];
    for e in g.edges() {
        let (dt, dh) = (dist[e.tail], dist[e.head]);
        if dh + 1 < dt || dh > dt + 1 {
            return Err(SdrViolation {
                vertex: e.tail,
                layer: dt,
                condition: SdrCondition::EdgeSkipsLayer,
                expected: dt as u64,
                found: dh as u64,
            });
        }
        // offset of the head relative to the tail: 0 previous, 1 same, 2 next
        let off = dh + 1 - dt;
        counts[e.tail].tail[off] += e.multiplicity;
        counts[e.head].head[2 - off] += e.multiplicity;
    }

    let mut a = Vec::with_capacity(d);
    let mut b = Vec::with_capacity(d);
    let mut c = Vec::with_capacity(d);
    for (i, layer) in layers.iter().enumerate().skip(1) {
        let first = counts[layer[0]];
        let (ci, ai, bi) = (first.tail[0], first.tail[1], first.tail[2]);
        let mut checks: Vec<Check> = vec![
            (SdrCondition::TailToPrevious, ci, |k: &Counts| k.tail[0]),
            (SdrCondition::TailWithin, ai, |k: &Counts| k.tail[1]),
            (SdrCondition::HeadWithin, ai, |k: &Counts| k.head[1]),
            (SdrCondition::TailToNext, bi, |k: &Counts| k.tail[2]),
            (SdrCondition::HeadFromNext, bi, |k: &Counts| k.head[2]),
        ];
        if i == 1 {
            checks[0].0 = SdrCondition::TailToSink;
        } else {
            checks.insert(
                1,
                (SdrCondition::HeadFromPrevious, ci, |k: &Counts| k.head[0]),
            );
        }
        for &v in layer {
            for (condition, expected, get) in &checks {
                let found = get(&counts[v]);
                if found != *expected {
                    return Err(SdrViolation {
                        vertex: v,
                        layer: i,
                        condition: *condition,
                        expected: *expected,
                        found,
                    });
                }
            }
        }
        if i < d && bi == 0 {
            return Err(SdrViolation {
                vertex: layer[0],
                layer: i,
                condition: SdrCondition::ZeroForward,
                expected: 1,
                found: 0,
            });
        }
        a.push(ai);
        c.push(ci);
        if i < d {
            b.push(bi);
        }
    }

    let mut profile = SdrProfile {
        d,
        gamma: layers[1..].to_vec(),
        a,
        b,
        c,
        n: vec![0; d + 1],
    };
    for i in (1..=d).rev() {
        let top = profile.degree(i) - 1 + profile.n(i + 1) * profile.b(i);
        profile.n[i - 1] = top / profile.c(i);
    }
    Ok(profile)
}

/// The identity, with `n_i c_i − n_{i+1} b_i` grains on each vertex of `Γ_i`.
pub fn sdr_identity(profile: &SdrProfile, g: &MultiDigraph) -> Config {
    let mut grains = vec![0; g.non_sink_count()];
    for i in 1..=profile.d {
        let k = profile.coefficient(i);
        for &v in profile.layer(i) {
            grains[g.position(v).expect("layer vertices are not the sink")] = k;
        }
    }
    Config::new(grains)
}

/// Applies `U_i = T_d ∘ … ∘ T_i` by toppling every vertex of `Γ_i`, then of
/// `Γ_{i+1}`, and so on, each once. Every topple is checked for legality and
/// the result is compared with the closed form before it is returned.
pub fn wave_topple(g: &MultiDigraph, profile: &SdrProfile, x: &Config, i: usize) -> Result<Config> {
    let d = profile.d;
    if i == 0 || i > d {
        return Err(Error::Precondition(format!("layer {i} is not in 1..={d}")));
    }
    if x.len() != g.non_sink_count() {
        return Err(Error::ConfigLength {
            expected: g.non_sink_count(),
            got: x.len(),
        });
    }
    for j in i..=d {
        let need = if j == i {
            profile.degree(j)
        } else {
            profile.degree(j) - profile.c(j)
        };
        if let Some(&v) = profile.layer(j).iter().find(|&&v| x.at(g, v) < need) {
            return Err(Error::Precondition(format!(
                "vertex {v} in layer {j} holds {} grains, needs at least {need}",
                x.at(g, v)
            )));
        }
    }

    let mut grains = x.grains().to_vec();
    for j in i..=d {
        for &v in profile.layer(j) {
            let p = g.position(v).expect("layer vertices are not the sink");
            let deg = g.degree_at(p);
            grains[p] = grains[p].checked_sub(deg).ok_or_else(|| {
                Error::Invariant(format!("toppling {v} in layer {j} is not legal"))
            })?;
            for &(q, m) in g.targets_at(p) {
                grains[q] = grains[q]
                    .checked_add(m)
                    .ok_or(Error::Overflow { entry: q })?;
            }
        }
    }

    let mut expected: Vec<i128> = x.grains().iter().map(|&k| k as i128).collect();
    for &v in profile.layer(i) {
        expected[g.position(v).expect("non-sink")] -= profile.c(i) as i128;
    }
    if i > 1 {
        for &v in profile.layer(i - 1) {
            expected[g.position(v).expect("non-sink")] += profile.b(i - 1) as i128;
        }
    }
    if grains.iter().zip(&expected).any(|(&k, &e)| k as i128 != e) {
        return Err(Error::Invariant(format!(
            "wave from layer {i} disagrees with its closed form"
        )));
    }
    Ok(Config::new(grains))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{group_identity, max_config};

    fn two_layer() -> MultiDigraph {
        let mut edges = vec![(1, 0, 2), (2, 0, 2), (1, 1, 1), (2, 2, 1)];
        for (t, h) in [
            (1, 5),
            (2, 4),
            (3, 4),
            (4, 5),
            (5, 6),
            (6, 3),
            (4, 1),
            (5, 2),
        ] {
            edges.push((t, h, 1));
        }
        for (t, h) in [(1, 3), (2, 6)] {
            edges.push((t, h, 1));
            edges.push((h, t, 1));
        }
        MultiDigraph::new(7, 0, edges).unwrap()
    }

    #[test]
    fn two_layer_layers_and_parameters() {
        let g = two_layer();
        assert_eq!(
            distance_partition(&g).unwrap(),
            vec![vec![0], vec![1, 2], vec![3, 4, 5, 6]]
        );
        let p = check_sdr(&g).unwrap();
        assert_eq!(p.d(), 2);
        assert_eq!((p.c(1), p.a(1), p.b(1), p.c(2), p.a(2)), (2, 1, 2, 1, 1));
        assert_eq!((p.n(1), p.n(2), p.n(3)), (3, 1, 0));
        assert_eq!(sdr_identity(&p, &g), max_config(&g));
        assert_eq!(sdr_identity(&p, &g), group_identity(&g).unwrap());
        assert_eq!(p.to_text(), "d 2\n1 1 2 2 3\n2 1 0 1 1\n");
    }

    #[test]
    fn star_has_one_layer() {
        let g = MultiDigraph::new(4, 0, [(1, 0, 1), (2, 0, 1), (3, 0, 1)]).unwrap();
        assert_eq!(
            distance_partition(&g).unwrap(),
            vec![vec![0], vec![1, 2, 3]]
        );
    }

    #[test]
    fn sink_out_edges_are_rejected() {
        let g = MultiDigraph::new(3, 0, [(1, 0, 1), (0, 2, 1), (2, 0, 1)]).unwrap();
        assert!(distance_partition(&g).is_err());
        assert_eq!(
            check_sdr(&g).unwrap_err().condition,
            SdrCondition::SinkHasOutEdges
        );
        assert!(check_sdr(&g.sink_strip()).is_ok());
    }

    #[test]
    fn head_counts_are_checked_separately() {
        // every vertex is the tail of one edge inside the layer, but
        // vertex 1 is the head of two
        let g = MultiDigraph::new(
            4,
            0,
            [
                (1, 0, 1),
                (2, 0, 1),
                (3, 0, 1),
                (1, 2, 1),
                (2, 1, 1),
                (3, 1, 1),
            ],
        )
        .unwrap();
        let v = check_sdr(&g).unwrap_err();
        assert_eq!(v.condition, SdrCondition::HeadWithin);
        // a 3-cycle within the layer satisfies both
        let g = MultiDigraph::new(
            4,
            0,
            [
                (1, 0, 1),
                (2, 0, 1),
                (3, 0, 1),
                (1, 2, 1),
                (2, 3, 1),
                (3, 1, 1),
            ],
        )
        .unwrap();
        assert!(check_sdr(&g).is_ok());
    }

    #[test]
    fn skipping_a_layer_is_caught() {
        // path 3 → 2 → 1 → sink, plus 1 → 3
        let g = MultiDigraph::new(4, 0, [(1, 0, 1), (2, 1, 1), (3, 2, 1), (1, 3, 1)]).unwrap();
        let v = check_sdr(&g).unwrap_err();
        assert_eq!(v.condition, SdrCondition::EdgeSkipsLayer);
        assert_eq!(v.vertex, 1);
    }

    #[test]
    fn single_layer_wave() {
        let g = two_layer();
        let p = check_sdr(&g).unwrap();
        let x = Config::new(vec![5, 5, 1, 1, 1, 1]);
        let y = wave_topple(&g, &p, &x, 1).unwrap();
        assert_eq!(y.grains(), &[3, 3, 1, 1, 1, 1]);
        assert!(wave_topple(&g, &p, &x, 2).is_err());
        assert!(wave_topple(&g, &p, &x, 3).is_err());
        let y = wave_topple(&g, &p, &Config::new(vec![0, 0, 2, 2, 2, 2]), 2).unwrap();
        assert_eq!(y.grains(), &[2, 2, 1, 1, 1, 1]);
    }
}
