//! Configurations and the toppling dynamics.
//!
//! A [`Config`] holds one grain count per non-sink vertex, in the order of
//! [`MultiDigraph::non_sink_vertices`]. Stable configurations are the
//! elements of the sandpile monoid; `a ⊕ b` is the stabilization of the
//! pointwise sum.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::components::{cycle_reaching_vertices, ComponentPoset};
use crate::error::{Error, Result};
use crate::graph::{MultiDigraph, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Config(Vec<u64>);

impl Config {
    pub fn new(grains: Vec<u64>) -> Self {
        Config(grains)
    }

    pub fn zero(g: &MultiDigraph) -> Self {
        Config(vec![0; g.non_sink_count()])
    }

    /// One grain on vertex `v` and nothing elsewhere.
    pub fn unit(g: &MultiDigraph, v: usize) -> Result<Self> {
        Config::from_vertices(g, &[(v, 1)])
    }

    /// Builds a configuration from `(vertex, grains)` pairs; unlisted
    /// vertices get zero.
    pub fn from_vertices(g: &MultiDigraph, pairs: &[(usize, u64)]) -> Result<Self> {
        let mut c = Config::zero(g);
        for &(v, k) in pairs {
            let p = g
                .position(v)
                .ok_or_else(|| Error::Precondition(format!("{v} is the sink or out of range")))?;
            c.0[p] = k;
        }
        Ok(c)
    }

    pub fn grains(&self) -> &[u64] {
        &self.0
    }

    pub fn into_grains(self) -> Vec<u64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    /// Grains on vertex `v` (a graph vertex index, not a position).
    pub fn at(&self, g: &MultiDigraph, v: usize) -> u64 {
        g.position(v).map_or(0, |p| self.0[p])
    }

    /// `supp(c)` as graph vertex indices.
    pub fn support(&self, g: &MultiDigraph) -> VertexSet {
        self.0
            .iter()
            .enumerate()
            .filter(|&(_, &k)| k > 0)
            .map(|(p, _)| g.vertex_at(p))
            .collect()
    }

    pub fn is_stable(&self, g: &MultiDigraph) -> bool {
        self.0.len() == g.non_sink_count()
            && self.0.iter().enumerate().all(|(p, &k)| k < g.degree_at(p))
    }

    pub fn checked_add(&self, other: &Config) -> Result<Config> {
        if self.len() != other.len() {
            return Err(Error::ConfigLength {
                expected: self.len(),
                got: other.len(),
            });
        }
        self.0
            .iter()
            .zip(&other.0)
            .enumerate()
            .map(|(p, (a, b))| a.checked_add(*b).ok_or(Error::Overflow { entry: p }))
            .collect::<Result<Vec<_>>>()
            .map(Config)
    }

    /// The unstabilized `k`-fold sum `k·c`.
    pub fn scaled(&self, k: u64) -> Result<Config> {
        self.0
            .iter()
            .enumerate()
            .map(|(p, a)| a.checked_mul(k).ok_or(Error::Overflow { entry: p }))
            .collect::<Result<Vec<_>>>()
            .map(Config)
    }

    /// Pointwise `self − other`; `None` if some entry would go negative.
    pub fn checked_sub(&self, other: &Config) -> Option<Config> {
        if self.len() != other.len() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Config)
    }

    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        parts.join(" ")
    }

    pub fn from_text(text: &str) -> Result<Config> {
        let mut grains = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            for tok in line.split_whitespace() {
                grains.push(tok.parse::<u64>().map_err(|_| Error::Parse {
                    line: i + 1,
                    message: format!("expected a grain count, found {tok:?}"),
                })?);
            }
        }
        Ok(Config(grains))
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Config {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Config::from_text(s)
    }
}

fn check_len(g: &MultiDigraph, c: &Config) -> Result<()> {
    if c.len() != g.non_sink_count() {
        return Err(Error::ConfigLength {
            expected: g.non_sink_count(),
            got: c.len(),
        });
    }
    Ok(())
}

/// Order in which unstable vertices are toppled. The stable result and the
/// per-vertex topple counts do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TopplePolicy {
    /// FIFO queue of unstable vertices; a dequeued vertex topples
    /// `⌊grains / deg⁺⌋` times at once.
    #[default]
    Queue,
    /// Always topple the unstable vertex with the smallest index, once.
    LowestFirst,
    /// Always topple the unstable vertex with the largest index, once.
    HighestFirst,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stabilized {
    pub config: Config,
    /// Topple count per non-sink vertex, in configuration order.
    pub topples: Vec<u64>,
}

pub fn stabilize(g: &MultiDigraph, c: &Config) -> Result<Stabilized> {
    stabilize_with(g, c, TopplePolicy::Queue)
}

pub fn stabilize_with(g: &MultiDigraph, c: &Config, policy: TopplePolicy) -> Result<Stabilized> {
    check_len(g, c)?;
    let mut grains = c.0.clone();
    let mut topples = vec![0u64; grains.len()];
    match policy {
        TopplePolicy::Queue => topple_queue(g, &mut grains, &mut topples)?,
        TopplePolicy::LowestFirst => topple_ordered(g, &mut grains, &mut topples, false)?,
        TopplePolicy::HighestFirst => topple_ordered(g, &mut grains, &mut topples, true)?,
    }
    Ok(Stabilized {
        config: Config(grains),
        topples,
    })
}

/// Topples position `p` `times` times; the caller guarantees it holds enough.
fn fire(
    g: &MultiDigraph,
    grains: &mut [u64],
    topples: &mut [u64],
    p: usize,
    times: u64,
) -> Result<()> {
    let overflow = |q: usize| Error::Overflow { entry: q };
    grains[p] -= times * g.degree_at(p);
    topples[p] = topples[p].checked_add(times).ok_or_else(|| overflow(p))?;
    for &(q, m) in g.targets_at(p) {
        let add = m.checked_mul(times).ok_or_else(|| overflow(q))?;
        grains[q] = grains[q].checked_add(add).ok_or_else(|| overflow(q))?;
    }
    Ok(())
}

fn topple_queue(g: &MultiDigraph, grains: &mut [u64], topples: &mut [u64]) -> Result<()> {
    let mut queued = vec![false; grains.len()];
    let mut queue = VecDeque::new();
    for p in 0..grains.len() {
        if grains[p] >= g.degree_at(p) {
            queued[p] = true;
            queue.push_back(p);
        }
    }
    while let Some(p) = queue.pop_front() {
        queued[p] = false;
        let times = grains[p] / g.degree_at(p);
        if times == 0 {
            continue;
        }
        fire(g, grains, topples, p, times)?;
        for &(q, _) in g.targets_at(p) {
            if !queued[q] && grains[q] >= g.degree_at(q) {
                queued[q] = true;
                queue.push_back(q);
            }
        }
    }
    Ok(())
}

fn topple_ordered(
    g: &MultiDigraph,
    grains: &mut [u64],
    topples: &mut [u64],
    highest: bool,
) -> Result<()> {
    let mut unstable: BTreeSet<usize> = (0..grains.len())
        .filter(|&p| grains[p] >= g.degree_at(p))
        .collect();
    loop {
        let next = if highest {
            unstable.pop_last()
        } else {
            unstable.pop_first()
        };
        let Some(p) = next else { break };
        fire(g, grains, topples, p, 1)?;
        if grains[p] >= g.degree_at(p) {
            unstable.insert(p);
        }
        for &(q, _) in g.targets_at(p) {
            if grains[q] >= g.degree_at(q) {
                unstable.insert(q);
            }
        }
    }
    Ok(())
}

/// Applies a prescribed toppling multiset to `c` without regard to
/// legality: vertex `p` fires `counts[p]` times. Fails if any entry would
/// go negative.
pub fn apply_topples(g: &MultiDigraph, c: &Config, counts: &[u64]) -> Result<Config> {
    check_len(g, c)?;
    if counts.len() != c.len() {
        return Err(Error::ConfigLength {
            expected: c.len(),
            got: counts.len(),
        });
    }
    let mut acc: Vec<i128> = c.0.iter().map(|&k| k as i128).collect();
    for (p, &k) in counts.iter().enumerate() {
        let k = k as i128;
        acc[p] -= k * g.degree_at(p) as i128;
        for &(q, m) in g.targets_at(p) {
            acc[q] += k * m as i128;
        }
    }
    acc.iter()
        .enumerate()
        .map(|(p, &k)| {
            u64::try_from(k).map_err(|_| {
                Error::Precondition(format!(
                    "toppling multiset drives vertex {} to {k} grains",
                    g.vertex_at(p)
                ))
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(Config)
}

/// `a ⊕ b`: pointwise sum, then stabilize.
pub fn oplus(g: &MultiDigraph, a: &Config, b: &Config) -> Result<Config> {
    check_len(g, a)?;
    check_len(g, b)?;
    Ok(stabilize(g, &a.checked_add(b)?)?.config)
}

/// `MAX`: `deg⁺(v) − 1` grains on every non-sink vertex.
pub fn max_config(g: &MultiDigraph) -> Config {
    Config(g.degrees().into_iter().map(|d| d - 1).collect())
}

/// The identity of the sandpile group, `[MAX − (MAX ⊕ MAX)] ⊕ MAX`.
pub fn group_identity(g: &MultiDigraph) -> Result<Config> {
    let max = max_config(g);
    let doubled = oplus(g, &max, &max)?;
    let diff = max
        .checked_sub(&doubled)
        .ok_or_else(|| Error::Invariant("MAX ⊕ MAX exceeds MAX at some vertex".into()))?;
    oplus(g, &diff, &max)
}

/// `a` is recurrent iff `a ⊕ e = a`, where `e` is the group identity.
pub fn is_recurrent(g: &MultiDigraph, a: &Config, e: &Config) -> Result<bool> {
    Ok(&oplus(g, a, e)? == a)
}

/// `e_a`: the unique idempotent among `a, a⊕a, a⊕a⊕a, …`.
pub fn idempotent_of(g: &MultiDigraph, a: &Config) -> Result<Config> {
    check_len(g, a)?;
    let mut b = stabilize(g, a)?.config;
    let a = b.clone();
    loop {
        if oplus(g, &b, &b)? == b {
            return Ok(b);
        }
        b = oplus(g, &b, &a)?;
    }
}

/// Whether `0` is accessible from `a`: no grain of `a` sits on a vertex
/// from which a cycle of `X` can be reached.
pub fn can_access_zero(g: &MultiDigraph, a: &Config, p: &ComponentPoset) -> Result<bool> {
    check_len(g, a)?;
    let reaching = cycle_reaching_vertices(g, p);
    Ok(a.support(g).is_disjoint(&reaching))
}
