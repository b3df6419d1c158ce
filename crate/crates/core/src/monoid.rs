//! Exhaustive monoid enumeration, idempotents and maximal subgroups.
//!
//! Stable configurations are indexed by a mixed-radix counter whose digits
//! are the grain counts, vertex 0 most significant, so index order is
//! lexicographic order on configurations and index 0 is the empty
//! configuration.
//!
//! Configurations on subgraphs are compared with configurations on the
//! parent graph through zero-extension ([`Subgraph::embed`]).

use std::collections::BTreeSet;

use serde::Serialize;

use crate::checker::MonoidTable;
use crate::components::{a_set, cyclic_strong_components, s_subgraph, ComponentPoset, Filter};
use crate::engine::{group_identity, idempotent_of, is_recurrent, oplus, stabilize, Config};
use crate::error::{Error, Result};
use crate::graph::{MultiDigraph, Subgraph, VertexSet};

/// Size limits for exhaustive work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest monoid that may be enumerated.
    pub elements: u64,
    /// Largest monoid for which a full Cayley table is built.
    pub table: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            elements: 1_000_000,
            table: 1_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MonoidEnumeration {
    radices: Vec<u64>,
    len: usize,
    identity: Config,
    recurrent: Vec<bool>,
    table: Option<Vec<u32>>,
}

fn check_cap(product: u128, cap: u64) -> Result<usize> {
    if product > cap as u128 {
        return Err(Error::CapExceeded { product, cap });
    }
    Ok(product as usize)
}

/// Enumerates every stable configuration of `g`, marks the recurrent ones
/// and, when `|M| ≤ caps.table`, fills the Cayley table.
pub fn enumerate_monoid(g: &MultiDigraph, caps: &Caps) -> Result<MonoidEnumeration> {
    let len = check_cap(g.monoid_order(), caps.elements)?;
    let radices = g.degrees();
    let identity = group_identity(g)?;
    let mut m = MonoidEnumeration {
        radices,
        len,
        identity,
        recurrent: Vec::with_capacity(len),
        table: None,
    };
    for i in 0..len {
        let a = m.element(i);
        m.recurrent.push(is_recurrent(g, &a, &m.identity)?);
    }
    if (len as u64) <= caps.table && len <= u32::MAX as usize {
        let mut table = vec![0u32; len * len];
        for i in 0..len {
            let a = m.element(i);
            for j in i..len {
                let k = m
                    .index_of(&oplus(g, &a, &m.element(j))?)
                    .ok_or_else(|| Error::Invariant("⊕ produced an unstable result".into()))?;
                table[i * len + j] = k as u32;
                table[j * len + i] = k as u32;
            }
        }
        m.table = Some(table);
    }
    Ok(m)
}

impl MonoidEnumeration {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The `i`-th stable configuration in lexicographic order.
    pub fn element(&self, mut i: usize) -> Config {
        let mut grains = vec![0u64; self.radices.len()];
        for (slot, &r) in grains.iter_mut().zip(&self.radices).rev() {
            *slot = (i as u64) % r;
            i = (i as u64 / r) as usize;
        }
        Config::new(grains)
    }

    pub fn index_of(&self, c: &Config) -> Option<usize> {
        if c.len() != self.radices.len() {
            return None;
        }
        let mut i: usize = 0;
        for (&k, &r) in c.grains().iter().zip(&self.radices) {
            if k >= r {
                return None;
            }
            i = i * r as usize + k as usize;
        }
        Some(i)
    }

    pub fn elements(&self) -> impl Iterator<Item = Config> + '_ {
        (0..self.len).map(|i| self.element(i))
    }

    pub fn group_identity(&self) -> &Config {
        &self.identity
    }

    pub fn recurrent_mask(&self) -> &[bool] {
        &self.recurrent
    }

    pub fn is_recurrent(&self, i: usize) -> bool {
        self.recurrent[i]
    }

    pub fn recurrent_indices(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.recurrent[i]).collect()
    }

    pub fn recurrent_count(&self) -> usize {
        self.recurrent.iter().filter(|&&r| r).count()
    }

    pub fn has_table(&self) -> bool {
        self.table.is_some()
    }

    /// `i ⊕ j` by table lookup, if the table was built.
    pub fn op(&self, i: usize, j: usize) -> Option<usize> {
        self.table.as_ref().map(|t| t[i * self.len + j] as usize)
    }

    fn require_table(&self) -> Result<&[u32]> {
        self.table.as_deref().ok_or_else(|| {
            Error::Precondition(format!(
                "no Cayley table for a monoid of {} elements",
                self.len
            ))
        })
    }

    /// Indices `i` with `i ⊕ i = i`, read from the table.
    pub fn idempotent_indices(&self) -> Result<Vec<usize>> {
        let t = self.require_table()?;
        Ok((0..self.len)
            .filter(|&i| t[i * self.len + i] as usize == i)
            .collect())
    }

    /// `G_e` straight from its definition: the elements mutually accessible
    /// with the idempotent `e`. Needs the table.
    pub fn subgroup_by_mutual_access(&self, e: usize) -> Result<Vec<usize>> {
        let t = self.require_table()?;
        let n = self.len;
        let from_e: BTreeSet<usize> = (0..n).map(|m| t[e * n + m] as usize).collect();
        Ok(from_e
            .into_iter()
            .filter(|&a| (0..n).any(|k| t[a * n + k] as usize == e))
            .collect())
    }

    /// The Cayley table as an abstract monoid with identity 0.
    pub fn to_table(&self) -> Result<MonoidTable> {
        let t = self.require_table()?;
        let n = self.len;
        MonoidTable::new(
            n,
            0,
            (0..n)
                .map(|i| t[i * n..(i + 1) * n].iter().map(|&k| k as usize).collect())
                .collect(),
        )
    }

    /// Invariant factors `d₁ | d₂ | …` of the recurrent group, ascending;
    /// empty for the trivial group. Derived from counting, for every prime
    /// power `pᵏ`, the elements whose `pᵏ`-fold sum is the identity.
    pub fn invariant_factors(&self, g: &MultiDigraph) -> Result<Vec<u64>> {
        let group: Vec<Config> = self
            .recurrent_indices()
            .into_iter()
            .map(|i| self.element(i))
            .collect();
        let order = group.len() as u64;
        // elementary divisors grouped by prime, exponents descending
        let mut by_prime: Vec<(u64, Vec<u32>)> = Vec::new();
        for (p, a) in factorize(order) {
            let mut powers: Vec<Config> = group.clone();
            let mut log_counts = vec![0u32];
            for _ in 1..=a {
                let mut hits = 0u64;
                for h in powers.iter_mut() {
                    *h = stabilize(g, &h.scaled(p)?)?.config;
                    if *h == self.identity {
                        hits += 1;
                    }
                }
                let s = exact_log(hits, p).ok_or_else(|| {
                    Error::Invariant(format!("{hits} elements of order dividing a power of {p}"))
                })?;
                log_counts.push(s);
                if s == a {
                    break;
                }
            }
            // r_k = number of cyclic factors of order ≥ p^k
            let r: Vec<u32> = log_counts.windows(2).map(|w| w[1] - w[0]).collect();
            let mut exps = Vec::new();
            for k in 0..r.len() {
                let next = r.get(k + 1).copied().unwrap_or(0);
                for _ in 0..(r[k] - next) {
                    exps.push(k as u32 + 1);
                }
            }
            exps.sort_unstable_by(|a, b| b.cmp(a));
            by_prime.push((p, exps));
        }
        let width = by_prime.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
        let mut factors: Vec<u64> = (0..width)
            .map(|i| {
                by_prime
                    .iter()
                    .filter_map(|(p, e)| e.get(i).map(|&k| p.pow(k)))
                    .product()
            })
            .collect();
        factors.reverse();
        Ok(factors)
    }
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut a = 0;
        while n.is_multiple_of(p) {
            n /= p;
            a += 1;
        }
        if a > 0 {
            out.push((p, a));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn exact_log(mut n: u64, p: u64) -> Option<u32> {
    let mut k = 0;
    while n > 1 {
        if !n.is_multiple_of(p) {
            return None;
        }
        n /= p;
        k += 1;
    }
    (n == 1).then_some(k)
}

/// Counts the recurrent configurations of `g` by enumeration.
pub fn group_order(g: &MultiDigraph, cap: u64) -> Result<u64> {
    let m = enumerate_monoid(
        g,
        &Caps {
            elements: cap,
            table: 0,
        },
    )?;
    Ok(m.recurrent_count() as u64)
}

/// An idempotent together with the combinatorial data attached to it.
#[derive(Debug, Clone, Serialize)]
pub struct IdempotentRecord {
    pub config: Config,
    pub filter: Filter,
    /// `supp(e)`.
    pub support: VertexSet,
    /// `cl(supp(e))`, the non-sink vertices of `ι(supp(e))`.
    pub iota_support: VertexSet,
    /// `A(e)`.
    pub a_set: VertexSet,
    /// Non-sink vertices of `S(e)`, i.e. `cl(supp(e)) ∪ A(e)`.
    pub s_vertices: VertexSet,
    #[serde(skip)]
    pub s_graph: Option<Subgraph>,
    /// `|G_e|`; `None` when `S(e)` is too large to enumerate.
    pub max_subgroup_order: Option<u64>,
}

/// One idempotent per filter on the cyclic strong components, built as the
/// group identity of `ι(⋃ q)` and zero-extended. Sorted by filter.
pub fn idempotents(g: &MultiDigraph, caps: &Caps) -> Result<Vec<IdempotentRecord>> {
    let p = cyclic_strong_components(g);
    p.filters()
        .into_iter()
        .map(|q| idempotent_record(g, &p, q, caps))
        .collect()
}

fn idempotent_record(
    g: &MultiDigraph,
    p: &ComponentPoset,
    filter: Filter,
    caps: &Caps,
) -> Result<IdempotentRecord> {
    let config = if filter.is_empty() {
        Config::zero(g)
    } else {
        let y = g.iota_subgraph(&p.vertices_of(&filter))?;
        y.embed(g, &group_identity(&y.graph)?)
    };
    let support = config.support(g);
    let iota_support = g.closure(&support)?;
    if p.components_within(&iota_support) != filter {
        return Err(Error::Invariant(format!(
            "idempotent built from filter {:?} covers components {:?}",
            filter.members(),
            p.components_within(&iota_support).members()
        )));
    }
    let a = a_set(g, &support, p)?;
    let s_graph = s_subgraph(g, &support, p)?;
    let s_vertices = iota_support.union(&a).copied().collect();
    let max_subgroup_order = match &s_graph {
        None => Some(1),
        Some(s) if s.graph.monoid_order() <= caps.elements as u128 => {
            Some(group_order(&s.graph, caps.elements)?)
        }
        Some(_) => None,
    };
    Ok(IdempotentRecord {
        config,
        filter,
        support,
        iota_support,
        a_set: a,
        s_vertices,
        s_graph,
        max_subgroup_order,
    })
}

/// `G_e` as the recurrent elements of the sandpile monoid on `S(e)`
/// (for `e = 0`, the whole monoid on `S(0)`, or `{0}` if `S(0)` is the bare
/// sink), zero-extended to `g` and sorted.
pub fn maximal_subgroup(
    g: &MultiDigraph,
    rec: &IdempotentRecord,
    caps: &Caps,
) -> Result<Vec<Config>> {
    let Some(s) = &rec.s_graph else {
        return Ok(vec![Config::zero(g)]);
    };
    let m = enumerate_monoid(&s.graph, &Caps { table: 0, ..*caps })?;
    let zero_case = rec.config.is_zero();
    let mut out: Vec<Config> = (0..m.len())
        .filter(|&i| zero_case || m.is_recurrent(i))
        .map(|i| s.embed(g, &m.element(i)))
        .collect();
    out.sort();
    Ok(out)
}

/// `G_e` rebuilt as `{ r ⊕ j }` with `r` recurrent on `ι(supp(e))` and `j`
/// any stable filling of `A(e)`. Requires `e ≠ 0`.
pub fn alternate_subgroup_build(
    g: &MultiDigraph,
    rec: &IdempotentRecord,
    caps: &Caps,
) -> Result<Vec<Config>> {
    if rec.config.is_zero() {
        return Err(Error::Precondition(
            "the g ⊕ j construction needs a nonzero idempotent".into(),
        ));
    }
    let y = g.iota_subgraph(&rec.support)?;
    let ym = enumerate_monoid(&y.graph, &Caps { table: 0, ..*caps })?;
    let recurrent: Vec<Config> = ym
        .recurrent_indices()
        .into_iter()
        .map(|i| y.embed(g, &ym.element(i)))
        .collect();

    let a: Vec<usize> = rec.a_set.iter().copied().collect();
    let radices: Vec<u64> = a.iter().map(|&v| g.out_degree(v)).collect();
    let fillings = radices.iter().map(|&r| r as u128).product::<u128>();
    check_cap(
        fillings.saturating_mul(recurrent.len() as u128),
        caps.elements,
    )?;

    let mut out = BTreeSet::new();
    let mut digits = vec![0u64; a.len()];
    loop {
        let pairs: Vec<(usize, u64)> = a.iter().copied().zip(digits.iter().copied()).collect();
        let j = Config::from_vertices(g, &pairs)?;
        for r in &recurrent {
            out.insert(oplus(g, r, &j)?);
        }
        // advance the mixed-radix counter
        let mut k = digits.len();
        loop {
            if k == 0 {
                return Ok(out.into_iter().collect());
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < radices[k] {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// Number of idempotents of a classical sandpile monoid (undirected graph,
/// `X` connected): one when `X` is a single loopless vertex, two otherwise.
pub fn classical_idempotent_count(g: &MultiDigraph) -> Result<usize> {
    if !g.is_undirected() || !g.non_sink_connected() {
        return Err(Error::Precondition(
            "graph must be undirected with X connected".into(),
        ));
    }
    let single = g.non_sink_count() == 1 && !g.has_loop(g.vertex_at(0));
    Ok(if single { 1 } else { 2 })
}

/// For a monoid with exactly two idempotents, checks over every `u` that
/// `u ⊕ a = u` for some `a ≠ 0` exactly when `u` is recurrent.
pub fn two_idempotent_recurrence_check(g: &MultiDigraph, caps: &Caps) -> Result<bool> {
    let count = cyclic_strong_components(g).filters().len();
    if count != 2 {
        return Err(Error::Precondition(format!(
            "monoid has {count} idempotents, not 2"
        )));
    }
    let m = enumerate_monoid(g, caps)?;
    m.require_table()?;
    let n = m.len();
    Ok((0..n).all(|u| {
        let absorbs = (1..n).any(|a| m.op(u, a) == Some(u));
        absorbs == m.is_recurrent(u)
    }))
}

/// Whether `ι(supp(a))` contains every cycle of `X`, which decides whether
/// repeatedly adding `a` to itself reaches a recurrent configuration. The
/// answer is cross-checked against the dynamics before it is returned.
pub fn eventually_recurrent_check(
    g: &MultiDigraph,
    a: &Config,
    p: &ComponentPoset,
) -> Result<bool> {
    let cl = g.closure(&a.support(g))?;
    let predicted = p.cyclic_vertices().is_subset(&cl);
    let e = group_identity(g)?;
    let actual = is_recurrent(g, &idempotent_of(g, a)?, &e)?;
    if predicted != actual {
        return Err(Error::Invariant(format!(
            "cycle coverage predicts {predicted}, dynamics give {actual} for {a}"
        )));
    }
    Ok(predicted)
}
