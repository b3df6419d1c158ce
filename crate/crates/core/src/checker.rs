//! Abstract finite commutative monoids given by Cayley tables, and tests
//! that rule out realising one as the sandpile monoid of any graph.
//!
//! All tests here are necessary conditions. A table that passes all of them
//! is reported as having no known obstruction, never as realizable.
//!
//! The idempotents are ordered by `e ≤ f ⇔ e + f = e`, so the identity is the
//! top element and `+` is the meet. For a sandpile monoid this is the
//! reverse of inclusion between the corresponding filters.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonoidTable {
    order: usize,
    identity: usize,
    table: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TableViolation {
    NotIdentity { element: usize },
    NotCommutative { i: usize, j: usize },
    NotAssociative { i: usize, j: usize, k: usize },
}

impl fmt::Display for TableViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TableViolation::NotIdentity { element } => {
                write!(f, "identity fails on element {element}")
            }
            TableViolation::NotCommutative { i, j } => write!(f, "{i}+{j} != {j}+{i}"),
            TableViolation::NotAssociative { i, j, k } => {
                write!(f, "({i}+{j})+{k} != {i}+({j}+{k})")
            }
        }
    }
}

impl MonoidTable {
    /// Checks dimensions and entry ranges only; see [`validate_table`] for
    /// the monoid laws.
    pub fn new(order: usize, identity: usize, table: Vec<Vec<usize>>) -> Result<Self> {
        let malformed = |message: String| Error::Parse { line: 0, message };
        if order == 0 {
            return Err(malformed("a monoid needs at least one element".into()));
        }
        if identity >= order {
            return Err(malformed(format!("identity {identity} out of range")));
        }
        if table.len() != order {
            return Err(malformed(format!(
                "expected {order} rows, found {}",
                table.len()
            )));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != order {
                return Err(malformed(format!(
                    "row {i} has {} entries, expected {order}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= order) {
                return Err(malformed(format!("row {i} has out-of-range entry {bad}")));
            }
        }
        Ok(MonoidTable {
            order,
            identity,
            table,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn op(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.order).filter(|&e| self.op(e, e) == e).collect()
    }

    /// Text format: `m <order> <identity>` then `order` rows of indices.
    pub fn to_text(&self) -> String {
        let mut s = format!("m {} {}\n", self.order, self.identity);
        for row in &self.table {
            let cells: Vec<String> = row.iter().map(usize::to_string).collect();
            s.push_str(&cells.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse = |line: usize, s: &str| -> Result<usize> {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line,
                message: format!("expected an element index, found {s:?}"),
            })
        };
        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            message: "empty table".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "m" {
            return Err(Error::Parse {
                line,
                message: "expected `m <order> <identity>`".into(),
            });
        }
        let order = parse(line, fields[1])?;
        let identity = parse(line, fields[2])?;
        let mut table = Vec::with_capacity(order);
        for (line, row) in lines {
            let row = row
                .split_whitespace()
                .map(|s| parse(line, s))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != order {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {order} entries, found {}", row.len()),
                });
            }
            table.push(row);
        }
        MonoidTable::new(order, identity, table)
    }
}

/// Checks the identity, commutativity and associativity laws exhaustively,
/// reporting the first violation found.
pub fn validate_table(t: &MonoidTable) -> std::result::Result<(), TableViolation> {
    let n = t.order;
    for x in 0..n {
        if t.op(t.identity, x) != x || t.op(x, t.identity) != x {
            return Err(TableViolation::NotIdentity { element: x });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if t.op(i, j) != t.op(j, i) {
                return Err(TableViolation::NotCommutative { i, j });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let ij = t.op(i, j);
            for k in 0..n {
                if t.op(ij, k) != t.op(i, t.op(j, k)) {
                    return Err(TableViolation::NotAssociative { i, j, k });
                }
            }
        }
    }
    Ok(())
}

/// Elements `u, a, k` with `u + a = u`, `a ≠ 0` and `a + k = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UPlusAWitness {
    pub u: usize,
    pub a: usize,
    pub k: usize,
}

/// Lexicographically first `(u, a, k)` witness, if any. A sandpile monoid
/// never has one: a nonzero `a` that can reach `0` cannot be absorbed.
pub fn u_plus_a_obstruction(t: &MonoidTable) -> Option<UPlusAWitness> {
    let n = t.order;
    let id = t.identity;
    let inverse: Vec<Option<usize>> = (0..n).map(|a| (0..n).find(|&k| t.op(a, k) == id)).collect();
    (0..n).find_map(|u| {
        (0..n)
            .filter(|&a| a != id && t.op(u, a) == u)
            .find_map(|a| inverse[a].map(|k| UPlusAWitness { u, a, k }))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum LatticeVerdict {
    Distributive,
    /// `x ∧ (y ∨ z) ≠ (x ∧ y) ∨ (x ∧ z)`.
    NotDistributive {
        x: usize,
        y: usize,
        z: usize,
    },
    /// `e` and `f` have no least upper bound among the idempotents.
    NotALattice {
        e: usize,
        f: usize,
    },
}

/// Tests whether the idempotents, ordered by `e ≤ f ⇔ e + f = e`, form a
/// distributive lattice. Meets are `+`; joins are least upper bounds.
pub fn idempotent_lattice_distributive(t: &MonoidTable) -> LatticeVerdict {
    let idem = t.idempotents();
    let leq = |e: usize, f: usize| t.op(e, f) == e;
    let m = idem.len();
    let mut join = vec![vec![0usize; m]; m];
    for (a, &e) in idem.iter().enumerate() {
        for (b, &f) in idem.iter().enumerate() {
            let upper: Vec<usize> = idem
                .iter()
                .copied()
                .filter(|&g| leq(e, g) && leq(f, g))
                .collect();
            match upper
                .iter()
                .copied()
                .find(|&g| upper.iter().all(|&h| leq(g, h)))
            {
                Some(g) => join[a][b] = g,
                None => return LatticeVerdict::NotALattice { e, f },
            }
        }
    }
    let slot = |x: usize| idem.binary_search(&x).expect("idempotent");
    for &x in &idem {
        for (b, &y) in idem.iter().enumerate() {
            for (c, &z) in idem.iter().enumerate() {
                let lhs = t.op(x, join[b][c]);
                let rhs = join[slot(t.op(x, y))][slot(t.op(x, z))];
                if lhs != rhs {
                    return LatticeVerdict::NotDistributive { x, y, z };
                }
            }
        }
    }
    LatticeVerdict::Distributive
}

/// A chain of `p` elements under `min`; the top `p − 1` is the identity.
pub fn make_chain_monoid(p: usize) -> Result<MonoidTable> {
    if p == 0 {
        return Err(Error::Precondition("chain needs p ≥ 1".into()));
    }
    MonoidTable::new(
        p,
        p - 1,
        (0..p).map(|i| (0..p).map(|j| i.min(j)).collect()).collect(),
    )
}

/// The cyclic group `Z_{n−1}` on `0..n−1` with an absorbing element
/// `∞ = n − 1` adjoined.
pub fn make_group_plus_infinity(n: usize) -> Result<MonoidTable> {
    if n < 3 {
        return Err(Error::Precondition("needs n > 2".into()));
    }
    let g = n - 1;
    let inf = n - 1;
    MonoidTable::new(
        n,
        0,
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == inf || j == inf {
                            inf
                        } else {
                            (i + j) % g
                        }
                    })
                    .collect()
            })
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstruction {
    /// Every element is idempotent, which caps every out-degree at 2, so the
    /// order would have to be a power of two.
    DegreeCounting {
        order: usize,
    },
    UPlusA(UPlusAWitness),
    NonDistributiveIdempotents {
        x: usize,
        y: usize,
        z: usize,
    },
    IdempotentsNotALattice {
        e: usize,
        f: usize,
    },
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstruction::DegreeCounting { order } => write!(
                f,
                "idempotent monoid of order {order}, which is not a power of 2"
            ),
            Obstruction::UPlusA(w) => write!(
                f,
                "u+a=u with a invertible: u={}, a={}, k={}",
                w.u, w.a, w.k
            ),
            Obstruction::NonDistributiveIdempotents { x, y, z } => write!(
                f,
                "idempotent lattice is not distributive at ({x}, {y}, {z})"
            ),
            Obstruction::IdempotentsNotALattice { e, f: g } => {
                write!(f, "idempotents {e} and {g} have no join")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealizabilityReport {
    pub order: usize,
    pub idempotent_count: usize,
    pub all_idempotent: bool,
    pub u_plus_a: Option<UPlusAWitness>,
    pub lattice: LatticeVerdict,
    pub obstructions: Vec<Obstruction>,
}

impl RealizabilityReport {
    pub fn is_obstructed(&self) -> bool {
        !self.obstructions.is_empty()
    }
}

/// Idempotent monoids need every out-degree to be at most 2, so their order
/// must factor over `{1, 2}`.
pub fn degree_counting_obstruction(t: &MonoidTable) -> Option<Obstruction> {
    let all_idempotent = t.idempotents().len() == t.order;
    (all_idempotent && !t.order.is_power_of_two())
        .then_some(Obstruction::DegreeCounting { order: t.order })
}

/// Runs every known necessary condition on a valid table.
pub fn realizability_report(t: &MonoidTable) -> Result<RealizabilityReport> {
    if let Err(v) = validate_table(t) {
        return Err(Error::Precondition(format!(
            "not a commutative monoid: {v}"
        )));
    }
    let idempotent_count = t.idempotents().len();
    let u_plus_a = u_plus_a_obstruction(t);
    let lattice = idempotent_lattice_distributive(t);
    let mut obstructions: Vec<Obstruction> = degree_counting_obstruction(t).into_iter().collect();
    if let Some(w) = u_plus_a {
        obstructions.push(Obstruction::UPlusA(w));
    }
    match lattice {
        LatticeVerdict::Distributive => {}
        LatticeVerdict::NotDistributive { x, y, z } => {
            obstructions.push(Obstruction::NonDistributiveIdempotents { x, y, z })
        }
        LatticeVerdict::NotALattice { e, f } => {
            obstructions.push(Obstruction::IdempotentsNotALattice { e, f })
        }
    }
    Ok(RealizabilityReport {
        order: t.order,
        idempotent_count,
        all_idempotent: idempotent_count == t.order,
        u_plus_a,
        lattice,
        obstructions,
    })
}
