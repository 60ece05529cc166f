//! Similitudes `M*JM = mJ` over `Λ`: local invariants, equivalence under `Sp_n(Λ)` on both
//! sides, explicit transforms, the block-diagonal normal form and existence.
//!
//! `J = [[0, I], [−I, 0]]`. Generators of the symplectic group used throughout:
//! * `Psi{i, j, a}`: `ψ(I + aE_ij) = diag(I + aE_ij, I − ι(a)E_ji)`,
//! * `Upper{i, j, a}`: `[[I, S], [0, I]]` with `S = aE_ij + ι(a)E_ji` (or `S = aE_ii`, `a ∈ Z`),
//! * `Lower{i, j, a}`: `[[I, 0], [S, I]]` with the same `S`.

mod elim;
mod cosets;
mod recover;

pub use elim::eichler;
pub use cosets::*;
pub use recover::*;

use crate::algebra::{Algebra, Elem};
use crate::arith::Int;
use crate::local::Side;
use crate::matrix::Mat;
use crate::zmod::ZModPk;
use serde::{Deserialize, Serialize};

/// `[[0, I], [−I, 0]]` of size `2n`.
pub fn symplectic_form(alg: &Algebra, n: usize) -> Mat {
    let mut j = Mat::zeros(alg, 2 * n, 2 * n);
    for i in 0..n {
        j.entries[i][n + i] = alg.one();
        j.entries[n + i][i] = alg.neg(&alg.one());
    }
    j
}

/// The multiplier `m` if `M*JM = mJ` with `m ≠ 0`.
pub fn multiplier(alg: &Algebra, m: &Mat) -> Option<Int> {
    if !m.is_square() || m.rows % 2 != 0 || m.rows == 0 {
        return None;
    }
    let n = m.rows / 2;
    let j = symplectic_form(alg, n);
    let s = m.star(alg).mul(alg, &j).mul(alg, m);
    let c = alg.as_integer(&s.entries[0][n])?;
    if num_traits::Zero::is_zero(&c) || s != j.scale(alg, &c) {
        return None;
    }
    Some(c)
}

pub fn is_similitude(alg: &Algebra, m: &Mat) -> bool {
    multiplier(alg, m).is_some()
}

/// `diag(I, −I)`: multiplier `−1`.
pub fn sign_flip(alg: &Algebra, n: usize) -> Mat {
    let mut d = Mat::identity(alg, 2 * n);
    for i in n..2 * n {
        d.entries[i][i] = alg.neg(&alg.one());
    }
    d
}

/// One generator of `Sp_n`; `i == j` in `Upper`/`Lower` requires `a ∈ Z`.
#[serde_with::serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum SymOp {
    Psi { i: usize, j: usize, #[serde_as(as = "Vec<crate::arith::JsonInt>")] a: Elem },
    Upper { i: usize, j: usize, #[serde_as(as = "Vec<crate::arith::JsonInt>")] a: Elem },
    Lower { i: usize, j: usize, #[serde_as(as = "Vec<crate::arith::JsonInt>")] a: Elem },
}

impl SymOp {
    pub fn param(&self) -> &Elem {
        match self {
            SymOp::Psi { a, .. } | SymOp::Upper { a, .. } | SymOp::Lower { a, .. } => a,
        }
    }

    pub fn with_param(&self, a: Elem) -> SymOp {
        match *self {
            SymOp::Psi { i, j, .. } => SymOp::Psi { i, j, a },
            SymOp::Upper { i, j, .. } => SymOp::Upper { i, j, a },
            SymOp::Lower { i, j, .. } => SymOp::Lower { i, j, a },
        }
    }

    pub fn inverse(&self, alg: &Algebra) -> SymOp {
        self.with_param(alg.neg(self.param()))
    }

    /// Whether the parameter must be a rational integer.
    pub fn is_scalar_slot(&self) -> bool {
        matches!(*self, SymOp::Upper { i, j, .. } | SymOp::Lower { i, j, .. } if i == j)
    }

    /// Off-identity entries `(row, col, value)`; the generator is `I` plus these.
    pub fn entries(&self, alg: &Algebra, n: usize) -> Vec<(usize, usize, Elem)> {
        match self {
            SymOp::Psi { i, j, a } => vec![(*i, *j, a.clone()), (n + j, n + i, alg.neg(&alg.involute(a)))],
            SymOp::Upper { i, j, a } if i == j => vec![(*i, n + i, a.clone())],
            SymOp::Upper { i, j, a } => vec![(*i, n + j, a.clone()), (*j, n + i, alg.involute(a))],
            SymOp::Lower { i, j, a } if i == j => vec![(n + i, *i, a.clone())],
            SymOp::Lower { i, j, a } => vec![(n + i, *j, a.clone()), (n + j, *i, alg.involute(a))],
        }
    }

    pub fn matrix(&self, alg: &Algebra, n: usize) -> Mat {
        let mut g = Mat::identity(alg, 2 * n);
        for (x, y, c) in self.entries(alg, n) {
            g.entries[x][y] = c;
        }
        g
    }

    /// Left: `G·m` (row `x` += `c`·row `y`). Right: `m·G` (column `y` += column `x`·`c`).
    /// Sources and targets of the two entries never overlap, so they are applied in turn.
    pub fn apply(&self, alg: &Algebra, m: &mut Mat, side: Side) {
        let n = match side {
            Side::Left => m.rows / 2,
            Side::Right => m.cols / 2,
        };
        for (x, y, c) in self.entries(alg, n) {
            match side {
                Side::Left => {
                    let src = m.entries[y].clone();
                    for (t, s) in m.entries[x].iter_mut().zip(&src) {
                        *t = alg.add(t, &alg.mul(&c, s));
                    }
                }
                Side::Right => {
                    for row in m.entries.iter_mut() {
                        let s = alg.mul(&row[x], &c);
                        row[y] = alg.add(&row[y], &s);
                    }
                }
            }
        }
    }
}

/// Generator whose `(x, y)` entry is `c`, for `x ≠ y` in `0..2n`; `x`, `y` paired as `(i, n+i)` needs `c ∈ Z`.
pub(crate) fn elementary(alg: &Algebra, n: usize, x: usize, y: usize, c: Elem) -> SymOp {
    match (x < n, y < n) {
        (true, true) => SymOp::Psi { i: x, j: y, a: c },
        (false, false) => SymOp::Psi {
            i: y - n,
            j: x - n,
            a: alg.neg(&alg.involute(&c)),
        },
        (true, false) => SymOp::Upper { i: x, j: y - n, a: c },
        (false, true) => SymOp::Lower { i: x - n, j: y, a: c },
    }
}

/// Chronological word on one side, as in [`crate::local::TransvectionSeq`]; a left word may end in a
/// diagonal of `2n` local units.
#[serde_with::serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymWord {
    pub side: Side,
    #[serde_as(as = "crate::arith::JsonInt")]
    pub p: Int,
    pub k: u32,
    pub ops: Vec<SymOp>,
    #[serde_as(as = "Vec<Vec<crate::arith::JsonInt>>")]
    pub units: Vec<Elem>,
}

impl SymWord {
    pub fn new(side: Side, p: &Int, k: u32, ops: Vec<SymOp>) -> Self {
        SymWord {
            side,
            p: p.clone(),
            k,
            ops,
            units: Vec::new(),
        }
    }

    pub fn apply(&self, alg: &Algebra, m: &Mat) -> Mat {
        let mut out = m.clone();
        for op in &self.ops {
            op.apply(alg, &mut out, self.side);
        }
        for (i, u) in self.units.iter().enumerate() {
            for x in out.entries[i].iter_mut() {
                *x = alg.mul(u, x);
            }
        }
        out
    }

    /// Like [`SymWord::apply`], reduced modulo `p^k`.
    pub fn apply_mod(&self, alg: &Algebra, m: &Mat) -> Mat {
        let z = ZModPk::new(&self.p, self.k);
        self.apply(alg, m).map(|x| z.reduce_vec(x))
    }

    pub fn matrix(&self, alg: &Algebra, n: usize) -> Mat {
        self.apply(alg, &Mat::identity(alg, 2 * n))
    }

    /// Inverse of the generator part (units dropped).
    pub fn inverse_ops(&self, alg: &Algebra) -> Vec<SymOp> {
        self.ops.iter().rev().map(|op| op.inverse(alg)).collect()
    }
}
