//! Local reduction of a similitude to `diag(e_1, …, e_n, m·ι(e_1)⁻¹, …, m·ι(e_n)⁻¹)` using
//! symplectic generators only.
//!
//! At inert and ramified places `Λ_p` is a local principal ideal ring and the reduction pivots on
//! a minimal-valuation entry. At split quaternion places the matrix is carried to a `4n×4n`
//! integer matrix `g` with `gᵀ𝒥g = m𝒥`, `𝒥 = J ⊗ [[0, 1], [−1, 0]]`, and reduced with
//! Eichler transformations of that symmetric form.

use super::{elementary, SymOp, SymWord};
use crate::algebra::{Algebra, Elem, Place};
use crate::arith::{self, Int};
use crate::error::{Error, Result};
use crate::local::{LocalRing, OrderMod, Side, SplittingMap};
use crate::matrix::Mat;
use crate::zmat::{self, IMat};
use crate::zmod::ZModPk;
use num_integer::Integer;
use num_traits::{One, Zero};

pub(crate) struct Reduction {
    pub left: SymWord,
    pub right: SymWord,
    pub invariants: ReducedInvariants,
}

pub(crate) enum ReducedInvariants {
    Exponents(Vec<u32>),
    Pairs(Vec<[u32; 2]>),
}

// ---------------------------------------------------------------------------
// inert and ramified places

fn apply_local(ring: &OrderMod, w: &mut Mat, op: &SymOp, side: Side) {
    op.apply(ring.alg, w, side);
    for row in w.entries.iter_mut() {
        for x in row.iter_mut() {
            *x = ring.z.reduce_vec(x);
        }
    }
}

/// `s ∈ Z/p^k` with `s·a ≡ b`.
fn scalar_quotient(ring: &OrderMod, a: &Elem, b: &Elem) -> Option<Elem> {
    let s = ring.z.solve_left(&vec![a.clone()], b)?;
    Some(ring.alg.from_int(&s[0]))
}

/// `None` if the precision `k` is too low.
pub(crate) fn dvr_reduce(alg: &Algebra, place: &Place, k: u32, m: &Mat, mult: &Int) -> Option<Reduction> {
    let n = m.rows / 2;
    let ring = OrderMod::new(alg, place, k);
    let mu = ring.valuation(&alg.from_int(mult))?;
    let mut w = m.map(|x| ring.z.reduce_vec(x));
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut exponents = Vec::new();
    let one = alg.one();
    let minus_one = alg.neg(&one);
    let push = |w: &mut Mat, log: &mut Vec<SymOp>, op: SymOp, side: Side| {
        apply_local(&ring, w, &op, side);
        log.push(op);
    };
    // row x becomes old row y (left), or column y becomes old column x (right)
    let swap = |w: &mut Mat, log: &mut Vec<SymOp>, x: usize, y: usize, side: Side| {
        for (a, b, c) in [(x, y, &one), (y, x, &minus_one), (x, y, &one)] {
            let op = elementary(alg, n, a, b, c.clone());
            apply_local(&ring, w, &op, side);
            log.push(op);
        }
    };
    for t in 0..n {
        let active: Vec<usize> = (t..n).chain(n + t..2 * n).collect();
        let mut best: Option<(u32, usize, usize)> = None;
        for &r in &active {
            for &c in &active {
                if let Some(v) = ring.valuation(&w.entries[r][c]) {
                    if best.map_or(true, |(bv, _, _)| v < bv) {
                        best = Some((v, r, c));
                    }
                }
            }
        }
        let (v, r, c) = best?;
        if v > mu {
            return None;
        }
        let r = if r >= n {
            swap(&mut w, &mut left, r - n, r, Side::Left);
            r - n
        } else {
            r
        };
        if r != t {
            swap(&mut w, &mut left, t, r, Side::Left);
        }
        let c = if c >= n {
            swap(&mut w, &mut right, c, c - n, Side::Right);
            c - n
        } else {
            c
        };
        if c != t {
            swap(&mut w, &mut right, c, t, Side::Right);
        }
        let piv = w.entries[t][t].clone();
        for &x in &active {
            if x == t || x == n + t || ring.valuation(&w.entries[x][t]).is_none() {
                continue;
            }
            let q = ring.left_quotient(&piv, &w.entries[x][t])?;
            push(&mut w, &mut left, elementary(alg, n, x, t, ring.neg(&q)), Side::Left);
        }
        if ring.valuation(&w.entries[n + t][t]).is_some() {
            let s = scalar_quotient(&ring, &piv, &ring.neg(&w.entries[n + t][t]))?;
            push(&mut w, &mut left, SymOp::Lower { i: t, j: t, a: s }, Side::Left);
        }
        for &y in &active {
            if y == t || y == n + t || ring.valuation(&w.entries[t][y]).is_none() {
                continue;
            }
            let q = ring.right_quotient(&piv, &w.entries[t][y])?;
            push(&mut w, &mut right, elementary(alg, n, t, y, ring.neg(&q)), Side::Right);
        }
        if ring.valuation(&w.entries[t][n + t]).is_some() {
            let s = scalar_quotient(&ring, &piv, &ring.neg(&w.entries[t][n + t]))?;
            push(&mut w, &mut right, SymOp::Upper { i: t, j: t, a: s }, Side::Right);
        }
        // row and column n+t vanish off the diagonal by M*JM = mJ; what is left is precision noise
        for y in 0..2 * n {
            if y != n + t {
                w.entries[n + t][y] = alg.zero();
                w.entries[y][n + t] = alg.zero();
            }
        }
        exponents.push(v);
    }
    let mut units = vec![alg.one(); 2 * n];
    for t in 0..n {
        if ring.valuation(&w.entries[n + t][n + t]) != Some(mu - exponents[t]) {
            return None;
        }
        let u = ring.left_quotient(&w.entries[t][t], &ring.canonical(exponents[t]))?;
        let bar_inv = ring.left_quotient(&alg.involute(&u), &one)?;
        units[t] = u;
        units[n + t] = ring.z.reduce_vec(&bar_inv);
    }
    let p = &place.p;
    let mut left = SymWord::new(Side::Left, p, k, left);
    left.units = units;
    Some(Reduction {
        left,
        right: SymWord::new(Side::Right, p, k, right),
        invariants: ReducedInvariants::Exponents(exponents),
    })
}

// ---------------------------------------------------------------------------
// split quaternion places

/// Coordinate `2·block + r` of the `4n×4n` picture.
fn partner(n: usize, c: usize) -> usize {
    let (b, r) = (c / 2, c % 2);
    let pb = if b < n { b + n } else { b - n };
    2 * pb + (1 - r)
}

/// `𝒥[c][partner(c)]`.
fn sign(n: usize, c: usize) -> i32 {
    let top = if c / 2 < n { 1 } else { -1 };
    let r = if c % 2 == 0 { 1 } else { -1 };
    top * r
}

/// Eichler transformation `I + tE_xy − tε_xε_y·E_{y*x*}` as `(x, y, t)`.
type Eichler = (usize, usize, Int);

fn eichler_entries(n: usize, e: &Eichler) -> [(usize, usize, Int); 2] {
    let (x, y, t) = e;
    let s = if sign(n, *x) * sign(n, *y) == 1 { -t.clone() } else { t.clone() };
    [(*x, *y, t.clone()), (partner(n, *y), partner(n, *x), s)]
}

fn apply_eichler(z: &ZModPk, g: &mut IMat, n: usize, e: &Eichler, side: Side) {
    for (x, y, c) in eichler_entries(n, e) {
        match side {
            Side::Left => {
                let src = g[y].clone();
                for (t, s) in g[x].iter_mut().zip(&src) {
                    *t = z.reduce(&(&*t + &c * s));
                }
            }
            Side::Right => {
                for row in g.iter_mut() {
                    let s = &row[x] * &c;
                    row[y] = z.reduce(&(&row[y] + s));
                }
            }
        }
    }
}

pub(crate) fn morita_image(map: &SplittingMap, m: &Mat) -> IMat {
    let mut out = zmat::zeros(2 * m.rows, 2 * m.cols);
    for i in 0..m.rows {
        for j in 0..m.cols {
            let img = map.apply(&m.entries[i][j]);
            for a in 0..2 {
                for b in 0..2 {
                    out[2 * i + a][2 * j + b] = img[a][b].clone();
                }
            }
        }
    }
    out
}

/// `q` with `q·a ≡ b (mod p^k)`.
fn int_quotient(z: &ZModPk, a: &Int, b: &Int) -> Option<Int> {
    let v = z.valuation(a)?;
    let pv = arith::pow(&z.p, v);
    let b = z.reduce(b);
    if !b.is_multiple_of(&pv) {
        return None;
    }
    let u = z.inv(&(z.reduce(a) / &pv))?;
    Some(z.reduce(&(b / &pv * u)))
}

struct MoritaRaw {
    left: Vec<Eichler>,
    right: Vec<Eichler>,
    /// Diagonal left units of the `4n` picture.
    units: Vec<Int>,
    pairs: Vec<[u32; 2]>,
}

/// Hyperbolic pairs `(u, w)` in elimination order `A_0, B_0, A_1, B_1, …`.
fn hyperbolic_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| [(2 * i, 2 * (n + i) + 1), (2 * i + 1, 2 * (n + i))]).collect()
}

fn morita_raw(z: &ZModPk, mut g: IMat, n: usize, mu: u32) -> Result<Option<MoritaRaw>> {
    let pairs = hyperbolic_pairs(n);
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut xs = Vec::new();
    let one = Int::one();
    let swap = |g: &mut IMat, log: &mut Vec<Eichler>, x: usize, y: usize, side: Side| {
        for e in [(x, y, one.clone()), (y, x, -one.clone()), (x, y, one.clone())] {
            apply_eichler(z, g, n, &e, side);
            log.push(e);
        }
    };
    for s in 0..pairs.len() {
        let (u, w) = pairs[s];
        let coords: Vec<usize> = {
            let mut c: Vec<usize> = pairs[s..].iter().flat_map(|&(a, b)| [a, b]).collect();
            c.sort();
            c
        };
        if s + 1 == pairs.len() {
            let d = [z.valuation(&g[u][u]), z.valuation(&g[w][w])];
            let off = [z.valuation(&g[u][w]), z.valuation(&g[w][u])];
            let small = |v: Option<u32>| v.is_some_and(|v| v <= mu);
            if off.iter().any(|&v| small(v)) {
                if d.iter().any(|&v| small(v)) {
                    return Ok(None);
                }
                return Err(Error::Unsupported(
                    "local form is improper: not in the orbit of a global similitude".into(),
                ));
            }
            match d {
                [Some(a), Some(b)] if a + b == mu => xs.push(a),
                _ => return Ok(None),
            }
            g[u][w] = Int::zero();
            g[w][u] = Int::zero();
            break;
        }
        let mut best: Option<(u32, usize, usize)> = None;
        for &r in &coords {
            for &c in &coords {
                if let Some(v) = z.valuation(&g[r][c]) {
                    if best.map_or(true, |(bv, _, _)| v < bv) {
                        best = Some((v, r, c));
                    }
                }
            }
        }
        let Some((v, r, c)) = best else { return Ok(None) };
        if v > mu {
            return Ok(None);
        }
        let via = pairs[s + 1].0;
        if r == w {
            swap(&mut g, &mut left, via, r, Side::Left);
            swap(&mut g, &mut left, u, via, Side::Left);
        } else if r != u {
            swap(&mut g, &mut left, u, r, Side::Left);
        }
        if c == w {
            swap(&mut g, &mut right, c, via, Side::Right);
            swap(&mut g, &mut right, via, u, Side::Right);
        } else if c != u {
            swap(&mut g, &mut right, c, u, Side::Right);
        }
        let piv = g[u][u].clone();
        for &x in &coords {
            if x == u || x == w || z.valuation(&g[x][u]).is_none() {
                continue;
            }
            let Some(q) = int_quotient(z, &piv, &g[x][u]) else { return Ok(None) };
            let e = (x, u, z.reduce(&-q));
            apply_eichler(z, &mut g, n, &e, Side::Left);
            left.push(e);
        }
        for &y in &coords {
            if y == u || y == w || z.valuation(&g[u][y]).is_none() {
                continue;
            }
            let Some(q) = int_quotient(z, &piv, &g[u][y]) else { return Ok(None) };
            let e = (u, y, z.reduce(&-q));
            apply_eichler(z, &mut g, n, &e, Side::Right);
            right.push(e);
        }
        // row/column w and the (u, w), (w, u) entries vanish by gᵀ𝒥g = m𝒥 up to precision noise
        for y in 0..g.len() {
            if y != w {
                g[w][y] = Int::zero();
                g[y][w] = Int::zero();
            }
            if y != u {
                g[u][y] = Int::zero();
                g[y][u] = Int::zero();
            }
        }
        if z.valuation(&g[w][w]) != Some(mu - v) {
            return Ok(None);
        }
        xs.push(v);
    }
    let mut units = vec![Int::one(); g.len()];
    for (s, &(u, w)) in pairs.iter().enumerate() {
        let Some(t) = int_quotient(z, &g[u][u], &arith::pow(&z.p, xs[s])) else { return Ok(None) };
        let Some(t_inv) = z.inv(&t) else { return Ok(None) };
        units[u] = t;
        units[w] = t_inv;
    }
    Ok(Some(MoritaRaw {
        left,
        right,
        units,
        pairs: xs.chunks(2).map(|c| [c[0], c[1]]).collect(),
    }))
}

/// Generators over `Λ` whose image in the `4n` picture is the Eichler transformation `(x, y, t)`.
pub fn eichler(alg: &Algebra, map: &SplittingMap, n: usize, x: usize, y: usize, t: &Int, side: Side) -> Result<Vec<SymOp>> {
    let (bx, rx) = (x / 2, x % 2);
    let (by, ry) = (y / 2, y % 2);
    if x == y || partner(n, x) == y {
        return Err(Error::Malformed(format!("no Eichler transformation for ({x}, {y})")));
    }
    if bx != by {
        if bx % n == by % n {
            // (i, r) -> (n+i, r): the scalar generators
            debug_assert_eq!(rx, ry);
            let a = alg.from_int(t);
            return Ok(vec![elementary(alg, n, bx, by, a)]);
        }
        return Ok(vec![elementary(alg, n, bx, by, map.unit_matrix(rx, ry, t))]);
    }
    if n < 2 {
        return Err(Error::Unsupported("same-block Eichler transformations need n >= 2".into()));
    }
    // [E(x, z, t), E(z, y, 1)] = E(x, y, t) with z in another block of the same half
    let other = if bx < n { (bx + 1) % n } else { n + (bx - n + 1) % n };
    let zc = 2 * other;
    let a = elementary(alg, n, bx, other, map.unit_matrix(rx, 0, t));
    let b = elementary(alg, n, other, by, map.unit_matrix(0, ry, &Int::one()));
    let (ai, bi) = (a.inverse(alg), b.inverse(alg));
    debug_assert!(zc != partner(n, x) && zc != partner(n, y));
    Ok(match side {
        Side::Left => vec![bi, ai, b, a],
        Side::Right => vec![a, b, ai, bi],
    })
}

fn translate(alg: &Algebra, map: &SplittingMap, n: usize, ops: &[Eichler], side: Side) -> Result<Vec<SymOp>> {
    let mut out = Vec::new();
    for (x, y, t) in ops {
        out.extend(eichler(alg, map, n, *x, *y, t, side)?);
    }
    Ok(out)
}

pub(crate) fn morita_reduce(alg: &Algebra, map: &SplittingMap, m: &Mat, mult: &Int) -> Result<Option<Reduction>> {
    let n = m.rows / 2;
    let z = ZModPk::new(&map.p, map.k);
    let mu = arith::valuation(mult, &map.p);
    let g = morita_image(map, m);
    let Some(raw) = morita_raw(&z, g, n, mu)? else { return Ok(None) };
    let mut units = Vec::with_capacity(2 * n);
    for b in 0..2 * n {
        let mut y = zmat::zeros(2, 2);
        y[0][0] = raw.units[2 * b].clone();
        y[1][1] = raw.units[2 * b + 1].clone();
        units.push(map.pull_back(&y));
    }
    let mut left = SymWord::new(Side::Left, &map.p, map.k, translate(alg, map, n, &raw.left, Side::Left)?);
    left.units = units;
    let right = SymWord::new(Side::Right, &map.p, map.k, translate(alg, map, n, &raw.right, Side::Right)?);
    Ok(Some(Reduction {
        left,
        right,
        invariants: ReducedInvariants::Pairs(raw.pairs),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::local::split_quaternion_residue;

    fn eichler_matrix(z: &ZModPk, n: usize, e: &Eichler) -> IMat {
        let mut g = zmat::identity(4 * n);
        for (x, y, c) in eichler_entries(n, e) {
            g[x][y] = z.reduce(&c);
        }
        g
    }

    #[test]
    fn eichler_words_have_the_right_image() {
        let alg = Algebra::hurwitz();
        let p = int(5);
        let map = split_quaternion_residue(&alg, &p, 3).unwrap();
        let z = ZModPk::new(&p, 3);
        let n = 2;
        for x in 0..4 * n {
            for y in 0..4 * n {
                if x == y || partner(n, x) == y || (x / 2 != y / 2 && x / 2 % n == y / 2 % n && x % 2 != y % 2) {
                    continue;
                }
                let t = int(7);
                for side in [Side::Left, Side::Right] {
                    let word = SymWord::new(side, &p, 3, eichler(&alg, &map, n, x, y, &t, side).unwrap());
                    let got = morita_image(&map, &word.matrix(&alg, n));
                    assert_eq!(got, eichler_matrix(&z, n, &(x, y, t.clone())), "({x}, {y}) {side:?}");
                }
            }
        }
    }

    #[test]
    fn eichler_transformations_preserve_the_form() {
        let n = 2;
        let z = ZModPk::new(&int(7), 2);
        let mut form = zmat::zeros(4 * n, 4 * n);
        for c in 0..4 * n {
            form[c][partner(n, c)] = int(sign(n, c) as i64);
        }
        let g = eichler_matrix(&z, n, &(1, 6, int(3)));
        let lhs = z.mul_mat(&z.mul_mat(&zmat::transpose(&g), &form), &g);
        assert_eq!(lhs, z.reduce_mat(&form));
    }
}
