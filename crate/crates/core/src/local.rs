//! Local elementary divisors at one place, with the transvection words that produce them.
//!
//! Three local models are used:
//! * `Λ/p^kΛ` itself at inert and ramified places (a local principal ideal ring),
//! * `Z/p^k` through a root of the minimal polynomial at split quadratic places,
//! * `M_2(Z/p^k)` through a splitting map at split quaternion places, where an
//!   `n×n` matrix over `Λ` becomes a `2n×2n` integer matrix.
//!
//! The elimination itself is written once against [`LocalRing`].

use crate::algebra::{Algebra, Elem, Place, PlaceKind};
use crate::arith::{self, int, Int};
use crate::error::{Error, Result};
use crate::lattice;
use crate::matrix::Mat;
use crate::zmat::{self, IMat};
use crate::zmod::ZModPk;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ops::ControlFlow;

const PRECISION_RETRIES: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// `I + a·E_ij`, applied on the given side.
#[serde_with::serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transvection {
    pub side: Side,
    pub i: usize,
    pub j: usize,
    #[serde_as(as = "Vec<crate::arith::JsonInt>")]
    pub a: Elem,
}

/// Chronological word of transvections on one side; a left word may end in a diagonal of units.
#[serde_with::serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransvectionSeq {
    pub side: Side,
    #[serde_as(as = "crate::arith::JsonInt")]
    pub p: Int,
    pub k: u32,
    pub ops: Vec<Transvection>,
    #[serde_as(as = "Vec<Vec<crate::arith::JsonInt>>")]
    pub units: Vec<Elem>,
}

impl TransvectionSeq {
    pub fn empty(side: Side, p: &Int, k: u32) -> Self {
        TransvectionSeq {
            side,
            p: p.clone(),
            k,
            ops: Vec::new(),
            units: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty() && self.units.is_empty()
    }

    /// Left word: `diag(units) · T_r ⋯ T_1 · m`. Right word: `m · T_1 ⋯ T_r`.
    pub fn apply(&self, alg: &Algebra, m: &Mat) -> Mat {
        let mut out = m.clone();
        for t in &self.ops {
            apply_transvection(alg, &mut out, t);
        }
        if !self.units.is_empty() {
            for (i, u) in self.units.iter().enumerate() {
                for x in out.entries[i].iter_mut() {
                    *x = alg.mul(u, x);
                }
            }
        }
        out
    }

    /// The matrix the word multiplies by.
    pub fn matrix(&self, alg: &Algebra, n: usize) -> Mat {
        self.apply(alg, &Mat::identity(alg, n))
    }

    /// Word for the inverse of the transvection part (units are dropped).
    pub fn inverse_word(&self) -> Vec<Transvection> {
        self.ops
            .iter()
            .rev()
            .map(|t| Transvection {
                side: t.side,
                i: t.i,
                j: t.j,
                a: t.a.iter().map(|c| -c).collect(),
            })
            .collect()
    }
}

/// Left: row `i` += `a`·row `j`. Right: column `j` += column `i`·`a`.
pub fn apply_transvection(alg: &Algebra, m: &mut Mat, t: &Transvection) {
    match t.side {
        Side::Left => {
            let src = m.entries[t.j].clone();
            for (x, s) in m.entries[t.i].iter_mut().zip(&src) {
                *x = alg.add(x, &alg.mul(&t.a, s));
            }
        }
        Side::Right => {
            for row in m.entries.iter_mut() {
                let s = alg.mul(&row[t.i], &t.a);
                row[t.j] = alg.add(&row[t.j], &s);
            }
        }
    }
}

/// Per-place invariants: plain exponents, or exponent pairs at split quaternion places.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Invariants {
    Exponents(Vec<u32>),
    Pairs(Vec<[u32; 2]>),
}

impl Invariants {
    pub fn len(&self) -> usize {
        match self {
            Invariants::Exponents(v) => v.len(),
            Invariants::Pairs(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            Invariants::Exponents(v) => v.iter().all(|&e| e == 0),
            Invariants::Pairs(v) => v.iter().all(|p| p[0] == 0 && p[1] == 0),
        }
    }

    pub fn trivial_like(&self) -> Invariants {
        match self {
            Invariants::Exponents(v) => Invariants::Exponents(vec![0; v.len()]),
            Invariants::Pairs(v) => Invariants::Pairs(vec![[0, 0]; v.len()]),
        }
    }

    /// Exponents flattened in order (pairs contribute both entries).
    pub fn flat(&self) -> Vec<u32> {
        match self {
            Invariants::Exponents(v) => v.clone(),
            Invariants::Pairs(v) => v.iter().flat_map(|p| [p[0], p[1]]).collect(),
        }
    }

    pub fn is_chain(&self) -> bool {
        self.flat().windows(2).all(|w| w[0] <= w[1])
    }

    /// Largest exponent, measured in the local valuation of the place.
    pub fn top(&self) -> u32 {
        self.flat().into_iter().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlaceInvariants {
    pub place: Place,
    pub invariants: Invariants,
}

/// Local invariants at every place where they are nontrivial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Profile {
    pub n: usize,
    pub places: Vec<PlaceInvariants>,
}

impl Profile {
    pub fn trivial(n: usize) -> Self {
        Profile { n, places: Vec::new() }
    }

    /// Sorted by place, trivial entries removed.
    pub fn normalized(mut self) -> Self {
        self.places.retain(|e| !e.invariants.is_trivial());
        self.places.sort();
        self
    }

    pub fn get(&self, place: &Place) -> Option<&Invariants> {
        self.places.iter().find(|e| e.place == *place).map(|e| &e.invariants)
    }

    pub fn primes(&self) -> Vec<Int> {
        let mut ps: Vec<Int> = self.places.iter().map(|e| e.place.p.clone()).collect();
        ps.sort();
        ps.dedup();
        ps
    }

    /// Only the entries above `p`.
    pub fn restrict_to_prime(&self, p: &Int) -> Profile {
        Profile {
            n: self.n,
            places: self.places.iter().filter(|e| e.place.p == *p).cloned().collect(),
        }
    }

    /// Shape and divisibility checks against the algebra's places.
    pub fn validate(&self, alg: &Algebra) -> Result<()> {
        for e in &self.places {
            let p = &e.place.p;
            if !arith::is_prime(p) {
                return Err(Error::InfeasibleProfile(format!("{p} is not prime")));
            }
            if !alg.classify_prime(p).contains(&e.place) {
                return Err(Error::InfeasibleProfile(format!("{} is not a place of this algebra", e.place)));
            }
            if e.invariants.len() != self.n {
                return Err(Error::InfeasibleProfile(format!(
                    "{} carries {} invariants, expected {}",
                    e.place,
                    e.invariants.len(),
                    self.n
                )));
            }
            let pairs_expected = e.place.kind == PlaceKind::Split;
            let is_pairs = matches!(e.invariants, Invariants::Pairs(_));
            if pairs_expected != is_pairs && !e.invariants.is_empty() {
                return Err(Error::InfeasibleProfile(format!(
                    "{} needs {}",
                    e.place,
                    if pairs_expected { "exponent pairs" } else { "plain exponents" }
                )));
            }
            if !e.invariants.is_chain() {
                return Err(Error::InfeasibleProfile(format!("{}: exponents do not form a divisibility chain", e.place)));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// local rings

pub(crate) trait LocalRing {
    type E: Clone;
    fn one(&self) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn valuation(&self, a: &Self::E) -> Option<u32>;
    /// Some `q` with `q·a = b`.
    fn left_quotient(&self, a: &Self::E, b: &Self::E) -> Option<Self::E>;
    /// Some `q` with `a·q = b`.
    fn right_quotient(&self, a: &Self::E, b: &Self::E) -> Option<Self::E>;
    fn canonical(&self, v: u32) -> Self::E;
}

struct Zpk {
    z: ZModPk,
}

impl LocalRing for Zpk {
    type E = Int;
    fn one(&self) -> Int {
        Int::one()
    }
    fn sub(&self, a: &Int, b: &Int) -> Int {
        self.z.reduce(&(a - b))
    }
    fn mul(&self, a: &Int, b: &Int) -> Int {
        self.z.reduce(&(a * b))
    }
    fn neg(&self, a: &Int) -> Int {
        self.z.reduce(&-a)
    }
    fn valuation(&self, a: &Int) -> Option<u32> {
        self.z.valuation(a)
    }
    fn left_quotient(&self, a: &Int, b: &Int) -> Option<Int> {
        let v = self.valuation(a)?;
        let pv = arith::pow(&self.z.p, v);
        let b = self.z.reduce(b);
        if !b.is_multiple_of(&pv) {
            return None;
        }
        let u = self.z.inv(&(self.z.reduce(a) / &pv))?;
        Some(self.z.reduce(&(b / &pv * u)))
    }
    fn right_quotient(&self, a: &Int, b: &Int) -> Option<Int> {
        self.left_quotient(a, b)
    }
    fn canonical(&self, v: u32) -> Int {
        self.z.reduce(&arith::pow(&self.z.p, v))
    }
}

/// `Λ/p^kΛ` at an inert or ramified place.
pub(crate) struct OrderMod<'a> {
    pub(crate) alg: &'a Algebra,
    pub(crate) z: ZModPk,
    /// `Some(π)` at ramified places; valuations are then counted in powers of `π`.
    pub(crate) uniformizer: Option<Elem>,
}

impl<'a> OrderMod<'a> {
    pub(crate) fn new(alg: &'a Algebra, place: &Place, k: u32) -> Self {
        OrderMod {
            alg,
            z: ZModPk::new(&place.p, k),
            uniformizer: (place.kind == PlaceKind::Ramified).then(|| uniformizer(alg, &place.p)),
        }
    }
}

impl LocalRing for OrderMod<'_> {
    type E = Elem;
    fn one(&self) -> Elem {
        self.alg.one()
    }
    fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.z.reduce_vec(&self.alg.sub(a, b))
    }
    fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        self.z.reduce_vec(&self.alg.mul(a, b))
    }
    fn neg(&self, a: &Elem) -> Elem {
        self.z.reduce_vec(&self.alg.neg(a))
    }
    fn valuation(&self, a: &Elem) -> Option<u32> {
        let a = self.z.reduce_vec(a);
        let c = a.iter().filter_map(|x| arith::valuation_opt(x, &self.z.p)).min()?;
        if self.uniformizer.is_none() {
            return Some(c);
        }
        let pc = arith::pow(&self.z.p, c);
        let y: Elem = a.iter().map(|x| x / &pc).collect();
        let extra = u32::from(self.alg.norm(&y).is_multiple_of(&self.z.p));
        Some(2 * c + extra)
    }
    fn left_quotient(&self, a: &Elem, b: &Elem) -> Option<Elem> {
        self.z.solve_left(&self.alg.right_mult_matrix(a), b)
    }
    fn right_quotient(&self, a: &Elem, b: &Elem) -> Option<Elem> {
        self.z.solve_left(&self.alg.left_mult_matrix(a), b)
    }
    fn canonical(&self, v: u32) -> Elem {
        match &self.uniformizer {
            None => self.alg.from_int(&arith::pow(&self.z.p, v)),
            Some(pi) => {
                let mut x = self.alg.one();
                for _ in 0..v {
                    x = self.mul(&x, pi);
                }
                x
            }
        }
    }
}

struct RawSnf<E> {
    left: Vec<(usize, usize, E)>,
    right: Vec<(usize, usize, E)>,
    units: Vec<E>,
    exponents: Vec<u32>,
}

fn row_op<R: LocalRing>(r: &R, m: &mut [Vec<R::E>], i: usize, j: usize, a: &R::E, log: &mut Vec<(usize, usize, R::E)>) {
    let src = m[j].clone();
    for (x, s) in m[i].iter_mut().zip(&src) {
        let t = r.mul(a, s);
        *x = r.sub(x, &r.neg(&t));
    }
    log.push((i, j, a.clone()));
}

fn col_op<R: LocalRing>(r: &R, m: &mut [Vec<R::E>], i: usize, j: usize, a: &R::E, log: &mut Vec<(usize, usize, R::E)>) {
    for row in m.iter_mut() {
        let t = r.mul(&row[i], a);
        row[j] = r.sub(&row[j], &r.neg(&t));
    }
    log.push((i, j, a.clone()));
}

/// Smith form by transvections and a final left diagonal. `None` when the precision is too low
/// for a matrix of full column rank.
fn generic_smith<R: LocalRing>(r: &R, mut m: Vec<Vec<R::E>>) -> Option<RawSnf<R::E>> {
    let rows = m.len();
    let cols = m.first().map_or(0, |x| x.len());
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut exponents = Vec::new();
    let one = r.one();
    let minus_one = r.neg(&one);
    for t in 0..cols.min(rows) {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if let Some(v) = r.valuation(&m[i][j]) {
                    if best.map_or(true, |(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let (v, pi, pj) = best?;
        if pi != t {
            row_op(r, &mut m, t, pi, &one, &mut left);
            row_op(r, &mut m, pi, t, &minus_one, &mut left);
            row_op(r, &mut m, t, pi, &one, &mut left);
        }
        if pj != t {
            col_op(r, &mut m, pj, t, &one, &mut right);
            col_op(r, &mut m, t, pj, &minus_one, &mut right);
            col_op(r, &mut m, pj, t, &one, &mut right);
        }
        let pivot = m[t][t].clone();
        for i in t + 1..rows {
            if r.valuation(&m[i][t]).is_none() {
                continue;
            }
            let q = r.left_quotient(&pivot, &m[i][t])?;
            row_op(r, &mut m, i, t, &r.neg(&q), &mut left);
        }
        for j in t + 1..cols {
            if r.valuation(&m[t][j]).is_none() {
                continue;
            }
            let q = r.right_quotient(&pivot, &m[t][j])?;
            col_op(r, &mut m, t, j, &r.neg(&q), &mut right);
        }
        exponents.push(v);
    }
    if exponents.len() < cols {
        return None;
    }
    let mut units = Vec::with_capacity(rows);
    for t in 0..rows {
        if t < exponents.len() {
            units.push(r.left_quotient(&m[t][t], &r.canonical(exponents[t]))?);
        } else {
            units.push(r.one());
        }
    }
    Some(RawSnf {
        left,
        right,
        units,
        exponents,
    })
}

// ---------------------------------------------------------------------------
// place models

/// Images of the order basis under the two characters `Λ → Z/p^k` at a split quadratic prime
/// (first: the root with smaller residue mod `p`).
#[derive(Debug, Clone)]
pub struct SplitCharacters {
    pub p: Int,
    pub k: u32,
    pub first: Vec<Int>,
    pub second: Vec<Int>,
    /// Inverse of the matrix with rows `(first[r], second[r])`, for pulling back pairs of values.
    pull: IMat,
}

impl SplitCharacters {
    pub fn new(alg: &Algebra, p: &Int, k: u32) -> Result<Self> {
        let z = ZModPk::new(p, k);
        let one = alg.one();
        let e = one[0].extended_gcd(&one[1]);
        if !(&e.x * &one[0] + &e.y * &one[1]).is_one() {
            return Err(Error::InvalidAlgebra("1 is not primitive in the order".into()));
        }
        // basis {1, g} of Λ with g = s0 b0 + s1 b1
        let (s0, s1) = (-e.y, e.x);
        let g = vec![s0.clone(), s1.clone()];
        let (t, n) = (alg.trace(&g), alg.norm(&g));
        let roots = arith::quadratic_roots_mod_prime(&t, &n, p);
        if roots.len() != 2 {
            return Err(Error::Unsupported(format!("{p} does not split")));
        }
        let r1 = arith::hensel_quadratic_root(&t, &n, &roots[0], p, k);
        let r2 = z.reduce(&(&t - &r1));
        // b_r = A_r0 + A_r1 g with A = [[u0, u1], [s0, s1]]^-1
        let a = [[s1.clone(), -&one[1]], [-s0, one[0].clone()]];
        let image = |root: &Int| -> Vec<Int> { a.iter().map(|row| z.reduce(&(&row[0] + &row[1] * root))).collect() };
        let first = image(&r1);
        let second = image(&r2);
        let c = vec![vec![first[0].clone(), second[0].clone()], vec![first[1].clone(), second[1].clone()]];
        let pull = z
            .inverse(&c)
            .ok_or_else(|| Error::LiftFailure(format!("characters at {p} are not independent")))?;
        Ok(SplitCharacters {
            p: p.clone(),
            k,
            first,
            second,
            pull,
        })
    }

    fn modulus(&self) -> Int {
        arith::pow(&self.p, self.k)
    }

    pub fn eval(&self, x: &[Int], first: bool) -> Int {
        let c = if first { &self.first } else { &self.second };
        let s: Int = x.iter().zip(c).map(|(a, b)| a * b).sum();
        arith::modp(&s, &self.modulus())
    }

    /// Element with the given values at the first and second place.
    pub fn pull_back(&self, at_first: &Int, at_second: &Int) -> Elem {
        let v = zmat::vec_mul(&[at_first.clone(), at_second.clone()], &self.pull);
        v.iter().map(|x| arith::modp(x, &self.modulus())).collect()
    }
}

/// Ring isomorphism `Λ/p^kΛ → M_2(Z/p^k)` at a split quaternion prime.
#[derive(Debug, Clone)]
pub struct SplittingMap {
    pub p: Int,
    pub k: u32,
    /// `images[r]` is the 2×2 image of the `r`-th basis element.
    pub images: Vec<IMat>,
    inverse: IMat,
}

impl SplittingMap {
    fn z(&self) -> ZModPk {
        ZModPk::new(&self.p, self.k)
    }

    pub fn apply(&self, x: &[Int]) -> IMat {
        let z = self.z();
        let mut out = zmat::zeros(2, 2);
        for (c, img) in x.iter().zip(&self.images) {
            for a in 0..2 {
                for b in 0..2 {
                    out[a][b] += c * &img[a][b];
                }
            }
        }
        z.reduce_mat(&out)
    }

    pub fn pull_back(&self, y: &IMat) -> Elem {
        let flat = vec![y[0][0].clone(), y[0][1].clone(), y[1][0].clone(), y[1][1].clone()];
        self.z().reduce_vec(&zmat::vec_mul(&flat, &self.inverse))
    }

    pub(crate) fn unit_matrix(&self, a: usize, b: usize, c: &Int) -> Elem {
        let mut y = zmat::zeros(2, 2);
        y[a][b] = c.clone();
        self.pull_back(&y)
    }
}

fn idempotent_mod_p(alg: &Algebra, p: &Int) -> Option<Elem> {
    let z = ZModPk::new(p, 1);
    let is_idem = |e: &Elem| arith::modp(&(alg.trace(e) - 1), p).is_zero() && arith::modp(&alg.norm(e), p).is_zero();
    if *p == int(2) {
        for bits in 0..16u32 {
            let e: Elem = (0..4).map(|r| Int::from((bits >> r) & 1)).collect();
            if is_idem(&e) {
                return Some(e);
            }
        }
        return None;
    }
    let r0 = (0..4).find(|&r| !arith::modp(&alg.trace(&alg.basis_vector(r)), p).is_zero())?;
    let b0 = alg.basis_vector(r0);
    let x0 = z.reduce_vec(&alg.scale(&b0, &z.inv(&alg.trace(&b0))?));
    let trace_free: Vec<Elem> = (0..4)
        .map(|r| {
            let b = alg.basis_vector(r);
            z.reduce_vec(&alg.sub(&b, &alg.scale(&x0, &alg.trace(&b))))
        })
        .collect();
    let mut dirs = trace_free.clone();
    for a in 0..4 {
        for b in a + 1..4 {
            for c in 1..4 {
                dirs.push(alg.add(&trace_free[a], &alg.scale(&trace_free[b], &int(c))));
            }
        }
    }
    let c0 = alg.norm(&x0);
    for y in dirs {
        let qa = arith::modp(&alg.norm(&y), p);
        let qb = arith::modp(&(alg.norm(&alg.add(&x0, &y)) - &qa - &c0), p);
        let qc = arith::modp(&c0, p);
        let t = if qa.is_zero() {
            if qb.is_zero() {
                if qc.is_zero() {
                    Some(Int::zero())
                } else {
                    None
                }
            } else {
                Some(arith::modp(&(-&qc * z.inv(&qb)?), p))
            }
        } else {
            let disc = arith::modp(&(&qb * &qb - &qa * &qc * 4u32), p);
            let inv2a = z.inv(&(&qa * 2u32))?;
            arith::sqrt_mod_prime(&disc, p).map(|s| arith::modp(&((s - &qb) * inv2a), p))
        };
        if let Some(t) = t {
            let e = z.reduce_vec(&alg.add(&x0, &alg.scale(&y, &t)));
            if is_idem(&e) {
                return Some(e);
            }
        }
    }
    None
}

/// Splitting map at a split quaternion prime: a rank-one idempotent mod `p`, lifted to `p^k`,
/// and the left action of `Λ` on `Λe`.
pub fn split_quaternion_residue(alg: &Algebra, p: &Int, k: u32) -> Result<SplittingMap> {
    if !alg.is_quaternion() || alg.classify_prime(p) != vec![Place::new(p.clone(), PlaceKind::Split)] {
        return Err(Error::Unsupported(format!("{p} is not a split quaternion prime")));
    }
    let fail = |what: &str| Error::LiftFailure(format!("{what} at p = {p}"));
    let z = ZModPk::new(p, k);
    let mut e = idempotent_mod_p(alg, p).ok_or_else(|| fail("no idempotent found"))?;
    for _ in 0..64 {
        let e2 = z.reduce_vec(&alg.mul(&e, &e));
        if e2 == z.reduce_vec(&e) {
            break;
        }
        let e3 = alg.mul(&e2, &e);
        e = z.reduce_vec(&alg.sub(&alg.scale(&e2, &int(3)), &alg.scale(&e3, &int(2))));
    }
    if z.reduce_vec(&alg.mul(&e, &e)) != e {
        return Err(fail("idempotent did not lift"));
    }
    let span: IMat = (0..4).map(|r| z.reduce_vec(&alg.mul(&alg.basis_vector(r), &e))).collect();
    let s = z.smith(&span);
    if z.smith_exponents(&span) != vec![0, 0, k, k] {
        return Err(fail("Λe is not free of rank 2"));
    }
    let left_span = z.mul_mat(&s.left, &span);
    let v: IMat = left_span[..2].to_vec();
    let mut images = Vec::new();
    for r in 0..4 {
        let mut img = zmat::zeros(2, 2);
        for (col, vi) in v.iter().enumerate() {
            let w = z.reduce_vec(&alg.mul(&alg.basis_vector(r), vi));
            let c = z.solve_left(&v, &w).ok_or_else(|| fail("Λe is not stable"))?;
            img[0][col] = c[0].clone();
            img[1][col] = c[1].clone();
        }
        images.push(img);
    }
    let flat: IMat = images
        .iter()
        .map(|m| vec![m[0][0].clone(), m[0][1].clone(), m[1][0].clone(), m[1][1].clone()])
        .collect();
    let inverse = z.inverse(&flat).ok_or_else(|| fail("splitting map is not bijective"))?;
    let map = SplittingMap {
        p: p.clone(),
        k,
        images,
        inverse,
    };
    for r in 0..4 {
        for s in 0..4 {
            let lhs = map.apply(&alg.mul(&alg.basis_vector(r), &alg.basis_vector(s)));
            let rhs = z.mul_mat(&map.images[r], &map.images[s]);
            if lhs != rhs {
                return Err(fail("splitting map is not multiplicative"));
            }
        }
    }
    if map.apply(&alg.one()) != zmat::identity(2) {
        return Err(fail("splitting map does not preserve 1"));
    }
    Ok(map)
}

/// Element of valuation one at a ramified prime.
pub fn uniformizer(alg: &Algebra, p: &Int) -> Elem {
    let mut bound = p.clone();
    loop {
        let mut found = None;
        lattice::for_each_short_vector(alg.norm_gram(), &bound, |x| {
            if arith::valuation_opt(&alg.norm(x), p) == Some(1) {
                found = Some(x.to_vec());
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        if let Some(x) = found {
            return x;
        }
        bound *= 4;
    }
}

// ---------------------------------------------------------------------------
// local Smith forms

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalSnf {
    pub place: Place,
    pub k: u32,
    pub invariants: Invariants,
    /// Left word including the diagonal units.
    pub left: TransvectionSeq,
    /// Right word; transvections only.
    pub right: TransvectionSeq,
}

/// `[Λ^n : row space of m]` as a Z-lattice index; errors if `m` does not have full column rank.
pub fn lattice_index(alg: &Algebra, m: &Mat) -> Result<Int> {
    let h = zmat::hnf(&m.restriction_of_scalars(alg));
    if h.len() != m.cols * alg.dim() {
        return Err(Error::Singular);
    }
    Ok(zmat::det(&h).abs())
}

fn check_place(alg: &Algebra, place: &Place) -> Result<()> {
    if !arith::is_prime(&place.p) || !alg.classify_prime(&place.p).contains(place) {
        return Err(Error::Unsupported(format!("{place} is not a place of this algebra")));
    }
    Ok(())
}

fn translate_ops<E>(ops: Vec<(usize, usize, E)>, side: Side, f: impl Fn(E) -> Elem) -> Vec<Transvection> {
    ops.into_iter()
        .map(|(i, j, a)| Transvection { side, i, j, a: f(a) })
        .collect()
}

/// Λ-words for a chronological list of 2n-level operations at a split quaternion place.
fn quaternion_ops(map: &SplittingMap, ops: Vec<(usize, usize, Int)>, side: Side, blocks: usize) -> Vec<Transvection> {
    let mut out = Vec::new();
    for (x, y, c) in ops {
        let (bi, al) = (x / 2, x % 2);
        let (bj, be) = (y / 2, y % 2);
        if bi != bj {
            out.push(Transvection {
                side,
                i: bi,
                j: bj,
                a: map.unit_matrix(al, be, &c),
            });
            continue;
        }
        // I + cE_{(i,α),(i,β)} = [I + cE_{(i,α),(o,0)}, I + E_{(o,0),(i,β)}] with o another block
        let o = (bi + 1) % blocks;
        let plus_a = Transvection { side, i: bi, j: o, a: map.unit_matrix(al, 0, &c) };
        let minus_a = Transvection { side, i: bi, j: o, a: map.unit_matrix(al, 0, &-&c) };
        let plus_b = Transvection { side, i: o, j: bi, a: map.unit_matrix(0, be, &Int::one()) };
        let minus_b = Transvection { side, i: o, j: bi, a: map.unit_matrix(0, be, &-Int::one()) };
        match side {
            Side::Left => out.extend([minus_b, minus_a, plus_b, plus_a]),
            Side::Right => out.extend([plus_a, plus_b, minus_a, minus_b]),
        }
    }
    out
}

fn sorted_pairs(v: &[u32]) -> Invariants {
    Invariants::Pairs(v.chunks(2).map(|c| [c[0], c[1]]).collect())
}

/// Local Smith form of `m` at `place`, computed modulo `p^k` with `k ≥ min_k`, raised until exact.
pub fn local_snf(alg: &Algebra, m: &Mat, place: &Place, min_k: u32) -> Result<LocalSnf> {
    check_place(alg, place)?;
    if alg.is_quaternion() && m.rows.min(m.cols) < 2 {
        return Err(Error::Unsupported("quaternion matrices need n >= 2".into()));
    }
    let p = &place.p;
    let index = lattice_index(alg, m)?;
    let mut k = min_k.max(arith::valuation(&index, p) + 2);
    for _ in 0..PRECISION_RETRIES {
        if let Some(s) = local_snf_at(alg, m, place, k)? {
            return Ok(s);
        }
        k *= 2;
    }
    Err(Error::PrecisionExhausted(p.clone()))
}

fn local_snf_at(alg: &Algebra, m: &Mat, place: &Place, k: u32) -> Result<Option<LocalSnf>> {
    let p = &place.p;
    let z = ZModPk::new(p, k);
    let (rows, cols) = (m.rows, m.cols);
    let (left_ops, right_ops, units, invariants) = match place.kind {
        PlaceKind::Inert | PlaceKind::Ramified => {
            let ring = OrderMod {
                alg,
                z: z.clone(),
                uniformizer: (place.kind == PlaceKind::Ramified).then(|| uniformizer(alg, p)),
            };
            let local = m.entries.iter().map(|r| r.iter().map(|x| z.reduce_vec(x)).collect()).collect();
            let Some(raw) = generic_smith(&ring, local) else { return Ok(None) };
            (
                translate_ops(raw.left, Side::Left, |a| a),
                translate_ops(raw.right, Side::Right, |a| a),
                raw.units,
                Invariants::Exponents(raw.exponents),
            )
        }
        PlaceKind::SplitFirst | PlaceKind::SplitSecond => {
            let chars = SplitCharacters::new(alg, p, k)?;
            let first = place.kind == PlaceKind::SplitFirst;
            let ring = Zpk { z: z.clone() };
            let local = m.entries.iter().map(|r| r.iter().map(|x| chars.eval(x, first)).collect()).collect();
            let Some(raw) = generic_smith(&ring, local) else { return Ok(None) };
            let pull = |c: Int, other: Int| if first { chars.pull_back(&c, &other) } else { chars.pull_back(&other, &c) };
            (
                translate_ops(raw.left, Side::Left, |a| pull(a, Int::zero())),
                translate_ops(raw.right, Side::Right, |a| pull(a, Int::zero())),
                raw.units.into_iter().map(|u| pull(u, Int::one())).collect(),
                Invariants::Exponents(raw.exponents),
            )
        }
        PlaceKind::Split => {
            let map = split_quaternion_residue(alg, p, k)?;
            let ring = Zpk { z: z.clone() };
            let mut local = vec![vec![Int::zero(); 2 * cols]; 2 * rows];
            for i in 0..rows {
                for j in 0..cols {
                    let img = map.apply(&m.entries[i][j]);
                    for a in 0..2 {
                        for b in 0..2 {
                            local[2 * i + a][2 * j + b] = img[a][b].clone();
                        }
                    }
                }
            }
            let Some(raw) = generic_smith(&ring, local) else { return Ok(None) };
            let units = raw
                .units
                .chunks(2)
                .map(|u| {
                    let mut y = zmat::zeros(2, 2);
                    y[0][0] = u[0].clone();
                    y[1][1] = u[1].clone();
                    map.pull_back(&y)
                })
                .collect();
            (
                quaternion_ops(&map, raw.left, Side::Left, rows),
                quaternion_ops(&map, raw.right, Side::Right, cols),
                units,
                sorted_pairs(&raw.exponents),
            )
        }
    };
    Ok(Some(LocalSnf {
        place: place.clone(),
        k,
        invariants,
        left: TransvectionSeq {
            side: Side::Left,
            p: p.clone(),
            k,
            ops: left_ops,
            units,
        },
        right: TransvectionSeq {
            side: Side::Right,
            p: p.clone(),
            k,
            ops: right_ops,
            units: Vec::new(),
        },
    }))
}

/// Image of a matrix in the local model used for `place` at precision `k`, flattened to integers.
pub fn local_image(alg: &Algebra, m: &Mat, place: &Place, k: u32) -> Result<IMat> {
    let p = &place.p;
    let z = ZModPk::new(p, k);
    Ok(match place.kind {
        PlaceKind::Inert | PlaceKind::Ramified => m
            .entries
            .iter()
            .map(|r| r.iter().flat_map(|x| z.reduce_vec(x)).collect())
            .collect(),
        PlaceKind::SplitFirst | PlaceKind::SplitSecond => {
            let chars = SplitCharacters::new(alg, p, k)?;
            let first = place.kind == PlaceKind::SplitFirst;
            m.entries.iter().map(|r| r.iter().map(|x| chars.eval(x, first)).collect()).collect()
        }
        PlaceKind::Split => {
            let map = split_quaternion_residue(alg, p, k)?;
            let mut out = vec![vec![Int::zero(); 2 * m.cols]; 2 * m.rows];
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
    })
}

impl LocalSnf {
    /// The diagonal normal form over `Λ`, entries `p^v` or `π^v` (identity-padded for extra rows).
    pub fn normal_form(&self, alg: &Algebra, rows: usize, cols: usize) -> Result<Mat> {
        let p = &self.place.p;
        let z = ZModPk::new(p, self.k);
        let mut out = Mat::zeros(alg, rows, cols);
        match (&self.place.kind, &self.invariants) {
            (PlaceKind::Split, Invariants::Pairs(pairs)) => {
                let map = split_quaternion_residue(alg, p, self.k)?;
                for (i, pr) in pairs.iter().enumerate() {
                    let mut y = zmat::zeros(2, 2);
                    y[0][0] = z.reduce(&arith::pow(p, pr[0]));
                    y[1][1] = z.reduce(&arith::pow(p, pr[1]));
                    out.entries[i][i] = map.pull_back(&y);
                }
            }
            (PlaceKind::SplitFirst | PlaceKind::SplitSecond, Invariants::Exponents(ex)) => {
                let chars = SplitCharacters::new(alg, p, self.k)?;
                for (i, &v) in ex.iter().enumerate() {
                    let c = z.reduce(&arith::pow(p, v));
                    out.entries[i][i] = if self.place.kind == PlaceKind::SplitFirst {
                        chars.pull_back(&c, &Int::one())
                    } else {
                        chars.pull_back(&Int::one(), &c)
                    };
                }
            }
            (PlaceKind::Ramified, Invariants::Exponents(ex)) => {
                let pi = uniformizer(alg, p);
                for (i, &v) in ex.iter().enumerate() {
                    let mut x = alg.one();
                    for _ in 0..v {
                        x = z.reduce_vec(&alg.mul(&x, &pi));
                    }
                    out.entries[i][i] = x;
                }
            }
            (PlaceKind::Inert, Invariants::Exponents(ex)) => {
                for (i, &v) in ex.iter().enumerate() {
                    out.entries[i][i] = alg.from_int(&z.reduce(&arith::pow(p, v)));
                }
            }
            _ => return Err(Error::Malformed(format!("invariants do not fit {}", self.place))),
        }
        Ok(out)
    }

    /// Replays both words on `m` and compares with the normal form in the local model.
    pub fn replays_on(&self, alg: &Algebra, m: &Mat) -> Result<bool> {
        let reduced = self.right.apply(alg, &self.left.apply(alg, m));
        let nf = self.normal_form(alg, m.rows, m.cols)?;
        let got = local_image(alg, &reduced, &self.place, self.k)?;
        let want = local_image(alg, &nf, &self.place, self.k)?;
        Ok(got == want)
    }
}

/// Places above the primes dividing the lattice index of `m`, ascending.
pub fn relevant_places(alg: &Algebra, m: &Mat) -> Result<Vec<Place>> {
    let index = lattice_index(alg, m)?;
    Ok(places_above(alg, &arith::primes_dividing(&index)))
}

pub fn places_above(alg: &Algebra, primes: &[Int]) -> Vec<Place> {
    let mut out: Vec<Place> = primes.iter().flat_map(|p| alg.classify_prime(p)).collect();
    out.sort();
    out.dedup();
    out
}

/// Nontrivial local invariants of `m` at every place.
pub fn local_profile(alg: &Algebra, m: &Mat) -> Result<Profile> {
    let mut places = Vec::new();
    for place in relevant_places(alg, m)? {
        let s = local_snf(alg, m, &place, 1)?;
        places.push(PlaceInvariants {
            place,
            invariants: s.invariants,
        });
    }
    Ok(Profile { n: m.cols, places }.normalized())
}

/// Exponents of the integer Smith form of the restriction of scalars, per prime.
pub fn restriction_of_scalars_snf(alg: &Algebra, m: &Mat) -> BTreeMap<Int, Vec<u32>> {
    let diag = zmat::smith_diagonal(&m.restriction_of_scalars(alg));
    let nonzero: Vec<&Int> = diag.iter().filter(|d| !d.is_zero()).collect();
    let mut out = BTreeMap::new();
    let mut primes: Vec<Int> = nonzero.iter().flat_map(|d| arith::primes_dividing(d)).collect();
    primes.sort();
    primes.dedup();
    for p in primes {
        let mut ex: Vec<u32> = nonzero.iter().map(|d| arith::valuation(d, &p)).collect();
        ex.sort();
        out.insert(p, ex);
    }
    out
}

/// What [`restriction_of_scalars_snf`] must return for a matrix with the given local profile.
pub fn predicted_ros_exponents(alg: &Algebra, profile: &Profile) -> BTreeMap<Int, Vec<u32>> {
    let d = alg.dim();
    let mut out = BTreeMap::new();
    for p in profile.primes() {
        let mut ex = Vec::new();
        let places = alg.classify_prime(&p);
        for place in &places {
            let inv = profile.get(place).cloned();
            match place.kind {
                PlaceKind::SplitFirst | PlaceKind::SplitSecond => {
                    let v = inv.map(|i| i.flat()).unwrap_or_else(|| vec![0; profile.n]);
                    ex.extend(v);
                }
                PlaceKind::Inert => {
                    let v = inv.map(|i| i.flat()).unwrap_or_else(|| vec![0; profile.n]);
                    ex.extend(v.iter().flat_map(|&w| [w, w]));
                }
                PlaceKind::Ramified => {
                    let v = inv.map(|i| i.flat()).unwrap_or_else(|| vec![0; profile.n]);
                    for w in v {
                        let (hi, lo) = (w.div_ceil(2), w / 2);
                        if d == 2 {
                            ex.extend([hi, lo]);
                        } else {
                            ex.extend([hi, hi, lo, lo]);
                        }
                    }
                }
                PlaceKind::Split => {
                    let v = inv.map(|i| i.flat()).unwrap_or_else(|| vec![0; 2 * profile.n]);
                    ex.extend(v.iter().flat_map(|&w| [w, w]));
                }
            }
        }
        ex.sort();
        out.insert(p, ex);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitting_map_is_multiplicative() {
        let alg = Algebra::hurwitz();
        for p in [3, 5, 7] {
            let map = split_quaternion_residue(&alg, &int(p), 3).unwrap();
            let x = vec![int(1), int(2), int(-3), int(4)];
            let img = map.apply(&x);
            let z = ZModPk::new(&int(p), 3);
            let det = z.reduce(&(&img[0][0] * &img[1][1] - &img[0][1] * &img[1][0]));
            assert_eq!(det, z.reduce(&alg.norm(&x)));
            assert_eq!(map.pull_back(&img), z.reduce_vec(&x));
        }
    }

    #[test]
    fn split_characters_of_gaussian_integers() {
        let alg = Algebra::quadratic(-1).unwrap();
        let ch = SplitCharacters::new(&alg, &int(5), 2).unwrap();
        let i = alg.basis_vector(1);
        let a = ch.eval(&i, true);
        assert_eq!(arith::modp(&(&a * &a + 1), &int(25)), int(0));
        assert_eq!(ch.eval(&ch.pull_back(&int(7), &int(3)), false), int(3));
    }
}
