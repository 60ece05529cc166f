//! Equivalence `M' = UMV` with `U, V ∈ GL_n(Λ)`: decision, explicit transforms, and existence of
//! matrices with prescribed local elementary divisors.

use crate::algebra::{Algebra, Elem, Place, PlaceKind};
use crate::arith::{self, Int};
use crate::error::{Error, Result};
use crate::forms::{self, Form};
use crate::ideal::{self, LeftIdeal};
use crate::local::{self, Invariants, Profile, SplitCharacters, Transvection, TransvectionSeq};
use crate::matrix::Mat;
use crate::modules::{self, BasisSearch};
use crate::zmat;
use crate::zmod::ZModPk;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Yes,
    No,
    Inconclusive,
}

/// Smallest positive `m` with `m·M⁻¹` integral.
pub fn scale(alg: &Algebra, m: &Mat) -> Result<Int> {
    m.scale_of_inverse(alg)
}

fn check_square_pair(alg: &Algebra, a: &Mat, b: &Mat) -> Result<usize> {
    if !a.is_square() || !b.is_square() || a.rows != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    if alg.is_quaternion() && a.rows < 2 {
        return Err(Error::Unsupported("quaternion matrices need n >= 2".into()));
    }
    Ok(a.rows)
}

/// Equal local profiles at every place.
/// Tall matrices of equal shape are compared the same way.
pub fn unimodular_equivalent(alg: &Algebra, m: &Mat, m2: &Mat) -> Result<bool> {
    if !is_tall_pair(m, m2) {
        check_square_pair(alg, m, m2)?;
    }
    Ok(local::local_profile(alg, m)? == local::local_profile(alg, m2)?)
}

/// Global lift of a transvection word: `≡ word mod p^{ν_p(modulus)}`, `≡ I` modulo the other prime powers.
pub fn approximate_unimodular(alg: &Algebra, ops: &[Transvection], n: usize, p: &Int, modulus: &Int) -> Result<Mat> {
    if n < 2 {
        return Err(Error::Unsupported("transvection approximation needs n >= 2".into()));
    }
    let parts = arith::factor(modulus);
    let mut u = Mat::identity(alg, n);
    let side = ops.first().map(|t| t.side);
    for t in ops {
        if Some(t.side) != side {
            return Err(Error::Malformed("word mixes left and right transvections".into()));
        }
        if t.i == t.j || t.i >= n || t.j >= n {
            return Err(Error::Malformed(format!("transvection index ({}, {}) out of range", t.i, t.j)));
        }
        let targets: Vec<(Int, u32, Elem)> = parts
            .iter()
            .map(|(q, e)| (q.clone(), *e, if q == p { t.a.clone() } else { alg.zero() }))
            .collect();
        let a = alg.crt_lift(&targets)?;
        local::apply_transvection(
            alg,
            &mut u,
            &Transvection {
                side: t.side,
                i: t.i,
                j: t.j,
                a,
            },
        );
    }
    Ok(u)
}

/// Like [`approximate_unimodular`] for a recorded word; the diagonal unit part must be trivial.
pub fn approximate_seq(alg: &Algebra, seq: &TransvectionSeq, n: usize, modulus: &Int) -> Result<Mat> {
    let z = ZModPk::new(&seq.p, seq.k);
    if seq.units.iter().any(|u| z.reduce_vec(u) != alg.one()) {
        return Err(Error::Unsupported("diagonal units are not products of transvections".into()));
    }
    let need = if modulus.is_zero() { 0 } else { arith::valuation(modulus, &seq.p) };
    if need > seq.k {
        return Err(Error::LiftFailure(format!("word known mod {}^{} but modulus needs exponent {need}", seq.p, seq.k)));
    }
    approximate_unimodular(alg, &seq.ops, n, &seq.p, modulus)
}

fn is_tall_pair(a: &Mat, b: &Mat) -> bool {
    a.rows == b.rows && a.cols == b.cols && a.rows > a.cols
}

/// `(U, V)` in `GL_n(Λ)` with `U·m·V = m2` exactly. Tall `k×n` pairs get `U ∈ GL_k(Λ)`, `V ∈ GL_n(Λ)`.
pub fn recover_transform(alg: &Algebra, m: &Mat, m2: &Mat) -> Result<(Mat, Mat)> {
    if is_tall_pair(m, m2) {
        return recover_tall(alg, m, m2, modules::DEFAULT_CANDIDATE_LIMIT);
    }
    let n = check_square_pair(alg, m, m2)?;
    if !unimodular_equivalent(alg, m, m2)? {
        return Err(Error::NotEquivalent);
    }
    let common = arith::lcm(&scale(alg, m)?, &scale(alg, m2)?);
    if n == 1 {
        let w = divide_right(alg, m2, m)?;
        return finish(alg, m, m2, w, Mat::identity(alg, 1));
    }
    let modulus = num_traits::pow(common.clone(), n + 1);
    let mut mhat = m.clone();
    let mut vacc = Mat::identity(alg, n);
    for place in local::places_above(alg, &arith::primes_dividing(&common)) {
        let p = &place.p;
        let k = arith::valuation(&modulus, p);
        let s1 = local::local_snf(alg, &mhat, &place, k)?;
        let s2 = local::local_snf(alg, m2, &place, k)?;
        if s1.invariants != s2.invariants {
            return Err(Error::NotEquivalent);
        }
        let mut word = s1.right.ops.clone();
        word.extend(s2.right.inverse_word());
        let v = approximate_unimodular(alg, &word, n, p, &modulus)?;
        mhat = mhat.mul(alg, &v);
        vacc = vacc.mul(alg, &v);
    }
    let w = divide_right(alg, m2, &mhat)?;
    finish(alg, m, m2, w, vacc)
}

fn finish(alg: &Algebra, m: &Mat, m2: &Mat, u: Mat, v: Mat) -> Result<(Mat, Mat)> {
    if !u.is_unimodular(alg) || !v.is_unimodular(alg) {
        return Err(Error::LiftFailure("remaining factor is not unimodular".into()));
    }
    if u.mul(alg, m).mul(alg, &v) != *m2 {
        return Err(Error::LiftFailure("recovered transforms do not reproduce the target".into()));
    }
    Ok((u, v))
}

/// For a `k×n` matrix of full column rank: `U ∈ GL_k(Λ)` and a square `T` with `U·s = [T; 0]`.
/// Exists iff the row module of `s` is free; the kernel of `x ↦ x·s` is then stably free and
/// its basis fills the last `k − n` rows of `U`.
pub fn square_up(alg: &Algebra, s: &Mat, candidate_limit: usize) -> Result<(Mat, Mat)> {
    let (k, n) = (s.rows, s.cols);
    if k < n {
        return Err(Error::DimensionMismatch(format!("{k}x{n} has more columns than rows")));
    }
    if k == n {
        return Ok((Mat::identity(alg, n), s.clone()));
    }
    let ros = s.restriction_of_scalars(alg);
    let t = basis_or_fail(alg, modules::find_basis(alg, &ros, n, candidate_limit)?, "row module")?;
    let mut rows = Vec::with_capacity(k);
    for row in &t.entries {
        let target: Vec<Int> = row.iter().flatten().cloned().collect();
        let x = zmat::solve_left(&ros, &target).ok_or(Error::NotIntegral)?;
        rows.push(x.chunks(alg.dim()).map(|c| c.to_vec()).collect());
    }
    rows.extend(kernel_basis(alg, &ros, k, k - n, candidate_limit)?);
    let u = Mat::from_entries(rows);
    let mut want = t.entries.clone();
    want.extend(Mat::zeros(alg, k - n, n).entries);
    if !u.is_unimodular(alg) || u.mul(alg, s).entries != want {
        return Err(Error::LiftFailure("row transform for a tall matrix does not verify".into()));
    }
    Ok((u, t))
}

/// Λ-basis of `{x ∈ Λ^k : x·ros = 0}`, a rank-`r` module. Found on a coordinate projection
/// that is injective on it, then lifted back.
fn kernel_basis(alg: &Algebra, ros: &zmat::IMat, k: usize, r: usize, candidate_limit: usize) -> Result<Vec<Vec<Elem>>> {
    let d = alg.dim();
    let kernel = zmat::left_kernel(ros);
    for cols in subsets(k, r) {
        let projected: zmat::IMat = kernel
            .iter()
            .map(|row| cols.iter().flat_map(|&c| row[c * d..(c + 1) * d].iter().cloned()).collect())
            .collect();
        if zmat::rank(&projected) != r * d {
            continue;
        }
        let b = basis_or_fail(alg, modules::find_basis(alg, &projected, r, candidate_limit)?, "kernel")?;
        let mut out = Vec::with_capacity(r);
        for row in &b.entries {
            let target: Vec<Int> = row.iter().flatten().cloned().collect();
            let t = zmat::solve_left(&projected, &target).ok_or(Error::NotIntegral)?;
            out.push(zmat::vec_mul(&t, &kernel).chunks(d).map(|c| c.to_vec()).collect());
        }
        return Ok(out);
    }
    Err(Error::Singular)
}

fn basis_or_fail(alg: &Algebra, found: BasisSearch, what: &str) -> Result<Mat> {
    match found {
        BasisSearch::Found(b) => Ok(b),
        BasisSearch::Exhausted(k) => Err(Error::Inconclusive(Int::from(k))),
        BasisSearch::NotFree(i) if alg.is_quaternion() => {
            Err(Error::Inconclusive(Int::from(i.index())))
        }
        BasisSearch::NotFree(i) => Err(Error::ClassObstruction(format!("{what} is not free: {}", i.format(alg)))),
    }
}

fn recover_tall(alg: &Algebra, m: &Mat, m2: &Mat, candidate_limit: usize) -> Result<(Mat, Mat)> {
    if !unimodular_equivalent(alg, m, m2)? {
        return Err(Error::NotEquivalent);
    }
    let (k, n) = (m.rows, m.cols);
    let (u1, t1) = square_up(alg, m, candidate_limit)?;
    let (u2, t2) = square_up(alg, m2, candidate_limit)?;
    let (u, v) = recover_transform(alg, &t1, &t2)?;
    let u2_inv = u2.inverse_in_order(alg)?.ok_or_else(|| Error::LiftFailure("row transform not invertible".into()))?;
    let mid = Mat::block_diag(alg, &u, &Mat::identity(alg, k - n));
    finish(alg, m, m2, u2_inv.mul(alg, &mid).mul(alg, &u1), v)
}

/// `a·b⁻¹`, required to be integral.
pub fn divide_right(alg: &Algebra, a: &Mat, b: &Mat) -> Result<Mat> {
    let (s, adj) = b.scale_and_adjugate(alg)?;
    let prod = a.mul(alg, &adj);
    let mut out = prod.clone();
    for row in out.entries.iter_mut() {
        for x in row.iter_mut() {
            for c in x.iter_mut() {
                if !c.is_multiple_of(&s) {
                    return Err(Error::NotIntegral);
                }
                *c = &*c / &s;
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// elementary divisor ideals

/// Global left ideal whose localization at `place` is the `i`-th local elementary divisor and which is trivial elsewhere.
pub fn ideal_for_invariant(alg: &Algebra, place: &Place, inv: &Invariants, i: usize) -> Result<LeftIdeal> {
    let p = &place.p;
    let (generator, power): (Elem, u32) = match (place.kind, inv) {
        (PlaceKind::Inert, Invariants::Exponents(v)) => (alg.from_int(&arith::pow(p, v[i])), v[i]),
        (PlaceKind::Ramified, Invariants::Exponents(v)) => {
            let pi = local::uniformizer(alg, p);
            let mut x = alg.one();
            for _ in 0..v[i] {
                x = alg.mul(&x, &pi);
            }
            (x, v[i].div_ceil(2))
        }
        (PlaceKind::SplitFirst | PlaceKind::SplitSecond, Invariants::Exponents(v)) => {
            let chars = SplitCharacters::new(alg, p, v[i] + 1)?;
            let pv = arith::pow(p, v[i]);
            let x = if place.kind == PlaceKind::SplitFirst {
                chars.pull_back(&pv, &Int::one())
            } else {
                chars.pull_back(&Int::one(), &pv)
            };
            (x, v[i])
        }
        (PlaceKind::Split, Invariants::Pairs(v)) => {
            let [a, b] = v[i];
            let map = local::split_quaternion_residue(alg, p, b + 1)?;
            let mut y = crate::zmat::zeros(2, 2);
            y[0][0] = arith::pow(p, a);
            y[1][1] = arith::pow(p, b);
            (map.pull_back(&y), b)
        }
        _ => return Err(Error::InfeasibleProfile(format!("invariants do not fit {place}"))),
    };
    LeftIdeal::from_generators(alg, &[generator, alg.from_int(&arith::pow(p, power))])
}

/// The `n` global elementary divisor ideals realizing a profile.
pub fn ed_ideals(alg: &Algebra, profile: &Profile) -> Result<Vec<LeftIdeal>> {
    profile.validate(alg)?;
    let mut out = vec![LeftIdeal::unit(alg); profile.n];
    for e in &profile.places {
        for (i, slot) in out.iter_mut().enumerate() {
            let local = ideal_for_invariant(alg, &e.place, &e.invariants, i)?;
            if !local.is_unit_ideal() {
                *slot = slot.intersect(alg, &local)?;
            }
        }
    }
    Ok(out)
}

/// Determinantal divisors `d_i` (ideal of all `i×i` minors) and `e_i = d_i·d_{i−1}⁻¹`.
pub fn global_eds_quadratic(alg: &Algebra, m: &Mat) -> Result<Vec<LeftIdeal>> {
    if alg.is_quaternion() {
        return Err(Error::Unsupported("determinantal divisors need a commutative order".into()));
    }
    if !m.is_square() {
        return Err(Error::DimensionMismatch("matrix is not square".into()));
    }
    let n = m.rows;
    if alg.is_zero(&m.det_commutative(alg)) {
        return Err(Error::Singular);
    }
    let mut prev = LeftIdeal::unit(alg);
    let mut out = Vec::new();
    for size in 1..=n {
        let mut gens = Vec::new();
        for rows in subsets(n, size) {
            for cols in subsets(n, size) {
                let d = m.minor(&rows, &cols).det_commutative(alg);
                if !alg.is_zero(&d) {
                    gens.push(d);
                }
            }
        }
        let d_i = LeftIdeal::from_generators(alg, &gens)?;
        out.push(ideal::quotient_commutative(alg, &d_i, &prev)?);
        prev = d_i;
    }
    Ok(out)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

// ---------------------------------------------------------------------------
// existence

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassWitness {
    /// Generator of the product of the ideals (commutative case).
    Generator(Elem),
    /// Basis of the direct sum of the ideals.
    Basis(Mat),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassSum {
    Trivial(ClassWitness),
    /// The product ideal lies in the class of this reduced form.
    Nontrivial(Form),
    Inconclusive { candidates: usize },
}

/// Whether `e_1 ⊕ … ⊕ e_n` is free.
pub fn class_sum_is_trivial(alg: &Algebra, eds: &[LeftIdeal], n: usize, candidate_limit: usize) -> Result<ClassSum> {
    if eds.len() != n {
        return Err(Error::DimensionMismatch(format!("{} ideals for rank {n}", eds.len())));
    }
    if !alg.is_quaternion() {
        let mut prod = LeftIdeal::unit(alg);
        for e in eds {
            prod = ideal::product_commutative(alg, &prod, e)?;
        }
        return Ok(match prod.is_principal(alg) {
            Some(g) => ClassSum::Trivial(ClassWitness::Generator(g)),
            None => ClassSum::Nontrivial(forms::form_of_ideal(alg, &prod)?.reduce()),
        });
    }
    if n < 2 {
        return Err(Error::Unsupported("quaternion class test needs n >= 2".into()));
    }
    let rows = modules::direct_sum_rows(alg, eds);
    Ok(match modules::find_basis(alg, &rows, n, candidate_limit)? {
        BasisSearch::Found(m) => ClassSum::Trivial(ClassWitness::Basis(m)),
        BasisSearch::Exhausted(k) => ClassSum::Inconclusive { candidates: k },
        BasisSearch::NotFree(_) => ClassSum::Inconclusive { candidates: candidate_limit },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Existence {
    Yes(Mat),
    No(Form),
    Inconclusive { candidates: usize },
}

impl Existence {
    pub fn decision(&self) -> Decision {
        match self {
            Existence::Yes(_) => Decision::Yes,
            Existence::No(_) => Decision::No,
            Existence::Inconclusive { .. } => Decision::Inconclusive,
        }
    }
}

/// Decides whether some `n×n` matrix has the given local profile and builds one if so.
pub fn exists_with_eds(alg: &Algebra, profile: &Profile, candidate_limit: usize) -> Result<Existence> {
    let n = profile.n;
    if n == 0 {
        return Err(Error::InfeasibleProfile("n must be positive".into()));
    }
    if alg.is_quaternion() && n < 2 {
        return Err(Error::Unsupported("quaternion existence needs n >= 2".into()));
    }
    let eds = ed_ideals(alg, profile)?;
    if let ClassSum::Nontrivial(f) = class_sum_is_trivial(alg, &eds, n, candidate_limit)? {
        return Ok(Existence::No(f));
    }
    let rows = modules::direct_sum_rows(alg, &eds);
    let m = match modules::find_basis(alg, &rows, n, candidate_limit)? {
        BasisSearch::Found(m) => m,
        BasisSearch::Exhausted(k) => return Ok(Existence::Inconclusive { candidates: k }),
        BasisSearch::NotFree(i) => {
            if alg.is_quaternion() {
                return Ok(Existence::Inconclusive { candidates: candidate_limit });
            }
            return Ok(Existence::No(forms::form_of_ideal(alg, &i)?.reduce()));
        }
    };
    if local::local_profile(alg, &m)? != profile.clone().normalized() {
        return Err(Error::LiftFailure("constructed matrix has a different profile".into()));
    }
    Ok(Existence::Yes(m))
}

pub fn construct_with_eds(alg: &Algebra, profile: &Profile, candidate_limit: usize) -> Result<Mat> {
    match exists_with_eds(alg, profile, candidate_limit)? {
        Existence::Yes(m) => Ok(m),
        Existence::No(f) => Err(Error::ClassObstruction(format!(
            "the product of the elementary divisors lies in the class of ({}, {}, {})",
            f.a, f.b, f.c
        ))),
        Existence::Inconclusive { candidates } => Err(Error::Inconclusive(Int::from(candidates))),
    }
}

#[derive(Debug, Clone)]
pub struct PrimePart {
    pub p: Int,
    pub profile: Profile,
    pub ideals: Vec<LeftIdeal>,
    pub outcome: Existence,
}

#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub parts: Vec<PrimePart>,
}

impl DecompositionReport {
    /// Primes whose isolated part admits no matrix.
    pub fn failing_primes(&self) -> Vec<Int> {
        self.parts
            .iter()
            .filter(|x| x.outcome.decision() == Decision::No)
            .map(|x| x.p.clone())
            .collect()
    }
}

/// Runs the existence test on each prime-isolated part of the profile of `m`.
pub fn primary_decomposition_obstruction(alg: &Algebra, m: &Mat, candidate_limit: usize) -> Result<DecompositionReport> {
    let profile = local::local_profile(alg, m)?;
    let mut parts = Vec::new();
    for p in profile.primes() {
        let sub = profile.restrict_to_prime(&p);
        let ideals = ed_ideals(alg, &sub)?;
        let outcome = exists_with_eds(alg, &sub, candidate_limit)?;
        parts.push(PrimePart {
            p,
            profile: sub,
            ideals,
            outcome,
        });
    }
    Ok(DecompositionReport { parts })
}

/// `true` if every entry is a unit multiple of the identity pattern, i.e. `m` is diagonal.
pub fn is_diagonal(alg: &Algebra, m: &Mat) -> bool {
    (0..m.rows).all(|i| (0..m.cols).all(|j| i == j || alg.is_zero(&m.entries[i][j])))
}

/// Whether `m` is equivalent to some diagonal matrix: all its elementary divisors must be principal.
/// Returns the first non-principal divisor otherwise.
pub fn diagonal_form(alg: &Algebra, m: &Mat) -> Result<std::result::Result<Mat, LeftIdeal>> {
    let profile = local::local_profile(alg, m)?;
    let eds = ed_ideals(alg, &profile)?;
    let mut diag = Vec::new();
    for e in &eds {
        match e.is_principal(alg) {
            Some(g) => diag.push(g),
            None => return Ok(Err(e.clone())),
        }
    }
    Ok(Ok(Mat::diag(alg, &diag)))
}
