use super::elim::{self, ReducedInvariants, Reduction};
use super::{multiplier, sign_flip, SymOp, SymWord};
use crate::algebra::{Algebra, Place, PlaceKind};
use crate::arith::{self, Int};
use crate::error::{Error, Result};
use crate::local::{self, Invariants, PlaceInvariants, Profile, Side, SplitCharacters};
use crate::matrix::Mat;
use crate::unimodular::{self, Existence};
use crate::zmat;
use crate::zmod::ZModPk;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

const PRECISION_RETRIES: u32 = 8;

/// First-`n` local invariants of a similitude together with its multiplier.
///
/// At split quadratic primes both places carry data: the first `n` exponents at `P` and at `ι(P)`.
#[serde_with::serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularProfile {
    #[serde_as(as = "crate::arith::JsonInt")]

    pub m: Int,
    #[serde(flatten)]
    pub profile: Profile,
}

fn check_similitude(alg: &Algebra, m: &Mat) -> Result<(usize, Int)> {
    let mult = multiplier(alg, m).ok_or(Error::NotSimilitude)?;
    let n = m.rows / 2;
    if alg.is_quaternion() && n < 2 {
        return Err(Error::Unsupported("quaternion similitudes need n >= 2".into()));
    }
    Ok((n, mult))
}

fn reduce_at(alg: &Algebra, m: &Mat, mult: &Int, place: &Place, min_k: u32) -> Result<Reduction> {
    let p = &place.p;
    let mut k = min_k.max(2 * arith::valuation(mult, p) + 3);
    for _ in 0..PRECISION_RETRIES {
        let r = match place.kind {
            PlaceKind::Inert | PlaceKind::Ramified => elim::dvr_reduce(alg, place, k, m, mult),
            PlaceKind::Split => {
                let map = local::split_quaternion_residue(alg, p, k)?;
                elim::morita_reduce(alg, &map, m, mult)?
            }
            PlaceKind::SplitFirst | PlaceKind::SplitSecond => {
                return Err(Error::Unsupported("split quadratic places reduce through GL_2n".into()))
            }
        };
        if let Some(r) = r {
            return Ok(r);
        }
        k *= 2;
    }
    Err(Error::PrecisionExhausted(p.clone()))
}

/// First-`n` invariants of a similitude at one place.
pub fn modular_local_eds(alg: &Algebra, m: &Mat, place: &Place) -> Result<Invariants> {
    let (n, mult) = check_similitude(alg, m)?;
    if !alg.classify_prime(&place.p).contains(place) {
        return Err(Error::Unsupported(format!("{place} is not a place of this algebra")));
    }
    Ok(match place.kind {
        PlaceKind::SplitFirst | PlaceKind::SplitSecond => {
            let s = local::local_snf(alg, m, place, 1)?;
            Invariants::Exponents(s.invariants.flat()[..n].to_vec())
        }
        _ => match reduce_at(alg, m, &mult, place, 1)?.invariants {
            ReducedInvariants::Exponents(v) => Invariants::Exponents(v),
            ReducedInvariants::Pairs(v) => Invariants::Pairs(v),
        },
    })
}

/// Reduction at an inert, ramified or split quaternion place: `left·m·right` is
/// `diag(e_1, …, e_n, m·ι(e_1)⁻¹, …)` with canonical `e_i`, modulo `p^k`.
pub fn modular_local_reduction(alg: &Algebra, m: &Mat, place: &Place) -> Result<(Invariants, SymWord, SymWord)> {
    let (_, mult) = check_similitude(alg, m)?;
    let r = reduce_at(alg, m, &mult, place, 1)?;
    let inv = match r.invariants {
        ReducedInvariants::Exponents(v) => Invariants::Exponents(v),
        ReducedInvariants::Pairs(v) => Invariants::Pairs(v),
    };
    Ok((inv, r.left, r.right))
}

/// Modular invariants at every place above a prime dividing the multiplier.
pub fn modular_profile(alg: &Algebra, m: &Mat) -> Result<ModularProfile> {
    let (n, mult) = check_similitude(alg, m)?;
    let mut places = Vec::new();
    for place in local::places_above(alg, &arith::primes_dividing(&mult)) {
        if place.kind == PlaceKind::SplitSecond {
            continue;
        }
        if place.kind == PlaceKind::SplitFirst {
            let mu = arith::valuation(&mult, &place.p);
            let first = local::local_snf(alg, m, &place, 1)?.invariants.flat();
            let conj = Place::new(place.p.clone(), PlaceKind::SplitSecond);
            let second = local::local_snf(alg, m, &conj, 1)?.invariants.flat();
            let mirrored: Vec<u32> = first.iter().rev().map(|&e| mu - e.min(mu)).collect();
            if second != mirrored || first.iter().any(|&e| e > mu) {
                return Err(Error::NotSimilitude);
            }
            places.push(PlaceInvariants {
                place,
                invariants: Invariants::Exponents(first[..n].to_vec()),
            });
            places.push(PlaceInvariants {
                place: conj,
                invariants: Invariants::Exponents(second[..n].to_vec()),
            });
            continue;
        }
        let invariants = modular_local_eds(alg, m, &place)?;
        places.push(PlaceInvariants { place, invariants });
    }
    let out = ModularProfile {
        m: mult,
        profile: Profile { n, places }.normalized(),
    };
    check_side_condition(alg, &out)?;
    Ok(out)
}

/// `ν_p(N(e_{p,n})) ≤ ν_p(m)` at every place, with both conjugate places counted at split quadratic primes.
pub fn check_side_condition(alg: &Algebra, mp: &ModularProfile) -> Result<()> {
    if mp.m.is_zero() {
        return Err(Error::SideCondition("multiplier is zero".into()));
    }
    for p in mp.profile.primes() {
        let mu = arith::valuation(&mp.m, &p);
        let mut norm_exponent = 0u32;
        for place in alg.classify_prime(&p) {
            let Some(inv) = mp.profile.get(&place) else { continue };
            norm_exponent += match (place.kind, inv) {
                (PlaceKind::Inert, Invariants::Exponents(v)) => 2 * v.last().copied().unwrap_or(0),
                (_, Invariants::Exponents(v)) => v.last().copied().unwrap_or(0),
                (_, Invariants::Pairs(v)) => v.last().map_or(0, |q| q[0] + q[1]),
            };
        }
        if norm_exponent > mu {
            return Err(Error::SideCondition(format!(
                "the last elementary divisor above {p} has norm exponent {norm_exponent} > {mu} = v_{p}(m)"
            )));
        }
    }
    Ok(())
}

/// Equality of multipliers up to sign and of modular profiles.
pub fn modular_equivalent(alg: &Algebra, a: &Mat, b: &Mat) -> Result<bool> {
    let (n, ma) = check_similitude(alg, a)?;
    let (n2, mb) = check_similitude(alg, b)?;
    if n != n2 {
        return Err(Error::DimensionMismatch(format!("{}x{} and {}x{}", a.rows, a.cols, b.rows, b.cols)));
    }
    if ma.abs() != mb.abs() {
        return Err(Error::MultiplierMismatch(ma, mb));
    }
    Ok(modular_profile(alg, a)?.profile == modular_profile(alg, b)?.profile)
}

// ---------------------------------------------------------------------------
// approximation

/// Transvections `I + cE_xy` of `GL_2n(Z_p)` acting on the component at the first place above a split prime.
#[serde_with::serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitWord {
    pub side: Side,
    #[serde_as(as = "crate::arith::JsonInt")]
    pub p: Int,
    pub k: u32,
    #[serde_as(as = "Vec<(_, _, crate::arith::JsonInt)>")]
    pub ops: Vec<(usize, usize, Int)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LocalWord {
    Symplectic(SymWord),
    Split(SplitWord),
}

impl LocalWord {
    fn prime_and_precision(&self) -> (&Int, u32, Side) {
        match self {
            LocalWord::Symplectic(w) => (&w.p, w.k, w.side),
            LocalWord::Split(w) => (&w.p, w.k, w.side),
        }
    }
}

fn lift(alg: &Algebra, parts: &[(Int, u32)], p: &Int, a: &[Int]) -> Result<Vec<Int>> {
    let targets: Vec<_> = parts
        .iter()
        .map(|(q, e)| (q.clone(), *e, if q == p { a.to_vec() } else { alg.zero() }))
        .collect();
    alg.crt_lift(&targets)
}

/// The global generator at a split prime whose `P`-component is `I + cE_xy`, lifted to be `≡ I` at the other primes.
fn lift_split_op(alg: &Algebra, chars: &SplitCharacters, parts: &[(Int, u32)], n: usize, x: usize, y: usize, c: &Int) -> Result<SymOp> {
    let paired = x % n == y % n && (x < n) != (y < n);
    let other = if paired { Int::one() } else { Int::zero() };
    let residue = chars.pull_back(c, &other);
    let a = lift(alg, parts, &chars.p, &residue)?;
    Ok(match (x < n, y < n) {
        (true, true) => SymOp::Psi { i: x, j: y, a },
        (false, false) => SymOp::Psi {
            i: y - n,
            j: x - n,
            a: alg.neg(&alg.involute(&a)),
        },
        (true, false) if paired => SymOp::Upper { i: x, j: x, a: alg.from_int(&alg.norm(&a)) },
        (true, false) => SymOp::Upper { i: x, j: y - n, a },
        (false, true) if paired => SymOp::Lower { i: y, j: y, a: alg.from_int(&alg.norm(&a)) },
        (false, true) => SymOp::Lower { i: x - n, j: y, a },
    })
}

/// Global element of `Sp_n(Λ)` congruent to the word modulo `p^{ν_p(modulus)}` and to `I` modulo
/// the other prime powers dividing `modulus`.
pub fn approximate_symplectic(alg: &Algebra, word: &LocalWord, n: usize, modulus: &Int) -> Result<Mat> {
    let (p, k, side) = word.prime_and_precision();
    let parts = arith::factor(modulus);
    let need = if modulus.is_zero() { 0 } else { arith::valuation(modulus, p) };
    if need == 0 {
        return Err(Error::Malformed(format!("{p} does not divide the modulus {modulus}")));
    }
    if need > k {
        return Err(Error::LiftFailure(format!("word known mod {p}^{k} but modulus needs exponent {need}")));
    }
    let mut u = Mat::identity(alg, 2 * n);
    match word {
        LocalWord::Symplectic(w) => {
            let z = ZModPk::new(p, k);
            if w.units.iter().any(|x| z.reduce_vec(x) != alg.one()) {
                return Err(Error::Unsupported("diagonal units are not products of symplectic transvections".into()));
            }
            for op in &w.ops {
                let global = op.with_param(lift(alg, &parts, p, op.param())?);
                if global.is_scalar_slot() && alg.as_integer(global.param()).is_none() {
                    return Err(Error::Malformed("diagonal-block generator needs an integer parameter".into()));
                }
                check_indices(&global, n)?;
                global.apply(alg, &mut u, side);
            }
        }
        LocalWord::Split(w) => {
            let chars = SplitCharacters::new(alg, p, need)?;
            for (x, y, c) in &w.ops {
                if x == y || *x >= 2 * n || *y >= 2 * n {
                    return Err(Error::Malformed(format!("transvection index ({x}, {y}) out of range")));
                }
                let op = lift_split_op(alg, &chars, &parts, n, *x, *y, c)?;
                op.apply(alg, &mut u, side);
            }
        }
    }
    Ok(u)
}

fn check_indices(op: &SymOp, n: usize) -> Result<()> {
    let (i, j) = match *op {
        SymOp::Psi { i, j, .. } => {
            if i == j {
                return Err(Error::Malformed("Psi needs i != j".into()));
            }
            (i, j)
        }
        SymOp::Upper { i, j, .. } | SymOp::Lower { i, j, .. } => (i, j),
    };
    if i >= n || j >= n {
        return Err(Error::Malformed(format!("generator index ({i}, {j}) out of range")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// recovery

/// Right word at `place` taking `m` to its local normal form.
fn right_word(alg: &Algebra, m: &Mat, mult: &Int, place: &Place, k: u32) -> Result<(Invariants, LocalWord)> {
    if place.kind == PlaceKind::SplitFirst {
        let s = local::local_snf(alg, m, place, k)?;
        let chars = SplitCharacters::new(alg, &place.p, s.k)?;
        let ops = s.right.ops.iter().map(|t| (t.i, t.j, chars.eval(&t.a, true))).collect();
        let word = SplitWord {
            side: Side::Right,
            p: place.p.clone(),
            k: s.k,
            ops,
        };
        return Ok((s.invariants, LocalWord::Split(word)));
    }
    let r = reduce_at(alg, m, mult, place, k)?;
    let inv = match r.invariants {
        ReducedInvariants::Exponents(v) => Invariants::Exponents(v),
        ReducedInvariants::Pairs(v) => Invariants::Pairs(v),
    };
    Ok((inv, LocalWord::Symplectic(r.right)))
}

/// `w1` followed by the inverse of `w2`, at the smaller of the two precisions.
fn compose_with_inverse(alg: &Algebra, w1: LocalWord, w2: LocalWord) -> Result<LocalWord> {
    Ok(match (w1, w2) {
        (LocalWord::Symplectic(mut a), LocalWord::Symplectic(b)) => {
            a.ops.extend(b.inverse_ops(alg));
            a.k = a.k.min(b.k);
            LocalWord::Symplectic(a)
        }
        (LocalWord::Split(mut a), LocalWord::Split(b)) => {
            a.ops.extend(b.ops.iter().rev().map(|(x, y, c)| (*x, *y, -c)));
            a.k = a.k.min(b.k);
            LocalWord::Split(a)
        }
        _ => return Err(Error::Malformed("words of different place types".into())),
    })
}

/// `(U, V)` in `Sp_n(Λ)` with `U·m·V = m2` exactly. If the multipliers differ by a sign, `U` has multiplier `−1`.
pub fn recover_modular_transform(alg: &Algebra, m: &Mat, m2: &Mat) -> Result<(Mat, Mat)> {
    let (n, ma) = check_similitude(alg, m)?;
    let (_, mb) = check_similitude(alg, m2)?;
    if !modular_equivalent(alg, m, m2)? {
        return Err(Error::NotEquivalent);
    }
    let flip = mb != ma;
    let target = if flip { sign_flip(alg, n).mul(alg, m2) } else { m2.clone() };
    let common = arith::lcm(&unimodular::scale(alg, m)?, &unimodular::scale(alg, &target)?);
    let mut exponent = 2 * n + 1;
    let mut last_err = Error::NotEquivalent;
    for _ in 0..3 {
        match recover_with_modulus(alg, m, &target, &ma, &common, exponent) {
            Ok((w, v)) => {
                let u = if flip { sign_flip(alg, n).mul(alg, &w) } else { w };
                return finish(alg, m, m2, u, v, flip);
            }
            Err(e) => last_err = e,
        }
        exponent *= 2;
    }
    Err(last_err)
}

fn recover_with_modulus(alg: &Algebra, m: &Mat, target: &Mat, mult: &Int, common: &Int, exponent: usize) -> Result<(Mat, Mat)> {
    let n = m.rows / 2;
    let modulus = num_traits::pow(common.clone(), exponent);
    let mut mhat = m.clone();
    let mut vacc = Mat::identity(alg, 2 * n);
    for place in local::places_above(alg, &arith::primes_dividing(common)) {
        if place.kind == PlaceKind::SplitSecond {
            continue;
        }
        let k = arith::valuation(&modulus, &place.p) + arith::valuation(mult, &place.p) + 1;
        let (i1, w1) = right_word(alg, &mhat, mult, &place, k)?;
        let (i2, w2) = right_word(alg, target, mult, &place, k)?;
        if i1 != i2 {
            return Err(Error::NotEquivalent);
        }
        let word = compose_with_inverse(alg, w1, w2)?;
        let v = approximate_symplectic(alg, &word, n, &modulus)?;
        mhat = mhat.mul(alg, &v);
        vacc = vacc.mul(alg, &v);
    }
    let w = unimodular::divide_right(alg, target, &mhat)?;
    Ok((w, vacc))
}

fn finish(alg: &Algebra, m: &Mat, m2: &Mat, u: Mat, v: Mat, flip: bool) -> Result<(Mat, Mat)> {
    let want_u = if flip { -Int::one() } else { Int::one() };
    if multiplier(alg, &u) != Some(want_u) || multiplier(alg, &v) != Some(Int::one()) {
        return Err(Error::LiftFailure("remaining factor is not symplectic".into()));
    }
    if u.mul(alg, m).mul(alg, &v) != *m2 {
        return Err(Error::LiftFailure("recovered transforms do not reproduce the target".into()));
    }
    Ok((u, v))
}

// ---------------------------------------------------------------------------
// block-diagonal form and existence

/// `diag(N, m·(N*)⁻¹)`; errors unless `m·(N*)⁻¹` is integral.
pub fn correspondence_inverse(alg: &Algebra, nmat: &Mat, m: &Int) -> Result<Mat> {
    if !nmat.is_square() {
        return Err(Error::DimensionMismatch("matrix is not square".into()));
    }
    if m.is_zero() {
        return Err(Error::SideCondition("multiplier is zero".into()));
    }
    let (s, adj) = nmat.star(alg).scale_and_adjugate(alg)?;
    let scaled = adj.scale(alg, m);
    let mut d = scaled.clone();
    for row in d.entries.iter_mut() {
        for x in row.iter_mut() {
            for c in x.iter_mut() {
                if !c.is_multiple_of(&s) {
                    return Err(Error::SideCondition(format!(
                        "m(N*)^-1 is not integral for m = {m}; some elementary divisor has norm not dividing m"
                    )));
                }
                *c = &*c / &s;
            }
        }
    }
    let out = Mat::block_diag(alg, nmat, &d);
    debug_assert_eq!(multiplier(alg, &out).as_ref(), Some(m));
    Ok(out)
}

/// An `N` with `m ~ diag(N, m·(N*)⁻¹)` under `Sp_n(Λ)` on both sides.
pub fn normalize_block_diagonal(alg: &Algebra, m: &Mat, candidate_limit: usize) -> Result<Mat> {
    let mp = modular_profile(alg, m)?;
    let nmat = unimodular::construct_with_eds(alg, &mp.profile, candidate_limit)?;
    let block = correspondence_inverse(alg, &nmat, &mp.m)?;
    if !modular_equivalent(alg, m, &block)? {
        return Err(Error::LiftFailure("block-diagonal form has a different modular profile".into()));
    }
    Ok(nmat)
}

/// Forward direction of the correspondence: a representative of the unimodular class attached to `m`.
pub fn correspondence(alg: &Algebra, m: &Mat, candidate_limit: usize) -> Result<Mat> {
    normalize_block_diagonal(alg, m, candidate_limit)
}

/// Whether some similitude has the given modular profile; the witness is `diag(N, m·(N*)⁻¹)`.
pub fn modular_exists_with_eds(alg: &Algebra, mp: &ModularProfile, candidate_limit: usize) -> Result<Existence> {
    mp.profile.validate(alg)?;
    check_side_condition(alg, mp)?;
    Ok(match unimodular::exists_with_eds(alg, &mp.profile, candidate_limit)? {
        Existence::Yes(nmat) => {
            let w = correspondence_inverse(alg, &nmat, &mp.m)?;
            if modular_profile(alg, &w)?.profile != mp.profile.clone().normalized() {
                return Err(Error::LiftFailure("witness has a different modular profile".into()));
            }
            Existence::Yes(w)
        }
        other => other,
    })
}

// ---------------------------------------------------------------------------
// pairs

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairReport {
    /// `AB* = BA*`.
    pub is_pair: bool,
    /// `(A B)` has trivial local elementary divisors everywhere.
    pub is_coprime: bool,
}

pub fn pair_predicates(alg: &Algebra, a: &Mat, b: &Mat) -> Result<PairReport> {
    if !a.is_square() || !b.is_square() || a.rows != b.rows {
        return Err(Error::DimensionMismatch("pair blocks must be square of equal size".into()));
    }
    let is_pair = a.mul(alg, &b.star(alg)) == b.mul(alg, &a.star(alg));
    let mut rows = a.entries.clone();
    for (r, x) in rows.iter_mut().zip(&b.entries) {
        r.extend(x.iter().cloned());
    }
    let ros = Mat::from_entries(rows).restriction_of_scalars(alg);
    let diag = zmat::smith_diagonal(&ros);
    let nonzero: Vec<&Int> = diag.iter().filter(|d| !d.is_zero()).collect();
    let is_coprime = nonzero.len() == a.rows * alg.dim() && nonzero.iter().all(|d| d.abs().is_one());
    Ok(PairReport { is_pair, is_coprime })
}

/// `A'B* = B'A*`.
pub fn is_associated(alg: &Algebra, a: &Mat, b: &Mat, a2: &Mat, b2: &Mat) -> bool {
    a2.mul(alg, &b.star(alg)) == b2.mul(alg, &a.star(alg))
}
