//! Right cosets `gSp_n(Λ)` inside a double coset `Sp_n(Λ) M Sp_n(Λ)`, quadratic algebras only.
//!
//! A right coset is determined by the lattice `gΛ^2n`, which lies between `mΛ^2n` and `Λ^2n`.
//! The orbit of `MΛ^2n` under the symplectic generators is walked modulo `m`; each lattice carries
//! the exact group element that reached it, so representatives are `γM`.

use super::{multiplier, SymOp};
use crate::algebra::{Algebra, Elem};
use crate::arith::{self, Int};
use crate::error::{Error, Result};
use crate::local::{self, Invariants};
use crate::matrix::Mat;
use crate::zmat::{self, IMat};
use crate::Place;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap, VecDeque};

/// Upper limit on lattices visited by either enumeration unless the caller passes its own.
pub const DEFAULT_COSET_BOUND: usize = 20_000;

/// Lattices are kept as row HNFs over `Z`; coordinate `i·d + c` is basis element `c` of entry `i`.
pub type CosetLattice = IMat;

fn check_quadratic(alg: &Algebra, m: &Mat) -> Result<Int> {
    if alg.is_quaternion() {
        return Err(Error::Unsupported("right cosets are enumerated for quadratic algebras only".into()));
    }
    let mu = multiplier(alg, m).ok_or_else(|| Error::NotSimilitude)?;
    if mu.is_negative() {
        return Err(Error::Unsupported("negative multiplier".into()));
    }
    Ok(mu)
}

fn flatten(v: &[Elem]) -> Vec<Int> {
    v.iter().flatten().cloned().collect()
}

fn unflatten(alg: &Algebra, v: &[Int]) -> Vec<Elem> {
    v.chunks(alg.dim()).map(|c| c.to_vec()).collect()
}

fn with_modulus(alg: &Algebra, rows: impl IntoIterator<Item = Vec<Int>>, size: usize, m: &Int) -> CosetLattice {
    let mut all: IMat = rows.into_iter().map(|r| r.iter().map(|x| x.mod_floor(m)).collect()).collect();
    let width = size * alg.dim();
    for i in 0..width {
        let mut e = vec![Int::zero(); width];
        e[i] = m.clone();
        all.push(e);
    }
    zmat::hnf(&all)
}

/// `gΛ^2n` for a similitude `g` of multiplier `m`; it always contains `mΛ^2n`.
pub fn coset_lattice(alg: &Algebra, g: &Mat, m: &Int) -> CosetLattice {
    let rows = (0..g.cols).flat_map(|j| {
        (0..alg.dim()).map(move |c| {
            let b = alg.basis_vector(c);
            flatten(&(0..g.rows).map(|i| alg.mul(&g.entries[i][j], &b)).collect::<Vec<_>>())
        })
    });
    with_modulus(alg, rows.collect::<Vec<_>>(), g.rows, m)
}

fn act(alg: &Algebra, g: &Mat, lattice: &CosetLattice, m: &Int) -> CosetLattice {
    let rows = lattice.iter().map(|r| {
        let v = unflatten(alg, r);
        let w: Vec<Elem> = (0..g.rows)
            .map(|i| {
                let mut acc = alg.zero();
                for (j, x) in v.iter().enumerate() {
                    acc = alg.add(&acc, &alg.mul(&g.entries[i][j], x));
                }
                acc
            })
            .collect();
        flatten(&w)
    });
    with_modulus(alg, rows.collect::<Vec<_>>(), g.rows, m)
}

fn generators(alg: &Algebra, n: usize) -> Vec<Mat> {
    let mut ops = Vec::new();
    for c in 0..alg.dim() {
        let b = alg.basis_vector(c);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    ops.push(SymOp::Psi { i, j, a: b.clone() });
                }
                if i < j {
                    ops.push(SymOp::Upper { i, j, a: b.clone() });
                    ops.push(SymOp::Lower { i, j, a: b.clone() });
                }
            }
        }
    }
    for i in 0..n {
        ops.push(SymOp::Upper { i, j: i, a: alg.one() });
        ops.push(SymOp::Lower { i, j: i, a: alg.one() });
    }
    let mut gens: Vec<Mat> = ops.iter().map(|op| op.matrix(alg, n)).collect();
    // ψ(diag(u)) = diag(u, ι(u)^-1) = diag(u, u) for a unit of a quadratic order
    for u in alg.units() {
        if u == alg.one() {
            continue;
        }
        for i in 0..n {
            let mut g = Mat::identity(alg, 2 * n);
            g.entries[i][i] = u.clone();
            g.entries[n + i][n + i] = u.clone();
            gens.push(g);
        }
    }
    gens
}

/// Right-coset representatives of the double coset of `m`, one per lattice, in a fixed order.
pub fn right_cosets_of(alg: &Algebra, m: &Mat, bound: usize) -> Result<Vec<Mat>> {
    let mu = check_quadratic(alg, m)?;
    let n = m.rows / 2;
    let gens = generators(alg, n);
    let start = coset_lattice(alg, m, &mu);
    let mut seen: HashMap<CosetLattice, Mat> = HashMap::new();
    seen.insert(start.clone(), Mat::identity(alg, 2 * n));
    let mut queue = VecDeque::from([start]);
    while let Some(lat) = queue.pop_front() {
        let gamma = seen[&lat].clone();
        for g in &gens {
            let next = act(alg, g, &lat, &mu);
            if seen.contains_key(&next) {
                continue;
            }
            if seen.len() >= bound {
                return Err(Error::BoundExceeded(format!("more than {bound} right cosets")));
            }
            seen.insert(next.clone(), g.mul(alg, &gamma));
            queue.push_back(next);
        }
    }
    let mut reps: Vec<(String, Mat)> = seen
        .into_values()
        .map(|gamma| {
            let r = gamma.mul(alg, m);
            (serde_json::to_string(&r.entries).expect("entries serialize"), r)
        })
        .collect();
    reps.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(reps.into_iter().map(|(_, r)| r).collect())
}

/// Right cosets of the double coset with the given profile, starting from a realizing similitude.
pub fn enumerate_right_cosets(alg: &Algebra, profile: &super::ModularProfile, bound: usize) -> Result<Vec<Mat>> {
    if alg.is_quaternion() {
        return Err(Error::Unsupported("right cosets are enumerated for quadratic algebras only".into()));
    }
    match super::modular_exists_with_eds(alg, profile, crate::modules::DEFAULT_CANDIDATE_LIMIT)? {
        crate::unimodular::Existence::Yes(w) => right_cosets_of(alg, &w, bound),
        crate::unimodular::Existence::No(reason) => Err(Error::SideCondition(format!("profile is not realized: {reason:?}"))),
        crate::unimodular::Existence::Inconclusive { candidates } => {
            Err(Error::BoundExceeded(format!("no realizing similitude among {candidates} candidates")))
        }
    }
}

/// `g1 Sp = g2 Sp`.
pub fn same_right_coset(alg: &Algebra, g1: &Mat, g2: &Mat) -> Result<bool> {
    let m1 = check_quadratic(alg, g1)?;
    let m2 = check_quadratic(alg, g2)?;
    Ok(m1 == m2 && coset_lattice(alg, g1, &m1) == coset_lattice(alg, g2, &m2))
}

// ---------------------------------------------------------------------------
// brute force over the residue ring

fn reduces_to_zero(h: &CosetLattice, v: &[Int]) -> bool {
    let mut v = v.to_vec();
    for row in h {
        let c = row.iter().position(|x| !x.is_zero()).expect("hnf rows are nonzero");
        if v[c].is_zero() {
            continue;
        }
        let (q, r) = v[c].div_mod_floor(&row[c]);
        if !r.is_zero() {
            return false;
        }
        for (x, y) in v.iter_mut().zip(row) {
            *x -= &q * y;
        }
    }
    v.iter().all(Zero::is_zero)
}

fn is_stable(alg: &Algebra, h: &CosetLattice) -> bool {
    (1..alg.dim()).all(|c| {
        let b = alg.basis_vector(c);
        h.iter().all(|r| {
            let w: Vec<Elem> = unflatten(alg, r).iter().map(|x| alg.mul(&b, x)).collect();
            reduces_to_zero(h, &flatten(&w))
        })
    })
}

fn pairing(alg: &Algebra, x: &[Elem], y: &[Elem]) -> Elem {
    let n = x.len() / 2;
    let mut acc = alg.zero();
    for i in 0..n {
        acc = alg.add(&acc, &alg.mul(&alg.involute(&x[i]), &y[n + i]));
        acc = alg.sub(&acc, &alg.mul(&alg.involute(&x[n + i]), &y[i]));
    }
    acc
}

/// `⟨x, y⟩ ∈ mΛ` on the whole lattice and `⟨x, x⟩ ∈ m{t − ι(t)}` on a basis. The second
/// condition holds for `gΛ^2n` because `⟨gy, gy⟩ = m⟨y, y⟩`; it extends to all of `L` since
/// `⟨x, y⟩ + ⟨y, x⟩ = s − ι(s)` for `s = ⟨x, y⟩`.
fn is_isotropic(alg: &Algebra, h: &CosetLattice, m: &Int) -> bool {
    let traceless = zmat::hnf(
        &(0..alg.dim())
            .map(|c| {
                let b = alg.basis_vector(c);
                alg.sub(&b, &alg.involute(&b))
            })
            .collect::<IMat>(),
    );
    let vs: Vec<Vec<Elem>> = h.iter().map(|r| unflatten(alg, r)).collect();
    vs.iter().enumerate().all(|(a, x)| {
        let own = pairing(alg, x, x);
        own.iter().all(|c| c.is_multiple_of(m))
            && reduces_to_zero(&traceless, &own.iter().map(|c| c / m).collect::<Vec<_>>())
            && vs[a + 1..]
                .iter()
                .all(|y| pairing(alg, x, y).iter().all(|c| c.is_multiple_of(m)))
    })
}

/// Elementary divisors of `Λ^2n / L` at each place above the primes of `m`.
fn lattice_type(alg: &Algebra, h: &CosetLattice, m: &Int) -> Result<BTreeMap<Place, Invariants>> {
    let gens = Mat::from_entries(h.iter().map(|r| unflatten(alg, r)).collect());
    let mut out = BTreeMap::new();
    for place in local::places_above(alg, &arith::primes_dividing(m)) {
        let s = local::local_snf(alg, &gens, &place, 1)?;
        out.insert(place, s.invariants);
    }
    Ok(out)
}

fn for_each_hnf(diag: &[Int], f: &mut impl FnMut(&IMat)) {
    let size = diag.len();
    let mut h = zmat::zeros(size, size);
    for (i, d) in diag.iter().enumerate() {
        h[i][i] = d.clone();
    }
    let slots: Vec<(usize, usize)> = (0..size)
        .flat_map(|i| (i + 1..size).map(move |j| (i, j)))
        .filter(|&(_, j)| !diag[j].is_one())
        .collect();
    fn rec(h: &mut IMat, slots: &[(usize, usize)], diag: &[Int], f: &mut impl FnMut(&IMat)) {
        let Some((&(i, j), rest)) = slots.split_first() else {
            f(h);
            return;
        };
        let mut a = Int::zero();
        while a < diag[j] {
            h[i][j] = a.clone();
            rec(h, rest, diag, f);
            a += 1;
        }
        h[i][j] = Int::zero();
    }
    rec(&mut h, &slots, diag, f);
}

fn diagonals(divisors: &[Int], size: usize, target: &Int) -> Vec<Vec<Int>> {
    if size == 0 {
        return if target.is_one() { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for d in divisors.iter().filter(|d| target.is_multiple_of(d)) {
        for mut rest in diagonals(divisors, size - 1, &(target / d)) {
            rest.insert(0, d.clone());
            out.push(rest);
        }
    }
    out
}

/// Number of lattices `mΛ^2n ⊆ L ⊆ Λ^2n` that are Λ-stable, isotropic for `x*Jy` modulo `m`,
/// of index `m^2n` and with the same local elementary divisors as `MΛ^2n`.
pub fn brute_force_coset_count(alg: &Algebra, m: &Mat, bound: usize) -> Result<usize> {
    let mu = check_quadratic(alg, m)?;
    let size = m.rows * alg.dim();
    let want = lattice_type(alg, &coset_lattice(alg, m, &mu), &mu)?;
    let divisors: Vec<Int> = (1..=arith::to_i64(&mu).ok_or_else(|| Error::BoundExceeded("multiplier too large".into()))?)
        .map(Int::from)
        .filter(|d| mu.is_multiple_of(d))
        .collect();
    let index = arith::pow(&mu, m.rows as u32);
    let diags = diagonals(&divisors, size, &index);
    let mut work = Int::zero();
    for diag in &diags {
        let mut c = Int::one();
        for (j, d) in diag.iter().enumerate() {
            c *= num_traits::pow(d.clone(), j);
        }
        work += c;
    }
    if work > Int::from(bound) * 1000 {
        return Err(Error::BoundExceeded(format!("{work} candidate lattices")));
    }
    let units: Vec<Vec<Int>> = (0..size)
        .map(|i| {
            let mut e = vec![Int::zero(); size];
            e[i] = mu.clone();
            e
        })
        .collect();
    let mut count = 0usize;
    let mut failure = None;
    for diag in &diags {
        for_each_hnf(diag, &mut |h| {
            if failure.is_some()
                || !units.iter().all(|e| reduces_to_zero(h, e))
                || !is_stable(alg, h)
                || !is_isotropic(alg, h, &mu)
            {
                return;
            }
            match lattice_type(alg, h, &mu) {
                Ok(t) if t == want => count += 1,
                Ok(_) => {}
                Err(e) => failure = Some(e),
            }
        });
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(count),
    }
}
