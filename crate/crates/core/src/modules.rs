//! Bases of locally free lattices `L ⊂ Λ^n`.
//!
//! A primitive vector `r ∈ L` with `L ∩ Ωr = Λr` splits off: `L ≅ Λr ⊕ f(L)` for a left-linear
//! `f` with kernel `Ωr`. Repeating this reduces freeness of `L` to principality of a single
//! left ideal. Over a commutative order the final ideal class does not depend on the choices;
//! over a quaternion order it can, so the last step searches over candidates.

use crate::algebra::{Algebra, Elem};
use crate::arith::Int;
use crate::error::Result;
use crate::ideal::LeftIdeal;
use crate::lattice;
use crate::matrix::Mat;
use crate::zmat::{self, IMat};
use num_integer::Integer;
use num_traits::Zero;
use std::collections::HashSet;
use std::ops::ControlFlow;

/// Default number of splitting vectors tried at the final step of a quaternion search.
pub const DEFAULT_CANDIDATE_LIMIT: usize = 400;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisSearch {
    /// Rows form a basis of the lattice.
    Found(Mat),
    /// The residual rank-one ideal is not principal; for commutative orders this proves `L` is not free.
    NotFree(LeftIdeal),
    /// The candidate limit was reached without a decision.
    Exhausted(usize),
}

/// `Σ_j (P / N_j)·N(u_j)` with `N_j` the norm of the projection of `basis` to coordinate `j` and
/// `P` their lcm. Unweighted, a lattice like `Λ ⊕ I` with `N(I)` large has about `N(I)²` vectors
/// `(x, 0)` below its first vector that can split off.
fn weighted_norms_gram(alg: &Algebra, basis: &IMat, n: usize) -> Result<IMat> {
    let d = alg.dim();
    let g = alg.norm_gram();
    let mut norms = Vec::with_capacity(n);
    for b in 0..n {
        let proj: IMat = basis.iter().map(|row| row[b * d..(b + 1) * d].to_vec()).collect();
        norms.push(LeftIdeal::from_lattice_rows(alg, &proj)?.norm(alg));
    }
    let p = norms.iter().fold(Int::from(1), |acc, x| acc.lcm(x));
    let mut out = zmat::zeros(d * n, d * n);
    for (b, nb) in norms.iter().enumerate() {
        let w = &p / nb;
        for r in 0..d {
            for s in 0..d {
                out[b * d + r][b * d + s] = &w * &g[r][s];
            }
        }
    }
    Ok(out)
}

fn split(v: &[Int], d: usize) -> Vec<Elem> {
    v.chunks(d).map(|c| c.to_vec()).collect()
}

/// Integer matrix of `u ↦ (N(r_{j0}) u_j − u_{j0} ι(r_{j0}) r_j)_{j ≠ j0}`.
fn splitting_map(alg: &Algebra, r: &[Elem], j0: usize) -> IMat {
    let d = alg.dim();
    let n = r.len();
    let nrm = alg.norm(&r[j0]);
    let conj = alg.involute(&r[j0]);
    let others: Vec<usize> = (0..n).filter(|&j| j != j0).collect();
    let mut f = zmat::zeros(d * n, d * (n - 1));
    for (col, &j) in others.iter().enumerate() {
        for t in 0..d {
            f[j * d + t][col * d + t] = nrm.clone();
        }
        let w = alg.mul(&conj, &r[j]);
        let rw = alg.right_mult_matrix(&w);
        for t in 0..d {
            for s in 0..d {
                f[j0 * d + t][col * d + s] = -&rw[t][s];
            }
        }
    }
    f
}

struct Split {
    image: IMat,
    /// `basis · f`, used to lift image vectors back into `L`.
    basis_f: IMat,
}

fn try_split(alg: &Algebra, basis: &IMat, r: &[Int], n: usize) -> Option<Split> {
    let d = alg.dim();
    let parts = split(r, d);
    let j0 = parts.iter().position(|x| !alg.is_zero(x))?;
    let f = splitting_map(alg, &parts, j0);
    let basis_f = zmat::mul(basis, &f);
    let ker = zmat::left_kernel(&basis_f);
    let ker_rows: IMat = ker.iter().map(|t| zmat::vec_mul(t, basis)).collect();
    let span_r: IMat = (0..d)
        .map(|s| {
            let b = alg.basis_vector(s);
            parts.iter().flat_map(|x| alg.mul(&b, x)).collect()
        })
        .collect();
    if zmat::hnf(&ker_rows) != zmat::hnf(&span_r) {
        return None;
    }
    let image = zmat::hnf(&basis_f);
    if image.len() != d * (n - 1) {
        return None;
    }
    Some(Split { image, basis_f })
}

fn lift(split: &Split, basis: &IMat, rows: &[Vec<Int>]) -> Option<Vec<Vec<Int>>> {
    rows.iter()
        .map(|s| zmat::solve_left(&split.basis_f, s).map(|t| zmat::vec_mul(&t, basis)))
        .collect()
}

/// Searches for a Λ-basis of the lattice spanned by `rows` (each of length `dim·n`).
pub fn find_basis(alg: &Algebra, rows: &IMat, n: usize, candidate_limit: usize) -> Result<BasisSearch> {
    let basis = zmat::hnf(rows);
    if basis.len() != alg.dim() * n {
        return Err(crate::error::Error::Singular);
    }
    Ok(match search(alg, &basis, n, candidate_limit)? {
        Outcome::Found(vs) => Outcome::found_matrix(alg, vs),
        Outcome::NotFree(i) => BasisSearch::NotFree(i),
        Outcome::Exhausted(k) => BasisSearch::Exhausted(k),
    })
}

enum Outcome {
    Found(Vec<Vec<Int>>),
    NotFree(LeftIdeal),
    Exhausted(usize),
}

impl Outcome {
    fn found_matrix(alg: &Algebra, vs: Vec<Vec<Int>>) -> BasisSearch {
        let d = alg.dim();
        BasisSearch::Found(Mat::from_entries(vs.iter().map(|v| split(v, d)).collect()))
    }
}

fn search(alg: &Algebra, basis: &IMat, n: usize, limit: usize) -> Result<Outcome> {
    if n == 1 {
        let ideal = LeftIdeal::from_lattice_rows(alg, basis)?;
        return Ok(match ideal.is_principal(alg) {
            Some(g) => Outcome::Found(vec![g]),
            None => Outcome::NotFree(ideal),
        });
    }
    let ambient = weighted_norms_gram(alg, basis, n)?;
    let gram = lattice::restrict_gram(&ambient, basis);
    let mut bound: Int = basis
        .iter()
        .map(|v| lattice::form_value(&ambient, v))
        .min()
        .unwrap_or_else(Int::zero);
    let branching = alg.is_quaternion() && n == 2;
    let mut seen: HashSet<Vec<Int>> = HashSet::new();
    let mut tried = 0usize;
    let mut last_not_free = None;
    loop {
        let mut result: Option<Result<Outcome>> = None;
        lattice::for_each_short_vector(&gram, &bound, |c| {
            let r = zmat::vec_mul(c, basis);
            let neg: Vec<Int> = r.iter().map(|x| -x).collect();
            if seen.contains(&r) || seen.contains(&neg) {
                return ControlFlow::Continue(());
            }
            seen.insert(r.clone());
            let Some(sp) = try_split(alg, basis, &r, n) else {
                return ControlFlow::Continue(());
            };
            tried += 1;
            let sub = match search(alg, &sp.image, n - 1, limit) {
                Ok(s) => s,
                Err(e) => {
                    result = Some(Err(e));
                    return ControlFlow::Break(());
                }
            };
            match sub {
                Outcome::Found(vs) => {
                    let Some(mut lifted) = lift(&sp, basis, &vs) else {
                        return ControlFlow::Continue(());
                    };
                    lifted.insert(0, r);
                    result = Some(Ok(Outcome::Found(lifted)));
                    ControlFlow::Break(())
                }
                Outcome::NotFree(i) if branching && tried < limit => {
                    last_not_free = Some(i);
                    ControlFlow::Continue(())
                }
                other if !branching => {
                    result = Some(Ok(other));
                    ControlFlow::Break(())
                }
                _ => ControlFlow::Break(()),
            }
        });
        if let Some(r) = result {
            return r;
        }
        if tried >= limit {
            return Ok(Outcome::Exhausted(limit));
        }
        if seen.len() > 50 * limit.max(1) {
            return Ok(match last_not_free {
                Some(_) if alg.is_quaternion() => Outcome::Exhausted(limit),
                Some(i) => Outcome::NotFree(i),
                None => Outcome::Exhausted(limit),
            });
        }
        bound = if bound.is_zero() { Int::from(1) } else { bound * 2u32 };
    }
}

/// Block-diagonal lattice `I_1 ⊕ … ⊕ I_n` as rows of length `dim·n`.
pub fn direct_sum_rows(alg: &Algebra, ideals: &[LeftIdeal]) -> IMat {
    let d = alg.dim();
    let n = ideals.len();
    let mut rows = Vec::new();
    for (i, id) in ideals.iter().enumerate() {
        for v in &id.basis {
            let mut row = vec![Int::zero(); d * n];
            row[i * d..(i + 1) * d].clone_from_slice(v);
            rows.push(row);
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn two_nonprincipal_classes_make_a_free_module() {
        let alg = Algebra::quadratic(-6).unwrap();
        let rho = alg.basis_vector(1);
        let p2 = LeftIdeal::from_generators(&alg, &[alg.from_int(&int(2)), rho.clone()]).unwrap();
        let p3 = LeftIdeal::from_generators(&alg, &[alg.from_int(&int(3)), rho]).unwrap();
        let rows = direct_sum_rows(&alg, &[p2.clone(), p3]);
        let BasisSearch::Found(m) = find_basis(&alg, &rows, 2, 50).unwrap() else {
            panic!("P2 + P3 has principal Steinitz class");
        };
        assert_eq!(zmat::hnf(&m.restriction_of_scalars(&alg)), zmat::hnf(&rows));
        let rows = direct_sum_rows(&alg, &[p2, LeftIdeal::unit(&alg)]);
        assert!(matches!(find_basis(&alg, &rows, 2, 50).unwrap(), BasisSearch::NotFree(_)));
    }
}
