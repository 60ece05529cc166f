mod common;

use common::*;
use ordsmith_core::arith::int;
use ordsmith_core::local::{self, Invariants, Side};
use ordsmith_core::modular::{self, LocalWord, SymOp, SymWord};
use ordsmith_core::modules::DEFAULT_CANDIDATE_LIMIT;
use ordsmith_core::unimodular::{Decision, Existence};
use ordsmith_core::{Algebra, Mat, Place, PlaceKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn identity_and_block_diagonal_multipliers() {
    let alg = z_sqrt_minus6();
    assert_eq!(modular::multiplier(&alg, &Mat::identity(&alg, 4)), Some(int(1)));
    let w = modular::correspondence_inverse(&alg, &two_rho_matrix(), &int(12)).unwrap();
    assert_eq!(modular::multiplier(&alg, &w), Some(int(12)));
    assert!(modular::correspondence_inverse(&alg, &two_rho_matrix(), &int(2)).is_err());
    let d = modular::correspondence_inverse(&alg, &Mat::identity(&alg, 2), &int(5)).unwrap();
    let mut want = Mat::identity(&alg, 4);
    want.entries[2][2] = alg.from_int(&int(5));
    want.entries[3][3] = alg.from_int(&int(5));
    assert_eq!(d, want);
}

#[test]
fn two_rho_modular_profile_is_the_unimodular_one() {
    let alg = z_sqrt_minus6();
    let n = two_rho_matrix();
    let w = modular::correspondence_inverse(&alg, &n, &int(12)).unwrap();
    let mp = modular::modular_profile(&alg, &w).unwrap();
    assert_eq!(mp.m, int(12));
    assert_eq!(mp.profile, local::local_profile(&alg, &n).unwrap());
    let back = modular::normalize_block_diagonal(&alg, &w, DEFAULT_CANDIDATE_LIMIT).unwrap();
    assert_eq!(local::local_profile(&alg, &back).unwrap(), mp.profile);
}

#[test]
fn scalar_similitude_profile() {
    let alg = Algebra::quadratic(-1).unwrap();
    let m = Mat::scalar(&alg, 4, &int(10));
    let mp = modular::modular_profile(&alg, &m).unwrap();
    assert_eq!(mp.m, int(100));
    let ramified = Place::new(int(2), PlaceKind::Ramified);
    assert_eq!(mp.profile.get(&ramified), Some(&Invariants::Exponents(vec![2, 2])));
    let split = Place::new(int(5), PlaceKind::SplitFirst);
    assert_eq!(mp.profile.get(&split), Some(&Invariants::Exponents(vec![1, 1])));
}

fn check_invariance(alg: &Algebra, base: &Mat, seed: u64, rounds: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = base.rows / 2;
    let want = modular::modular_profile(alg, base).unwrap();
    for _ in 0..rounds {
        let u = random_symplectic(alg, n, &mut rng, 6, 3);
        let v = random_symplectic(alg, n, &mut rng, 6, 3);
        let m2 = u.mul(alg, base).mul(alg, &v);
        assert_eq!(modular::multiplier(alg, &m2), Some(want.m.clone()));
        assert_eq!(modular::modular_profile(alg, &m2).unwrap(), want);
        let (ru, rv) = modular::recover_modular_transform(alg, base, &m2).unwrap();
        assert_eq!(ru.mul(alg, base).mul(alg, &rv), m2);
    }
}

#[test]
fn quadratic_profile_is_invariant_and_recoverable() {
    let alg = z_sqrt_minus6();
    let w = modular::correspondence_inverse(&alg, &two_rho_matrix(), &int(12)).unwrap();
    check_invariance(&alg, &w, 1, 4);
}

#[test]
fn split_quadratic_recovery() {
    let alg = Algebra::quadratic(-1).unwrap();
    let nmat = mat(&[&[&[2, 1], &[1, 0]], &[&[0, 0], &[1, 0]]]);
    let w = modular::correspondence_inverse(&alg, &nmat, &int(5)).unwrap();
    check_invariance(&alg, &w, 2, 4);
}

#[test]
fn quaternion_profile_is_invariant_and_recoverable() {
    let alg = disc17_order();
    let w = modular::correspondence_inverse(&alg, &h2_matrix(), &int(12)).unwrap();
    let mp = modular::modular_profile(&alg, &w).unwrap();
    assert_eq!(mp.profile, local::local_profile(&alg, &h2_matrix()).unwrap());
    check_invariance(&alg, &w, 3, 2);
}

#[test]
fn h2_modular_existence() {
    let alg = disc17_order();
    let prof = local::local_profile(&alg, &h2_matrix()).unwrap();
    let mp = modular::ModularProfile { m: int(12), profile: prof };
    let out = modular::modular_exists_with_eds(&alg, &mp, DEFAULT_CANDIDATE_LIMIT).unwrap();
    assert_eq!(out.decision(), Decision::Yes);
    if let Existence::Yes(w) = out {
        assert_eq!(modular::multiplier(&alg, &w), Some(int(12)));
        let ex = modular::correspondence_inverse(&alg, &h2_matrix(), &int(12)).unwrap();
        assert!(modular::modular_equivalent(&alg, &w, &ex).unwrap());
    }
}

/// `diag(1, x)` and `diag(1, x²)` with `x = 1+i+j` of norm 3: locally `diag(1, p^b)` for `b = 1, 2`.
/// With `μ = 3` they are equivalent under `GL_2n` but not under `Sp_n`.
#[test]
fn split_quaternion_orientation_separates_classes() {
    let alg = Algebra::hurwitz();
    let p = int(3);
    let m = int(27);
    let x = elem(&[1, 1, 1, 0]);
    let x2 = alg.mul(&x, &x);
    assert_eq!(alg.norm(&x2), int(9));
    let n1 = Mat::diag(&alg, &[alg.one(), x]);
    let n2 = Mat::diag(&alg, &[alg.one(), x2]);
    let w1 = modular::correspondence_inverse(&alg, &n1, &m).unwrap();
    let w2 = modular::correspondence_inverse(&alg, &n2, &m).unwrap();
    let p1 = modular::modular_profile(&alg, &w1).unwrap();
    let p2 = modular::modular_profile(&alg, &w2).unwrap();
    let split = Place::new(p, PlaceKind::Split);
    assert_eq!(p1.profile.get(&split), Some(&Invariants::Pairs(vec![[0, 0], [0, 1]])));
    assert_eq!(p2.profile.get(&split), Some(&Invariants::Pairs(vec![[0, 0], [0, 2]])));
    assert!(!modular::modular_equivalent(&alg, &w1, &w2).unwrap());
    let gl = |w: &Mat| local::restriction_of_scalars_snf(&alg, w);
    assert_eq!(gl(&w1), gl(&w2));
}

#[test]
fn approximation_of_a_single_generator() {
    let alg = z_sqrt_minus6();
    let p = int(7);
    let modulus = int(7 * 7 * 4);
    let op = SymOp::Psi { i: 0, j: 1, a: elem(&[3, 5]) };
    let word = LocalWord::Symplectic(SymWord::new(Side::Left, &p, 4, vec![op]));
    let u = modular::approximate_symplectic(&alg, &word, 2, &modulus).unwrap();
    assert_eq!(modular::multiplier(&alg, &u), Some(int(1)));
    let want = SymOp::Psi { i: 0, j: 1, a: elem(&[3, 5]) }.matrix(&alg, 2);
    assert!(u.congruent(&want, &int(49)));
    assert!(u.congruent(&Mat::identity(&alg, 4), &int(4)));
}

#[test]
fn pairs_from_a_similitude() {
    let alg = z_sqrt_minus6();
    let w = modular::correspondence_inverse(&alg, &two_rho_matrix(), &int(12)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let g = random_symplectic(&alg, 2, &mut rng, 8, 2);
    let (a, b) = (g.block(0, 0, 2, 2), g.block(0, 2, 2, 2));
    let r = modular::pair_predicates(&alg, &a, &b).unwrap();
    assert!(r.is_pair && r.is_coprime);
    let (a, b) = (w.block(0, 0, 2, 2), w.block(0, 2, 2, 2));
    let r = modular::pair_predicates(&alg, &a, &b).unwrap();
    assert!(r.is_pair && !r.is_coprime);
    assert!(modular::is_associated(&alg, &a, &b, &a, &b));
    let id = Mat::identity(&alg, 2);
    let zero = Mat::zeros(&alg, 2, 2);
    assert!(modular::pair_predicates(&alg, &id, &zero).unwrap().is_coprime);
}
