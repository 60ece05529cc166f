mod common;

use common::*;
use ordsmith_core::arith::int;
use ordsmith_core::modular::{self, DEFAULT_COSET_BOUND};
use ordsmith_core::Mat;

fn hecke_p(alg: &ordsmith_core::Algebra, p: i64) -> Mat {
    Mat::diag(alg, &[alg.one(), alg.from_int(&int(p))])
}

#[test]
fn orbit_matches_brute_force_for_small_primes() {
    let alg = z_sqrt_minus6();
    for p in [2, 3, 5] {
        let m = hecke_p(&alg, p);
        let reps = modular::right_cosets_of(&alg, &m, DEFAULT_COSET_BOUND).unwrap();
        let brute = modular::brute_force_coset_count(&alg, &m, DEFAULT_COSET_BOUND).unwrap();
        println!("p = {p}: orbit {} brute {brute}", reps.len());
        assert_eq!(reps.len(), brute);
    }
}

#[test]
fn representatives_are_distinct_similitudes_in_the_double_coset() {
    let alg = z_sqrt_minus6();
    let m = hecke_p(&alg, 3);
    let want = modular::modular_profile(&alg, &m).unwrap();
    let reps = modular::right_cosets_of(&alg, &m, DEFAULT_COSET_BOUND).unwrap();
    for (a, r) in reps.iter().enumerate() {
        assert_eq!(modular::modular_profile(&alg, r).unwrap(), want);
        for s in &reps[a + 1..] {
            assert!(!modular::same_right_coset(&alg, r, s).unwrap());
        }
    }
    let again = modular::right_cosets_of(&alg, &m, DEFAULT_COSET_BOUND).unwrap();
    assert_eq!(reps, again);
}

#[test]
fn enumeration_from_a_profile() {
    let alg = z_sqrt_minus6();
    let m = hecke_p(&alg, 5);
    let profile = modular::modular_profile(&alg, &m).unwrap();
    let reps = modular::enumerate_right_cosets(&alg, &profile, DEFAULT_COSET_BOUND).unwrap();
    assert_eq!(reps.len(), 6);
}

#[test]
fn gaussian_integers_and_rank_two() {
    let alg = ordsmith_core::Algebra::quadratic(-1).unwrap();
    for p in [2, 3, 5] {
        let m = hecke_p(&alg, p);
        let reps = modular::right_cosets_of(&alg, &m, DEFAULT_COSET_BOUND).unwrap();
        let brute = modular::brute_force_coset_count(&alg, &m, DEFAULT_COSET_BOUND).unwrap();
        assert_eq!(reps.len(), brute, "p = {p}");
    }
    let alg = z_sqrt_minus6();
    let m = Mat::diag(&alg, &[alg.one(), alg.one(), alg.from_int(&int(2)), alg.from_int(&int(2))]);
    let reps = modular::right_cosets_of(&alg, &m, DEFAULT_COSET_BOUND).unwrap();
    assert!(reps.len() > 1);
    assert!(reps.iter().all(|r| modular::multiplier(&alg, r) == Some(int(2))));
}

#[test]
fn quaternion_and_oversized_inputs_are_refused() {
    let alg = ordsmith_core::Algebra::hurwitz();
    let m = Mat::diag(&alg, &[alg.one(), alg.from_int(&int(3))]);
    assert!(modular::right_cosets_of(&alg, &m, DEFAULT_COSET_BOUND).is_err());
    let alg = z_sqrt_minus6();
    let big = hecke_p(&alg, 97);
    assert!(matches!(
        modular::right_cosets_of(&alg, &big, 10),
        Err(ordsmith_core::Error::BoundExceeded(_))
    ));
}
