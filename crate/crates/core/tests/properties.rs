mod common;

use common::*;
use num_bigint::BigInt;
use ordsmith_core::arith::int;
use ordsmith_core::local::{self, Profile};
use ordsmith_core::modular;
use ordsmith_core::unimodular;
use ordsmith_core::{Algebra, Mat, MatrixFile};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn algebra(i: usize) -> (String, Algebra) {
    let mut all = suite_algebras();
    all.swap_remove(i % all.len())
}

fn rank(alg: &Algebra, extra: usize) -> usize {
    if alg.is_quaternion() {
        2 + extra % 2
    } else {
        1 + extra % 3
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn profile_survives_unimodular_multiplication(a in 0usize..9, extra in 0usize..3, seed: u64) {
        let (name, alg) = algebra(a);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rank(&alg, extra).max(2);
        let m = random_nonsingular(&alg, n, &mut rng, 3);
        let u = random_unimodular(&alg, n, &mut rng, 6, 4);
        let v = random_unimodular(&alg, n, &mut rng, 6, 4);
        prop_assert!(u.is_unimodular(&alg) && v.is_unimodular(&alg));
        let before = local::local_profile(&alg, &m).unwrap();
        let after = local::local_profile(&alg, &u.mul(&alg, &m).mul(&alg, &v)).unwrap();
        prop_assert_eq!(before, after, "{}", name);
    }

    #[test]
    fn local_words_replay_and_invariants_are_chains(a in 0usize..9, extra in 0usize..3, seed: u64) {
        let (name, alg) = algebra(a);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_nonsingular(&alg, rank(&alg, extra), &mut rng, 3);
        for place in local::relevant_places(&alg, &m).unwrap() {
            let s = local::local_snf(&alg, &m, &place, 1).unwrap();
            prop_assert!(s.replays_on(&alg, &m).unwrap(), "{} at {}", name, place);
            prop_assert!(s.invariants.is_chain(), "{} at {}: {:?}", name, place, s.invariants);
        }
    }

    #[test]
    fn restriction_of_scalars_follows_the_profile(a in 0usize..9, extra in 0usize..3, seed: u64) {
        let (_, alg) = algebra(a);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_nonsingular(&alg, rank(&alg, extra), &mut rng, 4);
        let prof = local::local_profile(&alg, &m).unwrap();
        prop_assert_eq!(local::restriction_of_scalars_snf(&alg, &m), local::predicted_ros_exponents(&alg, &prof));
    }

    /// `[Λ^n : Λ^n M]` is the product of the indices of the elementary divisor ideals.
    #[test]
    fn divisor_indices_multiply_to_the_lattice_index(a in 0usize..9, extra in 0usize..3, seed: u64) {
        let (_, alg) = algebra(a);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rank(&alg, extra).max(2);
        let m = random_nonsingular(&alg, n, &mut rng, 3);
        let eds = unimodular::ed_ideals(&alg, &local::local_profile(&alg, &m).unwrap()).unwrap();
        let product = eds.iter().fold(int(1), |acc, e| acc * e.index());
        prop_assert_eq!(product, local::lattice_index(&alg, &m).unwrap());
        if !alg.is_quaternion() {
            for w in eds.windows(2) {
                prop_assert!(w[0].contains_ideal(&w[1]));
            }
        }
    }

    #[test]
    fn recovered_transforms_verify(a in 0usize..9, seed: u64) {
        let (name, alg) = algebra(a);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_nonsingular(&alg, 2, &mut rng, 3);
        let m2 = random_unimodular(&alg, 2, &mut rng, 4, 3).mul(&alg, &m).mul(&alg, &random_unimodular(&alg, 2, &mut rng, 4, 3));
        let (u, v) = unimodular::recover_transform(&alg, &m, &m2).unwrap();
        prop_assert!(u.is_unimodular(&alg) && v.is_unimodular(&alg), "{}", name);
        prop_assert_eq!(u.mul(&alg, &m).mul(&alg, &v), m2);
    }

    #[test]
    fn symplectic_multiplication_keeps_multiplier_and_profile(d in prop::sample::select(vec![-1i64, -2, -3, -5, -6, -7]), seed: u64) {
        let alg = Algebra::quadratic(d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_nonsingular(&alg, 1, &mut rng, 4);
        let m = alg.norm(&x.entries[0][0]);
        let w = modular::correspondence_inverse(&alg, &x, &m).unwrap();
        prop_assert_eq!(modular::multiplier(&alg, &w), Some(m.clone()));
        let g = random_symplectic(&alg, 1, &mut rng, 6, 4);
        prop_assert_eq!(modular::multiplier(&alg, &g), Some(int(1)));
        let moved = g.mul(&alg, &w);
        prop_assert_eq!(modular::multiplier(&alg, &moved), Some(m));
        prop_assert_eq!(modular::modular_profile(&alg, &moved).unwrap(), modular::modular_profile(&alg, &w).unwrap());
    }

    #[test]
    fn matrix_files_round_trip(entries in prop::collection::vec(prop::collection::vec(any::<i128>(), 2), 4)) {
        let alg = Algebra::quadratic(-5).unwrap();
        let rows: Vec<Vec<Vec<BigInt>>> = entries.chunks(2).map(|r| r.iter().map(|e| e.iter().map(|&c| BigInt::from(c)).collect()).collect()).collect();
        let m = Mat::from_entries(rows);
        let json = serde_json::to_string(&m.to_file()).unwrap();
        let back: MatrixFile = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.to_mat(&alg).unwrap(), m);
    }

    #[test]
    fn profiles_round_trip(a in 0usize..9, seed: u64) {
        let (_, alg) = algebra(a);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_nonsingular(&alg, 2, &mut rng, 3);
        let prof = local::local_profile(&alg, &m).unwrap();
        let back: Profile = serde_json::from_str(&serde_json::to_string(&prof).unwrap()).unwrap();
        prop_assert_eq!(back, prof);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn coset_orbit_matches_brute_force(d in prop::sample::select(vec![-1i64, -2, -3, -5, -6, -7]), p in prop::sample::select(vec![2i64, 3, 5])) {
        let alg = Algebra::quadratic(d).unwrap();
        let mut g = Mat::identity(&alg, 2);
        g.entries[1][1] = alg.from_int(&int(p));
        let reps = modular::right_cosets_of(&alg, &g, modular::DEFAULT_COSET_BOUND).unwrap();
        let brute = modular::brute_force_coset_count(&alg, &g, modular::DEFAULT_COSET_BOUND).unwrap();
        prop_assert_eq!(reps.len(), brute, "d = {}, p = {}", d, p);
    }
}
