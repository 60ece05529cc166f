mod common;

use common::*;
use ordsmith_core::arith::int;
use ordsmith_core::local::{self, Invariants};
use ordsmith_core::{Mat, Place, PlaceKind};

#[test]
fn two_rho_local_exponents() {
    let alg = z_sqrt_minus6();
    let m = two_rho_matrix();
    let at2 = local::local_snf(&alg, &m, &Place::new(2, PlaceKind::Ramified), 1).unwrap();
    assert_eq!(at2.invariants, Invariants::Exponents(vec![1, 2]));
    let at3 = local::local_snf(&alg, &m, &Place::new(3, PlaceKind::Ramified), 1).unwrap();
    assert_eq!(at3.invariants, Invariants::Exponents(vec![0, 1]));
    assert!(at2.replays_on(&alg, &m).unwrap());
    assert!(at3.replays_on(&alg, &m).unwrap());
}

#[test]
fn h2_local_pairs() {
    let alg = disc17_order();
    for m in [h2_matrix(), h2_stacked()] {
        let at2 = local::local_snf(&alg, &m, &Place::new(2, PlaceKind::Split), 1).unwrap();
        assert_eq!(at2.invariants, Invariants::Pairs(vec![[0, 1], [1, 1]]));
        let at3 = local::local_snf(&alg, &m, &Place::new(3, PlaceKind::Split), 1).unwrap();
        assert_eq!(at3.invariants, Invariants::Pairs(vec![[0, 0], [0, 1]]));
        assert!(at2.replays_on(&alg, &m).unwrap());
        assert!(at3.replays_on(&alg, &m).unwrap());
    }
}

#[test]
fn identity_is_trivial_everywhere() {
    let alg = z_sqrt_minus6();
    let id = Mat::identity(&alg, 3);
    for place in alg.classify_prime(&int(5)) {
        let s = local::local_snf(&alg, &id, &place, 1).unwrap();
        assert!(s.invariants.is_trivial());
        assert!(s.left.ops.is_empty() && s.right.ops.is_empty());
    }
    assert!(local::local_profile(&alg, &id).unwrap().places.is_empty());
}

#[test]
fn ros_rule_on_examples() {
    let alg = z_sqrt_minus6();
    let m = two_rho_matrix();
    let prof = local::local_profile(&alg, &m).unwrap();
    assert_eq!(local::restriction_of_scalars_snf(&alg, &m), local::predicted_ros_exponents(&alg, &prof));
    let q = disc17_order();
    let m = h2_matrix();
    let prof = local::local_profile(&q, &m).unwrap();
    assert_eq!(local::restriction_of_scalars_snf(&q, &m), local::predicted_ros_exponents(&q, &prof));
}
