//! One test per acceptance criterion; each prints a single PASS/FAIL line.
//! Run with `cargo test -p ordsmith-core --test acceptance -- --nocapture --test-threads 1`.

mod common;

use common::*;
use ordsmith_core::arith::int;
use ordsmith_core::ideal::LeftIdeal;
use ordsmith_core::local::{self, apply_transvection, Invariants, Profile, Side, Transvection};
use ordsmith_core::modular::{self, LocalWord, ModularProfile, SymOp, SymWord};
use ordsmith_core::unimodular::{self, Decision};
use ordsmith_core::{Algebra, Elem, Int, Mat, Place, PlaceKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

/// Large enough that the quaternion basis searches below reach a decision.
const DECIDING_LIMIT: usize = 5000;

/// Prints the verdict line, then fails the test if the criterion does not hold.
fn verdict(id: &str, what: &str, started: Instant, limit: Duration, outcome: Result<(), String>) {
    let took = started.elapsed();
    let outcome = outcome.and_then(|()| {
        if took <= limit {
            Ok(())
        } else {
            Err(format!("took {took:.2?}, limit {limit:?}"))
        }
    });
    match &outcome {
        Ok(()) => println!("PASS {id}: {what} ({took:.2?})"),
        Err(why) => println!("FAIL {id}: {what} ({took:.2?}): {why}"),
    }
    if let Err(why) = outcome {
        panic!("{id}: {why}");
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

#[test]
fn criterion_1_two_rho_regression() {
    let t = Instant::now();
    let alg = z_sqrt_minus6();
    let outcome = (|| {
        let prof = local::local_profile(&alg, &two_rho_matrix()).map_err(|e| e.to_string())?;
        let got = unimodular::ed_ideals(&alg, &prof).map_err(|e| e.to_string())?;
        let rho = elem(&[0, 1]);
        let want = vec![
            LeftIdeal::from_generators(&alg, &[alg.from_int(&int(2)), rho.clone()]).unwrap(),
            LeftIdeal::from_generators(&alg, &[alg.from_int(&int(6)), alg.scale(&rho, &int(2))]).unwrap(),
        ];
        ensure(got == want, || format!("got {:?}", got.iter().map(|e| e.format(&alg)).collect::<Vec<_>>()))
    })();
    verdict("criterion-1", "ideals (2, rho), (6, 2rho) for [[2, rho], [4, rho]]", t, Duration::from_secs(1), outcome);
}

/// `{(m2, 2)}` at 2 in the discriminant-17 order, trivial elsewhere.
fn disc17_obstruction_profile() -> Profile {
    Profile {
        n: 2,
        places: vec![local::PlaceInvariants {
            place: Place::new(int(2), PlaceKind::Split),
            invariants: Invariants::Pairs(vec![[0, 1], [1, 1]]),
        }],
    }
}

#[test]
fn criterion_2_discriminant_17_obstruction() {
    let t = Instant::now();
    let alg = disc17_order();
    let profile = disc17_obstruction_profile();
    let outcome = (|| {
        let plain = unimodular::exists_with_eds(&alg, &profile, DECIDING_LIMIT).map_err(|e| e.to_string())?;
        if let unimodular::Existence::Yes(w) = &plain {
            let realized = local::local_profile(&alg, w).map_err(|e| e.to_string())? == profile;
            println!("  exists returned {} (profile verified: {realized})", w.format(&alg));
        }
        // pair (1, 1) at 2 has norm 4, so 4 is the least admissible multiplier
        let mp = ModularProfile { m: int(4), profile: profile.clone() };
        let sym = modular::modular_exists_with_eds(&alg, &mp, DECIDING_LIMIT).map_err(|e| e.to_string())?;
        ensure(plain.decision() == Decision::No && sym.decision() == Decision::No, || {
            format!("exists: {:?}, modular-exists: {:?}", plain.decision(), sym.decision())
        })
    })();
    verdict("criterion-2", "no matrix realizes {(m2, 2)} in the disc-17 order", t, Duration::from_secs(5), outcome);
}

#[test]
fn criterion_3_h2_suite() {
    let t = Instant::now();
    let alg = disc17_order();
    let mut problems = Vec::new();
    let report = alg.validate_maximal_order();
    if !report.is_valid() {
        problems.push(format!("order not maximal: {:?}", report.failures));
    }
    if report.discriminant != int(51) {
        problems.push(format!("reduced discriminant {} instead of 51", report.discriminant));
    }
    let h2 = elem(&[0, 0, 1, 0]);
    for p in [2, 3] {
        let ideal = LeftIdeal::from_generators(&alg, &[alg.from_int(&int(p)), h2.clone()]).unwrap();
        // maximal left ideals above p have index p^2
        if ideal.index() != int(p * p) {
            problems.push(format!("m{p} has index {}", ideal.index()));
        }
        if let Some(g) = ideal.is_principal(&alg) {
            problems.push(format!("m{p} is principal, generated by {g:?}"));
        }
    }
    let m = h2_matrix();
    let stacked = h2_stacked();
    let mut padded = m.clone();
    padded.entries.extend(Mat::zeros(&alg, 2, 2).entries);
    padded.rows = 4;
    match unimodular::recover_transform(&alg, &stacked, &padded) {
        Ok((u, v)) => {
            if !(u.is_unimodular(&alg) && v.is_unimodular(&alg) && u.mul(&alg, &stacked).mul(&alg, &v) == padded) {
                problems.push("stacked witness does not verify".into());
            }
        }
        Err(e) => problems.push(format!("stacked vs M: {e}")),
    }
    let prof = local::local_profile(&alg, &m).unwrap();
    let want = Profile {
        n: 2,
        places: vec![
            local::PlaceInvariants { place: Place::new(int(2), PlaceKind::Split), invariants: Invariants::Pairs(vec![[0, 1], [1, 1]]) },
            local::PlaceInvariants { place: Place::new(int(3), PlaceKind::Split), invariants: Invariants::Pairs(vec![[0, 0], [0, 1]]) },
        ],
    };
    if prof != want {
        problems.push(format!("local invariants {prof:?}"));
    }
    let outcome = ensure(problems.is_empty(), || problems.join("; "));
    verdict("criterion-3", "disc-17 pair: maximal order of disc 51, m2 and m3, stacked witness, invariants", t, Duration::from_secs(30), outcome);
}

#[test]
fn criterion_4_diagonalizability_obstruction() {
    let t = Instant::now();
    let alg = z_sqrt_minus6();
    let outcome = (|| {
        let got = unimodular::diagonal_form(&alg, &three_rho_matrix()).map_err(|e| e.to_string())?;
        let three_rho = LeftIdeal::from_generators(&alg, &[alg.from_int(&int(3)), elem(&[0, 1])]).unwrap();
        match got {
            Ok(d) => Err(format!("diagonal form found: {}", d.format(&alg))),
            Err(e) => ensure(e == three_rho && e.is_principal(&alg).is_none(), || format!("obstruction {}", e.format(&alg))),
        }
    })();
    verdict("criterion-4", "[[3, rho], [rho, 3]] has no diagonal form; e1 = (3, rho) nonprincipal", t, Duration::from_secs(1), outcome);
}

fn run_5a(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for (name, alg) in suite_algebras() {
        for round in 0..200 {
            let n = 2;
            let m = random_nonsingular(&alg, n, rng, 3);
            let want = local::local_profile(&alg, &m).map_err(|e| format!("{name}: {e}"))?;
            let u = random_unimodular(&alg, n, rng, 5, 3);
            let v = random_unimodular(&alg, n, rng, 5, 3);
            let got = local::local_profile(&alg, &u.mul(&alg, &m).mul(&alg, &v)).map_err(|e| format!("{name}: {e}"))?;
            if got != want {
                return Err(format!("{name}, round {round}: unimodular profile changed"));
            }
            // symplectic side: n = 1 for the quaternion orders, which only support n >= 2 there
            if alg.is_quaternion() && round % 4 != 0 {
                continue;
            }
            let w = if alg.is_quaternion() {
                let mult = local::lattice_index(&alg, &m).unwrap();
                match modular::correspondence_inverse(&alg, &m, &mult) {
                    Ok(w) => w,
                    Err(e) => return Err(format!("{name}: {e}")),
                }
            } else {
                let x = random_nonsingular(&alg, 1, rng, 3);
                modular::correspondence_inverse(&alg, &x, &alg.norm(&x.entries[0][0])).map_err(|e| format!("{name}: {e}"))?
            };
            let half = w.rows / 2;
            let want = modular::modular_profile(&alg, &w).map_err(|e| format!("{name}: {e}"))?;
            let g = random_symplectic(&alg, half, rng, 5, 3);
            let h = random_symplectic(&alg, half, rng, 5, 3);
            let got = modular::modular_profile(&alg, &g.mul(&alg, &w).mul(&alg, &h)).map_err(|e| format!("{name}: {e}"))?;
            if got != want {
                return Err(format!("{name}, round {round}: modular profile changed"));
            }
        }
    }
    Ok(())
}

fn run_5b(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let algs = suite_algebras();
    for round in 0..100 {
        let (name, alg) = &algs[round % algs.len()];
        let m = random_nonsingular(alg, 2, rng, 3);
        let m2 = random_unimodular(alg, 2, rng, 4, 3).mul(alg, &m).mul(alg, &random_unimodular(alg, 2, rng, 4, 3));
        let (u, v) = unimodular::recover_transform(alg, &m, &m2).map_err(|e| format!("{name}, round {round}: {e}"))?;
        if !(u.is_unimodular(alg) && v.is_unimodular(alg) && u.mul(alg, &m).mul(alg, &v) == m2) {
            return Err(format!("{name}, round {round}: unimodular witness does not verify"));
        }
    }
    let quadratic: Vec<_> = algs.iter().filter(|(_, a)| !a.is_quaternion()).collect();
    for round in 0..100 {
        let (name, alg) = quadratic[round % quadratic.len()];
        let x = random_nonsingular(alg, 1, rng, 3);
        let w = modular::correspondence_inverse(alg, &x, &alg.norm(&x.entries[0][0])).map_err(|e| e.to_string())?;
        let w2 = random_symplectic(alg, 1, rng, 4, 3).mul(alg, &w).mul(alg, &random_symplectic(alg, 1, rng, 4, 3));
        let (u, v) = modular::recover_modular_transform(alg, &w, &w2).map_err(|e| format!("{name}, round {round}: {e}"))?;
        let symplectic = |g: &Mat| modular::multiplier(alg, g) == Some(int(1));
        if !(symplectic(&u) && symplectic(&v) && u.mul(alg, &w).mul(alg, &v) == w2) {
            return Err(format!("{name}, round {round}: symplectic witness does not verify"));
        }
    }
    Ok(())
}

fn run_5c(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let algs = suite_algebras();
    for round in 0..500 {
        let (name, alg) = &algs[round % algs.len()];
        let n = rng.gen_range(if alg.is_quaternion() { 2 } else { 1 }..=3);
        let m = random_nonsingular(alg, n, rng, 4);
        let prof = local::local_profile(alg, &m).map_err(|e| e.to_string())?;
        if local::restriction_of_scalars_snf(alg, &m) != local::predicted_ros_exponents(alg, &prof) {
            return Err(format!("{name}, round {round}: multiset rule fails for {}", m.format(alg)));
        }
    }
    Ok(())
}

fn run_5d(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let algs = suite_algebras();
    for round in 0..50 {
        let (name, alg) = &algs[round % algs.len()];
        let nmat = random_nonsingular(alg, 2, rng, 2);
        let mult = local::lattice_index(alg, &nmat).unwrap();
        let w = modular::correspondence_inverse(alg, &nmat, &mult).map_err(|e| format!("{name}: {e}"))?;
        let scrambled = random_symplectic(alg, 2, rng, 4, 2).mul(alg, &w).mul(alg, &random_symplectic(alg, 2, rng, 4, 2));
        let back = modular::normalize_block_diagonal(alg, &scrambled, DECIDING_LIMIT).map_err(|e| format!("{name}, round {round}: {e}"))?;
        if !unimodular::unimodular_equivalent(alg, &back, &nmat).map_err(|e| e.to_string())? {
            return Err(format!("{name}, round {round}: block-diagonal round trip changed the class"));
        }
    }
    Ok(())
}

#[test]
fn criterion_5_property_suite() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let parts: [(&str, fn(&mut ChaCha8Rng) -> Result<(), String>); 4] =
        [("5a invariance", run_5a), ("5b witnesses", run_5b), ("5c multiset rule", run_5c), ("5d round trip", run_5d)];
    let mut failures = Vec::new();
    for (label, run) in parts {
        let s = Instant::now();
        let r = run(&mut rng);
        match &r {
            Ok(()) => println!("  ok   {label} ({:.2?})", s.elapsed()),
            Err(e) => println!("  fail {label}: {e}"),
        }
        if let Err(e) = r {
            failures.push(format!("{label}: {e}"));
        }
    }
    let outcome = ensure(failures.is_empty(), || failures.join("; "));
    verdict("criterion-5", "random invariance, witnesses, multiset rule, round trip", t, Duration::from_secs(600), outcome);
}

fn random_param(alg: &Algebra, rng: &mut ChaCha8Rng) -> Elem {
    (0..alg.dim()).map(|_| int(rng.gen_range(-20..=20))).collect()
}

/// `p^a · q^b` with `q` another small prime, and the exponent at `p`.
fn random_modulus(rng: &mut ChaCha8Rng) -> (Int, Int, u32) {
    let primes = [2i64, 3, 5, 7, 11];
    let p = primes[rng.gen_range(0..primes.len())];
    let q = primes.iter().copied().filter(|&q| q != p).nth(rng.gen_range(0..primes.len() - 1)).unwrap();
    let a = rng.gen_range(1..=3u32);
    let b = rng.gen_range(0..=2u32);
    (int(p), int(p).pow(a) * int(q).pow(b), a)
}

fn check_congruences(got: &Mat, word: &Mat, alg: &Algebra, p: &Int, modulus: &Int, a: u32) -> bool {
    let pa = p.pow(a);
    let rest = modulus / &pa;
    got.congruent(word, &pa) && got.congruent(&Mat::identity(alg, got.rows), &rest)
}

#[test]
fn criterion_6_approximation_congruences() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let algs = suite_algebras();
    let mut failures = Vec::new();
    for round in 0..200 {
        let (name, alg) = &algs[round % algs.len()];
        let (p, modulus, a) = random_modulus(&mut rng);

        let n = rng.gen_range(2..=3);
        let mut ops = Vec::new();
        let mut word = Mat::identity(alg, n);
        for _ in 0..rng.gen_range(1..=6) {
            let i = rng.gen_range(0..n);
            let j = (i + rng.gen_range(1..n)) % n;
            let t = Transvection { side: Side::Left, i, j, a: random_param(alg, &mut rng) };
            apply_transvection(alg, &mut word, &t);
            ops.push(t);
        }
        match unimodular::approximate_unimodular(alg, &ops, n, &p, &modulus) {
            Ok(u) if u.is_unimodular(alg) && check_congruences(&u, &word, alg, &p, &modulus, a) => {}
            Ok(_) => failures.push(format!("{name}, round {round}: unimodular lift fails a residue check")),
            Err(e) => failures.push(format!("{name}, round {round}: {e}")),
        }

        let n = rng.gen_range(1..=2);
        let mut sym = Vec::new();
        for _ in 0..rng.gen_range(1..=6) {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            let scalar = alg.from_int(&int(rng.gen_range(-20..=20)));
            let op = match rng.gen_range(0..3) {
                0 if i != j => SymOp::Psi { i, j, a: random_param(alg, &mut rng) },
                0 | 1 => SymOp::Upper { i, j, a: if i == j { scalar } else { random_param(alg, &mut rng) } },
                _ => SymOp::Lower { i, j, a: if i == j { scalar } else { random_param(alg, &mut rng) } },
            };
            sym.push(op);
        }
        let mut word = Mat::identity(alg, 2 * n);
        for op in &sym {
            op.apply(alg, &mut word, Side::Left);
        }
        let local = LocalWord::Symplectic(SymWord::new(Side::Left, &p, a, sym));
        match modular::approximate_symplectic(alg, &local, n, &modulus) {
            Ok(g) if modular::multiplier(alg, &g) == Some(int(1)) && check_congruences(&g, &word, alg, &p, &modulus, a) => {}
            Ok(_) => failures.push(format!("{name}, round {round}: symplectic lift fails a residue check")),
            Err(e) => failures.push(format!("{name}, round {round}: {e}")),
        }
    }
    let outcome = ensure(failures.is_empty(), || format!("{} failures, first: {}", failures.len(), failures[0]));
    verdict("criterion-6", "approximation lifts satisfy every residue check on 200 sequences", t, Duration::from_secs(600), outcome);
}

#[test]
fn criterion_7_coset_enumeration() {
    let t = Instant::now();
    let alg = z_sqrt_minus6();
    let outcome = (|| {
        let mut counts = Vec::new();
        for p in [2i64, 3, 5] {
            let mut g = Mat::identity(&alg, 2);
            g.entries[1][1] = alg.from_int(&int(p));
            let reps = modular::right_cosets_of(&alg, &g, modular::DEFAULT_COSET_BOUND).map_err(|e| e.to_string())?;
            let brute = modular::brute_force_coset_count(&alg, &g, modular::DEFAULT_COSET_BOUND).map_err(|e| e.to_string())?;
            if reps.len() != brute {
                return Err(format!("p = {p}: {} representatives, brute force {brute}", reps.len()));
            }
            counts.push(format!("p={p}: {brute}"));
        }
        println!("  coset counts {}", counts.join(", "));
        Ok(())
    })();
    verdict("criterion-7", "coset counts match brute force for p = 2, 3, 5 in d = -6", t, Duration::from_secs(120), outcome);
}
