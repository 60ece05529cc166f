#![allow(dead_code)]

use num_rational::BigRational;
use ordsmith_core::arith::int;
use ordsmith_core::{Algebra, Elem, Mat};

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(int(n), int(d))
}

pub fn z_sqrt_minus6() -> Algebra {
    Algebra::quadratic(-6).unwrap()
}

/// Order spanned by 1, h1, h2, h3 in (-17, -3).
pub fn disc17_order() -> Algebra {
    let basis = vec![
        vec![frac(1, 1), frac(0, 1), frac(0, 1), frac(0, 1)],
        vec![frac(1, 2), frac(0, 1), frac(1, 2), frac(0, 1)],
        vec![frac(1, 2), frac(1, 2), frac(1, 6), frac(1, 6)],
        vec![frac(-1, 2), frac(0, 1), frac(1, 6), frac(-1, 3)],
    ];
    Algebra::quaternion(-17, -3, basis).unwrap()
}

pub fn elem(v: &[i64]) -> Elem {
    v.iter().map(|&x| int(x)).collect()
}

pub fn mat(rows: &[&[&[i64]]]) -> Mat {
    Mat::from_entries(rows.iter().map(|r| r.iter().map(|x| elem(x)).collect()).collect())
}

/// [[2, ρ], [4, ρ]] over Z[√−6].
pub fn two_rho_matrix() -> Mat {
    mat(&[&[&[2, 0], &[0, 1]], &[&[4, 0], &[0, 1]]])
}

/// [[3, ρ], [ρ, 3]] over Z[√−6].
pub fn three_rho_matrix() -> Mat {
    mat(&[&[&[3, 0], &[0, 1]], &[&[0, 1], &[3, 0]]])
}

/// [[−2, 6], [−h2, 2h2]] in the disc-17 order.
pub fn h2_matrix() -> Mat {
    mat(&[
        &[&[-2, 0, 0, 0], &[6, 0, 0, 0]],
        &[&[0, 0, -1, 0], &[0, 0, 2, 0]],
    ])
}

/// Rows 2, h2 in the first column and 6, 2h2 in the second.
pub fn h2_stacked() -> Mat {
    mat(&[
        &[&[2, 0, 0, 0], &[0, 0, 0, 0]],
        &[&[0, 0, 1, 0], &[0, 0, 0, 0]],
        &[&[0, 0, 0, 0], &[6, 0, 0, 0]],
        &[&[0, 0, 0, 0], &[0, 0, 2, 0]],
    ])
}

/// Product of `len` random symplectic generators with parameters of height at most `h`.
pub fn random_symplectic(alg: &Algebra, n: usize, rng: &mut impl rand::Rng, len: usize, h: i64) -> Mat {
    use ordsmith_core::local::Side;
    use ordsmith_core::modular::SymOp;
    let mut g = Mat::identity(alg, 2 * n);
    for _ in 0..len {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        let a: Elem = (0..alg.dim()).map(|_| int(rng.gen_range(-h..=h))).collect();
        let scalar = alg.from_int(&int(rng.gen_range(-h..=h)));
        let op = match rng.gen_range(0..3) {
            0 if i != j => SymOp::Psi { i, j, a },
            0 | 1 => SymOp::Upper { i, j, a: if i == j { scalar } else { a } },
            _ => SymOp::Lower { i, j, a: if i == j { scalar } else { a } },
        };
        op.apply(alg, &mut g, Side::Left);
    }
    g
}

/// Product of `len` random transvections, parameters of height at most `h`.
pub fn random_unimodular(alg: &Algebra, n: usize, rng: &mut impl rand::Rng, len: usize, h: i64) -> Mat {
    use ordsmith_core::local::{apply_transvection, Side, Transvection};
    let mut u = Mat::identity(alg, n);
    for _ in 0..len {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let a: Elem = (0..alg.dim()).map(|_| int(rng.gen_range(-h..=h))).collect();
        let side = if rng.gen_bool(0.5) { Side::Left } else { Side::Right };
        apply_transvection(alg, &mut u, &Transvection { side, i, j, a });
    }
    u
}

/// Random matrix with entries of height at most `h` and nonzero determinant.
pub fn random_nonsingular(alg: &Algebra, n: usize, rng: &mut impl rand::Rng, h: i64) -> Mat {
    loop {
        let rows = (0..n)
            .map(|_| (0..n).map(|_| (0..alg.dim()).map(|_| int(rng.gen_range(-h..=h))).collect()).collect())
            .collect();
        let m = Mat::from_entries(rows);
        if ordsmith_core::local::lattice_index(alg, &m).is_ok() {
            return m;
        }
    }
}

/// Every algebra the random suites run over.
pub fn suite_algebras() -> Vec<(String, Algebra)> {
    let mut out: Vec<(String, Algebra)> =
        [-1, -2, -3, -5, -6, -7, -11].iter().map(|&d| (format!("d={d}"), Algebra::quadratic(d).unwrap())).collect();
    out.push(("disc 17".into(), disc17_order()));
    out.push(("disc 2".into(), Algebra::hurwitz()));
    out
}
