//! Short vector enumeration for positive definite integral forms.
//!
//! A form is given by an integer Gram matrix `G`; the quadratic form is `q(x) = ½ xᵀ G x`.

use crate::arith::Int;
use crate::zmat::{self, IMat};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::ops::ControlFlow;

pub fn form_value(g: &IMat, x: &[Int]) -> Int {
    let gx = zmat::vec_mul(x, g);
    let s: Int = gx.iter().zip(x).map(|(a, b)| a * b).sum();
    s / 2
}

/// Unimodular `t` whose rows give an LLL-reduced basis for the form `g`.
pub fn lll_transform(g: &IMat) -> IMat {
    let n = g.len();
    let mut t = zmat::identity(n);
    if n <= 1 {
        return t;
    }
    let delta = BigRational::new(3.into(), 4.into());
    let half = BigRational::new(1.into(), 2.into());
    let mut k = 1;
    let mut guard = 0usize;
    while k < n && guard < 100_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (mu, _) = gso(&reduced_gram(g, &t));
            if mu[k][j].abs() > half {
                let r = round(&mu[k][j]);
                let src = t[j].clone();
                for (x, s) in t[k].iter_mut().zip(&src) {
                    *x -= &r * s;
                }
            }
        }
        let (mu, b) = gso(&reduced_gram(g, &t));
        let lhs = &b[k] + &mu[k][k - 1] * &mu[k][k - 1] * &b[k - 1];
        if lhs >= &delta * &b[k - 1] {
            k += 1;
        } else {
            t.swap(k, k - 1);
            k = k.max(2) - 1;
        }
    }
    t
}

fn reduced_gram(g: &IMat, t: &IMat) -> IMat {
    zmat::mul(&zmat::mul(t, g), &zmat::transpose(t))
}

fn round(x: &BigRational) -> Int {
    (x + BigRational::new(1.into(), 2.into())).floor().to_integer()
}

fn gso(gram: &IMat) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let n = gram.len();
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut b = vec![BigRational::zero(); n];
    for i in 0..n {
        for j in 0..i {
            let mut s = BigRational::from_integer(gram[i][j].clone());
            for l in 0..j {
                s -= &mu[j][l] * &mu[i][l] * &b[l];
            }
            mu[i][j] = s / &b[j];
        }
        let mut s = BigRational::from_integer(gram[i][i].clone());
        for l in 0..i {
            s -= &mu[i][l] * &mu[i][l] * &b[l];
        }
        b[i] = s;
        mu[i][i] = BigRational::one();
    }
    (mu, b)
}

/// Calls `f` on every nonzero `x` with `q(x) ≤ bound` (both `x` and `−x`).
pub fn for_each_short_vector<F>(g: &IMat, bound: &Int, mut f: F)
where
    F: FnMut(&[Int]) -> ControlFlow<()>,
{
    let n = g.len();
    if n == 0 || bound.is_negative() {
        return;
    }
    let t = lll_transform(g);
    let red = zmat::mul(&zmat::mul(&t, g), &zmat::transpose(&t));
    // Cholesky-style decomposition of q in floating point; candidates are checked exactly.
    let a: Vec<Vec<f64>> = red
        .iter()
        .map(|r| r.iter().map(|x| x.to_f64().unwrap() / 2.0).collect())
        .collect();
    let mut qd = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in i..n {
            qd[i][j] = a[i][j];
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            qd[j][i] = qd[i][j];
            qd[i][j] /= qd[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                qd[k][l] -= qd[k][i] * qd[i][l];
            }
        }
    }
    let c = bound.to_f64().unwrap();
    let slack = 1e-6 * (1.0 + c);
    let mut x = vec![0i64; n];
    let mut tcap = vec![0.0f64; n];
    let mut ucenter = vec![0.0f64; n];
    let mut upper = vec![0i64; n];
    let mut i = n - 1;
    tcap[i] = c + slack;
    ucenter[i] = 0.0;
    let start = |i: usize, tcap: &[f64], ucenter: &[f64], x: &mut [i64], upper: &mut [i64]| {
        let r = (tcap[i].max(0.0) / qd[i][i]).sqrt();
        upper[i] = (r - ucenter[i]).floor() as i64;
        x[i] = (-r - ucenter[i]).ceil() as i64 - 1;
    };
    start(i, &tcap, &ucenter, &mut x, &mut upper);
    loop {
        x[i] += 1;
        if x[i] > upper[i] {
            if i == n - 1 {
                return;
            }
            i += 1;
            continue;
        }
        if i > 0 {
            let d = x[i] as f64 + ucenter[i];
            let rest = tcap[i] - qd[i][i] * d * d;
            let j = i - 1;
            tcap[j] = rest;
            ucenter[j] = (j + 1..n).map(|l| qd[j][l] * x[l] as f64).sum();
            i = j;
            start(i, &tcap, &ucenter, &mut x, &mut upper);
            continue;
        }
        if x.iter().all(|&v| v == 0) {
            continue;
        }
        let y: Vec<Int> = x.iter().map(|&v| Int::from(v)).collect();
        let v = zmat::vec_mul(&y, &t);
        if form_value(g, &v) <= *bound && f(&v).is_break() {
            return;
        }
    }
}

pub fn short_vectors(g: &IMat, bound: &Int) -> Vec<Vec<Int>> {
    let mut out = Vec::new();
    for_each_short_vector(g, bound, |v| {
        out.push(v.to_vec());
        ControlFlow::Continue(())
    });
    out.sort();
    out
}

pub fn vectors_of_norm(g: &IMat, target: &Int) -> Vec<Vec<Int>> {
    short_vectors(g, target)
        .into_iter()
        .filter(|v| form_value(g, v) == *target)
        .collect()
}

/// Gram matrix of `q` restricted to the lattice spanned by the rows of `basis`.
pub fn restrict_gram(g: &IMat, basis: &IMat) -> IMat {
    zmat::mul(&zmat::mul(basis, g), &zmat::transpose(basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn counts_on_z4() {
        // q = x1^2 + ... + x4^2; 8 vectors of norm 1, 24 of norm 2
        let g: IMat = (0..4)
            .map(|i| (0..4).map(|j| if i == j { int(2) } else { int(0) }).collect())
            .collect();
        assert_eq!(vectors_of_norm(&g, &int(1)).len(), 8);
        assert_eq!(vectors_of_norm(&g, &int(2)).len(), 24);
    }

    #[test]
    fn skewed_basis() {
        let g = vec![vec![int(2), int(1000)], vec![int(1000), int(500002)]];
        // this is x^2 + (1000x + y)... a unimodular change of x^2 + y^2
        assert_eq!(vectors_of_norm(&g, &int(1)).len(), 4);
    }
}
