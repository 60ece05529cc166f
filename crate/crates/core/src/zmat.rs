//! Dense integer and rational matrices: Hermite and Smith forms, determinants, solving.

use crate::arith::Int;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IMat = Vec<Vec<Int>>;
pub type QMat = Vec<Vec<BigRational>>;

pub fn zeros(r: usize, c: usize) -> IMat {
    vec![vec![Int::zero(); c]; r]
}

pub fn identity(n: usize) -> IMat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Int::one();
    }
    m
}

pub fn mul(a: &IMat, b: &IMat) -> IMat {
    let cols = b.first().map_or(0, |r| r.len());
    let mut out = zeros(a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for (k, x) in row.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for j in 0..cols {
                out[i][j] += x * &b[k][j];
            }
        }
    }
    out
}

pub fn vec_mul(v: &[Int], a: &IMat) -> Vec<Int> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut out = vec![Int::zero(); cols];
    for (k, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for j in 0..cols {
            out[j] += x * &a[k][j];
        }
    }
    out
}

pub fn transpose(a: &IMat) -> IMat {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Fraction-free determinant (Bareiss).
pub fn det(a: &IMat) -> Int {
    let n = a.len();
    if n == 0 {
        return Int::one();
    }
    let mut m = a.clone();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Int::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Row Hermite normal form with transform: returns `(h, t)` with `t · a = h`,
/// `t` unimodular, nonzero rows of `h` first and in echelon form.
pub fn hnf_with_transform(a: &IMat) -> (IMat, IMat) {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut h = a.clone();
    let mut t = identity(rows);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        for i in r + 1..rows {
            if h[i][c].is_zero() {
                continue;
            }
            if h[r][c].is_zero() {
                h.swap(r, i);
                t.swap(r, i);
                continue;
            }
            let e = h[r][c].extended_gcd(&h[i][c]);
            let (x, y) = (e.x, e.y);
            let u = &h[r][c] / &e.gcd;
            let v = &h[i][c] / &e.gcd;
            combine_rows(&mut h, r, i, &x, &y, &u, &v);
            combine_rows(&mut t, r, i, &x, &y, &u, &v);
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            negate_row(&mut h, r);
            negate_row(&mut t, r);
        }
        for i in 0..r {
            let q = h[i][c].div_floor(&h[r][c]);
            if !q.is_zero() {
                sub_row(&mut h, i, r, &q);
                sub_row(&mut t, i, r, &q);
            }
        }
        r += 1;
    }
    (h, t)
}

fn combine_rows(m: &mut IMat, r: usize, i: usize, x: &Int, y: &Int, u: &Int, v: &Int) {
    let cols = m[r].len();
    for j in 0..cols {
        let a = m[r][j].clone();
        let b = m[i][j].clone();
        m[r][j] = x * &a + y * &b;
        m[i][j] = u * &b - v * &a;
    }
}

fn negate_row(m: &mut IMat, r: usize) {
    for x in m[r].iter_mut() {
        *x = -&*x;
    }
}

fn sub_row(m: &mut IMat, i: usize, r: usize, q: &Int) {
    let src = m[r].clone();
    for (x, s) in m[i].iter_mut().zip(src.iter()) {
        *x -= q * s;
    }
}

/// Nonzero rows of the row Hermite normal form.
pub fn hnf(a: &IMat) -> IMat {
    let (h, _) = hnf_with_transform(a);
    h.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect()
}

pub fn rank(a: &IMat) -> usize {
    hnf(a).len()
}

/// Integer row vector `x` with `x · a = b`, if one exists.
pub fn solve_left(a: &IMat, b: &[Int]) -> Option<Vec<Int>> {
    let (h, t) = hnf_with_transform(a);
    let mut rest = b.to_vec();
    let mut coeffs = vec![Int::zero(); a.len()];
    for (r, row) in h.iter().enumerate() {
        let Some(c) = row.iter().position(|x| !x.is_zero()) else {
            break;
        };
        let (q, rem) = rest[c].div_rem(&row[c]);
        if !rem.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for (x, y) in rest.iter_mut().zip(row.iter()) {
                *x -= &q * y;
            }
            coeffs[r] = q;
        }
    }
    if rest.iter().any(|x| !x.is_zero()) {
        return None;
    }
    Some(vec_mul(&coeffs, &t))
}

/// Basis of the integer left kernel `{x : x · a = 0}`.
pub fn left_kernel(a: &IMat) -> IMat {
    let (h, t) = hnf_with_transform(a);
    h.iter()
        .zip(t)
        .filter(|(r, _)| r.iter().all(|x| x.is_zero()))
        .map(|(_, tr)| tr)
        .collect()
}

/// Diagonal of the Smith normal form (absolute values, including zeros), length `min(rows, cols)`.
pub fn smith_diagonal(a: &IMat) -> Vec<Int> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut m = a.clone();
    let n = rows.min(cols);
    for k in 0..n {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    if m[i][j].is_zero() {
                        continue;
                    }
                    if best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish_smith(m, n);
            };
            m.swap(k, pi);
            for row in m.iter_mut() {
                row.swap(k, pj);
            }
            let p = m[k][k].clone();
            let mut clean = true;
            for i in k + 1..rows {
                let q = m[i][k].div_floor(&p);
                if !q.is_zero() {
                    sub_row(&mut m, i, k, &q);
                }
                if !m[i][k].is_zero() {
                    clean = false;
                }
            }
            for j in k + 1..cols {
                let q = m[k][j].div_floor(&p);
                if !q.is_zero() {
                    for row in m.iter_mut() {
                        let s = &q * &row[k];
                        row[j] -= s;
                    }
                }
                if !m[k][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let stray = (k + 1..rows)
                .flat_map(|i| (k + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !m[i][j].is_multiple_of(&p));
            match stray {
                Some((i, _)) => {
                    let src = m[i].clone();
                    for (x, s) in m[k].iter_mut().zip(src.iter()) {
                        *x += s;
                    }
                }
                None => break,
            }
        }
    }
    finish_smith(m, n)
}

fn finish_smith(m: IMat, n: usize) -> Vec<Int> {
    let mut d: Vec<Int> = (0..n).map(|i| m[i][i].abs()).collect();
    let nz: Vec<Int> = d.iter().filter(|x| !x.is_zero()).cloned().collect();
    let zeros = d.len() - nz.len();
    d = nz;
    d.sort();
    d.extend(std::iter::repeat(Int::zero()).take(zeros));
    d
}

pub fn to_rational(a: &IMat) -> QMat {
    a.iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect()
}

/// Inverse of a square rational matrix.
pub fn inverse_q(a: &QMat) -> Option<QMat> {
    let n = a.len();
    let mut m: QMat = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            let src = m[c].clone();
            for (x, s) in m[i].iter_mut().zip(src.iter()) {
                *x -= &f * s;
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Least common denominator of a rational matrix.
pub fn common_denominator(a: &QMat) -> Int {
    a.iter()
        .flatten()
        .fold(Int::one(), |acc, x| acc.lcm(x.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn m(rows: &[&[i64]]) -> IMat {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn smith_small() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        assert_eq!(smith_diagonal(&a), vec![int(2), int(6), int(12)]);
        assert_eq!(det(&a).abs(), int(144));
    }

    #[test]
    fn hnf_and_solve() {
        let a = m(&[&[4, 6], &[6, 9], &[2, 2]]);
        let h = hnf(&a);
        assert_eq!(h, m(&[&[2, 0], &[0, 1]]));
        let x = solve_left(&a, &[int(2), int(1)]).unwrap();
        assert_eq!(vec_mul(&x, &a), vec![int(2), int(1)]);
        assert!(solve_left(&m(&[&[2, 0]]), &[int(1), int(0)]).is_none());
        let k = left_kernel(&a);
        assert_eq!(k.len(), 1);
        assert!(vec_mul(&k[0], &a).iter().all(|x| x.is_zero()));
    }
}
