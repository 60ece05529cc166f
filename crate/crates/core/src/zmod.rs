//! Linear algebra over `Z/p^k`.

use crate::arith::{self, Int};
use crate::zmat::{self, IMat};
use num_integer::Integer;
use num_traits::{One, Zero};

#[derive(Debug, Clone)]
pub struct ZModPk {
    pub p: Int,
    pub k: u32,
    pub modulus: Int,
}

/// Smith form `s = left · a · right` over `Z/p^k`, diagonal entries exactly `p^v` (or 0).
#[derive(Debug, Clone)]
pub struct ModSmith {
    pub diag: Vec<Int>,
    pub left: IMat,
    pub right: IMat,
}

impl ZModPk {
    pub fn new(p: &Int, k: u32) -> Self {
        ZModPk {
            p: p.clone(),
            k,
            modulus: arith::pow(p, k),
        }
    }

    pub fn reduce(&self, x: &Int) -> Int {
        arith::modp(x, &self.modulus)
    }

    pub fn reduce_vec(&self, v: &[Int]) -> Vec<Int> {
        v.iter().map(|x| self.reduce(x)).collect()
    }

    pub fn reduce_mat(&self, a: &IMat) -> IMat {
        a.iter().map(|r| self.reduce_vec(r)).collect()
    }

    /// Valuation of a residue; `None` for zero.
    pub fn valuation(&self, x: &Int) -> Option<u32> {
        let r = self.reduce(x);
        if r.is_zero() {
            None
        } else {
            Some(arith::valuation(&r, &self.p))
        }
    }

    pub fn inv(&self, x: &Int) -> Option<Int> {
        arith::inv_mod(x, &self.modulus)
    }

    pub fn mul_mat(&self, a: &IMat, b: &IMat) -> IMat {
        self.reduce_mat(&zmat::mul(a, b))
    }

    pub fn smith(&self, a: &IMat) -> ModSmith {
        let rows = a.len();
        let cols = a.first().map_or(0, |r| r.len());
        let mut m = self.reduce_mat(a);
        let mut left = zmat::identity(rows);
        let mut right = zmat::identity(cols);
        let n = rows.min(cols);
        for t in 0..n {
            let mut best: Option<(u32, usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if let Some(v) = self.valuation(&m[i][j]) {
                        if best.map_or(true, |(bv, _, _)| v < bv) {
                            best = Some((v, i, j));
                        }
                    }
                }
            }
            let Some((v, pi, pj)) = best else { break };
            m.swap(t, pi);
            left.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            for row in right.iter_mut() {
                row.swap(t, pj);
            }
            let pv = arith::pow(&self.p, v);
            let unit = &m[t][t] / &pv;
            let uinv = self.inv(&unit).expect("pivot quotient is a unit");
            for x in m[t].iter_mut() {
                *x = self.reduce(&(&*x * &uinv));
            }
            for x in left[t].iter_mut() {
                *x = self.reduce(&(&*x * &uinv));
            }
            for i in 0..rows {
                if i == t || m[i][t].is_zero() {
                    continue;
                }
                let f = &m[i][t] / &pv;
                let (src_m, src_l) = (m[t].clone(), left[t].clone());
                for (x, s) in m[i].iter_mut().zip(&src_m) {
                    *x = self.reduce(&(&*x - &f * s));
                }
                for (x, s) in left[i].iter_mut().zip(&src_l) {
                    *x = self.reduce(&(&*x - &f * s));
                }
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let f = &m[t][j] / &pv;
                for row in m.iter_mut() {
                    let s = &f * &row[t];
                    row[j] = self.reduce(&(&row[j] - s));
                }
                for row in right.iter_mut() {
                    let s = &f * &row[t];
                    row[j] = self.reduce(&(&row[j] - s));
                }
            }
        }
        ModSmith {
            diag: (0..n).map(|i| m[i][i].clone()).collect(),
            left,
            right,
        }
    }

    /// Some `x` with `x · a ≡ b`, if solvable.
    pub fn solve_left(&self, a: &IMat, b: &[Int]) -> Option<Vec<Int>> {
        let rows = a.len();
        let s = self.smith(a);
        let bq = zmat::vec_mul(b, &s.right);
        let mut y = vec![Int::zero(); rows];
        for (j, c) in bq.iter().enumerate() {
            let c = self.reduce(c);
            let d = s.diag.get(j).cloned().unwrap_or_else(Int::zero);
            if d.is_zero() {
                if !c.is_zero() {
                    return None;
                }
                continue;
            }
            if !c.is_multiple_of(&d) {
                return None;
            }
            y[j] = &c / &d;
        }
        Some(self.reduce_vec(&zmat::vec_mul(&y, &s.left)))
    }

    /// Inverse of a square matrix over `Z/p^k`.
    pub fn inverse(&self, a: &IMat) -> Option<IMat> {
        let s = self.smith(a);
        if s.diag.iter().any(|d| !d.is_one()) {
            return None;
        }
        // s.left · a · s.right = I  =>  a⁻¹ = s.right · s.left
        Some(self.mul_mat(&s.right, &s.left))
    }

    /// Exponents `v_i` of the Smith form (capped at `k` for zero entries).
    pub fn smith_exponents(&self, a: &IMat) -> Vec<u32> {
        self.smith(a)
            .diag
            .iter()
            .map(|d| self.valuation(d).unwrap_or(self.k))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn smith_mod_and_solve() {
        let r = ZModPk::new(&int(3), 3);
        let a = vec![vec![int(3), int(6)], vec![int(9), int(2)]];
        let s = r.smith(&a);
        let check = r.mul_mat(&r.mul_mat(&s.left, &a), &s.right);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { s.diag[i].clone() } else { int(0) };
                assert_eq!(check[i][j], want);
            }
        }
        assert!(r.solve_left(&a, &[int(1), int(5)]).is_none());
        let x = r.solve_left(&a, &[int(12), int(8)]).unwrap();
        assert_eq!(r.reduce_vec(&zmat::vec_mul(&x, &a)), vec![int(12), int(8)]);
        let u = vec![vec![int(1), int(2)], vec![int(3), int(7)]];
        let ui = r.inverse(&u).unwrap();
        assert_eq!(r.mul_mat(&u, &ui), zmat::identity(2));
    }
}
