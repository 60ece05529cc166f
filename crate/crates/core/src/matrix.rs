//! Matrices over the order.

use crate::algebra::{Algebra, Elem};
use crate::arith::{self, Int};
use crate::error::{Error, Result};
use crate::zmat::{self, IMat};
use num_traits::One;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<Elem>>,
}

impl Mat {
    pub fn from_entries(entries: Vec<Vec<Elem>>) -> Self {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        Mat { rows, cols, entries }
    }

    pub fn zeros(alg: &Algebra, rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            entries: vec![vec![alg.zero(); cols]; rows],
        }
    }

    pub fn identity(alg: &Algebra, n: usize) -> Self {
        Self::scalar(alg, n, &Int::one())
    }

    pub fn scalar(alg: &Algebra, n: usize, c: &Int) -> Self {
        let mut m = Self::zeros(alg, n, n);
        for i in 0..n {
            m.entries[i][i] = alg.from_int(c);
        }
        m
    }

    pub fn diag(alg: &Algebra, d: &[Elem]) -> Self {
        let mut m = Self::zeros(alg, d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.entries[i][i] = x.clone();
        }
        m
    }

    pub fn from_ints(alg: &Algebra, rows: &[Vec<i64>]) -> Self {
        Self::from_entries(
            rows.iter()
                .map(|r| r.iter().map(|&x| alg.from_int(&Int::from(x))).collect())
                .collect(),
        )
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.entries[i][j]
    }

    pub fn mul(&self, alg: &Algebra, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix shapes do not match");
        let mut out = Mat::zeros(alg, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.entries[i][k];
                if alg.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.entries[k][j];
                    if alg.is_zero(b) {
                        continue;
                    }
                    let p = alg.mul(a, b);
                    let slot = &mut out.entries[i][j];
                    for (s, v) in slot.iter_mut().zip(p) {
                        *s += v;
                    }
                }
            }
        }
        out
    }

    pub fn try_mul(&self, alg: &Algebra, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul(alg, other))
    }

    pub fn add(&self, alg: &Algebra, other: &Mat) -> Mat {
        self.zip_with(other, |a, b| alg.add(a, b))
    }

    pub fn sub(&self, alg: &Algebra, other: &Mat) -> Mat {
        self.zip_with(other, |a, b| alg.sub(a, b))
    }

    fn zip_with(&self, other: &Mat, f: impl Fn(&[Int], &[Int]) -> Elem) -> Mat {
        Mat::from_entries(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(r, s)| r.iter().zip(s).map(|(a, b)| f(a, b)).collect())
                .collect(),
        )
    }

    pub fn scale(&self, alg: &Algebra, c: &Int) -> Mat {
        self.map(|x| alg.scale(x, c))
    }

    pub fn neg(&self, alg: &Algebra) -> Mat {
        self.map(|x| alg.neg(x))
    }

    pub fn map(&self, f: impl Fn(&Elem) -> Elem) -> Mat {
        Mat::from_entries(self.entries.iter().map(|r| r.iter().map(&f).collect()).collect())
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_entries(
            (0..self.cols)
                .map(|j| (0..self.rows).map(|i| self.entries[i][j].clone()).collect())
                .collect(),
        )
    }

    /// `M* = ι(M)ᵀ`.
    pub fn star(&self, alg: &Algebra) -> Mat {
        self.transpose().map(|x| alg.involute(x))
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat {
        Mat::from_entries(
            (r0..r0 + rows)
                .map(|i| self.entries[i][c0..c0 + cols].to_vec())
                .collect(),
        )
    }

    /// `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Mat {
        let mut entries = Vec::new();
        for i in 0..a.rows {
            let mut r = a.entries[i].clone();
            r.extend(b.entries[i].iter().cloned());
            entries.push(r);
        }
        for i in 0..c.rows {
            let mut r = c.entries[i].clone();
            r.extend(d.entries[i].iter().cloned());
            entries.push(r);
        }
        Mat::from_entries(entries)
    }

    pub fn block_diag(alg: &Algebra, a: &Mat, d: &Mat) -> Mat {
        Mat::from_blocks(a, &Mat::zeros(alg, a.rows, d.cols), &Mat::zeros(alg, d.rows, a.cols), d)
    }

    pub fn is_zero(&self, alg: &Algebra) -> bool {
        self.entries.iter().flatten().all(|x| alg.is_zero(x))
    }

    /// Integer matrix acting on row vectors: block `(i, j)` is the right multiplication by `M_ij`.
    pub fn restriction_of_scalars(&self, alg: &Algebra) -> IMat {
        let d = alg.dim();
        let mut out = zmat::zeros(self.rows * d, self.cols * d);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let r = alg.right_mult_matrix(&self.entries[i][j]);
                for u in 0..d {
                    for v in 0..d {
                        out[i * d + u][j * d + v] = r[u][v].clone();
                    }
                }
            }
        }
        out
    }

    /// Inverse of [`Mat::restriction_of_scalars`].
    pub fn from_restriction_of_scalars(alg: &Algebra, a: &IMat) -> Mat {
        let d = alg.dim();
        let one = alg.one();
        let rows = a.len() / d;
        let cols = a.first().map_or(0, |r| r.len()) / d;
        let mut entries = vec![vec![alg.zero(); cols]; rows];
        for i in 0..rows {
            for j in 0..cols {
                let blk: IMat = (0..d).map(|u| a[i * d + u][j * d..j * d + d].to_vec()).collect();
                entries[i][j] = zmat::vec_mul(&one, &blk);
            }
        }
        Mat::from_entries(entries)
    }

    /// Smallest positive `m` with `m·M⁻¹` integral, together with `m·M⁻¹`.
    pub fn scale_and_adjugate(&self, alg: &Algebra) -> Result<(Int, Mat)> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("matrix is not square".into()));
        }
        let ros = zmat::to_rational(&self.restriction_of_scalars(alg));
        let inv = zmat::inverse_q(&ros).ok_or(Error::Singular)?;
        let m = zmat::common_denominator(&inv);
        let scaled: IMat = inv
            .iter()
            .map(|r| r.iter().map(|x| (x * num_rational::BigRational::from_integer(m.clone())).to_integer()).collect())
            .collect();
        Ok((m, Mat::from_restriction_of_scalars(alg, &scaled)))
    }

    pub fn scale_of_inverse(&self, alg: &Algebra) -> Result<Int> {
        Ok(self.scale_and_adjugate(alg)?.0)
    }

    /// Exact inverse if it has entries in the order.
    pub fn inverse_in_order(&self, alg: &Algebra) -> Result<Option<Mat>> {
        let (m, adj) = self.scale_and_adjugate(alg)?;
        Ok(if m.is_one() { Some(adj) } else { None })
    }

    /// `|det|` of the restriction of scalars; equals `N(det)` (quadratic) or the square of the reduced norm (quaternion).
    pub fn ros_det(&self, alg: &Algebra) -> Int {
        use num_traits::Signed;
        zmat::det(&self.restriction_of_scalars(alg)).abs()
    }

    pub fn is_unimodular(&self, alg: &Algebra) -> bool {
        self.is_square() && self.ros_det(alg).is_one()
    }

    /// Determinant over a commutative order (Laplace expansion over the first row).
    pub fn det_commutative(&self, alg: &Algebra) -> Elem {
        assert!(!alg.is_quaternion(), "determinant needs a commutative order");
        let n = self.rows;
        match n {
            0 => alg.one(),
            1 => self.entries[0][0].clone(),
            _ => {
                let mut acc = alg.zero();
                for j in 0..n {
                    if alg.is_zero(&self.entries[0][j]) {
                        continue;
                    }
                    let minor = self.minor(&(1..n).collect::<Vec<_>>(), &(0..n).filter(|&c| c != j).collect::<Vec<_>>());
                    let t = alg.mul(&self.entries[0][j], &minor.det_commutative(alg));
                    acc = if j % 2 == 0 { alg.add(&acc, &t) } else { alg.sub(&acc, &t) };
                }
                acc
            }
        }
    }

    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Mat {
        Mat::from_entries(
            rows.iter()
                .map(|&i| cols.iter().map(|&j| self.entries[i][j].clone()).collect())
                .collect(),
        )
    }

    /// Reduce every coefficient modulo `m`.
    pub fn reduce(&self, m: &Int) -> Mat {
        self.map(|x| x.iter().map(|c| arith::modp(c, m)).collect())
    }

    pub fn congruent(&self, other: &Mat, m: &Int) -> bool {
        self.reduce(m) == other.reduce(m)
    }

    pub fn to_file(&self) -> MatrixFile {
        MatrixFile {
            n: if self.is_square() { Some(self.rows) } else { None },
            entries: self.entries.clone(),
            m: None,
        }
    }

    pub fn format(&self, alg: &Algebra) -> String {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|x| alg.format_elem(x)).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

/// `{"n": .., "entries": [[coeff-vector, ..], ..], "m": ..}`; `m` only for similitude files.
#[serde_with::serde_as]
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde_as(as = "Vec<Vec<Vec<crate::arith::JsonInt>>>")]
    pub entries: Vec<Vec<Vec<Int>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    #[serde_as(as = "Option<crate::arith::JsonInt>")]
    pub m: Option<Int>,
}

impl MatrixFile {
    pub fn to_mat(&self, alg: &Algebra) -> Result<Mat> {
        let rows = self.entries.len();
        if rows == 0 {
            return Err(Error::Malformed("entries: matrix has no rows".into()));
        }
        let cols = self.entries[0].len();
        for (i, r) in self.entries.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Malformed(format!("entries[{i}]: expected {cols} columns, found {}", r.len())));
            }
            for (j, x) in r.iter().enumerate() {
                if x.len() != alg.dim() {
                    return Err(Error::Malformed(format!(
                        "entries[{i}][{j}]: expected {} coefficients, found {}",
                        alg.dim(),
                        x.len()
                    )));
                }
            }
        }
        if let Some(n) = self.n {
            if n != rows || n != cols {
                return Err(Error::Malformed(format!("n: declared {n} but entries are {rows}x{cols}")));
            }
        }
        Ok(Mat::from_entries(self.entries.clone()))
    }
}

pub fn is_identity(alg: &Algebra, m: &Mat) -> bool {
    m.is_square() && *m == Mat::identity(alg, m.rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn ros_round_trip_and_det() {
        let alg = Algebra::quadratic(-6).unwrap();
        let rho = alg.basis_vector(1);
        let two = alg.from_int(&int(2));
        let four = alg.from_int(&int(4));
        let m = Mat::from_entries(vec![vec![two, rho.clone()], vec![four, rho]]);
        let r = m.restriction_of_scalars(&alg);
        assert_eq!(Mat::from_restriction_of_scalars(&alg, &r), m);
        // det = 2ρ − 4ρ = −2ρ, norm 24
        assert_eq!(m.det_commutative(&alg), alg.scale(&alg.basis_vector(1), &int(-2)));
        assert_eq!(m.ros_det(&alg), int(24));
    }
}
