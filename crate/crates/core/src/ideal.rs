//! Left ideals of the order as integer lattices in Hermite normal form.

use crate::algebra::{Algebra, Elem};
use crate::arith::{self, Int};
use crate::error::{Error, Result};
use crate::lattice;
use crate::zmat::{self, IMat};
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use std::ops::ControlFlow;

#[serde_with::serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LeftIdeal {
    /// Rows are coordinates of a Z-basis, in Hermite normal form.
    #[serde_as(as = "Vec<Vec<crate::arith::JsonInt>>")]
    pub basis: IMat,
}

/// Outcome of a principality test. `checked` counts the elements of the right norm that were examined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Principality {
    pub generator: Option<Elem>,
    pub checked: usize,
}

impl LeftIdeal {
    pub fn unit(alg: &Algebra) -> Self {
        LeftIdeal {
            basis: zmat::identity(alg.dim()),
        }
    }

    pub fn from_generators(alg: &Algebra, gens: &[Elem]) -> Result<Self> {
        let mut rows = Vec::new();
        for g in gens {
            if g.len() != alg.dim() {
                return Err(Error::AlgebraMismatch);
            }
            for r in 0..alg.dim() {
                rows.push(alg.mul(&alg.basis_vector(r), g));
            }
        }
        Self::from_lattice_rows(alg, &rows)
    }

    /// HNF of the lattice spanned by `rows`, which must already be closed under left multiplication.
    pub fn from_lattice_rows(alg: &Algebra, rows: &IMat) -> Result<Self> {
        let h = zmat::hnf(rows);
        if h.is_empty() {
            return Err(Error::ZeroIdeal);
        }
        if h.len() != alg.dim() {
            return Err(Error::Malformed("lattice does not have full rank".into()));
        }
        let out = LeftIdeal { basis: h };
        if !out.is_left_closed(alg) {
            return Err(Error::Malformed("lattice is not a left ideal".into()));
        }
        Ok(out)
    }

    pub fn principal(alg: &Algebra, x: &Elem) -> Result<Self> {
        Self::from_generators(alg, std::slice::from_ref(x))
    }

    pub fn from_int(alg: &Algebra, c: &Int) -> Result<Self> {
        Self::principal(alg, &alg.from_int(c))
    }

    fn is_left_closed(&self, alg: &Algebra) -> bool {
        (0..alg.dim()).all(|r| {
            self.basis
                .iter()
                .all(|v| self.contains(&alg.mul(&alg.basis_vector(r), v)))
        })
    }

    pub fn is_right_closed(&self, alg: &Algebra) -> bool {
        (0..alg.dim()).all(|r| {
            self.basis
                .iter()
                .all(|v| self.contains(&alg.mul(v, &alg.basis_vector(r))))
        })
    }

    pub fn contains(&self, x: &[Int]) -> bool {
        zmat::solve_left(&self.basis, x).is_some()
    }

    pub fn contains_ideal(&self, other: &LeftIdeal) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// `[Λ : I]`.
    pub fn index(&self) -> Int {
        zmat::det(&self.basis).abs()
    }

    /// Norm for quadratic orders, reduced norm for quaternion orders.
    pub fn norm(&self, alg: &Algebra) -> Int {
        let idx = self.index();
        if alg.is_quaternion() {
            arith::exact_sqrt(&idx).expect("index of a left ideal in a maximal order is a square")
        } else {
            idx
        }
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.index().is_one()
    }

    pub fn sum(&self, alg: &Algebra, other: &LeftIdeal) -> Result<Self> {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Self::from_lattice_rows(alg, &rows)
    }

    pub fn intersect(&self, alg: &Algebra, other: &LeftIdeal) -> Result<Self> {
        let mut stacked = self.basis.clone();
        stacked.extend(other.basis.iter().cloned());
        let d = alg.dim();
        let ker = zmat::left_kernel(&stacked);
        let rows: IMat = ker.iter().map(|u| zmat::vec_mul(&u[..d], &self.basis)).collect();
        Self::from_lattice_rows(alg, &rows)
    }

    /// `I·x`, a left ideal for any nonzero `x`.
    pub fn mul_element(&self, alg: &Algebra, x: &Elem) -> Result<Self> {
        let rows: IMat = self.basis.iter().map(|v| alg.mul(v, x)).collect();
        Self::from_lattice_rows(alg, &rows)
    }

    /// `I·J` for a two-sided `J`.
    pub fn mul_twosided(&self, alg: &Algebra, j: &LeftIdeal) -> Result<Self> {
        if !j.is_right_closed(alg) {
            return Err(Error::NotTwoSided);
        }
        let mut rows = Vec::new();
        for a in &self.basis {
            for b in &j.basis {
                rows.push(alg.mul(a, b));
            }
        }
        Self::from_lattice_rows(alg, &rows)
    }

    /// `ι(I)`; a left ideal again in the commutative case.
    pub fn involute(&self, alg: &Algebra) -> Result<Self> {
        if alg.is_quaternion() {
            return Err(Error::Unsupported("conjugate of a quaternion left ideal is a right ideal".into()));
        }
        let rows: IMat = self.basis.iter().map(|v| alg.involute(v)).collect();
        Self::from_lattice_rows(alg, &rows)
    }

    /// Exact division by a positive integer dividing every coordinate.
    pub fn div_int(&self, alg: &Algebra, c: &Int) -> Result<Self> {
        let mut rows = Vec::new();
        for v in &self.basis {
            let mut r = Vec::new();
            for x in v {
                if !x.is_multiple_of(c) {
                    return Err(Error::NotIntegral);
                }
                r.push(x / c);
            }
            rows.push(r);
        }
        Self::from_lattice_rows(alg, &rows)
    }

    /// Smallest positive integer in the ideal.
    pub fn min_integer(&self, alg: &Algebra) -> Int {
        let one = alg.one();
        let idx = self.index();
        let mut best = idx.clone();
        for d in divisors(&idx) {
            if self.contains(&alg.scale(&one, &d)) {
                best = best.min(d);
            }
        }
        best
    }

    /// Gram matrix of the norm form restricted to the ideal (with respect to `basis`).
    pub fn norm_gram(&self, alg: &Algebra) -> IMat {
        lattice::restrict_gram(alg.norm_gram(), &self.basis)
    }

    /// Calls `f` on every element of the ideal whose norm is at most `bound`.
    pub fn for_each_short_element<F>(&self, alg: &Algebra, bound: &Int, mut f: F)
    where
        F: FnMut(&Elem) -> ControlFlow<()>,
    {
        let g = self.norm_gram(alg);
        lattice::for_each_short_vector(&g, bound, |c| {
            let x = zmat::vec_mul(c, &self.basis);
            f(&x)
        });
    }

    /// Complete search for a generator: `I = Λx` iff `x ∈ I` and `N(x) = N(I)`.
    pub fn principality(&self, alg: &Algebra) -> Principality {
        let target = self.norm(alg);
        let mut checked = 0;
        let mut generator = None;
        self.for_each_short_element(alg, &target, |x| {
            if alg.norm(x) == target {
                checked += 1;
                generator = Some(x.clone());
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        if let Some(g) = &generator {
            debug_assert_eq!(LeftIdeal::principal(alg, g).as_ref(), Ok(self));
        }
        Principality { generator, checked }
    }

    pub fn is_principal(&self, alg: &Algebra) -> Option<Elem> {
        self.principality(alg).generator
    }

    /// Two generators `(a, x)` with `a` the least positive integer in the ideal; `x` is absent if `I = Λa`.
    pub fn two_generators(&self, alg: &Algebra) -> (Int, Option<Elem>) {
        let a = self.min_integer(alg);
        let base = LeftIdeal::from_int(alg, &a).expect("nonzero integer");
        if base == *self {
            return (a, None);
        }
        let mut cands: Vec<Elem> = self.basis.iter().rev().cloned().collect();
        for i in 0..self.basis.len() {
            for j in 0..self.basis.len() {
                if i != j {
                    cands.push(alg.add(&self.basis[i], &self.basis[j]));
                    cands.push(alg.sub(&self.basis[i], &self.basis[j]));
                }
            }
        }
        cands.sort_by_key(|x| alg.norm(x));
        for x in &cands {
            if let Ok(s) = base.sum(alg, &LeftIdeal::principal(alg, x).expect("nonzero")) {
                if s == *self {
                    return (a, Some(x.clone()));
                }
            }
        }
        let mut found = None;
        let bound = &self.norm(alg) * &a * &a * 4u32;
        self.for_each_short_element(alg, &bound, |x| {
            let s = base.sum(alg, &LeftIdeal::principal(alg, x).expect("nonzero"));
            if s.as_ref() == Ok(self) {
                found = Some(x.clone());
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        (a, found)
    }

    /// Display as `(a, x)`, e.g. `(2, rho)`.
    pub fn format(&self, alg: &Algebra) -> String {
        match self.two_generators(alg) {
            (a, None) => format!("({a})"),
            (a, Some(x)) => format!("({a}, {})", alg.format_elem(&x)),
        }
    }
}

fn divisors(n: &Int) -> Vec<Int> {
    let mut out = vec![Int::one()];
    for (p, e) in arith::factor(n) {
        let mut next = Vec::new();
        for d in &out {
            let mut q = d.clone();
            for _ in 0..=e {
                next.push(q.clone());
                q *= &p;
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Product of arbitrary ideals in a quadratic order.
pub fn product_commutative(alg: &Algebra, a: &LeftIdeal, b: &LeftIdeal) -> Result<LeftIdeal> {
    if alg.is_quaternion() {
        return a.mul_twosided(alg, b);
    }
    let mut rows = Vec::new();
    for x in &a.basis {
        for y in &b.basis {
            rows.push(alg.mul(x, y));
        }
    }
    LeftIdeal::from_lattice_rows(alg, &rows)
}

/// `a·b⁻¹` for quadratic ideals, when integral.
pub fn quotient_commutative(alg: &Algebra, a: &LeftIdeal, b: &LeftIdeal) -> Result<LeftIdeal> {
    let prod = product_commutative(alg, a, &b.involute(alg)?)?;
    prod.div_int(alg, &b.norm(alg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn ideals_in_z_sqrt_minus6() {
        let alg = Algebra::quadratic(-6).unwrap();
        let rho = alg.basis_vector(1);
        let p2 = LeftIdeal::from_generators(&alg, &[alg.from_int(&int(2)), rho.clone()]).unwrap();
        let p3 = LeftIdeal::from_generators(&alg, &[alg.from_int(&int(3)), rho.clone()]).unwrap();
        assert_eq!(p2.norm(&alg), int(2));
        assert_eq!(product_commutative(&alg, &p2, &p3).unwrap(), LeftIdeal::principal(&alg, &rho).unwrap());
        assert!(p2.is_principal(&alg).is_none());
        assert_eq!(p2.format(&alg), "(2, rho)");
        let six = LeftIdeal::from_generators(&alg, &[alg.from_int(&int(6)), alg.scale(&rho, &int(2))]).unwrap();
        assert_eq!(six, p3.mul_element(&alg, &alg.from_int(&int(2))).unwrap());
        assert_eq!(p2.sum(&alg, &LeftIdeal::unit(&alg)).unwrap(), LeftIdeal::unit(&alg));
        assert_eq!(p2.intersect(&alg, &p3).unwrap(), LeftIdeal::principal(&alg, &rho).unwrap());
    }
}
