//! Maximal orders in imaginary quadratic fields and definite quaternion algebras over Q.
//!
//! Elements are integer coordinate vectors over a fixed order basis.

use crate::arith::{self, int, Int};
use crate::error::{Error, Result};
use crate::zmat::{self, IMat, QMat};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub type Elem = Vec<Int>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraKind {
    Quadratic { d: Int },
    Quaternion { a: Int, b: Int },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlaceKind {
    SplitFirst,
    SplitSecond,
    Inert,
    Ramified,
    Split,
}

#[serde_with::serde_as]
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Place {
    #[serde_as(as = "crate::arith::JsonInt")]

    pub p: Int,
    pub kind: PlaceKind,
}

impl Place {
    pub fn new(p: impl Into<Int>, kind: PlaceKind) -> Self {
        Place { p: p.into(), kind }
    }
}

impl std::fmt::Display for Place {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let k = match self.kind {
            PlaceKind::SplitFirst => "split-first",
            PlaceKind::SplitSecond => "split-second",
            PlaceKind::Inert => "inert",
            PlaceKind::Ramified => "ramified",
            PlaceKind::Split => "split",
        };
        write!(f, "{} ({k})", self.p)
    }
}

#[derive(Debug, Clone)]
pub struct Algebra {
    pub kind: AlgebraKind,
    /// Row `r` holds the standard coordinates of the `r`-th order basis element.
    pub basis: QMat,
    basis_inv: QMat,
    /// `table[r][s]` = coordinates of `b_r * b_s`.
    table: Vec<Vec<Elem>>,
    /// `coords(ι(x)) = coords(x) · involution`.
    involution: IMat,
    /// `gram[r][s] = trd(b_r ι(b_s))`; the norm form is half of it.
    gram: IMat,
    traces: Vec<Int>,
    one: Elem,
    discriminant: Int,
}

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.basis == other.basis
    }
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(int(v))
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(int(n), int(d))
}

impl Algebra {
    /// Ring of integers of `Q(√d)`.
    pub fn quadratic(d: i64) -> Result<Self> {
        let d = int(d);
        let basis = if arith::modp(&d, &int(4)) == int(1) {
            vec![vec![q(1), q(0)], vec![frac(1, 2), frac(1, 2)]]
        } else {
            vec![vec![q(1), q(0)], vec![q(0), q(1)]]
        };
        Self::quadratic_with_basis(d, basis)
    }

    pub fn quadratic_with_basis(d: Int, basis: QMat) -> Result<Self> {
        if !d.is_negative() || !arith::is_squarefree(&d) {
            return Err(Error::InvalidAlgebra(format!(
                "d = {d} must be a negative squarefree integer"
            )));
        }
        if basis.len() != 2 || basis.iter().any(|r| r.len() != 2) {
            return Err(Error::InvalidAlgebra("quadratic order basis needs 2 vectors of length 2".into()));
        }
        Self::build(AlgebraKind::Quadratic { d }, basis)
    }

    /// Order in the definite algebra `(a, b | Q)` spanned by `basis` (standard coordinates over 1, i, j, k).
    pub fn quaternion(a: i64, b: i64, basis: QMat) -> Result<Self> {
        Self::quaternion_big(int(a), int(b), basis)
    }

    pub fn quaternion_big(a: Int, b: Int, basis: QMat) -> Result<Self> {
        if !a.is_negative() || !b.is_negative() {
            return Err(Error::InvalidAlgebra(format!(
                "(a, b) = ({a}, {b}) is not definite; both must be negative"
            )));
        }
        if basis.len() != 4 || basis.iter().any(|r| r.len() != 4) {
            return Err(Error::InvalidAlgebra("quaternion order basis needs 4 vectors of length 4".into()));
        }
        Self::build(AlgebraKind::Quaternion { a, b }, basis)
    }

    /// Hurwitz order in `(-1, -1 | Q)`, ramified at 2.
    pub fn hurwitz() -> Self {
        let basis = vec![
            vec![q(1), q(0), q(0), q(0)],
            vec![q(0), q(1), q(0), q(0)],
            vec![q(0), q(0), q(1), q(0)],
            vec![frac(1, 2), frac(1, 2), frac(1, 2), frac(1, 2)],
        ];
        Self::quaternion(-1, -1, basis).expect("Hurwitz order is valid")
    }

    /// Unchecked construction; closure failures are reported as errors, maximality is not checked.
    fn build(kind: AlgebraKind, basis: QMat) -> Result<Self> {
        let dim = basis.len();
        let basis_inv = zmat::inverse_q(&basis)
            .ok_or_else(|| Error::InvalidAlgebra("order basis is linearly dependent".into()))?;
        let to_order = |std: &[BigRational]| -> Option<Elem> {
            let mut out = Vec::with_capacity(dim);
            for c in 0..dim {
                let mut acc = BigRational::zero();
                for (k, s) in std.iter().enumerate() {
                    acc += s * &basis_inv[k][c];
                }
                if !acc.is_integer() {
                    return None;
                }
                out.push(acc.to_integer());
            }
            Some(out)
        };
        let mut table = vec![vec![Vec::new(); dim]; dim];
        for r in 0..dim {
            for s in 0..dim {
                let prod = std_mul(&kind, &basis[r], &basis[s]);
                table[r][s] = to_order(&prod).ok_or_else(|| {
                    Error::InvalidAlgebra(format!("product of basis elements {r} and {s} leaves the lattice"))
                })?;
            }
        }
        let mut one_std = vec![q(0); dim];
        one_std[0] = q(1);
        let one = to_order(&one_std)
            .ok_or_else(|| Error::InvalidAlgebra("lattice does not contain 1".into()))?;
        let mut involution = Vec::with_capacity(dim);
        for r in 0..dim {
            let conj: Vec<BigRational> = basis[r]
                .iter()
                .enumerate()
                .map(|(k, x)| if k == 0 { x.clone() } else { -x.clone() })
                .collect();
            involution.push(
                to_order(&conj)
                    .ok_or_else(|| Error::InvalidAlgebra("lattice is not stable under conjugation".into()))?,
            );
        }
        let mut alg = Algebra {
            kind,
            basis,
            basis_inv,
            table,
            involution,
            gram: Vec::new(),
            traces: Vec::new(),
            one,
            discriminant: Int::zero(),
        };
        let units: Vec<Elem> = (0..dim).map(|r| alg.basis_vector(r)).collect();
        alg.traces = units.iter().map(|u| alg.trace_raw(u)).collect();
        alg.gram = (0..dim)
            .map(|r| (0..dim).map(|s| alg.trace_raw(&alg.mul(&units[r], &alg.involute(&units[s])))).collect())
            .collect();
        let trace_form: IMat = (0..dim)
            .map(|r| (0..dim).map(|s| alg.trace_raw(&alg.mul(&units[r], &units[s]))).collect())
            .collect();
        let det = zmat::det(&trace_form);
        alg.discriminant = match &alg.kind {
            AlgebraKind::Quadratic { .. } => det,
            AlgebraKind::Quaternion { .. } => arith::exact_sqrt(&det.abs()).unwrap_or_else(|| det.abs()),
        };
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_quaternion(&self) -> bool {
        matches!(self.kind, AlgebraKind::Quaternion { .. })
    }

    /// Field discriminant (quadratic, negative) or reduced discriminant computed from the trace form (quaternion).
    pub fn discriminant(&self) -> &Int {
        &self.discriminant
    }

    pub fn basis_vector(&self, r: usize) -> Elem {
        let mut v = vec![Int::zero(); self.dim()];
        v[r] = Int::one();
        v
    }

    pub fn zero(&self) -> Elem {
        vec![Int::zero(); self.dim()]
    }

    pub fn one(&self) -> Elem {
        self.one.clone()
    }

    pub fn from_int(&self, c: &Int) -> Elem {
        self.one.iter().map(|x| x * c).collect()
    }

    pub fn is_zero(&self, x: &[Int]) -> bool {
        x.iter().all(|c| c.is_zero())
    }

    /// Integer value of `x` if `x ∈ Z·1`.
    pub fn as_integer(&self, x: &[Int]) -> Option<Int> {
        let i = self.one.iter().position(|c| !c.is_zero())?;
        let (v, r) = x[i].div_rem(&self.one[i]);
        if !r.is_zero() {
            return None;
        }
        if self.from_int(&v) == x {
            Some(v)
        } else {
            None
        }
    }

    pub fn add(&self, x: &[Int], y: &[Int]) -> Elem {
        x.iter().zip(y).map(|(a, b)| a + b).collect()
    }

    pub fn sub(&self, x: &[Int], y: &[Int]) -> Elem {
        x.iter().zip(y).map(|(a, b)| a - b).collect()
    }

    pub fn neg(&self, x: &[Int]) -> Elem {
        x.iter().map(|a| -a).collect()
    }

    pub fn scale(&self, x: &[Int], c: &Int) -> Elem {
        x.iter().map(|a| a * c).collect()
    }

    pub fn mul(&self, x: &[Int], y: &[Int]) -> Elem {
        let dim = self.dim();
        let mut out = vec![Int::zero(); dim];
        for r in 0..dim {
            if x[r].is_zero() {
                continue;
            }
            for s in 0..dim {
                if y[s].is_zero() {
                    continue;
                }
                let c = &x[r] * &y[s];
                for (o, t) in out.iter_mut().zip(&self.table[r][s]) {
                    if !t.is_zero() {
                        *o += &c * t;
                    }
                }
            }
        }
        out
    }

    /// Checked product for elements whose length must match this algebra.
    pub fn try_mul(&self, x: &[Int], y: &[Int]) -> Result<Elem> {
        if x.len() != self.dim() || y.len() != self.dim() {
            return Err(Error::AlgebraMismatch);
        }
        Ok(self.mul(x, y))
    }

    pub fn involute(&self, x: &[Int]) -> Elem {
        zmat::vec_mul(x, &self.involution)
    }

    fn trace_raw(&self, x: &[Int]) -> Int {
        let s = self.add(x, &self.involute(x));
        self.as_integer(&s).expect("trace lies in Z")
    }

    pub fn trace(&self, x: &[Int]) -> Int {
        x.iter().zip(&self.traces).map(|(a, t)| a * t).sum()
    }

    pub fn norm(&self, x: &[Int]) -> Int {
        let g = zmat::vec_mul(x, &self.gram);
        let twice: Int = g.iter().zip(x).map(|(a, b)| a * b).sum();
        twice / 2
    }

    /// Gram matrix of the bilinear form `trd(x ι(y))`; `norm(x) = ½ xᵀ G x`.
    pub fn norm_gram(&self) -> &IMat {
        &self.gram
    }

    /// Matrix `R(y)` with `coords(x·y) = coords(x) · R(y)`.
    pub fn right_mult_matrix(&self, y: &[Int]) -> IMat {
        (0..self.dim()).map(|r| self.mul(&self.basis_vector(r), y)).collect()
    }

    /// Matrix `L(x)` with `coords(x·y) = coords(y) · L(x)`.
    pub fn left_mult_matrix(&self, x: &[Int]) -> IMat {
        (0..self.dim()).map(|s| self.mul(x, &self.basis_vector(s))).collect()
    }

    /// Standard coordinates of an element.
    pub fn to_standard(&self, x: &[Int]) -> Vec<BigRational> {
        let dim = self.dim();
        (0..dim)
            .map(|c| {
                x.iter()
                    .zip(&self.basis)
                    .map(|(a, row)| &row[c] * BigRational::from_integer(a.clone()))
                    .fold(BigRational::zero(), |acc, v| acc + v)
            })
            .collect()
    }

    /// Order coordinates of an element given in standard coordinates, if it lies in the order.
    pub fn from_standard(&self, s: &[BigRational]) -> Option<Elem> {
        let dim = self.dim();
        let mut out = Vec::with_capacity(dim);
        for c in 0..dim {
            let mut acc = BigRational::zero();
            for (k, v) in s.iter().enumerate() {
                acc += v * &self.basis_inv[k][c];
            }
            if !acc.is_integer() {
                return None;
            }
            out.push(acc.to_integer());
        }
        Some(out)
    }

    /// Inverse in the algebra, if it lies in the order.
    pub fn inverse_in_order(&self, x: &[Int]) -> Option<Elem> {
        let n = self.norm(x);
        if n.is_zero() {
            return None;
        }
        let c = self.involute(x);
        if c.iter().all(|v| v.is_multiple_of(&n)) {
            Some(c.iter().map(|v| v / &n).collect())
        } else {
            None
        }
    }

    pub fn is_unit(&self, x: &[Int]) -> bool {
        self.norm(x).is_one()
    }

    /// Units of the order (finite, since the norm form is definite).
    pub fn units(&self) -> Vec<Elem> {
        crate::lattice::vectors_of_norm(&self.gram, &Int::one())
    }

    /// Trace and norm of the second basis element of a quadratic order: `ω² = tω − n`.
    pub fn quadratic_generator(&self) -> (Int, Int) {
        let w = self.basis_vector(1);
        (self.trace(&w), self.norm(&w))
    }

    /// Primes at which a quaternion algebra ramifies (finite part).
    pub fn ramified_primes(&self) -> Vec<Int> {
        match &self.kind {
            AlgebraKind::Quadratic { .. } => arith::primes_dividing(&self.discriminant),
            AlgebraKind::Quaternion { a, b } => {
                let mut cands = arith::primes_dividing(&(a * b * 2));
                cands.sort();
                cands.dedup();
                cands
                    .into_iter()
                    .filter(|p| arith::hilbert_symbol(a, b, p) == -1)
                    .collect()
            }
        }
    }

    /// The places above `p`.
    pub fn classify_prime(&self, p: &Int) -> Vec<Place> {
        match &self.kind {
            AlgebraKind::Quadratic { .. } => match arith::kronecker(&self.discriminant, p) {
                1 => vec![Place::new(p.clone(), PlaceKind::SplitFirst), Place::new(p.clone(), PlaceKind::SplitSecond)],
                -1 => vec![Place::new(p.clone(), PlaceKind::Inert)],
                _ => vec![Place::new(p.clone(), PlaceKind::Ramified)],
            },
            AlgebraKind::Quaternion { .. } => {
                if self.discriminant.is_multiple_of(p) {
                    vec![Place::new(p.clone(), PlaceKind::Ramified)]
                } else {
                    vec![Place::new(p.clone(), PlaceKind::Split)]
                }
            }
        }
    }

    /// Element congruent to each residue modulo `p^e · Λ`, coordinate by coordinate.
    pub fn crt_lift(&self, targets: &[(Int, u32, Elem)]) -> Result<Elem> {
        let mut merged: Vec<(Int, u32, Elem)> = Vec::new();
        for (p, e, r) in targets {
            if r.len() != self.dim() {
                return Err(Error::AlgebraMismatch);
            }
            if let Some(slot) = merged.iter_mut().find(|(q, _, _)| q == p) {
                let m = arith::pow(p, slot.1.min(*e));
                let agree = slot.2.iter().zip(r).all(|(a, b)| (a - b).is_multiple_of(&m));
                if !agree {
                    return Err(Error::InconsistentTargets(p.clone()));
                }
                if *e > slot.1 {
                    *slot = (p.clone(), *e, r.clone());
                }
            } else {
                merged.push((p.clone(), *e, r.clone()));
            }
        }
        let mut out = self.zero();
        for (c, slot) in out.iter_mut().enumerate() {
            let parts: Vec<(Int, Int)> = merged
                .iter()
                .map(|(p, e, r)| {
                    let m = arith::pow(p, *e);
                    (arith::modp(&r[c], &m), m)
                })
                .collect();
            *slot = arith::crt(&parts).0;
        }
        Ok(out)
    }

    /// Checks closure, integrality, definiteness and the maximality criterion.
    pub fn validate_maximal_order(&self) -> ValidationReport {
        let mut failures = Vec::new();
        let expected = match &self.kind {
            AlgebraKind::Quadratic { d } => {
                if arith::modp(d, &int(4)) == int(1) {
                    d.clone()
                } else {
                    d * 4
                }
            }
            AlgebraKind::Quaternion { .. } => self.ramified_primes().iter().product(),
        };
        if self.discriminant != expected {
            failures.push(format!(
                "discriminant {} differs from the maximal value {}",
                self.discriminant, expected
            ));
        }
        let dim = self.dim();
        for r in 0..dim {
            let n = self.norm(&self.basis_vector(r));
            if !n.is_positive() {
                failures.push(format!("basis element {r} has non-positive norm {n}"));
            }
        }
        ValidationReport {
            discriminant: self.discriminant.clone(),
            expected_discriminant: expected,
            ramified_primes: self.ramified_primes(),
            failures,
        }
    }

    pub fn descriptor(&self) -> AlgebraDescriptor {
        let basis = Some(
            self.basis
                .iter()
                .map(|r| r.iter().map(|x| [x.numer().clone(), x.denom().clone()]).collect())
                .collect(),
        );
        match &self.kind {
            AlgebraKind::Quadratic { d } => AlgebraDescriptor {
                kind: DescriptorKind::Quadratic,
                d: Some(d.clone()),
                a: None,
                b: None,
                order_basis: basis,
            },
            AlgebraKind::Quaternion { a, b } => AlgebraDescriptor {
                kind: DescriptorKind::Quaternion,
                d: None,
                a: Some(a.clone()),
                b: Some(b.clone()),
                order_basis: basis,
            },
        }
    }

    /// Readable form of an element in standard coordinates, using `rho`, `i`, `j`, `k`.
    pub fn format_elem(&self, x: &[Int]) -> String {
        let names: &[&str] = if self.is_quaternion() {
            &["", "i", "j", "k"]
        } else {
            &["", "rho"]
        };
        let s = self.to_standard(x);
        let mut out = String::new();
        for (c, name) in s.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let coeff = if a.is_integer() {
                a.to_integer().to_string()
            } else {
                format!("{}/{}", a.numer(), a.denom())
            };
            if name.is_empty() {
                out.push_str(&coeff);
            } else if a.is_one() {
                out.push_str(name);
            } else {
                out.push_str(&format!("{coeff}{name}"));
            }
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }
}

fn std_mul(kind: &AlgebraKind, x: &[BigRational], y: &[BigRational]) -> Vec<BigRational> {
    match kind {
        AlgebraKind::Quadratic { d } => {
            let d = BigRational::from_integer(d.clone());
            vec![&x[0] * &y[0] + d * &x[1] * &y[1], &x[0] * &y[1] + &x[1] * &y[0]]
        }
        AlgebraKind::Quaternion { a, b } => {
            let a = BigRational::from_integer(a.clone());
            let b = BigRational::from_integer(b.clone());
            let ab = &a * &b;
            let (x0, x1, x2, x3) = (&x[0], &x[1], &x[2], &x[3]);
            let (y0, y1, y2, y3) = (&y[0], &y[1], &y[2], &y[3]);
            vec![
                x0 * y0 + &a * x1 * y1 + &b * x2 * y2 - &ab * x3 * y3,
                x0 * y1 + x1 * y0 - &b * x2 * y3 + &b * x3 * y2,
                x0 * y2 + x2 * y0 + &a * x1 * y3 - &a * x3 * y1,
                x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
            ]
        }
    }
}

#[serde_with::serde_as]
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    #[serde_as(as = "crate::arith::JsonInt")]

    pub discriminant: Int,
    #[serde_as(as = "crate::arith::JsonInt")]
    pub expected_discriminant: Int,
    #[serde_as(as = "Vec<crate::arith::JsonInt>")]
    pub ramified_primes: Vec<Int>,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DescriptorKind {
    Quadratic,
    Quaternion,
}

/// JSON form: `{"kind":"quadratic","d":-6}` or
/// `{"kind":"quaternion","a":-17,"b":-3,"order_basis":[[[num,den],..4],..4]}`.
#[serde_with::serde_as]
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraDescriptor {
    pub kind: DescriptorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    #[serde_as(as = "Option<crate::arith::JsonInt>")]
    pub d: Option<Int>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    #[serde_as(as = "Option<crate::arith::JsonInt>")]
    pub a: Option<Int>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    #[serde_as(as = "Option<crate::arith::JsonInt>")]
    pub b: Option<Int>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    #[serde_as(as = "Option<Vec<Vec<[crate::arith::JsonInt; 2]>>>")]
    pub order_basis: Option<Vec<Vec<[Int; 2]>>>,
}

impl AlgebraDescriptor {
    pub fn build(&self) -> Result<Algebra> {
        let basis = match &self.order_basis {
            None => None,
            Some(rows) => {
                let mut out = Vec::new();
                for row in rows {
                    let mut r = Vec::new();
                    for [n, d] in row {
                        if d.is_zero() {
                            return Err(Error::InvalidAlgebra("order_basis has a zero denominator".into()));
                        }
                        r.push(BigRational::new(n.clone(), d.clone()));
                    }
                    out.push(r);
                }
                Some(out)
            }
        };
        match self.kind {
            DescriptorKind::Quadratic => {
                let d = self
                    .d
                    .clone()
                    .ok_or_else(|| Error::InvalidAlgebra("field `d` is required".into()))?;
                match basis {
                    Some(b) => Algebra::quadratic_with_basis(d, b),
                    None => {
                        let d = arith::to_i64(&d)
                            .ok_or_else(|| Error::InvalidAlgebra("field `d` is out of range".into()))?;
                        Algebra::quadratic(d)
                    }
                }
            }
            DescriptorKind::Quaternion => {
                let a = self
                    .a
                    .clone()
                    .ok_or_else(|| Error::InvalidAlgebra("field `a` is required".into()))?;
                let b = self
                    .b
                    .clone()
                    .ok_or_else(|| Error::InvalidAlgebra("field `b` is required".into()))?;
                let basis = basis.ok_or_else(|| Error::InvalidAlgebra("field `order_basis` is required".into()))?;
                Algebra::quaternion_big(a, b, basis)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_relations() {
        let alg = Algebra::quadratic(-6).unwrap();
        let rho = alg.basis_vector(1);
        assert_eq!(alg.mul(&rho, &rho), alg.from_int(&int(-6)));
        assert_eq!(alg.norm(&rho), int(6));
        assert_eq!(*alg.discriminant(), int(-24));
        assert!(alg.validate_maximal_order().is_valid());
    }

    #[test]
    fn gaussian_units() {
        let alg = Algebra::quadratic(-1).unwrap();
        assert_eq!(alg.units().len(), 4);
        let alg3 = Algebra::quadratic(-3).unwrap();
        assert_eq!(alg3.units().len(), 6);
        assert_eq!(*alg3.discriminant(), int(-3));
    }

    #[test]
    fn hurwitz_is_maximal() {
        let h = Algebra::hurwitz();
        let r = h.validate_maximal_order();
        assert!(r.is_valid(), "{:?}", r);
        assert_eq!(*h.discriminant(), int(2));
        assert_eq!(h.units().len(), 24);
    }

    #[test]
    fn crt_lift_inconsistent() {
        let alg = Algebra::quadratic(-6).unwrap();
        let t = vec![
            (int(2), 2, alg.from_int(&int(1))),
            (int(2), 3, alg.from_int(&int(2))),
        ];
        assert_eq!(alg.crt_lift(&t), Err(Error::InconsistentTargets(int(2))));
        assert_eq!(alg.crt_lift(&[]).unwrap(), alg.zero());
    }
}
