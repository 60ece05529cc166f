//! Class groups of imaginary quadratic orders through reduced binary quadratic forms.
//!
//! A form `(a, b, c)` stands for `ax² + bxy + cy²` with discriminant `b² − 4ac < 0`.
//! Composition goes through ideals: `(a, b, c) ↔ Za + Z(−b + √D)/2`.

use crate::algebra::{Algebra, AlgebraKind};
use crate::arith::Int;
use crate::error::{Error, Result};
use crate::ideal::{self, LeftIdeal};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

#[serde_with::serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Form {
    #[serde_as(as = "crate::arith::JsonInt")]

    pub a: Int,
    #[serde_as(as = "crate::arith::JsonInt")]
    pub b: Int,
    #[serde_as(as = "crate::arith::JsonInt")]
    pub c: Int,
}

impl Form {
    pub fn new(a: impl Into<Int>, b: impl Into<Int>, c: impl Into<Int>) -> Self {
        Form {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        }
    }

    pub fn discriminant(&self) -> Int {
        &self.b * &self.b - &self.a * &self.c * 4u32
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        b.abs() <= *a && a <= c && (!(b.abs() == *a || a == c) || !b.is_negative())
    }

    /// The reduced form properly equivalent to `self` (positive definite forms only).
    pub fn reduce(&self) -> Form {
        let disc = self.discriminant();
        let (mut a, mut b, mut c) = (self.a.clone(), self.b.clone(), self.c.clone());
        loop {
            // bring b into (−a, a]
            let two_a = &a * 2u32;
            let mut nb = b.mod_floor(&two_a);
            if nb > a {
                nb -= &two_a;
            }
            if nb != b {
                b = nb;
                c = (&b * &b - &disc) / (&a * 4u32);
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b.is_negative() {
                b = -b;
            }
            return Form { a, b, c };
        }
    }

    pub fn principal(disc: &Int) -> Form {
        let b = disc.mod_floor(&Int::from(2));
        let c = (&b * &b - disc) / 4u32;
        Form::new(Int::one(), b, c)
    }
}

/// All reduced primitive forms of discriminant `disc`, sorted.
pub fn reduced_forms(disc: &Int) -> Vec<Form> {
    let mut out = Vec::new();
    let bound = (-disc / 3u32).sqrt() + 1u32;
    let mut a = Int::one();
    while a <= bound {
        let mut b = -&a + 1u32;
        while b <= a {
            let num = &b * &b - disc;
            if num.is_multiple_of(&(&a * 4u32)) {
                let c = &num / (&a * 4u32);
                let f = Form::new(a.clone(), b.clone(), c);
                if f.is_reduced() && a.gcd(&b).gcd(&f.c).is_one() {
                    out.push(f);
                }
            }
            b += 1u32;
        }
        a += 1u32;
    }
    out.sort();
    out
}

fn quadratic_d(alg: &Algebra) -> Result<Int> {
    match &alg.kind {
        AlgebraKind::Quadratic { d } => Ok(d.clone()),
        AlgebraKind::Quaternion { .. } => Err(Error::Unsupported("class groups are computed for quadratic orders only".into())),
    }
}

/// `N(xα − yβ)/N(I)` for a positively oriented Z-basis of `I`; inverse to [`ideal_of_form`].
pub fn form_of_ideal(alg: &Algebra, i: &LeftIdeal) -> Result<Form> {
    quadratic_d(alg)?;
    let (mut alpha, mut beta) = (i.basis[0].clone(), i.basis[1].clone());
    let sa = alg.to_standard(&alpha);
    let sb = alg.to_standard(&beta);
    if (&sa[0] * &sb[1] - &sa[1] * &sb[0]).is_negative() {
        std::mem::swap(&mut alpha, &mut beta);
    }
    let n = i.norm(alg);
    let na = alg.norm(&alpha);
    let nb = alg.norm(&beta);
    let nab = alg.norm(&alg.add(&alpha, &beta));
    Ok(Form {
        a: &na / &n,
        b: -(&nab - &na - &nb) / &n,
        c: &nb / &n,
    })
}

/// `Za + Z(−b + √D)/2`.
pub fn ideal_of_form(alg: &Algebra, f: &Form) -> Result<LeftIdeal> {
    let d = quadratic_d(alg)?;
    let disc = alg.discriminant().clone();
    // √D = s·√d with s = 1 or 2
    let s = if disc == d { Int::one() } else { Int::from(2) };
    let two = BigRational::from_integer(Int::from(2));
    let alpha = vec![BigRational::from_integer(f.a.clone()), BigRational::zero()];
    let beta = vec![
        BigRational::from_integer(-&f.b) / &two,
        BigRational::from_integer(s) / &two,
    ];
    let a = alg.from_standard(&alpha).ok_or(Error::NotIntegral)?;
    let b = alg.from_standard(&beta).ok_or(Error::NotIntegral)?;
    LeftIdeal::from_lattice_rows(alg, &vec![a, b])
}

#[serde_with::serde_as]
#[derive(Debug, Clone, Serialize)]
pub struct ClassGroup {
    #[serde_as(as = "crate::arith::JsonInt")]

    pub discriminant: Int,
    pub forms: Vec<Form>,
    /// `table[i][j]` is the index of the class of `forms[i]·forms[j]`.
    pub table: Vec<Vec<usize>>,
}

impl ClassGroup {
    pub fn order(&self) -> usize {
        self.forms.len()
    }

    pub fn identity(&self) -> usize {
        self.index_of(&Form::principal(&self.discriminant)).expect("principal form is reduced")
    }

    pub fn index_of(&self, f: &Form) -> Option<usize> {
        let r = f.reduce();
        self.forms.iter().position(|g| *g == r)
    }

    pub fn class_of(&self, alg: &Algebra, i: &LeftIdeal) -> Result<usize> {
        let f = form_of_ideal(alg, i)?;
        self.index_of(&f)
            .ok_or_else(|| Error::Malformed("ideal form has the wrong discriminant".into()))
    }
}

pub fn class_group(alg: &Algebra) -> Result<ClassGroup> {
    quadratic_d(alg)?;
    let disc = alg.discriminant().clone();
    let forms = reduced_forms(&disc);
    let ideals: Vec<LeftIdeal> = forms.iter().map(|f| ideal_of_form(alg, f)).collect::<Result<_>>()?;
    let mut table = vec![vec![0; forms.len()]; forms.len()];
    let mut group = ClassGroup {
        discriminant: disc,
        forms,
        table: Vec::new(),
    };
    for i in 0..ideals.len() {
        for j in 0..ideals.len() {
            let prod = ideal::product_commutative(alg, &ideals[i], &ideals[j])?;
            table[i][j] = group.class_of(alg, &prod)?;
        }
    }
    group.table = table;
    Ok(group)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn class_numbers() {
        for (d, h) in [(-1, 1), (-2, 1), (-3, 1), (-5, 2), (-6, 2), (-23, 3), (-14, 4), (-47, 5)] {
            let alg = Algebra::quadratic(d).unwrap();
            let g = class_group(&alg).unwrap();
            assert_eq!(g.order(), h, "d = {d}");
            let e = g.identity();
            for i in 0..g.order() {
                assert_eq!(g.table[e][i], i);
                assert!((0..g.order()).any(|j| g.table[i][j] == e));
                for j in 0..g.order() {
                    for k in 0..g.order() {
                        assert_eq!(g.table[g.table[i][j]][k], g.table[i][g.table[j][k]]);
                    }
                }
            }
        }
    }

    #[test]
    fn round_trip_form_ideal() {
        let alg = Algebra::quadratic(-23).unwrap();
        for f in reduced_forms(&int(-23)) {
            let i = ideal_of_form(&alg, &f).unwrap();
            assert_eq!(form_of_ideal(&alg, &i).unwrap().reduce(), f);
        }
        let alg = Algebra::quadratic(-6).unwrap();
        for f in reduced_forms(&int(-24)) {
            let i = ideal_of_form(&alg, &f).unwrap();
            assert_eq!(form_of_ideal(&alg, &i).unwrap().reduce(), f);
        }
    }
}
