//! Integer helpers: valuations, residues, CRT, factorization, local symbols.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

/// Exponent of `p` in `n`; `n` must be nonzero.
pub fn valuation(n: &Int, p: &Int) -> u32 {
    debug_assert!(!n.is_zero());
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Like [`valuation`] but returns `None` for zero.
pub fn valuation_opt(n: &Int, p: &Int) -> Option<u32> {
    if n.is_zero() {
        None
    } else {
        Some(valuation(n, p))
    }
}

pub fn pow(p: &Int, e: u32) -> Int {
    num_traits::pow(p.clone(), e as usize)
}

/// Least non-negative residue.
pub fn modp(a: &Int, m: &Int) -> Int {
    a.mod_floor(m)
}

pub fn inv_mod(a: &Int, m: &Int) -> Option<Int> {
    let e = a.extended_gcd(m);
    if e.gcd.abs().is_one() {
        Some(modp(&(e.x * e.gcd.signum()), m))
    } else {
        None
    }
}

/// Combine `x ≡ r1 (mod m1)` and `x ≡ r2 (mod m2)` for coprime moduli.
pub fn crt_pair(r1: &Int, m1: &Int, r2: &Int, m2: &Int) -> Int {
    let inv = inv_mod(m1, m2).expect("moduli must be coprime");
    let t = modp(&((r2 - r1) * inv), m2);
    modp(&(r1 + m1 * t), &(m1 * m2))
}

pub fn crt(parts: &[(Int, Int)]) -> (Int, Int) {
    let mut r = Int::zero();
    let mut m = Int::one();
    for (ri, mi) in parts {
        r = crt_pair(&r, &m, ri, mi);
        m *= mi;
    }
    (r, m)
}

pub fn lcm(a: &Int, b: &Int) -> Int {
    a.lcm(b)
}

/// Prime factorization of `|n|`, primes ascending.
pub fn factor(n: &Int) -> Vec<(Int, u32)> {
    let n = n.abs();
    if n <= Int::one() {
        return Vec::new();
    }
    let (_, mag) = n.into_parts();
    let f = num_prime::nt_funcs::factorize::<BigUint>(mag);
    f.into_iter()
        .map(|(p, e)| (BigInt::from_biguint(Sign::Plus, p), e as u32))
        .collect()
}

pub fn primes_dividing(n: &Int) -> Vec<Int> {
    factor(n).into_iter().map(|(p, _)| p).collect()
}

pub fn is_prime(n: &Int) -> bool {
    if n <= &Int::one() {
        return false;
    }
    let (_, mag) = n.clone().into_parts();
    num_prime::nt_funcs::is_prime::<BigUint>(&mag, None).probably()
}

pub fn is_squarefree(n: &Int) -> bool {
    factor(n).iter().all(|(_, e)| *e == 1)
}

/// Exact integer square root of a non-negative square.
pub fn exact_sqrt(n: &Int) -> Option<Int> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Legendre symbol for odd prime `p`.
pub fn legendre(a: &Int, p: &Int) -> i32 {
    let a = modp(a, p);
    if a.is_zero() {
        return 0;
    }
    let e = (p - 1u32) / 2u32;
    if a.modpow(&e, p).is_one() {
        1
    } else {
        -1
    }
}

/// Kronecker symbol `(a / p)` for a prime `p`.
pub fn kronecker(a: &Int, p: &Int) -> i32 {
    if *p == int(2) {
        if a.is_even() {
            0
        } else {
            let r = modp(a, &int(8)).to_u32().unwrap();
            if r == 1 || r == 7 {
                1
            } else {
                -1
            }
        }
    } else {
        legendre(a, p)
    }
}

/// A square root of `a` modulo an odd prime `p`, if one exists.
pub fn sqrt_mod_prime(a: &Int, p: &Int) -> Option<Int> {
    let a = modp(a, p);
    if a.is_zero() {
        return Some(Int::zero());
    }
    if *p == int(2) {
        return Some(a);
    }
    if legendre(&a, p) != 1 {
        return None;
    }
    // Tonelli-Shanks
    let one = Int::one();
    let mut q = p - 1u32;
    let mut s = 0u32;
    while q.is_even() {
        q >>= 1;
        s += 1;
    }
    let mut z = int(2);
    while legendre(&z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + &one) / 2u32), p);
    while !t.is_one() {
        let mut i = 0u32;
        let mut tt = t.clone();
        while !tt.is_one() {
            tt = (&tt * &tt) % p;
            i += 1;
        }
        let b = c.modpow(&pow(&int(2), m - i - 1), p);
        m = i;
        c = (&b * &b) % p;
        t = (&t * &c) % p;
        r = (&r * &b) % p;
    }
    Some(r)
}

/// Roots of `X² − tX + n` modulo the prime `p`.
pub fn quadratic_roots_mod_prime(t: &Int, n: &Int, p: &Int) -> Vec<Int> {
    let f = |x: &Int| modp(&(x * x - t * x + n), p);
    if *p == int(2) {
        return [Int::zero(), Int::one()]
            .into_iter()
            .filter(|x| f(x).is_zero())
            .collect();
    }
    let disc = t * t - n * 4u32;
    let Some(s) = sqrt_mod_prime(&disc, p) else {
        return Vec::new();
    };
    let inv2 = inv_mod(&int(2), p).unwrap();
    let mut roots = vec![
        modp(&((t + &s) * &inv2), p),
        modp(&((t - &s) * &inv2), p),
    ];
    roots.sort();
    roots.dedup();
    roots
}

/// Hensel-lift a simple root `r0` of `X² − tX + n` from mod `p` to mod `p^k`.
pub fn hensel_quadratic_root(t: &Int, n: &Int, r0: &Int, p: &Int, k: u32) -> Int {
    let q = pow(p, k);
    let mut r = r0.clone();
    let mut prec = 1u32;
    while prec < k {
        prec = (2 * prec).min(k);
        let m = pow(p, prec);
        let f = &r * &r - t * &r + n;
        let df = &r * 2u32 - t;
        let inv = inv_mod(&df, &m).expect("root is not simple");
        r = modp(&(&r - f * inv), &m);
    }
    modp(&r, &q)
}

/// Hilbert symbol `(a, b)_p` for nonzero integers and a prime `p`.
pub fn hilbert_symbol(a: &Int, b: &Int, p: &Int) -> i32 {
    let alpha = valuation(a, p);
    let beta = valuation(b, p);
    let u = a / pow(p, alpha);
    let v = b / pow(p, beta);
    if *p == int(2) {
        let eps = |x: &Int| modp(&((x - 1) / 2), &int(2)).to_u32().unwrap();
        let omega = |x: &Int| modp(&((x * x - 1) / 8), &int(2)).to_u32().unwrap();
        let e = eps(&u) * eps(&v) + alpha * omega(&v) + beta * omega(&u);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        let eps = modp(&((p - 1) / 2), &int(2)).to_u32().unwrap();
        let mut s = if (alpha * beta * eps) % 2 == 0 { 1 } else { -1 };
        if beta % 2 == 1 {
            s *= legendre(&u, p);
        }
        if alpha % 2 == 1 {
            s *= legendre(&v, p);
        }
        s
    }
}

pub fn to_i64(x: &Int) -> Option<i64> {
    x.to_i64()
}


/// Serde adapter for `Int`: a JSON integer when it fits in `i64`, a decimal string otherwise.
/// Both forms are accepted on input.
pub struct JsonInt;

impl serde_with::SerializeAs<Int> for JsonInt {
    fn serialize_as<S: serde::Serializer>(x: &Int, s: S) -> Result<S::Ok, S::Error> {
        match x.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&x.to_string()),
        }
    }
}

impl<'de> serde_with::DeserializeAs<'de, Int> for JsonInt {
    fn deserialize_as<D: serde::Deserializer<'de>>(d: D) -> Result<Int, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Int;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an integer or a decimal string")
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Int, E> {
                Ok(Int::from(v))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Int, E> {
                Ok(Int::from(v))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Int, E> {
                v.trim().parse().map_err(|_| E::custom(format!("`{v}` is not an integer")))
            }
        }
        d.deserialize_any(V)
    }
}
