//! Exact arithmetic in F_q for odd q = p^k.
//!
//! Elements are stored as their integer code `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`,
//! where `c_i` is the coefficient of `x^i` in the residue-class polynomial.
//! For prime fields the code is the residue itself. Canonical element order is
//! the order of codes, i.e. lexicographic on coefficient vectors read from the
//! highest-degree coefficient down.
//!
//! Orders are capped at [`MAX_ORDER`] so that the product of two codes never
//! overflows a `u64`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order. Any `q <= 2^32 - 1` keeps `q^2 < 2^64`.
pub const MAX_ORDER: u64 = u32::MAX as u64;

/// Fields with at most this many elements get a precomputed square table
/// (and log/exp tables when k > 1).
pub const DEFAULT_TABLE_THRESHOLD: u64 = 1 << 20;

/// A field element in canonical (fully reduced) form.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Elem(u64);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    /// Wraps a code without range checking; see [`FieldSpec::elem`].
    pub const fn from_code(code: u64) -> Self {
        Elem(code)
    }

    pub const fn code(self) -> u64 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Three-way quadratic character classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QRClass {
    Zero,
    Residue,
    NonResidue,
}

impl QRClass {
    /// The quadratic character value: 0, +1 or -1.
    pub const fn chi(self) -> i8 {
        match self {
            QRClass::Zero => 0,
            QRClass::Residue => 1,
            QRClass::NonResidue => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add(Elem, Elem),
    Sub(Elem, Elem),
    Mul(Elem, Elem),
    Neg(Elem),
    Inv(Elem),
    Pow(Elem, u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldOptions {
    pub table_threshold: u64,
}

impl Default for FieldOptions {
    fn default() -> Self {
        FieldOptions {
            table_threshold: DEFAULT_TABLE_THRESHOLD,
        }
    }
}

/// Serializable description of a field, embedded in every report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldInfo {
    pub p: u64,
    pub k: u32,
    pub q: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
}

struct Tables {
    classes: Vec<QRClass>,
    // Only for k > 1: exp has length q - 1, log has length q (log[0] unused).
    exp: Vec<u32>,
    log: Vec<u32>,
}

struct Inner {
    p: u64,
    k: u32,
    q: u64,
    modulus: Option<Vec<u64>>,
    trace_basis: Vec<u64>,
    tables: Option<Tables>,
}

/// A validated finite field F_q, cheap to clone and safe to share across
/// threads.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<Inner>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.k == other.inner.k
                && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.inner.p)
            .field("k", &self.inner.k)
            .field("modulus", &self.inner.modulus)
            .finish()
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.inner.q)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits `q` into `(p, k)` with `q = p^k`, `p` prime.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let factors = prime_factors(q);
    if factors.len() != 1 {
        return None;
    }
    let p = factors[0];
    let mut k = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        k += 1;
    }
    Some((p, k))
}

fn pow_mod(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Dense polynomials over F_p, little-endian coefficient vectors.
mod poly {
    use super::pow_mod;

    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn degree(v: &[u64]) -> Option<usize> {
        v.iter().rposition(|&c| c != 0)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(&mut out);
        out
    }

    /// Remainder of `a` modulo a nonzero polynomial `m`.
    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = degree(m).expect("division by the zero polynomial");
        let lead_inv = pow_mod(m[dm], p - 2, p);
        while let Some(dr) = degree(&r) {
            if dr < dm {
                break;
            }
            let factor = r[dr] * lead_inv % p;
            let shift = dr - dm;
            for (i, &c) in m[..=dm].iter().enumerate() {
                let sub = factor * c % p;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = rem(&[1], m, p);
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &b, m, p);
            }
            b = mulmod(&b, &b, m, p);
            e >>= 1;
        }
        acc
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }
}

/// Rabin's test: a monic `f` of degree `k` is irreducible over F_p iff
/// `x^{p^k} = x (mod f)` and `gcd(x^{p^{k/r}} - x, f) = 1` for every prime `r | k`.
fn is_irreducible(f: &[u64], p: u64, k: u32) -> bool {
    if k == 1 {
        return true;
    }
    let x = [0u64, 1];
    // frob[i] = x^{p^i} mod f
    let mut frob = Vec::with_capacity(k as usize + 1);
    frob.push(poly::rem(&x, f, p));
    for i in 0..k as usize {
        let next = poly::powmod(&frob[i], p, f, p);
        frob.push(next);
    }
    if poly::sub(&frob[k as usize], &x, p).iter().any(|&c| c != 0) {
        return false;
    }
    prime_factors(k as u64).into_iter().all(|r| {
        let h = poly::sub(&frob[(k as u64 / r) as usize], &x, p);
        let g = poly::gcd(&h, f, p);
        poly::degree(&g) == Some(0)
    })
}

fn digits(mut code: u64, p: u64, k: u32) -> Vec<u64> {
    (0..k)
        .map(|_| {
            let d = code % p;
            code /= p;
            d
        })
        .collect()
}

fn undigits(coeffs: &[u64], p: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Lexicographically smallest monic irreducible of degree `k` over F_p:
/// lower coefficients are enumerated in code order.
fn smallest_irreducible(p: u64, k: u32) -> Vec<u64> {
    let count = p.pow(k);
    for code in 0..count {
        let mut f = digits(code, p, k);
        f.push(1);
        if f[0] != 0 && is_irreducible(&f, p, k) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldSpec {
    /// Builds F_{p^k}. For `k > 1` without an explicit modulus the
    /// lexicographically smallest monic irreducible polynomial is used.
    pub fn new(p: u64, k: u32, modulus: Option<Vec<u64>>) -> Result<Self> {
        Self::with_options(p, k, modulus, FieldOptions::default())
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1, None)
    }

    pub fn with_options(
        p: u64,
        k: u32,
        modulus: Option<Vec<u64>>,
        options: FieldOptions,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter(
                "extension degree must be at least 1".into(),
            ));
        }
        if p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or(Error::FieldTooLarge {
                p,
                k,
                max: MAX_ORDER,
            })?;

        let modulus = match (k, modulus) {
            (1, None) => None,
            (1, Some(_)) => {
                return Err(Error::InvalidModulus("prime fields take no modulus".into()))
            }
            (_, None) => Some(smallest_irreducible(p, k)),
            (_, Some(m)) => {
                if m.len() != k as usize + 1 {
                    return Err(Error::InvalidModulus(format!(
                        "expected {} coefficients, found {}",
                        k + 1,
                        m.len()
                    )));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidModulus(format!(
                        "coefficients must lie in [0, {p})"
                    )));
                }
                if m[k as usize] != 1 {
                    return Err(Error::InvalidModulus("modulus must be monic".into()));
                }
                if !is_irreducible(&m, p, k) {
                    return Err(Error::ReduciblePolynomial { p });
                }
                Some(m)
            }
        };

        let mut inner = Inner {
            p,
            k,
            q,
            modulus,
            trace_basis: Vec::new(),
            tables: None,
        };
        inner.trace_basis = (0..k)
            .map(|i| {
                let mut c = vec![0u64; k as usize];
                c[i as usize] = 1;
                let x_i = Elem(undigits(&c, p));
                let t = trace_direct_inner(&inner, x_i);
                debug_assert!(t.0 < p);
                t.0
            })
            .collect();
        if q <= options.table_threshold {
            inner.tables = Some(build_tables(&inner));
        }
        Ok(FieldSpec {
            inner: Arc::new(inner),
        })
    }

    pub fn p(&self) -> u64 {
        self.inner.p
    }

    pub fn k(&self) -> u32 {
        self.inner.k
    }

    pub fn q(&self) -> u64 {
        self.inner.q
    }

    pub fn modulus(&self) -> Option<&[u64]> {
        self.inner.modulus.as_deref()
    }

    pub fn has_tables(&self) -> bool {
        self.inner.tables.is_some()
    }

    pub fn info(&self) -> FieldInfo {
        FieldInfo {
            p: self.inner.p,
            k: self.inner.k,
            q: self.inner.q,
            modulus: self.inner.modulus.clone(),
        }
    }

    pub fn contains(&self, a: Elem) -> bool {
        a.0 < self.inner.q
    }

    pub fn elem(&self, code: u64) -> Result<Elem> {
        if code < self.inner.q {
            Ok(Elem(code))
        } else {
            Err(Error::FieldMismatch(format!(
                "code {code} is not an element of F_{}",
                self.inner.q
            )))
        }
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.inner.q).map(Elem)
    }

    /// Embeds an integer into the prime subfield.
    pub fn from_int(&self, v: i64) -> Elem {
        Elem(v.rem_euclid(self.inner.p as i64) as u64)
    }

    pub fn coeffs(&self, a: Elem) -> Vec<u64> {
        digits(a.0, self.inner.p, self.inner.k)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<Elem> {
        if coeffs.len() != self.inner.k as usize {
            return Err(Error::FieldMismatch(format!(
                "expected {} coefficients, found {}",
                self.inner.k,
                coeffs.len()
            )));
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= self.inner.p) {
            return Err(Error::FieldMismatch(format!(
                "coefficient {c} is not reduced mod {}",
                self.inner.p
            )));
        }
        Ok(Elem(undigits(coeffs, self.inner.p)))
    }

    /// The element `-1`, whose code is `p - 1` for every k.
    pub fn minus_one(&self) -> Elem {
        Elem(self.inner.p - 1)
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let Inner { p, k, .. } = *self.inner;
        if k == 1 {
            let s = a.0 + b.0;
            return Elem(if s >= p { s - p } else { s });
        }
        let (mut x, mut y, mut pw, mut out) = (a.0, b.0, 1u64, 0u64);
        for _ in 0..k {
            out += ((x % p + y % p) % p) * pw;
            x /= p;
            y /= p;
            pw *= p;
        }
        Elem(out)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        let Inner { p, k, .. } = *self.inner;
        if k == 1 {
            return Elem(if a.0 == 0 { 0 } else { p - a.0 });
        }
        let (mut x, mut pw, mut out) = (a.0, 1u64, 0u64);
        for _ in 0..k {
            out += ((p - x % p) % p) * pw;
            x /= p;
            pw *= p;
        }
        Elem(out)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        if self.inner.k == 1 {
            let p = self.inner.p;
            return Elem(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + p - b.0 });
        }
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        let inner = &*self.inner;
        if inner.k == 1 {
            return Elem(a.0 * b.0 % inner.p);
        }
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        if let Some(t) = &inner.tables {
            let e = (t.log[a.0 as usize] as u64 + t.log[b.0 as usize] as u64) % (inner.q - 1);
            return Elem(t.exp[e as usize] as u64);
        }
        mul_poly(inner, a, b)
    }

    pub fn square(&self, a: Elem) -> Elem {
        self.mul(a, a)
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut acc = Elem::ONE;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.inner.q - 2))
    }

    /// Range-checked arithmetic on possibly foreign elements.
    pub fn arith(&self, op: ArithOp) -> Result<Elem> {
        let check = |e: Elem| -> Result<Elem> {
            if self.contains(e) {
                Ok(e)
            } else {
                Err(Error::FieldMismatch(format!(
                    "code {} is not an element of F_{}",
                    e.0, self.inner.q
                )))
            }
        };
        match op {
            ArithOp::Add(a, b) => Ok(self.add(check(a)?, check(b)?)),
            ArithOp::Sub(a, b) => Ok(self.sub(check(a)?, check(b)?)),
            ArithOp::Mul(a, b) => Ok(self.mul(check(a)?, check(b)?)),
            ArithOp::Neg(a) => Ok(self.neg(check(a)?)),
            ArithOp::Inv(a) => self.inv(check(a)?),
            ArithOp::Pow(a, e) => Ok(self.pow(check(a)?, e)),
        }
    }

    /// Absolute trace to F_p, returned as an integer in `[0, p)`.
    pub fn trace(&self, a: Elem) -> u64 {
        let inner = &*self.inner;
        if inner.k == 1 {
            return a.0;
        }
        let p = inner.p;
        let mut x = a.0;
        let mut acc = 0u64;
        for &t in &inner.trace_basis {
            acc = (acc + (x % p) * t) % p;
            x /= p;
        }
        acc
    }

    /// `a + a^p + ... + a^{p^{k-1}}` evaluated literally. Agrees with
    /// [`FieldSpec::trace`]; kept for cross-checking.
    pub fn trace_direct(&self, a: Elem) -> Elem {
        trace_direct_inner(&self.inner, a)
    }

    /// Euler's criterion: `a^{(q-1)/2}` is `1` for residues and `-1` for
    /// nonresidues.
    pub fn qr_class_euler(&self, a: Elem) -> QRClass {
        if a.is_zero() {
            return QRClass::Zero;
        }
        let r = self.pow(a, (self.inner.q - 1) / 2);
        if r == Elem::ONE {
            QRClass::Residue
        } else {
            debug_assert_eq!(r, self.minus_one());
            QRClass::NonResidue
        }
    }

    /// Square-table lookup, when the table was built.
    pub fn qr_class_table(&self, a: Elem) -> Option<QRClass> {
        self.inner.tables.as_ref().map(|t| t.classes[a.0 as usize])
    }

    pub fn qr_class(&self, a: Elem) -> QRClass {
        match &self.inner.tables {
            Some(t) => t.classes[a.0 as usize],
            None => self.qr_class_euler(a),
        }
    }

    pub fn chi(&self, a: Elem) -> i8 {
        self.qr_class(a).chi()
    }

    /// Smallest nonresidue in canonical order.
    pub fn smallest_nonresidue(&self) -> Elem {
        self.elements()
            .find(|&e| self.qr_class(e) == QRClass::NonResidue)
            .expect("odd fields have nonresidues")
    }
}

fn mul_poly(inner: &Inner, a: Elem, b: Elem) -> Elem {
    let p = inner.p;
    let m = inner
        .modulus
        .as_ref()
        .expect("extension field has a modulus");
    let prod = poly::mulmod(&digits(a.0, p, inner.k), &digits(b.0, p, inner.k), m, p);
    Elem(undigits(&prod, p))
}

fn pow_poly(inner: &Inner, a: Elem, mut e: u64) -> Elem {
    let mut acc = Elem::ONE;
    let mut base = a;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_poly(inner, acc, base);
        }
        base = mul_poly(inner, base, base);
        e >>= 1;
    }
    acc
}

fn trace_direct_inner(inner: &Inner, a: Elem) -> Elem {
    let p = inner.p;
    if inner.k == 1 {
        return a;
    }
    let mut acc = vec![0u64; inner.k as usize];
    let mut cur = a;
    for _ in 0..inner.k {
        for (s, d) in acc.iter_mut().zip(digits(cur.0, p, inner.k)) {
            *s = (*s + d) % p;
        }
        cur = pow_poly(inner, cur, p);
    }
    Elem(undigits(&acc, p))
}

fn build_tables(inner: &Inner) -> Tables {
    let q = inner.q;
    let (exp, log) = if inner.k > 1 {
        let order = q - 1;
        let factors = prime_factors(order);
        let g = (2..q)
            .map(Elem)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&r| pow_poly(inner, g, order / r) != Elem::ONE)
            })
            .expect("multiplicative group is cyclic");
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; q as usize];
        let mut cur = Elem::ONE;
        for i in 0..order {
            exp.push(cur.0 as u32);
            log[cur.0 as usize] = i as u32;
            cur = mul_poly(inner, cur, g);
        }
        (exp, log)
    } else {
        (Vec::new(), Vec::new())
    };
    let mut classes = vec![QRClass::NonResidue; q as usize];
    classes[0] = QRClass::Zero;
    if inner.k == 1 {
        for y in 1..q {
            classes[(y * y % q) as usize] = QRClass::Residue;
        }
    } else {
        // squares are the even powers of the generator
        for i in (0..q - 1).step_by(2) {
            classes[exp[i as usize] as usize] = QRClass::Residue;
        }
    }
    Tables { classes, exp, log }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64, k: u32) -> FieldSpec {
        FieldSpec::new(p, k, None).unwrap()
    }

    #[test]
    fn construction_examples() {
        let f7 = f(7, 1);
        assert_eq!(f7.q(), 7);
        assert!(f7.modulus().is_none());

        // x^2 + 1 has no root at 0, 1, 2 mod 3
        for x in 0..3u64 {
            assert_ne!((x * x + 1) % 3, 0);
        }
        let f9 = FieldSpec::new(3, 2, Some(vec![1, 0, 1])).unwrap();
        assert_eq!(f9.q(), 9);

        assert_eq!(FieldSpec::new(2, 1, None), Err(Error::EvenCharacteristic));
        assert_eq!(FieldSpec::new(9, 1, None), Err(Error::NotPrime(9)));
        assert_eq!(FieldSpec::new(1, 1, None), Err(Error::NotPrime(1)));
        assert!(matches!(
            FieldSpec::new(3, 2, Some(vec![2, 0, 1])),
            Err(Error::ReduciblePolynomial { .. })
        ));
        assert!(matches!(
            FieldSpec::new(3, 2, Some(vec![1, 0, 2])),
            Err(Error::InvalidModulus(_))
        ));
        assert!(matches!(
            FieldSpec::new(3, 41, None),
            Err(Error::FieldTooLarge { .. })
        ));
        assert!(matches!(
            FieldSpec::new(3, 0, None),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn default_modulus_is_smallest_irreducible() {
        assert_eq!(f(3, 2).modulus(), Some(&[1, 0, 1][..]));
        // x^3 + 2x + 1 is the first irreducible cubic over F_3 in code order
        assert_eq!(f(3, 3).modulus(), Some(&[1, 2, 0, 1][..]));
        // x^2 + 2 over F_5: 2 is a nonresidue mod 5
        assert_eq!(f(5, 2).modulus(), Some(&[2, 0, 1][..]));
    }

    #[test]
    fn irreducibility_matches_root_search_for_quadratics_and_cubics() {
        for p in [3u64, 5, 7] {
            for k in [2u32, 3] {
                for code in 0..p.pow(k) {
                    let mut m = digits(code, p, k);
                    m.push(1);
                    let has_root =
                        (0..p).any(|x| m.iter().rev().fold(0, |acc, &c| (acc * x + c) % p) == 0);
                    assert_eq!(is_irreducible(&m, p, k), !has_root, "{m:?} mod {p}");
                }
            }
        }
    }

    #[test]
    fn quartic_irreducibility_counts() {
        // number of monic irreducibles of degree 4 over F_3 is (81 - 9) / 4 = 18
        let count = (0..81u64)
            .filter(|&c| {
                let mut m = digits(c, 3, 4);
                m.push(1);
                is_irreducible(&m, 3, 4)
            })
            .count();
        assert_eq!(count, 18);
    }

    #[test]
    fn arith_examples() {
        let f7 = f(7, 1);
        let e = |c| Elem::from_code(c);
        assert_eq!(f7.arith(ArithOp::Mul(e(3), e(5))), Ok(e(1)));
        assert_eq!(f7.arith(ArithOp::Inv(e(3))), Ok(e(5)));
        assert_eq!(f7.arith(ArithOp::Inv(e(0))), Err(Error::DivisionByZero));
        assert!(matches!(
            f7.arith(ArithOp::Add(e(7), e(1))),
            Err(Error::FieldMismatch(_))
        ));
        let f9 = f(3, 2);
        let x = f9.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f9.mul(x, x), f9.minus_one());
        assert_eq!(f9.coeffs(f9.mul(x, x)), vec![2, 0]);
    }

    #[test]
    fn table_and_polynomial_multiplication_agree() {
        let with = f(5, 2);
        let without =
            FieldSpec::with_options(5, 2, None, FieldOptions { table_threshold: 0 }).unwrap();
        assert!(with.has_tables() && !without.has_tables());
        for a in with.elements() {
            for b in with.elements() {
                assert_eq!(with.mul(a, b), without.mul(a, b));
            }
        }
    }

    #[test]
    fn trace_examples() {
        assert_eq!(f(7, 1).trace(Elem::from_code(4)), 4);
        let f9 = f(3, 2);
        let x = f9.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f9.trace(x), 0);
        assert_eq!(f9.trace(Elem::ONE), 2);
    }

    #[test]
    fn trace_is_linear_surjective_and_matches_definition() {
        for (p, k) in [(3, 2), (5, 2), (3, 3)] {
            let fld = f(p, k);
            let mut hit = vec![false; p as usize];
            for a in fld.elements() {
                let direct = fld.trace_direct(a);
                assert!(direct.code() < p);
                assert_eq!(fld.trace(a), direct.code());
                hit[fld.trace(a) as usize] = true;
                for b in fld.elements() {
                    assert_eq!(fld.trace(fld.add(a, b)), (fld.trace(a) + fld.trace(b)) % p);
                }
                for c in 0..p {
                    let ca = fld.mul(Elem::from_code(c), a);
                    assert_eq!(fld.trace(ca), c * fld.trace(a) % p);
                }
            }
            assert!(hit.iter().all(|&h| h));
        }
    }

    #[test]
    fn qr_examples() {
        // squares mod 7 by squaring every element
        let squares: Vec<u64> = (1..7u64).map(|y| y * y % 7).collect();
        let f7 = f(7, 1);
        assert_eq!(f7.qr_class(Elem::ZERO), QRClass::Zero);
        assert!(!squares.contains(&3));
        assert_eq!(f7.qr_class(Elem::from_code(3)), QRClass::NonResidue);
        assert!(squares.contains(&4));
        assert_eq!(f7.qr_class(Elem::from_code(4)), QRClass::Residue);
    }

    #[test]
    fn euler_and_table_paths_agree() {
        let mut q = 3u64;
        while q <= 1 << 12 {
            if let Some((p, k)) = prime_power(q) {
                if p > 2 {
                    let fld = f(p, k);
                    for a in fld.elements() {
                        assert_eq!(Some(fld.qr_class_euler(a)), fld.qr_class_table(a));
                    }
                }
            }
            q += 2;
        }
    }

    #[test]
    fn exhaustive_small_field_laws() {
        for q in (3..=49u64).step_by(2) {
            let Some((p, k)) = prime_power(q) else {
                continue;
            };
            let fld = f(p, k);
            let nonzero: Vec<Elem> = fld.elements().skip(1).collect();
            let residues = nonzero
                .iter()
                .filter(|&&a| fld.qr_class(a) == QRClass::Residue)
                .count() as u64;
            assert_eq!(residues, (q - 1) / 2);
            for &a in &nonzero {
                let inv = fld.inv(a).unwrap();
                assert_eq!(fld.mul(a, inv), Elem::ONE);
                assert_eq!(fld.mul(inv, a), Elem::ONE);
                assert_eq!(fld.add(a, fld.neg(a)), Elem::ZERO);
                for &b in &nonzero {
                    let ab = fld.qr_class(fld.mul(a, b)) == QRClass::Residue;
                    assert_eq!(ab, fld.qr_class(a) == fld.qr_class(b));
                }
            }
        }
    }

    #[test]
    fn large_prime_field_uses_euler_path() {
        let p = 2_147_483_647u64;
        let fld = f(p, 1);
        assert!(!fld.has_tables());
        // 2 is a residue mod p when p = 7 mod 8
        assert_eq!(fld.qr_class(Elem::from_code(2)), QRClass::Residue);
        assert_eq!(fld.qr_class(fld.minus_one()), QRClass::NonResidue);
        let a = Elem::from_code(123_456_789);
        assert_eq!(fld.mul(a, fld.inv(a).unwrap()), Elem::ONE);
    }

    #[test]
    fn prime_power_splits() {
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(13), Some((13, 1)));
        assert_eq!(prime_power(15), None);
        assert_eq!(prime_power(1), None);
    }
}
