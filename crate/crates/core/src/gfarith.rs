//! Exact arithmetic in a two-level field tower `F_p ⊂ F_q ⊂ F_{q^d}`.
//!
//! Every element is stored as its integer code: the base-`p` digits of the
//! code are the element's coordinates over `F_p`, lowest tower level first.
//! A subfield element keeps the same code inside the larger field, so
//! scalar embedding is the identity on codes.
//!
//! Each level eagerly builds log/antilog tables at construction time, so a
//! [`FieldCtx`] is immutable afterwards and can be shared freely between
//! threads.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest top-field order accepted by [`FieldCtx::new`].
pub const DEFAULT_SIZE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degrees must be positive")]
    ZeroDegree,
    #[error("field of order {order} exceeds the size limit {limit}")]
    SizeLimitExceeded { order: u128, limit: u64 },
    #[error("operands live at different tower levels ({0:?} vs {1:?})")]
    LevelMismatch(Level, Level),
    #[error("division by zero")]
    DivisionByZero,
    #[error("code {code} is not an element of a field of order {order}")]
    BadCode { code: u64, order: u32 },
    #[error("{count} vectors cannot be independent over an extension of degree {degree}")]
    TooManyVectors { count: usize, degree: usize },
}

/// Position of a field inside the tower.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Prime,
    Base,
    Top,
}

impl Level {
    pub fn below(self) -> Option<Level> {
        match self {
            Level::Prime => None,
            Level::Base => Some(Level::Prime),
            Level::Top => Some(Level::Base),
        }
    }
}

/// An element of one of the tower's fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    level: Level,
    code: u32,
}

impl FieldElement {
    pub fn level(&self) -> Level {
        self.level
    }

    pub fn code(&self) -> u32 {
        self.code
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code)
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u32(self.code)
    }
}

/// A single finite field with table-driven multiplication on integer codes.
#[derive(Clone)]
pub struct Field {
    p: u32,
    degree: u32,
    order: u32,
    // exp is stored twice over so that exp[log a + log b] never needs a reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("degree", &self.degree)
            .field("order", &self.order)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.order == other.order && self.exp == other.exp
    }
}

impl Eq for Field {}

impl Field {
    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Field, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NotPrime(p as u64));
        }
        let pp = p as u64;
        Ok(Field::tabulate(p, 1, p, |a, b| ((a as u64 * b as u64) % pp) as u32))
    }

    /// The extension of `sub` defined by the monic polynomial `modulus`
    /// (coefficient codes, constant term first). The caller is responsible
    /// for irreducibility.
    fn extension(sub: &Field, modulus: &[u32]) -> Field {
        let k = modulus.len() - 1;
        let order = (sub.order as u64).pow(k as u32) as u32;
        let s = sub.order;
        let slow_mul = |a: u32, b: u32| -> u32 {
            let pa = to_digits(a, s, k);
            let pb = to_digits(b, s, k);
            let prod = poly::mul(sub, &pa, &pb);
            let mut r = poly::rem(sub, &prod, modulus);
            r.resize(k, 0);
            from_digits(&r, s)
        };
        Field::tabulate(sub.p, sub.degree * k as u32, order, slow_mul)
    }

    fn tabulate(p: u32, degree: u32, order: u32, slow_mul: impl Fn(u32, u32) -> u32) -> Field {
        let n = (order - 1) as u64;
        let factors = prime_factors(n);
        let slow_pow = |mut base: u32, mut k: u64| -> u32 {
            let mut acc = 1;
            while k > 0 {
                if k & 1 == 1 {
                    acc = slow_mul(acc, base);
                }
                base = slow_mul(base, base);
                k >>= 1;
            }
            acc
        };
        let generator = (1..order)
            .find(|&g| factors.iter().all(|&r| slow_pow(g, n / r) != 1))
            .expect("no primitive element: the defining polynomial is not irreducible");

        let n = n as usize;
        let mut exp = vec![0u32; 2 * n];
        let mut log = vec![u32::MAX; order as usize];
        let mut cur = 1u32;
        for i in 0..n {
            assert_eq!(log[cur as usize], u32::MAX, "multiplicative group is not cyclic");
            exp[i] = cur;
            exp[i + n] = cur;
            log[cur as usize] = i as u32;
            cur = slow_mul(cur, generator);
        }
        assert_eq!(cur, 1);
        log[0] = 0;
        Field { p, degree, order, exp, log }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn contains(&self, code: u32) -> bool {
        code < self.order
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let p = self.p;
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0u32, 1u32);
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let p = self.p;
        let mut a = a;
        let (mut out, mut place) = (0u32, 1u32);
        while a > 0 {
            out += ((p - a % p) % p) * place;
            a /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.order - 1;
        Some(self.exp[((n - self.log[a as usize]) % n) as usize])
    }

    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    pub fn pow(&self, a: u32, k: u64) -> u32 {
        if a == 0 {
            return if k == 0 { 1 } else { 0 };
        }
        let n = (self.order - 1) as u64;
        let e = (self.log[a as usize] as u64 * (k % n)) % n;
        self.exp[e as usize]
    }

    /// `a^(s^i)`, where `s` is the order of some subfield.
    pub fn frobenius(&self, a: u32, s: u64, i: u64) -> u32 {
        if a == 0 {
            return 0;
        }
        let n = (self.order - 1) as u64;
        self.pow(a, mod_pow(s % n.max(1), i, n.max(1)))
    }

    /// Discrete log to the tabulated primitive element.
    pub fn log(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    /// Determinant of a square matrix by Gaussian elimination.
    pub fn det(&self, mut m: Vec<Vec<u32>>) -> u32 {
        let size = m.len();
        let mut det = 1u32;
        for col in 0..size {
            let Some(pivot) = (col..size).find(|&r| m[r][col] != 0) else {
                return 0;
            };
            if pivot != col {
                m.swap(pivot, col);
                det = self.neg(det);
            }
            let pv = m[col][col];
            det = self.mul(det, pv);
            let inv = self.inv(pv).expect("nonzero pivot");
            let pivot = m[col].clone();
            for row in &mut m[col + 1..] {
                let factor = self.mul(row[col], inv);
                if factor == 0 {
                    continue;
                }
                for (x, &y) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *x = self.sub(*x, self.mul(factor, y));
                }
            }
        }
        det
    }
}

/// Polynomials over a tabulated field, coefficient codes little-endian.
pub(crate) mod poly {
    use super::Field;

    pub fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn mul(f: &Field, a: &[u32], b: &[u32]) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
        trim(out)
    }

    pub fn rem(f: &Field, a: &[u32], m: &[u32]) -> Vec<u32> {
        let m = trim(m.to_vec());
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = f.inv(m[dm]).expect("zero modulus");
        while r.len() > dm {
            let top = r.len() - 1;
            let factor = f.mul(r[top], lead_inv);
            let shift = top - dm;
            for (i, &c) in m.iter().enumerate() {
                r[shift + i] = f.sub(r[shift + i], f.mul(factor, c));
            }
            r = trim(r);
        }
        r
    }

    pub fn sub(f: &Field, a: &[u32], b: &[u32]) -> Vec<u32> {
        let len = a.len().max(b.len());
        let out = (0..len)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                f.sub(x, y)
            })
            .collect();
        trim(out)
    }

    pub fn pow_mod(f: &Field, base: &[u32], mut k: u64, m: &[u32]) -> Vec<u32> {
        let mut acc = rem(f, &[1], m);
        let mut base = rem(f, base, m);
        while k > 0 {
            if k & 1 == 1 {
                acc = rem(f, &mul(f, &acc, &base), m);
            }
            base = rem(f, &mul(f, &base, &base), m);
            k >>= 1;
        }
        acc
    }

    pub fn gcd(f: &Field, a: &[u32], b: &[u32]) -> Vec<u32> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(f, &a, &b);
            a = b;
            b = r;
        }
        a
    }

    /// Rabin's test: `x^(s^k) ≡ x (mod g)` and `gcd(x^(s^(k/r)) - x, g) = 1`
    /// for every prime `r | k`, where `s` is the order of `f`.
    pub fn is_irreducible(f: &Field, g: &[u32]) -> bool {
        let g = trim(g.to_vec());
        let k = g.len() - 1;
        if k == 0 {
            return false;
        }
        let s = f.order() as u64;
        let x = rem(f, &[0, 1], &g);
        let mut powers = Vec::with_capacity(k + 1);
        powers.push(x.clone());
        for j in 1..=k {
            let next = pow_mod(f, &powers[j - 1], s, &g);
            powers.push(next);
        }
        if powers[k] != x {
            return false;
        }
        super::prime_factors(k as u64).into_iter().all(|r| {
            let h = sub(f, &powers[k / r as usize], &x);
            gcd(f, &h, &g).len() == 1
        })
    }

    /// The least monic irreducible polynomial of degree `k` over `f`,
    /// ordering candidates by the integer code of their lower coefficients.
    pub fn least_irreducible(f: &Field, k: usize) -> Vec<u32> {
        let s = f.order();
        let count = (s as u64).pow(k as u32);
        for t in 0..count {
            let mut cand = Vec::with_capacity(k + 1);
            let mut rest = t;
            for _ in 0..k {
                cand.push((rest % s as u64) as u32);
                rest /= s as u64;
            }
            cand.push(1);
            if is_irreducible(f, &cand) {
                return cand;
            }
        }
        unreachable!("every degree has a monic irreducible polynomial");
    }
}

/// Immutable description of the tower `F_p ⊂ F_q ⊂ F_{q^d}`, `q = p^e`.
#[derive(Clone, Debug)]
pub struct FieldCtx {
    p: u32,
    e: u32,
    d: u32,
    mod_base: Vec<u32>,
    mod_top: Vec<u32>,
    prime: Field,
    base: Field,
    top: Field,
}

impl FieldCtx {
    pub fn new(p: u64, e: u32, d: u32) -> Result<FieldCtx, FieldError> {
        FieldCtx::with_limit(p, e, d, DEFAULT_SIZE_LIMIT)
    }

    pub fn with_limit(p: u64, e: u32, d: u32, limit: u64) -> Result<FieldCtx, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if e == 0 || d == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order = (p as u128).checked_pow(e * d).unwrap_or(u128::MAX);
        if order > limit as u128 || order > u32::MAX as u128 {
            return Err(FieldError::SizeLimitExceeded { order, limit });
        }
        let prime = Field::prime(p as u32)?;
        let mod_base = poly::least_irreducible(&prime, e as usize);
        let base = Field::extension(&prime, &mod_base);
        let mod_top = poly::least_irreducible(&base, d as usize);
        let top = Field::extension(&base, &mod_top);
        Ok(FieldCtx { p: p as u32, e, d, mod_base, mod_top, prime, base, top })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Order of the middle field.
    pub fn q(&self) -> u32 {
        self.base.order
    }

    pub fn mod_base(&self) -> &[u32] {
        &self.mod_base
    }

    pub fn mod_top(&self) -> &[u32] {
        &self.mod_top
    }

    pub fn field(&self, level: Level) -> &Field {
        match level {
            Level::Prime => &self.prime,
            Level::Base => &self.base,
            Level::Top => &self.top,
        }
    }

    pub fn prime_field(&self) -> &Field {
        &self.prime
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn top(&self) -> &Field {
        &self.top
    }

    /// Degree of `level` over the level directly below it.
    pub fn level_degree(&self, level: Level) -> u32 {
        match level {
            Level::Prime => 1,
            Level::Base => self.e,
            Level::Top => self.d,
        }
    }

    pub fn element(&self, level: Level, code: u32) -> Result<FieldElement, FieldError> {
        let order = self.field(level).order;
        if code >= order {
            return Err(FieldError::BadCode { code: code as u64, order });
        }
        Ok(FieldElement { level, code })
    }

    pub fn zero(&self, level: Level) -> FieldElement {
        FieldElement { level, code: 0 }
    }

    pub fn one(&self, level: Level) -> FieldElement {
        FieldElement { level, code: 1 }
    }

    /// Views a lower-level element as a member of `level`.
    pub fn embed(&self, a: FieldElement, level: Level) -> FieldElement {
        assert!(a.level <= level, "cannot embed {:?} into {:?}", a.level, level);
        FieldElement { level, code: a.code }
    }

    fn same_level(a: FieldElement, b: FieldElement) -> Result<Level, FieldError> {
        if a.level != b.level {
            return Err(FieldError::LevelMismatch(a.level, b.level));
        }
        Ok(a.level)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        let level = Self::same_level(a, b)?;
        Ok(FieldElement { level, code: self.field(level).add(a.code, b.code) })
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        let level = Self::same_level(a, b)?;
        Ok(FieldElement { level, code: self.field(level).sub(a.code, b.code) })
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        let level = Self::same_level(a, b)?;
        Ok(FieldElement { level, code: self.field(level).mul(a.code, b.code) })
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        let code = self.field(a.level).inv(a.code).ok_or(FieldError::DivisionByZero)?;
        Ok(FieldElement { level: a.level, code })
    }

    pub fn pow(&self, a: FieldElement, k: u64) -> FieldElement {
        FieldElement { level: a.level, code: self.field(a.level).pow(a.code, k) }
    }

    /// `a^(q^i)` for `a` in the top field.
    pub fn frobenius(&self, a: FieldElement, i: u64) -> Result<FieldElement, FieldError> {
        if a.level != Level::Top {
            return Err(FieldError::LevelMismatch(a.level, Level::Top));
        }
        Ok(FieldElement { level: Level::Top, code: self.frobenius_code(a.code, i) })
    }

    #[inline]
    pub fn frobenius_code(&self, a: u32, i: u64) -> u32 {
        self.top.frobenius(a, self.q() as u64, i)
    }

    /// Determinant of the Moore matrix with entry `(i, j) = xs[j]^(q^i)`.
    pub fn moore_det(&self, xs: &[FieldElement]) -> Result<FieldElement, FieldError> {
        if let Some(bad) = xs.iter().find(|x| x.level != Level::Top) {
            return Err(FieldError::LevelMismatch(bad.level, Level::Top));
        }
        if xs.len() > self.d as usize {
            return Err(FieldError::TooManyVectors { count: xs.len(), degree: self.d as usize });
        }
        let codes: Vec<u32> = xs.iter().map(|x| x.code).collect();
        Ok(FieldElement { level: Level::Top, code: self.moore_det_codes(&codes) })
    }

    pub fn moore_det_codes(&self, xs: &[u32]) -> u32 {
        let m = xs.len();
        let matrix = (0..m)
            .map(|i| xs.iter().map(|&x| self.frobenius_code(x, i as u64)).collect())
            .collect();
        self.top.det(matrix)
    }

    /// Whether `x ↦ x^(q+1)` permutes the top field.
    pub fn is_permutation_exponent(&self) -> bool {
        let q = self.q() as u64;
        gcd(q + 1, self.top.order as u64 - 1) == 1
    }

    /// Coefficients of `a` over the level directly below it, constant term first.
    pub fn coeffs(&self, a: FieldElement) -> Vec<FieldElement> {
        match a.level.below() {
            None => vec![a],
            Some(lower) => {
                let s = self.field(lower).order;
                to_digits(a.code, s, self.level_degree(a.level) as usize)
                    .into_iter()
                    .map(|code| FieldElement { level: lower, code })
                    .collect()
            }
        }
    }
}

impl Serialize for FieldCtx {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("FieldCtx", 5)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("e", &self.e)?;
        st.serialize_field("d", &self.d)?;
        st.serialize_field("mod_base", &self.mod_base)?;
        st.serialize_field("mod_top", &self.mod_top)?;
        st.end()
    }
}

/// Little-endian base-`base` digits of `code`, padded to `len`.
pub fn to_digits(mut code: u32, base: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(code % base);
        code /= base;
    }
    debug_assert_eq!(code, 0, "code has more than {len} digits");
    out
}

pub fn from_digits(digits: &[u32], base: u32) -> u32 {
    digits.iter().rev().fold(0u32, |acc, &d| acc * base + d)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= n {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

/// Distinct prime divisors, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits a prime power `q = p^e`, or `None` if `q` is not one.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let fs = prime_factors(q);
    if fs.len() != 1 {
        return None;
    }
    let p = fs[0];
    let (mut rest, mut e) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    Some((p, e))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn mod_pow(mut base: u64, mut k: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while k > 0 {
        if k & 1 == 1 {
            acc = (acc as u128 * base as u128 % m as u128) as u64;
        }
        base = (base as u128 * base as u128 % m as u128) as u64;
        k >>= 1;
    }
    acc
}
