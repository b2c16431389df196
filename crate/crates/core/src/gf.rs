//! Exact arithmetic in finite fields GF(p^m).
//!
//! An element is identified with its canonical encoding
//! `enc(x) = c_0 + c_1 p + ... + c_{m-1} p^{m-1}`, where `c_i` are the
//! coefficients of `x` in the basis `1, t, ..., t^{m-1}` of
//! `GF(p)[t] / (modulus)`. The encoding is what the CLI reads and prints, so
//! it is stable for a fixed modulus.
//!
//! Fields up to [`TABLE_LIMIT`] elements carry discrete log/exp tables for
//! multiplication; larger fields fall back to schoolbook polynomial products.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order that gets log/exp tables.
pub const TABLE_LIMIT: u64 = 1 << 20;
/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 32;

/// A field element, stored as its canonical encoding.
///
/// Elements do not carry their field; all arithmetic goes through a
/// [`FiniteField`]. Use [`FiniteField::element`] to validate untrusted input.
#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub const fn from_enc(enc: u32) -> Self {
        Elem(enc)
    }

    pub const fn enc(self) -> u32 {
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

/// 2-adic valuations used by the Dickson preimage and value-set formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoAdicData {
    /// `2^r || q^2 - 1`; absent for even `q`.
    pub r: Option<u32>,
    /// `2^t || n`.
    pub t: u32,
}

/// Exact 2-adic valuations `r` (of `q^2 - 1`, odd `q` only) and `t` (of `n`).
///
/// Panics if `n == 0`.
pub fn two_adic(q: u64, n: u64) -> TwoAdicData {
    assert!(n > 0, "2-adic valuation of 0 is undefined");
    let r = if q % 2 == 1 {
        let qq = q as u128;
        Some((qq * qq - 1).trailing_zeros())
    } else {
        None
    };
    TwoAdicData {
        r,
        t: n.trailing_zeros(),
    }
}

struct LogTables {
    // exp[i] = g^i for i in 0..2(q-1), so log sums never need reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
}

struct Inner {
    p: u64,
    m: u32,
    q: u64,
    modulus: Vec<u64>,
    trace_basis: Vec<u64>,
    tables: Option<LogTables>,
}

/// The field GF(p^m) with an explicit monic irreducible modulus.
///
/// Cloning is cheap; the field is immutable once built.
#[derive(Clone)]
pub struct FiniteField {
    inner: Arc<Inner>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FiniteField {}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.spec_string())
    }
}

impl FiniteField {
    /// Builds GF(p^m). Without an explicit modulus, the smallest monic
    /// irreducible of degree `m` is used, ordering candidates by the integer
    /// whose base-`p` digits are the coefficients (constant term least
    /// significant). For `m = 1` that is the polynomial `x`.
    pub fn new(p: u64, m: u32, modulus: Option<&[u64]>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::BadModulus(
                "extension degree must be at least 1".into(),
            ));
        }
        let q = p
            .checked_pow(m)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or(Error::FieldTooLarge { p, m })?;
        let modulus = match modulus {
            Some(c) => {
                if c.len() != m as usize + 1 {
                    return Err(Error::BadModulus(format!(
                        "expected {} coefficients for degree {m}, got {}",
                        m + 1,
                        c.len()
                    )));
                }
                if c[m as usize] != 1 {
                    return Err(Error::BadModulus("modulus must be monic".into()));
                }
                if let Some(bad) = c.iter().find(|&&v| v >= p) {
                    return Err(Error::BadModulus(format!(
                        "coefficient {bad} is not reduced mod {p}"
                    )));
                }
                if !fp_poly::is_irreducible(c, p) {
                    return Err(Error::BadModulus(format!(
                        "{c:?} is reducible over GF({p})"
                    )));
                }
                c.to_vec()
            }
            None => smallest_irreducible(p, m),
        };
        let mut inner = Inner {
            p,
            m,
            q,
            modulus,
            trace_basis: Vec::new(),
            tables: None,
        };
        if q <= TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        inner.trace_basis = (0..m)
            .map(|i| {
                let basis = Elem(p.pow(i) as u32);
                let mut acc = Elem::ZERO;
                let mut y = basis;
                for _ in 0..m {
                    acc = add_raw(&inner, acc, y);
                    y = pow_raw(&inner, y, p);
                }
                debug_assert!((acc.0 as u64) < p, "trace must land in the prime field");
                acc.0 as u64
            })
            .collect();
        Ok(FiniteField {
            inner: Arc::new(inner),
        })
    }

    /// Parses `"p^m"`, `"p^m/c0,...,cm"`, or a bare prime power `"q"`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (head, modulus) = match spec.split_once('/') {
            Some((h, tail)) => {
                let coeffs = tail
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<u64>()
                            .map_err(|_| Error::Parse(format!("bad modulus coefficient {s:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                (h, Some(coeffs))
            }
            None => (spec, None),
        };
        let (p, m) = match head.split_once('^') {
            Some((p, m)) => (
                p.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad characteristic in {spec:?}")))?,
                m.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad degree in {spec:?}")))?,
            ),
            None => {
                let q = head
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad field spec {spec:?}")))?;
                prime_power(q).ok_or_else(|| Error::Parse(format!("{q} is not a prime power")))?
            }
        };
        FiniteField::new(p, m, modulus.as_deref())
    }

    /// Canonical `"p^m/c0,...,cm"` form, which [`FiniteField::from_spec`] accepts.
    pub fn spec_string(&self) -> String {
        let coeffs: Vec<String> = self.inner.modulus.iter().map(u64::to_string).collect();
        format!("{}^{}/{}", self.inner.p, self.inner.m, coeffs.join(","))
    }

    pub fn characteristic(&self) -> u64 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.m
    }

    pub fn order(&self) -> u64 {
        self.inner.q
    }

    /// Modulus coefficients, low to high.
    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    pub fn is_even(&self) -> bool {
        self.inner.p == 2
    }

    pub fn element(&self, enc: u64) -> Result<Elem> {
        if enc < self.inner.q {
            Ok(Elem(enc as u32))
        } else {
            Err(Error::ElementOutOfRange {
                enc,
                q: self.inner.q,
            })
        }
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone + Send {
        (0..self.inner.q).map(|e| Elem(e as u32))
    }

    /// Nonzero elements in encoding order.
    pub fn nonzero_elements(&self) -> impl Iterator<Item = Elem> + Clone + Send {
        (1..self.inner.q).map(|e| Elem(e as u32))
    }

    /// Image of the integer `k` in the prime subfield.
    pub fn from_int(&self, k: i64) -> Elem {
        Elem(k.rem_euclid(self.inner.p as i64) as u32)
    }

    /// Coefficients of `x` in the polynomial basis, low to high.
    pub fn coeffs(&self, x: Elem) -> Vec<u64> {
        let mut v = x.0 as u64;
        (0..self.inner.m)
            .map(|_| {
                let d = v % self.inner.p;
                v /= self.inner.p;
                d
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<Elem> {
        if coeffs.len() != self.inner.m as usize {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                self.inner.m,
                coeffs.len()
            )));
        }
        let mut enc = 0u64;
        for &c in coeffs.iter().rev() {
            if c >= self.inner.p {
                return Err(Error::InvalidArgument(format!(
                    "coefficient {c} not reduced"
                )));
            }
            enc = enc * self.inner.p + c;
        }
        Ok(Elem(enc as u32))
    }

    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        add_raw(&self.inner, x, y)
    }

    pub fn neg(&self, x: Elem) -> Elem {
        let inner = &*self.inner;
        if inner.p == 2 {
            return x;
        }
        if inner.m == 1 {
            return Elem(((inner.p - x.0 as u64) % inner.p) as u32);
        }
        map_digits(inner, x, |d| (inner.p - d) % inner.p)
    }

    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        mul_raw(&self.inner, x, y)
    }

    pub fn inv(&self, x: Elem) -> Result<Elem> {
        if x.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let inner = &*self.inner;
        Ok(match &inner.tables {
            Some(t) => Elem(t.exp[(inner.q - 1 - t.log[x.0 as usize] as u64) as usize]),
            None => pow_raw(inner, x, inner.q - 2),
        })
    }

    pub fn div(&self, x: Elem, y: Elem) -> Result<Elem> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// `x^e`, with `0^0 = 1`.
    pub fn pow(&self, x: Elem, e: u64) -> Elem {
        pow_raw(&self.inner, x, e)
    }

    /// Absolute trace `Tr(x) = x + x^p + ... + x^{p^{m-1}}`, as a residue mod `p`.
    pub fn trace(&self, x: Elem) -> u32 {
        let inner = &*self.inner;
        if inner.m == 1 {
            return x.0;
        }
        let mut v = x.0 as u64;
        let mut acc = 0u64;
        for &tb in &inner.trace_basis {
            acc = (acc + (v % inner.p) * tb) % inner.p;
            v /= inner.p;
        }
        acc as u32
    }

    /// Quadratic character: 0 at 0, +1 on nonzero squares, -1 otherwise.
    pub fn quad_char(&self, x: Elem) -> Result<i8> {
        let inner = &*self.inner;
        if inner.p == 2 {
            return Err(Error::RequiresOddField);
        }
        if x.is_zero() {
            return Ok(0);
        }
        let square = match &inner.tables {
            Some(t) => t.log[x.0 as usize] % 2 == 0,
            None => pow_raw(inner, x, (inner.q - 1) / 2) == Elem::ONE,
        };
        Ok(if square { 1 } else { -1 })
    }

    pub fn two_adic(&self, n: u64) -> TwoAdicData {
        two_adic(self.inner.q, n)
    }
}

impl FromStr for FiniteField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FiniteField::from_spec(s)
    }
}

fn map_digits(inner: &Inner, x: Elem, f: impl Fn(u64) -> u64) -> Elem {
    let mut v = x.0 as u64;
    let mut out = 0u64;
    let mut scale = 1u64;
    for _ in 0..inner.m {
        out += f(v % inner.p) * scale;
        v /= inner.p;
        scale *= inner.p;
    }
    Elem(out as u32)
}

fn add_raw(inner: &Inner, x: Elem, y: Elem) -> Elem {
    let p = inner.p;
    if p == 2 {
        return Elem(x.0 ^ y.0);
    }
    if inner.m == 1 {
        return Elem(((x.0 as u64 + y.0 as u64) % p) as u32);
    }
    let (mut a, mut b) = (x.0 as u64, y.0 as u64);
    let mut out = 0u64;
    let mut scale = 1u64;
    for _ in 0..inner.m {
        out += ((a % p + b % p) % p) * scale;
        a /= p;
        b /= p;
        scale *= p;
    }
    Elem(out as u32)
}

fn mul_raw(inner: &Inner, x: Elem, y: Elem) -> Elem {
    if x.is_zero() || y.is_zero() {
        return Elem::ZERO;
    }
    if let Some(t) = &inner.tables {
        let i = t.log[x.0 as usize] as usize + t.log[y.0 as usize] as usize;
        return Elem(t.exp[i]);
    }
    mul_schoolbook(inner, x, y)
}

fn mul_schoolbook(inner: &Inner, x: Elem, y: Elem) -> Elem {
    let p = inner.p;
    let m = inner.m as usize;
    if m == 1 {
        return Elem((x.0 as u64 * y.0 as u64 % p) as u32);
    }
    // m <= 32 because p >= 2 and q <= 2^32.
    let mut a = [0u64; 32];
    let mut b = [0u64; 32];
    let (mut va, mut vb) = (x.0 as u64, y.0 as u64);
    for i in 0..m {
        a[i] = va % p;
        b[i] = vb % p;
        va /= p;
        vb /= p;
    }
    let mut prod = [0u64; 64];
    for i in 0..m {
        if a[i] == 0 {
            continue;
        }
        for j in 0..m {
            prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
        }
    }
    for i in (m..2 * m - 1).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        let neg_c = p - c;
        for j in 0..m {
            prod[i - m + j] = (prod[i - m + j] + neg_c * inner.modulus[j]) % p;
        }
        prod[i] = 0;
    }
    let mut enc = 0u64;
    for i in (0..m).rev() {
        enc = enc * p + prod[i];
    }
    Elem(enc as u32)
}

fn pow_raw(inner: &Inner, x: Elem, e: u64) -> Elem {
    if e == 0 {
        return Elem::ONE;
    }
    if x.is_zero() {
        return Elem::ZERO;
    }
    let order = inner.q - 1;
    let e = e % order;
    if let Some(t) = &inner.tables {
        let i = (t.log[x.0 as usize] as u128 * e as u128 % order as u128) as usize;
        return Elem(t.exp[i]);
    }
    let mut base = x;
    let mut acc = Elem::ONE;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_schoolbook(inner, acc, base);
        }
        base = mul_schoolbook(inner, base, base);
        e >>= 1;
    }
    acc
}

fn build_tables(inner: &Inner) -> LogTables {
    let q = inner.q;
    let order = q - 1;
    let factors = prime_factors(order);
    let slow_pow = |x: Elem, mut e: u64| {
        let mut base = x;
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_schoolbook(inner, acc, base);
            }
            base = mul_schoolbook(inner, base, base);
            e >>= 1;
        }
        acc
    };
    let generator = (1..q)
        .map(|g| Elem(g as u32))
        .find(|&g| factors.iter().all(|&r| slow_pow(g, order / r) != Elem::ONE))
        .expect("multiplicative group of a finite field is cyclic");
    let mut exp = vec![0u32; 2 * order as usize];
    let mut log = vec![0u32; q as usize];
    let mut cur = Elem::ONE;
    for i in 0..order as usize {
        exp[i] = cur.0;
        exp[i + order as usize] = cur.0;
        log[cur.0 as usize] = i as u32;
        cur = mul_schoolbook(inner, cur, generator);
    }
    LogTables { exp, log }
}

/// `(p, m)` with `p^m = q`, if `q` is a prime power.
fn prime_power(q: u64) -> Option<(u64, u32)> {
    let p = prime_factors(q).into_iter().next()?;
    let mut m = 0;
    let mut rest = q;
    while rest.is_multiple_of(p) {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
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
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn smallest_irreducible(p: u64, m: u32) -> Vec<u64> {
    let count = p.pow(m);
    (0..count)
        .map(|code| {
            let mut c = Vec::with_capacity(m as usize + 1);
            let mut v = code;
            for _ in 0..m {
                c.push(v % p);
                v /= p;
            }
            c.push(1);
            c
        })
        .find(|c| fp_poly::is_irreducible(c, p))
        .expect("irreducible polynomials exist in every degree")
}

/// Dense polynomials over the prime field GF(p), only what the
/// irreducibility test needs.
mod fp_poly {
    fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn inv_mod(a: u64, p: u64) -> u64 {
        let mut base = a % p;
        let mut e = p - 2;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc
    }

    fn rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let df = f.len() - 1;
        let lead_inv = inv_mod(f[df], p);
        while a.len() > df {
            let top = a.len() - 1;
            let c = a[top] * lead_inv % p;
            let shift = top - df;
            for (j, &fj) in f.iter().enumerate() {
                a[shift + j] = (a[shift + j] + (p - c) * fj % p) % p;
            }
            a = trim(a);
        }
        a
    }

    fn mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj) % p;
            }
        }
        rem(&prod, f, p)
    }

    fn pow_mod(a: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
        let mut base = rem(a, f, p);
        let mut acc = vec![1u64];
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &base, f, p);
            }
            base = mul_mod(&base, &base, f, p);
            e >>= 1;
        }
        acc
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Ben-Or test: a degree-`m` polynomial is irreducible iff it shares no
    /// factor with `x^{p^i} - x` for every `1 <= i <= m/2`.
    pub(super) fn is_irreducible(f: &[u64], p: u64) -> bool {
        let f = trim(f.to_vec());
        if f.len() < 2 {
            return false;
        }
        let m = f.len() - 1;
        let x = vec![0u64, 1];
        let mut h = x.clone();
        for _ in 0..m / 2 {
            h = pow_mod(&h, p, &f, p);
            let mut diff = h.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = (diff[1] + p - 1) % p;
            let g = gcd(&f, &diff, p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }

}
