//! Exact arithmetic in small finite fields GF(p^n) of odd characteristic.
//!
//! Elements live in the polynomial basis over the prime subfield GF(p) and
//! are addressed by a canonical integer index `sum(c_i * p^i)` in `[0, q)`,
//! so index 0 is the field zero and index 1 the field one. A [`FieldCtx`]
//! owns the (verified irreducible) modulus, a cached primitive element, and
//! a digit table; it is immutable after construction and all operations are
//! pure functions of their inputs.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field cardinality. Fields up to q = 3^7 = 2187 are the
/// tested range; anything below this cap is accepted.
pub const MAX_FIELD_SIZE: u64 = 1 << 17;

/// An element of GF(p^n), stored as its canonical index.
///
/// The index carries no reference to its field; mixing elements of different
/// contexts is a caller bug and is caught only by debug assertions on the
/// index range.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn index(self) -> u64 {
        u64::from(self.0)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A concrete field GF(p^n): odd prime p, degree n, monic irreducible
/// modulus, cardinality q = p^n, and primitive element xi.
pub struct FieldCtx {
    p: u64,
    n: usize,
    q: u64,
    /// Monic modulus of degree n, coefficients low degree first (length n+1).
    modulus: Vec<u64>,
    xi: FieldElement,
    /// Base-p digits of every index, flattened row-major: element e occupies
    /// `digits[e*n .. e*n + n]`, low digit first.
    digits: Vec<u16>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.p, self.n, self.modulus)
    }
}

/// Build GF(p^n) with the lexicographically smallest monic irreducible
/// modulus (coefficients compared low degree first).
pub fn field(p: u64, n: usize) -> Result<Arc<FieldCtx>> {
    Ok(Arc::new(FieldCtx::new(p, n, None)?))
}

/// Build GF(p^n) with an explicit modulus (low degree first, length n+1).
pub fn field_with_modulus(p: u64, n: usize, modulus: &[u64]) -> Result<Arc<FieldCtx>> {
    Ok(Arc::new(FieldCtx::new(p, n, Some(modulus))?))
}

impl FieldCtx {
    /// Construct a field context. With `modulus = None` the lexicographically
    /// smallest monic irreducible of degree n over GF(p) is selected, so the
    /// construction is deterministic across runs. A supplied modulus is
    /// reduced mod p and must be monic of degree n and irreducible.
    pub fn new(p: u64, n: usize, modulus: Option<&[u64]>) -> Result<FieldCtx> {
        if p < 3 || p % 2 == 0 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if n == 0 {
            return Err(Error::ZeroDegree);
        }
        let q128 = (p as u128).pow(n as u32);
        if q128 > MAX_FIELD_SIZE as u128 {
            return Err(Error::FieldTooLarge(q128, MAX_FIELD_SIZE));
        }
        let q = q128 as u64;

        let modulus = match modulus {
            Some(m) => {
                let m: Vec<u64> = m.iter().map(|&c| c % p).collect();
                if m.len() != n + 1 || m[n] != 1 {
                    let got = m.iter().rposition(|&c| c != 0);
                    return Err(Error::BadModulusShape { expected: n, got });
                }
                if !pf_is_irreducible(&m, p) {
                    return Err(Error::ReducibleModulus { p });
                }
                m
            }
            None => smallest_irreducible(p, n),
        };

        // Digit table: one decomposition per element, O(q * n) construction.
        let mut digits = vec![0u16; (q as usize) * n];
        for e in 0..q as usize {
            let mut v = e as u64;
            for i in 0..n {
                digits[e * n + i] = (v % p) as u16;
                v /= p;
            }
        }

        let mut ctx = FieldCtx {
            p,
            n,
            q,
            modulus,
            xi: FieldElement::ZERO,
            digits,
        };
        ctx.xi = ctx.find_primitive_element();
        Ok(ctx)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Modulus coefficients, low degree first (length n+1, monic).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Cached primitive element: the smallest-index element of
    /// multiplicative order q - 1.
    pub fn xi(&self) -> FieldElement {
        self.xi
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// The element with the given canonical index.
    pub fn element(&self, index: u64) -> Result<FieldElement> {
        if index < self.q {
            Ok(FieldElement(index as u32))
        } else {
            Err(Error::IndexOutOfRange { index, q: self.q })
        }
    }

    /// The constant element with value `r mod p` in the prime subfield.
    pub fn from_subfield(&self, r: u64) -> FieldElement {
        FieldElement((r % self.p) as u32)
    }

    /// Polynomial-basis coordinates of `e`, low degree first (length n).
    pub fn coeffs(&self, e: FieldElement) -> &[u16] {
        let i = e.0 as usize * self.n;
        &self.digits[i..i + self.n]
    }

    /// Element from coordinates (low degree first). Short vectors are padded
    /// with zeros; residues are reduced mod p.
    pub fn element_from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() > self.n {
            return Err(Error::BadCoordinateLength {
                expected: self.n,
                got: coeffs.len(),
            });
        }
        let mut index = 0u64;
        for &c in coeffs.iter().rev() {
            index = index * self.p + c % self.p;
        }
        Ok(FieldElement(index as u32))
    }

    /// All q elements in increasing index order, beginning with 0, then 1.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q as u32).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(a.index() < self.q && b.index() < self.q);
        let (da, db) = (self.coeffs(a), self.coeffs(b));
        let mut index = 0u64;
        for i in (0..self.n).rev() {
            index = index * self.p + (u64::from(da[i]) + u64::from(db[i])) % self.p;
        }
        FieldElement(index as u32)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(a.index() < self.q && b.index() < self.q);
        let (da, db) = (self.coeffs(a), self.coeffs(b));
        let mut index = 0u64;
        for i in (0..self.n).rev() {
            index = index * self.p + (u64::from(da[i]) + self.p - u64::from(db[i])) % self.p;
        }
        FieldElement(index as u32)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.sub(FieldElement::ZERO, a)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(a.index() < self.q && b.index() < self.q);
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let n = self.n;
        if n == 1 {
            return FieldElement((a.index() * b.index() % self.p) as u32);
        }
        let (da, db) = (self.coeffs(a), self.coeffs(b));
        // Schoolbook product; entries stay far below u64 overflow because
        // q <= MAX_FIELD_SIZE bounds both p and n.
        let mut buf = [0u64; 2 * MAX_EXT_DEGREE - 1];
        for i in 0..n {
            let ai = u64::from(da[i]);
            if ai == 0 {
                continue;
            }
            for j in 0..n {
                buf[i + j] += ai * u64::from(db[j]);
            }
        }
        // Fold x^e for e >= n using x^n = -(m_0 + m_1 x + ... + m_{n-1} x^{n-1}).
        for e in (n..=2 * n - 2).rev() {
            let c = buf[e] % self.p;
            buf[e] = 0;
            if c != 0 {
                for i in 0..n {
                    buf[e - n + i] += c * (self.p - self.modulus[i]) % self.p;
                }
            }
        }
        let mut index = 0u64;
        for i in (0..n).rev() {
            index = index * self.p + buf[i] % self.p;
        }
        FieldElement(index as u32)
    }

    /// a^e for a nonnegative exponent; 0^0 = 1.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let mut e = e % (self.q - 1);
        if e == 0 {
            return FieldElement::ONE;
        }
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// a^e for any integer exponent; negative exponents go through `inv`,
    /// so `pow_signed(0, -k)` reports division by zero.
    pub fn pow_signed(&self, a: FieldElement, e: i64) -> Result<FieldElement> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            let inv = self.inv(a)?;
            Ok(self.pow(inv, e.unsigned_abs()))
        }
    }

    /// Multiplicative inverse; `inv(0)` is an error, never a silent value.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// The quadratic character: 0 for e = 0, +1 for nonzero squares,
    /// -1 for non-squares, computed as the sign of e^((q-1)/2).
    pub fn quadratic_character(&self, e: FieldElement) -> i32 {
        if e.is_zero() {
            return 0;
        }
        let s = self.pow(e, (self.q - 1) / 2);
        if s == FieldElement::ONE {
            1
        } else {
            debug_assert_eq!(s, self.neg(FieldElement::ONE));
            -1
        }
    }

    fn find_primitive_element(&self) -> FieldElement {
        let order = self.q - 1;
        let primes = prime_factors(order);
        for idx in 2..self.q {
            let e = FieldElement(idx as u32);
            if primes
                .iter()
                .all(|&r| self.pow(e, order / r) != FieldElement::ONE)
            {
                return e;
            }
        }
        unreachable!("every finite field has a primitive element")
    }
}

const MAX_EXT_DEGREE: usize = 18; // q <= 2^17 with p >= 3 keeps n <= 11

fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    if m % 2 == 0 {
        return m == 2;
    }
    let mut d = 3;
    while d * d <= m {
        if m % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Lexicographically smallest monic irreducible of degree n over GF(p),
/// comparing coefficient tuples (c_0, c_1, ..., c_{n-1}) low degree first.
fn smallest_irreducible(p: u64, n: usize) -> Vec<u64> {
    let mut coeffs = vec![0u64; n + 1];
    coeffs[n] = 1;
    loop {
        if pf_is_irreducible(&coeffs, p) {
            return coeffs;
        }
        // Increment as a base-p counter with c_{n-1} as the fastest digit,
        // which enumerates tuples in increasing lexicographic order.
        let mut i = n;
        loop {
            debug_assert!(i > 0, "no irreducible of degree {n} found over GF({p})");
            i -= 1;
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Polynomial helpers over the prime field GF(p), used only for modulus
// verification. Coefficients are plain residues, low degree first.

fn pf_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn pf_rem(mut a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
    debug_assert!(!b.is_empty());
    let db = b.len() - 1;
    let lead_inv = pf_inv_scalar(b[db], p);
    while a.len() > db {
        let da = a.len() - 1;
        let c = a[da] * lead_inv % p;
        if c != 0 {
            for i in 0..=db {
                let idx = da - db + i;
                a[idx] = (a[idx] + (p - c * b[i] % p)) % p;
            }
        }
        a.pop();
        pf_trim(&mut a);
        if a.is_empty() {
            break;
        }
    }
    a
}

fn pf_inv_scalar(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a != 0 mod p.
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

fn pf_gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    pf_trim(&mut a);
    pf_trim(&mut b);
    while !b.is_empty() {
        let r = pf_rem(a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn pf_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
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
    pf_trim(&mut prod);
    pf_rem(prod, f, p)
}

/// x^e mod f over GF(p).
fn pf_pow_x(e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut base = pf_rem(vec![0, 1], f, p);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = pf_mulmod(&acc, &base, f, p);
        }
        base = pf_mulmod(&base, &base, f, p);
        e >>= 1;
    }
    acc
}

/// Rabin irreducibility test for a monic polynomial over GF(p):
/// f of degree n is irreducible iff x^(p^n) = x (mod f) and, for every prime
/// divisor r of n, gcd(x^(p^(n/r)) - x mod f, f) = 1.
fn pf_is_irreducible(f: &[u64], p: u64) -> bool {
    let n = f.len() - 1;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let xq = pf_pow_x(p.pow(n as u32), f, p);
    let mut diff = xq;
    // subtract x
    if diff.len() < 2 {
        diff.resize(2, 0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    pf_trim(&mut diff);
    if !diff.is_empty() {
        return false;
    }
    for r in prime_factors(n as u64) {
        let k = n as u64 / r;
        let mut g = pf_pow_x(p.pow(k as u32), f, p);
        if g.len() < 2 {
            g.resize(2, 0);
        }
        g[1] = (g[1] + p - 1) % p;
        pf_trim(&mut g);
        let d = pf_gcd(f.to_vec(), g, p);
        if d.len() != 1 {
            return false;
        }
    }
    true
}
