//! Binomial coefficients modulo a prime.
//!
//! Everything here works digit-wise via Lucas' theorem — C(m, k) mod p is the
//! product of the digit binomials C(m_t, k_t) — so huge coefficients like
//! C(3i, i-1) are never materialized as integers. Negative upper indices go
//! through C(-m, k) = (-1)^k C(m+k-1, k). On top of that sit the closed-form
//! predictions for the two coefficient families that appear in the inverses
//! of the cubic-branch permutation polynomials: their nonzero supports and
//! the residues at the support points.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Base-p digits of a nonnegative integer, low digit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitExpansion {
    pub base: u64,
    pub digits: Vec<u64>,
}

impl DigitExpansion {
    pub fn value(&self) -> u64 {
        self.digits
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * self.base + d)
    }

    /// digits[0] >= digits[1] >= ... (trivially true for empty expansions).
    pub fn is_nonincreasing(&self) -> bool {
        self.digits.windows(2).all(|w| w[0] >= w[1])
    }
}

/// Base-p digits of m, low digit first, padded to `len` when given.
pub fn digits(m: u64, p: u64, len: Option<usize>) -> Result<DigitExpansion> {
    check_prime(p)?;
    let mut digits = Vec::new();
    let mut v = m;
    while v > 0 {
        digits.push(v % p);
        v /= p;
    }
    if let Some(len) = len {
        if digits.len() > len {
            return Err(Error::DigitOverflow {
                value: m,
                base: p,
                len,
            });
        }
        digits.resize(len, 0);
    }
    Ok(DigitExpansion { base: p, digits })
}

/// C(m, k) mod p by Lucas' theorem: the digit-wise product of C(m_t, k_t),
/// which is 0 as soon as some digit pair has k_t > m_t. In particular the
/// result is 0 whenever k > m.
pub fn binom_mod_p(m: u64, k: u64, p: u64) -> Result<u64> {
    check_prime(p)?;
    Ok(lucas(m, k, p))
}

/// The generalized binomial coefficient C(m, k) = m(m-1)...(m-k+1)/k! mod p,
/// defined for any integer upper index. For m < 0 the sign-flip identity
/// C(-m, k) = (-1)^k C(m+k-1, k) applies first, then Lucas.
pub fn binom_mod_p_generalized(m: i64, k: u64, p: u64) -> Result<u64> {
    check_prime(p)?;
    if m >= 0 {
        return Ok(lucas(m as u64, k, p));
    }
    let mm = m.unsigned_abs();
    let unsigned = lucas(mm + k - 1, k, p);
    if k % 2 == 0 {
        Ok(unsigned)
    } else {
        Ok((p - unsigned) % p)
    }
}

fn check_prime(p: u64) -> Result<()> {
    if p < 2 {
        return Err(Error::NotPrime(p));
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return Err(Error::NotPrime(p));
        }
        d += 1;
    }
    Ok(())
}

fn lucas(mut m: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while k > 0 || m > 0 {
        let (md, kd) = (m % p, k % p);
        if kd > md {
            return 0;
        }
        acc = acc * small_binom_mod_p(md, kd, p) % p;
        m /= p;
        k /= p;
    }
    acc
}

/// C(a, b) mod p for digits a, b < p, via the falling-factorial product with
/// Fermat inverses.
fn small_binom_mod_p(a: u64, b: u64, p: u64) -> u64 {
    debug_assert!(a < p && b <= a);
    let b = b.min(a - b);
    let mut acc = 1u64;
    for i in 0..b {
        acc = acc * ((a - i) % p) % p;
        acc = acc * inv_mod_p(i + 1, p) % p;
    }
    acc
}

fn inv_mod_p(a: u64, p: u64) -> u64 {
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

pub fn pow3(k: u32) -> u64 {
    3u64.pow(k)
}

/// The set of i in [1, 3^n) with C(3i, i-1) != 0 mod 3; in closed form these
/// are exactly the half repunits (3^k - 1)/2 for k = 1..n.
pub fn binom_3i_support(n: u32) -> BTreeSet<u64> {
    (1..=n).map(|k| (pow3(k) - 1) / 2).collect()
}

/// The set of i in [(3^n+1)/2, (5*3^n-3)/6] with
/// C(3i - (3^n-1)/2, i - (3^n+1)/2) != 0 mod 3; in closed form
/// (3^n+1)/2 + (3^j-1)/2 + (3^k-1)/2 over all 0 <= j <= k <= n-1.
pub fn shifted_binom_support(n: u32) -> BTreeSet<u64> {
    let base = (pow3(n) + 1) / 2;
    let mut out = BTreeSet::new();
    for j in 0..n {
        for k in j..n {
            out.insert(base + (pow3(j) - 1) / 2 + (pow3(k) - 1) / 2);
        }
    }
    out
}

/// Unsigned residue of C(3i - (3^n-1)/2, i - (3^n+1)/2) mod 3 at the support
/// point indexed by (j, k): 1 when j = k, 2 when j < k.
pub fn shifted_binom_residue(j: u32, k: u32, n: u32) -> Result<u64> {
    check_index_pair(j, k, n)?;
    Ok(if j == k { 1 } else { 2 })
}

/// The same residue with the alternating sign (-1)^(i - (3^n+1)/2) folded in:
/// 1 when j = k, and (-1)^(j+k+1) mod 3 when j < k. This is the coefficient
/// that enters the assembled branch inverse.
pub fn shifted_binom_signed_residue(j: u32, k: u32, n: u32) -> Result<u64> {
    check_index_pair(j, k, n)?;
    if j == k {
        return Ok(1);
    }
    // j < k: (-1)^(j+k+1), with -1 = 2 mod 3
    Ok(if (j + k) % 2 == 1 { 1 } else { 2 })
}

fn check_index_pair(j: u32, k: u32, n: u32) -> Result<()> {
    if j <= k && k < n {
        Ok(())
    } else {
        Err(Error::BadIndexPair { j, k, n })
    }
}
