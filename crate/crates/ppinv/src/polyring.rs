//! Dense univariate polynomials over a [`FieldCtx`], with canonical reduction
//! modulo x^q - x, evaluation, composition, and Lagrange interpolation.
//!
//! A canonical polynomial has degree <= q - 1. Constructors only trim
//! trailing zeros, so objects like x^q can be written down and fed to
//! [`Poly::reduce_qx`]; every arithmetic operation returns a canonical
//! (reduced) result. The zero polynomial has an empty coefficient vector and
//! `degree() == None`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement};

#[derive(Clone)]
pub struct Poly {
    ctx: Arc<FieldCtx>,
    /// coeffs[k] is the coefficient of x^k; trailing zeros trimmed.
    coeffs: Vec<FieldElement>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        *self.ctx == *other.ctx && self.coeffs == other.coeffs
    }
}

impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for k in (0..self.coeffs.len()).rev() {
            let c = self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (k, c == FieldElement::ONE) {
                (0, _) => write!(f, "{}", c.index())?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{}*x", c.index())?,
                (_, true) => write!(f, "x^{k}")?,
                (_, false) => write!(f, "{}*x^{k}", c.index())?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn zero(ctx: &Arc<FieldCtx>) -> Poly {
        Poly {
            ctx: Arc::clone(ctx),
            coeffs: Vec::new(),
        }
    }

    pub fn one(ctx: &Arc<FieldCtx>) -> Poly {
        Poly::constant(ctx, FieldElement::ONE)
    }

    /// The identity polynomial x.
    pub fn x(ctx: &Arc<FieldCtx>) -> Poly {
        Poly::from_coeffs(ctx, vec![FieldElement::ZERO, FieldElement::ONE])
    }

    pub fn constant(ctx: &Arc<FieldCtx>, c: FieldElement) -> Poly {
        Poly::from_coeffs(ctx, vec![c])
    }

    /// c * x^exp with the exponent folded mod x^q - x, so arbitrarily large
    /// exponents never allocate.
    pub fn monomial(ctx: &Arc<FieldCtx>, c: FieldElement, exp: u64) -> Poly {
        if c.is_zero() {
            return Poly::zero(ctx);
        }
        let e = fold_exponent(exp, ctx.q()) as usize;
        let mut coeffs = vec![FieldElement::ZERO; e + 1];
        coeffs[e] = c;
        Poly::from_coeffs(ctx, coeffs)
    }

    /// Wrap a coefficient vector (constant term first). Trailing zeros are
    /// trimmed; the result is *not* reduced mod x^q - x.
    pub fn from_coeffs(ctx: &Arc<FieldCtx>, mut coeffs: Vec<FieldElement>) -> Poly {
        while coeffs.last() == Some(&FieldElement::ZERO) {
            coeffs.pop();
        }
        Poly {
            ctx: Arc::clone(ctx),
            coeffs,
        }
    }

    /// Coefficients given as element indices, constant term first.
    pub fn from_indices(ctx: &Arc<FieldCtx>, indices: &[u64]) -> Result<Poly> {
        let coeffs = indices
            .iter()
            .map(|&i| ctx.element(i))
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::from_coeffs(ctx, coeffs))
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Coefficient indices, constant term first (the JSON encoding).
    pub fn coeff_indices(&self) -> Vec<u64> {
        self.coeffs.iter().map(|c| c.index()).collect()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of x^k; zero beyond the degree.
    pub fn coeff(&self, k: u64) -> FieldElement {
        usize::try_from(k)
            .ok()
            .and_then(|k| self.coeffs.get(k).copied())
            .unwrap_or(FieldElement::ZERO)
    }

    fn check_ctx(&self, other: &Poly) {
        assert!(
            *self.ctx == *other.ctx,
            "polynomials belong to different fields"
        );
    }

    /// Horner evaluation.
    pub fn eval(&self, x: FieldElement) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = self.ctx.add(self.ctx.mul(acc, x), c);
        }
        acc
    }

    /// Values at all q field elements, in canonical index order.
    pub fn value_table(&self) -> Vec<FieldElement> {
        self.ctx.elements().map(|c| self.eval(c)).collect()
    }

    /// Canonical representative mod x^q - x: every monomial x^e with e >= 1
    /// folds to x^(((e-1) mod (q-1)) + 1); x^0 is untouched. The result has
    /// degree <= q - 1 and agrees with the input pointwise on the field.
    pub fn reduce_qx(&self) -> Poly {
        let q = self.ctx.q() as usize;
        if self.coeffs.len() <= q {
            return self.clone();
        }
        let mut out = vec![FieldElement::ZERO; q];
        out[0] = self.coeffs[0];
        for (e, &c) in self.coeffs.iter().enumerate().skip(1) {
            if !c.is_zero() {
                let folded = fold_exponent(e as u64, self.ctx.q()) as usize;
                out[folded] = self.ctx.add(out[folded], c);
            }
        }
        Poly::from_coeffs(&self.ctx, out)
    }

    /// True iff the canonical forms coincide, i.e. the two polynomials agree
    /// as functions on the field. Polynomials over different fields compare
    /// unequal.
    pub fn equal_mod_qx(&self, other: &Poly) -> bool {
        *self.ctx == *other.ctx && self.reduce_qx().coeffs == other.reduce_qx().coeffs
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.check_ctx(other);
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(len);
        for k in 0..len {
            out.push(self.ctx.add(self.coeff(k as u64), other.coeff(k as u64)));
        }
        Poly::from_coeffs(&self.ctx, out).reduce_qx()
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        let out = self.coeffs.iter().map(|&c| self.ctx.neg(c)).collect();
        Poly::from_coeffs(&self.ctx, out)
    }

    pub fn scale(&self, c: FieldElement) -> Poly {
        let out = self.coeffs.iter().map(|&a| self.ctx.mul(a, c)).collect();
        Poly::from_coeffs(&self.ctx, out)
    }

    /// Schoolbook product, reduced mod x^q - x.
    pub fn mul(&self, other: &Poly) -> Poly {
        self.check_ctx(other);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.ctx);
        }
        let mut out = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = self.ctx.add(out[i + j], self.ctx.mul(a, b));
                }
            }
        }
        Poly::from_coeffs(&self.ctx, out).reduce_qx()
    }

    /// f(g(x)) reduced mod x^q - x; agrees pointwise with c -> f(g(c)).
    pub fn compose(&self, inner: &Poly) -> Poly {
        self.check_ctx(inner);
        let mut acc = Poly::zero(&self.ctx);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Poly::constant(&self.ctx, c));
        }
        acc
    }

    /// f^k reduced mod x^q - x, by square-and-multiply with reduction at
    /// every step; f^0 = 1.
    pub fn powmod(&self, k: u64) -> Poly {
        let mut acc = Poly::one(&self.ctx);
        let mut base = self.reduce_qx();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }
}

/// e >= 1 maps to ((e - 1) mod (q - 1)) + 1, the defining relation x^q = x.
fn fold_exponent(e: u64, q: u64) -> u64 {
    if e == 0 {
        0
    } else {
        (e - 1) % (q - 1) + 1
    }
}

/// The unique polynomial of degree < #points through all the pairs,
/// canonical mod x^q - x. When the abscissae cover the whole field the
/// direct formula sum_a y_a (1 - (x - a)^(q-1)) is used (expanded per
/// coefficient); otherwise the Newton form.
pub fn lagrange_interpolate(
    ctx: &Arc<FieldCtx>,
    points: &[(FieldElement, FieldElement)],
) -> Result<Poly> {
    let q = ctx.q() as usize;
    let mut seen = vec![false; q];
    for &(x, _) in points {
        let i = x.index() as usize;
        if seen[i] {
            return Err(Error::DuplicateAbscissa(x.index()));
        }
        seen[i] = true;
    }
    if points.len() == q {
        return Ok(interpolate_full_domain(ctx, points));
    }
    Ok(interpolate_newton(ctx, points))
}

/// Full-domain route. Expanding (x - a)^(q-1) with binomial coefficients
/// C(q-1, k) = (-1)^k mod p collapses the direct formula to
///   coeff[0] = y(0),
///   coeff[k] = -sum_{a != 0} y_a a^(q-1-k)  for 1 <= k <= q-2,
///   coeff[q-1] = -sum_a y_a,
/// which costs O(q^2) field multiplications with running powers.
fn interpolate_full_domain(ctx: &Arc<FieldCtx>, points: &[(FieldElement, FieldElement)]) -> Poly {
    let q = ctx.q() as usize;
    let mut out = vec![FieldElement::ZERO; q];
    let mut total = FieldElement::ZERO;
    for &(a, y) in points {
        total = ctx.add(total, y);
        if a.is_zero() {
            out[0] = y;
            continue;
        }
        if y.is_zero() {
            continue;
        }
        // running power a^(q-1-k) as k walks down from q-2 to 1
        let mut pw = a;
        for k in (1..=q - 2).rev() {
            out[k] = ctx.sub(out[k], ctx.mul(y, pw));
            pw = ctx.mul(pw, a);
        }
    }
    out[q - 1] = ctx.neg(total);
    Poly::from_coeffs(ctx, out)
}

fn interpolate_newton(ctx: &Arc<FieldCtx>, points: &[(FieldElement, FieldElement)]) -> Poly {
    if points.is_empty() {
        return Poly::zero(ctx);
    }
    // divided differences
    let xs: Vec<FieldElement> = points.iter().map(|&(x, _)| x).collect();
    let mut dd: Vec<FieldElement> = points.iter().map(|&(_, y)| y).collect();
    let k = points.len();
    for level in 1..k {
        for i in (level..k).rev() {
            let num = ctx.sub(dd[i], dd[i - 1]);
            let den = ctx.sub(xs[i], xs[i - level]);
            let inv = ctx.inv(den).expect("abscissae are distinct");
            dd[i] = ctx.mul(num, inv);
        }
    }
    // assemble sum dd[j] * prod_{i<j} (x - x_i)
    let mut acc = Poly::zero(ctx);
    let mut basis = Poly::one(ctx);
    for (j, &c) in dd.iter().enumerate() {
        acc = acc.add(&basis.scale(c));
        if j + 1 < k {
            let lin = Poly::from_coeffs(ctx, vec![ctx.neg(xs[j]), FieldElement::ONE]);
            basis = basis.mul(&lin);
        }
    }
    acc
}

/// True iff f induces a bijection of the field.
pub fn is_permutation(f: &Poly) -> bool {
    let q = f.ctx().q() as usize;
    let mut seen = vec![false; q];
    for c in f.ctx().elements() {
        let i = f.eval(c).index() as usize;
        if seen[i] {
            return false;
        }
        seen[i] = true;
    }
    true
}

/// Brute-force compositional inverse: tabulate f, invert the table, and
/// Lagrange-interpolate the flipped pairs. This is the oracle route the
/// closed forms are checked against.
pub fn invert_permutation(f: &Poly) -> Result<Poly> {
    let ctx = f.ctx();
    let q = ctx.q() as usize;
    let mut seen = vec![false; q];
    let mut pairs = Vec::with_capacity(q);
    for c in ctx.elements() {
        let y = f.eval(c);
        let i = y.index() as usize;
        if seen[i] {
            return Err(Error::NotAPermutation);
        }
        seen[i] = true;
        pairs.push((y, c));
    }
    lagrange_interpolate(ctx, &pairs)
}
