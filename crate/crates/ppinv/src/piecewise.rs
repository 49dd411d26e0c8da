//! The piecewise engine over the square/non-square cosets.
//!
//! F_q^* splits into C_0 (the squares) and C_1 (the non-squares). A
//! [`BranchedPP`] is the map that sends 0 to 0, C_0 through one branch
//! polynomial and C_1 through the other; it equals the single polynomial
//! (1/2)f0(x)(1 + x^((q-1)/2)) + (1/2)f1(x)(1 - x^((q-1)/2)) on F_q^*. Such a
//! map permutes F_q exactly when both branches are injective and zero-free on
//! their own coset and the two images are disjoint ([`analyze`]). When each
//! branch lands inside a single coset, the full compositional inverse
//! assembles from the per-branch inverses with the same indicator trick
//! ([`assemble_inverse`]); the per-branch inverses come out of a coefficient
//! formula driven by coset power sums ([`branch_inverse`]).

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement};
use crate::polyring::Poly;

/// The partition F_q^* = C_0 (squares) + C_1 (non-squares), with a
/// membership table over the whole index range.
pub struct CyclotomicClasses {
    ctx: Arc<FieldCtx>,
    /// membership[idx] in {0, 1} for nonzero indices; entry 0 is unused.
    membership: Vec<u8>,
    members: [Vec<FieldElement>; 2],
}

/// Build the coset partition from the quadratic character.
pub fn classes(ctx: &Arc<FieldCtx>) -> CyclotomicClasses {
    let q = ctx.q() as usize;
    let mut membership = vec![0u8; q];
    let mut members = [
        Vec::with_capacity((q - 1) / 2),
        Vec::with_capacity((q - 1) / 2),
    ];
    for e in ctx.elements() {
        if e.is_zero() {
            continue;
        }
        let s = if ctx.quadratic_character(e) == 1 {
            0
        } else {
            1
        };
        membership[e.index() as usize] = s as u8;
        members[s].push(e);
    }
    CyclotomicClasses {
        ctx: Arc::clone(ctx),
        membership,
        members,
    }
}

impl CyclotomicClasses {
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    /// 0 for squares, 1 for non-squares; classifying 0 is an error.
    pub fn classify(&self, e: FieldElement) -> Result<usize> {
        if e.is_zero() {
            return Err(Error::ZeroNotInCoset);
        }
        Ok(usize::from(self.membership[e.index() as usize]))
    }

    /// Members of C_s in increasing index order.
    pub fn members(&self, s: usize) -> &[FieldElement] {
        &self.members[s]
    }
}

/// A piecewise map given by branch polynomials, with the value at 0 fixed
/// to 0 regardless of the branch constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchedPP {
    f0: Poly,
    f1: Poly,
}

impl BranchedPP {
    /// # Panics
    /// If the branches belong to different fields.
    pub fn new(f0: Poly, f1: Poly) -> BranchedPP {
        assert!(
            *f0.ctx() == *f1.ctx(),
            "branch polynomials belong to different fields"
        );
        BranchedPP { f0, f1 }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        self.f0.ctx()
    }

    pub fn f0(&self) -> &Poly {
        &self.f0
    }

    pub fn f1(&self) -> &Poly {
        &self.f1
    }

    pub fn branch(&self, s: usize) -> &Poly {
        match s {
            0 => &self.f0,
            1 => &self.f1,
            _ => panic!("branch index must be 0 or 1"),
        }
    }

    /// 0 -> 0, c in C_s -> f_s(c).
    pub fn eval(&self, cls: &CyclotomicClasses, c: FieldElement) -> FieldElement {
        if c.is_zero() {
            return FieldElement::ZERO;
        }
        match cls.classify(c).expect("nonzero") {
            0 => self.f0.eval(c),
            _ => self.f1.eval(c),
        }
    }

    /// Values at all q elements in canonical index order.
    pub fn value_table(&self, cls: &CyclotomicClasses) -> Vec<FieldElement> {
        self.ctx().elements().map(|c| self.eval(cls, c)).collect()
    }
}

/// Which coset a branch maps its own coset into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TargetClass {
    #[serde(rename = "c0")]
    Class0,
    #[serde(rename = "c1")]
    Class1,
    #[serde(rename = "mixed")]
    Mixed,
}

/// How the branch images sit relative to the cosets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    /// f0 maps C_0 into C_0 and f1 maps C_1 into C_1.
    #[serde(rename = "same")]
    SameCoset,
    /// f0 maps C_0 into C_1 and f1 maps C_1 into C_0.
    #[serde(rename = "swapped")]
    Swapped,
    #[serde(rename = "none")]
    Neither,
}

/// Exhaustive per-branch behavior of a [`BranchedPP`]. `is_pp` is the
/// permutation criterion: both branches injective and zero-free on their own
/// coset, images disjoint. Branch s is only ever evaluated on C_s.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchBehavior {
    pub injective: [bool; 2],
    pub zero_free: [bool; 2],
    pub target: [TargetClass; 2],
    pub images_disjoint: bool,
    pub case: CaseTag,
    pub is_pp: bool,
}

/// Evaluate both branches over their cosets and report the permutation
/// criterion along with the coset case.
pub fn analyze(bpp: &BranchedPP, cls: &CyclotomicClasses) -> BranchBehavior {
    let q = bpp.ctx().q() as usize;
    let mut injective = [true; 2];
    let mut zero_free = [true; 2];
    let mut target = [TargetClass::Mixed; 2];
    let mut masks = [vec![false; q], vec![false; q]];

    for s in 0..2 {
        let mut all0 = true;
        let mut all1 = true;
        for &c in cls.members(s) {
            let y = bpp.branch(s).eval(c);
            if y.is_zero() {
                zero_free[s] = false;
                all0 = false;
                all1 = false;
            } else {
                match cls.classify(y).expect("nonzero") {
                    0 => all1 = false,
                    _ => all0 = false,
                }
            }
            let i = y.index() as usize;
            if masks[s][i] {
                injective[s] = false;
            }
            masks[s][i] = true;
        }
        target[s] = match (all0, all1) {
            (true, false) => TargetClass::Class0,
            (false, true) => TargetClass::Class1,
            _ => TargetClass::Mixed,
        };
    }

    let images_disjoint = (0..q).all(|i| !(masks[0][i] && masks[1][i]));
    let case = match (target[0], target[1]) {
        (TargetClass::Class0, TargetClass::Class1) => CaseTag::SameCoset,
        (TargetClass::Class1, TargetClass::Class0) => CaseTag::Swapped,
        _ => CaseTag::Neither,
    };
    let is_pp = injective[0] && injective[1] && zero_free[0] && zero_free[1] && images_disjoint;
    BranchBehavior {
        injective,
        zero_free,
        target,
        images_disjoint,
        case,
        is_pp,
    }
}

/// The single canonical polynomial that agrees with the branched map on all
/// of F_q. The indicator formula forces the value (1/2)(f0(0) + f1(0)) at 0;
/// when that is nonzero it disagrees with the fixed value 0, which is
/// reported as an error instead of silently patched — callers may pre-shift
/// the branch constants.
pub fn branched_to_poly(bpp: &BranchedPP) -> Result<Poly> {
    let ctx = bpp.ctx();
    let at_zero = ctx.add(bpp.f0.eval(ctx.zero()), bpp.f1.eval(ctx.zero()));
    if !at_zero.is_zero() {
        return Err(Error::ZeroConventionViolated);
    }
    Ok(indicator_combination(&bpp.f0, &bpp.f1))
}

/// (1/2)a(x)(1 + x^M) + (1/2)b(x)(1 - x^M) with M = (q-1)/2, reduced.
fn indicator_combination(a: &Poly, b: &Poly) -> Poly {
    let ctx = a.ctx();
    let half = ctx.inv(ctx.from_subfield(2)).expect("q odd");
    let m = (ctx.q() - 1) / 2;
    let xm = Poly::monomial(ctx, FieldElement::ONE, m);
    let plus = Poly::one(ctx).add(&xm);
    let minus = Poly::one(ctx).sub(&xm);
    a.scale(half).mul(&plus).add(&b.scale(half).mul(&minus))
}

/// Sum of a^k over a in C_s, by direct summation. For 1 <= k <= q-1 the
/// closed form is -1/2 at k = q-1, (-1)^(s+1)/2 at k = (q-1)/2, and 0
/// elsewhere; the test suite holds that prediction against this sum.
pub fn coset_power_sum(cls: &CyclotomicClasses, s: usize, k: u64) -> Result<FieldElement> {
    let ctx = cls.ctx();
    if k == 0 || k > ctx.q() - 1 {
        return Err(Error::BadExponent(format!(
            "power-sum exponent must lie in [1, {}], got {k}",
            ctx.q() - 1
        )));
    }
    let mut acc = FieldElement::ZERO;
    for &a in cls.members(s) {
        acc = ctx.add(acc, ctx.pow(a, k));
    }
    Ok(acc)
}

/// Compositional inverse of a branch on its own coset, computed by the
/// pointwise coefficient formula.
///
/// Given f_s restricted to C_s bijecting onto C_t, the inverse restricted to
/// C_t is returned as the folded representative of degree <= (q-3)/2 with
/// zero constant term: g(x) = sum 2(-1)^t c_i x^(i-(q-1)/2) over
/// (q+1)/2 <= i <= q-2, where c_i = -sum_{a in C_s} a f_s(a)^(q-1-i). Any
/// other representative differs by a multiple of x^((q-1)/2) + (-1)^(t+1),
/// which vanishes on C_t. Costs O(q |C_s|) field multiplications.
///
/// With `verify` set, the bijection precondition is checked exhaustively
/// first. Requires q > 3.
pub fn branch_inverse(
    f_s: &Poly,
    s: usize,
    t: usize,
    cls: &CyclotomicClasses,
    verify: bool,
) -> Result<Poly> {
    let ctx = f_s.ctx();
    let q = ctx.q();
    if q <= 3 {
        return Err(Error::FieldTooSmallForBranchInverse);
    }
    if verify {
        check_branch_bijection(f_s, s, t, cls)?;
    }
    let m = (q - 1) / 2; // coset size and indicator exponent
    let half_deg = (q - 3) / 2;

    // c[w] accumulates c_{q-1-w} = -sum a f_s(a)^w for w = 1..=m; the last
    // slot w = m is the middle coefficient c_{(q-1)/2}, which must vanish.
    let mut c = vec![FieldElement::ZERO; m as usize + 1];
    for &a in cls.members(s) {
        let y = f_s.eval(a);
        let mut pw = FieldElement::ONE;
        for w in 1..=m {
            pw = ctx.mul(pw, y);
            c[w as usize] = ctx.sub(c[w as usize], ctx.mul(a, pw));
        }
    }
    debug_assert!(
        c[m as usize].is_zero(),
        "middle coefficient must vanish for q > 3"
    );

    // fold: coefficient of x^(i - (q-1)/2) is 2(-1)^t c_i, i = q-1-w
    let two = ctx.from_subfield(2);
    let sign = if t == 0 { two } else { ctx.neg(two) };
    let mut out = vec![FieldElement::ZERO; half_deg as usize + 1];
    for w in 1..=half_deg {
        let i = q - 1 - w; // (q+1)/2 <= i <= q-2
        let exp = (i - m) as usize; // 1..=(q-3)/2
        out[exp] = ctx.mul(sign, c[w as usize]);
    }
    Ok(Poly::from_coeffs(ctx, out))
}

/// The same branch inverse through the symbolic route: expand
/// f_s(x)^(q-1-i) mod x^q - x and combine the coefficients of x^((q-3)/2)
/// and x^(q-2) as (-1)^(s+t)(b_{i,(q-3)/2} + (-1)^s b_{i,q-2}). Cubic in q;
/// kept for cross-checking the pointwise route at small q.
pub fn branch_inverse_symbolic(f_s: &Poly, s: usize, t: usize) -> Result<Poly> {
    let ctx = f_s.ctx();
    let q = ctx.q();
    if q <= 3 {
        return Err(Error::FieldTooSmallForBranchInverse);
    }
    let m = (q - 1) / 2;
    let half_deg = (q - 3) / 2;
    let mut out = vec![FieldElement::ZERO; half_deg as usize + 1];

    // f^(q-1-i) for i walking down from q-2 is f^w for w walking up from 1
    let mut power = Poly::one(ctx);
    for w in 1..=half_deg {
        power = power.mul(f_s);
        let i = q - 1 - w;
        let b_u = power.coeff((q - 3) / 2);
        let b_v = power.coeff(q - 2);
        let mut coeff = if s == 0 { b_v } else { ctx.neg(b_v) };
        coeff = ctx.add(b_u, coeff);
        if (s + t) % 2 == 1 {
            coeff = ctx.neg(coeff);
        }
        out[(i - m) as usize] = coeff;
    }
    Ok(Poly::from_coeffs(ctx, out))
}

fn check_branch_bijection(f_s: &Poly, s: usize, t: usize, cls: &CyclotomicClasses) -> Result<()> {
    let q = f_s.ctx().q() as usize;
    let mut seen = vec![false; q];
    for &a in cls.members(s) {
        let y = f_s.eval(a);
        if y.is_zero() || cls.classify(y)? != t || seen[y.index() as usize] {
            return Err(Error::NotABranchBijection { s, t });
        }
        seen[y.index() as usize] = true;
    }
    Ok(())
}

/// Assemble the full compositional inverse of a certified piecewise
/// permutation from its branch inverses.
///
/// `g0`/`g1` must invert `f0`/`f1` on their cosets and have zero constant
/// term. For the same-coset case the inverse is
/// (1/2)g0(x)(1 + x^M) + (1/2)g1(x)(1 - x^M) with M = (q-1)/2; the swapped
/// case flips the indicators. Over GF(3) every piecewise permutation fixing
/// 0 is +-x and is returned directly.
pub fn assemble_inverse(
    bpp: &BranchedPP,
    g0: &Poly,
    g1: &Poly,
    behavior: &BranchBehavior,
    cls: &CyclotomicClasses,
) -> Result<Poly> {
    let ctx = bpp.ctx();
    if !behavior.is_pp {
        return Err(Error::NotAPermutation);
    }
    if ctx.q() == 3 {
        // f(1) determines which of +-x the map is, and +-x are involutions.
        let f1 = bpp.eval(cls, ctx.one());
        return Ok(Poly::monomial(ctx, f1, 1));
    }
    if !g0.coeff(0).is_zero() || !g1.coeff(0).is_zero() {
        return Err(Error::BranchInverseConstantTerm);
    }
    match behavior.case {
        CaseTag::SameCoset => Ok(indicator_combination(g0, g1)),
        CaseTag::Swapped => Ok(indicator_combination(g1, g0)),
        CaseTag::Neither => Err(Error::NoCosetCase),
    }
}
