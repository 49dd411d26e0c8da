//! Generalized cyclotomic piecewise permutations of GF(3^n) and their
//! closed-form inverses.
//!
//! Three families, all acting as 0 -> 0 plus one polynomial per coset:
//!
//! * [`Family::CubicCubic`]: alpha(x^3 + gamma x^2 + gamma^2 x) on the
//!   squares, beta(x^3 + theta x^2 + theta^2 x) on the non-squares.
//!   Permutation iff eta(gamma) = -1, eta(theta) = 1, eta(alpha) = eta(beta).
//! * [`Family::MonomialCubic`]: alpha x^t on the squares, the theta cubic on
//!   the non-squares. Permutation iff gcd(t, (q-1)/2) = 1, eta(theta) = 1,
//!   eta(alpha) = eta(beta).
//! * [`Family::CubicMonomial`]: the gamma cubic on the squares, beta x^t on
//!   the non-squares. Permutation iff gcd(t, (q-1)/2) = 1, eta(gamma) = -1,
//!   eta(alpha) = eta(beta)(-1)^(t+1).
//!
//! Here eta is the quadratic character. The inverse of a cubic branch
//! tau x(x - lambda)^2 on its coset is the double sum
//! sum_{j,k} lambda (tau^-1 lambda^-3 x)^((3^j+3^k)/2) ([`cubic_branch_inverse`]);
//! a monomial branch inverts as a monomial with the Bezout exponent
//! ([`bezout_inverse`]). [`closed_form_inverse`] assembles the full inverse
//! with the coset indicators, orienting them by the parity m defined through
//! eta(alpha) = (-1)^m.

use std::sync::Arc;

use serde::Serialize;

use crate::binom::pow3;
use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement};
use crate::piecewise::BranchedPP;
use crate::polyring::Poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    /// Cubic branch on both cosets (parameters alpha, beta, gamma, theta).
    #[serde(rename = "l5")]
    CubicCubic,
    /// Monomial on the squares, cubic on the non-squares (alpha, beta, theta, t).
    #[serde(rename = "l6")]
    MonomialCubic,
    /// Cubic on the squares, monomial on the non-squares (alpha, beta, gamma, t).
    #[serde(rename = "l7")]
    CubicMonomial,
}

/// Parameters of one family member over a characteristic-3 field. All Greek
/// parameters are nonzero; which ones are present is fixed by the family.
#[derive(Clone, Debug)]
pub struct FamilyParams {
    family: Family,
    ctx: Arc<FieldCtx>,
    alpha: FieldElement,
    beta: FieldElement,
    gamma: Option<FieldElement>,
    theta: Option<FieldElement>,
    t: Option<u64>,
}

fn require_char3(ctx: &FieldCtx) -> Result<()> {
    if ctx.p() != 3 {
        return Err(Error::CharacteristicNotThree(ctx.p()));
    }
    Ok(())
}

fn nonzero(e: FieldElement, name: &'static str) -> Result<FieldElement> {
    if e.is_zero() {
        Err(Error::ZeroParameter(name))
    } else {
        Ok(e)
    }
}

impl FamilyParams {
    pub fn cubic_cubic(
        ctx: &Arc<FieldCtx>,
        alpha: FieldElement,
        beta: FieldElement,
        gamma: FieldElement,
        theta: FieldElement,
    ) -> Result<FamilyParams> {
        require_char3(ctx)?;
        Ok(FamilyParams {
            family: Family::CubicCubic,
            ctx: Arc::clone(ctx),
            alpha: nonzero(alpha, "alpha")?,
            beta: nonzero(beta, "beta")?,
            gamma: Some(nonzero(gamma, "gamma")?),
            theta: Some(nonzero(theta, "theta")?),
            t: None,
        })
    }

    pub fn monomial_cubic(
        ctx: &Arc<FieldCtx>,
        alpha: FieldElement,
        beta: FieldElement,
        theta: FieldElement,
        t: u64,
    ) -> Result<FamilyParams> {
        require_char3(ctx)?;
        if t == 0 {
            return Err(Error::BadExponent("t must be positive".into()));
        }
        Ok(FamilyParams {
            family: Family::MonomialCubic,
            ctx: Arc::clone(ctx),
            alpha: nonzero(alpha, "alpha")?,
            beta: nonzero(beta, "beta")?,
            gamma: None,
            theta: Some(nonzero(theta, "theta")?),
            t: Some(t),
        })
    }

    pub fn cubic_monomial(
        ctx: &Arc<FieldCtx>,
        alpha: FieldElement,
        beta: FieldElement,
        gamma: FieldElement,
        t: u64,
    ) -> Result<FamilyParams> {
        require_char3(ctx)?;
        if t == 0 {
            return Err(Error::BadExponent("t must be positive".into()));
        }
        Ok(FamilyParams {
            family: Family::CubicMonomial,
            ctx: Arc::clone(ctx),
            alpha: nonzero(alpha, "alpha")?,
            beta: nonzero(beta, "beta")?,
            gamma: Some(nonzero(gamma, "gamma")?),
            theta: None,
            t: Some(t),
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }
}

/// Criterion verdict with the first failing clause when it does not hold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub reason: Option<String>,
}

impl Verdict {
    fn ok() -> Verdict {
        Verdict {
            holds: true,
            reason: None,
        }
    }

    fn fail(reason: &str) -> Verdict {
        Verdict {
            holds: false,
            reason: Some(reason.to_string()),
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Evaluate the family's permutation criterion; the reason names the first
/// failing clause in the family's stated order.
pub fn criterion(params: &FamilyParams) -> Verdict {
    let ctx = &params.ctx;
    let eta = |e| ctx.quadratic_character(e);
    let m = (ctx.q() - 1) / 2;
    match params.family {
        Family::CubicCubic => {
            if eta(params.gamma.unwrap()) != -1 {
                return Verdict::fail("η(γ) ≠ -1");
            }
            if eta(params.theta.unwrap()) != 1 {
                return Verdict::fail("η(θ) ≠ 1");
            }
            if eta(params.alpha) != eta(params.beta) {
                return Verdict::fail("η(α) ≠ η(β)");
            }
            Verdict::ok()
        }
        Family::MonomialCubic => {
            if gcd(params.t.unwrap(), m) != 1 {
                return Verdict::fail("gcd(t, (q-1)/2) ≠ 1");
            }
            if eta(params.theta.unwrap()) != 1 {
                return Verdict::fail("η(θ) ≠ 1");
            }
            if eta(params.alpha) != eta(params.beta) {
                return Verdict::fail("η(α) ≠ η(β)");
            }
            Verdict::ok()
        }
        Family::CubicMonomial => {
            if gcd(params.t.unwrap(), m) != 1 {
                return Verdict::fail("gcd(t, (q-1)/2) ≠ 1");
            }
            if eta(params.gamma.unwrap()) != -1 {
                return Verdict::fail("η(γ) ≠ -1");
            }
            let t_sign = if params.t.unwrap() % 2 == 0 { -1 } else { 1 };
            if eta(params.alpha) != eta(params.beta) * t_sign {
                return Verdict::fail("η(α) ≠ η(β)·(-1)^(t+1)");
            }
            Verdict::ok()
        }
    }
}

/// scale * (x^3 + lambda x^2 + lambda^2 x)
fn cubic_branch(ctx: &Arc<FieldCtx>, scale: FieldElement, lambda: FieldElement) -> Poly {
    let l2 = ctx.mul(lambda, lambda);
    Poly::from_coeffs(
        ctx,
        vec![
            FieldElement::ZERO,
            ctx.mul(scale, l2),
            ctx.mul(scale, lambda),
            scale,
        ],
    )
}

/// The family's piecewise map, built regardless of the criterion (so the
/// criterion can be tested against exhaustive permutation checking).
pub fn branched_pp(params: &FamilyParams) -> BranchedPP {
    let ctx = &params.ctx;
    let (f0, f1) = match params.family {
        Family::CubicCubic => (
            cubic_branch(ctx, params.alpha, params.gamma.unwrap()),
            cubic_branch(ctx, params.beta, params.theta.unwrap()),
        ),
        Family::MonomialCubic => (
            Poly::monomial(ctx, params.alpha, params.t.unwrap()),
            cubic_branch(ctx, params.beta, params.theta.unwrap()),
        ),
        Family::CubicMonomial => (
            cubic_branch(ctx, params.alpha, params.gamma.unwrap()),
            Poly::monomial(ctx, params.beta, params.t.unwrap()),
        ),
    };
    BranchedPP::new(f0, f1)
}

/// The family's piecewise map, gated on the criterion.
pub fn build_pp(params: &FamilyParams) -> Result<BranchedPP> {
    let v = criterion(params);
    if !v.holds {
        return Err(Error::CriterionFailed(v.reason.unwrap_or_default()));
    }
    Ok(branched_pp(params))
}

/// Extended-Euclid pair (s, r) with s*t + r*m = 1 and 1 <= s < m.
/// Requires gcd(t, m) = 1 and m > 1.
pub fn bezout_inverse(t: u64, m: u64) -> Result<(u64, i128)> {
    if m <= 1 {
        return Err(Error::BezoutModulusTooSmall(m));
    }
    if gcd(t, m) != 1 {
        return Err(Error::NoModularInverse { t, m });
    }
    // standard iterative extended Euclid on (t mod m, m), tracking only the
    // coefficient of t
    let (mut old_r, mut r) = ((t % m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    debug_assert_eq!(old_r, 1);
    let mut s_norm = old_s.rem_euclid(m as i128);
    if s_norm == 0 {
        s_norm = m as i128; // unreachable for m > 1 with gcd 1
    }
    // r from s*t + r*m = 1 with the original t
    let r_val = (1 - s_norm * t as i128) / m as i128;
    debug_assert_eq!(s_norm * t as i128 + r_val * m as i128, 1);
    Ok((s_norm as u64, r_val))
}

/// Closed-form inverse of the cubic branch
/// tau(x^3 + lambda x^2 + lambda^2 x) = tau x(x - lambda)^2 restricted to a
/// coset: sum_{0 <= j,k <= n-1} lambda (tau^-1 lambda^-3 x)^((3^j+3^k)/2),
/// reduced mod x^q - x. The exponents are integers since 3^j + 3^k is even.
pub fn cubic_branch_inverse(
    ctx: &Arc<FieldCtx>,
    tau: FieldElement,
    lambda: FieldElement,
) -> Result<Poly> {
    let tau = nonzero(tau, "tau")?;
    let lambda = nonzero(lambda, "lambda")?;
    let n = ctx.n() as u32;
    let lam3 = ctx.pow(lambda, 3);
    let factor = ctx.mul(ctx.inv(tau)?, ctx.inv(lam3)?);
    let mut acc = Poly::zero(ctx);
    for j in 0..n {
        for k in 0..n {
            let e = (pow3(j) + pow3(k)) / 2;
            let c = ctx.mul(lambda, ctx.pow(factor, e));
            acc = acc.add(&Poly::monomial(ctx, c, e));
        }
    }
    Ok(acc)
}

/// The closed-form compositional inverse of a family member whose criterion
/// holds:
///
///   f^-1(x) = -u(x)(1 + (-1)^m x^M) - v(x)(1 + (-1)^(m+1) x^M),
///
/// with M = (q-1)/2 and m in {0,1} read off eta(alpha) = (-1)^m. u inverts
/// the square-coset branch (the cubic double sum, or (alpha^-1 x)^s with
/// s = t^-1 mod M for the monomial branch); v inverts the non-square branch
/// (the theta double sum, or (-1)^r (beta^-1 x)^s from the Bezout pair).
/// For n = 1 the map itself is +-x and is returned directly.
pub fn closed_form_inverse(params: &FamilyParams) -> Result<Poly> {
    let v = criterion(params);
    if !v.holds {
        return Err(Error::CriterionFailed(v.reason.unwrap_or_default()));
    }
    let ctx = &params.ctx;
    if ctx.n() == 1 {
        // every family member over GF(3) is x or -x, each its own inverse
        let bpp = branched_pp(params);
        let at_one = bpp.f0().eval(ctx.one());
        return Ok(Poly::monomial(ctx, at_one, 1));
    }
    let m_cap = (ctx.q() - 1) / 2;

    let u = match params.family {
        Family::CubicCubic | Family::CubicMonomial => {
            cubic_branch_inverse(ctx, params.alpha, params.gamma.unwrap())?
        }
        Family::MonomialCubic => {
            let (s, _) = bezout_inverse(params.t.unwrap(), m_cap)?;
            Poly::monomial(ctx, ctx.pow(ctx.inv(params.alpha)?, s), s)
        }
    };
    let v_poly = match params.family {
        Family::CubicCubic | Family::MonomialCubic => {
            cubic_branch_inverse(ctx, params.beta, params.theta.unwrap())?
        }
        Family::CubicMonomial => {
            let (s, r) = bezout_inverse(params.t.unwrap(), m_cap)?;
            let mut c = ctx.pow(ctx.inv(params.beta)?, s);
            if r.rem_euclid(2) == 1 {
                c = ctx.neg(c);
            }
            Poly::monomial(ctx, c, s)
        }
    };

    let m_parity = if ctx.quadratic_character(params.alpha) == 1 {
        0
    } else {
        1
    };
    let xm = Poly::monomial(ctx, FieldElement::ONE, m_cap);
    let signed = |parity: usize| {
        if parity % 2 == 0 {
            Poly::one(ctx).add(&xm)
        } else {
            Poly::one(ctx).sub(&xm)
        }
    };
    let out = u
        .mul(&signed(m_parity))
        .add(&v_poly.mul(&signed(m_parity + 1)))
        .neg();
    Ok(out)
}
