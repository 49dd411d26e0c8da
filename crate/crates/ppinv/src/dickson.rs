//! Dickson and reversed Dickson polynomials, the cubic-branch permutation of
//! GF(3^n) for even n that they specialize to, and its closed-form inverse.
//!
//! The permutation in question is f(x) = (x - x^2 - x^3)x^((q-1)/2) - x + x^2
//! with q = 3^n, n even (Hou's polynomial); on the cosets it acts as -x^3 on
//! the squares and x(x+1)^2 on the non-squares. Its inverse has the closed
//! form assembled in [`hou_pp_inverse`], and composing with the affine shifts
//! x -> 1 - x on both sides turns f into the reversed Dickson map of index
//! 3^n + 5 and parameter 1, inverted by [`reversed_dickson_inverse`].

use std::sync::Arc;

use crate::binom::{binom_mod_p, pow3};
use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement};
use crate::polyring::Poly;

/// Which Dickson polynomial to build: D_index(x, a) in the indeterminate x
/// with parameter a, or the reversed D_index(a, x) with the roles swapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DicksonSpec {
    pub index: u64,
    pub param: FieldElement,
    pub reversed: bool,
}

/// The term (m/(m-i)) C(m-i, i) is an integer; computing it as
/// C(m-i, i) + C(m-i-1, i-1) keeps everything in Lucas digits and never
/// divides by a multiple of p.
fn dickson_term_mod_p(m: u64, i: u64, p: u64) -> u64 {
    let first = binom_mod_p(m - i, i, p).expect("p prime");
    if i == 0 {
        return first;
    }
    let second = binom_mod_p(m - i - 1, i - 1, p).expect("p prime");
    (first + second) % p
}

/// The Dickson polynomial of the given index over `ctx`, reduced mod
/// x^q - x. Index 0 is rejected.
///
/// Plain: D_m(x, a) = sum_{i <= m/2} (m/(m-i)) C(m-i, i) (-a)^i x^(m-2i).
/// Reversed: D_m(a, x) = sum_{i <= m/2} (m/(m-i)) C(m-i, i) (-1)^i a^(m-2i) x^i.
pub fn dickson_polynomial(ctx: &Arc<FieldCtx>, spec: &DicksonSpec) -> Result<Poly> {
    if spec.index == 0 {
        return Err(Error::ZeroDicksonIndex);
    }
    let m = spec.index;
    let a = spec.param;
    let mut acc = Poly::zero(ctx);
    for i in 0..=m / 2 {
        let t = ctx.from_subfield(dickson_term_mod_p(m, i, ctx.p()));
        if t.is_zero() {
            continue;
        }
        let term = if spec.reversed {
            // (-1)^i a^(m-2i) x^i
            let mut c = ctx.mul(t, ctx.pow(a, m - 2 * i));
            if i % 2 == 1 {
                c = ctx.neg(c);
            }
            Poly::monomial(ctx, c, i)
        } else {
            // (-a)^i x^(m-2i)
            let c = ctx.mul(t, ctx.pow(ctx.neg(a), i));
            Poly::monomial(ctx, c, m - 2 * i)
        };
        acc = acc.add(&term);
    }
    Ok(acc)
}

fn require_char3_even(ctx: &FieldCtx) -> Result<()> {
    if ctx.p() != 3 {
        return Err(Error::CharacteristicNotThree(ctx.p()));
    }
    if ctx.n() % 2 != 0 {
        return Err(Error::OddExtensionDegree(ctx.n()));
    }
    Ok(())
}

/// (x - x^2 - x^3) x^((q-1)/2) - x + x^2 over GF(3^n), n even: a permutation
/// polynomial of the whole field.
pub fn hou_pp(ctx: &Arc<FieldCtx>) -> Result<Poly> {
    require_char3_even(ctx)?;
    let one = FieldElement::ONE;
    let two = ctx.from_subfield(2);
    // x - x^2 - x^3
    let inner = Poly::from_coeffs(ctx, vec![FieldElement::ZERO, one, two, two]);
    let shifted = inner.mul(&Poly::monomial(ctx, one, (ctx.q() - 1) / 2));
    // - x + x^2
    let tail = Poly::from_coeffs(ctx, vec![FieldElement::ZERO, two, one]);
    Ok(shifted.add(&tail))
}

/// The coset view of [`hou_pp`]: -x^3 on the squares, x(x+1)^2 on the
/// non-squares (and 0 at 0).
pub fn hou_branches(ctx: &Arc<FieldCtx>) -> Result<(Poly, Poly)> {
    require_char3_even(ctx)?;
    let one = FieldElement::ONE;
    let two = ctx.from_subfield(2);
    let f0 = Poly::monomial(ctx, two, 3);
    let f1 = Poly::from_coeffs(ctx, vec![FieldElement::ZERO, one, two, one]);
    Ok((f0, f1))
}

/// The closed-form compositional inverse of [`hou_pp`]:
///
///   g(x) = x^(3^(n-1)) (x^((q-1)/2) + 1) + S(x) (x^((q-1)/2) - 1),
///   S(x) = sum over 0 <= j,k <= n-1 of (-1)^(j+k) x^((3^j + 3^k)/2),
///
/// assembled symbolically and reduced mod x^q - x.
pub fn hou_pp_inverse(ctx: &Arc<FieldCtx>) -> Result<Poly> {
    require_char3_even(ctx)?;
    let n = ctx.n() as u32;
    let one = FieldElement::ONE;
    let m = (ctx.q() - 1) / 2;

    let head = Poly::monomial(ctx, one, pow3(n - 1))
        .mul(&Poly::monomial(ctx, one, m).add(&Poly::one(ctx)));
    let tail = double_power_sum(ctx)?.mul(&Poly::monomial(ctx, one, m).sub(&Poly::one(ctx)));
    Ok(head.add(&tail))
}

/// S(x) = sum_{0 <= j,k <= n-1} (-1)^(j+k) x^((3^j + 3^k)/2).
fn double_power_sum(ctx: &Arc<FieldCtx>) -> Result<Poly> {
    let n = ctx.n() as u32;
    let one = FieldElement::ONE;
    let neg_one = ctx.neg(one);
    let mut acc = Poly::zero(ctx);
    for j in 0..n {
        for k in 0..n {
            let e = (pow3(j) + pow3(k)) / 2;
            let c = if (j + k) % 2 == 0 { one } else { neg_one };
            acc = acc.add(&Poly::monomial(ctx, c, e));
        }
    }
    Ok(acc)
}

/// The nonzero-coefficient exponents of the inverse's double sum, shifted by
/// -(q-1)/2 they match the predicted binomial support window.
pub fn double_power_sum_exponents(ctx: &Arc<FieldCtx>) -> Result<Vec<u64>> {
    let s = double_power_sum(ctx)?;
    Ok((0..=ctx.q()).filter(|&e| !s.coeff(e).is_zero()).collect())
}

/// The reversed Dickson index this module inverts: 3^n + 5.
pub fn reversed_dickson_index(ctx: &FieldCtx) -> u64 {
    pow3(ctx.n() as u32) + 5
}

/// Inverse of the reversed Dickson map c -> D_{3^n+5}(1, c) on GF(3^n) for
/// even n, via 1 - g(x + 1) where g inverts [`hou_pp`]; the underlying
/// identity is D_{3^n+5}(1, x) = f(1 - x) - 1.
pub fn reversed_dickson_inverse(ctx: &Arc<FieldCtx>) -> Result<Poly> {
    let g = hou_pp_inverse(ctx)?;
    let one = FieldElement::ONE;
    let x_plus_1 = Poly::from_coeffs(ctx, vec![one, one]);
    Ok(Poly::one(ctx).sub(&g.compose(&x_plus_1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field;
    use crate::piecewise::{analyze, branch_inverse, classes, BranchedPP};
    use crate::polyring::{invert_permutation, is_permutation, lagrange_interpolate};

    #[test]
    fn small_reversed_dickson_expansions() {
        let ctx = field(3, 2).unwrap();
        let a = ctx.element(5).unwrap();
        // D_1(a, x) = a
        let d1 = dickson_polynomial(
            &ctx,
            &DicksonSpec {
                index: 1,
                param: a,
                reversed: true,
            },
        )
        .unwrap();
        assert_eq!(d1, Poly::constant(&ctx, a));
        // D_2(a, x) = a^2 - 2x
        let d2 = dickson_polynomial(
            &ctx,
            &DicksonSpec {
                index: 2,
                param: a,
                reversed: true,
            },
        )
        .unwrap();
        let want = Poly::from_coeffs(&ctx, vec![ctx.mul(a, a), ctx.neg(ctx.from_subfield(2))]);
        assert_eq!(d2, want);
        // reversed at x = 0 is a^index
        for index in 1..10u64 {
            let d = dickson_polynomial(
                &ctx,
                &DicksonSpec {
                    index,
                    param: a,
                    reversed: true,
                },
            )
            .unwrap();
            assert_eq!(d.eval(ctx.zero()), ctx.pow(a, index));
        }
    }

    #[test]
    fn small_plain_dickson_expansion() {
        let ctx = field(3, 2).unwrap();
        let a = ctx.element(4).unwrap();
        // D_2(x, a) = x^2 - 2a
        let d2 = dickson_polynomial(
            &ctx,
            &DicksonSpec {
                index: 2,
                param: a,
                reversed: false,
            },
        )
        .unwrap();
        let want = Poly::from_coeffs(
            &ctx,
            vec![
                ctx.neg(ctx.mul(ctx.from_subfield(2), a)),
                FieldElement::ZERO,
                FieldElement::ONE,
            ],
        );
        assert_eq!(d2, want);
        assert_eq!(
            dickson_polynomial(
                &ctx,
                &DicksonSpec {
                    index: 0,
                    param: a,
                    reversed: false
                }
            )
            .unwrap_err(),
            Error::ZeroDicksonIndex
        );
    }

    #[test]
    fn dickson_term_identity_is_exact_over_the_integers() {
        // (m/(m-i)) C(m-i, i) = C(m-i, i) + C(m-i-1, i-1) as integers
        fn binom_u128(a: u64, b: u64) -> u128 {
            if b > a {
                return 0;
            }
            let mut acc: u128 = 1;
            for i in 0..b.min(a - b) {
                acc = acc * u128::from(a - i) / u128::from(i + 1);
            }
            acc
        }
        for m in 1..=50u64 {
            for i in 0..=m / 2 {
                let sum = if i == 0 {
                    binom_u128(m, 0)
                } else {
                    binom_u128(m - i, i) + binom_u128(m - i - 1, i - 1)
                };
                let product = u128::from(m) * binom_u128(m - i, i);
                assert_eq!(product % u128::from(m - i), 0, "m={m}, i={i}");
                assert_eq!(sum, product / u128::from(m - i), "m={m}, i={i}");
            }
        }
    }

    #[test]
    fn hou_pp_is_a_permutation_and_matches_its_branches() {
        for n in [2usize, 4] {
            let ctx = field(3, n).unwrap();
            let cls = classes(&ctx);
            let f = hou_pp(&ctx).unwrap();
            assert!(is_permutation(&f));
            let (f0, f1) = hou_branches(&ctx).unwrap();
            let bpp = BranchedPP::new(f0, f1);
            for c in ctx.elements() {
                assert_eq!(f.eval(c), bpp.eval(&cls, c));
            }
            let behavior = analyze(&bpp, &cls);
            assert!(behavior.is_pp);
        }
    }

    #[test]
    fn hou_pp_rejects_bad_fields() {
        let f27 = field(3, 3).unwrap();
        assert_eq!(hou_pp(&f27).unwrap_err(), Error::OddExtensionDegree(3));
        let f25 = field(5, 2).unwrap();
        assert_eq!(hou_pp(&f25).unwrap_err(), Error::CharacteristicNotThree(5));
    }

    #[test]
    fn closed_form_inverse_equals_brute_force() {
        for n in [2usize, 4] {
            let ctx = field(3, n).unwrap();
            let f = hou_pp(&ctx).unwrap();
            let g = hou_pp_inverse(&ctx).unwrap();
            assert_eq!(g, invert_permutation(&f).unwrap());
            for c in ctx.elements() {
                assert_eq!(g.eval(f.eval(c)), c);
            }
        }
    }

    #[test]
    fn closed_form_inverse_gf9_frozen_coefficients() {
        // hand-expanded: x^3(x^4 + 1) + (x + x^2 + x^3)(x^4 - 1)
        //              = 2x^7 + x^6 + x^5 + 2x^2 + 2x
        let ctx = field(3, 2).unwrap();
        let g = hou_pp_inverse(&ctx).unwrap();
        assert_eq!(g.coeff_indices(), vec![0, 2, 2, 0, 0, 1, 1, 2]);
    }

    #[test]
    fn closed_form_equals_piecewise_machinery() {
        for n in [2usize, 4] {
            let ctx = field(3, n).unwrap();
            let cls = classes(&ctx);
            let (f0, f1) = hou_branches(&ctx).unwrap();
            let bpp = BranchedPP::new(f0.clone(), f1.clone());
            let behavior = analyze(&bpp, &cls);
            // the square branch inverts as -x^(3^(n-1))
            let g0 = Poly::monomial(&ctx, ctx.neg(FieldElement::ONE), pow3(ctx.n() as u32 - 1));
            let g1 = branch_inverse(&f1, 1, 1, &cls, true).unwrap();
            let assembled =
                crate::piecewise::assemble_inverse(&bpp, &g0, &g1, &behavior, &cls).unwrap();
            assert_eq!(assembled, hou_pp_inverse(&ctx).unwrap());
        }
    }

    #[test]
    fn double_sum_exponents_match_predicted_support() {
        for n in [2usize, 4] {
            let ctx = field(3, n).unwrap();
            let exps = double_power_sum_exponents(&ctx).unwrap();
            let shift = (ctx.q() - 1) / 2;
            let shifted: std::collections::BTreeSet<u64> = exps.iter().map(|e| e + shift).collect();
            let predicted = crate::binom::shifted_binom_support(n as u32);
            assert_eq!(shifted, predicted);
        }
    }

    #[test]
    fn reversed_dickson_identity_and_inverse() {
        for n in [2usize, 4] {
            let ctx = field(3, n).unwrap();
            let index = reversed_dickson_index(&ctx);
            let d = dickson_polynomial(
                &ctx,
                &DicksonSpec {
                    index,
                    param: ctx.one(),
                    reversed: true,
                },
            )
            .unwrap();
            // D_{3^n+5}(1, x) = f(1 - x) - 1 pointwise
            let f = hou_pp(&ctx).unwrap();
            for c in ctx.elements() {
                let want = ctx.sub(f.eval(ctx.sub(ctx.one(), c)), ctx.one());
                assert_eq!(d.eval(c), want);
            }
            // two-sided functional inverse
            let dinv = reversed_dickson_inverse(&ctx).unwrap();
            for c in ctx.elements() {
                assert_eq!(dinv.eval(d.eval(c)), c);
                assert_eq!(d.eval(dinv.eval(c)), c);
            }
        }
    }

    #[test]
    fn closed_form_inverse_equals_interpolated_table() {
        // same statement as brute force, but exercising the interpolation
        // path explicitly on the flipped table
        let ctx = field(3, 2).unwrap();
        let f = hou_pp(&ctx).unwrap();
        let pairs: Vec<_> = ctx.elements().map(|c| (f.eval(c), c)).collect();
        let g = lagrange_interpolate(&ctx, &pairs).unwrap();
        assert_eq!(g, hou_pp_inverse(&ctx).unwrap());
    }
}
