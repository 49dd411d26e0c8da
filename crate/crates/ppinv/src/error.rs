use thiserror::Error;

/// Errors reported by the library.
///
/// Mathematical negatives that are *answers* rather than failures (a map that
/// is not a permutation, a criterion that does not hold) get their own
/// variants so the CLI can map them to a distinct exit status.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p = {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field size p^n = {0} exceeds the supported limit {1}")]
    FieldTooLarge(u128, u64),
    #[error("modulus must be monic of degree {expected}, got {got:?}")]
    BadModulusShape { expected: usize, got: Option<usize> },
    #[error("modulus is reducible over GF({p})")]
    ReducibleModulus { p: u64 },
    #[error("division by zero in the field")]
    DivisionByZero,
    #[error("element index {index} out of range for a field of {q} elements")]
    IndexOutOfRange { index: u64, q: u64 },
    #[error("coordinate vector has {got} entries but the field has degree {expected}")]
    BadCoordinateLength { expected: usize, got: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("value {value} does not fit in {len} base-{base} digits")]
    DigitOverflow { value: u64, base: u64, len: usize },
    #[error("need 0 <= j <= k < n, got j = {j}, k = {k}, n = {n}")]
    BadIndexPair { j: u32, k: u32, n: u32 },
    #[error("duplicate interpolation abscissa (element index {0})")]
    DuplicateAbscissa(u64),
    #[error("exponent out of range: {0}")]
    BadExponent(String),
    #[error("0 lies in neither cyclotomic class")]
    ZeroNotInCoset,
    #[error(
        "assembled map sends 0 to a nonzero value; shift the branch constants so f0(0) + f1(0) = 0"
    )]
    ZeroConventionViolated,
    #[error("a branch inverse must have zero constant term")]
    BranchInverseConstantTerm,
    #[error("branch polynomial does not biject C_{s} onto C_{t}")]
    NotABranchBijection { s: usize, t: usize },
    #[error("the branch-inverse coefficient formula requires q > 3")]
    FieldTooSmallForBranchInverse,
    #[error("branch images are not single cosets; no piecewise assembly applies")]
    NoCosetCase,
    #[error("not a permutation of the field")]
    NotAPermutation,
    #[error("criterion fails: {0}")]
    CriterionFailed(String),
    #[error("parameter {0} must be nonzero")]
    ZeroParameter(&'static str),
    #[error("this construction requires characteristic 3, got p = {0}")]
    CharacteristicNotThree(u64),
    #[error("this construction requires even extension degree, got n = {0}")]
    OddExtensionDegree(usize),
    #[error("Dickson index must be at least 1")]
    ZeroDicksonIndex,
    #[error("gcd({t}, {m}) != 1: no modular inverse")]
    NoModularInverse { t: u64, m: u64 },
    #[error("modulus {0} is too small for a Bezout pair with 1 <= s < m")]
    BezoutModulusTooSmall(u64),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("no closed-form inverse is known for this polynomial")]
    NoClosedForm,
}

pub type Result<T> = std::result::Result<T, Error>;
