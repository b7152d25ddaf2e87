//! Exact message-size bounds: storing one of `|S|` mutually orthogonal
//! states needs at least `ceil(log2 |S|)` qubits.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` accepted by [`audit_reversible_classical`].
pub const MAX_CLASSICAL_BITS: u32 = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditKind {
    SetSize,
    ReversibleClassical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalComparison {
    pub n: u32,
    /// `2^n`, the number of n-bit strings.
    pub strings: u64,
    /// Whether `log2 |S| >= 2^n`, decided exactly as `|S| >= 2^(2^n)`.
    pub inequality_holds: bool,
    /// `2^(2^n)` in decimal.
    pub threshold: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionAudit {
    pub kind: AuditKind,
    /// How the set size was specified, e.g. `24!` or `(2^3)!`.
    pub expression: String,
    /// Exact decimal value of `|S|`.
    pub set_size: String,
    pub qubits_required: u64,
    pub log2_floor: u64,
    pub log2_approx: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical: Option<ClassicalComparison>,
}

/// `ceil(log2 n)` from the bit length of `n - 1`; zero for `n = 1`.
pub fn ceil_log2(n: &BigUint) -> u64 {
    assert!(!n.is_zero(), "log of zero");
    if n.is_one() {
        0
    } else {
        (n - 1u32).bits()
    }
}

pub fn floor_log2(n: &BigUint) -> u64 {
    assert!(!n.is_zero(), "log of zero");
    n.bits() - 1
}

/// `log2 n` to double precision from the leading 64 bits.
pub fn log2_approx(n: &BigUint) -> f64 {
    let bits = n.bits();
    let shift = bits.saturating_sub(64);
    let top = (n >> shift).to_f64().expect("fits in 64 bits");
    top.log2() + shift as f64
}

pub fn factorial(k: u64) -> BigUint {
    (2..=k).fold(BigUint::one(), |acc, i| acc * i)
}

pub fn audit_dimension(set_size: &BigUint) -> Result<DimensionAudit> {
    audit_expression(set_size, set_size.to_string())
}

fn audit_expression(set_size: &BigUint, expression: String) -> Result<DimensionAudit> {
    if set_size.is_zero() {
        return Err(Error::BadParameters("set size must be at least 1".into()));
    }
    Ok(DimensionAudit {
        kind: AuditKind::SetSize,
        expression,
        set_size: set_size.to_string(),
        qubits_required: ceil_log2(set_size),
        log2_floor: floor_log2(set_size),
        log2_approx: log2_approx(set_size),
        classical: None,
    })
}

/// `|S| = (2^n)!` permutations of n-bit strings, compared exactly against
/// `2^n`. The comparison fails at `n = 1` (`log2 2! = 1 < 2`).
pub fn audit_reversible_classical(n: u32) -> Result<DimensionAudit> {
    if n == 0 || n > MAX_CLASSICAL_BITS {
        return Err(Error::BadParameters(format!("n must lie in 1..={MAX_CLASSICAL_BITS}, got {n}")));
    }
    let strings = 1u64 << n;
    let size = factorial(strings);
    let threshold = BigUint::one() << strings;
    let mut audit = audit_expression(&size, format!("(2^{n})!"))?;
    audit.kind = AuditKind::ReversibleClassical;
    audit.classical = Some(ClassicalComparison {
        n,
        strings,
        inequality_holds: size >= threshold,
        threshold: threshold.to_string(),
    });
    Ok(audit)
}

/// Parse `123`, `24!`, `2^10` or `(2^3)!`.
pub fn parse_set_size(text: &str) -> Result<BigUint> {
    let t = text.trim();
    let bad = || Error::BadParameters(format!("cannot parse set size `{text}`"));
    if let Some(inner) = t.strip_suffix('!') {
        let inner = inner.trim();
        let inner = inner.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(inner);
        let k = parse_set_size(inner)?.to_u64().filter(|&k| k <= 100_000).ok_or_else(bad)?;
        return Ok(factorial(k));
    }
    if let Some((base, exp)) = t.split_once('^') {
        let base: BigUint = base.trim().parse().map_err(|_| bad())?;
        let exp: u32 = exp.trim().parse().map_err(|_| bad())?;
        return Ok(base.pow(exp));
    }
    t.parse().map_err(|_| bad())
}
