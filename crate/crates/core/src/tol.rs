//! Process-wide numerical tolerances.
//!
//! The zero tolerance decides when a floating entry counts as zero for every
//! sign-based test in the crate. It defaults to `1e-9` and is normally set
//! once at program start (the CLI reads `HERD_EPS`).

use std::sync::atomic::{AtomicU64, Ordering};

pub const DEFAULT_ZERO_TOLERANCE: f64 = 1e-9;

/// Slack accepted when checking `M u >= 1`.
pub const CERTIFICATE_SLACK: f64 = 1e-8;

/// Relative tolerance for equality tests on real quantities (eigenvalues,
/// square sums) when the inputs are not integral.
pub const RELATIVE_EQ_TOLERANCE: f64 = 1e-9;

static ZERO_TOLERANCE_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

pub fn zero_tolerance() -> f64 {
    f64::from_bits(ZERO_TOLERANCE_BITS.load(Ordering::Relaxed))
}

/// Overrides the zero tolerance. Non-finite or negative values are ignored.
pub fn set_zero_tolerance(eps: f64) -> bool {
    if !eps.is_finite() || eps < 0.0 {
        return false;
    }
    ZERO_TOLERANCE_BITS.store(eps.to_bits(), Ordering::Relaxed);
    true
}

pub(crate) fn is_zero(x: f64) -> bool {
    x.abs() <= zero_tolerance()
}

/// Equality used for eigenvalue and square-sum comparisons: exact when both
/// values are integral, relative otherwise.
pub(crate) fn approx_eq(a: f64, b: f64) -> bool {
    if a.fract() == 0.0 && b.fract() == 0.0 {
        return a == b;
    }
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() <= RELATIVE_EQ_TOLERANCE * scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_bits_decode_to_1e_minus_9() {
        assert_eq!(f64::from_bits(0x3E11_2E0B_E826_D695), DEFAULT_ZERO_TOLERANCE);
        assert_eq!(zero_tolerance(), DEFAULT_ZERO_TOLERANCE);
    }

    #[test]
    fn approx_eq_is_exact_on_integers() {
        assert!(approx_eq(4.0, 4.0));
        assert!(!approx_eq(1e9, 1e9 + 1.0));
        assert!(approx_eq(0.1 + 0.2, 0.3));
    }
}
