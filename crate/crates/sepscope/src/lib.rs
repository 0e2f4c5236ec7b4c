//! IO companion to `sepscope-core`: JSON/CSV serialization, the state
//! builder mini-language, the noise-sweep engine and validation campaigns.
//! The binary in this crate fronts all of it; the library surface exists
//! for the test suites.

pub mod json;
pub mod state_spec;
pub mod sweep;
pub mod validate;

/// Rounds to 12 significant digits; all floating CLI output goes through
/// this (or [`fmt12`]) so runs are byte-identical and locale-independent.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let exp = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(11 - exp);
    (x * scale).round() / scale
}

/// Fixed scientific notation with 12 significant digits.
pub fn fmt12(x: f64) -> String {
    format!("{:.11e}", x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig12(0.123456789012345), 0.123456789012);
        assert_eq!(round_sig12(0.0), 0.0);
        assert_eq!(round_sig12(1.0), 1.0);
        assert_eq!(fmt12(0.25), "2.50000000000e-1");
        assert_eq!(fmt12(1.0), "1.00000000000e0");
    }
}
