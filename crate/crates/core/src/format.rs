//! Fixed-precision rendering of decimal fractions.

/// Renders `value` with `places` decimals; a rounded negative zero prints
/// without its sign, as in the sample reports.
pub fn fixed(value: f64, places: usize) -> String {
    let s = format!("{value:.places$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

/// Rounds to `places` decimals through the decimal rendering, so the result
/// is the double nearest to the printed value.
pub fn round_to(value: f64, places: usize) -> f64 {
    fixed(value, places).parse().unwrap_or(value)
}

/// Absolute slack granted on top of every decimal tolerance so that an
/// exact half-unit rounding error is not rejected by binary noise.
pub const TOLERANCE_SLACK: f64 = 1e-12;

pub fn within(a: f64, b: f64, tolerance: f64) -> bool {
    (a - b).abs() <= tolerance + TOLERANCE_SLACK
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_zero_is_unsigned() {
        assert_eq!(fixed(-0.000006, 4), "0.0000");
        assert_eq!(fixed(-0.00006, 4), "-0.0001");
        assert_eq!(fixed(0.0011, 4), "0.0011");
    }

    #[test]
    fn round_to_matches_printed_value() {
        assert_eq!(round_to(0.0024000000000000002, 5), 0.0024);
        assert_eq!(round_to(-0.000775, 4), -0.0008);
    }

    #[test]
    fn half_unit_rounding_error_passes() {
        assert!(within(-0.0032, -0.00315, 5e-5));
        assert!(!within(0.0, 1e-4, 5e-5));
    }
}
