//! Number formatting shared by the CSV and JSON writers.

/// Significant digits used for every serialized number.
pub const SIG_DIGITS: usize = 12;

/// Rounds `x` to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let s = format!("{:.*e}", SIG_DIGITS - 1, x);
    s.parse().expect("formatted float parses")
}

/// Plain decimal rendering of `x` at [`SIG_DIGITS`] significant digits,
/// locale independent, without trailing zeros.
pub fn fmt_sig(x: f64) -> String {
    format!("{}", round_sig(x))
}
