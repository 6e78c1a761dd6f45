//! Deterministic number formatting for CSV and CLI output.
//!
//! All numeric output carries 9 significant digits so repeated runs diff
//! cleanly across platforms. Magnitudes below 1e-3 (and at or above 1e9)
//! switch to scientific notation.

/// Scientific notation with 9 significant digits, e.g. `6.28760269e-6`.
pub fn fmt_scientific(v: f64) -> String {
    debug_assert!(v.is_finite());
    format!("{v:.8e}")
}

/// 9 significant digits: decimal for magnitudes in [1e-3, 1e9), scientific
/// otherwise. Zero formats as `0.00000000e0`.
pub fn fmt_sig(v: f64) -> String {
    debug_assert!(v.is_finite());
    let mag = v.abs();
    if !(1e-3..1e9).contains(&mag) {
        return fmt_scientific(v);
    }
    let decimals = 8 - mag.log10().floor() as i32;
    debug_assert!(decimals >= 0);
    format!("{v:.*}", decimals as usize)
}
