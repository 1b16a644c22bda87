//! Deterministic JSON number formatting shared by the report writers.
//!
//! Reports serialize every real with 17 significant digits so that a reader
//! can reconstruct the exact double and identical runs emit identical bytes.

/// Formats a finite double with 17 significant digits in scientific notation.
pub fn float17(v: f64) -> String {
    debug_assert!(v.is_finite(), "reports never contain non-finite values");
    if v == 0.0 {
        // Collapse -0.0 so byte-identical output does not depend on sign of zero.
        return "0.0000000000000000e0".to_string();
    }
    format!("{:.16e}", v)
}

/// Joins formatted floats into a JSON array.
pub fn float_array(vs: &[f64]) -> String {
    let items: Vec<String> = vs.iter().map(|&v| float17(v)).collect();
    format!("[{}]", items.join(","))
}
