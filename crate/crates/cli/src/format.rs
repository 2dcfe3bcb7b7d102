//! Fixed-point rendering of measures.

/// Four decimals; exact ties round to the even digit.
pub fn fixed4(x: f64) -> String {
    format!("{x:.4}")
}
