//! Small shared helpers.

/// Formats a real with 6 significant digits, '.' separator, no exponent.
/// Used everywhere a score or coordinate lands in a text artifact, so
/// output bytes do not depend on platform or locale.
pub fn fmt_g6(v: f64) -> String {
    if v == 0.0 {
        return "0.00000".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).clamp(0, 17) as usize;
    format!("{v:.decimals$}")
}

/// Writes a file atomically: temp sibling first, then rename into place.
pub fn write_atomic(path: &std::path::Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp-partial");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_g6(0.0), "0.00000");
        assert_eq!(fmt_g6(1.0), "1.00000");
        assert_eq!(fmt_g6(0.5), "0.500000");
        assert_eq!(fmt_g6(0.923456789), "0.923457");
        assert_eq!(fmt_g6(123.456789), "123.457");
        assert_eq!(fmt_g6(0.0123456), "0.0123456");
    }
}
