//! CSV cell formatting shared by every report.
//!
//! Floats carry 12 significant digits. Infinities are written as the literal
//! `inf` (or `-inf`); NaN is never written.

use crate::error::{Error, Result};

/// Format one numeric cell.
pub fn number(x: f64) -> Result<String> {
    if x.is_nan() {
        return Err(Error::Invalid("refusing to write NaN".into()));
    }
    if x.is_infinite() {
        return Ok(if x > 0.0 { "inf" } else { "-inf" }.into());
    }
    Ok(format!("{x:.11e}"))
}

/// Join cells into one CSV line, newline included.
pub fn row(cells: &[String]) -> String {
    let mut line = cells.join(",");
    line.push('\n');
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(number(1.0 / 3.0).unwrap(), "3.33333333333e-1");
        assert_eq!(number(0.0).unwrap(), "0.00000000000e0");
        let back: f64 = number(std::f64::consts::PI).unwrap().parse().unwrap();
        assert!((back - std::f64::consts::PI).abs() < 1e-11);
    }

    #[test]
    fn special_values() {
        assert_eq!(number(f64::INFINITY).unwrap(), "inf");
        assert_eq!(number(f64::NEG_INFINITY).unwrap(), "-inf");
        assert!(number(f64::NAN).is_err());
    }

    #[test]
    fn rows() {
        assert_eq!(row(&["a".into(), "b".into()]), "a,b\n");
    }
}
