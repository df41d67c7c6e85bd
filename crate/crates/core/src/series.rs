//! Observed sample paths and the plain-text series format.
//!
//! The on-disk format is one value per line in plain decimal text. Blank
//! lines and lines starting with `#` are ignored. A CSV file whose header
//! names a `value` column is also accepted; only that column is read.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{LrvError, Result};
use crate::scalar::{cmean, Scalar};

/// A finite real-valued sample path `X_1, ..., X_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    values: Vec<T>,
    demeaned: bool,
}

impl<T: Scalar> TimeSeries<T> {
    /// Wraps `values`, rejecting NaN and infinities.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(LrvError::NonFiniteInput { index });
        }
        Ok(Self {
            values,
            demeaned: false,
        })
    }

    /// Marks a series whose mean is already known to be zero (e.g. residuals).
    ///
    /// The flag is only set if the sample mean is numerically zero.
    pub fn new_demeaned(values: Vec<T>) -> Result<Self> {
        let mut s = Self::new(values)?;
        s.demeaned = s.mean_is_negligible();
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn is_demeaned(&self) -> bool {
        self.demeaned
    }

    pub fn mean(&self) -> T {
        cmean(&self.values)
    }

    /// Returns the series with its sample mean subtracted.
    pub fn demean(&self) -> Self {
        if self.demeaned {
            return self.clone();
        }
        let mu = self.mean();
        Self {
            values: self.values.iter().map(|&x| x - mu).collect(),
            demeaned: true,
        }
    }

    /// Applies `f` elementwise; the result is not flagged as demeaned.
    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(self.values.iter().map(|&x| f(x)).collect())
    }

    pub(crate) fn require_len(&self, min: usize) -> Result<()> {
        if self.len() < min {
            return Err(LrvError::InvalidLength { n: self.len(), min });
        }
        Ok(())
    }

    fn mean_is_negligible(&self) -> bool {
        let max_abs = self
            .values
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.abs()));
        self.mean().abs() <= T::lit(1e-12) * (T::one() + max_abs) || self.is_empty()
    }
}

impl<T: Scalar> TryFrom<Vec<T>> for TimeSeries<T> {
    type Error = LrvError;

    fn try_from(values: Vec<T>) -> Result<Self> {
        Self::new(values)
    }
}

/// Parses the series text format.
pub fn parse_series(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut column: Option<usize> = None;
    let mut seen_data = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(|f| f.trim().trim_matches('"')).collect();
        if !seen_data && column.is_none() {
            if let Some(pos) = fields.iter().position(|f| f.eq_ignore_ascii_case("value")) {
                column = Some(pos);
                continue;
            }
        }
        seen_data = true;
        let idx = column.unwrap_or(0);
        if column.is_none() && fields.len() > 1 {
            return Err(LrvError::Parse {
                line: i + 1,
                msg: "multi-column input needs a header naming a `value` column".into(),
            });
        }
        let field = fields.get(idx).ok_or_else(|| LrvError::Parse {
            line: i + 1,
            msg: format!("missing column {idx}"),
        })?;
        let v: f64 = field.parse().map_err(|_| LrvError::Parse {
            line: i + 1,
            msg: format!("not a number: {field:?}"),
        })?;
        if !v.is_finite() {
            return Err(LrvError::Parse {
                line: i + 1,
                msg: "non-finite value".into(),
            });
        }
        out.push(v);
    }
    Ok(out)
}

pub fn read_series(path: impl AsRef<Path>) -> Result<TimeSeries<f64>> {
    let text = fs::read_to_string(path)?;
    TimeSeries::new(parse_series(&text)?)
}

/// Writes one value per line using the shortest round-trip representation.
pub fn write_series<W: Write>(mut w: W, values: &[f64], header: &[String]) -> Result<()> {
    for h in header {
        writeln!(w, "# {h}")?;
    }
    for v in values {
        writeln!(w, "{v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        let err = TimeSeries::new(vec![1.0, f64::NAN]).unwrap_err();
        assert!(matches!(err, LrvError::NonFiniteInput { index: 1 }));
        assert!(TimeSeries::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn demean_sets_flag_and_zero_mean() {
        let s = TimeSeries::new(vec![1.0, 2.0, 3.0, 10.0]).unwrap();
        assert!(!s.is_demeaned());
        let d = s.demean();
        assert!(d.is_demeaned());
        assert!(f64::abs(d.mean()) <= 1e-12 * 11.0);
    }

    #[test]
    fn parses_plain_and_comments() {
        let v = parse_series("# header\n1.5\n\n-2\n# mid\n3e-1\n").unwrap();
        assert_eq!(v, vec![1.5, -2.0, 0.3]);
    }

    #[test]
    fn parses_csv_value_column() {
        let v = parse_series("value\n1\n2\n").unwrap();
        assert_eq!(v, vec![1.0, 2.0]);
        let v = parse_series("t,value\n0,1.25\n1,-4\n").unwrap();
        assert_eq!(v, vec![1.25, -4.0]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_series("1\nabc\n").unwrap_err() {
            LrvError::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
        assert!(parse_series("1,2\n").is_err());
        assert!(parse_series("nan\n").is_err());
    }

    #[test]
    fn write_then_parse_is_exact() {
        let values = vec![0.1, -1.0 / 3.0, 1e-300, 12345.678];
        let mut buf = Vec::new();
        write_series(&mut buf, &values, &["model = iid".into()]).unwrap();
        let back = parse_series(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, values);
    }
}
