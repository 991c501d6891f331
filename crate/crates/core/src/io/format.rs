//! Fixed numeric formatting for emitted files.

/// Significant digits used in CSV and SVG output.
pub const SIG_DIGITS: usize = 9;

/// C `%.*g`-style formatting with `digits` significant digits.
pub fn fmt_g(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    // Round first, then read the exponent so 9.99999999995 becomes 10.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// [`fmt_g`] at [`SIG_DIGITS`].
pub fn num(x: f64) -> String {
    fmt_g(x, SIG_DIGITS)
}

/// Joins formatted fields into one newline-terminated CSV record.
pub fn csv_row<I, S>(fields: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out = fields
        .into_iter()
        .map(|s| s.as_ref().to_string())
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(fmt_g(0.0, 9), "0");
        assert_eq!(fmt_g(1.0, 9), "1");
        assert_eq!(fmt_g(-45.0, 9), "-45");
        assert_eq!(fmt_g(0.1, 9), "0.1");
        assert_eq!(fmt_g(1.0 / 3.0, 9), "0.333333333");
        assert_eq!(fmt_g(123456789.0, 9), "123456789");
        assert_eq!(fmt_g(1234567890.0, 9), "1.23456789e+09");
        assert_eq!(fmt_g(0.0001234, 9), "0.0001234");
        assert_eq!(fmt_g(0.00001234, 9), "1.234e-05");
        assert_eq!(fmt_g(9.9999999996, 9), "10");
        assert_eq!(fmt_g(f64::NEG_INFINITY, 9), "-inf");
        assert_eq!(fmt_g(3.15e9, 9), "3.15e+09");
        assert_eq!(fmt_g(-1e-300, 9), "-1e-300");
    }

    #[test]
    fn csv_record() {
        assert_eq!(csv_row(["a", "b"]), "a,b\n");
        assert_eq!(csv_row([num(1.5), num(2.0)]), "1.5,2\n");
    }
}
