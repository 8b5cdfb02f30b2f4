//! Fixed float formatting shared by every text output.

/// Format like C's `%.12g`.
pub fn g12(x: f64) -> String {
    fmt_g(x, 12)
}

pub fn fmt_g(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
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

/// Round to 12 significant digits so JSON output is stable across platforms.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    g12(x).parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(g12(0.0), "0");
        assert_eq!(g12(1.0), "1");
        assert_eq!(g12(0.1), "0.1");
        assert_eq!(g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(g12(123456789012.0), "123456789012");
        assert_eq!(g12(1234567890123.0), "1.23456789012e+12");
        assert_eq!(g12(1e-5), "1e-05");
        assert_eq!(g12(0.0001), "0.0001");
        assert_eq!(g12(-2.5), "-2.5");
        assert_eq!(g12(f64::INFINITY), "inf");
    }

    #[test]
    fn rounding_is_idempotent() {
        let x = std::f64::consts::PI;
        assert_eq!(round12(round12(x)), round12(x));
        assert_eq!(round12(x), 3.14159265359);
    }
}
