//! Number formatting shared by the CSV writers.

/// Formats `x` with `digits` significant digits in the style of C's `%.{digits}g`:
/// fixed notation for moderate exponents, scientific otherwise, trailing zeros
/// trimmed.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
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

/// Twelve significant digits, the precision of every emitted CSV float.
pub fn g12(x: f64) -> String {
    sig(x, 12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_format() {
        assert_eq!(g12(0.0), "0");
        assert_eq!(g12(1.0), "1");
        assert_eq!(g12(-0.5), "-0.5");
        assert_eq!(g12(0.343617021277), "0.343617021277");
        assert_eq!(g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(g12(123456.789), "123456.789");
        assert_eq!(g12(1e-7), "1e-7");
        assert_eq!(g12(2.5e15), "2.5e15");
        assert_eq!(g12(999999999999.7), "1e12");
        assert_eq!(sig(0.000123456, 3), "0.000123");
    }

    #[test]
    fn round_trips_to_twelve_digits() {
        for &x in &[
            std::f64::consts::PI,
            -1.0e-3 / 7.0,
            12345.678901234,
            9.87654321e-9,
        ] {
            let back: f64 = g12(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-11, "{x} -> {}", g12(x));
        }
    }
}
