//! Output encodings shared by every writer: `%.17g` numbers in CSV and JSON
//! objects with sorted keys, so identical runs give identical bytes.

use serde::Serialize;

/// Formats `v` like C's `printf("%.17g", v)`.
pub fn g17(v: f64) -> String {
    fmt_g(v, 17)
}

fn fmt_g(v: f64, precision: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let p = precision.max(1);
    // scientific form gives the decimal exponent after rounding to p digits
    let sci = format!("{:.*e}", p - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Joins values as one CSV row.
pub fn csv_row(values: &[f64]) -> String {
    values.iter().map(|&v| g17(v)).collect::<Vec<_>>().join(",")
}

/// Pretty JSON with object keys in sorted order at every level.
pub fn sorted_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    // serde_json's Map is a BTreeMap unless `preserve_order` is enabled
    let v = serde_json::to_value(value)?;
    serde_json::to_string_pretty(&v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g17() {
        // reference strings produced by C printf("%.17g")
        let cases: &[(f64, &str)] = &[
            (0.1, "0.10000000000000001"),
            (1.0, "1"),
            (-0.25, "-0.25"),
            (127.75, "127.75"),
            (1e-5, "1.0000000000000001e-05"),
            (0.0001, "0.0001"),
            (1e17, "1e+17"),
            (1e16, "10000000000000000"),
            (123456789.0, "123456789"),
            (1.0 / 3.0, "0.33333333333333331"),
            (2.5e-300, "2.5e-300"),
            (-1.5e22, "-1.5e+22"),
            (0.0, "0"),
        ];
        for &(v, want) in cases {
            assert_eq!(g17(v), want, "value {v:e}");
        }
    }

    #[test]
    fn round_trips() {
        for &v in &[0.1, 1.0 / 3.0, std::f64::consts::PI, -1e-300, 6.02e23, 0.04472135954999579] {
            assert_eq!(g17(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_keys_sorted() {
        #[derive(Serialize)]
        struct S {
            zeta: u8,
            alpha: u8,
        }
        let s = sorted_json(&S { zeta: 1, alpha: 2 }).unwrap();
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
    }
}
