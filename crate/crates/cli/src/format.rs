//! Number and table formatting.

use std::fmt::Write;

/// `x` with 12 significant digits, positional for moderate magnitudes and
/// scientific otherwise.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exponent) {
        let decimals = (11 - exponent) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

pub fn table_cell(x: f64) -> String {
    format!("{x:>10.4}")
}

/// Rows of labelled per-user values under a `user 1 .. user N` header.
pub fn user_table(title: &str, rows: &[(&str, &[f64])]) -> String {
    let n = rows.first().map_or(0, |(_, v)| v.len());
    let mut out = format!("{title:<8}");
    for i in 1..=n {
        let _ = write!(out, "{:>10}", format!("user {i}"));
    }
    out.push('\n');
    for (label, values) in rows {
        let _ = write!(out, "{label:<8}");
        for v in values.iter() {
            out.push_str(&table_cell(*v));
        }
        out.push('\n');
    }
    out
}

/// Two-column `name value` listing.
pub fn key_values(entries: &[(&str, String)]) -> String {
    let width = entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    entries
        .iter()
        .map(|(k, v)| format!("{k:<width$}  {v}\n"))
        .collect()
}

pub fn csv_row(values: impl IntoIterator<Item = String>) -> String {
    let mut line = values.into_iter().collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

pub fn indexed_header(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |i| format!("{prefix}_{i}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(5.0 / 6.0), "0.833333333333");
        assert_eq!(sig12(1.25f64.powf(1.5) * 2.5), "3.49385621484");
        assert_eq!(sig12(-0.25), "-0.250000000000");
        assert_eq!(sig12(1.5e-9), "1.50000000000e-9");
        assert_eq!(sig12(0.0), "0");
        for x in [1.25, 0.0625, 123.456, 7e13] {
            let back: f64 = sig12(x).parse().unwrap();
            assert!((back - x).abs() <= 1e-11 * x.abs());
        }
    }

    #[test]
    fn table_layout() {
        let t = user_table("NE", &[("a_i", &[1.25, 0.625]), ("u_i", &[3.49385, 1.5625])]);
        assert_eq!(t, "NE          user 1    user 2\na_i         1.2500    0.6250\nu_i         3.4939    1.5625\n");
    }
}
