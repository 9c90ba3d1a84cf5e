//! Compact display rendering of p-values and Bayes factors.
//!
//! Human-facing output rounds to two significant decimals: p-values are
//! shown with two decimal places (falling back to two significant figures
//! when they would display as `0.00`), and Bayes factors are shown with two
//! significant figures, with values below one rendered as reciprocals
//! (`1/1.8`). Machine-readable output keeps full precision; these helpers
//! are for tables and summaries only.

/// Render a p-value: two decimal places, or two significant figures in
/// plain decimal notation when the value would round to `0.00`.
pub fn format_p(p: f64) -> String {
    if p == 0.0 {
        return "0".to_string();
    }
    let two_decimals = format!("{p:.2}");
    if two_decimals != "0.00" {
        return two_decimals;
    }
    // keep two significant figures without scientific notation
    let exponent = p.log10().floor() as i32;
    let decimals = (1 - exponent).max(0) as usize;
    format!("{p:.decimals$}")
}

/// Render a Bayes factor: two significant figures, values below one as
/// reciprocals in `1/x` style.
pub fn format_bf(bf: f64) -> String {
    if bf == 0.0 {
        return "0".to_string();
    }
    if bf.is_infinite() {
        return "inf".to_string();
    }
    if bf >= 1.0 {
        two_significant(bf)
    } else {
        format!("1/{}", two_significant(1.0 / bf))
    }
}

/// Two significant figures for a value >= 1, with a trailing `.0` trimmed.
fn two_significant(x: f64) -> String {
    if x < 10.0 {
        let s = format!("{x:.1}");
        match s.strip_suffix(".0") {
            Some(trimmed) => trimmed.to_string(),
            None => s,
        }
    } else {
        let exponent = x.log10().floor() as i32;
        let scale = 10f64.powi(exponent - 1);
        format!("{:.0}", (x / scale).round() * scale)
    }
}
