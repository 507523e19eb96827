use opjensen_core::hfunc::classify_coefficient;
use opjensen_core::HFunction;

use crate::error::Result;

/// Safe coefficients of the named families; `power` and `recpower` rows are
/// repeated for each `s`.
pub fn coefficient_table(s_values: &[f64]) -> Result<Vec<(String, f64)>> {
    let mut rows = vec![
        (
            "identity".to_string(),
            classify_coefficient(&HFunction::Identity)?,
        ),
        (
            "constant".to_string(),
            classify_coefficient(&HFunction::constant(1.0)?)?,
        ),
    ];
    for s in s_values {
        let h = HFunction::power(*s)?;
        rows.push((h.to_string(), classify_coefficient(&h)?));
    }
    rows.push((
        "reciprocal".to_string(),
        classify_coefficient(&HFunction::Reciprocal)?,
    ));
    for s in s_values {
        let h = HFunction::reciprocal_power(*s)?;
        rows.push((h.to_string(), classify_coefficient(&h)?));
    }
    Ok(rows)
}

pub fn to_csv(rows: &[(String, f64)]) -> String {
    let mut out = String::from("family,coefficient\n");
    for (family, c) in rows {
        out.push_str(&format!("{family},{c}\n"));
    }
    out
}

/// Fixed-point with 12 decimals and trailing zeros removed.
pub fn format_coefficient(c: f64) -> String {
    if c.is_infinite() {
        return if c > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if c.is_nan() {
        return "nan".into();
    }
    let s = format!("{c:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}
