//! `key=value` listing of the closed-form constants for one configuration.

use crate::error::Result;
use crate::field::FieldKind;
use crate::theory::{
    dsep_probability, hamming_conc_m, net_log_cardinality, noisy_error_bound, pointwise_m,
    uniform_m, EigenDensity, TheoryConstants,
};

const NONE: &str = "none";

/// Ordered `(key, value)` pairs. Quantities that are undefined for the
/// given `n` (gap envelopes below `βn = 2`, separation probability and
/// eigenvalue normalizer below `n = 2`) are reported as `none`.
pub fn theory_report(
    field: FieldKind,
    n: usize,
    delta: f64,
    d: f64,
    tau: f64,
) -> Result<Vec<(String, String)>> {
    let c = TheoryConstants::new(field, n)?;
    let opt = |v: Option<f64>| v.map_or_else(|| NONE.to_string(), |x| x.to_string());
    let mut out: Vec<(&str, String)> = vec![
        ("field", field.to_string()),
        ("n", n.to_string()),
        ("beta", field.beta().to_string()),
        ("mu1", c.mu1.to_string()),
        ("mu2", c.mu2.to_string()),
        ("gap", c.gap.to_string()),
        ("gap_lower", opt(c.gap_lower)),
        ("gap_upper", opt(c.gap_upper)),
        ("delta", delta.to_string()),
        ("bound_D", d.to_string()),
        ("tau", tau.to_string()),
        ("pointwise_m", pointwise_m(field, n, delta, d)?.to_string()),
        ("uniform_m", uniform_m(field, n, delta, d)?.to_string()),
        ("hamming_conc_m", hamming_conc_m(field, n, delta, d)?.to_string()),
        ("noisy_error_bound", noisy_error_bound(field, n, delta, tau)?.to_string()),
        (
            "net_log_cardinality",
            net_log_cardinality(field, n, c.gap * delta / 8.0)?.to_string(),
        ),
    ];
    out.push(("dsep_probability", opt(dsep_probability(field, n).ok())));
    out.push((
        "eigen_normalizer",
        opt(EigenDensity::new(field, n).ok().map(|e| e.normalizer())),
    ));
    Ok(out.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

/// [`theory_report`] as text, one `key=value` per line.
pub fn print_theory(field: FieldKind, n: usize, delta: f64, d: f64, tau: f64) -> Result<String> {
    Ok(theory_report(field, n, delta, d, tau)?
        .into_iter()
        .map(|(k, v)| format!("{k}={v}\n"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_eight_listing() {
        let text = print_theory(FieldKind::Real, 8, 0.1, 3.0, 0.0).unwrap();
        assert!(text.contains("\npointwise_m=141877\n"), "{text}");
        assert!(text.contains("\ntau=0\n"));
        assert!(text.starts_with("field=real\nn=8\nbeta=0.5\n"));
        for key in ["mu1", "mu2", "gap", "gap_lower", "gap_upper", "uniform_m", "noisy_error_bound"] {
            assert!(text.contains(&format!("\n{key}=")), "missing {key}");
        }
    }

    #[test]
    fn small_n_reports_none() {
        let r = theory_report(FieldKind::Real, 1, 0.3, 2.0, 0.0).unwrap();
        let get = |k: &str| r.iter().find(|(kk, _)| kk == k).unwrap().1.clone();
        assert_eq!(get("gap_lower"), "none");
        assert_eq!(get("dsep_probability"), "none");
        assert_eq!(get("eigen_normalizer"), "none");
    }
}
