//! Closed-form bounds on the average ratio of classical to quantum overlap.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{check_epsilon, frankl_rodl_bound, independent_set_lower_bound_with_cap};

/// Coefficient convention used for the exponential bound.
pub const COEFFICIENT_CONVENTION: &str = "2*d*exp(-c*d)";
/// Other coefficient forms of the same bound found in the literature.
pub const ALTERNATIVE_FORMS: [&str; 2] = ["d*exp(-c*d)", "2*exp(-c*d)"];

/// Where an independence-number value came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaProvenance {
    Exact,
    LowerBound,
    FranklRodl { epsilon: f64 },
}

impl std::fmt::Display for AlphaProvenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AlphaProvenance::Exact => f.write_str("exact"),
            AlphaProvenance::LowerBound => f.write_str("lower_bound"),
            AlphaProvenance::FranklRodl { epsilon } => write!(f, "frankl_rodl({epsilon})"),
        }
    }
}

impl Serialize for AlphaProvenance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub d: usize,
    pub d_tilde: usize,
    pub epsilon: f64,
    pub c: f64,
    pub alpha_used: f64,
    pub alpha_status: AlphaProvenance,
    /// `min_a |<a|psi>|^2` over the embedded Hadamard family: `1 / d_tilde`.
    pub min_born: f64,
    pub corollary_value: f64,
    pub theorem2_value: f64,
    /// `4 / (d - 1)`.
    pub barrett_comparison: f64,
    /// The bound says nothing: `min(corollary_value, theorem2_value) >= 1`.
    pub vacuous: bool,
    /// Size of the weight-shell independent set in the `d_tilde` Hadamard
    /// graph.
    pub alpha_lower_bound: Option<u64>,
    /// Whether `alpha_lower_bound <= (2 - epsilon)^d_tilde`; when false this
    /// epsilon is too large for the cap to hold at this dimension.
    pub fr_consistent: Option<bool>,
}

/// `2 alpha / (n_states * min_born)`, an upper bound on the average overlap
/// ratio over a family of `n_states` states.
pub fn corollary_bound(alpha: f64, n_states: usize, min_born: f64) -> Result<f64> {
    if n_states == 0 {
        return Err(Error::InvalidParameter("state family is empty".into()));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be finite and >= 0, got {alpha}"
        )));
    }
    if min_born <= 0.0 {
        return Err(Error::InvalidParameter(
            "state orthogonal to some family member; bound undefined".into(),
        ));
    }
    if min_born > 1.0 || min_born.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "min_born must lie in (0, 1], got {min_born}"
        )));
    }
    Ok(2.0 * alpha / (n_states as f64 * min_born))
}

/// `c = ln 2 - ln(2 - epsilon)`.
pub fn decay_rate(epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok(std::f64::consts::LN_2 - (2.0 - epsilon).ln())
}

/// `(2 d e^{-c d}, c)` for `d` divisible by 4.
pub fn theorem2_bound(d: usize, epsilon: f64) -> Result<(f64, f64)> {
    if d == 0 || !d.is_multiple_of(4) {
        return Err(Error::InvalidParameter(format!(
            "d = {d} is not a positive multiple of 4; use embedded_bound"
        )));
    }
    let c = decay_rate(epsilon)?;
    let d = d as f64;
    Ok((2.0 * d * (-c * d).exp(), c))
}

/// Bound for any `d >= 4` through the Hadamard family of the largest
/// dimension `d_tilde = 4 floor(d / 4)` padded with zeros.
pub fn embedded_bound(d: usize, epsilon: f64) -> Result<BoundReport> {
    if d < 4 {
        return Err(Error::InvalidParameter(format!(
            "embedded bound needs d >= 4, got {d}"
        )));
    }
    let d_tilde = 4 * (d / 4);
    let (theorem2_value, c) = theorem2_bound(d_tilde, epsilon)?;
    let alpha_used = frankl_rodl_bound(d_tilde, epsilon)?;
    let min_born = 1.0 / d_tilde as f64;
    let n_states = 2f64.powi(d_tilde as i32);
    let corollary_value = 2.0 * alpha_used / (n_states * min_born);
    Ok(BoundReport {
        d,
        d_tilde,
        epsilon,
        c,
        alpha_used,
        alpha_status: AlphaProvenance::FranklRodl { epsilon },
        min_born,
        corollary_value,
        theorem2_value,
        barrett_comparison: 4.0 / (d as f64 - 1.0),
        vacuous: corollary_value.min(theorem2_value) >= 1.0,
        alpha_lower_bound: None,
        fr_consistent: None,
    })
}

/// Some family member has ratio at most the average `kbar`; this only
/// relabels the value so reports keep the two claims apart.
pub fn single_pair_bound(kbar: f64) -> f64 {
    kbar
}

/// One embedded bound per `d`, with the weight-shell lower bound on the
/// independence number alongside.
pub fn scaling_sweep(ds: &[usize], epsilon: f64, exec: Execution) -> Result<Vec<BoundReport>> {
    if ds.is_empty() {
        return Err(Error::InvalidParameter("empty dimension range".into()));
    }
    exec.map_slice(ds, |&d| {
        let mut row = embedded_bound(d, epsilon)?;
        if row.d_tilde <= 64 {
            let lower = independent_set_lower_bound_with_cap(row.d_tilde, 0)?.value;
            row.alpha_lower_bound = Some(lower);
            row.fr_consistent = Some(lower as f64 <= row.alpha_used);
        }
        Ok(row)
    })
    .into_iter()
    .collect()
}

pub const SWEEP_COLUMNS: [&str; 12] = [
    "d",
    "d_tilde",
    "epsilon",
    "c",
    "alpha_used",
    "alpha_status",
    "corollary_value",
    "theorem2_value",
    "barrett_comparison",
    "vacuous",
    "alpha_lower_bound",
    "fr_consistent",
];

/// Writes `metadata` as `# key: value` lines, then the header and rows.
pub fn write_sweep_csv<W: Write>(
    rows: &[BoundReport],
    metadata: &[(String, String)],
    mut out: W,
) -> Result<()> {
    for (k, v) in metadata {
        writeln!(out, "# {k}: {v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.d.to_string(),
            r.d_tilde.to_string(),
            r.epsilon.to_string(),
            r.c.to_string(),
            r.alpha_used.to_string(),
            r.alpha_status.to_string(),
            r.corollary_value.to_string(),
            r.theorem2_value.to_string(),
            r.barrett_comparison.to_string(),
            r.vacuous.to_string(),
            r.alpha_lower_bound
                .map(|v| v.to_string())
                .unwrap_or_default(),
            r.fr_consistent.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn corollary_examples() {
        assert_eq!(corollary_bound(4.0, 16, 0.25).unwrap(), 2.0);
        assert_eq!(corollary_bound(7.0, 7, 1.0).unwrap(), 2.0);
        assert_eq!(corollary_bound(1.0, 256, 0.125).unwrap(), 1.0 / 16.0);
        let err = corollary_bound(1.0, 4, 0.0).unwrap_err().to_string();
        assert!(err.contains("bound undefined"), "{err}");
        assert!(corollary_bound(1.0, 0, 0.5).is_err());
    }

    #[test]
    fn theorem2_examples() {
        let (v, c) = theorem2_bound(4, 0.5).unwrap();
        assert_relative_eq!(c, 0.287_682_072_451_780_9, max_relative = 1e-12);
        assert_relative_eq!(v, 2.53125, max_relative = 1e-12);
        assert_relative_eq!(
            8.0 * (-1.150_728_289_807_123_5f64).exp(),
            v,
            max_relative = 1e-12
        );
        let (v, _) = theorem2_bound(64, 0.5).unwrap();
        assert_relative_eq!(v, 128.0 * 0.75f64.powi(64), max_relative = 1e-12);
        assert!((v - 1.2916e-6).abs() < 1e-10);
        let (v, c) = theorem2_bound(8, 1e-12).unwrap();
        assert!(c > 0.0);
        assert!((v - 16.0).abs() < 1e-9);
        assert!(theorem2_bound(6, 0.5)
            .unwrap_err()
            .to_string()
            .contains("embedded_bound"));
        assert!(theorem2_bound(8, 0.0).is_err());
        assert!(theorem2_bound(8, 2.0).is_err());
    }

    #[test]
    fn embedded_examples() {
        assert_eq!(embedded_bound(6, 0.5).unwrap().d_tilde, 4);
        let r8 = embedded_bound(8, 0.5).unwrap();
        assert_eq!(r8.d_tilde, 8);
        assert_eq!(r8.theorem2_value, theorem2_bound(8, 0.5).unwrap().0);
        let r13 = embedded_bound(13, 0.5).unwrap();
        assert_eq!(r13.d_tilde, 12);
        assert_relative_eq!(
            r13.theorem2_value,
            24.0 * 0.75f64.powi(12),
            max_relative = 1e-12
        );
        assert!(!r13.vacuous);
        assert!(matches!(
            embedded_bound(3, 0.5),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn single_pair_examples() {
        assert_eq!(single_pair_bound(2.0), 2.0);
        assert_eq!(single_pair_bound(0.0), 0.0);
        let (v, _) = theorem2_bound(64, 0.5).unwrap();
        assert_eq!(single_pair_bound(v), v);
    }

    #[test]
    fn sweep_examples() {
        let rows = scaling_sweep(&[4, 5, 8], 0.5, Execution::default()).unwrap();
        assert_eq!(rows[1].barrett_comparison, 1.0);
        assert!(rows[0].vacuous && rows[2].vacuous);
        assert_eq!(rows[0].alpha_lower_bound, Some(2));
        assert_eq!(rows[2].alpha_lower_bound, Some(18));
        assert!(scaling_sweep(&[], 0.5, Execution::default()).is_err());

        let rows = scaling_sweep(
            &(8..=64).step_by(4).collect::<Vec<_>>(),
            0.5,
            Execution::default(),
        )
        .unwrap();
        for w in rows.windows(2) {
            assert!(w[1].theorem2_value < w[0].theorem2_value);
        }
    }

    #[test]
    fn sweep_is_deterministic_across_modes() {
        let ds: Vec<usize> = (4..=40).collect();
        assert_eq!(
            scaling_sweep(&ds, 0.3, Execution::Sequential).unwrap(),
            scaling_sweep(&ds, 0.3, Execution::Parallel).unwrap()
        );
    }

    #[test]
    fn sweep_csv_layout() {
        let rows = scaling_sweep(&[4, 5], 0.5, Execution::Sequential).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &[("epsilon".into(), "0.5".into())], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# epsilon: 0.5"));
        assert_eq!(lines.next().unwrap(), SWEEP_COLUMNS.join(","));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0], "4");
        assert_eq!(row[5], "frankl_rodl(0.5)");
        assert_eq!(row[9], "true");
    }

    proptest! {
        #[test]
        fn theorem2_matches_ratio_form(k in 1usize..=16, eps in 0.01f64..1.99) {
            let d = 4 * k;
            let (v, c) = theorem2_bound(d, eps).unwrap();
            prop_assert!(c > 0.0);
            let ratio_form = 2.0 * frankl_rodl_bound(d, eps).unwrap() * d as f64 / 2f64.powi(d as i32);
            prop_assert!((v - ratio_form).abs() <= 1e-9 * ratio_form);
            let r = embedded_bound(d, eps).unwrap();
            prop_assert!((r.corollary_value - v).abs() <= 1e-9 * v);
            prop_assert_eq!(r.vacuous, r.corollary_value.min(r.theorem2_value) >= 1.0);
        }

        #[test]
        fn corollary_on_hadamard_inputs(k in 1usize..=8, alpha in 1u32..1000) {
            let d = 4 * k;
            let got = corollary_bound(alpha as f64, 1usize << d, 1.0 / d as f64).unwrap();
            let want = 2.0 * d as f64 * alpha as f64 / 2f64.powi(d as i32);
            prop_assert!((got - want).abs() <= 1e-15 * want);
        }
    }
}
