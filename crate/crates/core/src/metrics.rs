//! Drift statistics for first integrals evaluated along trajectories.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `max_k |v_k - v_0| / max(1, |v_0|)`.
pub fn drift_metric(values: &[f64]) -> Result<f64> {
    let Some(&v0) = values.first() else {
        return Err(Error::Argument("drift of an empty series".into()));
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Argument("drift of a series with non-finite values".into()));
    }
    let denom = v0.abs().max(1.0);
    Ok(values.iter().map(|v| (v - v0).abs() / denom).fold(0.0, f64::max))
}

/// One named invariant evaluated at every sample of a source series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub name: String,
    pub values: Vec<f64>,
    pub drift: f64,
}

impl InvariantReport {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let drift = drift_metric(&values)?;
        Ok(Self {
            name: name.into(),
            values,
            drift,
        })
    }

    /// Evaluates `f` on every item and wraps the result.
    pub fn from_fn<T>(name: impl Into<String>, items: &[T], f: impl Fn(&T) -> f64) -> Result<Self> {
        Self::new(name, items.iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_series_has_zero_drift() {
        assert_eq!(drift_metric(&[5.0, 5.0, 5.0]).unwrap(), 0.0);
    }

    #[test]
    fn small_reference_uses_unit_denominator() {
        assert_eq!(drift_metric(&[0.0, 0.5]).unwrap(), 0.5);
    }

    #[test]
    fn relative_for_large_reference() {
        assert_eq!(drift_metric(&[2.0, 3.0]).unwrap(), 0.5);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(drift_metric(&[]), Err(Error::Argument(_))));
    }

    proptest! {
        #[test]
        fn zero_iff_all_equal(v in prop::collection::vec(-1e3f64..1e3, 1..20)) {
            let d = drift_metric(&v).unwrap();
            prop_assert!(d >= 0.0);
            let all_equal = v.iter().all(|x| *x == v[0]);
            prop_assert_eq!(d == 0.0, all_equal);
        }

        #[test]
        fn appending_reference_copies_is_neutral(
            v in prop::collection::vec(-1e3f64..1e3, 1..20),
            k in 0usize..5,
        ) {
            let mut w = v.clone();
            w.extend(std::iter::repeat_n(v[0], k));
            prop_assert_eq!(drift_metric(&v).unwrap(), drift_metric(&w).unwrap());
        }
    }
}
