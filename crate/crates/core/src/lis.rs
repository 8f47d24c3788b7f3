//! Distance to monotonicity of a streamed array.
//!
//! Item `x(i)` becomes the point `(i, x(i))`; chains under strict dominance
//! are exactly the strictly increasing subsequences, so the minimum defect of
//! the point stream is `n − LIS(x)`.

use crate::amdp::{AmdpParams, AmdpSketch};
use crate::error::{Error, Result};
use crate::poset::{Dominance, PairPoint};

/// Result of a distance-to-monotonicity run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DmEstimate {
    pub n: u64,
    /// Upper estimate of `n − LIS(x)`; never below the true value.
    pub dm_estimate: u64,
    /// `n − dm_estimate`, a lower estimate of the LIS length.
    pub lis_estimate: u64,
    pub peak_active: usize,
    pub fell_back: bool,
    pub space_cap: Option<u64>,
}

/// Sketch parameters for an array of known length `n`: unit weights, so the
/// total weight is `n`.
pub fn dm_params(n: u64, delta: f64, gamma: f64, seed: u64) -> Result<AmdpParams> {
    Ok(AmdpParams::new(delta, gamma, n.max(1), seed)?.with_n_bound(n))
}

/// Streaming distance-to-monotonicity estimator over any totally ordered values.
#[derive(Debug, Clone)]
pub struct DmSketch<V> {
    inner: AmdpSketch<PairPoint<V>, Dominance>,
    n: u64,
}

impl<V: Ord> DmSketch<V> {
    pub fn new(n: u64, delta: f64, gamma: f64, seed: u64) -> Result<Self> {
        Ok(Self::with_params(n, dm_params(n, delta, gamma, seed)?))
    }

    /// Uses caller-supplied sketch parameters; `params` must admit `n` unit items.
    pub fn with_params(n: u64, params: AmdpParams) -> Self {
        DmSketch {
            inner: AmdpSketch::new(params, Dominance),
            n,
        }
    }

    pub fn push(&mut self, value: V) -> Result<()> {
        let position = self.inner.time() + 1;
        self.inner.push(PairPoint::new(position, value), 1)?;
        Ok(())
    }

    pub fn seen(&self) -> u64 {
        self.inner.time()
    }

    pub fn sketch(&self) -> &AmdpSketch<PairPoint<V>, Dominance> {
        &self.inner
    }

    pub fn finish(mut self) -> Result<DmEstimate> {
        if self.inner.time() != self.n {
            return Err(Error::DeclaredLengthMismatch {
                declared: self.n,
                actual: self.inner.time(),
            });
        }
        let dm = self.inner.finish()?.min(self.n);
        Ok(DmEstimate {
            n: self.n,
            dm_estimate: dm,
            lis_estimate: self.n - dm,
            peak_active: self.inner.peak_active(),
            fell_back: self.inner.fell_back(),
            space_cap: self.inner.current_cap(),
        })
    }
}

/// One-pass estimate of `n − LIS(values)` for a stream of exactly `n` values.
pub fn estimate_dm<V, I>(values: I, n: u64, delta: f64, gamma: f64, seed: u64) -> Result<DmEstimate>
where
    V: Ord,
    I: IntoIterator<Item = V>,
{
    let mut sketch = DmSketch::new(n, delta, gamma, seed)?;
    for v in values {
        sketch.push(v)?;
    }
    sketch.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::exact_lis_length;

    #[test]
    fn sorted_array_has_zero_distance() {
        for seed in 0..20 {
            let est = estimate_dm(1..=300i64, 300, 0.5, 0.1, seed).unwrap();
            assert_eq!(est.dm_estimate, 0);
            assert_eq!(est.lis_estimate, 300);
        }
    }

    #[test]
    fn reverse_sorted_array() {
        for seed in 0..20 {
            let est = estimate_dm((1..=200i64).rev(), 200, 0.5, 0.1, seed).unwrap();
            assert!((199..=200).contains(&est.dm_estimate));
        }
    }

    #[test]
    fn small_mixed_array() {
        for seed in 0..50 {
            let est = estimate_dm([1, 3, 2, 4], 4, 0.5, 0.1, seed).unwrap();
            assert_eq!(est.dm_estimate, 1);
        }
    }

    #[test]
    fn equal_values_do_not_chain() {
        assert_eq!(exact_lis_length(&[5, 5]), 1);
        for seed in 0..10 {
            let est = estimate_dm([5, 5], 2, 0.5, 0.1, seed).unwrap();
            assert_eq!(est.dm_estimate, 1);
            let est = estimate_dm([1, 1, 2, 2, 3, 3], 6, 0.5, 0.1, seed).unwrap();
            assert_eq!(est.dm_estimate, 3);
        }
    }

    #[test]
    fn empty_array() {
        let est = estimate_dm(Vec::<i64>::new(), 0, 0.5, 0.1, 0).unwrap();
        assert_eq!(est.dm_estimate, 0);
        assert_eq!(est.lis_estimate, 0);
    }

    #[test]
    fn declared_length_is_checked() {
        assert!(matches!(
            estimate_dm([1, 2, 3], 4, 0.5, 0.1, 0),
            Err(Error::DeclaredLengthMismatch {
                declared: 4,
                actual: 3
            })
        ));
        assert!(matches!(
            estimate_dm([1, 2, 3], 2, 0.5, 0.1, 0),
            Err(Error::BoundExceeded { .. })
        ));
    }

    #[test]
    fn parameter_errors_propagate() {
        assert!(estimate_dm([1], 1, 0.0, 0.1, 0).is_err());
        assert!(estimate_dm([1], 1, 0.5, 1.0, 0).is_err());
    }

    #[test]
    fn works_for_non_integer_values() {
        let words = ["apple", "kiwi", "banana", "pear", "zucchini"];
        let est = estimate_dm(words, 5, 1.0, 0.1, 3).unwrap();
        assert_eq!(est.dm_estimate, 1);
    }
}
