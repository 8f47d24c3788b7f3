//! Randomized edit-distance estimation by reduction to chain defects.
//!
//! With random access to the fixed string `y` and one pass over `x`, every
//! matching pair `(i, j)` with `x(i) = y(j)` is emitted in lexicographic order.
//! Chains of these pairs under strict dominance are exactly the common
//! subsequences of `x` and `y`, so with `m` the minimum defect of the pair
//! stream `P`, `E(x, y) = m + n − |P|`. Running the sketch at `δ/k` (where `k`
//! bounds how often any symbol repeats in `y`) turns its multiplicative error
//! into an additive `δn` error on `E`.

use std::collections::HashMap;
use std::hash::Hash;

use crate::amdp::{AmdpParams, AmdpSketch};
use crate::error::{Error, Result};
use crate::poset::{Dominance, PairPoint};

/// Occurrence lists of every symbol of the fixed string.
#[derive(Debug, Clone)]
pub struct FixedStringIndex<S> {
    occurrences: HashMap<S, Vec<u64>>,
    n: usize,
    k: usize,
}

impl<S: Hash + Eq + Clone> FixedStringIndex<S> {
    pub fn build(y: &[S]) -> Self {
        let mut occurrences: HashMap<S, Vec<u64>> = HashMap::new();
        for (j, s) in y.iter().enumerate() {
            occurrences.entry(s.clone()).or_default().push(j as u64 + 1);
        }
        let k = occurrences.values().map(Vec::len).max().unwrap_or(0);
        FixedStringIndex {
            occurrences,
            n: y.len(),
            k,
        }
    }
}

impl<S: Hash + Eq> FixedStringIndex<S> {
    /// Length of the fixed string.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Largest number of occurrences of any one symbol.
    pub fn max_multiplicity(&self) -> usize {
        self.k
    }

    /// 1-based positions of `symbol` in `y`, ascending.
    pub fn positions(&self, symbol: &S) -> &[u64] {
        self.occurrences.get(symbol).map_or(&[], Vec::as_slice)
    }

    /// Number of distinct symbols in `y`.
    pub fn distinct_symbols(&self) -> usize {
        self.occurrences.len()
    }

    /// Pairs `(i, j)` for every `j` with `y(j) = symbol`, ascending in `j`.
    pub fn emit_pairs<'a>(
        &'a self,
        symbol: &S,
        i: u64,
    ) -> impl Iterator<Item = PairPoint<u64>> + 'a {
        self.positions(symbol)
            .iter()
            .map(move |&j| PairPoint::new(i, j))
    }
}

/// Result of a randomized edit-distance run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EditEstimate {
    pub n: u64,
    /// Chain-defect estimate for the pair stream.
    pub est: u64,
    /// `|P|`, number of matching pairs streamed.
    pub pair_count: u64,
    /// Edit-distance estimate `est + n − |P|`, clamped to `[0, n]`.
    pub est_d: u64,
    pub peak_active: usize,
    pub fell_back: bool,
    pub space_cap: Option<u64>,
    pub k: u64,
}

/// Sketch parameters for the pair stream: `δ/k`, and `n·k` as the bound on
/// both stream length and total weight.
pub fn pair_params(n: u64, k: u64, delta: f64, gamma: f64, seed: u64) -> Result<AmdpParams> {
    // validate the user-facing delta before scaling it
    AmdpParams::new(delta, gamma, 1, seed)?;
    let k = k.max(1);
    let bound = (n * k).max(1);
    Ok(AmdpParams::new(delta / k as f64, gamma, bound, seed)?.with_n_bound(bound))
}

/// Streams `x` against an indexed `y`, pushing pairs into the sketch as they
/// are generated.
#[derive(Debug)]
pub struct EditSketch<'a, S> {
    index: &'a FixedStringIndex<S>,
    inner: AmdpSketch<PairPoint<u64>, Dominance>,
    seen: u64,
    pairs: u64,
}

impl<'a, S: Hash + Eq> EditSketch<'a, S> {
    pub fn new(index: &'a FixedStringIndex<S>, delta: f64, gamma: f64, seed: u64) -> Result<Self> {
        let params = pair_params(
            index.len() as u64,
            index.max_multiplicity() as u64,
            delta,
            gamma,
            seed,
        )?;
        Ok(Self::with_params(index, params))
    }

    pub fn with_params(index: &'a FixedStringIndex<S>, params: AmdpParams) -> Self {
        EditSketch {
            index,
            inner: AmdpSketch::new(params, Dominance),
            seen: 0,
            pairs: 0,
        }
    }

    pub fn push(&mut self, symbol: &S) -> Result<()> {
        self.seen += 1;
        if self.seen > self.index.len() as u64 {
            return Err(Error::LengthMismatch {
                x_len: self.seen as usize,
                y_len: self.index.len(),
            });
        }
        for pair in self.index.emit_pairs(symbol, self.seen) {
            self.inner.push(pair, 1)?;
            self.pairs += 1;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<EditEstimate> {
        let n = self.index.len() as u64;
        if self.seen != n {
            return Err(Error::LengthMismatch {
                x_len: self.seen as usize,
                y_len: self.index.len(),
            });
        }
        let est = self.inner.finish()?;
        let est_d = (est + n).saturating_sub(self.pairs).min(n);
        Ok(EditEstimate {
            n,
            est,
            pair_count: self.pairs,
            est_d,
            peak_active: self.inner.peak_active(),
            fell_back: self.inner.fell_back(),
            space_cap: self.inner.current_cap(),
            k: self.index.max_multiplicity() as u64,
        })
    }
}

/// One-pass additive-`δn` estimate of `E(x, y)` for equal-length strings,
/// never below the true distance.
pub fn estimate_edit_distance<'s, S, I>(
    x: I,
    y: &[S],
    delta: f64,
    gamma: f64,
    seed: u64,
) -> Result<EditEstimate>
where
    S: Hash + Eq + Clone + 's,
    I: IntoIterator<Item = &'s S>,
{
    let index = FixedStringIndex::build(y);
    estimate_with_index(x, &index, delta, gamma, seed)
}

/// Same as [`estimate_edit_distance`] but reuses a prebuilt index.
pub fn estimate_with_index<'s, S, I>(
    x: I,
    index: &FixedStringIndex<S>,
    delta: f64,
    gamma: f64,
    seed: u64,
) -> Result<EditEstimate>
where
    S: Hash + Eq + 's,
    I: IntoIterator<Item = &'s S>,
{
    let mut sketch = EditSketch::new(index, delta, gamma, seed)?;
    for s in x {
        sketch.push(s)?;
    }
    sketch.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{brute_force_dmin, exact_edit_distance_indel, exact_lcs_length};
    use crate::poset::WeightedSequence;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn index_examples() {
        let idx = FixedStringIndex::build(b"abc");
        assert_eq!(idx.max_multiplicity(), 1);
        assert_eq!(idx.distinct_symbols(), 3);
        assert_eq!(idx.positions(&b'b'), &[2]);

        let idx = FixedStringIndex::build(b"aaa");
        assert_eq!(idx.max_multiplicity(), 3);
        assert_eq!(idx.positions(&b'a'), &[1, 2, 3]);

        let idx = FixedStringIndex::build(b"baba");
        assert_eq!(idx.max_multiplicity(), 2);
        assert_eq!(idx.positions(&b'a'), &[2, 4]);
        assert_eq!(idx.positions(&b'b'), &[1, 3]);

        let idx = FixedStringIndex::<u8>::build(b"");
        assert_eq!(idx.max_multiplicity(), 0);
    }

    #[test]
    fn emit_pairs_examples() {
        let idx = FixedStringIndex::build(b"abc");
        assert_eq!(idx.emit_pairs(&b'z', 1).count(), 0);
        assert_eq!(
            idx.emit_pairs(&b'a', 7).collect::<Vec<_>>(),
            vec![PairPoint::new(7, 1)]
        );

        let idx = FixedStringIndex::build(b"baba");
        let pairs: Vec<_> = idx.emit_pairs(&b'a', 2).collect();
        assert_eq!(pairs, vec![PairPoint::new(2, 2), PairPoint::new(2, 4)]);
    }

    #[test]
    fn identical_permutations() {
        let y: Vec<u32> = (0..300).map(|i| (i * 17) % 300).collect();
        for seed in 0..10 {
            let est = estimate_edit_distance(&y, &y, 0.5, 0.1, seed).unwrap();
            assert_eq!(est.pair_count, 300);
            assert_eq!(est.est_d, 0);
        }
    }

    #[test]
    fn disjoint_alphabets() {
        let est = estimate_edit_distance(b"aaaa", b"bbbb", 0.5, 0.1, 0).unwrap();
        assert_eq!(est.pair_count, 0);
        assert_eq!(est.est, 0);
        assert_eq!(est.est_d, 4);
    }

    #[test]
    fn small_pair_example() {
        assert_eq!(exact_edit_distance_indel(b"abab", b"baba").unwrap(), 1);
        for seed in 0..50 {
            let est = estimate_edit_distance(b"abab", b"baba", 0.25, 0.1, seed).unwrap();
            assert_eq!(est.pair_count, 8);
            assert!((1..=2).contains(&est.est_d));
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        assert!(matches!(
            estimate_edit_distance(b"abc", b"ab", 0.5, 0.1, 0),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            estimate_edit_distance(b"a", b"ab", 0.5, 0.1, 0),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn delta_is_tightened_by_multiplicity() {
        let p = pair_params(100, 4, 0.5, 0.1, 0).unwrap();
        assert_eq!(p.delta(), 0.125);
        assert_eq!(p.rho_bound(), 400);
        assert_eq!(p.n_bound(), Some(400));
        assert!(pair_params(100, 4, 1.5, 0.1, 0).is_err());
    }

    #[test]
    fn pair_stream_is_lexicographic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let y: Vec<u8> = (0..40).map(|_| rng.gen_range(0..6)).collect();
        let x: Vec<u8> = (0..40).map(|_| rng.gen_range(0..6)).collect();
        let idx = FixedStringIndex::build(&y);
        let stream: Vec<_> = x
            .iter()
            .enumerate()
            .flat_map(|(i, s)| idx.emit_pairs(s, i as u64 + 1))
            .collect();
        for w in stream.windows(2) {
            assert!(w[0].first <= w[1].first);
            if w[0].first == w[1].first {
                assert!(w[0].second < w[1].second);
            }
        }
    }

    #[test]
    fn longest_pair_chain_is_lcs() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut checked = 0;
        while checked < 60 {
            let n = rng.gen_range(1..=7);
            let x: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            let y: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            let idx = FixedStringIndex::build(&y);
            let pairs: Vec<_> = x
                .iter()
                .enumerate()
                .flat_map(|(i, s)| idx.emit_pairs(s, i as u64 + 1))
                .collect();
            if pairs.len() > 20 {
                continue;
            }
            let total = pairs.len() as u64;
            let seq = WeightedSequence::unit(pairs);
            let longest = total - brute_force_dmin(&Dominance, &seq).unwrap();
            assert_eq!(longest as usize, exact_lcs_length(&x, &y));
            checked += 1;
        }
    }
}
