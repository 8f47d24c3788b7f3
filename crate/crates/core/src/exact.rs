//! Exact reference computations used as ground truth for the estimators.

use crate::error::{Error, Result};
use crate::poset::{StrictOrder, WeightedSequence};

/// Largest input accepted by [`brute_force_dmin`].
pub const BRUTE_FORCE_MAX: usize = 20;

/// Full state of the quadratic minimum-defect recurrence.
///
/// Both vectors are indexed `0..=n+1`. Position 0 is a virtual element below
/// everything and position `n+1` a virtual element above everything with
/// weight 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDp {
    /// `best[t]`: minimum over chains ending at `t` of the weight of positions
    /// `1..t` left off the chain.
    pub best: Vec<u64>,
    /// `prefix[t]`: total weight of positions `1..=t`.
    pub prefix: Vec<u64>,
}

impl ExactDp {
    pub fn dmin(&self) -> u64 {
        *self
            .best
            .last()
            .expect("recurrence always has the sentinel entry")
    }
}

/// Runs the exact recurrence
/// `best[t] = min { best[i] + W(t-1) - W(i) : i < t, σ(i) < σ(t) }`
/// where position 0 precedes every element.
pub fn exact_dp<T, O>(order: &O, seq: &WeightedSequence<T>) -> ExactDp
where
    O: StrictOrder<T> + ?Sized,
{
    let n = seq.len();
    let mut prefix = Vec::with_capacity(n + 2);
    let mut best = Vec::with_capacity(n + 2);
    prefix.push(0);
    best.push(0);
    for t in 1..=n + 1 {
        let w = if t <= n { seq.weight(t) } else { 0 };
        let before = prefix[t - 1];
        prefix.push(before + w);
        // i = 0 always qualifies
        let mut s = before;
        for i in 1..t {
            if t > n || order.less(seq.element(i), seq.element(t)) {
                s = s.min(best[i] + before - prefix[i]);
            }
        }
        best.push(s);
    }
    ExactDp { best, prefix }
}

/// Minimum defect over all chains of `seq`.
pub fn exact_dmin<T, O>(order: &O, seq: &WeightedSequence<T>) -> u64
where
    O: StrictOrder<T> + ?Sized,
{
    exact_dp(order, seq).dmin()
}

/// Minimum defect by enumerating every subset of positions.
pub fn brute_force_dmin<T, O>(order: &O, seq: &WeightedSequence<T>) -> Result<u64>
where
    O: StrictOrder<T> + ?Sized,
{
    let n = seq.len();
    if n > BRUTE_FORCE_MAX {
        return Err(Error::TooLarge {
            len: n,
            max: BRUTE_FORCE_MAX,
        });
    }
    let mut heaviest = 0u64;
    'subsets: for mask in 1u32..(1u32 << n) {
        let mut last: Option<usize> = None;
        let mut weight = 0u64;
        for p in 0..n {
            if mask & (1 << p) == 0 {
                continue;
            }
            if let Some(q) = last {
                if !order.less(&seq.elements()[q], &seq.elements()[p]) {
                    continue 'subsets;
                }
            }
            weight += seq.weights()[p];
            last = Some(p);
        }
        heaviest = heaviest.max(weight);
    }
    Ok(seq.total_weight() - heaviest)
}

/// Length of the longest strictly increasing subsequence (patience sorting).
pub fn exact_lis_length<T: Ord>(values: &[T]) -> usize {
    // tops[k] is the smallest tail of an increasing run of length k + 1
    let mut tops: Vec<&T> = Vec::new();
    for v in values {
        let slot = tops.partition_point(|top| *top < v);
        if slot == tops.len() {
            tops.push(v);
        } else {
            tops[slot] = v;
        }
    }
    tops.len()
}

/// One row of the LCS table against a fixed string, advanced one streamed
/// symbol at a time.
///
/// After streaming `s_1 … s_i`, `row()[j]` is `LCS(s_1 … s_i, fixed[..j])`.
/// Memory is `fixed.len() + 1` cells regardless of how much is streamed.
#[derive(Debug, Clone)]
pub struct LcsRow<'a, S> {
    fixed: &'a [S],
    row: Vec<usize>,
}

impl<'a, S: PartialEq> LcsRow<'a, S> {
    pub fn new(fixed: &'a [S]) -> Self {
        LcsRow {
            fixed,
            row: vec![0; fixed.len() + 1],
        }
    }

    pub fn push(&mut self, symbol: &S) {
        let mut diag = 0;
        for (j, f) in self.fixed.iter().enumerate() {
            let up = self.row[j + 1];
            self.row[j + 1] = if f == symbol {
                diag + 1
            } else {
                up.max(self.row[j])
            };
            diag = up;
        }
    }

    pub fn row(&self) -> &[usize] {
        &self.row
    }

    /// LCS of everything streamed so far against the whole fixed string.
    pub fn full(&self) -> usize {
        self.row[self.fixed.len()]
    }

    pub fn reset(&mut self) {
        self.row.iter_mut().for_each(|c| *c = 0);
    }
}

/// LCS length of `x` and `y`, streaming `x` against `y` in `O(|y|)` space.
pub fn exact_lcs_length<S: PartialEq>(x: &[S], y: &[S]) -> usize {
    let mut row = LcsRow::new(y);
    for s in x {
        row.push(s);
    }
    row.full()
}

/// Insertion-deletion edit distance `n - LCS(x, y)` of two length-`n` strings.
pub fn exact_edit_distance_indel<S: PartialEq>(x: &[S], y: &[S]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            x_len: x.len(),
            y_len: y.len(),
        });
    }
    Ok(x.len() - exact_lcs_length(x, y))
}

/// One longest common subsequence as matched 1-based position pairs
/// `(i_k, j_k)` with `x[i_k] == y[j_k]`, increasing in both coordinates.
///
/// Uses the full quadratic table and backtracks from the end.
pub fn lcs_alignment<S: PartialEq>(x: &[S], y: &[S]) -> Vec<(usize, usize)> {
    let (n, m) = (x.len(), y.len());
    let width = m + 1;
    let mut table = vec![0usize; (n + 1) * width];
    for i in 1..=n {
        for j in 1..=m {
            table[i * width + j] = if x[i - 1] == y[j - 1] {
                table[(i - 1) * width + j - 1] + 1
            } else {
                table[(i - 1) * width + j].max(table[i * width + j - 1])
            };
        }
    }
    let mut pairs = Vec::with_capacity(table[n * width + m]);
    let (mut i, mut j) = (n, m);
    while i > 0 && j > 0 {
        if x[i - 1] == y[j - 1] && table[i * width + j] == table[(i - 1) * width + j - 1] + 1 {
            pairs.push((i, j));
            i -= 1;
            j -= 1;
        } else if table[(i - 1) * width + j] >= table[i * width + j - 1] {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    pairs.reverse();
    pairs
}
