//! Deterministic `(1 + δ)`-approximate edit distance in `O(√(n ln n / δ))` space.
//!
//! `x` is cut into blocks of `n̄ = ⌊√(n ln n / δ)⌋` symbols. For each block
//! boundary `i·n̄` a geometric grid of anchors `S_i` is laid over `y`:
//!
//! ```text
//! S_i = { ⌊i·n̄ ± (1 + μ)^r⌋ : r ≥ 0 } ∪ { 0, i·n̄, n },   μ = ln(n) / n̄
//! ```
//!
//! clamped to `[0, n]`. A common subsequence is anchor-consistent when there
//! are anchors `0 = ℓ_0 ≤ ℓ_1 ≤ … ≤ ℓ_m = n` with `ℓ_b ∈ S_b` such that every
//! match made by block `b` of `x` lands in `y(ℓ_b + 1 ..= ℓ_{b+1})`. The
//! sketch keeps, for every anchor of the current boundary, the length of the
//! longest anchor-consistent common subsequence so far; the best of these is
//! never far below the true LCS, and the output `n − score` satisfies
//! `E ≤ output ≤ (1 + δ)·E`.

use std::ops::Range;

use crate::error::{invalid, Error, Result};
use crate::exact::{exact_lcs_length, LcsRow};

/// Anchor-grid geometry for strings of length `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorGrid {
    n: usize,
    block_len: usize,
    mu: f64,
}

impl AnchorGrid {
    pub fn build(n: usize, delta: f64) -> Result<Self> {
        if n < 2 {
            return Err(invalid("n", n, "anchor grids need n >= 2"));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(invalid("delta", delta, "must lie in (0, 1]"));
        }
        let ln_n = (n as f64).ln();
        let block_len = ((n as f64 * ln_n / delta).sqrt().floor() as usize).max(1);
        Ok(AnchorGrid {
            n,
            block_len,
            mu: ln_n / block_len as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `n̄`, the number of `x` symbols per block.
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Geometric growth rate `μ` of anchor offsets.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Number of `x` blocks; the last may be short.
    pub fn block_count(&self) -> usize {
        self.n.div_ceil(self.block_len)
    }

    /// 0-based `x` positions covered by block `b`.
    pub fn block_range(&self, b: usize) -> Range<usize> {
        let start = (b * self.block_len).min(self.n);
        start..(start + self.block_len).min(self.n)
    }

    /// Sorted anchors `S_i` for boundary `i`; `S_0 = {0}`.
    pub fn anchors(&self, i: usize) -> Vec<usize> {
        if i == 0 {
            return vec![0];
        }
        let n = self.n;
        let center = (i * self.block_len).min(n);
        let mut set = vec![0, center, n];
        let c = (i * self.block_len) as f64;
        let growth = 1.0 + self.mu;
        let mut offset = 1.0f64;
        loop {
            let up = (c + offset).floor();
            let down = (c - offset).floor();
            set.push(up.clamp(0.0, n as f64) as usize);
            set.push(down.clamp(0.0, n as f64) as usize);
            if down < 0.0 && up > n as f64 {
                break;
            }
            offset *= growth;
        }
        set.sort_unstable();
        set.dedup();
        set
    }

    /// Every anchor set `S_0 ..= S_m`, generated on demand.
    pub fn sets(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..=self.block_count()).map(move |i| self.anchors(i))
    }
}

/// Best anchor-consistent scores at one block boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchorScores {
    /// Boundary index `i`: the scores cover `x(1 ..= i·n̄)`.
    pub block: usize,
    /// Sorted anchors `S_i`.
    pub anchors: Vec<usize>,
    /// `scores[k]`: longest anchor-consistent common subsequence of the
    /// consumed prefix of `x` and `y(1 ..= anchors[k])`.
    pub scores: Vec<usize>,
}

impl AnchorScores {
    /// Scores before any of `x` is read.
    pub fn initial() -> Self {
        AnchorScores {
            block: 0,
            anchors: vec![0],
            scores: vec![0],
        }
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    /// Score at the largest anchor.
    pub fn best(&self) -> usize {
        self.scores.last().copied().unwrap_or(0)
    }
}

/// Counts simultaneously live working cells.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SpaceMeter {
    live: usize,
    peak: usize,
}

impl SpaceMeter {
    pub fn alloc(&mut self, cells: usize) {
        self.live += cells;
        self.peak = self.peak.max(self.live);
    }

    pub fn free(&mut self, cells: usize) {
        self.live -= cells;
    }

    pub fn live(&self) -> usize {
        self.live
    }

    pub fn peak(&self) -> usize {
        self.peak
    }
}

/// Extends the scores of boundary `i` across one block of `x` to boundary `i + 1`.
///
/// For each `j ∈ S_{i+1}`:
/// `new(j) = max { prev(j′) + LCS(x_block, y(j′+1 ..= j)) : j′ ∈ S_i, j′ ≤ j }`.
pub fn process_block<S: PartialEq + Clone>(
    prev: &AnchorScores,
    x_block: &[S],
    y: &[S],
    grid: &AnchorGrid,
) -> AnchorScores {
    process_block_metered(prev, x_block, y, grid, &mut SpaceMeter::default())
}

/// [`process_block`] that also reports its working cells to `meter`. The
/// caller is expected to have accounted for `prev` and `x_block` already.
pub fn process_block_metered<S: PartialEq + Clone>(
    prev: &AnchorScores,
    x_block: &[S],
    y: &[S],
    grid: &AnchorGrid,
    meter: &mut SpaceMeter,
) -> AnchorScores {
    let targets = grid.anchors(prev.block + 1);
    let width = x_block.len();

    // The block is held reversed so that streaming y backwards from j yields
    // LCS(x_block, y(j′+1 ..= j)) in the last cell for every j′ passed.
    let reversed: Vec<S> = x_block.iter().rev().cloned().collect();
    let mut row = LcsRow::new(&reversed);
    let scratch = reversed.len() + width + 1;
    meter.alloc(scratch);

    let mut scores = Vec::with_capacity(targets.len());
    meter.alloc(2 * targets.len());
    for &j in &targets {
        row.reset();
        let mut cursor = j;
        let mut best = 0;
        // anchors of S_i at or below j, scanned downward
        let upto = prev.anchors.partition_point(|&a| a <= j);
        for k in (0..upto).rev() {
            let (anchor, base) = (prev.anchors[k], prev.scores[k]);
            // scores only shrink further left, and a block adds at most `width`
            if base + width <= best {
                break;
            }
            if base + width.min(j - anchor) <= best {
                continue;
            }
            while cursor > anchor {
                row.push(&y[cursor - 1]);
                cursor -= 1;
            }
            best = best.max(base + row.full());
        }
        scores.push(best);
    }
    meter.free(scratch);
    meter.free(2 * targets.len());

    AnchorScores {
        block: prev.block + 1,
        anchors: targets,
        scores,
    }
}

/// Result of a deterministic edit-distance run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetEstimate {
    pub n: u64,
    /// Defect of the best anchor-consistent common subsequence.
    pub estimate: u64,
    pub block_len: usize,
    pub blocks: usize,
    /// Peak number of live cells: scores, the buffered block and scratch rows.
    pub peak_cells: usize,
}

/// Streaming deterministic estimator: buffers one block of `x` at a time.
#[derive(Debug)]
pub struct AnchorSketch<'y, S> {
    y: &'y [S],
    grid: Option<AnchorGrid>,
    scores: AnchorScores,
    buffer: Vec<S>,
    seen: usize,
    meter: SpaceMeter,
    // strings shorter than 2 are compared directly
    tiny: Vec<S>,
}

impl<'y, S: PartialEq + Clone> AnchorSketch<'y, S> {
    pub fn new(y: &'y [S], delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(invalid("delta", delta, "must lie in (0, 1]"));
        }
        let grid = if y.len() >= 2 {
            Some(AnchorGrid::build(y.len(), delta)?)
        } else {
            None
        };
        let mut meter = SpaceMeter::default();
        let scores = AnchorScores::initial();
        meter.alloc(2 * scores.len());
        Ok(AnchorSketch {
            y,
            grid,
            scores,
            buffer: Vec::new(),
            seen: 0,
            meter,
            tiny: Vec::new(),
        })
    }

    pub fn grid(&self) -> Option<&AnchorGrid> {
        self.grid.as_ref()
    }

    pub fn push(&mut self, symbol: S) -> Result<()> {
        self.seen += 1;
        if self.seen > self.y.len() {
            return Err(Error::LengthMismatch {
                x_len: self.seen,
                y_len: self.y.len(),
            });
        }
        let Some(grid) = &self.grid else {
            self.tiny.push(symbol);
            return Ok(());
        };
        self.buffer.push(symbol);
        self.meter.alloc(1);
        if self.buffer.len() == grid.block_len() {
            self.flush();
        }
        Ok(())
    }

    fn flush(&mut self) {
        let Some(grid) = &self.grid else { return };
        let next = process_block_metered(&self.scores, &self.buffer, self.y, grid, &mut self.meter);
        self.meter.free(self.buffer.len() + 2 * self.scores.len());
        self.meter.alloc(2 * next.len());
        self.scores = next;
        self.buffer.clear();
    }

    pub fn finish(mut self) -> Result<DetEstimate> {
        let n = self.y.len();
        if self.seen != n {
            return Err(Error::LengthMismatch {
                x_len: self.seen,
                y_len: n,
            });
        }
        let Some(grid) = self.grid.clone() else {
            let lcs = exact_lcs_length(&self.tiny, self.y);
            return Ok(DetEstimate {
                n: n as u64,
                estimate: (n - lcs) as u64,
                block_len: n.max(1),
                blocks: n,
                peak_cells: 2 * n + 1,
            });
        };
        if !self.buffer.is_empty() {
            self.flush();
        }
        debug_assert_eq!(self.scores.block, grid.block_count());
        debug_assert_eq!(self.scores.anchors.last(), Some(&n));
        Ok(DetEstimate {
            n: n as u64,
            estimate: (n - self.scores.best()) as u64,
            block_len: grid.block_len(),
            blocks: grid.block_count(),
            peak_cells: self.meter.peak(),
        })
    }
}

/// Deterministic estimate of `E(x, y)` for equal-length strings, within
/// `[E, (1 + δ)·E]`.
pub fn estimate_edit_distance_det<S, I>(x: I, y: &[S], delta: f64) -> Result<DetEstimate>
where
    S: PartialEq + Clone,
    I: IntoIterator<Item = S>,
{
    let mut sketch = AnchorSketch::new(y, delta)?;
    for s in x {
        sketch.push(s)?;
    }
    sketch.finish()
}
