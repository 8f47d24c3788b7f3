//! One-pass randomized estimation of the minimum chain defect.
//!
//! The sketch follows the exact recurrence of [`crate::exact::exact_dp`], but
//! only remembers `(element, prefix weight, estimate)` for an evolving active
//! set of positions. After each step, a remembered position `i` survives with
//! probability `q(i, t) / q(i, t - 1)`, where
//!
//! ```text
//! q(i, t) = min { 1, (1 + δ)/δ · ln(4t³/γ) · w(i) / (W(t) − W(i − 1)) }
//! ```
//!
//! so that position `i` is still active at time `t` with probability exactly
//! `q(i, t)`. Remembered density therefore decays roughly like `1/(t − i)`
//! going back in time, which keeps the active set polylogarithmic while the
//! estimate stays within `(1 + δ)` of the minimum defect with probability at
//! least `1 − γ`. The estimate never undershoots.
//!
//! If the active set ever grows past
//! `⌈2e²/δ · ln(2ρ) · ln(4n³/γ)⌉` the sketch falls back to reporting the
//! total stream weight, which is a valid (if poor) upper bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::poset::StrictOrder;

/// Probabilities this close to 1 are treated as exactly 1.
const ONE_EPS: f64 = 1e-12;

/// Parameters of an [`AmdpSketch`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmdpParams {
    delta: f64,
    gamma: f64,
    rho_bound: u64,
    n_bound: Option<u64>,
    seed: u64,
    cap: CapPolicy,
}

/// How the active-set cap is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapPolicy {
    /// `⌈2e²/δ · ln(2ρ) · ln(4n³/γ)⌉`, using the declared length when known
    /// and the running length otherwise.
    Theoretical,
    /// A fixed cap chosen by the caller.
    Fixed(u64),
    /// No cap; the fallback never engages.
    Disabled,
}

impl AmdpParams {
    /// `delta` in `(0, 1]`, `gamma` in `(0, 1)`, `rho_bound >= 1` bounds the
    /// total stream weight.
    pub fn new(delta: f64, gamma: f64, rho_bound: u64, seed: u64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(invalid("delta", delta, "must lie in (0, 1]"));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(invalid("gamma", gamma, "must lie in (0, 1)"));
        }
        if rho_bound == 0 {
            return Err(invalid("rho_bound", rho_bound, "must be at least 1"));
        }
        Ok(AmdpParams {
            delta,
            gamma,
            rho_bound,
            n_bound: None,
            seed,
            cap: CapPolicy::Theoretical,
        })
    }

    /// Declares the stream length up front, fixing the space cap.
    pub fn with_n_bound(mut self, n: u64) -> Self {
        self.n_bound = Some(n);
        self
    }

    /// Disables the fallback: the active set may grow without limit.
    pub fn without_space_cap(mut self) -> Self {
        self.cap = CapPolicy::Disabled;
        self
    }

    /// Replaces the theoretical cap with a fixed one.
    pub fn with_space_cap(mut self, cap: u64) -> Self {
        self.cap = CapPolicy::Fixed(cap);
        self
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rho_bound(&self) -> u64 {
        self.rho_bound
    }

    pub fn n_bound(&self) -> Option<u64> {
        self.n_bound
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn cap_policy(&self) -> CapPolicy {
        self.cap
    }

    /// `(1 + δ)/δ · ln(4t³/γ)`, the numerator of `q(·, t)` per unit weight.
    fn scale(&self, t: u64) -> f64 {
        let t = t as f64;
        (1.0 + self.delta) / self.delta * (4.0 * t * t * t / self.gamma).ln()
    }

    /// Real-valued space bound `2e²/δ · ln(2ρ) · ln(4n³/γ)` for stream length `n`.
    pub fn space_bound(&self, n: u64) -> f64 {
        let n = n.max(1) as f64;
        let e2 = std::f64::consts::E * std::f64::consts::E;
        2.0 * e2 / self.delta
            * (2.0 * self.rho_bound as f64).ln()
            * (4.0 * n * n * n / self.gamma).ln()
    }

    /// Integer active-set cap for stream length `n`.
    pub fn space_cap_for(&self, n: u64) -> u64 {
        self.space_bound(n).ceil() as u64
    }

    /// The cap in force once `seen` items have arrived, or `None` when uncapped.
    pub fn space_cap_at(&self, seen: u64) -> Option<u64> {
        match self.cap {
            CapPolicy::Disabled => None,
            CapPolicy::Fixed(cap) => Some(cap),
            CapPolicy::Theoretical => Some(self.space_cap_for(self.n_bound.unwrap_or(seen))),
        }
    }
}

/// Weight bookkeeping for one stream position `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ItemWeight {
    /// The 1-based position `i`.
    pub index: u64,
    /// `w(i)`.
    pub weight: u64,
    /// `W(i − 1)`, total weight strictly before `i`.
    pub prefix_before: u64,
}

/// Probability that position `item.index` is still remembered at time `t`,
/// given `prefix_now = W(t)`.
pub fn retention_prob(
    params: &AmdpParams,
    item: ItemWeight,
    t: u64,
    prefix_now: u64,
) -> Result<f64> {
    if item.index == 0 || item.index > t {
        return Err(invalid("t", t, "must satisfy 1 <= i <= t"));
    }
    if item.weight == 0 {
        return Err(Error::ZeroWeight {
            position: item.index as usize,
        });
    }
    if prefix_now <= item.prefix_before {
        return Err(invalid(
            "prefix_now",
            prefix_now,
            "must exceed the prefix weight before the item",
        ));
    }
    Ok(retention_unchecked(params.scale(t), item, prefix_now))
}

fn retention_unchecked(scale: f64, item: ItemWeight, prefix_now: u64) -> f64 {
    let q = scale * item.weight as f64 / (prefix_now - item.prefix_before) as f64;
    q.min(1.0)
}

/// Probability that a position remembered after step `t − 1` survives step `t`:
/// 1 when `t` is the item's own step, otherwise `q(i, t) / q(i, t − 1)`.
/// `prefix_prev` and `prefix_now` are `W(t − 1)` and `W(t)`.
pub fn keep_prob(
    params: &AmdpParams,
    item: ItemWeight,
    t: u64,
    prefix_prev: u64,
    prefix_now: u64,
) -> Result<f64> {
    if t < item.index {
        return Err(invalid("t", t, "must not precede the item"));
    }
    if t == item.index {
        return Ok(1.0);
    }
    if prefix_now < prefix_prev {
        return Err(invalid(
            "prefix_now",
            prefix_now,
            "prefix weights must not decrease",
        ));
    }
    let now = retention_prob(params, item, t, prefix_now)?;
    let prev = retention_prob(params, item, t - 1, prefix_prev)?;
    Ok(clamp_ratio(now / prev))
}

fn clamp_ratio(p: f64) -> f64 {
    if p >= 1.0 - ONE_EPS {
        1.0
    } else {
        p
    }
}

/// A remembered stream position.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveRecord<T> {
    pub index: u64,
    pub element: T,
    pub weight: u64,
    /// `W(i)`, total weight up to and including this position.
    pub prefix_weight: u64,
    /// `r(i)`, the running defect estimate for chains ending here.
    pub estimate: u64,
}

impl<T> ActiveRecord<T> {
    fn item(&self) -> ItemWeight {
        ItemWeight {
            index: self.index,
            weight: self.weight,
            prefix_before: self.prefix_weight - self.weight,
        }
    }
}

/// Streaming minimum-defect estimator.
///
/// The virtual position 0 (below every element, estimate 0, prefix weight 0)
/// is always remembered and counts towards [`active_len`](Self::active_len).
#[derive(Debug, Clone)]
pub struct AmdpSketch<T, O> {
    params: AmdpParams,
    order: O,
    records: Vec<ActiveRecord<T>>,
    time: u64,
    total: u64,
    fell_back: bool,
    finished: bool,
    peak: usize,
    rng: ChaCha8Rng,
}

impl<T, O: StrictOrder<T>> AmdpSketch<T, O> {
    pub fn new(params: AmdpParams, order: O) -> Self {
        AmdpSketch {
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            params,
            order,
            records: Vec::new(),
            time: 0,
            total: 0,
            fell_back: false,
            finished: false,
            peak: 1,
        }
    }

    pub fn params(&self) -> &AmdpParams {
        &self.params
    }

    /// Number of items pushed so far.
    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn total_weight(&self) -> u64 {
        self.total
    }

    pub fn fell_back(&self) -> bool {
        self.fell_back
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    /// Current active-set size including the virtual position 0; zero once
    /// the fallback has engaged.
    pub fn active_len(&self) -> usize {
        if self.fell_back {
            0
        } else {
            self.records.len() + 1
        }
    }

    /// Largest active-set size observed so far.
    pub fn peak_active(&self) -> usize {
        self.peak
    }

    /// Remembered positions `>= 1`, in increasing order.
    pub fn active_records(&self) -> &[ActiveRecord<T>] {
        &self.records
    }

    pub fn is_active(&self, index: u64) -> bool {
        if index == 0 {
            return !self.fell_back;
        }
        self.records
            .binary_search_by_key(&index, |r| r.index)
            .is_ok()
    }

    /// Cap in force at the current step, or `None` when uncapped.
    pub fn current_cap(&self) -> Option<u64> {
        self.params.space_cap_at(self.time.max(1))
    }

    /// Consumes one stream item. Returns the estimate `r(t)` for the new
    /// position, or `None` once the fallback has engaged.
    pub fn push(&mut self, element: T, weight: u64) -> Result<Option<u64>> {
        if self.finished {
            return Err(Error::AlreadyFinished);
        }
        if weight == 0 {
            return Err(Error::ZeroWeight {
                position: self.time as usize + 1,
            });
        }
        if let Some(n) = self.params.n_bound {
            if self.time >= n {
                return Err(Error::BoundExceeded {
                    what: "stream length",
                    bound: n,
                });
            }
        }
        let prev_total = self.total;
        let total = prev_total
            .checked_add(weight)
            .filter(|&w| w <= self.params.rho_bound)
            .ok_or(Error::BoundExceeded {
                what: "total weight",
                bound: self.params.rho_bound,
            })?;
        self.time += 1;
        self.total = total;
        let t = self.time;

        if self.fell_back {
            return Ok(None);
        }

        // position 0 contributes r(0) + W(t-1) - W(0)
        let mut estimate = prev_total;
        for rec in &self.records {
            if self.order.less(&rec.element, &element) {
                estimate = estimate.min(rec.estimate + prev_total - rec.prefix_weight);
            }
        }

        let scale_now = self.params.scale(t);
        let scale_prev = self.params.scale(t - 1);
        let rng = &mut self.rng;
        self.records.retain(|rec| {
            let item = rec.item();
            let now = retention_unchecked(scale_now, item, total);
            if now >= 1.0 {
                return true;
            }
            let prev = retention_unchecked(scale_prev, item, prev_total);
            let p = clamp_ratio(now / prev);
            p >= 1.0 || rng.gen::<f64>() < p
        });

        self.records.push(ActiveRecord {
            index: t,
            element,
            weight,
            prefix_weight: total,
            estimate,
        });

        let len = self.records.len() + 1;
        self.peak = self.peak.max(len);
        if let Some(cap) = self.current_cap() {
            if len as u64 > cap {
                self.records = Vec::new();
                self.fell_back = true;
            }
        }
        Ok(Some(estimate))
    }

    /// Final estimate: `r(n + 1)` for a virtual element above everything, or
    /// the total weight if the fallback engaged. Never below the true
    /// minimum defect.
    pub fn finish(&mut self) -> Result<u64> {
        if self.finished {
            return Err(Error::AlreadyFinished);
        }
        self.finished = true;
        if self.fell_back {
            return Ok(self.total);
        }
        let total = self.total;
        Ok(self
            .records
            .iter()
            .map(|rec| rec.estimate + total - rec.prefix_weight)
            .fold(total, u64::min))
    }
}

/// Summary of a completed sketch run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmdpOutcome {
    pub estimate: u64,
    pub peak_active: usize,
    pub fell_back: bool,
    pub space_cap: Option<u64>,
}

/// Runs a fresh sketch over `items` and finishes it.
pub fn run_sketch<T, O, I>(params: AmdpParams, order: O, items: I) -> Result<AmdpOutcome>
where
    O: StrictOrder<T>,
    I: IntoIterator<Item = (T, u64)>,
{
    let mut sketch = AmdpSketch::new(params, order);
    for (element, weight) in items {
        sketch.push(element, weight)?;
    }
    let estimate = sketch.finish()?;
    Ok(AmdpOutcome {
        estimate,
        peak_active: sketch.peak_active(),
        fell_back: sketch.fell_back(),
        space_cap: sketch.current_cap(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{exact_dmin, exact_dp};
    use crate::poset::{TotalOrder, WeightedSequence};

    fn params(delta: f64, gamma: f64, rho: u64, seed: u64) -> AmdpParams {
        AmdpParams::new(delta, gamma, rho, seed).unwrap()
    }

    fn unit(index: u64) -> ItemWeight {
        ItemWeight {
            index,
            weight: 1,
            prefix_before: index - 1,
        }
    }

    #[test]
    fn parameters_are_validated() {
        assert!(AmdpParams::new(0.0, 0.5, 1, 0).is_err());
        assert!(AmdpParams::new(1.5, 0.5, 1, 0).is_err());
        assert!(AmdpParams::new(f64::NAN, 0.5, 1, 0).is_err());
        assert!(AmdpParams::new(1.0, 1.0, 1, 0).is_err());
        assert!(AmdpParams::new(1.0, 0.0, 1, 0).is_err());
        assert!(AmdpParams::new(1.0, 0.5, 0, 0).is_err());
        assert!(AmdpParams::new(1.0, 0.5, 1, 0).is_ok());
    }

    #[test]
    fn retention_is_one_at_insertion() {
        for &(delta, gamma) in &[(1.0, 0.99), (0.01, 0.5), (1.0, 1e-9)] {
            let p = params(delta, gamma, 100, 0);
            for t in 1..50 {
                let item = ItemWeight {
                    index: t,
                    weight: 3,
                    prefix_before: 3 * (t - 1),
                };
                assert_eq!(retention_prob(&p, item, t, 3 * t).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn retention_examples() {
        let p = params(1.0, 0.5, 1000, 0);
        assert_eq!(retention_prob(&p, unit(1), 10, 10).unwrap(), 1.0);
        let expected = 2.0 * (4.0e6f64 / 0.5).ln() / 100.0;
        let q = retention_prob(&p, unit(1), 100, 100).unwrap();
        assert!((q - expected).abs() < 1e-12);
        assert!((q - 0.3177).abs() < 5e-4);
    }

    #[test]
    fn retention_rejects_bad_windows() {
        let p = params(1.0, 0.5, 1000, 0);
        let item = ItemWeight {
            index: 3,
            weight: 1,
            prefix_before: 5,
        };
        assert!(retention_prob(&p, item, 4, 5).is_err());
        assert!(retention_prob(&p, item, 2, 9).is_err());
    }

    #[test]
    fn keep_prob_examples() {
        let p = params(1.0, 0.5, 1000, 0);
        assert_eq!(keep_prob(&p, unit(7), 7, 6, 7).unwrap(), 1.0);
        assert_eq!(keep_prob(&p, unit(1), 5, 4, 5).unwrap(), 1.0);
        let ratio = (2.0 * (4.0 * 101f64.powi(3) / 0.5).ln() / 101.0)
            / (2.0 * (4.0e6f64 / 0.5).ln() / 100.0);
        let k = keep_prob(&p, unit(1), 101, 100, 101).unwrap();
        assert!((k - ratio).abs() < 1e-12);
        assert!(k < 1.0);
        assert!(keep_prob(&p, unit(5), 4, 3, 4).is_err());
    }

    #[test]
    fn retention_never_increases_over_time() {
        let p = params(0.3, 0.1, 10_000, 0);
        let weights: Vec<u64> = (0..300).map(|i| 1 + (i * 7 % 5)).collect();
        let mut prefix = vec![0u64];
        for w in &weights {
            prefix.push(prefix.last().unwrap() + w);
        }
        for i in 1..=weights.len() as u64 {
            let item = ItemWeight {
                index: i,
                weight: weights[i as usize - 1],
                prefix_before: prefix[i as usize - 1],
            };
            let mut last = 1.0;
            for t in i..=weights.len() as u64 {
                let q = retention_prob(&p, item, t, prefix[t as usize]).unwrap();
                assert!(q <= last, "q({i},{t}) rose");
                last = q;
            }
        }
    }

    #[test]
    fn first_push_and_fresh_sketch() {
        let mut s = AmdpSketch::new(params(0.5, 0.1, 10, 1), TotalOrder);
        assert_eq!(s.peak_active(), 1);
        assert_eq!(s.active_len(), 1);
        assert_eq!(s.push(5, 1).unwrap(), Some(0));
        assert_eq!(s.active_len(), 2);
        assert_eq!(s.peak_active(), 2);
        assert!(s.is_active(0) && s.is_active(1));
    }

    #[test]
    fn empty_stream_finishes_at_zero() {
        let mut s = AmdpSketch::<i64, _>::new(params(0.5, 0.1, 1, 1), TotalOrder);
        assert_eq!(s.finish().unwrap(), 0);
        assert_eq!(s.finish(), Err(Error::AlreadyFinished));
        assert_eq!(s.push(1, 1), Err(Error::AlreadyFinished));
    }

    #[test]
    fn zero_weight_rejected() {
        let mut s = AmdpSketch::new(params(0.5, 0.1, 10, 1), TotalOrder);
        s.push(1, 1).unwrap();
        assert_eq!(s.push(2, 0), Err(Error::ZeroWeight { position: 2 }));
    }

    #[test]
    fn bounds_are_enforced() {
        let mut s = AmdpSketch::new(params(0.5, 0.1, 3, 1).with_n_bound(2), TotalOrder);
        s.push(1, 1).unwrap();
        assert!(matches!(s.push(2, 3), Err(Error::BoundExceeded { .. })));
        s.push(2, 2).unwrap();
        assert!(matches!(s.push(3, 1), Err(Error::BoundExceeded { .. })));
    }

    #[test]
    fn reverse_stream_estimates_dominate_exact() {
        let exact = exact_dp(&TotalOrder, &WeightedSequence::unit(vec![3, 2, 1]));
        assert_eq!(&exact.best[..4], &[0, 0, 1, 2]);
        for seed in 0..50 {
            let mut s = AmdpSketch::new(params(0.5, 0.1, 3, seed).with_n_bound(3), TotalOrder);
            for (t, v) in [3, 2, 1].into_iter().enumerate() {
                let r = s.push(v, 1).unwrap().unwrap();
                assert!(r >= exact.best[t + 1]);
            }
            let out = s.finish().unwrap();
            assert!((2..=3).contains(&out));
        }
    }

    #[test]
    fn sorted_stream_estimates_zero() {
        // the previous position always survives, so the chain never breaks
        for seed in 0..20 {
            let out = run_sketch(
                params(0.5, 0.1, 200, seed).with_n_bound(200),
                TotalOrder,
                (0..200i64).map(|v| (v, 1)),
            )
            .unwrap();
            assert_eq!(out.estimate, 0);
        }
    }

    #[test]
    fn fallback_accumulates_total_weight() {
        let p = params(0.5, 0.1, 1_000, 3).with_space_cap(4);
        let mut s = AmdpSketch::new(p, TotalOrder);
        for v in 1..=3 {
            assert!(s.push(v, 1).unwrap().is_some());
        }
        assert!(!s.fell_back());
        assert_eq!(s.active_len(), 4);
        // the fifth active entry trips the cap
        assert_eq!(s.push(4, 1).unwrap(), Some(0));
        assert!(s.fell_back());
        assert_eq!(s.peak_active(), 5);
        assert_eq!(s.active_len(), 0);
        assert!(!s.is_active(0));

        let before = s.total_weight();
        assert_eq!(s.push(6, 4).unwrap(), None);
        assert_eq!(s.total_weight(), before + 4);
        assert_eq!(s.active_records().len(), 0);
        assert_eq!(s.peak_active(), 5);
        assert_eq!(s.finish().unwrap(), before + 4);
    }

    #[test]
    fn theoretical_cap_formula() {
        let p = params(0.5, 0.1, 2000, 0).with_n_bound(2000);
        let e2 = std::f64::consts::E.powi(2);
        let direct = 2.0 * e2 / 0.5 * (4000f64).ln() * (4.0 * 2000f64.powi(3) / 0.1).ln();
        assert_eq!(p.space_cap_at(5), Some(direct.ceil() as u64));
        assert_eq!(p.without_space_cap().space_cap_at(5), None);
        // without a declared length the cap follows the running length
        let q = params(0.5, 0.1, 2000, 0);
        assert!(q.space_cap_at(10).unwrap() < q.space_cap_at(1000).unwrap());
    }

    #[test]
    fn capped_runs_respect_cap() {
        for seed in 0..10 {
            let p = params(0.2, 0.1, 400, seed)
                .with_n_bound(400)
                .with_space_cap(40);
            let mut s = AmdpSketch::new(p, TotalOrder);
            for v in (0..400).rev() {
                s.push(v, 1).unwrap();
                assert!(s.active_len() <= 41);
            }
            assert!(s.peak_active() <= 41);
            assert!(s.fell_back());
            assert_eq!(s.finish().unwrap(), 400);
        }
    }

    #[test]
    fn identical_seeds_reproduce() {
        let values: Vec<i64> = (0..500).map(|i| (i * 7919) % 503).collect();
        let run = |seed| {
            run_sketch(
                params(0.3, 0.1, 500, seed).with_n_bound(500),
                TotalOrder,
                values.iter().map(|&v| (v, 1)),
            )
            .unwrap()
        };
        assert_eq!(run(9), run(9));
        let exact = exact_dmin(&TotalOrder, &WeightedSequence::unit(values.clone()));
        assert!(run(9).estimate >= exact);
    }
}
