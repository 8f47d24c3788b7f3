//! Strict partial orders, weighted element sequences, and chain defects.
//!
//! Stream positions are 1-based throughout the crate: position `t` is the
//! `t`-th item pushed, and position 0 is reserved for a virtual element that
//! lies below everything.

use crate::error::{Error, Result};

/// A strict partial order supplied as a comparison oracle.
///
/// Implementations must be irreflexive, asymmetric and transitive. Nothing
/// else about the elements is assumed; in particular equality is never used.
pub trait StrictOrder<T: ?Sized> {
    /// Returns `true` iff `a` lies strictly below `b`.
    fn less(&self, a: &T, b: &T) -> bool;
}

impl<T: ?Sized, F> StrictOrder<T> for F
where
    F: Fn(&T, &T) -> bool,
{
    fn less(&self, a: &T, b: &T) -> bool {
        self(a, b)
    }
}

/// The `<` relation of a totally ordered type.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TotalOrder;

impl<T: Ord + ?Sized> StrictOrder<T> for TotalOrder {
    fn less(&self, a: &T, b: &T) -> bool {
        a < b
    }
}

/// A point in the plane: a stream position (or any integer key) paired with a
/// totally ordered value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairPoint<V = i64> {
    pub first: u64,
    pub second: V,
}

impl<V> PairPoint<V> {
    pub fn new(first: u64, second: V) -> Self {
        PairPoint { first, second }
    }
}

/// Strict coordinatewise dominance: `(a, b) < (c, d)` iff `a < c` and `b < d`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Dominance;

impl<V: Ord> StrictOrder<PairPoint<V>> for Dominance {
    fn less(&self, a: &PairPoint<V>, b: &PairPoint<V>) -> bool {
        a.first < b.first && a.second < b.second
    }
}

/// A finite sequence of poset elements, each carrying a positive integer weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedSequence<T> {
    elements: Vec<T>,
    weights: Vec<u64>,
    total: u64,
}

impl<T> WeightedSequence<T> {
    /// Builds a weighted sequence. Every weight must be at least 1 and the
    /// total must fit in a `u64`.
    pub fn new(elements: Vec<T>, weights: Vec<u64>) -> Result<Self> {
        if elements.len() != weights.len() {
            return Err(Error::WeightCountMismatch {
                elements: elements.len(),
                weights: weights.len(),
            });
        }
        let mut total: u64 = 0;
        for (i, &w) in weights.iter().enumerate() {
            if w == 0 {
                return Err(Error::ZeroWeight { position: i + 1 });
            }
            total = total.checked_add(w).ok_or(Error::WeightOverflow)?;
        }
        Ok(WeightedSequence {
            elements,
            weights,
            total,
        })
    }

    /// Every element gets weight 1.
    pub fn unit(elements: Vec<T>) -> Self {
        let n = elements.len();
        WeightedSequence {
            elements,
            weights: vec![1; n],
            total: n as u64,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[T] {
        &self.elements
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    /// Total weight of the sequence.
    pub fn total_weight(&self) -> u64 {
        self.total
    }

    /// Element at 1-based `position`.
    pub fn element(&self, position: usize) -> &T {
        &self.elements[position - 1]
    }

    /// Weight at 1-based `position`.
    pub fn weight(&self, position: usize) -> u64 {
        self.weights[position - 1]
    }

    /// Iterates over `(element, weight)` pairs in stream order.
    pub fn iter(&self) -> impl Iterator<Item = (&T, u64)> + '_ {
        self.elements.iter().zip(self.weights.iter().copied())
    }

    /// Total weight of the positions not on `path`.
    pub fn defect(&self, path: &ChainPath) -> u64 {
        let on_path: u64 = path.indices.iter().map(|&p| self.weight(p)).sum();
        self.total - on_path
    }
}

/// A validated chain: strictly increasing 1-based positions whose elements
/// increase under the order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChainPath {
    indices: Vec<usize>,
}

impl ChainPath {
    pub fn new<T, O>(order: &O, seq: &WeightedSequence<T>, indices: Vec<usize>) -> Result<Self>
    where
        O: StrictOrder<T> + ?Sized,
    {
        check_chain(order, seq, &indices)?;
        Ok(ChainPath { indices })
    }

    /// The empty chain, whose defect is the total weight.
    pub fn empty() -> Self {
        ChainPath::default()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

fn check_chain<T, O>(order: &O, seq: &WeightedSequence<T>, indices: &[usize]) -> Result<()>
where
    O: StrictOrder<T> + ?Sized,
{
    for &p in indices {
        if p == 0 || p > seq.len() {
            return Err(Error::IndexOutOfRange {
                index: p,
                len: seq.len(),
            });
        }
    }
    for pair in indices.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a >= b || !order.less(seq.element(a), seq.element(b)) {
            return Err(Error::NotAChain { from: a, to: b });
        }
    }
    Ok(())
}

/// Defect of the chain at `indices`: the total weight of every other position.
pub fn defect_of<T, O>(order: &O, seq: &WeightedSequence<T>, indices: &[usize]) -> Result<u64>
where
    O: StrictOrder<T> + ?Sized,
{
    check_chain(order, seq, indices)?;
    let on_path: u64 = indices.iter().map(|&p| seq.weight(p)).sum();
    Ok(seq.total_weight() - on_path)
}

/// Whether `indices` strictly increase and successive elements increase under
/// `order`. Malformed input (out-of-range positions) yields `false`.
pub fn is_chain<T, O>(order: &O, seq: &WeightedSequence<T>, indices: &[usize]) -> bool
where
    O: StrictOrder<T> + ?Sized,
{
    check_chain(order, seq, indices).is_ok()
}
