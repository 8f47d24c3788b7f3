//! Seeded instance generators for experiments and tests.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InstanceKind {
    /// A uniformly random permutation of `1..=n`.
    RandomPermutation,
    /// A permutation of `1..=n` hiding an increasing run of `⌈βn⌉` values at
    /// random positions; the remaining positions decrease, so no filler pair
    /// forms a chain and the LIS is at most `⌈βn⌉ + 1`.
    PlantedLis { beta: f64 },
    /// `n, n − 1, …, 1`.
    ReverseSorted,
    /// `y` uses each of `alphabet` symbols at most `k_cap` times. Each
    /// position of `x` is a fresh uniform symbol with probability `mutation`
    /// and a copy of `y` otherwise, so `mutation = 1` gives independent strings.
    StringPair {
        alphabet: u32,
        k_cap: u32,
        mutation: f64,
    },
    /// `x = y`, uniform over `alphabet` symbols.
    IdenticalPair { alphabet: u32 },
    /// `y` over symbols `0..alphabet` and `x` over `alphabet..2·alphabet`.
    DisjointPair { alphabet: u32 },
}

impl InstanceKind {
    pub fn name(&self) -> &'static str {
        match self {
            InstanceKind::RandomPermutation => "random-permutation",
            InstanceKind::PlantedLis { .. } => "planted-lis",
            InstanceKind::ReverseSorted => "reverse-sorted",
            InstanceKind::StringPair { .. } => "string-pair",
            InstanceKind::IdenticalPair { .. } => "identical-pair",
            InstanceKind::DisjointPair { .. } => "disjoint-pair",
        }
    }

    pub fn is_array(&self) -> bool {
        matches!(
            self,
            InstanceKind::RandomPermutation
                | InstanceKind::PlantedLis { .. }
                | InstanceKind::ReverseSorted
        )
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Kind names without their parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindName {
    RandomPermutation,
    PlantedLis,
    ReverseSorted,
    StringPair,
    IdenticalPair,
    DisjointPair,
}

impl FromStr for KindName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "random-permutation" => KindName::RandomPermutation,
            "planted-lis" => KindName::PlantedLis,
            "reverse-sorted" => KindName::ReverseSorted,
            "string-pair" => KindName::StringPair,
            "identical-pair" => KindName::IdenticalPair,
            "disjoint-pair" => KindName::DisjointPair,
            other => return Err(format!("unknown instance kind `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Array(Vec<i64>),
    Strings { x: Vec<u32>, y: Vec<u32> },
}

pub fn generate_instance(kind: &InstanceKind, n: usize, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = match *kind {
        InstanceKind::RandomPermutation => {
            let mut v: Vec<i64> = (1..=n as i64).collect();
            v.shuffle(&mut rng);
            Instance::Array(v)
        }
        InstanceKind::ReverseSorted => Instance::Array((1..=n as i64).rev().collect()),
        InstanceKind::PlantedLis { beta } => {
            if !(beta > 0.0 && beta <= 1.0) {
                return Err(invalid("beta", beta, "must lie in (0, 1]"));
            }
            let planted = ((beta * n as f64).ceil() as usize).min(n);
            Instance::Array(planted_permutation(&mut rng, n, planted))
        }
        InstanceKind::StringPair {
            alphabet,
            k_cap,
            mutation,
        } => {
            if alphabet == 0 || k_cap == 0 {
                return Err(invalid(
                    "alphabet",
                    alphabet,
                    "alphabet and k-cap must be positive",
                ));
            }
            if (alphabet as u64) * (k_cap as u64) < n as u64 {
                return Err(invalid(
                    "k_cap",
                    k_cap,
                    "alphabet * k-cap must be at least n",
                ));
            }
            if !(0.0..=1.0).contains(&mutation) {
                return Err(invalid("mutation", mutation, "must lie in [0, 1]"));
            }
            // uniform draws, redrawn once a symbol reaches its cap
            let mut counts: HashMap<u32, u32> = HashMap::new();
            let y: Vec<u32> = (0..n)
                .map(|_| loop {
                    let s = rng.gen_range(0..alphabet);
                    let c = counts.entry(s).or_insert(0);
                    if *c < k_cap {
                        *c += 1;
                        break s;
                    }
                })
                .collect();
            let x = y
                .iter()
                .map(|&s| {
                    if rng.gen::<f64>() < mutation {
                        rng.gen_range(0..alphabet)
                    } else {
                        s
                    }
                })
                .collect();
            Instance::Strings { x, y }
        }
        InstanceKind::IdenticalPair { alphabet } => {
            if alphabet == 0 {
                return Err(invalid("alphabet", alphabet, "must be positive"));
            }
            let y: Vec<u32> = (0..n).map(|_| rng.gen_range(0..alphabet)).collect();
            Instance::Strings { x: y.clone(), y }
        }
        InstanceKind::DisjointPair { alphabet } => {
            if alphabet == 0 {
                return Err(invalid("alphabet", alphabet, "must be positive"));
            }
            let y: Vec<u32> = (0..n).map(|_| rng.gen_range(0..alphabet)).collect();
            let x: Vec<u32> = (0..n)
                .map(|_| rng.gen_range(alphabet..2 * alphabet))
                .collect();
            Instance::Strings { x, y }
        }
    };
    Ok(inst)
}

fn planted_permutation(rng: &mut ChaCha8Rng, n: usize, planted: usize) -> Vec<i64> {
    let mut positions = index::sample(rng, n, planted).into_vec();
    positions.sort_unstable();
    let mut chosen = index::sample(rng, n, planted).into_vec();
    chosen.sort_unstable();
    let mut is_planted_value = vec![false; n];
    for &v in &chosen {
        is_planted_value[v] = true;
    }
    let mut filler = (0..n).filter(|&v| !is_planted_value[v]).rev();
    let mut planted_values = chosen.into_iter();
    let mut next_pos = positions.into_iter().peekable();
    (0..n)
        .map(|p| {
            let v = if next_pos.peek() == Some(&p) {
                next_pos.next();
                planted_values.next()
            } else {
                filler.next()
            };
            v.expect("value sets cover every position") as i64 + 1
        })
        .collect()
}
