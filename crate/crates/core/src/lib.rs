//! Streaming estimation of minimum chain defect over weighted sequences in a
//! partial order, with its two applications: distance to monotonicity of an
//! array and edit distance (insertions and deletions) between two strings.

pub mod amdp;
pub mod anchor;
pub mod cli;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod generate;
pub mod lcs_reduction;
pub mod lis;
pub mod poset;

pub use amdp::{run_sketch, AmdpOutcome, AmdpParams, AmdpSketch, CapPolicy};
pub use anchor::{estimate_edit_distance_det, AnchorGrid, AnchorSketch, DetEstimate};
pub use error::{Error, Result};
pub use exact::{
    brute_force_dmin, exact_dmin, exact_edit_distance_indel, exact_lcs_length, exact_lis_length,
};
pub use lcs_reduction::{estimate_edit_distance, EditEstimate, EditSketch, FixedStringIndex};
pub use lis::{estimate_dm, DmEstimate, DmSketch};
pub use poset::{ChainPath, Dominance, PairPoint, StrictOrder, TotalOrder, WeightedSequence};
