//! Experiment records and their CSV form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

/// One trial of one estimator. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub algo: String,
    pub n: u64,
    pub delta: f64,
    pub gamma: Option<f64>,
    pub seed: u64,
    pub estimate: u64,
    pub exact: Option<u64>,
    /// `estimate / exact`, present only when `exact > 0`.
    pub ratio: Option<f64>,
    /// `estimate − exact`.
    pub additive_err: Option<i64>,
    pub peak_active: u64,
    pub fell_back: bool,
    pub wall_ns: u64,
}

impl ExperimentRecord {
    /// Fills `exact`, `ratio` and `additive_err` from a known exact value.
    pub fn with_exact(mut self, exact: u64) -> Self {
        self.exact = Some(exact);
        self.ratio = (exact > 0).then(|| self.estimate as f64 / exact as f64);
        self.additive_err = Some(self.estimate as i64 - exact as i64);
        self
    }
}

pub fn write_csv<W: Write>(records: &[ExperimentRecord], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    // an empty run still gets its header
    if records.is_empty() {
        w.write_record([
            "algo",
            "n",
            "delta",
            "gamma",
            "seed",
            "estimate",
            "exact",
            "ratio",
            "additive_err",
            "peak_active",
            "fell_back",
            "wall_ns",
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> csv::Result<Vec<ExperimentRecord>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
