//! Synthetic three-hadron event sample and a selection/histogram analysis
//! over it.
//!
//! Each event carries momenta, particle-identification probabilities and a
//! muon flag for three hadrons, plus a variable-length list of detector hit
//! ids. Distributions: momenta ~ Normal(0, 5), probabilities ~ Uniform[0, 1),
//! muon flag ~ Bernoulli(0.1), hit count ~ Binomial(8, 0.5) with hit ids
//! uniform in [0, 4096).

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Binomial, Distribution, Normal};

use crate::encoding::ColumnData;
use crate::error::{Error, Result};
use crate::location::{Location, SinkOptions};
use crate::ntuple::{NTupleReader, NTupleWriter, Value, WriteSummary, WriterOptions};
use crate::objstore::ObjectStore;
use crate::schema::{FieldType, Schema};
use crate::wire::fnv1a64;

pub const DATASET_NAME: &str = "DecayTree";

pub const N_HADRONS: usize = 3;
pub const MAX_HITS: u64 = 8;

pub const HIST_BINS: usize = 100;
pub const HIST_MIN: f64 = 0.0;
pub const HIST_MAX: f64 = 300.0;

/// One event. Field order matches [`schema`].
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub hadrons: [Hadron; N_HADRONS],
    pub hits: Vec<i32>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hadron {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
    pub prob_k: f64,
    pub prob_pi: f64,
    pub is_muon: i32,
}

impl Hadron {
    pub fn momentum(&self) -> f64 {
        (self.px * self.px + self.py * self.py + self.pz * self.pz).sqrt()
    }
}

const HADRON_MEMBERS: [(&str, FieldType); 6] = [
    ("PX", FieldType::Float64),
    ("PY", FieldType::Float64),
    ("PZ", FieldType::Float64),
    ("ProbK", FieldType::Float64),
    ("ProbPi", FieldType::Float64),
    ("isMuon", FieldType::Int32),
];

/// `H1_PX … H3_isMuon` (18 scalar fields) and `hits: vector<int32>`; 20 columns.
pub fn schema() -> Schema {
    let mut schema = Schema::default();
    for h in 1..=N_HADRONS {
        for (member, ty) in &HADRON_MEMBERS {
            schema = schema.with(format!("H{h}_{member}"), ty.clone());
        }
    }
    schema.with("hits", FieldType::vector(FieldType::Int32))
}

/// Fields read by [`run_analysis`]: momenta and muon flags of each hadron.
pub fn analysis_fields() -> Vec<String> {
    (1..=N_HADRONS)
        .flat_map(|h| ["PX", "PY", "PZ", "isMuon"].map(|m| format!("H{h}_{m}")))
        .collect()
}

impl Event {
    pub fn to_entry(&self) -> Vec<Value> {
        let mut entry = Vec::with_capacity(N_HADRONS * HADRON_MEMBERS.len() + 1);
        for h in &self.hadrons {
            entry.extend([
                Value::Float64(h.px),
                Value::Float64(h.py),
                Value::Float64(h.pz),
                Value::Float64(h.prob_k),
                Value::Float64(h.prob_pi),
                Value::Int32(h.is_muon),
            ]);
        }
        entry.push(Value::Vector(self.hits.iter().map(|&x| Value::Int32(x)).collect()));
        entry
    }
}

/// Deterministic event source: the same seed always yields the same sequence.
pub struct EventGenerator {
    rng: ChaCha8Rng,
    momentum: Normal<f64>,
    muon: Bernoulli,
    n_hits: Binomial,
}

impl EventGenerator {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            momentum: Normal::new(0.0, 5.0).expect("valid normal"),
            muon: Bernoulli::new(0.1).expect("valid bernoulli"),
            n_hits: Binomial::new(MAX_HITS, 0.5).expect("valid binomial"),
        }
    }

    fn hadron(&mut self) -> Hadron {
        Hadron {
            px: self.momentum.sample(&mut self.rng),
            py: self.momentum.sample(&mut self.rng),
            pz: self.momentum.sample(&mut self.rng),
            prob_k: self.rng.random(),
            prob_pi: self.rng.random(),
            is_muon: self.muon.sample(&mut self.rng) as i32,
        }
    }

    pub fn next_event(&mut self) -> Event {
        let hadrons = [self.hadron(), self.hadron(), self.hadron()];
        let n = self.n_hits.sample(&mut self.rng);
        let hits = (0..n).map(|_| self.rng.random_range(0..4096)).collect();
        Event { hadrons, hits }
    }
}

impl Iterator for EventGenerator {
    type Item = Event;

    fn next(&mut self) -> Option<Event> {
        Some(self.next_event())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenReport {
    pub summary: WriteSummary,
    pub wall: Duration,
    /// Simulated seconds charged by the object store, if the target is one.
    pub simulated_secs: Option<f64>,
}

/// Writes `entries` events generated from `seed` to `location`.
pub fn gen_dataset(
    location: &Location,
    store: &ObjectStore,
    writer: WriterOptions,
    sink: SinkOptions,
    entries: u64,
    seed: u64,
) -> Result<GenReport> {
    let container = match location {
        Location::Daos(_) => Some(location.container(store)?),
        Location::File(_) => None,
    };
    let clock_before = container.as_ref().map(|c| c.clock().simulated_seconds);
    let start = Instant::now();
    let mut w = NTupleWriter::create(location, store, DATASET_NAME, schema(), writer, sink)?;
    for event in EventGenerator::new(seed).take(entries as usize) {
        w.append(&event.to_entry())?;
    }
    let summary = w.close()?;
    let wall = start.elapsed();
    let simulated_secs = container
        .as_ref()
        .zip(clock_before)
        .map(|(c, before)| c.clock().simulated_seconds - before);
    Ok(GenReport {
        summary,
        wall,
        simulated_secs,
    })
}

/// Fixed-range histogram with an overflow counter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub bins: [u64; HIST_BINS],
    pub overflow: u64,
}

impl Default for Histogram {
    fn default() -> Self {
        Self {
            bins: [0; HIST_BINS],
            overflow: 0,
        }
    }
}

impl Histogram {
    pub fn bin_of(x: f64) -> Option<usize> {
        if !(HIST_MIN..HIST_MAX).contains(&x) {
            return None;
        }
        let width = (HIST_MAX - HIST_MIN) / HIST_BINS as f64;
        Some((((x - HIST_MIN) / width) as usize).min(HIST_BINS - 1))
    }

    pub fn fill(&mut self, x: f64) {
        match Self::bin_of(x) {
            Some(b) => self.bins[b] += 1,
            None => self.overflow += 1,
        }
    }

    pub fn entries(&self) -> u64 {
        self.bins.iter().sum::<u64>() + self.overflow
    }

    /// FNV-1a 64 over the bin counts then the overflow count, each as u64 LE.
    pub fn checksum(&self) -> u64 {
        let mut bytes = Vec::with_capacity((HIST_BINS + 1) * 8);
        for c in self.bins.iter().chain(std::iter::once(&self.overflow)) {
            bytes.extend_from_slice(&c.to_le_bytes());
        }
        fnv1a64(&bytes)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisResult {
    pub histogram: Histogram,
    pub n_events: u64,
    pub n_selected: u64,
}

impl AnalysisResult {
    pub fn checksum(&self) -> u64 {
        self.histogram.checksum()
    }
}

/// Per-event selection and observable: events with any muon flag set are
/// rejected; the others contribute the scalar sum of hadron momenta.
pub fn observable(hadrons: &[Hadron; N_HADRONS]) -> Option<f64> {
    if hadrons.iter().any(|h| h.is_muon != 0) {
        return None;
    }
    Some(hadrons.iter().map(Hadron::momentum).sum())
}

/// Scans the analysis columns of `reader` cluster by cluster.
pub fn run_analysis(reader: &NTupleReader) -> Result<AnalysisResult> {
    let fields = analysis_fields();
    let paths: Vec<&str> = fields.iter().map(String::as_str).collect();
    for path in &paths {
        let (field, _) = reader
            .header()
            .layout
            .find(path)
            .ok_or_else(|| Error::UnknownField(path.to_string()))?;
        let expected = if path.ends_with("isMuon") { FieldType::Int32 } else { FieldType::Float64 };
        if field.ty != expected {
            return Err(Error::mismatch(&expected, &field.ty));
        }
    }
    let mut result = AnalysisResult {
        histogram: Histogram::default(),
        n_events: 0,
        n_selected: 0,
    };
    for cluster in 0..reader.n_clusters() as u32 {
        let cols = reader.load_columns(cluster, &paths)?;
        let f64s = |i: usize| match cols.get(i) {
            ColumnData::Float64(v) => v.as_slice(),
            _ => unreachable!("checked against the schema"),
        };
        let i32s = |i: usize| match cols.get(i) {
            ColumnData::Int32(v) => v.as_slice(),
            _ => unreachable!("checked against the schema"),
        };
        let per_hadron: Vec<_> = (0..N_HADRONS)
            .map(|h| (f64s(4 * h), f64s(4 * h + 1), f64s(4 * h + 2), i32s(4 * h + 3)))
            .collect();
        for e in 0..cols.n_entries as usize {
            let hadrons = std::array::from_fn(|h| {
                let (px, py, pz, mu) = per_hadron[h];
                Hadron {
                    px: px[e],
                    py: py[e],
                    pz: pz[e],
                    prob_k: 0.0,
                    prob_pi: 0.0,
                    is_muon: mu[e],
                }
            });
            result.n_events += 1;
            if let Some(x) = observable(&hadrons) {
                result.n_selected += 1;
                result.histogram.fill(x);
            }
        }
    }
    Ok(result)
}
