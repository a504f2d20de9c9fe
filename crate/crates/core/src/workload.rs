//! Seeded synthetic flow tables and packet traces.
//!
//! Tables are drawn from a class profile (how many entries per layer
//! signature). Traces are drawn against a table with two independent knobs:
//! the fraction of packets that hit some entry and the number of header
//! fields every packet carries.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::classifier::LayerSignature;
use crate::flow::{
    layer_mask, FieldName, FieldSet, FlowEntry, FlowTable, PacketHeader, FIELD_COUNT,
};
use crate::matcher::{linear_match, LinearMatcher, Matcher};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorkloadError {
    #[error("entry count must be positive")]
    NoEntries,
    #[error("class profile sums to {profile} entries but {expected} were requested")]
    ProfileMismatch { profile: usize, expected: usize },
    #[error("empty priority range")]
    EmptyPriorityRange,
    #[error("value range for {0} is empty or exceeds the field width")]
    BadValueRange(FieldName),
    #[error("packet count must be positive")]
    NoPackets,
    #[error("target hit rate {0} is outside [0, 1]")]
    BadHitRate(String),
    #[error("tuple length {0} is outside 1..=12")]
    BadTupleLength(usize),
    #[error("cannot generate from an empty table")]
    EmptyTable,
    #[error("no entry fits in a {0}-field packet")]
    NoFeasibleEntry(usize),
    #[error("could not draw a packet that misses every entry")]
    MissInfeasible,
    #[error("hit rate of an empty trace is undefined")]
    EmptyTrace,
}

/// Inclusive value range per field used when drawing values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueSpace {
    ranges: [RangeInclusive<u64>; FIELD_COUNT],
}

impl ValueSpace {
    /// Every field drawn over its full bit width.
    pub fn full() -> Self {
        ValueSpace {
            ranges: FieldName::ALL.map(|f| 0..=f.max_value()),
        }
    }

    pub fn with_range(mut self, field: FieldName, range: RangeInclusive<u64>) -> Self {
        self.ranges[field.index()] = range;
        self
    }

    pub fn range(&self, field: FieldName) -> &RangeInclusive<u64> {
        &self.ranges[field.index()]
    }

    fn validate(&self) -> Result<(), WorkloadError> {
        for f in FieldName::ALL {
            let r = self.range(f);
            if r.is_empty() || *r.end() > f.max_value() {
                return Err(WorkloadError::BadValueRange(f));
            }
        }
        Ok(())
    }

    fn draw<R: Rng>(&self, field: FieldName, rng: &mut R) -> u64 {
        rng.gen_range(self.range(field).clone())
    }
}

impl Default for ValueSpace {
    fn default() -> Self {
        ValueSpace::full()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableSpec {
    pub entry_count: usize,
    pub class_profile: Vec<(LayerSignature, usize)>,
    pub priority_range: RangeInclusive<u32>,
    pub value_space: ValueSpace,
    pub seed: u64,
}

impl TableSpec {
    pub fn new(class_profile: Vec<(LayerSignature, usize)>, seed: u64) -> Self {
        TableSpec {
            entry_count: class_profile.iter().map(|(_, n)| n).sum(),
            class_profile,
            priority_range: 0..=u16::MAX as u32,
            value_space: ValueSpace::full(),
            seed,
        }
    }

    /// Signatures drawn uniformly over every valid non-empty signature.
    ///
    /// The all-wildcard class is left out: a single all-wildcard entry
    /// matches every packet and would make miss traffic impossible.
    pub fn uniform(entry_count: usize, seed: u64) -> Self {
        let choices: Vec<LayerSignature> = LayerSignature::all_valid()
            .filter(|s| *s != LayerSignature::ZERO)
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x756e_6966_6f72_6d00);
        let mut counts = vec![0usize; choices.len()];
        for _ in 0..entry_count {
            counts[rng.gen_range(0..choices.len())] += 1;
        }
        let profile = choices
            .into_iter()
            .zip(counts)
            .filter(|(_, n)| *n > 0)
            .collect();
        let mut spec = TableSpec::new(profile, seed);
        spec.entry_count = entry_count;
        spec
    }

    fn validate(&self) -> Result<(), WorkloadError> {
        if self.entry_count == 0 {
            return Err(WorkloadError::NoEntries);
        }
        let profile: usize = self.class_profile.iter().map(|(_, n)| n).sum();
        if profile != self.entry_count {
            return Err(WorkloadError::ProfileMismatch {
                profile,
                expected: self.entry_count,
            });
        }
        if self.priority_range.is_empty() {
            return Err(WorkloadError::EmptyPriorityRange);
        }
        self.value_space.validate()
    }
}

fn layer_fields(layer: u8) -> Vec<FieldName> {
    FieldName::ALL
        .iter()
        .copied()
        .filter(|f| f.layer() == layer)
        .collect()
}

/// Field set realizing exactly `sig`, field choice uniform within each layer.
fn realize<R: Rng>(sig: &LayerSignature, values: &ValueSpace, rng: &mut R) -> FieldSet {
    let mut set = FieldSet::new();
    for layer in 1..=4u8 {
        let fields = layer_fields(layer);
        for f in fields.choose_multiple(rng, sig.count(layer) as usize) {
            set.set(*f, values.draw(*f, rng))
                .expect("value space validated");
        }
    }
    set
}

pub fn gen_table(spec: &TableSpec) -> Result<FlowTable, WorkloadError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut signatures: Vec<LayerSignature> = spec
        .class_profile
        .iter()
        .flat_map(|(sig, n)| std::iter::repeat_n(*sig, *n))
        .collect();
    signatures.shuffle(&mut rng);
    let entries = signatures
        .iter()
        .enumerate()
        .map(|(id, sig)| {
            let fields = realize(sig, &spec.value_space, &mut rng);
            let priority = rng.gen_range(spec.priority_range.clone());
            let port = rng.gen_range(1..=48);
            FlowEntry::new(id as u64, priority, fields, format!("output:{port}"))
        })
        .collect();
    Ok(FlowTable::from_entries(entries).expect("ids are sequential"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceSpec {
    pub packet_count: usize,
    pub target_hit_rate: f64,
    pub tuple_length: usize,
    pub seed: u64,
    pub value_space: ValueSpace,
}

impl TraceSpec {
    pub fn new(packet_count: usize, target_hit_rate: f64, tuple_length: usize, seed: u64) -> Self {
        TraceSpec {
            packet_count,
            target_hit_rate,
            tuple_length,
            seed,
            value_space: ValueSpace::full(),
        }
    }

    fn validate(&self) -> Result<(), WorkloadError> {
        if self.packet_count == 0 {
            return Err(WorkloadError::NoPackets);
        }
        if !(0.0..=1.0).contains(&self.target_hit_rate) {
            return Err(WorkloadError::BadHitRate(self.target_hit_rate.to_string()));
        }
        if !(1..=FIELD_COUNT).contains(&self.tuple_length) {
            return Err(WorkloadError::BadTupleLength(self.tuple_length));
        }
        self.value_space.validate()
    }
}

const FLIP_ATTEMPTS: usize = 100;
const FRESH_ATTEMPTS: usize = 10_000;
const MIN_FRAME: u32 = 64;
const MAX_FRAME: u32 = 1500;

struct TraceBuilder<'a> {
    table: &'a FlowTable,
    spec: &'a TraceSpec,
    /// Positions of entries that fit in a packet of the requested length.
    feasible: Vec<usize>,
    verifier: LinearMatcher<'a>,
}

impl<'a> TraceBuilder<'a> {
    /// Fields needed to carry the entry, counting the mandatory in_port.
    fn footprint(e: &FlowEntry) -> usize {
        e.fields.tuple_length() + usize::from(!e.fields.contains(FieldName::InPort))
    }

    /// Completes `base` with in_port and random extra fields up to the
    /// requested tuple length.
    fn pad<R: Rng>(&self, mut base: FieldSet, rng: &mut R) -> FieldSet {
        let values = &self.spec.value_space;
        if !base.contains(FieldName::InPort) {
            base.set(FieldName::InPort, values.draw(FieldName::InPort, rng))
                .expect("value space validated");
        }
        let missing = self.spec.tuple_length.saturating_sub(base.tuple_length());
        let absent: Vec<FieldName> = FieldName::ALL
            .iter()
            .copied()
            .filter(|f| !base.contains(*f))
            .collect();
        for f in absent.choose_multiple(rng, missing) {
            base.set(*f, values.draw(*f, rng))
                .expect("value space validated");
        }
        base
    }

    fn hit<R: Rng>(&self, rng: &mut R) -> Result<FieldSet, WorkloadError> {
        let &pos = self
            .feasible
            .choose(rng)
            .ok_or(WorkloadError::NoFeasibleEntry(self.spec.tuple_length))?;
        Ok(self.pad(self.table.entries()[pos].fields, rng))
    }

    fn misses_all(&self, fields: FieldSet) -> bool {
        let pkt = PacketHeader::new(fields, MIN_FRAME).expect("in_port present");
        self.verifier.lookup(&pkt).is_none()
    }

    /// Template from a feasible entry with one of the entry's values changed.
    fn flipped<R: Rng>(&self, rng: &mut R) -> Option<FieldSet> {
        let &pos = self.feasible.choose(rng)?;
        let entry = &self.table.entries()[pos].fields;
        let mut fields = self.pad(*entry, rng);
        let flippable: Vec<FieldName> = entry
            .fields()
            .filter(|f| {
                let r = self.spec.value_space.range(*f);
                r.end() > r.start()
            })
            .collect();
        let &field = flippable.choose(rng)?;
        let old = fields.get(field).expect("copied from entry");
        let new = loop {
            let v = self.spec.value_space.draw(field, rng);
            if v != old {
                break v;
            }
        };
        fields.set(field, new).expect("value space validated");
        Some(fields)
    }

    fn miss<R: Rng>(&self, rng: &mut R) -> Result<FieldSet, WorkloadError> {
        for _ in 0..FLIP_ATTEMPTS {
            if let Some(fields) = self.flipped(rng) {
                if self.misses_all(fields) {
                    return Ok(fields);
                }
            }
        }
        for _ in 0..FRESH_ATTEMPTS {
            let fields = self.pad(FieldSet::new(), rng);
            if self.misses_all(fields) {
                return Ok(fields);
            }
        }
        Err(WorkloadError::MissInfeasible)
    }
}

pub fn gen_packets(
    table: &FlowTable,
    spec: &TraceSpec,
) -> Result<Vec<PacketHeader>, WorkloadError> {
    spec.validate()?;
    if table.is_empty() {
        return Err(WorkloadError::EmptyTable);
    }
    let feasible = table
        .entries()
        .iter()
        .enumerate()
        .filter(|(_, e)| TraceBuilder::footprint(e) <= spec.tuple_length)
        .map(|(i, _)| i)
        .collect();
    let builder = TraceBuilder {
        table,
        spec,
        feasible,
        verifier: LinearMatcher::new(table),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut trace = Vec::with_capacity(spec.packet_count);
    for _ in 0..spec.packet_count {
        let fields = if rng.gen_bool(spec.target_hit_rate) {
            builder.hit(&mut rng)?
        } else {
            builder.miss(&mut rng)?
        };
        let len = rng.gen_range(MIN_FRAME..=MAX_FRAME);
        trace.push(PacketHeader::new(fields, len).expect("in_port present"));
    }
    Ok(trace)
}

/// Fraction of packets for which the linear engine finds an entry.
pub fn measure_empirical_hit_rate(
    table: &FlowTable,
    trace: &[PacketHeader],
) -> Result<f64, WorkloadError> {
    if trace.is_empty() {
        return Err(WorkloadError::EmptyTrace);
    }
    let hits = trace
        .iter()
        .filter(|p| linear_match(table, p).is_some())
        .count();
    Ok(hits as f64 / trace.len() as f64)
}

/// True when `fields` realizes exactly `sig` and no more.
pub fn realizes(fields: &FieldSet, sig: &LayerSignature) -> bool {
    (1..=4u8).all(|l| (fields.mask() & layer_mask(l)).count_ones() as u8 == sig.count(l))
}
