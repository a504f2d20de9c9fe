//! Timing harness comparing the lookup engines.
//!
//! Three scenarios: a sweep over the trace hit rate, a sweep over the packet
//! tuple length and repeated timing of one fixed workload. Each timed pass
//! runs the whole trace through one engine on the current thread; counters
//! are never touched inside the timed region.

use std::fmt;
use std::hint::black_box;
use std::io::{self, Read, Write};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Deserialize;
use thiserror::Error;

use crate::classifier::{build_index, CandidateMode, ClassifyError};
use crate::flow::{FlowTable, PacketHeader};
use crate::matcher::{LinearMatcher, MatchError, Matcher, PreMatchMatcher, TupleSpaceMatcher};
use crate::workload::{gen_packets, gen_table, TableSpec, TraceSpec, WorkloadError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot time an empty trace")]
    EmptyTrace,
    #[error("invalid bench configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
pub enum Scenario {
    #[serde(rename = "hit_rate_sweep")]
    HitRateSweep,
    #[serde(rename = "tuple_length_sweep")]
    TupleLengthSweep,
    #[serde(rename = "stability")]
    Stability,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::HitRateSweep => "hit_rate_sweep",
            Scenario::TupleLengthSweep => "tuple_length_sweep",
            Scenario::Stability => "stability",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
pub enum Engine {
    #[serde(rename = "linear")]
    Linear,
    #[serde(rename = "tuple_space")]
    TupleSpace,
    #[serde(rename = "fopenflow_strict")]
    FOpenFlowStrict,
    #[serde(rename = "fopenflow_dominant")]
    FOpenFlowDominant,
}

impl Engine {
    pub const ALL: [Engine; 4] = [
        Engine::Linear,
        Engine::TupleSpace,
        Engine::FOpenFlowStrict,
        Engine::FOpenFlowDominant,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Linear => "linear",
            Engine::TupleSpace => "tuple_space",
            Engine::FOpenFlowStrict => "fopenflow_strict",
            Engine::FOpenFlowDominant => "fopenflow_dominant",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Engine::ALL
            .iter()
            .copied()
            .find(|e| e.as_str() == s || e.as_str().replace('_', "-") == s)
            .ok_or_else(|| format!("unknown engine `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct BenchRecord {
    pub scenario: Scenario,
    pub engine: Engine,
    /// Hit rate in percent, tuple length, or repetition index.
    pub param: f64,
    pub repetition: u32,
    pub time_per_packet_ns: f64,
    pub empirical_hit_rate: f64,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub table_spec: TableSpec,
    pub trace_size: usize,
    pub warmup_iters: usize,
    pub measured_iters: usize,
    pub seed: u64,
    /// Timed repetitions per sweep point.
    pub repetitions: usize,
    pub engines: Vec<Engine>,
}

impl BenchConfig {
    /// 10^4 uniform entries, 10^5 packets, 3 warmup and 10 measured passes.
    pub fn new(seed: u64) -> Self {
        BenchConfig {
            table_spec: TableSpec::uniform(10_000, seed),
            trace_size: 100_000,
            warmup_iters: 3,
            measured_iters: 10,
            seed,
            repetitions: 1,
            engines: Engine::ALL.to_vec(),
        }
    }

    fn validate(&self) -> Result<(), BenchError> {
        if self.measured_iters == 0 {
            return Err(BenchError::Config(
                "measured_iters must be at least 1".into(),
            ));
        }
        if self.trace_size == 0 {
            return Err(BenchError::EmptyTrace);
        }
        if self.repetitions == 0 {
            return Err(BenchError::Config("repetitions must be at least 1".into()));
        }
        if self.engines.is_empty() {
            return Err(BenchError::Config("no engines selected".into()));
        }
        Ok(())
    }
}

/// Construction times of the lookup structures, kept out of lookup timing.
#[derive(Debug, Clone, Copy, Default)]
pub struct BuildTimes {
    pub index: Duration,
    pub pre_match: Duration,
    pub tuple_groups: Duration,
}

/// All engines prepared over one table.
pub struct PreparedEngines<'t> {
    linear: LinearMatcher<'t>,
    tuple_space: TupleSpaceMatcher<'t>,
    strict: PreMatchMatcher<'t>,
    dominant: PreMatchMatcher<'t>,
    pub build: BuildTimes,
}

impl<'t> PreparedEngines<'t> {
    pub fn new(table: &'t FlowTable) -> Result<Self, BenchError> {
        let start = Instant::now();
        let index = build_index(table)?;
        let index_time = start.elapsed();
        let start = Instant::now();
        let dominant = PreMatchMatcher::new(table, &index, CandidateMode::Dominant)?;
        let pre_match = start.elapsed();
        let strict = PreMatchMatcher::new(table, &index, CandidateMode::Strict)?;
        let start = Instant::now();
        let tuple_space = TupleSpaceMatcher::new(table)?;
        let tuple_groups = start.elapsed();
        Ok(PreparedEngines {
            linear: LinearMatcher::new(table),
            tuple_space,
            strict,
            dominant,
            build: BuildTimes {
                index: index_time,
                pre_match,
                tuple_groups,
            },
        })
    }

    pub fn time(
        &self,
        engine: Engine,
        trace: &[PacketHeader],
        cfg: &BenchConfig,
    ) -> Result<Timing, BenchError> {
        match engine {
            Engine::Linear => time_engine(&self.linear, trace, cfg),
            Engine::TupleSpace => time_engine(&self.tuple_space, trace, cfg),
            Engine::FOpenFlowStrict => time_engine(&self.strict, trace, cfg),
            Engine::FOpenFlowDominant => time_engine(&self.dominant, trace, cfg),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Timing {
    /// Wall time of each measured pass.
    pub passes: Vec<Duration>,
    pub time_per_packet_ns: f64,
    pub hits: usize,
    pub packets: usize,
}

impl Timing {
    pub fn hit_fraction(&self) -> f64 {
        self.hits as f64 / self.packets as f64
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of nothing");
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

#[inline(never)]
fn run_pass<M: Matcher>(matcher: &M, trace: &[PacketHeader]) -> usize {
    let mut hits = 0;
    for pkt in trace {
        if let Some(r) = matcher.lookup(black_box(pkt)) {
            black_box(r.entry_id);
            hits += 1;
        }
    }
    hits
}

/// Median pass time divided by the trace length.
pub fn time_engine<M: Matcher>(
    matcher: &M,
    trace: &[PacketHeader],
    cfg: &BenchConfig,
) -> Result<Timing, BenchError> {
    if trace.is_empty() {
        return Err(BenchError::EmptyTrace);
    }
    if cfg.measured_iters == 0 {
        return Err(BenchError::Config(
            "measured_iters must be at least 1".into(),
        ));
    }
    for _ in 0..cfg.warmup_iters {
        black_box(run_pass(matcher, trace));
    }
    let mut passes = Vec::with_capacity(cfg.measured_iters);
    let mut hits = 0;
    for _ in 0..cfg.measured_iters {
        let start = Instant::now();
        hits = black_box(run_pass(matcher, trace));
        passes.push(start.elapsed());
    }
    let mut ns: Vec<f64> = passes.iter().map(|d| d.as_nanos() as f64).collect();
    Ok(Timing {
        time_per_packet_ns: median(&mut ns) / trace.len() as f64,
        passes,
        hits,
        packets: trace.len(),
    })
}

/// Output of a bench run: the records plus structure build times.
#[derive(Debug, Clone)]
pub struct BenchRun {
    pub records: Vec<BenchRecord>,
    pub build: BuildTimes,
    pub table_size: usize,
}

fn trace_seed(cfg: &BenchConfig, point: usize) -> u64 {
    cfg.seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(point as u64 + 1)
}

/// Removes float noise from `x * 100` for decimal hit rates.
fn percent(rate: f64) -> f64 {
    (rate * 100.0 * 1e9).round() / 1e9
}

fn sweep<P: Copy>(
    cfg: &BenchConfig,
    scenario: Scenario,
    points: &[P],
    trace_for: impl Fn(usize, P) -> TraceSpec,
    param_of: impl Fn(P) -> f64,
) -> Result<BenchRun, BenchError> {
    cfg.validate()?;
    let table = gen_table(&cfg.table_spec)?;
    let engines = PreparedEngines::new(&table)?;
    let mut records = Vec::with_capacity(points.len() * cfg.engines.len() * cfg.repetitions);
    for (i, &point) in points.iter().enumerate() {
        let trace = gen_packets(&table, &trace_for(i, point))?;
        for rep in 0..cfg.repetitions {
            for &engine in &cfg.engines {
                let t = engines.time(engine, &trace, cfg)?;
                records.push(BenchRecord {
                    scenario,
                    engine,
                    param: param_of(point),
                    repetition: rep as u32,
                    time_per_packet_ns: t.time_per_packet_ns,
                    empirical_hit_rate: t.hit_fraction(),
                });
            }
        }
    }
    Ok(BenchRun {
        records,
        build: engines.build,
        table_size: table.len(),
    })
}

/// Times every engine at each hit rate (fractions in [0, 1]); params are
/// reported in percent.
pub fn sweep_hit_rate(
    cfg: &BenchConfig,
    tuple_length: usize,
    hit_rates: &[f64],
) -> Result<BenchRun, BenchError> {
    if let Some(bad) = hit_rates.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(BenchError::Config(format!("hit rate {bad} outside [0, 1]")));
    }
    sweep(
        cfg,
        Scenario::HitRateSweep,
        hit_rates,
        |i, rate| TraceSpec::new(cfg.trace_size, rate, tuple_length, trace_seed(cfg, i)),
        percent,
    )
}

pub fn sweep_tuple_length(
    cfg: &BenchConfig,
    hit_rate: f64,
    lengths: &[usize],
) -> Result<BenchRun, BenchError> {
    if let Some(bad) = lengths.iter().find(|l| !(1..=12).contains(*l)) {
        return Err(BenchError::Config(format!(
            "tuple length {bad} outside 1..=12"
        )));
    }
    sweep(
        cfg,
        Scenario::TupleLengthSweep,
        lengths,
        |i, len| TraceSpec::new(cfg.trace_size, hit_rate, len, trace_seed(cfg, i)),
        |len| len as f64,
    )
}

/// Times the same table and trace `reps` times; engines are interleaved
/// within each repetition so drift in the machine affects all of them.
pub fn repeat_stability(
    cfg: &BenchConfig,
    hit_rate: f64,
    tuple_length: usize,
    reps: usize,
) -> Result<BenchRun, BenchError> {
    if reps < 2 {
        return Err(BenchError::Config(
            "stability needs at least 2 repetitions".into(),
        ));
    }
    cfg.validate()?;
    let table = gen_table(&cfg.table_spec)?;
    let engines = PreparedEngines::new(&table)?;
    let trace = gen_packets(
        &table,
        &TraceSpec::new(cfg.trace_size, hit_rate, tuple_length, trace_seed(cfg, 0)),
    )?;
    let mut records = Vec::with_capacity(reps * cfg.engines.len());
    for rep in 0..reps {
        for &engine in &cfg.engines {
            let t = engines.time(engine, &trace, cfg)?;
            records.push(BenchRecord {
                scenario: Scenario::Stability,
                engine,
                param: rep as f64,
                repetition: rep as u32,
                time_per_packet_ns: t.time_per_packet_ns,
                empirical_hit_rate: t.hit_fraction(),
            });
        }
    }
    Ok(BenchRun {
        records,
        build: engines.build,
        table_size: table.len(),
    })
}

pub const CSV_HEADER: [&str; 6] = [
    "scenario",
    "engine",
    "param",
    "repetition",
    "time_per_packet_ns",
    "empirical_hit_rate",
];

/// Writes records as CSV. Floats use plain decimal notation.
pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.scenario.as_str().to_string(),
            r.engine.as_str().to_string(),
            r.param.to_string(),
            r.repetition.to_string(),
            r.time_per_packet_ns.to_string(),
            r.empirical_hit_rate.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<BenchRecord>, BenchError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(BenchError::Config(format!(
            "unexpected CSV header {header:?}"
        )));
    }
    let records = r.deserialize().collect::<Result<Vec<BenchRecord>, _>>()?;
    Ok(records)
}
