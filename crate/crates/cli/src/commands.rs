use std::io::Write;

use flowmatch::bench::{
    repeat_stability, sweep_hit_rate, sweep_tuple_length, write_csv, BenchConfig, BenchRun,
};
use flowmatch::classifier::packet_signature;
use flowmatch::workload::{gen_packets, gen_table, TableSpec, TraceSpec};
use flowmatch::{
    apply_outcomes, build_index, CandidateMode, LinearMatcher, Matcher, PreMatchMatcher,
    TupleSpaceMatcher,
};
use serde_json::{json, Value};

use crate::formats::{read_profile, read_table, read_trace, write_file, write_table, write_trace};
use crate::{
    BenchArgs, ClassifyArgs, Cli, CliError, Command, EngineArg, GenPacketsArgs, GenTableArgs,
    MatchArgs, ScenarioArg,
};

/// Runs one command; progress text goes to `console`.
pub fn run(cli: Cli, console: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::GenTable(a) => cmd_gen_table(&a, console),
        Command::GenPackets(a) => cmd_gen_packets(&a, console),
        Command::Classify(a) => cmd_classify(&a, console),
        Command::Match(a) => cmd_match(&a, console),
        Command::Bench(a) => cmd_bench(&a, console),
    }
}

fn say(console: &mut dyn Write, text: std::fmt::Arguments<'_>) -> Result<(), CliError> {
    writeln!(console, "{text}").map_err(|e| CliError::io("<stdout>".as_ref(), e))
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn percent_to_rate(flag: &str, pct: f64) -> Result<f64, CliError> {
    if !(0.0..=100.0).contains(&pct) {
        return Err(usage(format!("{flag} {pct} is outside 0..=100")));
    }
    Ok(pct / 100.0)
}

fn check_tuple_length(len: usize) -> Result<usize, CliError> {
    if !(1..=12).contains(&len) {
        return Err(usage(format!("--tuple-length {len} is outside 1..=12")));
    }
    Ok(len)
}

pub fn cmd_gen_table(a: &GenTableArgs, console: &mut dyn Write) -> Result<(), CliError> {
    if a.entries == 0 {
        return Err(usage("--entries must be positive"));
    }
    let spec = match &a.profile {
        Some(path) => {
            let profile = read_profile(path)?;
            let sum: usize = profile.iter().map(|(_, n)| n).sum();
            if sum != a.entries {
                return Err(usage(format!(
                    "profile {} sums to {sum} entries but --entries is {}",
                    path.display(),
                    a.entries
                )));
            }
            TableSpec::new(profile, a.seed)
        }
        None => TableSpec::uniform(a.entries, a.seed),
    };
    let table = gen_table(&spec)?;
    write_file(&a.out, |w| write_table(&table, w))?;
    say(
        console,
        format_args!("wrote {} entries to {}", table.len(), a.out.display()),
    )
}

pub fn cmd_gen_packets(a: &GenPacketsArgs, console: &mut dyn Write) -> Result<(), CliError> {
    if a.count == 0 {
        return Err(usage("--count must be positive"));
    }
    let rate = percent_to_rate("--hit-rate", a.hit_rate)?;
    let len = check_tuple_length(a.tuple_length)?;
    let table = read_table(&a.table)?;
    let trace = gen_packets(&table, &TraceSpec::new(a.count, rate, len, a.seed))?;
    write_file(&a.out, |w| write_trace(&trace, w))?;
    say(
        console,
        format_args!("wrote {} packets to {}", trace.len(), a.out.display()),
    )
}

pub fn cmd_classify(a: &ClassifyArgs, console: &mut dyn Write) -> Result<(), CliError> {
    let table = read_table(&a.table)?;
    let index = build_index(&table)?;
    let stats = index.class_stats();
    let classes: Vec<Value> = index
        .classes()
        .iter()
        .map(|(key, ids)| json!({ "key": key.to_string(), "size": ids.len(), "ids": ids }))
        .collect();
    let layers: Vec<Value> = (0..=4u8)
        .map(|l| json!({ "layer": l, "count": stats.table_count(l), "ids": stats.ids(l) }))
        .collect();
    let mut report = json!({
        "entries": table.len(),
        "classes": classes,
        "layers": layers,
        "layer_counts": stats.layer_counts(),
    });
    if let Some(path) = &a.packets {
        let trace = read_trace(path)?;
        let packets: Vec<Value> = trace
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let sig = packet_signature(p);
                let key = sig.key();
                let candidates: Vec<String> = index
                    .candidate_classes(&sig, CandidateMode::Dominant)
                    .iter()
                    .map(ToString::to_string)
                    .collect();
                json!({
                    "packet": i,
                    "key": key.to_string(),
                    "class_ids": index.class(&key).unwrap_or(&[]),
                    "candidate_classes": candidates,
                })
            })
            .collect();
        report["packets"] = Value::Array(packets);
    }
    write_file(&a.out, |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        w.write_all(b"\n")
    })?;
    say(
        console,
        format_args!(
            "{} entries in {} classes",
            table.len(),
            index.classes().len()
        ),
    )
}

pub fn cmd_match(a: &MatchArgs, console: &mut dyn Write) -> Result<(), CliError> {
    let mut table = read_table(&a.table)?;
    let trace = read_trace(&a.packets)?;
    let (lines, outcomes) = {
        let matcher: Box<dyn Matcher + '_> = match a.engine {
            EngineArg::Linear => Box::new(LinearMatcher::new(&table)),
            EngineArg::TupleSpace => Box::new(TupleSpaceMatcher::new(&table)?),
            EngineArg::Fopenflow => {
                let index = build_index(&table)?;
                Box::new(PreMatchMatcher::new(&table, &index, a.mode)?)
            }
        };
        let mut lines = Vec::with_capacity(trace.len());
        let mut outcomes = Vec::with_capacity(trace.len());
        for (i, p) in trace.iter().enumerate() {
            let r = matcher.lookup(p);
            lines.push(match &r {
                Some(r) => json!({
                    "packet": i,
                    "entry_id": r.entry_id,
                    "action": r.action,
                    "hit_rate": r.hit_rate.as_f64(),
                    "hit_rate_exact": r.hit_rate.to_string(),
                    "candidates_examined": r.candidates_examined,
                }),
                None => json!({
                    "packet": i,
                    "entry_id": "MISS",
                    "action": null,
                    "hit_rate": null,
                    "hit_rate_exact": null,
                    "candidates_examined": null,
                }),
            });
            outcomes.push(r.map(|r| r.position));
        }
        (lines, outcomes)
    };
    let counts = apply_outcomes(&mut table, &trace, &outcomes)?;
    let counters: Vec<Value> = table
        .entries()
        .iter()
        .map(|e| {
            json!({
                "id": e.id,
                "packet_count": e.counters.packet_count,
                "byte_count": e.counters.byte_count,
            })
        })
        .collect();
    let hit_fraction = (counts.packets > 0).then(|| counts.hits as f64 / counts.packets as f64);
    let summary = json!({ "summary": {
        "packets": counts.packets,
        "hits": counts.hits,
        "misses": counts.misses,
        "hit_fraction": hit_fraction,
        "hit_bytes": counts.hit_bytes,
        "counters": counters,
    }});
    write_file(&a.out, |w| {
        for line in lines.iter().chain([&summary]) {
            serde_json::to_writer(&mut *w, line)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    })?;
    say(
        console,
        format_args!(
            "{} packets, {} hits, {} misses",
            counts.packets, counts.hits, counts.misses
        ),
    )
}

pub fn cmd_bench(a: &BenchArgs, console: &mut dyn Write) -> Result<(), CliError> {
    if a.entries == 0 || a.trace == 0 || a.iters == 0 {
        return Err(usage("--entries, --trace and --iters must be positive"));
    }
    if a.engines.is_empty() {
        return Err(usage("--engines is empty"));
    }
    let mut cfg = BenchConfig::new(a.seed);
    cfg.table_spec = TableSpec::uniform(a.entries, a.seed);
    cfg.trace_size = a.trace;
    cfg.warmup_iters = a.warmup;
    cfg.measured_iters = a.iters;
    cfg.engines = a.engines.clone();
    let reject = |given: bool, flag: &str, scenario: &str| {
        if given {
            Err(usage(format!(
                "{flag} does not apply to the {scenario} scenario"
            )))
        } else {
            Ok(())
        }
    };
    let run: BenchRun = match a.scenario {
        ScenarioArg::HitRate => {
            reject(a.hit_rate.is_some(), "--hit-rate", "hit-rate")?;
            reject(a.reps.is_some(), "--reps", "hit-rate")?;
            let len = check_tuple_length(a.tuple_length.unwrap_or(10))?;
            let rates: Vec<f64> = (1..=10).map(|i| f64::from(i) / 10.0).collect();
            sweep_hit_rate(&cfg, len, &rates)?
        }
        ScenarioArg::TupleLength => {
            reject(a.tuple_length.is_some(), "--tuple-length", "tuple-length")?;
            reject(a.reps.is_some(), "--reps", "tuple-length")?;
            let rate = percent_to_rate("--hit-rate", a.hit_rate.unwrap_or(100.0))?;
            let lengths: Vec<usize> = (1..=12).collect();
            sweep_tuple_length(&cfg, rate, &lengths)?
        }
        ScenarioArg::Stability => {
            let rate = percent_to_rate("--hit-rate", a.hit_rate.unwrap_or(50.0))?;
            let len = check_tuple_length(a.tuple_length.unwrap_or(8))?;
            let reps = a.reps.unwrap_or(20);
            if reps < 2 {
                return Err(usage("--reps must be at least 2"));
            }
            repeat_stability(&cfg, rate, len, reps)?
        }
    };
    write_file(&a.out, |w| {
        write_csv(&run.records, &mut *w).map_err(std::io::Error::other)
    })?;
    let ms = |d: std::time::Duration| d.as_secs_f64() * 1e3;
    say(console, format_args!("table entries: {}", run.table_size))?;
    say(
        console,
        format_args!("build index: {:.3} ms", ms(run.build.index)),
    )?;
    say(
        console,
        format_args!("build pre-match: {:.3} ms", ms(run.build.pre_match)),
    )?;
    say(
        console,
        format_args!("build tuple groups: {:.3} ms", ms(run.build.tuple_groups)),
    )?;
    say(
        console,
        format_args!("wrote {} records to {}", run.records.len(), a.out.display()),
    )
}
