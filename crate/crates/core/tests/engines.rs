//! Randomized cross-checks of the tuple-space and pre-match engines against
//! the linear scan.

use flowmatch::classifier::packet_signature;
use flowmatch::workload::{gen_packets, gen_table, TableSpec, TraceSpec, ValueSpace};
use flowmatch::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small value domains and a narrow priority range force many overlapping
/// matches and priority ties.
fn dense_table(rng: &mut ChaCha8Rng, size: usize) -> FlowTable {
    let entries = (0..size)
        .map(|i| {
            let mut fields = FieldSet::new();
            for f in FieldName::ALL {
                if rng.gen_bool(0.3) {
                    fields.set(f, rng.gen_range(0..3)).unwrap();
                }
            }
            FlowEntry::new(
                i as u64 * 7 + 1,
                rng.gen_range(0..8),
                fields,
                format!("a{i}"),
            )
        })
        .collect();
    FlowTable::from_entries(entries).unwrap()
}

fn dense_packet(rng: &mut ChaCha8Rng) -> PacketHeader {
    let mut fields = FieldSet::new();
    fields.set(FieldName::InPort, rng.gen_range(0..3)).unwrap();
    for f in &FieldName::ALL[1..] {
        if rng.gen_bool(0.8) {
            fields.set(*f, rng.gen_range(0..3)).unwrap();
        }
    }
    PacketHeader::new(fields, rng.gen_range(64..=1500)).unwrap()
}

#[test]
fn engines_agree_with_linear_on_dense_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut hits = 0usize;
    let mut trials = 0usize;
    for _ in 0..100 {
        let size = rng.gen_range(0..=200);
        let table = dense_table(&mut rng, size);
        let index = build_index(&table).unwrap();
        let dominant = PreMatchMatcher::new(&table, &index, CandidateMode::Dominant).unwrap();
        let tss = TupleSpaceMatcher::new(&table).unwrap();
        for _ in 0..1000 {
            let pkt = dense_packet(&mut rng);
            let expected = linear_match(&table, &pkt).map(|r| r.entry_id);
            assert_eq!(dominant.lookup(&pkt).map(|r| r.entry_id), expected);
            assert_eq!(tss.lookup(&pkt).map(|r| r.entry_id), expected);
            hits += usize::from(expected.is_some());
            trials += 1;
        }
    }
    assert_eq!(trials, 100_000);
    // the workload must exercise both outcomes
    assert!(hits > trials / 10 && hits < trials * 9 / 10, "{hits}");
}

#[test]
fn engines_agree_on_generated_workloads() {
    for seed in 0..10u64 {
        let mut spec = TableSpec::uniform(150, seed);
        spec.priority_range = 0..=20;
        spec.value_space = FieldName::ALL
            .iter()
            .fold(ValueSpace::full(), |vs, f| vs.with_range(*f, 0..=3));
        let table = gen_table(&spec).unwrap();
        let index = build_index(&table).unwrap();
        let groups = build_tuple_groups(&table);
        let mut trace_spec = TraceSpec::new(500, 0.6, 5 + seed as usize % 8, seed);
        trace_spec.value_space = spec.value_space.clone();
        let trace = gen_packets(&table, &trace_spec).unwrap();
        for pkt in &trace {
            let expected = linear_match(&table, pkt).map(|r| r.entry_id);
            let fo = fopenflow_match(&index, &table, pkt, CandidateMode::Dominant).unwrap();
            assert_eq!(fo.map(|r| r.entry_id), expected);
            assert_eq!(
                tuple_space_match(&groups, &table, pkt).map(|r| r.entry_id),
                expected
            );
        }
    }
}

#[test]
fn strict_mode_is_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..50 {
        let table = dense_table(&mut rng, 120);
        let index = build_index(&table).unwrap();
        let strict = PreMatchMatcher::new(&table, &index, CandidateMode::Strict).unwrap();
        for _ in 0..400 {
            let pkt = dense_packet(&mut rng);
            let sig = packet_signature(&pkt);
            let class: Vec<&FlowEntry> = table
                .entries()
                .iter()
                .filter(|e| extract_signature(&e.fields) == sig)
                .collect();
            // best match restricted to the packet's own class
            let best_in_class = class
                .iter()
                .filter(|e| matches(&e.fields, &pkt))
                .fold(None::<&FlowEntry>, |best, e| match best {
                    Some(b) if b.priority >= e.priority => Some(b),
                    _ => Some(e),
                })
                .map(|e| e.id);
            let got = strict.lookup(&pkt);
            assert_eq!(got.map(|r| r.entry_id), best_in_class);
            if let Some(r) = got {
                assert!(matches(&table.entries()[r.position].fields, &pkt));
                assert!(r.candidates_examined <= class.len());
                let linear = linear_match(&table, &pkt).unwrap();
                if extract_signature(&table.entries()[linear.position].fields) == sig {
                    assert_eq!(r.entry_id, linear.entry_id);
                }
            }
        }
    }
}

#[test]
fn dominant_mode_prunes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let table = dense_table(&mut rng, 200);
        let index = build_index(&table).unwrap();
        let dominant = PreMatchMatcher::new(&table, &index, CandidateMode::Dominant).unwrap();
        for _ in 0..200 {
            let pkt = dense_packet(&mut rng);
            let sig = packet_signature(&pkt);
            let Some(r) = dominant.lookup(&pkt) else {
                continue;
            };
            assert!(r.candidates_examined >= 1);
            assert!(r.candidates_examined <= table.len());
            let all_dominated = index
                .classes()
                .keys()
                .all(|k| k.signature().dominated_by(&sig));
            if r.candidates_examined == table.len() {
                assert!(all_dominated);
            }
            let h = r.hit_rate.as_f64();
            assert!((0.0..=1.0).contains(&h));
        }
    }
}

/// Agreement counted field by field, independent of the bit-mask routine.
fn brute_force_hit_rate(pkt: &FieldSet, entry: &FieldSet) -> (u32, u32) {
    let mut agree = 0;
    let mut total = 0;
    for f in FieldName::ALL {
        if let Some(v) = pkt.get(f) {
            total += 1;
            if entry.get(f) == Some(v) {
                agree += 1;
            }
        }
    }
    (agree, total)
}

#[test]
fn hit_rate_matches_brute_force_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10_000 {
        let pkt = dense_packet(&mut rng);
        let table = dense_table(&mut rng, 1);
        let e = &table.entries()[0];
        let h = hit_rate(&pkt, e).unwrap();
        let (num, den) = brute_force_hit_rate(pkt.fields(), &e.fields);
        // equal as rationals
        assert_eq!(h.numerator() * den, num * h.denominator());
        assert_eq!(h.denominator(), den);
        if e.fields == *pkt.fields() {
            assert_eq!(h.as_f64(), 1.0);
        }
    }
}

#[test]
fn counters_are_conserved() {
    let table = gen_table(&TableSpec::uniform(400, 9)).unwrap();
    let trace = gen_packets(&table, &TraceSpec::new(5000, 0.7, 9, 1)).unwrap();
    for mode in [CandidateMode::Dominant, CandidateMode::Strict] {
        let mut table = table.clone();
        let outcomes: Vec<Option<usize>> = {
            let index = build_index(&table).unwrap();
            let m = PreMatchMatcher::new(&table, &index, mode).unwrap();
            trace
                .iter()
                .map(|p| m.lookup(p).map(|r| r.position))
                .collect()
        };
        let counts = apply_outcomes(&mut table, &trace, &outcomes).unwrap();
        let packets: u64 = table
            .entries()
            .iter()
            .map(|e| e.counters.packet_count)
            .sum();
        let bytes: u64 = table.entries().iter().map(|e| e.counters.byte_count).sum();
        assert_eq!(packets, counts.hits);
        assert_eq!(bytes, counts.hit_bytes);
        let expected_bytes: u64 = trace
            .iter()
            .zip(&outcomes)
            .filter(|(_, o)| o.is_some())
            .map(|(p, _)| u64::from(p.byte_len()))
            .sum();
        assert_eq!(bytes, expected_bytes);
        assert_eq!(counts.hits + counts.misses, trace.len() as u64);
    }
}

#[test]
fn lookups_are_deterministic() {
    let table = gen_table(&TableSpec::uniform(300, 2)).unwrap();
    let trace = gen_packets(&table, &TraceSpec::new(2000, 0.5, 7, 8)).unwrap();
    let run = || {
        let index = build_index(&table).unwrap();
        let m = PreMatchMatcher::new(&table, &index, CandidateMode::Dominant).unwrap();
        trace
            .iter()
            .map(|p| {
                m.lookup(p)
                    .map(|r| (r.entry_id, r.candidates_examined, r.hit_rate))
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(run(), run());
}
