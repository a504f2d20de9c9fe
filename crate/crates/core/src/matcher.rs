//! Lookup engines over a flow table.
//!
//! * [`LinearMatcher`] scans every entry; it is the reference the other two
//!   engines are checked against.
//! * [`TupleSpaceMatcher`] groups entries by present-field mask and probes a
//!   hash map per group.
//! * [`PreMatchMatcher`] extracts the packet's layer signature, selects the
//!   candidate classes of a [`PreMatchIndex`] and compares the packet only
//!   against the entries of those classes.
//!
//! All engines pick the matching entry with the highest priority and break
//! ties by the smaller insertion index.

use std::fmt;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::classifier::{extract_signature, CandidateMode, LayerSignature, PreMatchIndex};
use crate::flow::{Counters, FieldSet, FlowEntry, FlowTable, PacketHeader, FIELD_COUNT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("hit rate is undefined for a packet without header fields")]
    UndefinedHitRate,
    #[error("entry {0} does not match the packet")]
    NotMatching(u64),
    #[error("index does not describe this table: {0}")]
    IndexMismatch(String),
    #[error("table has {0} entries, more than a matcher can address")]
    TableTooLarge(usize),
}

/// Agreement between a packet and an entry as an exact fraction.
///
/// The numerator counts fields present in both with equal values, the
/// denominator is the packet's tuple length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HitRate {
    agree: u8,
    total: u8,
}

impl HitRate {
    pub fn between(packet: &FieldSet, entry: &FieldSet) -> Result<Self, MatchError> {
        let total = packet.tuple_length();
        if total == 0 {
            return Err(MatchError::UndefinedHitRate);
        }
        Ok(HitRate {
            agree: packet.agreement(entry) as u8,
            total: total as u8,
        })
    }

    pub fn numerator(&self) -> u32 {
        self.agree as u32
    }

    pub fn denominator(&self) -> u32 {
        self.total as u32
    }

    pub fn as_f64(&self) -> f64 {
        self.agree as f64 / self.total as f64
    }
}

impl fmt::Display for HitRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.agree, self.total)
    }
}

pub fn hit_rate(pkt: &PacketHeader, e: &FlowEntry) -> Result<HitRate, MatchError> {
    HitRate::between(pkt.fields(), &e.fields)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchResult<'t> {
    pub entry_id: u64,
    /// Insertion position of the entry in its table.
    pub position: usize,
    pub priority: u32,
    pub action: &'t str,
    pub hit_rate: HitRate,
    pub candidates_examined: usize,
}

impl<'t> MatchResult<'t> {
    fn new(table: &'t FlowTable, pkt: &PacketHeader, position: usize, examined: usize) -> Self {
        let e = &table.entries()[position];
        MatchResult {
            entry_id: e.id,
            position,
            priority: e.priority,
            action: &e.action,
            // packets always carry in_port, so the denominator is non-zero
            hit_rate: HitRate::between(pkt.fields(), &e.fields)
                .expect("packet header without fields"),
            candidates_examined: examined,
        }
    }
}

/// A lookup engine prepared for one table.
pub trait Matcher {
    fn lookup(&self, pkt: &PacketHeader) -> Option<MatchResult<'_>>;
}

/// Ordering key: higher priority first, then lower insertion position.
#[inline]
fn rank(priority: u32, position: usize) -> u64 {
    ((priority as u64) << 32) | (u32::MAX - position as u32) as u64
}

#[inline]
fn position_of_rank(rank: u64) -> usize {
    (u32::MAX - (rank & 0xffff_ffff) as u32) as usize
}

fn check_addressable(table: &FlowTable) -> Result<(), MatchError> {
    // position u32::MAX would collide with the "no candidate" rank of 0
    if table.len() >= u32::MAX as usize {
        return Err(MatchError::TableTooLarge(table.len()));
    }
    Ok(())
}

/// Full scan over a contiguous copy of the table's match rows.
#[derive(Debug, Clone)]
pub struct LinearMatcher<'t> {
    table: &'t FlowTable,
    rows: Vec<(FieldSet, u32)>,
}

impl<'t> LinearMatcher<'t> {
    pub fn new(table: &'t FlowTable) -> Self {
        let rows = table
            .entries()
            .iter()
            .map(|e| (e.fields, e.priority))
            .collect();
        LinearMatcher { table, rows }
    }
}

fn linear_scan<'a>(
    rows: impl Iterator<Item = (&'a FieldSet, u32)>,
    fields: &FieldSet,
) -> Option<usize> {
    let lanes = fields.probe_lanes();
    let mut best: Option<(u32, usize)> = None;
    for (i, (f, priority)) in rows.enumerate() {
        if f.matches_lanes(&lanes) && best.is_none_or(|(p, _)| priority > p) {
            best = Some((priority, i));
        }
    }
    best.map(|(_, i)| i)
}

impl Matcher for LinearMatcher<'_> {
    fn lookup(&self, pkt: &PacketHeader) -> Option<MatchResult<'_>> {
        let pos = linear_scan(self.rows.iter().map(|(f, p)| (f, *p)), pkt.fields())?;
        Some(MatchResult::new(self.table, pkt, pos, self.rows.len()))
    }
}

pub fn linear_match<'t>(table: &'t FlowTable, pkt: &PacketHeader) -> Option<MatchResult<'t>> {
    let pos = linear_scan(
        table.entries().iter().map(|e| (&e.fields, e.priority)),
        pkt.fields(),
    )?;
    Some(MatchResult::new(table, pkt, pos, table.len()))
}

#[inline]
fn masked_values(fields: &FieldSet, mask: u16) -> [u64; FIELD_COUNT] {
    let values = fields.raw_values();
    let mut out = [0u64; FIELD_COUNT];
    for i in 0..FIELD_COUNT {
        let keep = 0u64.wrapping_sub(((mask >> i) & 1) as u64);
        out[i] = values[i] & keep;
    }
    out
}

/// Entries sharing one present-field mask, hashed by their values.
#[derive(Debug, Clone)]
pub struct TupleGroup {
    mask: u16,
    max_rank: u64,
    /// Each bucket is sorted best rank first.
    buckets: FxHashMap<[u64; FIELD_COUNT], Vec<u64>>,
}

impl TupleGroup {
    pub fn mask(&self) -> u16 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.buckets.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    /// (entry position, priority) pairs stored under a projected value vector.
    pub fn probe(&self, fields: &FieldSet) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.buckets
            .get(&masked_values(fields, self.mask))
            .into_iter()
            .flatten()
            .map(|&r| (position_of_rank(r), (r >> 32) as u32))
    }
}

/// One group per distinct mask, ordered by descending best rank.
pub fn build_tuple_groups(table: &FlowTable) -> Vec<TupleGroup> {
    let mut by_mask: FxHashMap<u16, TupleGroup> = FxHashMap::default();
    let mut order = Vec::new();
    for (pos, e) in table.entries().iter().enumerate() {
        let mask = e.fields.mask();
        let group = by_mask.entry(mask).or_insert_with(|| {
            order.push(mask);
            TupleGroup {
                mask,
                max_rank: 0,
                buckets: FxHashMap::default(),
            }
        });
        let r = rank(e.priority, pos);
        group.max_rank = group.max_rank.max(r);
        group
            .buckets
            .entry(*e.fields.raw_values())
            .or_default()
            .push(r);
    }
    let mut groups: Vec<TupleGroup> = order
        .into_iter()
        .map(|m| by_mask.remove(&m).expect("group recorded"))
        .collect();
    for g in &mut groups {
        for bucket in g.buckets.values_mut() {
            bucket.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    groups.sort_by_key(|g| std::cmp::Reverse(g.max_rank));
    groups
}

#[derive(Debug, Clone)]
pub struct TupleSpaceMatcher<'t> {
    table: &'t FlowTable,
    groups: Vec<TupleGroup>,
}

impl<'t> TupleSpaceMatcher<'t> {
    pub fn new(table: &'t FlowTable) -> Result<Self, MatchError> {
        check_addressable(table)?;
        Ok(TupleSpaceMatcher {
            table,
            groups: build_tuple_groups(table),
        })
    }

    pub fn groups(&self) -> &[TupleGroup] {
        &self.groups
    }
}

fn tuple_space_lookup(groups: &[TupleGroup], fields: &FieldSet) -> Option<(u64, usize)> {
    let mut best = 0u64;
    let mut probes = 0;
    for g in groups {
        if g.max_rank <= best {
            break;
        }
        if g.mask & !fields.mask() != 0 {
            continue;
        }
        probes += 1;
        if let Some(bucket) = g.buckets.get(&masked_values(fields, g.mask)) {
            best = best.max(bucket[0]);
        }
    }
    (best != 0).then_some((best, probes))
}

impl Matcher for TupleSpaceMatcher<'_> {
    fn lookup(&self, pkt: &PacketHeader) -> Option<MatchResult<'_>> {
        let (best, probes) = tuple_space_lookup(&self.groups, pkt.fields())?;
        Some(MatchResult::new(
            self.table,
            pkt,
            position_of_rank(best),
            probes,
        ))
    }
}

/// Tuple-space search over groups built from `table`.
pub fn tuple_space_match<'t>(
    groups: &[TupleGroup],
    table: &'t FlowTable,
    pkt: &PacketHeader,
) -> Option<MatchResult<'t>> {
    let (best, probes) = tuple_space_lookup(groups, pkt.fields())?;
    Some(MatchResult::new(table, pkt, position_of_rank(best), probes))
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    fields: FieldSet,
    rank: u64,
}

#[derive(Debug, Clone)]
struct ClassBucket {
    signature: LayerSignature,
    max_rank: u64,
    /// Best rank first.
    slots: Vec<Slot>,
}

/// Dense slot for a valid signature, 180 in total.
#[inline]
fn signature_slot(sig: &LayerSignature) -> usize {
    let [a, b, c, d] = sig.counts().map(usize::from);
    ((a * 6 + b) * 5 + c) * 3 + d
}

const SIGNATURE_SLOTS: usize = 2 * 6 * 5 * 3;
const NO_CLASS: u16 = u16::MAX;

/// Layered pre-match engine.
///
/// Classes are copied out of the table into contiguous per-class arrays, so
/// a lookup touches only the rows of its candidate classes.
#[derive(Debug, Clone)]
pub struct PreMatchMatcher<'t> {
    table: &'t FlowTable,
    mode: CandidateMode,
    /// Ordered by descending best rank.
    classes: Vec<ClassBucket>,
    class_of_slot: [u16; SIGNATURE_SLOTS],
}

impl<'t> PreMatchMatcher<'t> {
    pub fn new(
        table: &'t FlowTable,
        index: &PreMatchIndex,
        mode: CandidateMode,
    ) -> Result<Self, MatchError> {
        check_addressable(table)?;
        if index.source_table_size() != table.len() {
            return Err(MatchError::IndexMismatch(format!(
                "index covers {} entries, table has {}",
                index.source_table_size(),
                table.len()
            )));
        }
        let positions: FxHashMap<u64, usize> = table
            .entries()
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id, i))
            .collect();
        let mut classes = Vec::with_capacity(index.classes().len());
        for (key, ids) in index.classes() {
            let signature = key.signature();
            let mut slots = Vec::with_capacity(ids.len());
            for id in ids {
                let &pos = positions
                    .get(id)
                    .ok_or_else(|| MatchError::IndexMismatch(format!("unknown entry id {id}")))?;
                let e = &table.entries()[pos];
                if extract_signature(&e.fields) != signature {
                    return Err(MatchError::IndexMismatch(format!(
                        "entry {id} is not in class {key}"
                    )));
                }
                slots.push(Slot {
                    fields: e.fields,
                    rank: rank(e.priority, pos),
                });
            }
            slots.sort_unstable_by_key(|s| std::cmp::Reverse(s.rank));
            let max_rank = slots.first().map_or(0, |s| s.rank);
            classes.push(ClassBucket {
                signature,
                max_rank,
                slots,
            });
        }
        classes.sort_by_key(|c| std::cmp::Reverse(c.max_rank));
        let mut class_of_slot = [NO_CLASS; SIGNATURE_SLOTS];
        for (i, c) in classes.iter().enumerate() {
            class_of_slot[signature_slot(&c.signature)] = i as u16;
        }
        Ok(PreMatchMatcher {
            table,
            mode,
            classes,
            class_of_slot,
        })
    }

    pub fn mode(&self) -> CandidateMode {
        self.mode
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Scans one class until its first match or until the remaining rows
    /// cannot beat `best`.
    #[inline]
    fn scan(class: &ClassBucket, lanes: &[u64; FIELD_COUNT], best: &mut u64, examined: &mut usize) {
        for slot in &class.slots {
            if slot.rank <= *best {
                return;
            }
            *examined += 1;
            if slot.fields.matches_lanes(lanes) {
                *best = slot.rank;
                return;
            }
        }
    }

    fn lookup_rank(&self, fields: &FieldSet) -> Option<(u64, usize)> {
        let signature = extract_signature(fields);
        let lanes = fields.probe_lanes();
        let mut best = 0u64;
        let mut examined = 0usize;
        match self.mode {
            CandidateMode::Strict => {
                let c = self.class_of_slot[signature_slot(&signature)];
                if c != NO_CLASS {
                    Self::scan(&self.classes[c as usize], &lanes, &mut best, &mut examined);
                }
            }
            CandidateMode::Dominant => {
                for class in &self.classes {
                    if class.max_rank <= best {
                        break;
                    }
                    if class.signature.dominated_by(&signature) {
                        Self::scan(class, &lanes, &mut best, &mut examined);
                    }
                }
            }
        }
        (best != 0).then_some((best, examined))
    }
}

impl Matcher for PreMatchMatcher<'_> {
    fn lookup(&self, pkt: &PacketHeader) -> Option<MatchResult<'_>> {
        let (best, examined) = self.lookup_rank(pkt.fields())?;
        Some(MatchResult::new(
            self.table,
            pkt,
            position_of_rank(best),
            examined,
        ))
    }
}

/// One-shot layered pre-match lookup; prepares the engine on every call.
pub fn fopenflow_match<'t>(
    index: &PreMatchIndex,
    table: &'t FlowTable,
    pkt: &PacketHeader,
    mode: CandidateMode,
) -> Result<Option<MatchResult<'t>>, MatchError> {
    let m = PreMatchMatcher::new(table, index, mode)?;
    Ok(m.lookup_rank(pkt.fields())
        .map(|(best, examined)| MatchResult::new(table, pkt, position_of_rank(best), examined)))
}

/// Counts `pkt` against `e`.
pub fn apply_match(e: &mut FlowEntry, pkt: &PacketHeader) -> Result<Counters, MatchError> {
    if !e.fields.matches(pkt.fields()) {
        return Err(MatchError::NotMatching(e.id));
    }
    e.counters.packet_count += 1;
    e.counters.byte_count += u64::from(pkt.byte_len());
    Ok(e.counters)
}

/// Hits and misses of a processed trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TraceCounts {
    pub packets: u64,
    pub hits: u64,
    pub misses: u64,
    pub hit_bytes: u64,
}

/// Applies per-packet lookup outcomes (entry positions) to the table's
/// counters. Runs after the lookups so the engines can borrow the table.
pub fn apply_outcomes(
    table: &mut FlowTable,
    trace: &[PacketHeader],
    outcomes: &[Option<usize>],
) -> Result<TraceCounts, MatchError> {
    let mut counts = TraceCounts::default();
    for (pkt, outcome) in trace.iter().zip(outcomes) {
        counts.packets += 1;
        match outcome {
            Some(pos) => {
                apply_match(&mut table.entries_mut()[*pos], pkt)?;
                counts.hits += 1;
                counts.hit_bytes += u64::from(pkt.byte_len());
            }
            None => counts.misses += 1,
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::build_index;
    use crate::flow::FieldName::{self, *};

    fn set(pairs: &[(FieldName, u64)]) -> FieldSet {
        FieldSet::try_from(pairs).unwrap()
    }

    fn pkt(pairs: &[(FieldName, u64)], len: u32) -> PacketHeader {
        PacketHeader::new(set(pairs), len).unwrap()
    }

    fn table(entries: Vec<(u64, u32, FieldSet)>) -> FlowTable {
        FlowTable::from_entries(
            entries
                .into_iter()
                .map(|(id, p, f)| FlowEntry::new(id, p, f, format!("act{id}")))
                .collect(),
        )
        .unwrap()
    }

    fn all_engines(t: &FlowTable, p: &PacketHeader) -> [Option<u64>; 4] {
        let index = build_index(t).unwrap();
        let groups = build_tuple_groups(t);
        [
            linear_match(t, p).map(|r| r.entry_id),
            tuple_space_match(&groups, t, p).map(|r| r.entry_id),
            fopenflow_match(&index, t, p, CandidateMode::Dominant)
                .unwrap()
                .map(|r| r.entry_id),
            PreMatchMatcher::new(t, &index, CandidateMode::Dominant)
                .unwrap()
                .lookup(p)
                .map(|r| r.entry_id),
        ]
    }

    #[test]
    fn highest_priority_wins() {
        let t = table(vec![
            (0, 10, set(&[(EthType, 0x800)])),
            (1, 20, set(&[(InPort, 1)])),
        ]);
        let p = pkt(&[(InPort, 1), (EthType, 0x800)], 64);
        assert_eq!(all_engines(&t, &p), [Some(1); 4]);
        let r = linear_match(&t, &p).unwrap();
        assert_eq!((r.priority, r.action), (20, "act1"));
    }

    #[test]
    fn ties_go_to_first_inserted() {
        let t = table(vec![
            (9, 5, set(&[(InPort, 1)])),
            (3, 5, set(&[(EthType, 7)])),
            (4, 5, FieldSet::new()),
        ]);
        let p = pkt(&[(InPort, 1), (EthType, 7)], 64);
        assert_eq!(all_engines(&t, &p), [Some(9); 4]);
    }

    #[test]
    fn empty_table_misses() {
        let t = FlowTable::new();
        let p = pkt(&[(InPort, 1)], 64);
        assert_eq!(all_engines(&t, &p), [None; 4]);
        assert!(build_tuple_groups(&t).is_empty());
        assert!(tuple_space_match(&[], &t, &p).is_none());
    }

    #[test]
    fn wildcard_entry_matches_everything() {
        let t = table(vec![(0, 1, FieldSet::new())]);
        for p in [
            pkt(&[(InPort, 3)], 64),
            pkt(&[(InPort, 3), (TpDst, 443), (IpTos, 4)], 64),
        ] {
            assert_eq!(all_engines(&t, &p), [Some(0); 4]);
        }
    }

    #[test]
    fn group_counts() {
        let t = table(vec![
            (0, 1, set(&[(EthType, 1)])),
            (1, 1, set(&[(EthType, 1), (IpSrc, 2)])),
        ]);
        assert_eq!(build_tuple_groups(&t).len(), 2);
        let t = table((0..5).map(|i| (i, 1, set(&[(EthType, i)]))).collect());
        let groups = build_tuple_groups(&t);
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].len(), 5);
        assert_eq!(groups[0].mask(), EthType.bit());
    }

    #[test]
    fn group_with_missing_field_is_skipped() {
        let t = table(vec![
            (0, 9, set(&[(TpSrc, 80)])),
            (1, 1, set(&[(InPort, 1)])),
        ]);
        let groups = build_tuple_groups(&t);
        let p = pkt(&[(InPort, 1)], 64);
        let r = tuple_space_match(&groups, &t, &p).unwrap();
        assert_eq!(r.entry_id, 1);
        assert_eq!(r.candidates_examined, 1);
    }

    #[test]
    fn strict_mode_misses_smaller_class() {
        let t = table(vec![(0, 1, FieldSet::new())]);
        let index = build_index(&t).unwrap();
        let p = pkt(&[(InPort, 1), (EthType, 2)], 64);
        assert!(fopenflow_match(&index, &t, &p, CandidateMode::Strict)
            .unwrap()
            .is_none());
        assert_eq!(
            fopenflow_match(&index, &t, &p, CandidateMode::Dominant)
                .unwrap()
                .map(|r| r.entry_id),
            Some(0)
        );
    }

    #[test]
    fn strict_mode_on_layer_example_examines_one_class() {
        let t = crate::classifier::tests::layer_example_table();
        let index = build_index(&t).unwrap();
        // same fields as the (1,1,1,1) row, so only entry 3 is a candidate
        let fields = t.entries()[2].fields;
        let p = PacketHeader::new(fields, 64).unwrap();
        let r = fopenflow_match(&index, &t, &p, CandidateMode::Strict)
            .unwrap()
            .unwrap();
        assert_eq!(r.entry_id, 3);
        assert_eq!(r.candidates_examined, 1);
        assert_eq!(r.hit_rate.as_f64(), 1.0);
    }

    #[test]
    fn hit_rate_fractions() {
        let p = pkt(&[(InPort, 1), (EthType, 2), (IpSrc, 3), (TpDst, 4)], 64);
        let half = FlowEntry::new(0, 0, set(&[(InPort, 1), (EthType, 2), (IpSrc, 9)]), "a");
        let h = hit_rate(&p, &half).unwrap();
        assert_eq!((h.numerator(), h.denominator()), (2, 4));
        assert_eq!(h.as_f64(), 0.5);
        let full = FlowEntry::new(1, 0, *p.fields(), "a");
        assert_eq!(hit_rate(&p, &full).unwrap().as_f64(), 1.0);
        let none = FlowEntry::new(2, 0, set(&[(VlanId, 3)]), "a");
        assert_eq!(hit_rate(&p, &none).unwrap().as_f64(), 0.0);
        assert_eq!(
            HitRate::between(&FieldSet::new(), &full.fields),
            Err(MatchError::UndefinedHitRate)
        );
    }

    #[test]
    fn counters() {
        let mut e = FlowEntry::new(0, 0, set(&[(InPort, 1)]), "a");
        let p64 = pkt(&[(InPort, 1)], 64);
        assert_eq!(
            apply_match(&mut e, &p64).unwrap(),
            Counters {
                packet_count: 1,
                byte_count: 64
            }
        );
        assert_eq!(apply_match(&mut e, &p64).unwrap().byte_count, 128);
        e.counters = Counters {
            packet_count: 5,
            byte_count: 320,
        };
        let c = apply_match(&mut e, &pkt(&[(InPort, 1)], 100)).unwrap();
        assert_eq!((c.packet_count, c.byte_count), (6, 420));
        assert_eq!(
            apply_match(&mut e, &pkt(&[(InPort, 2)], 100)),
            Err(MatchError::NotMatching(0))
        );
        assert_eq!(e.counters.packet_count, 6);
    }

    #[test]
    fn index_must_describe_table() {
        let t = table(vec![(0, 1, set(&[(InPort, 1)]))]);
        let other = table(vec![(5, 1, set(&[(InPort, 1)]))]);
        let index = build_index(&other).unwrap();
        assert!(matches!(
            PreMatchMatcher::new(&t, &index, CandidateMode::Dominant),
            Err(MatchError::IndexMismatch(_))
        ));
        let empty = build_index(&FlowTable::new()).unwrap();
        assert!(PreMatchMatcher::new(&t, &empty, CandidateMode::Strict).is_err());
    }

    #[test]
    fn outcomes_update_counters() {
        let mut t = table(vec![
            (0, 1, set(&[(InPort, 1)])),
            (1, 1, set(&[(InPort, 2)])),
        ]);
        let trace = vec![
            pkt(&[(InPort, 1)], 100),
            pkt(&[(InPort, 3)], 70),
            pkt(&[(InPort, 2)], 64),
            pkt(&[(InPort, 1)], 10),
        ];
        let outcomes: Vec<_> = {
            let m = LinearMatcher::new(&t);
            trace
                .iter()
                .map(|p| m.lookup(p).map(|r| r.position))
                .collect()
        };
        let counts = apply_outcomes(&mut t, &trace, &outcomes).unwrap();
        assert_eq!(counts.hits, 3);
        assert_eq!(counts.misses, 1);
        assert_eq!(counts.hit_bytes, 174);
        assert_eq!(t.entries()[0].counters.byte_count, 110);
        assert_eq!(t.entries()[1].counters.packet_count, 1);
    }
}
