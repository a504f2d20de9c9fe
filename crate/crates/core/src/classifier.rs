//! Layer signatures and the signature-keyed pre-match index.
//!
//! A signature counts how many fields of a field set fall in each of the
//! four layers; values are ignored. Entries with identical signatures form
//! one class of the pre-match index, and a packet is only compared against
//! the entries of the classes its own signature selects.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::flow::{layer_mask, FieldSet, FlowEntry, FlowTable, PacketHeader, LAYER_SIZES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("duplicate flow entry id {0} while building the index")]
    DuplicateId(u64),
    #[error("signature ({0}, {1}, {2}, {3}) exceeds the per-layer field counts 1/5/4/2")]
    InvalidSignature(u8, u8, u8, u8),
    #[error("malformed signature key `{0}`")]
    MalformedKey(String),
}

/// Present-field counts for layers 1..=4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LayerSignature([u8; 4]);

impl LayerSignature {
    pub const ZERO: LayerSignature = LayerSignature([0; 4]);
    pub const FULL: LayerSignature = LayerSignature(LAYER_SIZES);

    pub fn new(c1: u8, c2: u8, c3: u8, c4: u8) -> Result<Self, ClassifyError> {
        let counts = [c1, c2, c3, c4];
        if counts.iter().zip(LAYER_SIZES).any(|(&c, max)| c > max) {
            return Err(ClassifyError::InvalidSignature(c1, c2, c3, c4));
        }
        Ok(LayerSignature(counts))
    }

    /// Counts for layers 1..=4 as an array indexed from 0.
    #[inline]
    pub fn counts(&self) -> [u8; 4] {
        self.0
    }

    /// Count for one layer, `layer` in 1..=4.
    pub fn count(&self, layer: u8) -> u8 {
        self.0[layer as usize - 1]
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }

    /// Component-wise `self <= other`.
    #[inline]
    pub fn dominated_by(&self, other: &LayerSignature) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// Deepest layer with a non-zero count, 0 for the empty signature.
    pub fn deepest_layer(&self) -> u8 {
        (1..=4u8).rev().find(|&l| self.count(l) > 0).unwrap_or(0)
    }

    pub fn key(&self) -> SignatureKey {
        SignatureKey(*self)
    }

    /// Every valid signature, in ascending key order.
    pub fn all_valid() -> impl Iterator<Item = LayerSignature> {
        (0..=LAYER_SIZES[0]).flat_map(|c1| {
            (0..=LAYER_SIZES[1]).flat_map(move |c2| {
                (0..=LAYER_SIZES[2]).flat_map(move |c3| {
                    (0..=LAYER_SIZES[3]).map(move |c4| LayerSignature([c1, c2, c3, c4]))
                })
            })
        })
    }
}

/// Signature of a field set (entry match or packet header).
pub fn extract_signature(fields: &FieldSet) -> LayerSignature {
    let mask = fields.mask();
    let mut counts = [0u8; 4];
    for (layer, c) in (1..=4u8).zip(counts.iter_mut()) {
        *c = (mask & layer_mask(layer)).count_ones() as u8;
    }
    LayerSignature(counts)
}

pub fn packet_signature(pkt: &PacketHeader) -> LayerSignature {
    extract_signature(pkt.fields())
}

/// True when both signatures fall in the same class.
pub fn same_class(a: &LayerSignature, b: &LayerSignature) -> bool {
    a == b
}

/// Canonical `c1-c2-c3-c4` key of a signature class.
///
/// Every count is a single decimal digit, so ordering the underlying
/// signature is the same as ordering the key strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignatureKey(LayerSignature);

impl SignatureKey {
    pub fn signature(&self) -> LayerSignature {
        self.0
    }
}

pub fn signature_key(sig: &LayerSignature) -> SignatureKey {
    sig.key()
}

impl fmt::Display for SignatureKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0 .0;
        write!(f, "{a}-{b}-{c}-{d}")
    }
}

impl FromStr for SignatureKey {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ClassifyError::MalformedKey(s.to_string());
        let parts: Vec<u8> = s
            .split('-')
            .map(|p| {
                if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) {
                    Err(bad())
                } else {
                    p.parse::<u8>().map_err(|_| bad())
                }
            })
            .collect::<Result<_, _>>()?;
        let [c1, c2, c3, c4] = parts[..] else {
            return Err(bad());
        };
        Ok(LayerSignature::new(c1, c2, c3, c4)?.key())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CandidateMode {
    /// Only the class whose signature equals the packet's.
    Strict,
    /// Every class whose signature is component-wise below the packet's.
    #[default]
    Dominant,
}

impl fmt::Display for CandidateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidateMode::Strict => "strict",
            CandidateMode::Dominant => "dominant",
        })
    }
}

impl FromStr for CandidateMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(CandidateMode::Strict),
            "dominant" => Ok(CandidateMode::Dominant),
            other => Err(format!(
                "unknown mode `{other}` (expected strict or dominant)"
            )),
        }
    }
}

/// Signature classes of a flow table, each listing entry ids in table order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PreMatchIndex {
    classes: BTreeMap<SignatureKey, Vec<u64>>,
    source_table_size: usize,
}

impl PreMatchIndex {
    pub fn build(entries: &[FlowEntry]) -> Result<Self, ClassifyError> {
        let mut seen = rustc_hash::FxHashSet::default();
        let mut classes: BTreeMap<SignatureKey, Vec<u64>> = BTreeMap::new();
        for e in entries {
            if !seen.insert(e.id) {
                return Err(ClassifyError::DuplicateId(e.id));
            }
            classes
                .entry(extract_signature(&e.fields).key())
                .or_default()
                .push(e.id);
        }
        Ok(PreMatchIndex {
            classes,
            source_table_size: entries.len(),
        })
    }

    pub fn classes(&self) -> &BTreeMap<SignatureKey, Vec<u64>> {
        &self.classes
    }

    pub fn class(&self, key: &SignatureKey) -> Option<&[u64]> {
        self.classes.get(key).map(Vec::as_slice)
    }

    pub fn source_table_size(&self) -> usize {
        self.source_table_size
    }

    pub fn candidate_classes(
        &self,
        sig: &LayerSignature,
        mode: CandidateMode,
    ) -> Vec<SignatureKey> {
        match mode {
            CandidateMode::Strict => {
                let key = sig.key();
                if self.classes.contains_key(&key) {
                    vec![key]
                } else {
                    Vec::new()
                }
            }
            CandidateMode::Dominant => self
                .classes
                .keys()
                .filter(|k| k.signature().dominated_by(sig))
                .copied()
                .collect(),
        }
    }

    pub fn class_stats(&self) -> ClassStats {
        let mut layers: [Vec<u64>; 5] = Default::default();
        for (key, ids) in &self.classes {
            layers[key.signature().deepest_layer() as usize].extend_from_slice(ids);
        }
        for ids in &mut layers {
            ids.sort_unstable();
        }
        ClassStats { layers }
    }
}

pub fn build_index(table: &FlowTable) -> Result<PreMatchIndex, ClassifyError> {
    PreMatchIndex::build(table.entries())
}

pub fn candidate_classes(
    sig: &LayerSignature,
    index: &PreMatchIndex,
    mode: CandidateMode,
) -> Vec<SignatureKey> {
    index.candidate_classes(sig, mode)
}

pub fn class_stats(index: &PreMatchIndex) -> ClassStats {
    index.class_stats()
}

/// Entries grouped by their deepest non-empty layer.
///
/// Bucket 0 holds all-wildcard entries.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClassStats {
    layers: [Vec<u64>; 5],
}

impl ClassStats {
    /// Sorted ids of the entries whose deepest layer is `layer` (0..=4).
    pub fn ids(&self, layer: u8) -> &[u64] {
        &self.layers[layer as usize]
    }

    pub fn table_count(&self, layer: u8) -> usize {
        self.layers[layer as usize].len()
    }

    /// Counts for layers 1..=4.
    pub fn layer_counts(&self) -> [usize; 4] {
        [1, 2, 3, 4].map(|l| self.table_count(l))
    }

    pub fn total(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }
}
