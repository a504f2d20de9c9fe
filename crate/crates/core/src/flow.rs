//! The 12-tuple match model: field names, field sets, packets and flow entries.
//!
//! A [`FieldSet`] is a partial assignment of the twelve match fields. In a
//! flow entry an absent field is a full wildcard; in a packet an absent field
//! means the header simply does not carry it (no VLAN tag, no transport
//! ports, ...). There are no bit masks: a present field must match exactly.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Number of match fields in the model.
pub const FIELD_COUNT: usize = 12;

/// Number of protocol layers the fields are grouped into.
pub const LAYER_COUNT: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("unknown field name `{0}`")]
    UnknownField(String),
    #[error("value {value} does not fit the {bits}-bit field {field}")]
    ValueTooWide {
        field: FieldName,
        value: u64,
        bits: u32,
    },
    #[error("field {0} given more than once")]
    DuplicateField(FieldName),
    #[error("packet header must carry in_port")]
    MissingInPort,
    #[error("packet byte length must be at least 1")]
    ZeroLength,
    #[error("duplicate flow entry id {0}")]
    DuplicateId(u64),
}

/// One of the twelve match fields, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum FieldName {
    InPort = 0,
    EthSrc,
    EthDst,
    EthType,
    VlanId,
    VlanPcp,
    IpSrc,
    IpDst,
    IpProto,
    IpTos,
    TpSrc,
    TpDst,
}

impl FieldName {
    pub const ALL: [FieldName; FIELD_COUNT] = [
        FieldName::InPort,
        FieldName::EthSrc,
        FieldName::EthDst,
        FieldName::EthType,
        FieldName::VlanId,
        FieldName::VlanPcp,
        FieldName::IpSrc,
        FieldName::IpDst,
        FieldName::IpProto,
        FieldName::IpTos,
        FieldName::TpSrc,
        FieldName::TpDst,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Option<FieldName> {
        Self::ALL.get(i).copied()
    }

    /// TCP/IP layer (1..=4) the field belongs to.
    pub fn layer(self) -> u8 {
        use FieldName::*;
        match self {
            InPort => 1,
            EthSrc | EthDst | EthType | VlanId | VlanPcp => 2,
            IpSrc | IpDst | IpProto | IpTos => 3,
            TpSrc | TpDst => 4,
        }
    }

    pub fn bit_width(self) -> u32 {
        use FieldName::*;
        match self {
            InPort | EthType | TpSrc | TpDst => 16,
            EthSrc | EthDst => 48,
            VlanId => 12,
            VlanPcp => 3,
            IpSrc | IpDst => 32,
            IpProto => 8,
            IpTos => 6,
        }
    }

    /// Largest value representable in the field.
    pub fn max_value(self) -> u64 {
        (1u64 << self.bit_width()) - 1
    }

    pub fn as_str(self) -> &'static str {
        use FieldName::*;
        match self {
            InPort => "in_port",
            EthSrc => "eth_src",
            EthDst => "eth_dst",
            EthType => "eth_type",
            VlanId => "vlan_id",
            VlanPcp => "vlan_pcp",
            IpSrc => "ip_src",
            IpDst => "ip_dst",
            IpProto => "ip_proto",
            IpTos => "ip_tos",
            TpSrc => "tp_src",
            TpDst => "tp_dst",
        }
    }

    #[inline]
    pub(crate) fn bit(self) -> u16 {
        1 << self.index()
    }
}

impl fmt::Display for FieldName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FieldName {
    type Err = FlowError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FieldName::ALL
            .iter()
            .copied()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| FlowError::UnknownField(s.to_string()))
    }
}

/// Layer index (1..=4) of a field.
pub fn field_layer(f: FieldName) -> u8 {
    f.layer()
}

/// Bit mask over field indices of the fields that belong to `layer` (1..=4).
pub const fn layer_mask(layer: u8) -> u16 {
    match layer {
        1 => 0b0000_0000_0001,
        2 => 0b0000_0011_1110,
        3 => 0b0011_1100_0000,
        4 => 0b1100_0000_0000,
        _ => 0,
    }
}

/// Number of fields in each layer, layers 1..=4.
pub const LAYER_SIZES: [u8; LAYER_COUNT] = [1, 5, 4, 2];

/// Partial assignment of the twelve match fields.
///
/// Values of absent fields are kept at zero so that derived equality and
/// hashing only see present values.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FieldSet {
    present: u16,
    values: [u64; FIELD_COUNT],
}

impl FieldSet {
    pub const fn new() -> Self {
        FieldSet {
            present: 0,
            values: [0; FIELD_COUNT],
        }
    }

    /// Sets `field` to `value`, replacing any previous value.
    pub fn set(&mut self, field: FieldName, value: u64) -> Result<(), FlowError> {
        if value > field.max_value() {
            return Err(FlowError::ValueTooWide {
                field,
                value,
                bits: field.bit_width(),
            });
        }
        self.present |= field.bit();
        self.values[field.index()] = value;
        Ok(())
    }

    /// Builder form of [`FieldSet::set`].
    pub fn with(mut self, field: FieldName, value: u64) -> Result<Self, FlowError> {
        self.set(field, value)?;
        Ok(self)
    }

    pub fn remove(&mut self, field: FieldName) -> Option<u64> {
        let old = self.get(field);
        self.present &= !field.bit();
        self.values[field.index()] = 0;
        old
    }

    #[inline]
    pub fn get(&self, field: FieldName) -> Option<u64> {
        self.contains(field).then(|| self.values[field.index()])
    }

    #[inline]
    pub fn contains(&self, field: FieldName) -> bool {
        self.present & field.bit() != 0
    }

    /// Bit mask of present fields, bit `i` for `FieldName::ALL[i]`.
    #[inline]
    pub fn mask(&self) -> u16 {
        self.present
    }

    #[inline]
    pub(crate) fn raw_values(&self) -> &[u64; FIELD_COUNT] {
        &self.values
    }

    /// Number of present fields.
    #[inline]
    pub fn tuple_length(&self) -> usize {
        self.present.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.present == 0
    }

    pub fn fields(&self) -> impl Iterator<Item = FieldName> + '_ {
        FieldName::ALL
            .iter()
            .copied()
            .filter(move |f| self.contains(*f))
    }

    pub fn iter(&self) -> impl Iterator<Item = (FieldName, u64)> + '_ {
        self.fields().map(move |f| (f, self.values[f.index()]))
    }

    /// Restriction of `self` to the fields in `mask`.
    pub fn project(&self, mask: u16) -> FieldSet {
        let mut out = FieldSet::new();
        out.present = self.present & mask;
        for i in 0..FIELD_COUNT {
            if out.present & (1 << i) != 0 {
                out.values[i] = self.values[i];
            }
        }
        out
    }

    /// Values with absent lanes set to a pattern no field value can take.
    #[inline]
    pub(crate) fn probe_lanes(&self) -> [u64; FIELD_COUNT] {
        let mut lanes = self.values;
        for (i, lane) in lanes.iter_mut().enumerate() {
            if self.present & (1 << i) == 0 {
                *lane = u64::MAX;
            }
        }
        lanes
    }

    /// [`FieldSet::matches`] against lanes from [`FieldSet::probe_lanes`].
    #[inline]
    pub(crate) fn matches_lanes(&self, lanes: &[u64; FIELD_COUNT]) -> bool {
        let mut rest = self.present;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            if self.values[i] != lanes[i] {
                return false;
            }
            rest &= rest - 1;
        }
        true
    }

    /// Number of fields present in both sets with equal values.
    #[inline]
    pub fn agreement(&self, other: &FieldSet) -> usize {
        let both = self.present & other.present;
        let mut eq = 0u16;
        for i in 0..FIELD_COUNT {
            eq |= ((self.values[i] == other.values[i]) as u16) << i;
        }
        (both & eq).count_ones() as usize
    }

    /// True iff every field of `self` is present in `pkt` with the same value.
    #[inline]
    pub fn matches(&self, pkt: &FieldSet) -> bool {
        if self.present & !pkt.present != 0 {
            return false;
        }
        self.matches_lanes(&pkt.values)
    }
}

impl fmt::Debug for FieldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter()).finish()
    }
}

impl TryFrom<&[(FieldName, u64)]> for FieldSet {
    type Error = FlowError;

    fn try_from(pairs: &[(FieldName, u64)]) -> Result<Self, Self::Error> {
        let mut set = FieldSet::new();
        for &(f, v) in pairs {
            if set.contains(f) {
                return Err(FlowError::DuplicateField(f));
            }
            set.set(f, v)?;
        }
        Ok(set)
    }
}

impl Serialize for FieldSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.tuple_length()))?;
        for (f, v) in self.iter() {
            map.serialize_entry(f.as_str(), &v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for FieldSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct FieldSetVisitor;

        impl<'de> Visitor<'de> for FieldSetVisitor {
            type Value = FieldSet;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map of match field names to unsigned integers")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<FieldSet, A::Error> {
                let mut set = FieldSet::new();
                while let Some(name) = access.next_key::<String>()? {
                    let field: FieldName = name.parse().map_err(de::Error::custom)?;
                    if set.contains(field) {
                        return Err(de::Error::custom(FlowError::DuplicateField(field)));
                    }
                    let value: u64 = access.next_value()?;
                    set.set(field, value).map_err(de::Error::custom)?;
                }
                Ok(set)
            }
        }

        deserializer.deserialize_map(FieldSetVisitor)
    }
}

/// Number of present fields of a match set.
pub fn tuple_length(m: &FieldSet) -> usize {
    m.tuple_length()
}

/// Wildcard match of an entry's field set against a packet.
pub fn matches(entry_match: &FieldSet, pkt: &PacketHeader) -> bool {
    entry_match.matches(&pkt.fields)
}

/// Header fields of one concrete packet plus its length on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PacketHeader {
    fields: FieldSet,
    byte_len: u32,
}

impl PacketHeader {
    pub fn new(fields: FieldSet, byte_len: u32) -> Result<Self, FlowError> {
        if !fields.contains(FieldName::InPort) {
            return Err(FlowError::MissingInPort);
        }
        if byte_len == 0 {
            return Err(FlowError::ZeroLength);
        }
        Ok(PacketHeader { fields, byte_len })
    }

    #[inline]
    pub fn fields(&self) -> &FieldSet {
        &self.fields
    }

    #[inline]
    pub fn byte_len(&self) -> u32 {
        self.byte_len
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Counters {
    pub packet_count: u64,
    pub byte_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowEntry {
    pub id: u64,
    pub priority: u32,
    pub fields: FieldSet,
    pub action: String,
    pub counters: Counters,
}

impl FlowEntry {
    pub fn new(id: u64, priority: u32, fields: FieldSet, action: impl Into<String>) -> Self {
        FlowEntry {
            id,
            priority,
            fields,
            action: action.into(),
            counters: Counters::default(),
        }
    }
}

/// Flow entries in insertion order with distinct ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlowTable {
    entries: Vec<FlowEntry>,
}

impl FlowTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<FlowEntry>) -> Result<Self, FlowError> {
        let mut seen = rustc_hash::FxHashSet::default();
        for e in &entries {
            if !seen.insert(e.id) {
                return Err(FlowError::DuplicateId(e.id));
            }
        }
        Ok(FlowTable { entries })
    }

    pub fn push(&mut self, entry: FlowEntry) -> Result<(), FlowError> {
        if self.entries.iter().any(|e| e.id == entry.id) {
            return Err(FlowError::DuplicateId(entry.id));
        }
        self.entries.push(entry);
        Ok(())
    }

    #[inline]
    pub fn entries(&self) -> &[FlowEntry] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [FlowEntry] {
        &mut self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position_of(&self, id: u64) -> Option<usize> {
        self.entries.iter().position(|e| e.id == id)
    }
}
