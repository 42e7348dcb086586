//! Mode labels, mode sets, occupation patterns and partitions.
//!
//! Matrix indices follow the lexicographic order of occupation patterns with
//! the smallest mode label as the most significant bit. For a mode set of
//! size `n`, the mode at position `r` (0-based, increasing label) owns bit
//! `n - 1 - r` of the index. Larger labels therefore sit on lower bits, and
//! "later in Jordan-Wigner order" means "lower bit".

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest mode set accepted by [`ModeSet::new`].
pub const DEFAULT_MODE_CAP: usize = 16;

/// A global mode label (position in the Jordan-Wigner order, starting at 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeLabel(u32);

impl ModeLabel {
    pub fn new(value: u32) -> Result<Self> {
        if value == 0 {
            return Err(Error::Domain("mode labels start at 1".into()));
        }
        Ok(ModeLabel(value))
    }

    pub fn value(self) -> u32 {
        self.0
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A subsystem: strictly increasing list of mode labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeSet {
    labels: Vec<u32>,
}

impl ModeSet {
    /// Builds a mode set from labels in any order, capped at [`DEFAULT_MODE_CAP`].
    pub fn new<I: IntoIterator<Item = u32>>(labels: I) -> Result<Self> {
        Self::with_cap(labels, DEFAULT_MODE_CAP)
    }

    pub fn with_cap<I: IntoIterator<Item = u32>>(labels: I, cap: usize) -> Result<Self> {
        let mut labels: Vec<u32> = labels.into_iter().collect();
        labels.sort_unstable();
        if labels.first() == Some(&0) {
            return Err(Error::Domain("mode labels start at 1".into()));
        }
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain(format!("duplicate mode label in {labels:?}")));
        }
        if labels.len() > cap {
            return Err(Error::Cap(format!("{} modes exceed the cap of {cap}", labels.len())));
        }
        Ok(ModeSet { labels })
    }

    pub fn empty() -> Self {
        ModeSet { labels: Vec::new() }
    }

    /// The contiguous set {1, ..., n}.
    pub fn range(n: u32) -> Result<Self> {
        Self::new(1..=n)
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Hilbert space dimension `2^|Y|`.
    pub fn dim(&self) -> usize {
        1usize << self.labels.len()
    }

    pub fn contains(&self, label: u32) -> bool {
        self.labels.binary_search(&label).is_ok()
    }

    pub fn position(&self, label: u32) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    /// Index bit owned by `label`.
    pub fn bit_of(&self, label: u32) -> Option<u32> {
        self.position(label).map(|r| (self.len() - 1 - r) as u32)
    }

    pub fn is_subset(&self, other: &ModeSet) -> bool {
        self.labels.iter().all(|&l| other.contains(l))
    }

    pub fn is_disjoint(&self, other: &ModeSet) -> bool {
        self.labels.iter().all(|&l| !other.contains(l))
    }

    /// Union of two sets; the result is not capped.
    pub fn union(&self, other: &ModeSet) -> ModeSet {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().copied().filter(|&l| !self.contains(l)));
        labels.sort_unstable();
        ModeSet { labels }
    }

    /// Labels of `self` not in `other`.
    pub fn difference(&self, other: &ModeSet) -> ModeSet {
        ModeSet { labels: self.labels.iter().copied().filter(|&l| !other.contains(l)).collect() }
    }

    /// Bit mask of `self` inside the index space of `outer`.
    pub fn mask_in(&self, outer: &ModeSet) -> Result<usize> {
        let mut mask = 0usize;
        for &l in &self.labels {
            let bit = outer.bit_of(l).ok_or_else(|| Error::Domain(format!("mode {l} is not in {outer}")))?;
            mask |= 1 << bit;
        }
        Ok(mask)
    }

    /// All subsets, in order of their bit mask within `self`.
    pub fn subsets(&self) -> Vec<ModeSet> {
        (0..self.dim())
            .map(|m| ModeSet {
                labels: self
                    .labels
                    .iter()
                    .enumerate()
                    .filter(|(r, _)| m >> (self.len() - 1 - r) & 1 == 1)
                    .map(|(_, &l)| l)
                    .collect(),
            })
            .collect()
    }
}

impl fmt::Display for ModeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner: Vec<String> = self.labels.iter().map(u32::to_string).collect();
        write!(f, "{{{}}}", inner.join(","))
    }
}

impl FromStr for ModeSet {
    type Err = Error;

    /// Parses `"{1,3,4}"`; `"{}"` is the empty set.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let body = t
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("expected {{...}}, got {s:?}")))?;
        if body.trim().is_empty() {
            return Ok(ModeSet::empty());
        }
        let labels = body
            .split(',')
            .map(|x| x.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad mode label {x:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        ModeSet::new(labels)
    }
}

/// Gathers the bits of `x` selected by `mask` into the low bits, keeping order.
#[inline]
pub fn extract_bits(x: usize, mask: usize) -> usize {
    let (mut out, mut m, mut k) = (0usize, mask, 0u32);
    while m != 0 {
        let low = m & m.wrapping_neg();
        if x & low != 0 {
            out |= 1 << k;
        }
        k += 1;
        m ^= low;
    }
    out
}

/// Inverse of [`extract_bits`]: scatters the low bits of `x` onto `mask`.
#[inline]
pub fn deposit_bits(x: usize, mask: usize) -> usize {
    let (mut out, mut m, mut k) = (0usize, mask, 0u32);
    while m != 0 {
        let low = m & m.wrapping_neg();
        if x >> k & 1 == 1 {
            out |= low;
        }
        k += 1;
        m ^= low;
    }
    out
}

/// Occupation pattern on a mode set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OccPattern {
    modes: ModeSet,
    index: usize,
}

impl OccPattern {
    /// Bits are given in increasing label order.
    pub fn new(modes: &ModeSet, bits: &[u8]) -> Result<Self> {
        if bits.len() != modes.len() {
            return Err(Error::Domain(format!("{} bits given for {} modes", bits.len(), modes.len())));
        }
        let mut index = 0usize;
        for &b in bits {
            if b > 1 {
                return Err(Error::Domain(format!("occupation {b} is not 0 or 1")));
            }
            index = index << 1 | b as usize;
        }
        Ok(OccPattern { modes: modes.clone(), index })
    }

    /// Parses a bitstring such as `"011"` in increasing label order.
    pub fn parse(modes: &ModeSet, s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(format!("bad occupation bit {c:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(modes, &bits)
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    /// Occupation of `label`, if it is in the domain.
    pub fn get(&self, label: u32) -> Option<u8> {
        self.modes.bit_of(label).map(|b| (self.index >> b & 1) as u8)
    }

    /// Bits in increasing label order.
    pub fn bits(&self) -> Vec<u8> {
        let n = self.modes.len();
        (0..n).map(|r| (self.index >> (n - 1 - r) & 1) as u8).collect()
    }

    /// Number of occupied modes.
    pub fn weight(&self) -> u32 {
        self.index.count_ones()
    }
}

impl fmt::Display for OccPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Matrix index of `nu` in the lexicographic order over `y`.
pub fn pattern_index(y: &ModeSet, nu: &OccPattern) -> Result<usize> {
    if nu.modes() != y {
        return Err(Error::Domain(format!("pattern on {} used with {y}", nu.modes())));
    }
    Ok(nu.index)
}

/// Inverse of [`pattern_index`].
pub fn index_pattern(y: &ModeSet, index: usize) -> Result<OccPattern> {
    if index >= y.dim() {
        return Err(Error::Domain(format!("index {index} out of range for {y}")));
    }
    Ok(OccPattern { modes: y.clone(), index })
}

/// Restriction of `nu` to the subset `x`.
pub fn restrict(nu: &OccPattern, x: &ModeSet) -> Result<OccPattern> {
    let mask = x.mask_in(nu.modes()).map_err(|_| Error::Domain(format!("{x} is not a subset of {}", nu.modes())))?;
    Ok(OccPattern { modes: x.clone(), index: extract_bits(nu.index, mask) })
}

/// True iff `parts` are nonempty, pairwise disjoint and cover `y`.
pub fn validate_partition(y: &ModeSet, parts: &[ModeSet]) -> bool {
    if parts.iter().any(ModeSet::is_empty) {
        return false;
    }
    let total: usize = parts.iter().map(ModeSet::len).sum();
    let union = parts.iter().fold(ModeSet::empty(), |acc, p| acc.union(p));
    total == union.len() && &union == y
}

fn check_parts(parts: &[ModeSet]) -> Result<ModeSet> {
    let union = parts.iter().fold(ModeSet::empty(), |acc, p| acc.union(p));
    if !validate_partition(&union, parts) {
        let shown: Vec<String> = parts.iter().map(ToString::to_string).collect();
        return Err(Error::Partition(format!("parts must be nonempty and disjoint: {}", shown.join("|"))));
    }
    if union.len() > DEFAULT_MODE_CAP {
        return Err(Error::Cap(format!("{} modes exceed the cap", union.len())));
    }
    Ok(union)
}

/// Unordered partition; parts are kept sorted by their smallest label.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<ModeSet>,
    modes: ModeSet,
}

impl Partition {
    pub fn new(mut parts: Vec<ModeSet>) -> Result<Self> {
        let modes = check_parts(&parts)?;
        parts.sort();
        Ok(Partition { parts, modes })
    }

    /// Builds a partition and checks that it covers `y`.
    pub fn of(y: &ModeSet, parts: Vec<ModeSet>) -> Result<Self> {
        let p = Self::new(parts)?;
        if &p.modes != y {
            return Err(Error::Partition(format!("parts cover {} instead of {y}", p.modes)));
        }
        Ok(p)
    }

    pub fn parts(&self) -> &[ModeSet] {
        &self.parts
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    /// The ordered partition listing parts by smallest label.
    pub fn canonical_order(&self) -> OrderedPartition {
        OrderedPartition { parts: self.parts.clone(), modes: self.modes.clone() }
    }

    /// Bit mask of each part within `modes()`, in part order.
    pub fn masks(&self) -> Vec<usize> {
        masks_of(&self.parts, &self.modes)
    }
}

/// Ordered partition; the tuple order is significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderedPartition {
    parts: Vec<ModeSet>,
    modes: ModeSet,
}

impl OrderedPartition {
    pub fn new(parts: Vec<ModeSet>) -> Result<Self> {
        let modes = check_parts(&parts)?;
        Ok(OrderedPartition { parts, modes })
    }

    pub fn of(y: &ModeSet, parts: Vec<ModeSet>) -> Result<Self> {
        let p = Self::new(parts)?;
        if &p.modes != y {
            return Err(Error::Partition(format!("parts cover {} instead of {y}", p.modes)));
        }
        Ok(p)
    }

    pub fn parts(&self) -> &[ModeSet] {
        &self.parts
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    pub fn unordered(&self) -> Partition {
        let mut parts = self.parts.clone();
        parts.sort();
        Partition { parts, modes: self.modes.clone() }
    }

    /// True when each part is a contiguous run of `modes` and parts appear in
    /// increasing order.
    pub fn is_jw_contiguous(&self) -> bool {
        let flat: Vec<u32> = self.parts.iter().flat_map(|p| p.labels().iter().copied()).collect();
        flat == self.modes.labels()
    }

    /// Bit mask of each part within `modes()`, in part order.
    pub fn masks(&self) -> Vec<usize> {
        masks_of(&self.parts, &self.modes)
    }
}

fn masks_of(parts: &[ModeSet], modes: &ModeSet) -> Vec<usize> {
    parts.iter().map(|p| p.mask_in(modes).expect("part of its own union")).collect()
}

/// Parses `"{1,3}|{2}"` into its parts, in textual order.
pub fn parse_parts(s: &str) -> Result<Vec<ModeSet>> {
    s.split('|').map(str::parse).collect()
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<String> = self.parts.iter().map(ToString::to_string).collect();
        write!(f, "{}", shown.join("|"))
    }
}

impl fmt::Display for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<String> = self.parts.iter().map(ToString::to_string).collect();
        write!(f, "{}", shown.join("|"))
    }
}

impl FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Partition::new(parse_parts(s)?)
    }
}

impl FromStr for OrderedPartition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        OrderedPartition::new(parse_parts(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(s: &str) -> ModeSet {
        s.parse().unwrap()
    }

    #[test]
    fn index_examples() {
        let y = ms("{1,2}");
        let nu = OccPattern::new(&y, &[1, 0]).unwrap();
        assert_eq!(pattern_index(&y, &nu).unwrap(), 2);

        let y = ms("{2,5}");
        let nu = OccPattern::new(&y, &[0, 1]).unwrap();
        assert_eq!(nu.get(5), Some(1));
        assert_eq!(pattern_index(&y, &nu).unwrap(), 1);

        let e = ModeSet::empty();
        let nu = OccPattern::new(&e, &[]).unwrap();
        assert_eq!(pattern_index(&e, &nu).unwrap(), 0);
    }

    #[test]
    fn domain_mismatch() {
        let nu = OccPattern::new(&ms("{1,2}"), &[1, 1]).unwrap();
        assert!(matches!(pattern_index(&ms("{1,3}"), &nu), Err(Error::Domain(_))));
        assert!(matches!(restrict(&nu, &ms("{3}")), Err(Error::Domain(_))));
    }

    #[test]
    fn restrict_examples() {
        let y = ms("{1,2,3}");
        let nu = OccPattern::parse(&y, "011").unwrap();
        assert_eq!(restrict(&nu, &ms("{1,3}")).unwrap().bits(), vec![0, 1]);
        assert_eq!(restrict(&nu, &y).unwrap(), nu);
        assert_eq!(restrict(&nu, &ModeSet::empty()).unwrap().bits(), Vec::<u8>::new());
    }

    #[test]
    fn partition_examples() {
        let y = ms("{1,2,3}");
        assert!(validate_partition(&y, &[ms("{1,3}"), ms("{2}")]));
        assert!(!validate_partition(&y, &[ms("{1}"), ms("{2}")]));
        assert!(!validate_partition(&ms("{1,2}"), &[ms("{1,2}"), ms("{2}")]));
        assert!(!validate_partition(&y, &[ms("{1,2,3}"), ModeSet::empty()]));
    }

    #[test]
    fn parsing() {
        assert_eq!(ms("{ 3, 1 ,4}").labels(), &[1, 3, 4]);
        assert!(ms("{}").is_empty());
        assert!("1,2".parse::<ModeSet>().is_err());
        assert!("{1,1}".parse::<ModeSet>().is_err());
        assert!("{0}".parse::<ModeSet>().is_err());
        let p: OrderedPartition = "{2}|{1,3}".parse().unwrap();
        assert_eq!(p.parts()[0], ms("{2}"));
        assert_eq!(p.to_string(), "{2}|{1,3}");
        let q: Partition = "{2}|{1,3}".parse().unwrap();
        assert_eq!(q.to_string(), "{1,3}|{2}");
        assert!("{1,2}|{2}".parse::<Partition>().is_err());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(ModeSet::range(17), Err(Error::Cap(_))));
        assert!(ModeSet::with_cap(1..=17, 20).is_ok());
    }

    #[test]
    fn bit_helpers_round_trip() {
        for mask in [0b1011usize, 0b0110, 0b1111, 0] {
            for x in 0..(1usize << mask.count_ones()) {
                assert_eq!(extract_bits(deposit_bits(x, mask), mask), x);
            }
        }
    }

    #[test]
    fn contiguity() {
        let p: OrderedPartition = "{1,2}|{3}".parse().unwrap();
        assert!(p.is_jw_contiguous());
        let p: OrderedPartition = "{1,3}|{2}".parse().unwrap();
        assert!(!p.is_jw_contiguous());
        let p: OrderedPartition = "{3}|{1,2}".parse().unwrap();
        assert!(!p.is_jw_contiguous());
    }
}
