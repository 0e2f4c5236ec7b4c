//! Subset and set-partition combinatorics.
//!
//! Sites are labeled `1..=n`. A [`SiteSet`] is a sorted subset of labels,
//! a [`Partition`] a set of disjoint nonempty blocks covering `1..=n`,
//! canonicalized by sorting blocks by their smallest element. Partition
//! enumeration uses restricted-growth strings, so [`set_partitions`] yields
//! a deterministic order and exactly `stirling(n, m)` entries.
//!
//! [`orbit_reduce`] groups partitions into orbits under a site-relabeling
//! group, which cuts the partition product in the measure pipeline down to
//! one representative per orbit.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

/// Maximum constituent count supported by the exact Stirling evaluation.
pub const MAX_SITES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("block count out of range: need 1 <= m <= n, got n={n}, m={m}")]
    InvalidRange { n: usize, m: usize },
    #[error("site count {0} exceeds the supported maximum {MAX_SITES}")]
    TooManySites(usize),
    #[error("site labels must be distinct, nonzero and 1-based")]
    BadSiteSet,
    #[error("blocks must be nonempty, disjoint and cover 1..=n")]
    BadPartition,
    #[error("permutation images must be a bijection on 1..=n")]
    NotABijection,
    #[error("permutation set is not a group (missing identity or not closed)")]
    NotAGroup,
    #[error("group closure exceeded {0} elements")]
    ClosureTooLarge(usize),
}

/// A sorted set of 1-based site labels.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteSet {
    members: Vec<usize>,
}

impl SiteSet {
    /// Builds a set from arbitrary-order labels. Rejects duplicates and 0.
    pub fn new(mut labels: Vec<usize>) -> Result<Self, PartitionError> {
        labels.sort_unstable();
        if labels.first() == Some(&0) {
            return Err(PartitionError::BadSiteSet);
        }
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(PartitionError::BadSiteSet);
        }
        Ok(Self { members: labels })
    }

    /// The full set `{1..=n}`.
    pub fn full(n: usize) -> Self {
        Self {
            members: (1..=n).collect(),
        }
    }

    pub fn singleton(site: usize) -> Self {
        Self {
            members: vec![site],
        }
    }

    /// Decodes a bitmask where bit `i` stands for site `i + 1`.
    pub fn from_mask(mask: u32) -> Self {
        let members = (0..32).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
        Self { members }
    }

    /// Bitmask with bit `i` set for site `i + 1`.
    pub fn mask(&self) -> u32 {
        self.members.iter().fold(0, |m, &s| m | 1 << (s - 1))
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, site: usize) -> bool {
        self.members.binary_search(&site).is_ok()
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.mask() & other.mask() == 0
    }

    /// Complement with regard to `{1..=n}`.
    pub fn complement(&self, n: usize) -> Self {
        Self {
            members: (1..=n).filter(|s| !self.contains(*s)).collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut members: Vec<usize> = self.members.iter().chain(&other.members).copied().collect();
        members.sort_unstable();
        members.dedup();
        Self { members }
    }

    pub fn max_site(&self) -> Option<usize> {
        self.members.last().copied()
    }
}

/// All `2^|universe| - 1` nonempty subsets of `universe`, in mask order
/// (subsets of earlier elements first).
pub fn nonempty_subsets(universe: &SiteSet) -> Vec<SiteSet> {
    let elems = universe.members();
    let k = elems.len();
    (1u32..(1 << k))
        .map(|mask| {
            let members = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| elems[b]).collect();
            SiteSet { members }
        })
        .collect()
}

/// An unordered set of disjoint nonempty blocks covering `{1..=n}`,
/// stored with blocks sorted by smallest element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    blocks: Vec<SiteSet>,
}

impl Partition {
    /// Canonicalizes and validates: blocks nonempty, pairwise disjoint,
    /// union exactly `{1..=n}`.
    pub fn new(blocks: Vec<SiteSet>, n: usize) -> Result<Self, PartitionError> {
        let mut blocks = blocks;
        blocks.sort();
        if blocks.iter().any(SiteSet::is_empty) {
            return Err(PartitionError::BadPartition);
        }
        let mut seen = 0u32;
        for b in &blocks {
            let m = b.mask();
            if seen & m != 0 {
                return Err(PartitionError::BadPartition);
            }
            seen |= m;
        }
        if n >= 32 || seen != (1u32 << n) - 1 {
            return Err(PartitionError::BadPartition);
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[SiteSet] {
        &self.blocks
    }

    /// Number of blocks, written `m` throughout the measure pipeline.
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(SiteSet::len).sum()
    }

    /// Image under a site relabeling, re-canonicalized.
    pub fn relabel(&self, perm: &SitePermutation) -> Self {
        let mut blocks: Vec<SiteSet> = self
            .blocks
            .iter()
            .map(|b| {
                let mut members: Vec<usize> = b.members().iter().map(|&s| perm.image(s)).collect();
                members.sort_unstable();
                SiteSet { members }
            })
            .collect();
        blocks.sort();
        Self { blocks }
    }
}

/// All partitions of `{1..=n}` into exactly `m` nonempty unordered blocks,
/// generated via restricted-growth strings in lexicographic string order.
pub fn set_partitions(n: usize, m: usize) -> Result<Vec<Partition>, PartitionError> {
    if m < 1 || m > n {
        return Err(PartitionError::InvalidRange { n, m });
    }
    if n > MAX_SITES {
        return Err(PartitionError::TooManySites(n));
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    descend(&mut rgs, 1, 1, n, m, &mut out);
    Ok(out)
}

fn descend(rgs: &mut [usize], pos: usize, used: usize, n: usize, m: usize, out: &mut Vec<Partition>) {
    if pos == n {
        if used == m {
            out.push(partition_from_rgs(rgs, m));
        }
        return;
    }
    // Remaining positions must still be able to reach exactly m classes.
    let remaining = n - pos;
    for class in 0..=used.min(m - 1) {
        let used_next = used.max(class + 1);
        if used_next > m || used_next + remaining - 1 < m {
            continue;
        }
        rgs[pos] = class;
        descend(rgs, pos + 1, used_next, n, m, out);
    }
}

fn partition_from_rgs(rgs: &[usize], m: usize) -> Partition {
    let mut blocks = vec![Vec::new(); m];
    for (i, &class) in rgs.iter().enumerate() {
        blocks[class].push(i + 1);
    }
    // Classes are numbered by first occurrence, so blocks are already
    // sorted by smallest element.
    Partition {
        blocks: blocks.into_iter().map(|members| SiteSet { members }).collect(),
    }
}

/// Stirling number of the second kind `S(n, m)` by the alternating sum,
/// evaluated in exact integer arithmetic.
pub fn stirling(n: usize, m: usize) -> Result<u64, PartitionError> {
    if m < 1 || m > n {
        return Err(PartitionError::InvalidRange { n, m });
    }
    if n > MAX_SITES {
        return Err(PartitionError::TooManySites(n));
    }
    let mut sum: i128 = 0;
    for k in 1..=m {
        let term = binomial(m, k) as i128 * pow_u128(k as u128, n) as i128;
        if (m - k) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let mfact = factorial(m) as i128;
    debug_assert!(sum >= 0 && sum % mfact == 0);
    Ok((sum / mfact) as u64)
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

fn binomial(n: usize, k: usize) -> u128 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn pow_u128(base: u128, exp: usize) -> u128 {
    let mut acc = 1u128;
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// A bijection on `{1..=n}`, stored as the image list `images[i-1] = π(i)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SitePermutation {
    images: Vec<usize>,
}

impl SitePermutation {
    pub fn new(images: Vec<usize>) -> Result<Self, PartitionError> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &im in &images {
            if im == 0 || im > n || seen[im] {
                return Err(PartitionError::NotABijection);
            }
            seen[im] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (1..=n).collect(),
        }
    }

    /// Transposition of two sites.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self, PartitionError> {
        if a == 0 || b == 0 || a > n || b > n || a == b {
            return Err(PartitionError::NotABijection);
        }
        let mut images: Vec<usize> = (1..=n).collect();
        images.swap(a - 1, b - 1);
        Ok(Self { images })
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, site: usize) -> usize {
        self.images[site - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let images = (1..=other.n()).map(|s| self.image(other.image(s))).collect();
        Self { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &im)| im == i + 1)
    }
}

/// The four-element relabeling group `{e, (12), (34), (12)(34)}` on 4 sites.
pub fn v4() -> Vec<SitePermutation> {
    let e = SitePermutation::identity(4);
    let s12 = SitePermutation::transposition(4, 1, 2).unwrap();
    let s34 = SitePermutation::transposition(4, 3, 4).unwrap();
    let both = s12.compose(&s34);
    vec![e, s12, s34, both]
}

/// Checks that `perms` contains the identity and is closed under composition.
pub fn is_group(perms: &[SitePermutation]) -> bool {
    if perms.is_empty() || !perms.iter().any(SitePermutation::is_identity) {
        return false;
    }
    let n = perms[0].n();
    if perms.iter().any(|p| p.n() != n) {
        return false;
    }
    let set: BTreeSet<&SitePermutation> = perms.iter().collect();
    for a in perms {
        for b in perms {
            if !set.contains(&a.compose(b)) {
                return false;
            }
        }
    }
    true
}

const CLOSURE_CAP: usize = 100_000;

/// Completes a generator list to the group it generates.
pub fn complete_group(generators: &[SitePermutation]) -> Result<Vec<SitePermutation>, PartitionError> {
    let n = generators.first().map(SitePermutation::n).unwrap_or(0);
    if n == 0 || generators.iter().any(|g| g.n() != n) {
        return Err(PartitionError::NotABijection);
    }
    let mut set: BTreeSet<SitePermutation> = BTreeSet::new();
    set.insert(SitePermutation::identity(n));
    let mut frontier: Vec<SitePermutation> = vec![SitePermutation::identity(n)];
    while let Some(p) = frontier.pop() {
        for g in generators {
            let q = g.compose(&p);
            if set.insert(q.clone()) {
                if set.len() > CLOSURE_CAP {
                    return Err(PartitionError::ClosureTooLarge(CLOSURE_CAP));
                }
                frontier.push(q);
            }
        }
    }
    Ok(set.into_iter().collect())
}

/// Orbit decomposition of a partition list under a relabeling group:
/// one canonically-smallest representative per orbit with the number of
/// input partitions it stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitTable {
    pub entries: Vec<(Partition, usize)>,
}

impl OrbitTable {
    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|(_, m)| m).sum()
    }
}

/// Groups `parts` into orbits under `group`. The group property is checked,
/// not assumed; pass generators through [`complete_group`] first if needed.
pub fn orbit_reduce(parts: &[Partition], group: &[SitePermutation]) -> Result<OrbitTable, PartitionError> {
    if !is_group(group) {
        return Err(PartitionError::NotAGroup);
    }
    let index: BTreeMap<&Partition, usize> = parts.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut claimed = vec![false; parts.len()];
    let mut entries = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        if claimed[i] {
            continue;
        }
        let mut members = BTreeSet::new();
        for g in group {
            let image = part.relabel(g);
            if let Some(&j) = index.get(&image) {
                if !claimed[j] {
                    claimed[j] = true;
                    members.insert(j);
                }
            }
        }
        members.insert(i);
        let representative = members.iter().map(|&j| parts[j].clone()).min().unwrap();
        entries.push((representative, members.len()));
    }
    entries.sort();
    Ok(OrbitTable { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sites(v: &[usize]) -> SiteSet {
        SiteSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn subsets_of_small_universes() {
        assert_eq!(nonempty_subsets(&sites(&[2])), vec![sites(&[2])]);
        assert_eq!(
            nonempty_subsets(&sites(&[2, 3])),
            vec![sites(&[2]), sites(&[3]), sites(&[2, 3])]
        );
        assert_eq!(nonempty_subsets(&sites(&[1, 2, 3])).len(), 7);
    }

    #[test]
    fn stirling_known_values() {
        assert_eq!(stirling(4, 2).unwrap(), 7);
        assert_eq!(stirling(4, 3).unwrap(), 6);
        assert_eq!(stirling(6, 1).unwrap(), 1);
        assert_eq!(stirling(6, 6).unwrap(), 1);
        assert_eq!(stirling(10, 4).unwrap(), 34105);
        assert!(matches!(
            stirling(3, 4),
            Err(PartitionError::InvalidRange { .. })
        ));
    }

    #[test]
    fn partition_counts_match_stirling() {
        for n in 1..=8 {
            for m in 1..=n {
                let parts = set_partitions(n, m).unwrap();
                assert_eq!(parts.len() as u64, stirling(n, m).unwrap(), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn singleton_partition() {
        let parts = set_partitions(5, 5).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].blocks().len(), 5);
        assert!(parts[0].blocks().iter().all(|b| b.len() == 1));
    }

    #[test]
    fn canonicalization_is_input_order_independent() {
        let a = Partition::new(vec![sites(&[3, 4]), sites(&[1]), sites(&[2])], 4).unwrap();
        let b = Partition::new(vec![sites(&[2]), sites(&[4, 3]), sites(&[1])], 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.blocks()[0], sites(&[1]));
    }

    #[test]
    fn partition_rejects_overlap_and_gaps() {
        assert!(Partition::new(vec![sites(&[1, 2]), sites(&[2, 3])], 3).is_err());
        assert!(Partition::new(vec![sites(&[1, 2])], 3).is_err());
    }

    #[test]
    fn vierergruppe_is_a_group() {
        assert!(is_group(&v4()));
        let completed = complete_group(&[
            SitePermutation::transposition(4, 1, 2).unwrap(),
            SitePermutation::transposition(4, 3, 4).unwrap(),
        ])
        .unwrap();
        assert_eq!(completed.len(), 4);
    }

    #[test]
    fn bipartition_orbits_under_v4() {
        let parts = set_partitions(4, 2).unwrap();
        let table = orbit_reduce(&parts, &v4()).unwrap();
        assert_eq!(table.entries.len(), 4);
        assert_eq!(table.total_multiplicity(), 7);
        let mut mults: Vec<usize> = table.entries.iter().map(|e| e.1).collect();
        mults.sort_unstable();
        assert_eq!(mults, vec![1, 2, 2, 2]);
        let reps: Vec<&Partition> = table.entries.iter().map(|e| &e.0).collect();
        let expect = Partition::new(vec![sites(&[1]), sites(&[2, 3, 4])], 4).unwrap();
        assert!(reps.contains(&&expect));
        let expect = Partition::new(vec![sites(&[1, 3]), sites(&[2, 4])], 4).unwrap();
        assert!(reps.contains(&&expect));
    }

    #[test]
    fn tripartition_orbits_under_v4() {
        let parts = set_partitions(4, 3).unwrap();
        let table = orbit_reduce(&parts, &v4()).unwrap();
        assert_eq!(table.entries.len(), 3);
        let mut mults: Vec<usize> = table.entries.iter().map(|e| e.1).collect();
        mults.sort_unstable();
        assert_eq!(mults, vec![1, 1, 4]);
    }

    #[test]
    fn trivial_group_gives_one_orbit_per_partition() {
        let parts = set_partitions(4, 2).unwrap();
        let table = orbit_reduce(&parts, &[SitePermutation::identity(4)]).unwrap();
        assert_eq!(table.entries.len(), 7);
        assert!(table.entries.iter().all(|e| e.1 == 1));
    }

    #[test]
    fn non_group_is_rejected() {
        let only_swap = vec![SitePermutation::transposition(4, 1, 2).unwrap()];
        let parts = set_partitions(4, 2).unwrap();
        assert!(matches!(
            orbit_reduce(&parts, &only_swap),
            Err(PartitionError::NotAGroup)
        ));
    }
}
