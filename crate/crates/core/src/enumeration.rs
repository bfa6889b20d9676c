//! Exact counting of labelled posets, event structures and full graphs.
//!
//! Posets on `{0, .., n-1}` are generated by inserting element `k` into each
//! poset on `{0, .., k-1}`: its strict down-set must be an ideal `I`, its
//! strict up-set a filter `F` disjoint from `I`, with every member of `I`
//! below every member of `F`. Each labelled poset arises exactly once.
//!
//! For a fixed poset the admissible conflict relations are the up-sets of the
//! [`PairPoset`]: unordered pairs of incomparable events without a common upper
//! bound, ordered componentwise. Conflict propagation is exactly up-closure
//! there, so counting conflict relations reduces to counting order filters.

use std::env;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::escore::{validate_es, EventStructure};
use crate::fullgraph::{comp_complement, is_full_graph};
use crate::relcore::{BinRel, EventId};

/// Largest size the engine accepts regardless of configuration.
pub const HARD_MAX_N: usize = 10;
/// Default ceiling for counting and enumeration.
pub const DEFAULT_MAX_N: usize = 7;
/// Default ceiling for the brute-force event-structure oracle.
pub const ORACLE_MAX_N: usize = 5;
/// Ceiling for oracles that scan every relation or every subset of the complement.
pub const EXHAUSTIVE_MAX_N: usize = 4;

/// Environment variable overriding [`Limits::max_n`].
pub const MAX_N_ENV: &str = "EVSTRUCT_MAX_N";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("n = {n} exceeds the limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("relation is not a partial order with field {{0..n-1}}")]
    NotPartialOrder,
    #[error("shard {index} of {count} is not a valid shard")]
    InvalidShard { index: usize, count: usize },
    #[error("invalid value for {MAX_N_ENV}: {0:?}")]
    BadEnv(String),
}

/// Size guards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_n: usize,
    pub oracle_max_n: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_n: DEFAULT_MAX_N, oracle_max_n: ORACLE_MAX_N }
    }
}

impl Limits {
    /// Defaults, with `max_n` taken from `EVSTRUCT_MAX_N` when set.
    pub fn from_env() -> Result<Self, EnumError> {
        let mut limits = Limits::default();
        if let Ok(v) = env::var(MAX_N_ENV) {
            limits.max_n = v.trim().parse().map_err(|_| EnumError::BadEnv(v.clone()))?;
        }
        Ok(limits)
    }

    pub fn check(&self, n: usize) -> Result<(), EnumError> {
        let max = self.max_n.min(HARD_MAX_N);
        if n > max {
            return Err(EnumError::TooLarge { n, max });
        }
        Ok(())
    }

    pub fn check_oracle(&self, n: usize) -> Result<(), EnumError> {
        let max = self.oracle_max_n.min(self.max_n).min(HARD_MAX_N);
        if n > max {
            return Err(EnumError::TooLarge { n, max });
        }
        Ok(())
    }
}

/// One slice of a deterministic partition of the poset stream: the poset at
/// stream position `j` belongs to shard `j % count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shard {
    pub index: usize,
    pub count: usize,
}

impl Shard {
    pub const WHOLE: Shard = Shard { index: 0, count: 1 };

    pub fn new(index: usize, count: usize) -> Result<Self, EnumError> {
        if count == 0 || index >= count {
            return Err(EnumError::InvalidShard { index, count });
        }
        Ok(Shard { index, count })
    }

    fn owns(self, position: u64) -> bool {
        position % self.count as u64 == self.index as u64
    }
}

/// Poset on `{0, .., n-1}` as bit rows: `up[x]` holds every `y >= x`, `x` included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Poset {
    n: u8,
    up: [u16; HARD_MAX_N],
}

impl Poset {
    const EMPTY: Poset = Poset { n: 0, up: [0; HARD_MAX_N] };

    fn n(&self) -> usize {
        self.n as usize
    }

    fn le(&self, x: usize, y: usize) -> bool {
        self.up[x] >> y & 1 == 1
    }

    fn down(&self, y: usize) -> u16 {
        (0..self.n()).filter(|&x| self.le(x, y)).fold(0, |acc, x| acc | 1 << x)
    }

    fn to_binrel(self) -> BinRel {
        let rows = self.up[..self.n()].iter().map(|&r| r as u64).collect();
        BinRel::from_rows(self.n(), rows).expect("poset rows fit the carrier")
    }

    fn from_binrel(d: &BinRel) -> Result<Poset, EnumError> {
        let n = d.carrier();
        if n > HARD_MAX_N {
            return Err(EnumError::TooLarge { n, max: HARD_MAX_N });
        }
        let props = d.classify();
        if !props.partial_order || d.fixed_points().len() != n {
            return Err(EnumError::NotPartialOrder);
        }
        let mut up = [0u16; HARD_MAX_N];
        for (x, &r) in d.rows().iter().enumerate() {
            up[x] = r as u16;
        }
        Ok(Poset { n: n as u8, up })
    }

    /// Down-closed subsets, ascending by mask.
    fn ideals(&self) -> Vec<u16> {
        let downs: Vec<u16> = (0..self.n()).map(|y| self.down(y)).collect();
        (0..1u32 << self.n())
            .map(|m| m as u16)
            .filter(|&m| bits16(m).all(|x| downs[x] & !m == 0))
            .collect()
    }

    /// Up-closed subsets, ascending by mask.
    fn filters(&self) -> Vec<u16> {
        (0..1u32 << self.n())
            .map(|m| m as u16)
            .filter(|&m| bits16(m).all(|x| self.up[x] & !m == 0))
            .collect()
    }

    /// Calls `emit` on every one-element extension, in a fixed order.
    fn for_each_extension(&self, mut emit: impl FnMut(Poset)) {
        let k = self.n();
        let filters = self.filters();
        for ideal in self.ideals() {
            let common = bits16(ideal).fold(full16(k), |acc, x| acc & self.up[x]);
            let allowed = common & !ideal;
            for &filter in filters.iter().filter(|&&f| f & !allowed == 0) {
                let mut child = *self;
                child.n += 1;
                for x in bits16(ideal) {
                    child.up[x] |= 1 << k;
                }
                child.up[k] = filter | 1 << k;
                emit(child);
            }
        }
    }

    fn extension_count(&self) -> u64 {
        let mut count = 0;
        self.for_each_extension(|_| count += 1);
        count
    }
}

fn full16(n: usize) -> u16 {
    ((1u32 << n) - 1) as u16
}

fn bits16(m: u16) -> impl Iterator<Item = usize> {
    let mut m = m;
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            i
        })
    })
}

fn bits64(m: u64) -> impl Iterator<Item = usize> {
    let mut m = m;
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            i
        })
    })
}

/// All posets on `k` elements, in stream order.
fn level(k: usize) -> Vec<Poset> {
    let mut current = vec![Poset::EMPTY];
    for _ in 0..k {
        let mut next = Vec::new();
        for p in &current {
            p.for_each_extension(|c| next.push(c));
        }
        current = next;
    }
    current
}

/// Streams every partial order with field `{0, .., n-1}`, reflexive and
/// transitively closed, exactly once and in a fixed order.
pub fn enumerate_posets(n: usize, limits: &Limits) -> Result<PosetStream, EnumError> {
    limits.check(n)?;
    Ok(PosetStream::new(n))
}

pub struct PosetStream {
    parents: Vec<Poset>,
    next_parent: usize,
    buffer: Vec<Poset>,
    pos: usize,
}

impl PosetStream {
    fn new(n: usize) -> Self {
        if n == 0 {
            return PosetStream { parents: Vec::new(), next_parent: 0, buffer: vec![Poset::EMPTY], pos: 0 };
        }
        PosetStream { parents: level(n - 1), next_parent: 0, buffer: Vec::new(), pos: 0 }
    }

    fn next_poset(&mut self) -> Option<Poset> {
        while self.pos == self.buffer.len() {
            let parent = self.parents.get(self.next_parent)?;
            self.next_parent += 1;
            self.buffer.clear();
            self.pos = 0;
            let buffer = &mut self.buffer;
            parent.for_each_extension(|c| buffer.push(c));
        }
        self.pos += 1;
        Some(self.buffer[self.pos - 1])
    }
}

impl Iterator for PosetStream {
    type Item = BinRel;

    fn next(&mut self) -> Option<BinRel> {
        self.next_poset().map(Poset::to_binrel)
    }
}

/// Unordered pairs `{x, y}` of incomparable events with no common upper bound,
/// ordered by `{x, y} <= {x', y'}` iff `x <= x'` and `y <= y'` up to swapping.
#[derive(Debug, Clone)]
pub struct PairPoset {
    elements: Vec<(EventId, EventId)>,
    /// `above[i]`: elements `>= i`, including `i`.
    above: Vec<u64>,
    /// `below[i]`: elements `<= i`, including `i`.
    below: Vec<u64>,
}

impl PairPoset {
    /// Builds the pair poset of `d`, which must be a partial order with field `{0..n-1}`.
    pub fn new(d: &BinRel) -> Result<PairPoset, EnumError> {
        Ok(Self::of(&Poset::from_binrel(d)?))
    }

    fn of(p: &Poset) -> PairPoset {
        let n = p.n();
        let mut elements = Vec::new();
        for x in 0..n {
            for y in x + 1..n {
                if !p.le(x, y) && !p.le(y, x) && p.up[x] & p.up[y] == 0 {
                    elements.push((x, y));
                }
            }
        }
        let m = elements.len();
        let mut above = vec![0u64; m];
        let mut below = vec![0u64; m];
        for (i, &(a, b)) in elements.iter().enumerate() {
            for (j, &(c, d)) in elements.iter().enumerate() {
                let le = (p.le(a, c) && p.le(b, d)) || (p.le(a, d) && p.le(b, c));
                if le {
                    above[i] |= 1 << j;
                    below[j] |= 1 << i;
                }
            }
        }
        PairPoset {
            elements: elements.into_iter().map(|(x, y)| (EventId(x), EventId(y))).collect(),
            above,
            below,
        }
    }

    pub fn elements(&self) -> &[(EventId, EventId)] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        self.above[i] >> j & 1 == 1
    }

    fn all(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    /// Number of up-sets (order filters), the empty one included.
    pub fn count_up_sets(&self) -> u64 {
        let mut memo = FxHashMap::default();
        self.count_within(self.all(), &mut memo)
    }

    fn count_within(&self, s: u64, memo: &mut FxHashMap<u64, u64>) -> u64 {
        if s == 0 {
            return 1;
        }
        // pivot: the element comparable to the most others still in play
        let mut pivot = 0;
        let mut degree = 0;
        for e in bits64(s) {
            let d = ((self.above[e] | self.below[e]) & s).count_ones();
            if d > degree {
                degree = d;
                pivot = e;
            }
        }
        if degree == 1 {
            return 1 << s.count_ones();
        }
        if let Some(&v) = memo.get(&s) {
            return v;
        }
        // up-sets avoiding the pivot avoid everything below it;
        // those containing it contain everything above it
        let v = self.count_within(s & !self.below[pivot], memo)
            + self.count_within(s & !self.above[pivot], memo);
        memo.insert(s, v);
        v
    }

    /// Every up-set as a bitmask over [`PairPoset::elements`], in a fixed order.
    pub fn up_sets(&self) -> Vec<u64> {
        let mut out = Vec::new();
        self.collect_within(self.all(), 0, &mut out);
        out
    }

    fn collect_within(&self, s: u64, chosen: u64, out: &mut Vec<u64>) {
        let Some(e) = bits64(s).next() else {
            out.push(chosen);
            return;
        };
        self.collect_within(s & !self.below[e], chosen, out);
        self.collect_within(s & !self.above[e], chosen | (self.above[e] & s), out);
    }

    /// The symmetric conflict relation on `n` events selected by `mask`.
    pub fn conflict_relation(&self, n: usize, mask: u64) -> BinRel {
        let mut u = BinRel::empty(n).expect("carrier within bounds");
        for i in bits64(mask) {
            let (x, y) = self.elements[i];
            u.insert(x, y).expect("pair inside the carrier");
            u.insert(y, x).expect("pair inside the carrier");
        }
        u
    }
}

/// Number of conflict relations `U` making `(d, U)` an event structure.
pub fn count_admissible(d: &BinRel) -> Result<u64, EnumError> {
    Ok(PairPoset::new(d)?.count_up_sets())
}

/// Exact per-size counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountTable {
    pub n: usize,
    pub posets: u128,
    pub event_structures: u128,
    pub full_graphs: u128,
}

impl CountTable {
    /// `log2(event_structures) / n²`, undefined for `n = 0`.
    pub fn log2_ratio(&self) -> Option<f64> {
        (self.n > 0 && self.event_structures > 0)
            .then(|| (self.event_structures as f64).log2() / (self.n * self.n) as f64)
    }
}

/// Posets and event structures over the part of the poset stream owned by
/// `shard`, summed across worker threads.
fn shard_totals(n: usize, shard: Shard) -> (u128, u128) {
    if n == 0 {
        return if shard.owns(0) { (1, 1) } else { (0, 0) };
    }
    let parents = level(n - 1);
    let sizes: Vec<u64> = parents.par_iter().map(Poset::extension_count).collect();
    let offsets: Vec<u64> = sizes
        .iter()
        .scan(0u64, |acc, &s| {
            let start = *acc;
            *acc += s;
            Some(start)
        })
        .collect();
    parents
        .par_iter()
        .zip(offsets.par_iter())
        .map(|(parent, &start)| {
            let mut position = start;
            let mut posets = 0u128;
            let mut structures = 0u128;
            let mut memo = FxHashMap::default();
            parent.for_each_extension(|child| {
                if shard.owns(position) {
                    let pp = PairPoset::of(&child);
                    memo.clear();
                    posets += 1;
                    structures += pp.count_within(pp.all(), &mut memo) as u128;
                }
                position += 1;
            });
            (posets, structures)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// Counts for size `n` restricted to one shard of the poset stream.
pub fn count_table_sharded(n: usize, limits: &Limits, shard: Shard) -> Result<CountTable, EnumError> {
    limits.check(n)?;
    let (posets, event_structures) = shard_totals(n, shard);
    Ok(CountTable { n, posets, event_structures, full_graphs: event_structures })
}

pub fn count_table(n: usize, limits: &Limits) -> Result<CountTable, EnumError> {
    count_table_sharded(n, limits, Shard::WHOLE)
}

pub fn count_posets(n: usize, limits: &Limits) -> Result<u128, EnumError> {
    limits.check(n)?;
    if n == 0 {
        return Ok(1);
    }
    Ok(level(n - 1).par_iter().map(|p| p.extension_count() as u128).sum())
}

/// Sum of [`count_admissible`] over every poset on `n` elements.
pub fn count_event_structures(n: usize, limits: &Limits) -> Result<u128, EnumError> {
    Ok(count_table(n, limits)?.event_structures)
}

pub fn count_event_structures_sharded(
    n: usize,
    limits: &Limits,
    shard: Shard,
) -> Result<u128, EnumError> {
    Ok(count_table_sharded(n, limits, shard)?.event_structures)
}

/// Equal to [`count_event_structures`]: the complement map is a bijection
/// between conflict relations and overlap relations for each poset.
pub fn count_full_graphs(n: usize, limits: &Limits) -> Result<u128, EnumError> {
    Ok(count_table(n, limits)?.full_graphs)
}

/// Streams every event structure on `{0, .., n-1}`: posets in stream order,
/// and for each poset its conflict relations in up-set order.
pub fn enumerate_event_structures(
    n: usize,
    limits: &Limits,
) -> Result<impl Iterator<Item = EventStructure>, EnumError> {
    let posets = enumerate_posets(n, limits)?;
    Ok(posets.flat_map(move |d| {
        let pp = PairPoset::new(&d).expect("stream yields partial orders");
        pp.up_sets()
            .into_iter()
            .map(move |mask| {
                EventStructure::new_unchecked(d.clone(), pp.conflict_relation(d.carrier(), mask))
            })
            .collect::<Vec<_>>()
    }))
}

/// Oracle: for each poset, every symmetric subset of its incomparable pairs,
/// kept when the pair passes the event-structure validator.
pub fn brute_force_es(
    n: usize,
    limits: &Limits,
) -> Result<impl Iterator<Item = EventStructure>, EnumError> {
    limits.check_oracle(n)?;
    let posets = enumerate_posets(n, limits)?;
    Ok(posets.flat_map(move |d| {
        let incomparable: Vec<(usize, usize)> = (0..n)
            .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
            .filter(|&(x, y)| !d.contains(EventId(x), EventId(y)) && !d.contains(EventId(y), EventId(x)))
            .collect();
        (0..1u64 << incomparable.len())
            .filter_map(|mask| {
                let pairs = bits64(mask)
                    .map(|i| incomparable[i])
                    .flat_map(|(x, y)| [(x, y), (y, x)]);
                let u = BinRel::from_pairs(n, pairs).expect("pairs inside the carrier");
                let valid = validate_es(&d, &u).expect("same carrier").valid();
                valid.then(|| EventStructure::new_unchecked(d.clone(), u))
            })
            .collect::<Vec<_>>()
    }))
}

/// Oracle: number of pairs `(D, T)` with `T` any subset of the comparability
/// complement of `D` accepted by [`is_full_graph`].
pub fn brute_force_full_graph_count(n: usize, limits: &Limits) -> Result<u128, EnumError> {
    limits.check(n)?;
    if n > EXHAUSTIVE_MAX_N {
        return Err(EnumError::TooLarge { n, max: EXHAUSTIVE_MAX_N });
    }
    let mut total = 0u128;
    for d in enumerate_posets(n, limits)? {
        let cc = comp_complement(&d).expect("stream yields partial orders");
        let candidates: Vec<(EventId, EventId)> = cc.pairs().collect();
        for mask in 0..1u64 << candidates.len() {
            let pairs = bits64(mask).map(|i| (candidates[i].0 .0, candidates[i].1 .0));
            let t = BinRel::from_pairs(n, pairs).expect("pairs inside the carrier");
            if is_full_graph(&d, &t).is_ok() {
                total += 1;
            }
        }
    }
    Ok(total)
}

/// Oracle: every relation on `n` elements (all `2^(n²)` of them) that is a
/// partial order with field `{0..n-1}`.
pub fn brute_force_posets(n: usize, limits: &Limits) -> Result<Vec<BinRel>, EnumError> {
    limits.check(n)?;
    if n > EXHAUSTIVE_MAX_N {
        return Err(EnumError::TooLarge { n, max: EXHAUSTIVE_MAX_N });
    }
    let cells = n * n;
    Ok((0..1u64 << cells)
        .map(|mask| {
            let pairs = bits64(mask).map(|c| (c / n, c % n));
            BinRel::from_pairs(n, pairs).expect("pairs inside the carrier")
        })
        .filter(|r| r.classify().partial_order && r.fixed_points().len() == n)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(n: usize, pairs: &[(usize, usize)]) -> BinRel {
        BinRel::from_pairs(n, pairs.iter().copied()).unwrap()
    }

    fn po(n: usize, pairs: &[(usize, usize)]) -> BinRel {
        rel(n, pairs).reflexive_transitive_closure()
    }

    #[test]
    fn small_poset_streams() {
        let limits = Limits::default();
        let zero: Vec<_> = enumerate_posets(0, &limits).unwrap().collect();
        assert_eq!(zero, vec![BinRel::empty(0).unwrap()]);

        let two: Vec<_> = enumerate_posets(2, &limits).unwrap().collect();
        assert_eq!(two.len(), 3);
        for d in [po(2, &[]), po(2, &[(0, 1)]), po(2, &[(1, 0)])] {
            assert!(two.contains(&d));
        }
        assert_eq!(enumerate_posets(3, &limits).unwrap().count(), 19);
    }

    #[test]
    fn guard_is_enforced() {
        let limits = Limits { max_n: 3, ..Limits::default() };
        assert!(matches!(enumerate_posets(4, &limits), Err(EnumError::TooLarge { n: 4, max: 3 })));
        let lax = Limits { max_n: 50, ..Limits::default() };
        assert!(matches!(lax.check(11), Err(EnumError::TooLarge { max: HARD_MAX_N, .. })));
    }

    #[test]
    fn count_admissible_examples() {
        assert_eq!(count_admissible(&po(2, &[(0, 1)])), Ok(1));
        assert_eq!(count_admissible(&po(2, &[])), Ok(2));
        assert_eq!(count_admissible(&po(3, &[])), Ok(8));
        assert_eq!(count_admissible(&rel(2, &[(0, 1)])), Err(EnumError::NotPartialOrder));
    }

    #[test]
    fn pair_poset_excludes_pairs_with_common_upper_bound() {
        // 0 <= 2 and 1 <= 2: {0, 1} has the upper bound 2
        let pp = PairPoset::new(&po(3, &[(0, 2), (1, 2)])).unwrap();
        assert!(pp.is_empty());
        // 0 <= 2, 1 free: {0,1} <= {2,1}
        let pp = PairPoset::new(&po(3, &[(0, 2)])).unwrap();
        assert_eq!(pp.elements(), &[(EventId(0), EventId(1)), (EventId(1), EventId(2))]);
        assert!(pp.le(0, 1) && !pp.le(1, 0));
        assert_eq!(pp.count_up_sets(), 3);
        assert_eq!(pp.up_sets().len(), 3);
    }

    #[test]
    fn small_counts() {
        let limits = Limits::default();
        assert_eq!(count_event_structures(0, &limits), Ok(1));
        assert_eq!(count_event_structures(1, &limits), Ok(1));
        assert_eq!(count_event_structures(2, &limits), Ok(4));
        assert_eq!(count_full_graphs(2, &limits), Ok(4));
        assert_eq!(count_posets(3, &limits), Ok(19));
    }

    #[test]
    fn brute_force_small() {
        let limits = Limits::default();
        assert_eq!(brute_force_es(0, &limits).unwrap().count(), 1);
        assert_eq!(brute_force_es(2, &limits).unwrap().count(), 4);
        assert_eq!(brute_force_full_graph_count(2, &limits), Ok(4));
        assert!(matches!(brute_force_es(6, &limits), Err(EnumError::TooLarge { .. })));
    }

    #[test]
    fn shards_partition_the_stream() {
        let limits = Limits::default();
        let whole = count_table(5, &limits).unwrap();
        for k in [2, 3, 7] {
            let parts: Vec<CountTable> = (0..k)
                .map(|i| count_table_sharded(5, &limits, Shard::new(i, k).unwrap()).unwrap())
                .collect();
            assert_eq!(parts.iter().map(|c| c.posets).sum::<u128>(), whole.posets);
            assert_eq!(
                parts.iter().map(|c| c.event_structures).sum::<u128>(),
                whole.event_structures
            );
        }
        assert!(Shard::new(3, 3).is_err());
        assert!(Shard::new(0, 0).is_err());
    }
}
