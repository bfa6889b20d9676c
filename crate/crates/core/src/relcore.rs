//! Finite relation algebra over small carriers.
//!
//! A [`BinRel`] lives on the carrier `{0, .., n-1}` and stores one bit row per
//! element: row `x` holds every `y` with `(x, y)` in the relation. All the
//! derived notions (domain, range, field, fixed points, images) are computed
//! from the rows on demand.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Largest carrier a [`BinRel`] can hold (one `u64` word per row).
pub const MAX_CARRIER: usize = 64;

/// Finite set of natural-number labels.
pub type LabelSet = BTreeSet<u64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelError {
    #[error("carrier mismatch: {left} vs {right}")]
    CarrierMismatch { left: usize, right: usize },
    #[error("event {id} is outside the carrier of size {n}")]
    OutOfCarrier { id: usize, n: usize },
    #[error("carrier size {0} exceeds the supported maximum of {MAX_CARRIER}")]
    CarrierTooLarge(usize),
    #[error("field of the relation is not contained in the domain of the map (event {0})")]
    FieldNotInDomain(EventId),
}

/// Index of an event in its carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub usize);

impl EventId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for EventId {
    fn from(v: usize) -> Self {
        EventId(v)
    }
}

/// Set of events, as a bitmask over ids below [`MAX_CARRIER`].
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventSet(u64);

impl EventSet {
    pub const EMPTY: EventSet = EventSet(0);

    pub fn from_bits(bits: u64) -> Self {
        EventSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_CARRIER, "carrier {n} too large");
        if n == MAX_CARRIER {
            EventSet(u64::MAX)
        } else {
            EventSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(e: EventId) -> Self {
        assert!(e.0 < MAX_CARRIER, "event {e} out of range");
        EventSet(1u64 << e.0)
    }

    pub fn contains(self, e: EventId) -> bool {
        e.0 < MAX_CARRIER && self.0 >> e.0 & 1 == 1
    }

    pub fn insert(&mut self, e: EventId) {
        *self = self.union(EventSet::singleton(e));
    }

    pub fn remove(&mut self, e: EventId) {
        if e.0 < MAX_CARRIER {
            self.0 &= !(1u64 << e.0);
        }
    }

    pub fn union(self, other: EventSet) -> EventSet {
        EventSet(self.0 | other.0)
    }

    pub fn intersection(self, other: EventSet) -> EventSet {
        EventSet(self.0 & other.0)
    }

    pub fn difference(self, other: EventSet) -> EventSet {
        EventSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: EventSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: EventSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn intersects(self, other: EventSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Smallest member, if any.
    pub fn first(self) -> Option<EventId> {
        (self.0 != 0).then(|| EventId(self.0.trailing_zeros() as usize))
    }

    /// Largest id plus one (0 for the empty set).
    pub fn bound(self) -> usize {
        MAX_CARRIER - self.0.leading_zeros() as usize
    }

    pub fn iter(self) -> EventSetIter {
        EventSetIter(self.0)
    }
}

impl fmt::Debug for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|e| e.0)).finish()
    }
}

impl FromIterator<EventId> for EventSet {
    fn from_iter<I: IntoIterator<Item = EventId>>(iter: I) -> Self {
        let mut s = EventSet::EMPTY;
        for e in iter {
            s.insert(e);
        }
        s
    }
}

impl IntoIterator for EventSet {
    type Item = EventId;
    type IntoIter = EventSetIter;

    fn into_iter(self) -> EventSetIter {
        self.iter()
    }
}

/// Ascending iterator over an [`EventSet`].
#[derive(Clone)]
pub struct EventSetIter(u64);

impl Iterator for EventSetIter {
    type Item = EventId;

    fn next(&mut self) -> Option<EventId> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(EventId(i))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let k = self.0.count_ones() as usize;
        (k, Some(k))
    }
}

impl ExactSizeIterator for EventSetIter {}

/// Binary relation on `{0, .., n-1}`, stored as a dense bit matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinRel {
    n: usize,
    rows: Vec<u64>,
}

impl fmt::Debug for BinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinRel(n={}, ", self.n)?;
        f.debug_set()
            .entries(self.pairs().map(|(x, y)| (x.0, y.0)))
            .finish()?;
        write!(f, ")")
    }
}

impl BinRel {
    pub fn empty(n: usize) -> Result<Self, RelError> {
        if n > MAX_CARRIER {
            return Err(RelError::CarrierTooLarge(n));
        }
        Ok(BinRel { n, rows: vec![0; n] })
    }

    /// Identity on the whole carrier.
    pub fn diagonal(n: usize) -> Result<Self, RelError> {
        Self::diagonal_on(n, EventSet::full(n.min(MAX_CARRIER)))
    }

    /// Identity restricted to `events`.
    pub fn diagonal_on(n: usize, events: EventSet) -> Result<Self, RelError> {
        let mut r = Self::empty(n)?;
        for e in events {
            r.insert(e, e)?;
        }
        Ok(r)
    }

    pub fn from_pairs<I>(n: usize, pairs: I) -> Result<Self, RelError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut r = Self::empty(n)?;
        for (x, y) in pairs {
            r.insert(EventId(x), EventId(y))?;
        }
        Ok(r)
    }

    /// Builds a relation from one bit row per element.
    pub fn from_rows(n: usize, rows: Vec<u64>) -> Result<Self, RelError> {
        if n > MAX_CARRIER {
            return Err(RelError::CarrierTooLarge(n));
        }
        if rows.len() != n {
            return Err(RelError::CarrierMismatch { left: n, right: rows.len() });
        }
        let mask = EventSet::full(n).bits();
        if let Some(pos) = rows.iter().position(|r| r & !mask != 0) {
            let id = (rows[pos] & !mask).trailing_zeros() as usize;
            return Err(RelError::OutOfCarrier { id, n });
        }
        Ok(BinRel { n, rows })
    }

    pub fn carrier(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    fn check(&self, e: EventId) -> Result<(), RelError> {
        if e.0 < self.n {
            Ok(())
        } else {
            Err(RelError::OutOfCarrier { id: e.0, n: self.n })
        }
    }

    pub fn insert(&mut self, x: EventId, y: EventId) -> Result<(), RelError> {
        self.check(x)?;
        self.check(y)?;
        self.rows[x.0] |= 1u64 << y.0;
        Ok(())
    }

    pub fn remove(&mut self, x: EventId, y: EventId) {
        if x.0 < self.n && y.0 < self.n {
            self.rows[x.0] &= !(1u64 << y.0);
        }
    }

    pub fn contains(&self, x: EventId, y: EventId) -> bool {
        x.0 < self.n && y.0 < self.n && self.rows[x.0] >> y.0 & 1 == 1
    }

    /// Image of the single element `x`.
    pub fn successors(&self, x: EventId) -> EventSet {
        self.rows.get(x.0).map_or(EventSet::EMPTY, |&r| EventSet(r))
    }

    /// Preimage of the single element `y`, i.e. the image of `{y}` through the converse.
    pub fn predecessors(&self, y: EventId) -> EventSet {
        if y.0 >= self.n {
            return EventSet::EMPTY;
        }
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| *r >> y.0 & 1 == 1)
            .map(|(x, _)| EventId(x))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    /// Pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (EventId, EventId)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(x, &r)| EventSet(r).iter().map(move |y| (EventId(x), y)))
    }

    pub fn domain(&self) -> EventSet {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, &r)| r != 0)
            .map(|(x, _)| EventId(x))
            .collect()
    }

    pub fn range(&self) -> EventSet {
        EventSet(self.rows.iter().fold(0, |acc, r| acc | r))
    }

    pub fn field(&self) -> EventSet {
        self.domain().union(self.range())
    }

    /// Elements `x` with `(x, x)` in the relation.
    pub fn fixed_points(&self) -> EventSet {
        self.rows
            .iter()
            .enumerate()
            .filter(|(x, &r)| r >> x & 1 == 1)
            .map(|(x, _)| EventId(x))
            .collect()
    }

    pub fn converse(&self) -> BinRel {
        let mut rows = vec![0u64; self.n];
        for (x, y) in self.pairs() {
            rows[y.0] |= 1u64 << x.0;
        }
        BinRel { n: self.n, rows }
    }

    /// `{(x, z) | exists y. (x, y) in self and (y, z) in other}`.
    pub fn compose(&self, other: &BinRel) -> Result<BinRel, RelError> {
        if self.n != other.n {
            return Err(RelError::CarrierMismatch { left: self.n, right: other.n });
        }
        let rows = self
            .rows
            .iter()
            .map(|&r| EventSet(r).iter().fold(0, |acc, y| acc | other.rows[y.0]))
            .collect();
        Ok(BinRel { n: self.n, rows })
    }

    /// Image of `xs`: every `y` related to some member of `xs`.
    pub fn image(&self, xs: EventSet) -> EventSet {
        EventSet(
            xs.iter()
                .filter(|x| x.0 < self.n)
                .fold(0, |acc, x| acc | self.rows[x.0]),
        )
    }

    /// Restriction to `xs` (pairs whose first coordinate lies in `xs`) together
    /// with its range, the image of `xs`.
    pub fn restrict_image(&self, xs: EventSet) -> Result<(BinRel, EventSet), RelError> {
        if let Some(bad) = xs.difference(EventSet::full(self.n)).first() {
            return Err(RelError::OutOfCarrier { id: bad.0, n: self.n });
        }
        let rows: Vec<u64> = self
            .rows
            .iter()
            .enumerate()
            .map(|(x, &r)| if xs.contains(EventId(x)) { r } else { 0 })
            .collect();
        let restricted = BinRel { n: self.n, rows };
        let img = restricted.range();
        Ok((restricted, img))
    }

    fn zip_rows(&self, other: &BinRel, op: impl Fn(u64, u64) -> u64) -> BinRel {
        let n = self.n.max(other.n);
        let rows = (0..n)
            .map(|i| {
                op(
                    self.rows.get(i).copied().unwrap_or(0),
                    other.rows.get(i).copied().unwrap_or(0),
                )
            })
            .collect();
        BinRel { n, rows }
    }

    /// Union of pair sets; the carrier is the larger of the two.
    pub fn union(&self, other: &BinRel) -> BinRel {
        self.zip_rows(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &BinRel) -> BinRel {
        self.zip_rows(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &BinRel) -> BinRel {
        self.zip_rows(other, |a, b| a & !b)
    }

    /// Pair-set inclusion; carriers may differ.
    pub fn is_subset(&self, other: &BinRel) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, &r)| r & !other.rows.get(i).copied().unwrap_or(0) == 0)
    }

    /// Pair-set equality, ignoring the carrier size.
    pub fn same_pairs(&self, other: &BinRel) -> bool {
        self.is_subset(other) && other.is_subset(self)
    }

    /// Removes every pair whose first coordinate is in `xs` or whose second
    /// coordinate is in `ys`.
    pub fn subtract(&self, xs: EventSet, ys: EventSet) -> BinRel {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(x, &r)| if xs.contains(EventId(x)) { 0 } else { r & !ys.0 })
            .collect();
        BinRel { n: self.n, rows }
    }

    /// Removes every pair mentioning `s`.
    pub fn remove_event(&self, s: EventId) -> BinRel {
        let one = EventSet::from_iter([s]);
        self.subtract(one, one)
    }

    /// Reflexive-transitive closure over the whole carrier (Warshall on bit rows).
    pub fn reflexive_transitive_closure(&self) -> BinRel {
        let mut rows = self.rows.clone();
        for (x, r) in rows.iter_mut().enumerate() {
            *r |= 1u64 << x;
        }
        for k in 0..self.n {
            let rk = rows[k];
            for r in rows.iter_mut() {
                if *r >> k & 1 == 1 {
                    *r |= rk;
                }
            }
        }
        BinRel { n: self.n, rows }
    }

    /// Cover pairs of a partial order: `(x, y)` with `x < y` and nothing strictly between.
    /// Loops are dropped.
    pub fn transitive_reduction(&self) -> BinRel {
        let strict: Vec<u64> = self
            .rows
            .iter()
            .enumerate()
            .map(|(x, &r)| r & !(1u64 << x))
            .collect();
        let rows = strict
            .iter()
            .map(|&r| {
                let through = EventSet(r).iter().fold(0, |acc, y| acc | strict[y.0]);
                r & !through
            })
            .collect();
        BinRel { n: self.n, rows }
    }

    pub fn classify(&self) -> RelProps {
        RelProps::of(self)
    }
}

/// The seven order-theoretic properties of a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelProps {
    /// Every element of the field carries a loop.
    pub reflexive_on_field: bool,
    pub irreflexive: bool,
    pub transitive: bool,
    pub symmetric: bool,
    pub antisymmetric: bool,
    pub preorder: bool,
    pub partial_order: bool,
}

impl RelProps {
    pub fn of(r: &BinRel) -> RelProps {
        let fix = r.fixed_points();
        let reflexive_on_field = r.field().is_subset(fix);
        let irreflexive = fix.is_empty();
        let transitive = r.compose(r).expect("same carrier").is_subset(r);
        let conv = r.converse();
        let symmetric = conv.is_subset(r);
        let antisymmetric = r
            .intersection(&conv)
            .pairs()
            .all(|(x, y)| x == y);
        let preorder = reflexive_on_field && transitive;
        RelProps {
            reflexive_on_field,
            irreflexive,
            transitive,
            symmetric,
            antisymmetric,
            preorder,
            partial_order: preorder && antisymmetric,
        }
    }
}

/// Set-valued map from events to finite label sets.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct SetValuedMap {
    entries: BTreeMap<EventId, LabelSet>,
}

impl fmt::Debug for SetValuedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.entries.iter().map(|(k, v)| (k.0, v)))
            .finish()
    }
}

impl SetValuedMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets the value at `e`, replacing any previous value.
    ///
    /// Panics if `e` is not below [`MAX_CARRIER`].
    pub fn insert(&mut self, e: EventId, labels: LabelSet) {
        assert!(e.0 < MAX_CARRIER, "event {e} out of range");
        self.entries.insert(e, labels);
    }

    pub fn get(&self, e: EventId) -> Option<&LabelSet> {
        self.entries.get(&e)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EventId, &LabelSet)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn domain(&self) -> EventSet {
        self.entries.keys().copied().collect()
    }

    /// Union of all values.
    pub fn labels(&self) -> LabelSet {
        self.entries.values().flatten().copied().collect()
    }

    pub fn max_label(&self) -> Option<u64> {
        self.entries.values().filter_map(|s| s.last()).max().copied()
    }

    /// Pointwise union: defined wherever either side is, with the values united.
    pub fn pointwise_union(&self, other: &SetValuedMap) -> SetValuedMap {
        let mut out = self.clone();
        for (k, v) in &other.entries {
            out.entries.entry(*k).or_default().extend(v.iter().copied());
        }
        out
    }

    /// Pointwise union of any number of maps.
    pub fn sum<'a, I>(maps: I) -> SetValuedMap
    where
        I: IntoIterator<Item = &'a SetValuedMap>,
    {
        maps.into_iter()
            .fold(SetValuedMap::new(), |acc, m| acc.pointwise_union(m))
    }

    /// The constant map sending every member of `events` to `labels`.
    pub fn constant(events: EventSet, labels: &LabelSet) -> SetValuedMap {
        let entries = events.iter().map(|e| (e, labels.clone())).collect();
        SetValuedMap { entries }
    }

    /// `{(x0, x1) | x0, x1 in dom f, q(f x0, f x1)}`, on the carrier
    /// `{0, .., max key}`.
    pub fn pullback<Q>(&self, q: Q) -> BinRel
    where
        Q: Fn(&LabelSet, &LabelSet) -> bool,
    {
        let n = self.domain().bound();
        let mut rows = vec![0u64; n];
        for (x, fx) in &self.entries {
            for (y, fy) in &self.entries {
                if q(fx, fy) {
                    rows[x.0] |= 1u64 << y.0;
                }
            }
        }
        BinRel { n, rows }
    }

    /// `(P, Q)`-preserving: `(x0, x1) in P` implies `q(f x0, f x1)` for `x0, x1` in `dom f`.
    pub fn is_preserving<Q>(&self, p: &BinRel, q: Q) -> bool
    where
        Q: Fn(&LabelSet, &LabelSet) -> bool,
    {
        p.pairs().all(|(x, y)| match (self.get(x), self.get(y)) {
            (Some(fx), Some(fy)) => q(fx, fy),
            _ => true,
        })
    }

    /// `(P, Q)`-converse-preserving: `q(f x0, f x1)` implies `(x0, x1) in P`.
    pub fn is_converse_preserving<Q>(&self, p: &BinRel, q: Q) -> bool
    where
        Q: Fn(&LabelSet, &LabelSet) -> bool,
    {
        self.entries.iter().all(|(x, fx)| {
            self.entries
                .iter()
                .all(|(y, fy)| !q(fx, fy) || p.contains(*x, *y))
        })
    }

    /// Preserving, converse-preserving and embedding flags, in that order.
    /// Requires the field of `p` to lie inside the domain of the map.
    pub fn embedding_check<Q>(&self, p: &BinRel, q: Q) -> Result<EmbeddingFlags, RelError>
    where
        Q: Fn(&LabelSet, &LabelSet) -> bool,
    {
        if let Some(e) = p.field().difference(self.domain()).first() {
            return Err(RelError::FieldNotInDomain(e));
        }
        let preserving = self.is_preserving(p, &q);
        let converse_preserving = self.is_converse_preserving(p, &q);
        Ok(EmbeddingFlags {
            preserving,
            converse_preserving,
            embedding: preserving && converse_preserving,
        })
    }

    pub fn is_injective(&self) -> bool {
        let distinct: BTreeSet<&LabelSet> = self.entries.values().collect();
        distinct.len() == self.entries.len()
    }
}

impl FromIterator<(EventId, LabelSet)> for SetValuedMap {
    fn from_iter<I: IntoIterator<Item = (EventId, LabelSet)>>(iter: I) -> Self {
        let mut m = SetValuedMap::new();
        for (k, v) in iter {
            m.insert(k, v);
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbeddingFlags {
    pub preserving: bool,
    pub converse_preserving: bool,
    pub embedding: bool,
}

/// The relations between label sets used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelRelation {
    /// `a ⊇ b`
    Superset,
    /// `a ∩ b = ∅`
    Disjoint,
    /// `a ∩ b ∉ {a, b, ∅}`
    Overlap,
}

impl LabelRelation {
    pub fn holds(self, a: &LabelSet, b: &LabelSet) -> bool {
        match self {
            LabelRelation::Superset => a.is_superset(b),
            LabelRelation::Disjoint => a.is_disjoint(b),
            LabelRelation::Overlap => overlaps(a, b),
        }
    }

    pub fn predicate(self) -> impl Fn(&LabelSet, &LabelSet) -> bool {
        move |a, b| self.holds(a, b)
    }
}

/// True when `a ∩ b` is non-empty and differs from both `a` and `b`.
pub fn overlaps(a: &LabelSet, b: &LabelSet) -> bool {
    let common = a.intersection(b).count();
    common != 0 && common != a.len() && common != b.len()
}
