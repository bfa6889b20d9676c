//! Prime event structures: a causality partial order together with a
//! symmetric, irreflexive conflict relation that propagates upward.

use std::fmt;

use thiserror::Error;

use crate::relcore::{BinRel, EventId, EventSet, RelError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EsError {
    #[error(transparent)]
    Relation(#[from] RelError),
    #[error("not an event structure: {0}")]
    Invalid(EsVerdict),
    #[error("relation has no events")]
    NoEvents,
    #[error("{0} is not an event")]
    NotAnEvent(EventId),
}

/// The axiom a violation breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    NotPartialOrder,
    ConflictNotIrreflexive,
    ConflictNotSymmetric,
    FieldContainment,
    ConflictPropagation,
}

impl Axiom {
    pub fn tag(self) -> &'static str {
        match self {
            Axiom::NotPartialOrder => "NotPartialOrder",
            Axiom::ConflictNotIrreflexive => "ConflictNotIrreflexive",
            Axiom::ConflictNotSymmetric => "ConflictNotSymmetric",
            Axiom::FieldContainment => "FieldContainment",
            Axiom::ConflictPropagation => "ConflictPropagation",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One broken axiom and the smallest tuple exhibiting it.
///
/// Witness shapes:
/// - `NotPartialOrder`: `(x, x)` for a field element without a loop, `(x, y)` with
///   `x != y` for an antisymmetry failure, `(x, y, z)` for a transitivity failure.
/// - `ConflictNotIrreflexive`: `(x, x)`.
/// - `ConflictNotSymmetric`: `(x, y)` with `(x, y)` in U and `(y, x)` not.
/// - `FieldContainment`: `(x)` in the field of U but not of D.
/// - `ConflictPropagation`: `(x0, x1, y)` with `x0 # y`, `x0 <= x1` and not `x1 # y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<EventId>,
}

impl Violation {
    fn new(axiom: Axiom, witness: &[usize]) -> Self {
        Violation { axiom, witness: witness.iter().map(|&i| EventId(i)).collect() }
    }

    /// Re-evaluates the witness against `(d, u)`; true when it really is a counterexample.
    pub fn confirms(&self, d: &BinRel, u: &BinRel) -> bool {
        let w = &self.witness;
        match (self.axiom, w.as_slice()) {
            (Axiom::NotPartialOrder, &[x, y]) if x == y => {
                d.field().contains(x) && !d.contains(x, x)
            }
            (Axiom::NotPartialOrder, &[x, y]) => d.contains(x, y) && d.contains(y, x),
            (Axiom::NotPartialOrder, &[x, y, z]) => {
                d.contains(x, y) && d.contains(y, z) && !d.contains(x, z)
            }
            (Axiom::ConflictNotIrreflexive, &[x, y]) => x == y && u.contains(x, x),
            (Axiom::ConflictNotSymmetric, &[x, y]) => u.contains(x, y) && !u.contains(y, x),
            (Axiom::FieldContainment, &[x]) => u.field().contains(x) && !d.field().contains(x),
            (Axiom::ConflictPropagation, &[x0, x1, y]) => {
                u.contains(x0, y) && d.contains(x0, x1) && !u.contains(x1, y)
            }
            _ => false,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.witness.iter().map(|e| e.to_string()).collect();
        write!(f, "{} ({})", self.axiom, ids.join(","))
    }
}

/// Outcome of validating a candidate pair of relations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct EsVerdict {
    pub violations: Vec<Violation>,
}

impl EsVerdict {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for EsVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid() {
            return f.write_str("valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

fn first_missing_loop(d: &BinRel) -> Option<Violation> {
    let missing = d.field().difference(d.fixed_points()).first()?;
    Some(Violation::new(Axiom::NotPartialOrder, &[missing.0, missing.0]))
}

fn first_antisymmetry_failure(d: &BinRel) -> Option<Violation> {
    d.pairs()
        .find(|&(x, y)| x != y && d.contains(y, x))
        .map(|(x, y)| Violation::new(Axiom::NotPartialOrder, &[x.0, y.0]))
}

fn first_transitivity_failure(d: &BinRel) -> Option<Violation> {
    d.pairs().find_map(|(x, y)| {
        let missing = d.successors(y).difference(d.successors(x));
        missing
            .first()
            .map(|z| Violation::new(Axiom::NotPartialOrder, &[x.0, y.0, z.0]))
    })
}

/// Checks every event-structure axiom on `(d, u)`.
///
/// At most one violation is reported per axiom, carrying the lexicographically
/// smallest witness. Partial-order failures are searched in the order missing
/// loop, antisymmetry, transitivity.
pub fn validate_es(d: &BinRel, u: &BinRel) -> Result<EsVerdict, EsError> {
    if d.carrier() != u.carrier() {
        return Err(RelError::CarrierMismatch { left: d.carrier(), right: u.carrier() }.into());
    }
    let mut violations = Vec::new();

    if let Some(v) = first_missing_loop(d)
        .or_else(|| first_antisymmetry_failure(d))
        .or_else(|| first_transitivity_failure(d))
    {
        violations.push(v);
    }

    if let Some(x) = u.fixed_points().first() {
        violations.push(Violation::new(Axiom::ConflictNotIrreflexive, &[x.0, x.0]));
    }

    if let Some((x, y)) = u.pairs().find(|&(x, y)| !u.contains(y, x)) {
        violations.push(Violation::new(Axiom::ConflictNotSymmetric, &[x.0, y.0]));
    }

    if let Some(x) = u.field().difference(d.field()).first() {
        violations.push(Violation::new(Axiom::FieldContainment, &[x.0]));
    }

    // (x0, x1, y): x0 # y, x0 <= x1, not x1 # y
    let propagation = (0..d.carrier()).find_map(|x0| {
        let x0 = EventId(x0);
        d.successors(x0).iter().find_map(|x1| {
            let missing = u.successors(x0).difference(u.successors(x1));
            missing.first().map(|y| (x0, x1, y))
        })
    });
    if let Some((x0, x1, y)) = propagation {
        violations.push(Violation::new(Axiom::ConflictPropagation, &[x0.0, x1.0, y.0]));
    }

    Ok(EsVerdict { violations })
}

/// A validated event structure `(D, U)`: `D` is causality (stored reflexive and
/// transitively closed), `U` is conflict. The events are the field of `D`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EventStructure {
    causality: BinRel,
    conflict: BinRel,
}

impl fmt::Debug for EventStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EventStructure")
            .field("causality", &self.causality)
            .field("conflict", &self.conflict)
            .finish()
    }
}

impl EventStructure {
    pub fn new(causality: BinRel, conflict: BinRel) -> Result<Self, EsError> {
        let verdict = validate_es(&causality, &conflict)?;
        if !verdict.valid() {
            return Err(EsError::Invalid(verdict));
        }
        Ok(EventStructure { causality, conflict })
    }

    /// Skips validation; callers must already know the axioms hold.
    pub(crate) fn new_unchecked(causality: BinRel, conflict: BinRel) -> Self {
        debug_assert!(validate_es(&causality, &conflict).map(|v| v.valid()).unwrap_or(false));
        EventStructure { causality, conflict }
    }

    /// The event structure on `n` events with trivial causality and no conflict.
    pub fn discrete(n: usize) -> Result<Self, EsError> {
        Self::new(BinRel::diagonal(n)?, BinRel::empty(n)?)
    }

    pub fn carrier(&self) -> usize {
        self.causality.carrier()
    }

    pub fn causality(&self) -> &BinRel {
        &self.causality
    }

    pub fn conflict(&self) -> &BinRel {
        &self.conflict
    }

    pub fn events(&self) -> EventSet {
        self.causality.field()
    }

    /// True when the events are exactly `{0, .., n-1}`.
    pub fn spans_carrier(&self) -> bool {
        self.events() == EventSet::full(self.carrier())
    }

    pub fn into_parts(self) -> (BinRel, BinRel) {
        (self.causality, self.conflict)
    }

    fn require_event(&self, s: EventId) -> Result<(), EsError> {
        if self.events().contains(s) {
            Ok(())
        } else {
            Err(EsError::NotAnEvent(s))
        }
    }

    /// Events below `s`, `s` included.
    pub fn down_set(&self, s: EventId) -> EventSet {
        self.causality.predecessors(s)
    }

    /// Events strictly below `s`.
    pub fn strict_down_set(&self, s: EventId) -> EventSet {
        let mut d = self.down_set(s);
        d.remove(s);
        d
    }

    /// The structure with `s` and every pair mentioning it removed.
    pub fn remove_event(&self, s: EventId) -> Result<EventStructure, EsError> {
        self.require_event(s)?;
        Ok(EventStructure::new_unchecked(
            self.causality.remove_event(s),
            self.conflict.remove_event(s),
        ))
    }

    /// Events neither below nor in conflict with `s`.
    pub fn concurrent_with(&self, s: EventId) -> Result<EventSet, EsError> {
        self.require_event(s)?;
        Ok(self
            .events()
            .difference(self.causality.predecessors(s))
            .difference(self.conflict.predecessors(s)))
    }

    /// `(conflict_free, down_closed)` for the event set `xs`.
    pub fn check_cover_set(&self, xs: EventSet) -> (bool, bool) {
        let conflict_free = xs.is_disjoint(self.conflict.image(xs));
        let down_closed = self.causality.converse().image(xs).is_subset(xs);
        (conflict_free, down_closed)
    }
}

/// Smallest `s` in the field of `d` whose image is exactly `{s}`.
pub fn pick_maximal(d: &BinRel) -> Result<EventId, EsError> {
    let field = d.field();
    if field.is_empty() {
        return Err(EsError::NoEvents);
    }
    field
        .iter()
        .find(|&s| d.successors(s) == EventSet::singleton(s))
        .ok_or(EsError::NoEvents)
}
