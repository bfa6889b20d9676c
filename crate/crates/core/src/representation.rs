//! Set-family representations of event structures.
//!
//! A representation sends each event to a finite set of natural numbers so
//! that causality `x <= y` holds exactly when `f x ⊇ f y` and conflict `x # y`
//! holds exactly when `f x ∩ f y = ∅`. Every finite event structure has an
//! injective representation with non-empty values; [`build_representation`]
//! constructs one by peeling off a maximal event, representing the rest, then
//! enlarging the smaller representation with fresh labels until the removed
//! event can be reinserted.

use thiserror::Error;

use crate::escore::{pick_maximal, validate_es, EsError, EsVerdict, EventStructure};
use crate::relcore::{BinRel, EventId, EventSet, LabelSet, SetValuedMap};

/// Map from events to their label sets.
pub type SetFamilyRep = SetValuedMap;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error(transparent)]
    Es(#[from] EsError),
    #[error("input is not an event structure: {0}")]
    InvalidEs(EsVerdict),
    #[error("domain of the map {found:?} differs from the events {expected:?}")]
    DomainMismatch { expected: EventSet, found: EventSet },
    #[error("extension plan violates hypothesis {0}")]
    PlanHypothesis(u8),
    #[error("augmentation rejected: {0}")]
    Augment(AugmentError),
    #[error("extension rejected: {0}")]
    Extend(ExtendError),
    #[error("internal error: {0}")]
    Internal(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AugmentError {
    #[error("base map is not a representation")]
    NotARepresentation,
    #[error("{0} is in the augmentation domain but not the base domain")]
    DomainNotContained(EventId),
    #[error("label {0} is used by both maps")]
    LabelClash(u64),
    #[error("conflicting events {0} and {1} are both augmented")]
    ConflictingPairAugmented(EventId, EventId),
    #[error("{0} <= {1} but the augmentation is not monotone there")]
    NotMonotone(EventId, EventId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtendError {
    #[error("{0} is not an event")]
    NotAnEvent(EventId),
    #[error("{0} is not maximal")]
    NotMaximal(EventId),
    #[error("{0} conflicts with itself")]
    SelfConflict(EventId),
    #[error("{0} is already in the domain")]
    AlreadyMapped(EventId),
    #[error("new value is empty")]
    EmptyValue,
    #[error("base map is not a representation of the reduced structure")]
    NotARepresentation,
    #[error("condition {index} fails at {event}")]
    Condition { event: EventId, index: u8 },
}

/// Whether `f` represents `(d, u)`: for all `x, y` in the domain,
/// `(x, y) in d` iff `f x ⊇ f y`, and `(x, y) in u` iff `f x ∩ f y = ∅`.
///
/// The domain of `f` must equal the field of `d`.
pub fn check_representation(f: &SetFamilyRep, d: &BinRel, u: &BinRel) -> Result<bool, RepError> {
    if f.domain() != d.field() {
        return Err(RepError::DomainMismatch { expected: d.field(), found: f.domain() });
    }
    Ok(f.iter().all(|(x, fx)| {
        f.iter().all(|(y, fy)| {
            d.contains(x, y) == fx.is_superset(fy) && u.contains(x, y) == fx.is_disjoint(fy)
        })
    }))
}

/// Values pairwise distinct and none empty.
pub fn is_injective_nonempty(f: &SetFamilyRep) -> bool {
    f.iter().all(|(_, v)| !v.is_empty()) && f.is_injective()
}

/// Data for reinserting a removed maximal event `s` into a representation of
/// the reduced structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionPlan {
    pub s: EventId,
    /// `X_i`: a conflict-free down-closed cover of the events concurrent with `s`,
    /// each extended by the events strictly below `s`.
    pub covers: Vec<EventSet>,
    /// One more than the largest label already in use (0 when none is).
    pub fresh_base: u64,
    /// `fresh_base + covers.len() + 1`, attached to everything strictly below `s`.
    pub sentinel: u64,
    /// The value `s` receives: `fresh_base + 1 ..= sentinel`.
    pub labels: LabelSet,
    pub strict_downset: EventSet,
}

impl ExtensionPlan {
    /// Label attached to every member of `covers[i]`.
    pub fn cover_label(&self, i: usize) -> u64 {
        self.fresh_base + i as u64 + 1
    }

    /// The constant maps `X_i × {m + i}` followed by the sentinel map, in
    /// the order they are applied.
    pub fn augmentations(&self) -> Vec<SetValuedMap> {
        let mut out: Vec<SetValuedMap> = self
            .covers
            .iter()
            .enumerate()
            .map(|(i, &x)| SetValuedMap::constant(x, &LabelSet::from([self.cover_label(i)])))
            .collect();
        out.push(SetValuedMap::constant(self.strict_downset, &LabelSet::from([self.sentinel])));
        out
    }
}

/// Computes the covers and fresh labels for reinserting `s`, then checks the
/// five hypotheses under which the augmented map separates `s` correctly:
///
/// 1. no cover meets the events in conflict with `s`;
/// 2. every event strictly below `s` lies in every cover;
/// 3. every mapped event not below and not in conflict with `s` is covered;
/// 4. `s` is unmapped;
/// 5. the new labels are unused by `f`.
pub fn plan_extension(
    es: &EventStructure,
    s: EventId,
    f: &SetFamilyRep,
) -> Result<ExtensionPlan, RepError> {
    let d = es.causality();
    let u = es.conflict();
    if d.successors(s) != EventSet::singleton(s) {
        return Err(RepError::Extend(ExtendError::NotMaximal(s)));
    }
    let reduced = es.remove_event(s)?;
    if !check_representation(f, reduced.causality(), reduced.conflict())? {
        return Err(RepError::Extend(ExtendError::NotARepresentation));
    }

    let strict_downset = es.strict_down_set(s);
    let concurrent = es.concurrent_with(s)?;

    let mut zs: Vec<EventSet> = concurrent.iter().map(|c| es.down_set(c)).collect();
    zs.sort_by_key(|z| z.iter().collect::<Vec<_>>());
    zs.dedup();
    let covers: Vec<EventSet> = zs.into_iter().map(|z| z.union(strict_downset)).collect();

    let fresh_base = f.max_label().map_or(0, |m| m + 1);
    let sentinel = fresh_base + covers.len() as u64 + 1;
    let labels: LabelSet = (fresh_base + 1..=sentinel).collect();

    let plan = ExtensionPlan { s, covers, fresh_base, sentinel, labels, strict_downset };

    let conflicting = u.predecessors(s);
    if strict_downset.intersects(conflicting) {
        return Err(RepError::PlanHypothesis(0));
    }
    if plan.covers.iter().any(|&x| es.check_cover_set(x) != (true, true)) {
        return Err(RepError::PlanHypothesis(0));
    }
    let covered = plan.covers.iter().fold(EventSet::EMPTY, |acc, &x| acc.union(x));
    if covered.intersects(conflicting) {
        return Err(RepError::PlanHypothesis(1));
    }
    if plan.covers.iter().any(|&x| !strict_downset.is_subset(x)) {
        return Err(RepError::PlanHypothesis(2));
    }
    let dom = f.domain();
    if !dom.difference(d.predecessors(s)).difference(conflicting).is_subset(covered) {
        return Err(RepError::PlanHypothesis(3));
    }
    if dom.contains(s) {
        return Err(RepError::PlanHypothesis(4));
    }
    let used = f.labels();
    if plan.labels.iter().any(|l| used.contains(l)) {
        return Err(RepError::PlanHypothesis(5));
    }
    Ok(plan)
}

/// `f + extra`, provided that this is again a representation of `es`.
///
/// Requires `f` to represent `es`, `dom extra ⊆ dom f`, fresh labels in
/// `extra`, no conflicting pair with both members in `dom extra`, and
/// `dom extra` up-closed under causality with `extra` monotone.
pub fn augment(
    f: &SetFamilyRep,
    extra: &SetValuedMap,
    es: &EventStructure,
) -> Result<SetFamilyRep, RepError> {
    let fail = |e| Err(RepError::Augment(e));
    if !check_representation(f, es.causality(), es.conflict())? {
        return fail(AugmentError::NotARepresentation);
    }
    let dom = f.domain();
    let extra_dom = extra.domain();
    if let Some(x) = extra_dom.difference(dom).first() {
        return fail(AugmentError::DomainNotContained(x));
    }
    let used = f.labels();
    if let Some(&l) = extra.labels().iter().find(|l| used.contains(l)) {
        return fail(AugmentError::LabelClash(l));
    }
    for (x, y) in es.conflict().pairs() {
        if extra_dom.contains(x) && extra_dom.contains(y) {
            return fail(AugmentError::ConflictingPairAugmented(x, y));
        }
    }
    for (x, y) in es.causality().pairs() {
        let Some(fy) = extra.get(y) else { continue };
        match extra.get(x) {
            Some(fx) if fx.is_superset(fy) => {}
            _ => return fail(AugmentError::NotMonotone(x, y)),
        }
    }
    Ok(f.pointwise_union(extra))
}

/// `g + (s, y)`, provided that it represents `es` given that `g` represents
/// `es` with `s` removed.
///
/// For every mapped `x`:
/// 1. `g x ⊄ y`;
/// 2. `y ⊆ g x` iff `x` is strictly below `s`;
/// 3. `g x ∩ y = ∅` iff `x` is in conflict with `s`.
pub fn extend(
    g: &SetFamilyRep,
    s: EventId,
    y: &LabelSet,
    es: &EventStructure,
) -> Result<SetFamilyRep, RepError> {
    let fail = |e| Err(RepError::Extend(e));
    if !es.events().contains(s) {
        return fail(ExtendError::NotAnEvent(s));
    }
    if es.causality().successors(s) != EventSet::singleton(s) {
        return fail(ExtendError::NotMaximal(s));
    }
    if es.conflict().contains(s, s) {
        return fail(ExtendError::SelfConflict(s));
    }
    if g.get(s).is_some() {
        return fail(ExtendError::AlreadyMapped(s));
    }
    if y.is_empty() {
        return fail(ExtendError::EmptyValue);
    }
    let reduced = es.remove_event(s)?;
    if !check_representation(g, reduced.causality(), reduced.conflict())? {
        return fail(ExtendError::NotARepresentation);
    }
    let below = es.strict_down_set(s);
    let conflicting = es.conflict().predecessors(s);
    for (x, gx) in g.iter() {
        if gx.is_subset(y) {
            return fail(ExtendError::Condition { event: x, index: 1 });
        }
        if y.is_subset(gx) != below.contains(x) {
            return fail(ExtendError::Condition { event: x, index: 2 });
        }
        if gx.is_disjoint(y) != conflicting.contains(x) {
            return fail(ExtendError::Condition { event: x, index: 3 });
        }
    }
    let mut out = g.clone();
    out.insert(s, y.clone());
    Ok(out)
}

/// Builds an injective, ∅-free representation of `es`.
///
/// Deterministic: the removed event is always the smallest maximal one and the
/// covers are the down-sets of the concurrent events, sorted by their members.
pub fn build_representation(es: &EventStructure) -> Result<SetFamilyRep, RepError> {
    let f = build_rec(es)?;
    if !check_representation(&f, es.causality(), es.conflict())? {
        return Err(RepError::Internal("constructed map is not a representation"));
    }
    if !is_injective_nonempty(&f) {
        return Err(RepError::Internal("constructed map is not injective and ∅-free"));
    }
    Ok(f)
}

/// Validates `(d, u)` first, then builds a representation.
pub fn represent(d: &BinRel, u: &BinRel) -> Result<SetFamilyRep, RepError> {
    let verdict = validate_es(d, u)?;
    if !verdict.valid() {
        return Err(RepError::InvalidEs(verdict));
    }
    build_representation(&EventStructure::new_unchecked(d.clone(), u.clone()))
}

fn build_rec(es: &EventStructure) -> Result<SetFamilyRep, RepError> {
    if es.events().is_empty() {
        return Ok(SetFamilyRep::new());
    }
    let s = pick_maximal(es.causality())?;
    let reduced = es.remove_event(s)?;
    let f = build_rec(&reduced)?;
    let plan = plan_extension(es, s, &f)?;
    let g = plan
        .augmentations()
        .iter()
        .try_fold(f, |acc, extra| augment(&acc, extra, &reduced))?;
    extend(&g, s, &plan.labels, es)
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

    fn sym(n: usize, pairs: &[(usize, usize)]) -> BinRel {
        let r = rel(n, pairs);
        r.union(&r.converse())
    }

    fn map(entries: &[(usize, &[u64])]) -> SetFamilyRep {
        entries
            .iter()
            .map(|(k, v)| (EventId(*k), v.iter().copied().collect()))
            .collect()
    }

    fn labels(xs: &[u64]) -> LabelSet {
        xs.iter().copied().collect()
    }

    fn set(ids: &[usize]) -> EventSet {
        ids.iter().map(|&i| EventId(i)).collect()
    }

    fn chain2() -> EventStructure {
        EventStructure::new(po(2, &[(0, 1)]), rel(2, &[])).unwrap()
    }

    fn conflict2() -> EventStructure {
        EventStructure::new(po(2, &[]), sym(2, &[(0, 1)])).unwrap()
    }

    #[test]
    fn check_representation_examples() {
        let d = po(2, &[(0, 1)]);
        let empty = rel(2, &[]);
        assert!(check_representation(&map(&[(0, &[1, 3]), (1, &[3])]), &d, &empty).unwrap());
        let discrete = po(2, &[]);
        assert!(!check_representation(&map(&[(0, &[1]), (1, &[1])]), &discrete, &empty).unwrap());
        assert!(!check_representation(&map(&[(0, &[1]), (1, &[2])]), &discrete, &empty).unwrap());
        assert!(matches!(
            check_representation(&map(&[(0, &[1])]), &discrete, &empty),
            Err(RepError::DomainMismatch { .. })
        ));
    }

    #[test]
    fn injective_nonempty_examples() {
        assert!(is_injective_nonempty(&map(&[(0, &[1]), (1, &[2])])));
        assert!(!is_injective_nonempty(&map(&[(0, &[1]), (1, &[1])])));
        assert!(!is_injective_nonempty(&map(&[(0, &[])])));
    }

    #[test]
    fn build_examples() {
        let empty = EventStructure::discrete(0).unwrap();
        assert_eq!(build_representation(&empty).unwrap(), SetFamilyRep::new());
        assert_eq!(
            build_representation(&chain2()).unwrap(),
            map(&[(0, &[1, 3]), (1, &[3])])
        );
        assert_eq!(
            build_representation(&conflict2()).unwrap(),
            map(&[(0, &[3]), (1, &[1])])
        );
    }

    #[test]
    fn represent_rejects_invalid_input() {
        let d = po(3, &[(0, 2)]);
        let u = sym(3, &[(0, 1)]);
        assert!(matches!(represent(&d, &u), Err(RepError::InvalidEs(_))));
    }

    #[test]
    fn plan_examples() {
        let plan = plan_extension(&chain2(), EventId(1), &map(&[(0, &[1])])).unwrap();
        assert!(plan.covers.is_empty());
        assert_eq!((plan.fresh_base, plan.sentinel), (2, 3));
        assert_eq!(plan.labels, labels(&[3]));
        assert_eq!(plan.strict_downset, set(&[0]));

        let free = EventStructure::discrete(2).unwrap();
        let plan = plan_extension(&free, EventId(0), &map(&[(1, &[1])])).unwrap();
        assert_eq!(plan.covers, vec![set(&[1])]);
        assert_eq!(plan.fresh_base, 2);
        assert_eq!(plan.labels, labels(&[3, 4]));
        assert!(plan.strict_downset.is_empty());

        let single = EventStructure::discrete(1).unwrap();
        let plan = plan_extension(&single, EventId(0), &SetFamilyRep::new()).unwrap();
        assert!(plan.covers.is_empty());
        assert_eq!(plan.fresh_base, 0);
        assert_eq!(plan.labels, labels(&[1]));
    }

    #[test]
    fn plan_rejects_non_maximal_event() {
        assert!(matches!(
            plan_extension(&chain2(), EventId(0), &map(&[(1, &[1])])),
            Err(RepError::Extend(ExtendError::NotMaximal(_)))
        ));
    }

    #[test]
    fn augment_examples() {
        // disjoint values: this map represents the two-event conflict structure
        let conflict = conflict2();
        let f = map(&[(0, &[1]), (1, &[2])]);
        let g = augment(&f, &map(&[(0, &[10])]), &conflict).unwrap();
        assert_eq!(g, map(&[(0, &[1, 10]), (1, &[2])]));
        assert!(check_representation(&g, conflict.causality(), conflict.conflict()).unwrap());

        assert_eq!(augment(&f, &SetValuedMap::new(), &conflict).unwrap(), f);

        let free = EventStructure::discrete(2).unwrap();
        assert_eq!(
            augment(&f, &map(&[(0, &[10])]), &free),
            Err(RepError::Augment(AugmentError::NotARepresentation))
        );

        assert_eq!(
            augment(&f, &map(&[(0, &[10]), (1, &[11])]), &conflict),
            Err(RepError::Augment(AugmentError::ConflictingPairAugmented(EventId(0), EventId(1))))
        );
    }

    #[test]
    fn augment_rejects_reused_labels_and_non_monotone_maps() {
        let chain = chain2();
        let f = map(&[(0, &[1, 2]), (1, &[2])]);
        assert_eq!(
            augment(&f, &map(&[(0, &[2])]), &chain),
            Err(RepError::Augment(AugmentError::LabelClash(2)))
        );
        assert_eq!(
            augment(&f, &map(&[(1, &[7])]), &chain),
            Err(RepError::Augment(AugmentError::NotMonotone(EventId(0), EventId(1))))
        );
    }

    #[test]
    fn extend_examples() {
        let out = extend(&map(&[(0, &[1, 3])]), EventId(1), &labels(&[3]), &chain2()).unwrap();
        assert_eq!(out, map(&[(0, &[1, 3]), (1, &[3])]));

        let out = extend(&map(&[(1, &[1])]), EventId(0), &labels(&[3]), &conflict2()).unwrap();
        assert_eq!(out, map(&[(0, &[3]), (1, &[1])]));
    }

    #[test]
    fn extend_reports_failing_condition() {
        let cond = |event, index| Err(RepError::Extend(ExtendError::Condition { event: EventId(event), index }));
        // 0 is below 1, but {2, 3} only overlaps g(0)
        let g = map(&[(0, &[1, 2])]);
        assert_eq!(extend(&g, EventId(1), &labels(&[2, 3]), &chain2()), cond(0, 2));
        // 0 conflicts with 1, but {2, 3} meets g(0)
        assert_eq!(extend(&g, EventId(1), &labels(&[2, 3]), &conflict2()), cond(0, 3));
        // g(0) inside the new value
        assert_eq!(extend(&g, EventId(1), &labels(&[1, 2, 3]), &chain2()), cond(0, 1));
    }
}
