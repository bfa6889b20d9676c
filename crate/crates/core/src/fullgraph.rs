//! Full graphs: mixed graphs of directed containment edges `D` and undirected
//! overlap edges `T` realisable by an injective family of non-empty sets.
//!
//! For a fixed partial order `D`, the map `R ↦ C(D) \ R`, where `C(D)` is the
//! set of pairs comparable in neither direction, sends conflict relations
//! making `(D, U)` an event structure onto overlap relations making `(D, T)`
//! a full graph, and back.

use std::fmt;

use thiserror::Error;

use crate::escore::{validate_es, EsError, EsVerdict, EventStructure};
use crate::relcore::{BinRel, EventId, LabelSet, RelError};
use crate::representation::{build_representation, is_injective_nonempty, RepError, SetFamilyRep};

pub use crate::relcore::overlaps;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FgError {
    #[error(transparent)]
    Relation(#[from] RelError),
    #[error(transparent)]
    Es(#[from] EsError),
    #[error(transparent)]
    Representation(#[from] RepError),
    #[error("causality is not a partial order")]
    NotPartialOrder,
    #[error("relation is not contained in the comparability complement (pair {0}, {1})")]
    NotInComplement(EventId, EventId),
    #[error("not a full graph: {0}")]
    NotAFullGraph(FgReason),
}

/// Why a pair `(D, T)` fails to be a full graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FgReason {
    CarrierMismatch,
    NotPartialOrder,
    NotSymmetric(EventId, EventId),
    NotInComplement(EventId, EventId),
    InducedConflictInvalid(EsVerdict),
}

impl fmt::Display for FgReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FgReason::CarrierMismatch => f.write_str("carrier mismatch"),
            FgReason::NotPartialOrder => f.write_str("containment edges are not a partial order"),
            FgReason::NotSymmetric(x, y) => write!(f, "overlap edge ({x}, {y}) has no reverse"),
            FgReason::NotInComplement(x, y) => {
                write!(f, "overlap edge ({x}, {y}) joins comparable or unknown vertices")
            }
            FgReason::InducedConflictInvalid(v) => {
                write!(f, "complementary conflict relation is invalid: {v}")
            }
        }
    }
}

impl FgReason {
    pub fn tag(&self) -> &'static str {
        match self {
            FgReason::CarrierMismatch => "CarrierMismatch",
            FgReason::NotPartialOrder => "NotPartialOrder",
            FgReason::NotSymmetric(..) => "NotSymmetric",
            FgReason::NotInComplement(..) => "NotInComplement",
            FgReason::InducedConflictInvalid(_) => "InducedConflictInvalid",
        }
    }
}

/// `field(d)² \ (d ∪ d⁻¹)`: ordered pairs of events comparable in neither direction.
pub fn comp_complement(d: &BinRel) -> Result<BinRel, FgError> {
    if !d.classify().partial_order {
        return Err(FgError::NotPartialOrder);
    }
    let field = d.field();
    let rows = (0..d.carrier())
        .map(|x| {
            if field.contains(EventId(x)) {
                field.bits() & !d.rows()[x] & !d.predecessors(EventId(x)).bits()
            } else {
                0
            }
        })
        .collect();
    Ok(BinRel::from_rows(d.carrier(), rows)?)
}

/// `comp_complement(d) \ r`; an involution on subsets of the complement.
pub fn f_d(d: &BinRel, r: &BinRel) -> Result<BinRel, FgError> {
    let cc = comp_complement(d)?;
    if let Some((x, y)) = r.difference(&cc).pairs().next() {
        return Err(FgError::NotInComplement(x, y));
    }
    Ok(cc.difference(r))
}

/// A full graph `(D, T)`: `D` the reflexive containment order, `T` the
/// symmetric overlap edges. The vertices are the field of `D`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FullGraph {
    containment: BinRel,
    overlap: BinRel,
}

impl FullGraph {
    /// Accepts `(d, t)` only when it is a full graph.
    pub fn new(containment: BinRel, overlap: BinRel) -> Result<Self, FgError> {
        is_full_graph(&containment, &overlap).map_err(FgError::NotAFullGraph)?;
        Ok(FullGraph { containment, overlap })
    }

    pub fn carrier(&self) -> usize {
        self.containment.carrier()
    }

    pub fn containment(&self) -> &BinRel {
        &self.containment
    }

    pub fn overlap(&self) -> &BinRel {
        &self.overlap
    }

    pub fn into_parts(self) -> (BinRel, BinRel) {
        (self.containment, self.overlap)
    }
}

/// Recognises full graphs through the conflict relation `f_d(d, t)`: `(d, t)`
/// is a full graph iff `t` is symmetric, lies in the comparability complement,
/// and its complement there makes `d` an event structure.
pub fn is_full_graph(d: &BinRel, t: &BinRel) -> Result<(), FgReason> {
    if d.carrier() != t.carrier() {
        return Err(FgReason::CarrierMismatch);
    }
    let cc = comp_complement(d).map_err(|_| FgReason::NotPartialOrder)?;
    if let Some((x, y)) = t.pairs().find(|&(x, y)| !t.contains(y, x)) {
        return Err(FgReason::NotSymmetric(x, y));
    }
    if let Some((x, y)) = t.difference(&cc).pairs().next() {
        return Err(FgReason::NotInComplement(x, y));
    }
    let u = cc.difference(t);
    let verdict = validate_es(d, &u).map_err(|_| FgReason::CarrierMismatch)?;
    if !verdict.valid() {
        return Err(FgReason::InducedConflictInvalid(verdict));
    }
    Ok(())
}

pub fn es_to_fullgraph(es: &EventStructure) -> Result<FullGraph, FgError> {
    let t = f_d(es.causality(), es.conflict())?;
    Ok(FullGraph { containment: es.causality().clone(), overlap: t })
}

pub fn fullgraph_to_es(fg: &FullGraph) -> Result<EventStructure, FgError> {
    let u = f_d(&fg.containment, &fg.overlap)?;
    Ok(EventStructure::new(fg.containment.clone(), u)?)
}

/// Checks `f` directly against the full-graph definition: for all vertices,
/// `(x, y) in D` iff `f x ⊇ f y` and `(x, y) in T` iff `f x` and `f y` overlap;
/// `f` injective with non-empty values on exactly the vertices.
pub fn check_fg_representation(f: &SetFamilyRep, fg: &FullGraph) -> bool {
    let d = &fg.containment;
    let t = &fg.overlap;
    f.domain() == d.field()
        && is_injective_nonempty(f)
        && f.iter().all(|(x, fx): (EventId, &LabelSet)| {
            f.iter().all(|(y, fy)| {
                d.contains(x, y) == fx.is_superset(fy) && t.contains(x, y) == overlaps(fx, fy)
            })
        })
}

/// An fg-representation of `fg`: the event-structure representation of
/// `(D, f_d(D, T))`, which realises the overlap edges as well.
pub fn build_fg_representation(fg: &FullGraph) -> Result<SetFamilyRep, FgError> {
    let es = fullgraph_to_es(fg)?;
    let f = build_representation(&es)?;
    if !check_fg_representation(&f, fg) {
        return Err(RepError::Internal("set family does not realise the full graph").into());
    }
    Ok(f)
}
