//! Finite prime event structures.
//!
//! - [`relcore`]: relation algebra on small carriers and set-valued maps.
//! - [`escore`]: the event-structure axioms and the structural operations used
//!   when building representations.
//! - [`representation`]: checking and constructing injective set-family
//!   representations (causality as `⊇`, conflict as disjointness).
//! - [`fullgraph`]: full graphs (containment plus overlap edges) and their
//!   bijection with event structures over the same partial order.
//! - [`enumeration`]: exact counts of posets, event structures and full graphs,
//!   with brute-force oracles.

pub mod enumeration;
pub mod escore;
pub mod fullgraph;
pub mod relcore;
pub mod representation;

pub use escore::{pick_maximal, validate_es, Axiom, EsError, EsVerdict, EventStructure, Violation};
pub use fullgraph::{
    build_fg_representation, comp_complement, es_to_fullgraph, f_d, fullgraph_to_es, is_full_graph,
    FgError, FgReason, FullGraph,
};
pub use relcore::{BinRel, EventId, EventSet, LabelRelation, LabelSet, RelError, RelProps, SetValuedMap};
pub use representation::{build_representation, check_representation, is_injective_nonempty, SetFamilyRep};
