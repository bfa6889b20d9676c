//! JSON documents.
//!
//! Every document is an object with a `kind` tag and a size `n`. Causality is
//! written as its cover pairs and closed reflexively and transitively on load.
//! Conflict and overlap edges are written once, smaller endpoint first, and
//! symmetrised on load.

use std::collections::BTreeMap;

use evstruct::{BinRel, EsVerdict, EventId, EventStructure, FullGraph, LabelSet, SetFamilyRep};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type Pair = [usize; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Document {
    EventStructure {
        n: usize,
        causality: Vec<Pair>,
        #[serde(default)]
        conflict: Vec<Pair>,
    },
    FullGraph {
        n: usize,
        causality: Vec<Pair>,
        #[serde(default)]
        overlap: Vec<Pair>,
    },
    Representation {
        n: usize,
        #[serde(with = "event_keys")]
        sets: BTreeMap<usize, Vec<u64>>,
    },
    CountReport(CountReport),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountKind {
    Es,
    Fullgraph,
    Posets,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    Engine,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardInfo {
    pub index: usize,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub n: usize,
    pub count: u64,
    /// `log2(count) / n²`; absent for `n = 0`, poset counts and partial shards.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log2_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub n: usize,
    pub count_kind: CountKind,
    pub method: CountMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shard: Option<ShardInfo>,
    pub rows: Vec<CountRow>,
    /// The count for size `n`.
    pub count: u64,
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::EventStructure { .. } => "event-structure",
            Document::FullGraph { .. } => "full-graph",
            Document::Representation { .. } => "representation",
            Document::CountReport(_) => "count-report",
        }
    }

    pub fn parse(text: &str) -> Result<Document, CliError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialise")
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("documents always serialise")
    }

    pub fn from_es(es: &EventStructure) -> Document {
        Document::EventStructure {
            n: es.carrier(),
            causality: covers(es.causality()),
            conflict: edges(es.conflict()),
        }
    }

    pub fn from_fullgraph(fg: &FullGraph) -> Document {
        Document::FullGraph {
            n: fg.carrier(),
            causality: covers(fg.containment()),
            overlap: edges(fg.overlap()),
        }
    }

    pub fn from_rep(f: &SetFamilyRep) -> Document {
        Document::Representation {
            n: f.domain().bound(),
            sets: f.iter().map(|(e, s)| (e.0, s.iter().copied().collect())).collect(),
        }
    }

    /// Causality and conflict as loaded, before any validation.
    pub fn raw_es(&self) -> Result<(BinRel, BinRel), CliError> {
        match self {
            Document::EventStructure { n, causality, conflict } => {
                Ok((closed_order(*n, causality)?, symmetric(*n, conflict)?))
            }
            other => Err(wrong_kind("event-structure", other)),
        }
    }

    pub fn es(&self) -> Result<EventStructure, CliError> {
        let (d, u) = self.raw_es()?;
        EventStructure::new(d, u).map_err(CliError::from)
    }

    /// Containment and overlap as loaded, before any validation.
    pub fn raw_fullgraph(&self) -> Result<(BinRel, BinRel), CliError> {
        match self {
            Document::FullGraph { n, causality, overlap } => {
                Ok((closed_order(*n, causality)?, symmetric(*n, overlap)?))
            }
            other => Err(wrong_kind("full-graph", other)),
        }
    }

    pub fn fullgraph(&self) -> Result<FullGraph, CliError> {
        let (d, t) = self.raw_fullgraph()?;
        if !d.classify().partial_order {
            return Err(CliError::Invalid(order_verdict(&d)));
        }
        evstruct::is_full_graph(&d, &t).map_err(CliError::NotFullGraph)?;
        Ok(FullGraph::new(d, t)?)
    }

    pub fn rep(&self) -> Result<SetFamilyRep, CliError> {
        match self {
            Document::Representation { n, sets } => {
                check_n(*n)?;
                let mut f = SetFamilyRep::new();
                for (&e, labels) in sets {
                    if e >= *n {
                        return Err(CliError::Malformed(format!("event {e} outside 0..{n}")));
                    }
                    let set: LabelSet = labels.iter().copied().collect();
                    if set.len() != labels.len() {
                        return Err(CliError::Malformed(format!("repeated label in the set of {e}")));
                    }
                    f.insert(EventId(e), set);
                }
                Ok(f)
            }
            other => Err(wrong_kind("representation", other)),
        }
    }

    pub fn count_report(&self) -> Result<&CountReport, CliError> {
        match self {
            Document::CountReport(r) => Ok(r),
            other => Err(wrong_kind("count-report", other)),
        }
    }
}

fn wrong_kind(expected: &str, found: &Document) -> CliError {
    CliError::Malformed(format!("expected a {expected} document, found {}", found.kind()))
}

fn check_n(n: usize) -> Result<(), CliError> {
    if n > evstruct::relcore::MAX_CARRIER {
        return Err(CliError::Malformed(format!(
            "n = {n} exceeds {}",
            evstruct::relcore::MAX_CARRIER
        )));
    }
    Ok(())
}

fn relation(n: usize, pairs: &[Pair]) -> Result<BinRel, CliError> {
    check_n(n)?;
    if let Some(p) = pairs.iter().find(|p| p[0] >= n || p[1] >= n) {
        return Err(CliError::Malformed(format!("pair ({}, {}) outside 0..{n}", p[0], p[1])));
    }
    Ok(BinRel::from_pairs(n, pairs.iter().map(|p| (p[0], p[1])))?)
}

/// Reflexive-transitive closure of the given pairs over `{0..n-1}`.
fn closed_order(n: usize, pairs: &[Pair]) -> Result<BinRel, CliError> {
    let r = relation(n, pairs)?;
    Ok(r.union(&BinRel::diagonal(n)?).reflexive_transitive_closure())
}

fn symmetric(n: usize, pairs: &[Pair]) -> Result<BinRel, CliError> {
    let r = relation(n, pairs)?;
    Ok(r.union(&r.converse()))
}

fn covers(d: &BinRel) -> Vec<Pair> {
    d.transitive_reduction().pairs().map(|(x, y)| [x.0, y.0]).collect()
}

fn edges(r: &BinRel) -> Vec<Pair> {
    r.pairs().filter(|(x, y)| x <= y).map(|(x, y)| [x.0, y.0]).collect()
}

fn order_verdict(d: &BinRel) -> EsVerdict {
    let empty = BinRel::empty(d.carrier()).expect("carrier already checked");
    evstruct::validate_es(d, &empty).expect("same carrier")
}

/// Event ids as JSON object keys. Integer keys need explicit handling inside
/// a tagged enum.
mod event_keys {
    use std::collections::BTreeMap;

    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<usize, Vec<u64>>, s: S) -> Result<S::Ok, S::Error> {
        m.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, Vec<u64>>, D::Error> {
        BTreeMap::<String, Vec<u64>>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| {
                k.parse()
                    .map(|e| (e, v))
                    .map_err(|_| D::Error::custom(format!("event id {k:?} is not a number")))
            })
            .collect()
    }
}
