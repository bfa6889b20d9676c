#![allow(dead_code)]

use evstruct::enumeration::{enumerate_posets, Limits, PairPoset};
use evstruct::{BinRel, EventId, EventStructure, LabelSet, SetValuedMap};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn rel(n: usize, pairs: &[(usize, usize)]) -> BinRel {
    BinRel::from_pairs(n, pairs.iter().copied()).unwrap()
}

/// Random partial order on `{0..n-1}`: a random DAG along a shuffled order, closed.
pub fn random_poset<R: Rng>(rng: &mut R, n: usize) -> BinRel {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let density: f64 = rng.gen_range(0.0..0.6);
    let mut d = BinRel::diagonal(n).unwrap();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                d.insert(EventId(order[i]), EventId(order[j])).unwrap();
            }
        }
    }
    d.reflexive_transitive_closure()
}

/// Random event structure: random poset, then the up-closure of a random set of
/// admissible conflict pairs.
pub fn random_es<R: Rng>(rng: &mut R, n: usize) -> EventStructure {
    let d = random_poset(rng, n);
    let pp = PairPoset::new(&d).unwrap();
    let mut mask = 0u64;
    for i in 0..pp.len() {
        if rng.gen_bool(0.3) {
            for j in 0..pp.len() {
                if pp.le(i, j) {
                    mask |= 1 << j;
                }
            }
        }
    }
    let u = pp.conflict_relation(n, mask);
    EventStructure::new(d, u).unwrap()
}

/// Random set-valued map on `{0..n-1}` with values drawn from `{1..=universe}`.
pub fn random_family<R: Rng>(rng: &mut R, n: usize, universe: u64, allow_empty: bool) -> SetValuedMap {
    (0..n)
        .map(|i| {
            let mut s: LabelSet = (1..=universe).filter(|_| rng.gen_bool(0.4)).collect();
            if s.is_empty() && !allow_empty {
                s.insert(rng.gen_range(1..=universe));
            }
            (EventId(i), s)
        })
        .collect()
}

/// Random injective, ∅-free family on `{0..n-1}`.
pub fn random_injective_family<R: Rng>(rng: &mut R, n: usize) -> SetValuedMap {
    loop {
        let f = random_family(rng, n, 2 + n as u64, false);
        if f.is_injective() {
            return f;
        }
    }
}

/// Every event structure on `n` events, via the engine's own stream.
pub fn all_es(n: usize) -> Vec<EventStructure> {
    evstruct::enumeration::enumerate_event_structures(n, &Limits::default())
        .unwrap()
        .collect()
}

pub fn all_posets(n: usize) -> Vec<BinRel> {
    enumerate_posets(n, &Limits::default()).unwrap().collect()
}

/// All symmetric subsets of the incomparable pairs of `d`.
pub fn symmetric_candidates(d: &BinRel) -> Vec<BinRel> {
    let n = d.carrier();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .filter(|&(x, y)| !d.contains(EventId(x), EventId(y)) && !d.contains(EventId(y), EventId(x)))
        .collect();
    (0..1u32 << pairs.len())
        .map(|mask| {
            let chosen = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .flat_map(|(_, &(x, y))| [(x, y), (y, x)]);
            BinRel::from_pairs(n, chosen).unwrap()
        })
        .collect()
}
