//! Exhaustive finite-group laboratory over `F_{q^s}`.
//!
//! Everything here is brute force with a hard element guard: point
//! enumeration of pattern groups, the zip action and its orbits, exact
//! stabilizers, Bruhat cells by elimination, the reduction step on a cell,
//! Lang-map preimages and point-count dimension estimates.

pub mod counterexample;
pub mod datum;
pub mod dimension;
pub mod field;
pub mod lang;
pub mod mat;

use std::collections::{HashSet, VecDeque};
use std::hash::Hash;

use serde::Serialize;
use thiserror::Error;

pub use datum::{Pattern, StandardForms, Twist, ZipDatumGroupLevel};
pub use field::{Fe, FiniteField};
pub use mat::Mat;

/// Maximal number of elements any enumeration may touch.
pub const GUARD: u128 = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabError {
    #[error("{what} has {size} elements, above the exhaustion guard of {GUARD}")]
    TooLarge { what: String, size: u128 },
    #[error("matrix is singular")]
    Singular,
    #[error("invalid datum: {0}")]
    BadDatum(String),
    #[error("field error: {0}")]
    Field(String),
    #[error("cell label sequence {0:?} matches no standard representative")]
    UnknownChain(Vec<Vec<usize>>),
    #[error("growth estimates disagree: {0:?}")]
    InconsistentGrowth(Vec<i64>),
    #[error("dimension estimate needs at least {0} sizes")]
    TooFewSizes(usize),
}

pub fn guard(what: &str, size: u128) -> Result<(), LabError> {
    if size > GUARD {
        Err(LabError::TooLarge { what: what.to_string(), size })
    } else {
        Ok(())
    }
}

/// Exact partition of a finite set under a group action, with stabilizer orders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitCensus<K> {
    pub action_tag: String,
    pub group_order: u128,
    /// Sorted orbits, ordered by their minimal element.
    pub orbits: Vec<Vec<K>>,
    pub stabilizer_orders: Vec<u128>,
}

impl<K: Ord + Clone> OrbitCensus<K> {
    pub fn element_count(&self) -> usize {
        self.orbits.iter().map(|o| o.len()).sum()
    }

    pub fn orbit_stabilizer_holds(&self) -> bool {
        self.orbits.iter().zip(&self.stabilizer_orders).all(|(o, &s)| o.len() as u128 * s == self.group_order)
    }

    /// Orbit index of every element.
    pub fn index(&self) -> std::collections::HashMap<K, usize>
    where
        K: Hash + Eq,
    {
        let mut m = std::collections::HashMap::new();
        for (k, o) in self.orbits.iter().enumerate() {
            for x in o {
                m.insert(x.clone(), k);
            }
        }
        m
    }

    /// Orbits as sets of elements, for partition comparisons.
    pub fn partition(&self) -> Vec<Vec<K>> {
        self.orbits.clone()
    }
}

/// Breadth-first orbit of `start` using the given neighbour map.
pub fn orbit_of<K, F>(start: K, mut step: F) -> Vec<K>
where
    K: Copy + Hash + Eq + Ord,
    F: FnMut(K) -> Vec<K>,
{
    let mut seen: HashSet<K> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start);
    queue.push_back(start);
    while let Some(x) = queue.pop_front() {
        for y in step(x) {
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<K> = seen.into_iter().collect();
    out.sort_unstable();
    out
}

/// Partition of `elements` into orbits; the neighbour map must come from a generating set.
pub fn partition_orbits<K, F>(elements: &[K], mut step: F) -> Vec<Vec<K>>
where
    K: Copy + Hash + Eq + Ord,
    F: FnMut(K) -> Vec<K>,
{
    let mut done: HashSet<K> = HashSet::with_capacity(elements.len());
    let mut orbits = Vec::new();
    let mut sorted = elements.to_vec();
    sorted.sort_unstable();
    for &x in &sorted {
        if done.contains(&x) {
            continue;
        }
        let o = orbit_of(x, &mut step);
        done.extend(o.iter().copied());
        orbits.push(o);
    }
    orbits
}
