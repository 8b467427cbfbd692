//! Vertex orders: validity, double vertices, branch-and-prune node counts
//! and the greedy construction.

use thiserror::Error;

use crate::graph::{bit, for_each_clique, Instance, VertexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("order has length {got}, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("entry {value} at rank {rank} is out of range or repeated")]
    NotAPermutation { rank: usize, value: usize },
}

/// A permutation of the vertices. `perm[r]` is the vertex at rank `r`,
/// `inverse[v]` the rank of vertex `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexOrder {
    perm: Vec<usize>,
    inverse: Vec<usize>,
}

impl VertexOrder {
    pub fn new(perm: Vec<usize>) -> Result<Self, OrderError> {
        let n = perm.len();
        let mut inverse = vec![usize::MAX; n];
        for (rank, &v) in perm.iter().enumerate() {
            if v >= n || inverse[v] != usize::MAX {
                return Err(OrderError::NotAPermutation { rank, value: v });
            }
            inverse[v] = rank;
        }
        Ok(Self { perm, inverse })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            inverse: (0..n).collect(),
        }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn vertex_at(&self, rank: usize) -> usize {
        self.perm[rank]
    }

    pub fn rank_of(&self, v: usize) -> usize {
        self.inverse[v]
    }
}

/// Rank-indexed double indicators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DoublePattern {
    pub bits: Vec<bool>,
}

impl DoublePattern {
    pub fn zeros(n: usize) -> Self {
        Self {
            bits: vec![false; n],
        }
    }

    pub fn from_ranks(n: usize, ranks: impl IntoIterator<Item = usize>) -> Self {
        let mut p = Self::zeros(n);
        for r in ranks {
            p.bits[r] = true;
        }
        p
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn ranks(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(r, _)| r)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Node counts per level induced by this pattern for dimension `k`.
    pub fn node_counts(&self, k: usize) -> Vec<u128> {
        let mut out = Vec::with_capacity(self.bits.len());
        let mut level: u128 = 1;
        for (r, &b) in self.bits.iter().enumerate() {
            if r >= k && b {
                level = level.saturating_mul(2);
            }
            out.push(level);
        }
        out
    }

    /// Total node count (sum over levels).
    pub fn total_nodes(&self, k: usize) -> u128 {
        self.node_counts(k)
            .into_iter()
            .fold(0u128, |a, b| a.saturating_add(b))
    }

    pub fn to_line(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { "1" } else { "0" })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderReport {
    pub is_dvop: bool,
    pub doubles: DoublePattern,
    pub double_count: usize,
    pub node_counts: Vec<u128>,
    pub total_nodes: u128,
}

/// Evaluates an order. Counts are filled in even when the order is not a
/// valid discretization order; `is_dvop` says whether they mean anything.
pub fn check_order(inst: &Instance, ord: &VertexOrder) -> Result<OrderReport, OrderError> {
    let n = inst.n();
    let k = inst.k();
    if ord.len() != n {
        return Err(OrderError::WrongLength {
            got: ord.len(),
            expected: n,
        });
    }
    let mut placed: VertexSet = 0;
    let mut is_dvop = true;
    let mut doubles = DoublePattern::zeros(n);
    for (r, &v) in ord.perm().iter().enumerate() {
        let preds = (inst.neighbor_set(v) & placed).count_ones() as usize;
        if r <= k {
            if preds != r {
                is_dvop = false;
            }
        } else if preds < k {
            is_dvop = false;
        }
        if r >= k && preds == k {
            doubles.bits[r] = true;
        }
        placed |= bit(v);
    }
    let node_counts = doubles.node_counts(k);
    let total_nodes = node_counts.iter().fold(0u128, |a, &b| a.saturating_add(b));
    Ok(OrderReport {
        is_dvop,
        double_count: doubles.count(),
        doubles,
        node_counts,
        total_nodes,
    })
}

/// Extends an initial clique greedily, always appending the unplaced vertex
/// with the most placed neighbours (ties to the lowest index). Returns
/// `None` if some step finds no vertex with at least `K` placed neighbours.
pub fn greedy_from_clique(inst: &Instance, clique: &[usize]) -> Option<VertexOrder> {
    let n = inst.n();
    let k = inst.k();
    let mut perm = Vec::with_capacity(n);
    let mut pred = vec![0usize; n];
    let mut placed: VertexSet = 0;
    let mut sorted = clique.to_vec();
    sorted.sort_unstable();
    for &v in &sorted {
        perm.push(v);
        placed |= bit(v);
        for u in inst.neighbors(v) {
            pred[u] += 1;
        }
    }
    while perm.len() < n {
        let mut best: Option<usize> = None;
        for v in 0..n {
            if placed & bit(v) == 0 && best.is_none_or(|b| pred[v] > pred[b]) {
                best = Some(v);
            }
        }
        let v = best?;
        if pred[v] < k {
            return None;
        }
        perm.push(v);
        placed |= bit(v);
        for u in inst.neighbors(v) {
            pred[u] += 1;
        }
    }
    Some(VertexOrder::new(perm).expect("greedy builds a permutation"))
}

/// Tries every `(K+1)`-clique as a start and keeps the completed order with
/// the fewest doubles (first clique wins ties). `None` means the instance
/// admits no discretization order.
pub fn greedy_dvop(inst: &Instance) -> Option<(VertexOrder, OrderReport)> {
    let mut best: Option<(VertexOrder, OrderReport)> = None;
    for_each_clique(inst, inst.k() + 1, |clique| {
        if let Some(ord) = greedy_from_clique(inst, clique) {
            let rep = check_order(inst, &ord).expect("length matches");
            debug_assert!(rep.is_dvop);
            if best
                .as_ref()
                .is_none_or(|(_, b)| rep.double_count < b.double_count)
            {
                best = Some((ord, rep));
            }
        }
        true
    });
    best
}
