//! Exhaustive ground truth for small instances.
//!
//! [`enumerate_valid_orders`] walks every permutation in lexicographic order,
//! pruning prefixes that already violate the clique or predecessor rules.
//! The optimum, image and pattern queries run an exact dynamic program over
//! placed-vertex subsets instead: whether a vertex is double depends only on
//! which vertices precede it, so the subset lattice carries every order.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::graph::{enumerate_cliques, Instance};
use crate::order::{check_order, DoublePattern, VertexOrder};
use crate::solution::Objective;

pub const DEFAULT_CAP: usize = 12;
/// Largest cap accepted; the subset tables grow as `2^n`.
pub const MAX_CAP: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance has {n} vertices, above the oracle cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
}

/// One point of the objective image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParetoPoint {
    pub nodes_obj: u128,
    pub doubles_obj: usize,
}

impl ParetoPoint {
    pub fn dominates(&self, other: &ParetoPoint) -> bool {
        self != other && self.nodes_obj <= other.nodes_obj && self.doubles_obj <= other.doubles_obj
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Oracle {
    pub cap: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Self { cap: DEFAULT_CAP }
    }
}

const INF: u8 = u8::MAX;

/// Subset tables for one instance.
struct Lattice {
    n: usize,
    k: usize,
    nbr: Vec<u32>,
    cliques: Vec<u32>,
    /// Minimum doubles still to come from a placed set (`INF` if stuck).
    rest_doubles: Vec<u8>,
}

impl Lattice {
    fn new(inst: &Instance) -> Self {
        let n = inst.n();
        let k = inst.k();
        let nbr: Vec<u32> = (0..n).map(|v| inst.neighbor_set(v) as u32).collect();
        let cliques = enumerate_cliques(inst, k + 1)
            .iter()
            .map(|c| c.as_set() as u32)
            .collect();
        let full = Self::full_mask(n);
        let mut rest = vec![INF; 1usize << n];
        rest[full as usize] = 0;
        for mask in (0..full).rev() {
            if (mask.count_ones() as usize) < k + 1 {
                continue;
            }
            let mut best = INF;
            let mut free = full & !mask;
            while free != 0 {
                let v = free.trailing_zeros() as usize;
                free &= free - 1;
                let c = (nbr[v] & mask).count_ones() as usize;
                if c < k {
                    continue;
                }
                let next = rest[(mask | 1 << v) as usize];
                if next != INF {
                    best = best.min(next + u8::from(c == k));
                }
            }
            rest[mask as usize] = best;
        }
        Self {
            n,
            k,
            nbr,
            cliques,
            rest_doubles: rest,
        }
    }

    fn full_mask(n: usize) -> u32 {
        if n == 32 {
            u32::MAX
        } else {
            (1u32 << n) - 1
        }
    }

    fn preds(&self, v: usize, mask: u32) -> usize {
        (self.nbr[v] & mask).count_ones() as usize
    }

    fn min_doubles(&self) -> Option<usize> {
        self.cliques
            .iter()
            .map(|&q| self.rest_doubles[q as usize])
            .filter(|&r| r != INF)
            .min()
            .map(|r| r as usize + 1)
    }

    /// Forward reachability of valid prefix sets of size at least `K+1`.
    fn reachable(&self) -> Vec<bool> {
        let full = Self::full_mask(self.n);
        let mut reach = vec![false; 1usize << self.n];
        for &q in &self.cliques {
            reach[q as usize] = true;
        }
        for mask in 0..=full {
            if !reach[mask as usize] {
                continue;
            }
            let mut free = full & !mask;
            while free != 0 {
                let v = free.trailing_zeros() as usize;
                free &= free - 1;
                if self.preds(v, mask) >= self.k {
                    reach[(mask | 1 << v) as usize] = true;
                }
            }
        }
        reach
    }
}

/// Minimum remaining node total from a placed set with `d` doubles so far.
struct NodesTable {
    n: usize,
    table: HashMap<(u32, usize), Option<u128>>,
}

impl NodesTable {
    fn rest(&mut self, lat: &Lattice, mask: u32, d: usize) -> Option<u128> {
        if mask.count_ones() as usize == self.n {
            return Some(0);
        }
        if let Some(&v) = self.table.get(&(mask, d)) {
            return v;
        }
        let mut best: Option<u128> = None;
        let mut free = Lattice::full_mask(self.n) & !mask;
        while free != 0 {
            let v = free.trailing_zeros() as usize;
            free &= free - 1;
            let c = lat.preds(v, mask);
            if c < lat.k {
                continue;
            }
            let d2 = d + usize::from(c == lat.k);
            if let Some(r) = self.rest(lat, mask | 1 << v, d2) {
                let total = (1u128 << d2).saturating_add(r);
                best = Some(best.map_or(total, |b| b.min(total)));
            }
        }
        self.table.insert((mask, d), best);
        best
    }
}

/// Node total of the first `K+1` ranks (the rank-`K` vertex is double).
fn clique_nodes(k: usize) -> u128 {
    k as u128 + 2
}

impl Oracle {
    pub fn new(cap: usize) -> Self {
        Self {
            cap: cap.min(MAX_CAP),
        }
    }

    fn check(&self, inst: &Instance) -> Result<(), OracleError> {
        if inst.n() > self.cap {
            Err(OracleError::CapExceeded {
                n: inst.n(),
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }

    /// Number of valid orders and a lazy lexicographic iterator over them.
    pub fn enumerate_valid_orders<'a>(
        &self,
        inst: &'a Instance,
    ) -> Result<(u128, ValidOrders<'a>), OracleError> {
        Ok((
            self.count_valid_orders(inst)?,
            ValidOrders::new(inst, false),
        ))
    }

    /// Counts valid orders through the subset lattice.
    pub fn count_valid_orders(&self, inst: &Instance) -> Result<u128, OracleError> {
        self.check(inst)?;
        let lat = Lattice::new(inst);
        let full = Lattice::full_mask(lat.n);
        let head: u128 = (1..=lat.k as u128 + 1).product();
        let mut count = vec![0u128; 1usize << lat.n];
        for &q in &lat.cliques {
            count[q as usize] = head;
        }
        for mask in 0..full {
            let c = count[mask as usize];
            if c == 0 {
                continue;
            }
            let mut free = full & !mask;
            while free != 0 {
                let v = free.trailing_zeros() as usize;
                free &= free - 1;
                if lat.preds(v, mask) >= lat.k {
                    count[(mask | 1 << v) as usize] += c;
                }
            }
        }
        Ok(count[full as usize])
    }

    /// Global optimum and the lexicographically first order attaining it.
    pub fn brute_optimum(
        &self,
        inst: &Instance,
        objective: Objective,
    ) -> Result<Option<(u128, VertexOrder)>, OracleError> {
        self.check(inst)?;
        let lat = Lattice::new(inst);
        Ok(match objective {
            Objective::MinDouble => lat.min_doubles().map(|opt| {
                let ord = first_optimal_order(&lat, |mask, d, _| {
                    lat.rest_doubles[mask as usize] != INF
                        && d + lat.rest_doubles[mask as usize] as usize == opt
                });
                (opt as u128, ord)
            }),
            Objective::MinNodes => {
                let mut table = NodesTable {
                    n: lat.n,
                    table: HashMap::new(),
                };
                let opt = lat
                    .cliques
                    .iter()
                    .filter_map(|&q| table.rest(&lat, q, 1))
                    .min()
                    .map(|r| r + clique_nodes(lat.k));
                opt.map(|opt| {
                    let ord = first_optimal_order(&lat, |mask, d, nodes| {
                        table.rest(&lat, mask, d).is_some_and(|r| nodes + r == opt)
                    });
                    (opt, ord)
                })
            }
        })
    }

    /// Distinct `(nodes, doubles)` pairs over all valid orders, and the
    /// non-dominated subset.
    pub fn objective_image_and_pareto(
        &self,
        inst: &Instance,
    ) -> Result<(BTreeSet<ParetoPoint>, BTreeSet<ParetoPoint>), OracleError> {
        self.check(inst)?;
        let lat = Lattice::new(inst);
        let full = Lattice::full_mask(lat.n);
        let mut states: Vec<BTreeSet<(usize, u128)>> = vec![BTreeSet::new(); 1usize << lat.n];
        for &q in &lat.cliques {
            states[q as usize].insert((1, clique_nodes(lat.k)));
        }
        for mask in 0..full {
            if states[mask as usize].is_empty() {
                continue;
            }
            let here = std::mem::take(&mut states[mask as usize]);
            let mut free = full & !mask;
            while free != 0 {
                let v = free.trailing_zeros() as usize;
                free &= free - 1;
                let c = lat.preds(v, mask);
                if c < lat.k {
                    continue;
                }
                let dbl = usize::from(c == lat.k);
                let target = &mut states[(mask | 1 << v) as usize];
                for &(d, nodes) in &here {
                    let d2 = d + dbl;
                    target.insert((d2, nodes.saturating_add(1u128 << d2)));
                }
            }
        }
        let image: BTreeSet<ParetoPoint> = states[full as usize]
            .iter()
            .map(|&(d, nodes)| ParetoPoint {
                nodes_obj: nodes,
                doubles_obj: d,
            })
            .collect();
        let pareto = pareto_front(&image);
        Ok((image, pareto))
    }

    /// Every double pattern attained by a MIN DOUBLE optimal order.
    pub fn optimal_patterns(
        &self,
        inst: &Instance,
    ) -> Result<BTreeSet<DoublePattern>, OracleError> {
        self.check(inst)?;
        let lat = Lattice::new(inst);
        let Some(opt) = lat.min_doubles() else {
            return Ok(BTreeSet::new());
        };
        let full = Lattice::full_mask(lat.n);
        let k = lat.k;
        let mut states: HashMap<u32, BTreeSet<u32>> = HashMap::new();
        for &q in &lat.cliques {
            if lat.rest_doubles[q as usize] as usize + 1 == opt {
                states.entry(q).or_default().insert(1 << k);
            }
        }
        for size in k + 1..lat.n {
            let layer: Vec<u32> = states
                .keys()
                .copied()
                .filter(|m| m.count_ones() as usize == size)
                .collect();
            for mask in layer {
                let pats = states.remove(&mask).unwrap_or_default();
                let rest = lat.rest_doubles[mask as usize];
                let mut free = full & !mask;
                while free != 0 {
                    let v = free.trailing_zeros() as usize;
                    free &= free - 1;
                    let c = lat.preds(v, mask);
                    if c < k {
                        continue;
                    }
                    let next = lat.rest_doubles[(mask | 1 << v) as usize];
                    if next == INF || next + u8::from(c == k) != rest {
                        continue;
                    }
                    let flag = if c == k { 1u32 << size } else { 0 };
                    let entry = states.entry(mask | 1 << v).or_default();
                    entry.extend(pats.iter().map(|p| p | flag));
                }
            }
        }
        Ok(states
            .remove(&full)
            .unwrap_or_default()
            .into_iter()
            .map(|bits| DoublePattern::from_ranks(lat.n, (0..lat.n).filter(|r| bits & 1 << r != 0)))
            .collect())
    }

    /// Calls `f` on every MIN DOUBLE optimal order whose first `K+1`
    /// vertices are in increasing index order. Reordering that prefix never
    /// changes doubles, nodes, or the induced witness structure, so these
    /// representatives stand for all optimal orders. Returns the count.
    pub fn for_each_optimal_order(
        &self,
        inst: &Instance,
        mut f: impl FnMut(&VertexOrder),
    ) -> Result<u64, OracleError> {
        self.check(inst)?;
        let lat = Lattice::new(inst);
        let Some(opt) = lat.min_doubles() else {
            return Ok(0);
        };
        let mut count = 0u64;
        let mut perm = Vec::with_capacity(lat.n);
        for &q in &lat.cliques {
            if lat.rest_doubles[q as usize] as usize + 1 != opt {
                continue;
            }
            perm.clear();
            perm.extend((0..lat.n).filter(|&v| q & 1 << v != 0));
            walk_optimal(&lat, q, &mut perm, &mut count, &mut f);
        }
        Ok(count)
    }

    /// For every rank, whether all valid orders put a double there.
    pub fn ranks_always_double(&self, inst: &Instance) -> Result<Vec<bool>, OracleError> {
        self.check(inst)?;
        let lat = Lattice::new(inst);
        let reach = lat.reachable();
        let full = Lattice::full_mask(lat.n);
        let mut can_be_single = vec![false; lat.n];
        for r in 0..lat.k {
            can_be_single[r] = true;
        }
        if lat.min_doubles().is_none() {
            return Ok(vec![false; lat.n]);
        }
        for mask in 0..full {
            if !reach[mask as usize] {
                continue;
            }
            let r = mask.count_ones() as usize;
            let mut free = full & !mask;
            while free != 0 {
                let v = free.trailing_zeros() as usize;
                free &= free - 1;
                if lat.preds(v, mask) > lat.k && lat.rest_doubles[(mask | 1 << v) as usize] != INF {
                    can_be_single[r] = true;
                }
            }
        }
        Ok(can_be_single.into_iter().map(|s| !s).collect())
    }
}

fn walk_optimal(
    lat: &Lattice,
    mask: u32,
    perm: &mut Vec<usize>,
    count: &mut u64,
    f: &mut impl FnMut(&VertexOrder),
) {
    if perm.len() == lat.n {
        *count += 1;
        f(&VertexOrder::new(perm.clone()).expect("walk builds a permutation"));
        return;
    }
    let rest = lat.rest_doubles[mask as usize];
    for v in 0..lat.n {
        if mask & 1 << v != 0 {
            continue;
        }
        let c = lat.preds(v, mask);
        if c < lat.k {
            continue;
        }
        let next = lat.rest_doubles[(mask | 1 << v) as usize];
        if next == INF || next + u8::from(c == lat.k) != rest {
            continue;
        }
        perm.push(v);
        walk_optimal(lat, mask | 1 << v, perm, count, f);
        perm.pop();
    }
}

/// Builds the lexicographically smallest order such that `tight(mask, d,
/// nodes)` holds after the clique and after every later placement.
fn first_optimal_order(
    lat: &Lattice,
    mut tight: impl FnMut(u32, usize, u128) -> bool,
) -> VertexOrder {
    let n = lat.n;
    let k = lat.k;
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    let mut mask = 0u32;
    // Prefix ranks: choose the smallest vertex that still lies in a good clique.
    let good: Vec<u32> = lat
        .cliques
        .iter()
        .copied()
        .filter(|&q| tight(q, 1, clique_nodes(k)))
        .collect();
    for _ in 0..=k {
        let v = (0..n)
            .find(|&v| {
                mask & 1 << v == 0 && good.iter().any(|&q| q & (mask | 1 << v) == mask | 1 << v)
            })
            .expect("a tight clique exists");
        perm.push(v);
        mask |= 1 << v;
    }
    let mut d = 1usize;
    let mut nodes = clique_nodes(k);
    while perm.len() < n {
        let mut chosen = None;
        for v in 0..n {
            if mask & 1 << v != 0 {
                continue;
            }
            let c = lat.preds(v, mask);
            if c < k {
                continue;
            }
            let d2 = d + usize::from(c == k);
            let nodes2 = nodes.saturating_add(1u128 << d2);
            if tight(mask | 1 << v, d2, nodes2) {
                chosen = Some((v, d2, nodes2));
                break;
            }
        }
        let (v, d2, nodes2) = chosen.expect("a tight extension exists");
        perm.push(v);
        mask |= 1 << v;
        d = d2;
        nodes = nodes2;
    }
    VertexOrder::new(perm).expect("builds a permutation")
}

/// Non-dominated subset of a point set.
pub fn pareto_front(points: &BTreeSet<ParetoPoint>) -> BTreeSet<ParetoPoint> {
    points
        .iter()
        .filter(|p| !points.iter().any(|q| q.dominates(p)))
        .copied()
        .collect()
}

/// Lexicographic iterator over valid orders, with prefix pruning.
pub struct ValidOrders<'a> {
    inst: &'a Instance,
    perm: Vec<usize>,
    /// Next candidate to try at each depth.
    cursor: Vec<usize>,
    placed: u128,
    canonical: bool,
    done: bool,
}

impl<'a> ValidOrders<'a> {
    /// With `canonical`, only orders whose clique prefix is ascending.
    pub fn new(inst: &'a Instance, canonical: bool) -> Self {
        Self {
            inst,
            perm: Vec::with_capacity(inst.n()),
            cursor: vec![0],
            placed: 0,
            canonical,
            done: false,
        }
    }

    fn admissible(&self, v: usize) -> bool {
        let inst = self.inst;
        let p = self.perm.len();
        if self.placed & 1u128 << v != 0 {
            return false;
        }
        let preds = (inst.neighbor_set(v) & self.placed).count_ones() as usize;
        if p <= inst.k() {
            preds == p && !(self.canonical && self.perm.last().is_some_and(|&u| u > v))
        } else {
            preds >= inst.k()
        }
    }
}

impl Iterator for ValidOrders<'_> {
    type Item = VertexOrder;

    fn next(&mut self) -> Option<VertexOrder> {
        let n = self.inst.n();
        while !self.done {
            let depth = self.perm.len();
            if depth == n {
                let out = VertexOrder::new(self.perm.clone()).expect("permutation");
                let v = self.perm.pop().expect("non-empty");
                self.placed &= !(1u128 << v);
                self.cursor.pop();
                return Some(out);
            }
            let start = self.cursor[depth];
            match (start..n).find(|&v| self.admissible(v)) {
                Some(v) => {
                    self.cursor[depth] = v + 1;
                    self.perm.push(v);
                    self.placed |= 1u128 << v;
                    self.cursor.push(0);
                }
                None => {
                    self.cursor.pop();
                    match self.perm.pop() {
                        Some(v) => self.placed &= !(1u128 << v),
                        None => self.done = true,
                    }
                }
            }
        }
        None
    }
}

/// Objective value of an order for the given objective.
pub fn order_objective(inst: &Instance, ord: &VertexOrder, objective: Objective) -> Option<u128> {
    let rep = check_order(inst, ord).ok()?;
    rep.is_dvop.then_some(match objective {
        Objective::MinDouble => rep.double_count as u128,
        Objective::MinNodes => rep.total_nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    fn all_perms(n: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut p: Vec<usize> = (0..n).collect();
        fn rec(p: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
            if i == p.len() {
                out.push(p.clone());
                return;
            }
            for j in i..p.len() {
                p.swap(i, j);
                rec(p, i + 1, out);
                p.swap(i, j);
            }
        }
        rec(&mut p, 0, &mut out);
        out.sort();
        out
    }

    /// Plain permutation scan with no pruning at all.
    fn literal(inst: &Instance) -> Vec<(VertexOrder, usize, u128)> {
        all_perms(inst.n())
            .into_iter()
            .filter_map(|p| {
                let ord = VertexOrder::new(p).unwrap();
                let rep = check_order(inst, &ord).unwrap();
                rep.is_dvop
                    .then_some((ord, rep.double_count, rep.total_nodes))
            })
            .collect()
    }

    #[test]
    fn six_vertex_counts_and_optima() {
        let g = six_vertex(2);
        let o = Oracle::default();
        let (count, iter) = o.enumerate_valid_orders(&g).unwrap();
        assert_eq!(count, 180);
        assert_eq!(iter.count(), 180);
        let (d, ord) = o.brute_optimum(&g, Objective::MinDouble).unwrap().unwrap();
        assert_eq!(d, 2);
        assert_eq!(check_order(&g, &ord).unwrap().double_count, 2);
        let (nodes, ord) = o.brute_optimum(&g, Objective::MinNodes).unwrap().unwrap();
        assert_eq!(nodes, 12);
        assert_eq!(check_order(&g, &ord).unwrap().total_nodes, 12);
    }

    #[test]
    fn six_vertex_image() {
        let (image, pareto) = Oracle::default()
            .objective_image_and_pareto(&six_vertex(2))
            .unwrap();
        let pts = |v: &[(u128, usize)]| {
            v.iter()
                .map(|&(nodes_obj, doubles_obj)| ParetoPoint {
                    nodes_obj,
                    doubles_obj,
                })
                .collect::<BTreeSet<_>>()
        };
        assert_eq!(image, pts(&[(24, 3), (14, 2), (20, 3), (16, 2), (12, 2)]));
        assert_eq!(pareto, pts(&[(12, 2)]));
    }

    #[test]
    fn infeasible_and_complete() {
        let o = Oracle::default();
        assert_eq!(o.count_valid_orders(&six_vertex(3)).unwrap(), 0);
        assert!(o
            .brute_optimum(&six_vertex(3), Objective::MinDouble)
            .unwrap()
            .is_none());
        assert_eq!(o.count_valid_orders(&complete(4, 2)).unwrap(), 24);
        let (image, pareto) = o.objective_image_and_pareto(&complete(4, 2)).unwrap();
        assert_eq!(image.len(), 1);
        assert_eq!(image, pareto);
    }

    #[test]
    fn cap_is_enforced() {
        let g = path(13, 1);
        assert_eq!(
            Oracle::default().count_valid_orders(&g),
            Err(OracleError::CapExceeded { n: 13, cap: 12 })
        );
    }

    #[test]
    fn lattice_matches_literal_scan() {
        let o = Oracle::default();
        for g in [
            six_vertex(2),
            witness_example(2),
            witness_example(1),
            complete(5, 3),
        ] {
            let lit = literal(&g);
            let (count, iter) = o.enumerate_valid_orders(&g).unwrap();
            assert_eq!(count as usize, lit.len());
            let listed: Vec<VertexOrder> = iter.collect();
            assert_eq!(listed, lit.iter().map(|x| x.0.clone()).collect::<Vec<_>>());
            let best_d = lit.iter().map(|x| x.1).min().unwrap();
            let first_d = lit.iter().find(|x| x.1 == best_d).unwrap().0.clone();
            assert_eq!(
                o.brute_optimum(&g, Objective::MinDouble).unwrap(),
                Some((best_d as u128, first_d))
            );
            let best_n = lit.iter().map(|x| x.2).min().unwrap();
            let first_n = lit.iter().find(|x| x.2 == best_n).unwrap().0.clone();
            assert_eq!(
                o.brute_optimum(&g, Objective::MinNodes).unwrap(),
                Some((best_n, first_n))
            );
            let pats: BTreeSet<DoublePattern> = lit
                .iter()
                .filter(|x| x.1 == best_d)
                .map(|x| check_order(&g, &x.0).unwrap().doubles)
                .collect();
            assert_eq!(o.optimal_patterns(&g).unwrap(), pats);
            let canon = lit
                .iter()
                .filter(|x| x.1 == best_d && x.0.perm()[..=g.k()].windows(2).all(|w| w[0] < w[1]))
                .count();
            assert_eq!(
                o.for_each_optimal_order(&g, |_| {}).unwrap() as usize,
                canon
            );
        }
    }

    #[test]
    fn witness_example_optimum() {
        let g = witness_example(2);
        let (d, ord) = Oracle::default()
            .brute_optimum(&g, Objective::MinDouble)
            .unwrap()
            .unwrap();
        // Only the forced rank-K double: clique {0,1,2}, then 4, 5, 3.
        assert_eq!(d, 1);
        assert_eq!(ord.perm(), &[0, 1, 2, 4, 5, 3]);
        let worked = VertexOrder::new(vec![1, 3, 0, 4, 2, 5]).unwrap();
        assert_eq!(check_order(&g, &worked).unwrap().double_count, 2);
    }

    #[test]
    fn rank_k_always_double() {
        let always = Oracle::default()
            .ranks_always_double(&six_vertex(2))
            .unwrap();
        assert!(always[2]);
        assert!(!always[0] && !always[1]);
    }
}
