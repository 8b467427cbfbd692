//! Valid inequalities and fixings on rank-indexed double variables.
//!
//! Three sources: the clique prefix (ranks below `K` single, rank `K`
//! double), the head analysis of the first few ranks after the clique, and
//! the minimum-degree rule for the last ranks.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use crate::graph::{
    bit, enumerate_cliques, for_each_clique, members, min_degree, Instance, VertexSet,
};
use crate::order::DoublePattern;

pub const DEFAULT_CLIQUE_BUDGET: usize = 100_000;

#[derive(Debug, Clone, Copy)]
pub struct PresolveOptions {
    /// Head analysis is skipped when there are more `(K+1)`-cliques.
    pub clique_budget: usize,
    pub head: bool,
    pub tail: bool,
}

impl Default for PresolveOptions {
    fn default() -> Self {
        Self {
            clique_budget: DEFAULT_CLIQUE_BUDGET,
            head: true,
            tail: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresolveResult {
    pub n: usize,
    pub k: usize,
    pub fixed_zero: BTreeSet<usize>,
    pub fixed_one: BTreeSet<usize>,
    /// Each set `S` reads `sum_{r in S} y_r >= 1`.
    pub cover_inequalities: Vec<BTreeSet<usize>>,
    /// Head analysis was skipped because of the clique budget.
    pub skipped: bool,
    /// The fixings contradict each other: no valid order exists.
    pub infeasible: bool,
}

impl PresolveResult {
    fn empty(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            fixed_zero: BTreeSet::new(),
            fixed_one: BTreeSet::new(),
            cover_inequalities: Vec::new(),
            skipped: false,
            infeasible: false,
        }
    }

    fn fix(&mut self, r: usize, value: bool) {
        if r >= self.n {
            return;
        }
        let (this, other) = if value {
            (&mut self.fixed_one, &self.fixed_zero)
        } else {
            (&mut self.fixed_zero, &self.fixed_one)
        };
        if other.contains(&r) {
            self.infeasible = true;
        }
        this.insert(r);
    }

    fn add_cover(&mut self, ranks: impl IntoIterator<Item = usize>) {
        let set: BTreeSet<usize> = ranks.into_iter().collect();
        // Covers naming ranks past the end describe structures that cannot
        // occur; they carry no information.
        if set.iter().any(|&r| r >= self.n) {
            return;
        }
        if !self.cover_inequalities.contains(&set) {
            self.cover_inequalities.push(set);
        }
    }

    /// Drops covers made redundant by a fixed double and flags covers whose
    /// ranks are all fixed single.
    fn normalize(&mut self) {
        let one = &self.fixed_one;
        self.cover_inequalities.retain(|s| s.is_disjoint(one));
        if self
            .cover_inequalities
            .iter()
            .any(|s| s.is_subset(&self.fixed_zero))
        {
            self.infeasible = true;
        }
        if !self.fixed_zero.is_disjoint(&self.fixed_one) {
            self.infeasible = true;
        }
    }

    fn merge(&mut self, other: &PresolveResult) {
        for &r in &other.fixed_zero {
            self.fix(r, false);
        }
        for &r in &other.fixed_one {
            self.fix(r, true);
        }
        for s in &other.cover_inequalities {
            self.add_cover(s.iter().copied());
        }
        self.skipped |= other.skipped;
        self.infeasible |= other.infeasible;
        self.normalize();
    }

    /// Whether a pattern respects every fixing and inequality.
    pub fn satisfied_by(&self, pattern: &DoublePattern) -> bool {
        self.violations(pattern).is_empty()
    }

    /// Human-readable descriptions of the constraints a pattern breaks.
    pub fn violations(&self, pattern: &DoublePattern) -> Vec<String> {
        let b = |r: usize| pattern.bits.get(r).copied().unwrap_or(false);
        let mut out = Vec::new();
        for &r in &self.fixed_zero {
            if b(r) {
                out.push(format!("y[{r}]=0"));
            }
        }
        for &r in &self.fixed_one {
            if !b(r) {
                out.push(format!("y[{r}]=1"));
            }
        }
        for s in &self.cover_inequalities {
            if !s.iter().any(|&r| b(r)) {
                out.push(cover_line(s));
            }
        }
        out
    }

    /// `fix y[r]=b` and `cut y[r1]+...>=1` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in 0..self.n {
            if self.fixed_zero.contains(&r) {
                let _ = writeln!(out, "fix y[{r}]=0");
            }
            if self.fixed_one.contains(&r) {
                let _ = writeln!(out, "fix y[{r}]=1");
            }
        }
        for s in &self.cover_inequalities {
            let _ = writeln!(out, "{}", cover_line(s));
        }
        if self.skipped {
            let _ = writeln!(out, "c head analysis skipped (clique budget)");
        }
        if self.infeasible {
            let _ = writeln!(out, "c fixings are contradictory");
        }
        out
    }
}

fn cover_line(s: &BTreeSet<usize>) -> String {
    let terms: Vec<String> = s.iter().map(|r| format!("y[{r}]")).collect();
    format!("cut {}>=1", terms.join("+"))
}

/// Ranks below `K` are single and rank `K` is double in every valid order.
pub fn base_fixings(inst: &Instance) -> PresolveResult {
    let mut res = PresolveResult::empty(inst.n(), inst.k());
    for r in 0..inst.k() {
        res.fix(r, false);
    }
    res.fix(inst.k(), true);
    res
}

/// The last `m - K` ranks are single, `m` being the minimum degree: the
/// vertex at rank `n - i` misses at most `i - 1` of its neighbours.
pub fn tail_fixings(inst: &Instance) -> BTreeSet<usize> {
    let m = min_degree(inst);
    let n = inst.n();
    (1..=m.saturating_sub(inst.k()))
        .filter(|&i| i <= n)
        .map(|i| n - i)
        .collect()
}

fn has_k_plus_one_neighbours(inst: &Instance, set: VertexSet, v: usize) -> bool {
    (inst.neighbor_set(v) & set).count_ones() as usize > inst.k()
}

/// Vertices outside `set` with at least `K+1` neighbours in it.
fn extensions(inst: &Instance, set: VertexSet) -> Vec<usize> {
    members(inst.all_vertices() & !set)
        .filter(|&v| has_k_plus_one_neighbours(inst, set, v))
        .collect()
}

/// A structure filling the first ranks plus one vertex that can follow it
/// as a non-double.
type Candidate = (VertexSet, usize);

fn extendable_again(inst: &Instance, candidates: &[Candidate]) -> bool {
    candidates
        .iter()
        .any(|&(set, v)| !extensions(inst, set | bit(v)).is_empty())
}

/// Unions of two `(K+1)`-cliques meeting in exactly `K` vertices, sorted by
/// their member lists.
fn overlapping_pairs(inst: &Instance, cliques: &[VertexSet]) -> Vec<VertexSet> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for &c in cliques {
        for x in members(c) {
            let base = c & !bit(x);
            let common = members(base).fold(inst.all_vertices() & !c, |acc, b| {
                acc & inst.neighbor_set(b)
            });
            for u in members(common) {
                // Only called when no (K+2)-clique exists, so u and x are
                // never adjacent.
                let union = c | bit(u);
                if seen.insert(union) {
                    out.push(union);
                }
            }
        }
    }
    out.sort_by_key(|&s| members(s).collect::<Vec<_>>());
    out
}

/// Head analysis for ranks `K+1 .. K+3`, plus the base fixings.
pub fn head_analysis(inst: &Instance) -> PresolveResult {
    head_analysis_with_budget(inst, DEFAULT_CLIQUE_BUDGET)
}

pub fn head_analysis_with_budget(inst: &Instance, budget: usize) -> PresolveResult {
    let k = inst.k();
    let mut res = base_fixings(inst);
    let mut count = 0usize;
    for_each_clique(inst, k + 1, |_| {
        count += 1;
        count <= budget
    });
    if count > budget {
        res.skipped = true;
        return res;
    }

    let mut bigger_exists = false;
    for_each_clique(inst, k + 2, |_| {
        bigger_exists = true;
        false
    });

    let mut candidates: Vec<Candidate> = Vec::new();
    if !bigger_exists {
        res.fix(k + 1, true);
        let small: Vec<VertexSet> = enumerate_cliques(inst, k + 1)
            .iter()
            .map(|c| c.as_set())
            .collect();
        for union in overlapping_pairs(inst, &small) {
            for v in extensions(inst, union) {
                candidates.push((union, v));
            }
        }
        if candidates.is_empty() {
            res.fix(k + 2, true);
        } else if !extendable_again(inst, &candidates) {
            res.add_cover([k + 2, k + 3]);
        }
    } else {
        for c in enumerate_cliques(inst, k + 2) {
            let set = c.as_set();
            for v in extensions(inst, set) {
                candidates.push((set, v));
            }
        }
        if candidates.is_empty() {
            res.add_cover([k + 1, k + 2]);
        } else if !extendable_again(inst, &candidates) {
            res.add_cover([k + 1, k + 2, k + 3]);
        }
    }
    res.normalize();
    res
}

/// All enabled fixings and inequalities combined.
pub fn presolve(inst: &Instance, opts: &PresolveOptions) -> PresolveResult {
    let mut res = if opts.head {
        head_analysis_with_budget(inst, opts.clique_budget)
    } else {
        base_fixings(inst)
    };
    if opts.tail {
        let mut tail = PresolveResult::empty(inst.n(), inst.k());
        for r in tail_fixings(inst) {
            tail.fix(r, false);
        }
        res.merge(&tail);
    }
    res.normalize();
    res
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::oracle::Oracle;

    /// Two 4-cliques {0,1,2,3} and {1,2,3,4}; no edge 0-4.
    pub(crate) fn two_overlapping() -> Instance {
        Instance::new(
            5,
            3,
            [
                (0, 1),
                (0, 2),
                (0, 3),
                (1, 2),
                (1, 3),
                (2, 3),
                (1, 4),
                (2, 4),
                (3, 4),
            ],
        )
        .unwrap()
    }

    /// Adds vertex 5 adjacent to 0, 1, 2: a third 4-clique overlapping
    /// {0,1,2,3} in three vertices.
    pub(crate) fn three_overlapping() -> Instance {
        let mut edges: Vec<(usize, usize)> = two_overlapping().edges().to_vec();
        edges.extend([(0, 5), (1, 5), (2, 5)]);
        Instance::new(6, 3, edges).unwrap()
    }

    #[test]
    fn base_for_k3_and_k2() {
        let r = base_fixings(&complete(6, 3));
        assert_eq!(r.fixed_zero, BTreeSet::from([0, 1, 2]));
        assert_eq!(r.fixed_one, BTreeSet::from([3]));
        let r = base_fixings(&six_vertex(2));
        assert_eq!(r.fixed_zero, BTreeSet::from([0, 1]));
        assert_eq!(r.fixed_one, BTreeSet::from([2]));
    }

    #[test]
    fn tail_rule() {
        assert!(tail_fixings(&six_vertex(2)).is_empty());
        assert_eq!(tail_fixings(&complete(6, 2)), BTreeSet::from([3, 4, 5]));
        let always = Oracle::default()
            .ranks_always_double(&complete(6, 2))
            .unwrap();
        assert!(!always[3] && !always[4] && !always[5]);
    }

    #[test]
    fn tail_rule_min_degree_five() {
        // Circulant graph on 20 vertices with offsets 1, 2 and 10: degree 5.
        let n = 20;
        let mut edges = BTreeSet::new();
        for v in 0..n {
            for d in [1, 2, 10] {
                let u = (v + d) % n;
                edges.insert((v.min(u), v.max(u)));
            }
        }
        let g = Instance::new(n, 3, edges).unwrap();
        assert_eq!(min_degree(&g), 5);
        assert_eq!(tail_fixings(&g), BTreeSet::from([18, 19]));
    }

    #[test]
    fn head_two_overlapping_cliques() {
        let r = head_analysis(&two_overlapping());
        assert!(r.fixed_one.contains(&4));
    }

    #[test]
    fn head_three_overlapping_cliques() {
        let r = head_analysis(&three_overlapping());
        assert!(r.fixed_one.contains(&4));
        assert!(r.fixed_one.contains(&5));
        let always = Oracle::default()
            .ranks_always_double(&three_overlapping())
            .unwrap();
        assert!(always[4] && always[5]);
    }

    #[test]
    fn head_complete_graph_adds_nothing() {
        let r = head_analysis(&complete(6, 2));
        assert_eq!(r, base_fixings(&complete(6, 2)));
    }

    #[test]
    fn budget_skips_head() {
        let r = head_analysis_with_budget(&complete(6, 2), 3);
        assert!(r.skipped);
        assert_eq!(r.fixed_one, BTreeSet::from([2]));
    }

    #[test]
    fn text_lines() {
        let mut r = base_fixings(&six_vertex(2));
        r.add_cover([3, 4]);
        assert_eq!(
            r.to_text(),
            "fix y[0]=0\nfix y[1]=0\nfix y[2]=1\ncut y[3]+y[4]>=1\n"
        );
    }
}
