//! Depth-first branch-and-bound over order positions.
//!
//! Ranks are filled left to right. Ranks up to `K` draw from vertices
//! adjacent to everything placed, in increasing index order (the clique's
//! internal order is irrelevant). Later ranks accept any vertex with at
//! least `K` placed neighbours; placing one with exactly `K` is a double.
//! Both views are kept: `perm` maps ranks to vertices and `pred_count`
//! tracks every vertex's placed neighbours.

use std::collections::{HashMap, HashSet};
use std::time::Duration;

use crate::graph::{bit, Instance, VertexSet};
use crate::order::{check_order, greedy_dvop, VertexOrder};
use crate::presolve::{presolve, PresolveOptions, PresolveResult};
use crate::solution::{Deadline, Objective, Solution, Stats, Status};

/// Memo tables stop growing past this many entries.
const MEMO_LIMIT: usize = 4_000_000;
const POLL_INTERVAL: u64 = 1024;

#[derive(Debug, Clone, Copy)]
pub struct DfsOptions {
    pub time_limit: Option<Duration>,
    pub use_presolve: bool,
    pub warm_start: bool,
    pub presolve: PresolveOptions,
}

impl Default for DfsOptions {
    fn default() -> Self {
        Self {
            time_limit: None,
            use_presolve: true,
            warm_start: true,
            presolve: PresolveOptions::default(),
        }
    }
}

/// Rank restrictions derived from presolve.
#[derive(Debug, Clone, Default)]
pub(crate) struct RankRules {
    /// Ranks that must hold a single.
    pub single: VertexSet,
    /// Ranks that must hold a double.
    pub double: VertexSet,
    /// Cover inequalities as rank masks.
    pub covers: Vec<VertexSet>,
}

impl RankRules {
    pub fn from_presolve(p: &PresolveResult) -> Self {
        let mask = |it: &mut dyn Iterator<Item = usize>| it.fold(0, |m, r| m | bit(r));
        Self {
            single: mask(&mut p.fixed_zero.iter().copied()),
            double: mask(&mut p.fixed_one.iter().copied()),
            covers: p
                .cover_inequalities
                .iter()
                .map(|s| mask(&mut s.iter().copied()))
                .collect(),
        }
    }
}

/// Partial order under construction.
#[derive(Debug, Clone)]
pub struct SearchState {
    pub perm: Vec<usize>,
    pub placed: VertexSet,
    pub pred_count: Vec<usize>,
    pub doubles_so_far: usize,
    pub nodes_so_far: u128,
    /// Node count of the current level.
    pub level: u128,
    /// Ranks holding doubles.
    pub pattern: VertexSet,
}

impl SearchState {
    pub fn new(n: usize) -> Self {
        Self {
            perm: Vec::with_capacity(n),
            placed: 0,
            pred_count: vec![0; n],
            doubles_so_far: 0,
            nodes_so_far: 0,
            level: 1,
            pattern: 0,
        }
    }

    /// Appends `v`; `double` says whether it counts as a double.
    fn place(&mut self, inst: &Instance, v: usize, double: bool) {
        let r = self.perm.len();
        self.perm.push(v);
        self.placed |= bit(v);
        for u in inst.neighbors(v) {
            self.pred_count[u] += 1;
        }
        if double {
            self.doubles_so_far += 1;
            self.pattern |= bit(r);
            self.level = self.level.saturating_mul(2);
        }
        self.nodes_so_far = self.nodes_so_far.saturating_add(self.level);
    }

    fn unplace(&mut self, inst: &Instance) {
        let v = self.perm.pop().expect("non-empty");
        let r = self.perm.len();
        self.placed &= !bit(v);
        for u in inst.neighbors(v) {
            self.pred_count[u] -= 1;
        }
        self.nodes_so_far -= self.level;
        if self.pattern & bit(r) != 0 {
            self.doubles_so_far -= 1;
            self.pattern &= !bit(r);
            self.level /= 2;
        }
    }
}

struct Search<'a> {
    inst: &'a Instance,
    n: usize,
    k: usize,
    objective: Objective,
    rules: RankRules,
    state: SearchState,
    incumbent: Option<(u128, Vec<usize>)>,
    /// Lower bounds on the remaining objective, keyed by placed set,
    /// satisfied covers and (for node counts) doubles so far.
    memo: HashMap<(VertexSet, u32, u32), u128>,
    deadline: Deadline,
    timed_out: bool,
    choice_points: u64,
    /// Vertices of degree exactly `K`: always double.
    degree_k: VertexSet,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, objective: Objective, rules: RankRules, deadline: Deadline) -> Self {
        let degree_k = (0..inst.n())
            .filter(|&v| inst.degree(v) == inst.k())
            .fold(0, |m, v| m | bit(v));
        Self {
            inst,
            n: inst.n(),
            k: inst.k(),
            objective,
            rules,
            state: SearchState::new(inst.n()),
            incumbent: None,
            memo: HashMap::new(),
            deadline,
            timed_out: false,
            choice_points: 0,
            degree_k,
        }
    }

    fn cost(&self) -> u128 {
        match self.objective {
            Objective::MinDouble => self.state.doubles_so_far as u128,
            Objective::MinNodes => self.state.nodes_so_far,
        }
    }

    fn satisfied_covers(&self) -> u32 {
        self.rules
            .covers
            .iter()
            .enumerate()
            .filter(|(_, &c)| c & self.state.pattern != 0)
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    /// Doubles that every completion must still add.
    fn future_doubles(&self, p: usize) -> usize {
        let future: VertexSet = !((bit(p)) - 1);
        let forced = self.rules.double & future;
        let mut used = forced;
        let mut from_rules = forced.count_ones() as usize;
        for &c in &self.rules.covers {
            if c & self.state.pattern != 0 {
                continue;
            }
            let open = c & future;
            if open & used == 0 && open != 0 {
                used |= open;
                from_rules += 1;
            }
        }
        let from_degree = (self.degree_k & !self.state.placed).count_ones() as usize;
        from_rules.max(from_degree)
    }

    fn lower_bound_rest(&self, p: usize) -> u128 {
        match self.objective {
            Objective::MinDouble => self.future_doubles(p) as u128,
            Objective::MinNodes => {
                // Every remaining level has at least the current width.
                (self.n - p) as u128 * self.state.level
            }
        }
    }

    fn memo_key(&self) -> (VertexSet, u32, u32) {
        let d = match self.objective {
            Objective::MinDouble => 0,
            Objective::MinNodes => self.state.doubles_so_far as u32,
        };
        (self.state.placed, self.satisfied_covers(), d)
    }

    fn incumbent_value(&self) -> Option<u128> {
        self.incumbent.as_ref().map(|(v, _)| *v)
    }

    fn tick(&mut self) -> bool {
        self.choice_points += 1;
        if self.choice_points.is_multiple_of(POLL_INTERVAL) && self.deadline.expired() {
            self.timed_out = true;
        }
        self.timed_out
    }

    fn run(&mut self) {
        if self.tick() {
            return;
        }
        let p = self.state.perm.len();
        if p == self.n {
            let value = self.cost();
            if self.incumbent_value().is_none_or(|inc| value < inc) {
                self.incumbent = Some((value, self.state.perm.clone()));
            }
            return;
        }
        if p <= self.k {
            self.branch_clique(p);
        } else {
            self.branch_tail(p);
        }
    }

    fn branch_clique(&mut self, p: usize) {
        let inst = self.inst;
        let last = self.state.perm.last().copied();
        let common = self
            .state
            .perm
            .iter()
            .fold(inst.all_vertices() & !self.state.placed, |m, &u| {
                m & inst.neighbor_set(u)
            });
        let mut cands: Vec<usize> = crate::graph::members(common)
            .filter(|&v| last.is_none_or(|l| v > l) && inst.degree(v) >= self.k)
            .collect();
        if cands.len() < self.k + 1 - p {
            return;
        }
        cands.truncate(cands.len() - (self.k - p));
        for v in cands {
            self.state.place(inst, v, p == self.k);
            self.run();
            self.state.unplace(inst);
            if self.timed_out {
                return;
            }
        }
    }

    fn branch_tail(&mut self, p: usize) {
        let inst = self.inst;
        let k = self.k;
        let cost = self.cost();
        let inc = self.incumbent_value();
        if let Some(inc) = inc {
            if cost.saturating_add(self.lower_bound_rest(p)) >= inc {
                return;
            }
        }
        let key = self.memo_key();
        if let Some(&lb) = self.memo.get(&key) {
            match inc {
                Some(inc) if cost.saturating_add(lb) >= inc => return,
                None if lb == u128::MAX => return,
                _ => {}
            }
        }

        let must_single = self.rules.single & bit(p) != 0;
        let mut must_double = self.rules.double & bit(p) != 0;
        for &c in &self.rules.covers {
            let top = 127 - c.leading_zeros() as usize;
            if top == p && c & self.state.pattern == 0 {
                must_double = true;
            }
        }
        let mut cands: Vec<(usize, usize)> = (0..self.n)
            .filter(|&v| self.state.placed & bit(v) == 0)
            .map(|v| (self.state.pred_count[v], v))
            .filter(|&(c, _)| c >= k && !(must_single && c == k) && !(must_double && c > k))
            .collect();
        cands.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

        for (c, v) in cands {
            self.state.place(inst, v, c == k);
            self.run();
            self.state.unplace(inst);
            if self.timed_out {
                return;
            }
        }

        if self.memo.len() < MEMO_LIMIT {
            let lb = match self.incumbent_value() {
                Some(inc) => inc.saturating_sub(cost),
                None => u128::MAX,
            };
            let entry = self.memo.entry(key).or_insert(0);
            *entry = (*entry).max(lb);
        }
    }
}

/// Solves MIN DOUBLE or MIN NODES exactly.
pub fn solve(inst: &Instance, objective: Objective, opts: &DfsOptions) -> Solution {
    let deadline = Deadline::new(opts.time_limit);
    let pre = if opts.use_presolve {
        presolve(inst, &opts.presolve)
    } else {
        crate::presolve::base_fixings(inst)
    };
    let mut stats = Stats::default();
    if pre.infeasible {
        stats.time_ms = deadline.elapsed_ms();
        return Solution::infeasible(stats);
    }
    let mut search = Search::new(inst, objective, RankRules::from_presolve(&pre), deadline);
    if opts.warm_start {
        if let Some((ord, rep)) = greedy_dvop(inst) {
            let value = match objective {
                Objective::MinDouble => rep.double_count as u128,
                Objective::MinNodes => rep.total_nodes,
            };
            search.incumbent = Some((value, ord.perm().to_vec()));
        }
    }
    search.run();
    stats.choice_points = search.choice_points;
    stats.time_ms = deadline.elapsed_ms();
    let status = if search.timed_out {
        Status::Timeout
    } else if search.incumbent.is_some() {
        Status::Optimal
    } else {
        Status::Infeasible
    };
    match search.incumbent {
        Some((value, perm)) => solution_from_order(inst, status, value, perm, stats),
        None => Solution {
            status,
            ..Solution::infeasible(stats)
        },
    }
}

pub(crate) fn solution_from_order(
    inst: &Instance,
    status: Status,
    value: u128,
    perm: Vec<usize>,
    stats: Stats,
) -> Solution {
    let ord = VertexOrder::new(perm).expect("search builds permutations");
    let rep = check_order(inst, &ord).expect("length matches");
    debug_assert!(rep.is_dvop);
    Solution {
        status,
        objective: Some(value),
        double_count: Some(rep.double_count),
        total_nodes: Some(rep.total_nodes),
        doubles: Some(rep.doubles),
        order: Some(ord),
        stats,
    }
}

/// Outcome of a threshold search that ran out of time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimedOut;

/// Looks for a valid order in which every rank in `strict` (all above `K`)
/// has at least `K+1` placed neighbours. Other ranks above `K` need `K`.
pub struct ThresholdSearch<'a> {
    inst: &'a Instance,
    strict: VertexSet,
    placed: VertexSet,
    perm: Vec<usize>,
    pred_count: Vec<usize>,
    failed: HashSet<VertexSet>,
    deadline: Deadline,
    pub choice_points: u64,
}

impl<'a> ThresholdSearch<'a> {
    pub fn new(inst: &'a Instance, strict: VertexSet, deadline: Deadline) -> Self {
        Self {
            inst,
            strict,
            placed: 0,
            perm: Vec::with_capacity(inst.n()),
            pred_count: vec![0; inst.n()],
            failed: HashSet::new(),
            deadline,
            choice_points: 0,
        }
    }

    pub fn find(mut self) -> Result<Option<VertexOrder>, TimedOut> {
        let found = self.go()?;
        Ok(found.then(|| VertexOrder::new(self.perm).expect("permutation")))
    }

    fn place(&mut self, v: usize) {
        self.perm.push(v);
        self.placed |= bit(v);
        for u in self.inst.neighbors(v) {
            self.pred_count[u] += 1;
        }
    }

    fn unplace(&mut self) {
        let v = self.perm.pop().expect("non-empty");
        self.placed &= !bit(v);
        for u in self.inst.neighbors(v) {
            self.pred_count[u] -= 1;
        }
    }

    fn go(&mut self) -> Result<bool, TimedOut> {
        self.choice_points += 1;
        if self.choice_points.is_multiple_of(POLL_INTERVAL) && self.deadline.expired() {
            return Err(TimedOut);
        }
        let inst = self.inst;
        let n = inst.n();
        let k = inst.k();
        let p = self.perm.len();
        if p == n {
            return Ok(true);
        }
        if p <= k {
            let last = self.perm.last().copied();
            let common = self
                .perm
                .iter()
                .fold(inst.all_vertices() & !self.placed, |m, &u| {
                    m & inst.neighbor_set(u)
                });
            let cands: Vec<usize> = crate::graph::members(common)
                .filter(|&v| last.is_none_or(|l| v > l))
                .collect();
            for v in cands {
                self.place(v);
                if self.go()? {
                    return Ok(true);
                }
                self.unplace();
            }
            return Ok(false);
        }
        if self.failed.contains(&self.placed) {
            return Ok(false);
        }
        let need = if self.strict & bit(p) != 0 { k + 1 } else { k };
        let mut cands: Vec<(usize, usize)> = (0..n)
            .filter(|&v| self.placed & bit(v) == 0 && self.pred_count[v] >= need)
            .map(|v| (self.pred_count[v], v))
            .collect();
        cands.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for (_, v) in cands {
            self.place(v);
            if self.go()? {
                return Ok(true);
            }
            self.unplace();
        }
        if self.failed.len() < MEMO_LIMIT {
            self.failed.insert(self.placed);
        }
        Ok(false)
    }
}

/// Validates an assignment against the constraint system of one of the
/// vertex-rank formulations. `x` and `z` are induced from the order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// Assignment IP with `x_vr` placements and `z_vr` prefix indicators.
    Ip,
    /// Rank variable per vertex.
    CpRank,
    /// Vertex variable per rank.
    CpVertex,
    /// Both views, channelled.
    CpCombined,
}

impl Formulation {
    pub const ALL: [Formulation; 4] = [
        Formulation::Ip,
        Formulation::CpRank,
        Formulation::CpVertex,
        Formulation::CpCombined,
    ];
}

/// Checks `(order, doubles)` against every constraint of `model`.
///
/// The linking constraints are of the `>=` form: a rank flagged double only
/// needs `K` adjacent predecessors, so flagging a non-double as double is
/// feasible (the objective removes such slack), while a double flagged as
/// single is not.
pub fn validate_formulation(
    inst: &Instance,
    order: &VertexOrder,
    doubles: &crate::order::DoublePattern,
    model: Formulation,
) -> bool {
    let n = inst.n();
    let k = inst.k();
    if order.len() != n || doubles.len() != n {
        return false;
    }
    let y = |r: usize| doubles.bits[r];
    let preds = |r: usize| {
        let v = order.vertex_at(r);
        (0..r)
            .filter(|&q| inst.adjacent(order.vertex_at(q), v))
            .count()
    };
    // Shared fixings: ranks below K single, rank K double.
    if (0..k).any(y) || !y(k) {
        return false;
    }
    let clique_ok =
        (0..=k).all(|r| (0..r).all(|q| inst.adjacent(order.vertex_at(q), order.vertex_at(r))));
    let linking_ok = (k + 1..n).all(|r| preds(r) + usize::from(y(r)) > k);
    match model {
        Formulation::Ip => {
            // x_vr = [rank(v) = r]; z_vr = [rank(v) < r].
            let x = |v: usize, r: usize| order.rank_of(v) == r;
            let z = |v: usize, r: usize| order.rank_of(v) < r;
            let assignment = (0..n).all(|v| (0..n).filter(|&r| x(v, r)).count() == 1)
                && (0..n).all(|r| (0..n).filter(|&v| x(v, r)).count() == 1);
            // Clique rows: for r <= K, the vertex at r sees every earlier one.
            let clique = (0..=k).all(|r| {
                (0..n).all(|v| {
                    !x(v, r) || (0..n).filter(|&u| z(u, r) && inst.adjacent(u, v)).count() >= r
                })
            });
            // z_vr <= sum_{q<r} x_vq and z_vr >= x_vq for q < r.
            let prefix = (0..n).all(|v| {
                (0..n).all(|r| {
                    let before = (0..r).any(|q| x(v, q));
                    z(v, r) == before
                })
            });
            let link = (k + 1..n).all(|r| {
                (0..n).all(|v| {
                    !x(v, r)
                        || (0..n).filter(|&u| z(u, r) && inst.adjacent(u, v)).count()
                            + usize::from(y(r))
                            > k
                })
            });
            assignment && clique && prefix && link
        }
        Formulation::CpRank => {
            // All ranks distinct; every non-adjacent pair avoids sharing the
            // clique prefix; vertices after K satisfy the cardinality rule.
            let distinct = {
                let mut seen = vec![false; n];
                (0..n).all(|v| !std::mem::replace(&mut seen[order.rank_of(v)], true))
            };
            let non_edges = (0..n).all(|u| {
                (u + 1..n)
                    .all(|v| inst.adjacent(u, v) || order.rank_of(u) > k || order.rank_of(v) > k)
            });
            let logical = (0..n).all(|v| {
                let r = order.rank_of(v);
                r <= k
                    || inst.neighbors(v).filter(|&u| order.rank_of(u) < r).count()
                        + usize::from(y(r))
                        > k
            });
            distinct && non_edges && logical
        }
        Formulation::CpVertex => {
            let distinct = {
                let mut seen = vec![false; n];
                (0..n).all(|r| !std::mem::replace(&mut seen[order.vertex_at(r)], true))
            };
            distinct && clique_ok && linking_ok
        }
        Formulation::CpCombined => {
            let channel = (0..n).all(|r| order.rank_of(order.vertex_at(r)) == r);
            channel
                && validate_formulation(inst, order, doubles, Formulation::CpRank)
                && validate_formulation(inst, order, doubles, Formulation::CpVertex)
        }
    }
}
