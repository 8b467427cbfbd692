//! Combinatorial Benders decomposition on the rank-indexed double pattern.
//!
//! The master picks a cheapest pattern that satisfies the fixings and every
//! cut so far; the subproblem looks for an order with singles wherever the
//! pattern says so. When none exists, a deletion filter shrinks the set of
//! single ranks to an irreducible infeasible subset `S` and the master gets
//! `sum_{r in S} y_r >= 1`.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::dfs::{solution_from_order, ThresholdSearch, TimedOut};
use crate::graph::{bit, Instance, VertexSet};
use crate::order::{greedy_dvop, DoublePattern, VertexOrder};
use crate::presolve::{base_fixings, presolve, PresolveOptions, PresolveResult};
use crate::solution::{Deadline, Solution, Stats, Status};

/// `sum_{r in ranks} y_r >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BendersCut {
    pub ranks: BTreeSet<usize>,
}

impl BendersCut {
    pub fn mask(&self) -> VertexSet {
        self.ranks.iter().fold(0, |m, &r| m | bit(r))
    }

    pub fn satisfied_by(&self, pattern: &DoublePattern) -> bool {
        self.ranks.iter().any(|&r| pattern.bits[r])
    }
}

/// A master cut: covering inequality or a no-good on one pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MasterCut {
    Cover(BendersCut),
    /// Forbids exactly this pattern (ranks above `K` as a mask).
    NoGood(VertexSet),
}

impl MasterCut {
    pub fn satisfied_by(&self, pattern: &DoublePattern) -> bool {
        match self {
            MasterCut::Cover(c) => c.satisfied_by(pattern),
            MasterCut::NoGood(mask) => pattern_mask(pattern) != *mask,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IisError {
    #[error("the pattern admits an order; there is no infeasible subsystem")]
    Feasible,
    #[error("time limit reached while extracting the subsystem")]
    TimedOut,
}

impl From<TimedOut> for IisError {
    fn from(_: TimedOut) -> Self {
        IisError::TimedOut
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NaiveOptions {
    pub time_limit: Option<Duration>,
    pub use_presolve: bool,
    /// Use no-good cuts instead of subsystem cuts.
    pub nogood: bool,
    pub presolve: PresolveOptions,
}

impl Default for NaiveOptions {
    fn default() -> Self {
        Self {
            time_limit: None,
            use_presolve: true,
            nogood: false,
            presolve: PresolveOptions::default(),
        }
    }
}

/// A cut together with the master pattern that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedCut {
    pub cut: MasterCut,
    pub pattern: DoublePattern,
}

#[derive(Debug, Clone)]
pub struct NaiveRun {
    pub solution: Solution,
    pub cuts: Vec<GeneratedCut>,
}

fn pattern_mask(p: &DoublePattern) -> VertexSet {
    p.ranks().fold(0, |m, r| m | bit(r))
}

struct Master<'a> {
    n: usize,
    fixings: &'a PresolveResult,
    covers: Vec<VertexSet>,
    nogoods: Vec<VertexSet>,
    /// Ranks the search may set freely (above `K`, not fixed).
    free: VertexSet,
    best: Option<(usize, VertexSet)>,
    deadline: Deadline,
    timed_out: bool,
    nodes: u64,
}

impl Master<'_> {
    fn lower_bound(&self, decided: VertexSet, ones: VertexSet) -> usize {
        let mut used = 0;
        let mut count = 0;
        for &c in &self.covers {
            if c & ones != 0 {
                continue;
            }
            let open = c & !decided;
            if open & used == 0 {
                used |= open;
                count += 1;
            }
        }
        count
    }

    fn go(&mut self, r: usize, ones: VertexSet, decided: VertexSet) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) && self.deadline.expired() {
            self.timed_out = true;
        }
        if self.timed_out {
            return;
        }
        let cost = ones.count_ones() as usize;
        // A cover whose ranks are all decided single is violated.
        if self
            .covers
            .iter()
            .any(|&c| c & ones == 0 && c & !decided == 0)
        {
            return;
        }
        if let Some((best, _)) = self.best {
            if cost + self.lower_bound(decided, ones) >= best {
                return;
            }
        }
        if r == self.n {
            if self.nogoods.contains(&ones) {
                return;
            }
            self.best = Some((cost, ones));
            return;
        }
        let here = bit(r);
        if self.free & here == 0 {
            let one = self.fixings.fixed_one.contains(&r);
            let ones2 = if one { ones | here } else { ones };
            self.go(r + 1, ones2, decided | here);
            return;
        }
        let in_open_cover = self.covers.iter().any(|&c| c & here != 0 && c & ones == 0);
        if !in_open_cover && self.nogoods.is_empty() {
            self.go(r + 1, ones, decided | here);
            return;
        }
        self.go(r + 1, ones, decided | here);
        self.go(r + 1, ones | here, decided | here);
    }
}

/// Cheapest pattern meeting the fixings and cuts; ties go to the
/// lexicographically smallest bit vector. `None` when infeasible or when
/// the deadline passes first.
pub fn mp1_solve(
    n: usize,
    k: usize,
    fixings: &PresolveResult,
    cuts: &[MasterCut],
) -> Option<DoublePattern> {
    mp1_solve_until(n, k, fixings, cuts, Deadline::none())
        .ok()
        .flatten()
}

fn mp1_solve_until(
    n: usize,
    k: usize,
    fixings: &PresolveResult,
    cuts: &[MasterCut],
    deadline: Deadline,
) -> Result<Option<DoublePattern>, TimedOut> {
    if fixings.infeasible {
        return Ok(None);
    }
    let mut fixed: VertexSet = (0..=k.min(n.saturating_sub(1))).fold(0, |m, r| m | bit(r));
    for &r in fixings.fixed_zero.iter().chain(&fixings.fixed_one) {
        fixed |= bit(r);
    }
    let all = if n == 128 { VertexSet::MAX } else { bit(n) - 1 };
    let mut covers: Vec<VertexSet> = fixings
        .cover_inequalities
        .iter()
        .map(|s| s.iter().fold(0, |m, &r| m | bit(r)))
        .collect();
    let mut nogoods = Vec::new();
    for c in cuts {
        match c {
            MasterCut::Cover(b) => covers.push(b.mask()),
            MasterCut::NoGood(g) => nogoods.push(*g),
        }
    }
    let mut m = Master {
        n,
        fixings,
        covers,
        nogoods,
        free: all & !fixed,
        best: None,
        deadline,
        timed_out: false,
        nodes: 0,
    };
    m.go(0, 0, 0);
    if m.timed_out {
        return Err(TimedOut);
    }
    Ok(m.best.map(|(_, ones)| DoublePattern {
        bits: (0..n).map(|r| ones & bit(r) != 0).collect(),
    }))
}

fn strict_ranks(k: usize, pattern: &DoublePattern) -> VertexSet {
    (k + 1..pattern.len())
        .filter(|&r| !pattern.bits[r])
        .fold(0, |m, r| m | bit(r))
}

/// An order whose ranks flagged single (above `K`) have at least `K+1`
/// adjacent predecessors; ranks flagged double need only `K`.
pub fn sp1_solve(inst: &Instance, pattern: &DoublePattern) -> Option<VertexOrder> {
    sp1_until(inst, pattern, Deadline::none()).ok().flatten()
}

fn sp1_until(
    inst: &Instance,
    pattern: &DoublePattern,
    deadline: Deadline,
) -> Result<Option<VertexOrder>, TimedOut> {
    if pattern.len() != inst.n() || !pattern.bits[inst.k()] {
        return Ok(None);
    }
    ThresholdSearch::new(inst, strict_ranks(inst.k(), pattern), deadline).find()
}

/// Deletion filter over the single ranks of an infeasible pattern, scanned
/// from the highest rank down.
pub fn find_iis(inst: &Instance, pattern: &DoublePattern) -> Result<BendersCut, IisError> {
    find_iis_until(inst, pattern, Deadline::none())
}

fn find_iis_until(
    inst: &Instance,
    pattern: &DoublePattern,
    deadline: Deadline,
) -> Result<BendersCut, IisError> {
    let k = inst.k();
    let mut strict = strict_ranks(k, pattern);
    if ThresholdSearch::new(inst, strict, deadline)
        .find()?
        .is_some()
    {
        return Err(IisError::Feasible);
    }
    for r in (k + 1..inst.n()).rev() {
        if strict & bit(r) == 0 {
            continue;
        }
        let trial = strict & !bit(r);
        if ThresholdSearch::new(inst, trial, deadline)
            .find()?
            .is_none()
        {
            strict = trial;
        }
    }
    Ok(BendersCut {
        ranks: (0..inst.n()).filter(|&r| strict & bit(r) != 0).collect(),
    })
}

/// Runs the master/subproblem loop to optimality, infeasibility or timeout.
pub fn solve_naive(inst: &Instance, opts: &NaiveOptions) -> NaiveRun {
    let deadline = Deadline::new(opts.time_limit);
    let n = inst.n();
    let k = inst.k();
    let mut stats = Stats::default();
    let mut generated = Vec::new();
    let finish = |mut stats: Stats, status: Status, order: Option<VertexOrder>, cuts| {
        stats.time_ms = deadline.elapsed_ms();
        let solution = match order {
            Some(ord) => {
                let value = crate::order::check_order(inst, &ord)
                    .expect("length matches")
                    .double_count as u128;
                solution_from_order(inst, status, value, ord.perm().to_vec(), stats)
            }
            None => Solution {
                status,
                ..Solution::infeasible(stats)
            },
        };
        NaiveRun { solution, cuts }
    };

    let fixings = if opts.use_presolve {
        presolve(inst, &opts.presolve)
    } else {
        base_fixings(inst)
    };
    if fixings.infeasible || greedy_dvop(inst).is_none() {
        return finish(stats, Status::Infeasible, None, generated);
    }

    let mut cuts: Vec<MasterCut> = Vec::new();
    loop {
        stats.iterations += 1;
        let pattern = match mp1_solve_until(n, k, &fixings, &cuts, deadline) {
            Ok(Some(p)) => p,
            Ok(None) => return finish(stats, Status::Infeasible, None, generated),
            Err(TimedOut) => return finish(stats, Status::Timeout, None, generated),
        };
        let order = match sp1_until(inst, &pattern, deadline) {
            Ok(o) => o,
            Err(TimedOut) => return finish(stats, Status::Timeout, None, generated),
        };
        if let Some(ord) = order {
            return finish(stats, Status::Optimal, Some(ord), generated);
        }
        let cut = if opts.nogood {
            MasterCut::NoGood(pattern_mask(&pattern))
        } else {
            let t = Instant::now();
            let res = find_iis_until(inst, &pattern, deadline);
            stats.iis_time_ms += t.elapsed().as_secs_f64() * 1e3;
            match res {
                Ok(c) if c.ranks.is_empty() => {
                    return finish(stats, Status::Infeasible, None, generated)
                }
                Ok(c) => MasterCut::Cover(c),
                Err(IisError::TimedOut) => return finish(stats, Status::Timeout, None, generated),
                Err(IisError::Feasible) => unreachable!("subproblem was infeasible"),
            }
        };
        stats.cuts += 1;
        generated.push(GeneratedCut {
            cut: cut.clone(),
            pattern,
        });
        cuts.push(cut);
    }
}
