//! Witness-based decomposition.
//!
//! The master picks an initial `(K+1)`-clique and, for every other vertex
//! `v`, a witness set `W(v)` of neighbours: `K+1` of them for a non-double,
//! `K` for a double, always including `v`'s clique neighbours. The
//! subproblem orders the witness digraph topologically; a directed cycle
//! among non-clique vertices becomes a cycle-breaking cut
//!
//! ```text
//! sum_{(v,u) in C} w_vu <= |V(C)| - 1 + [|V(C)| <= K+1] * kappa_min(C)
//! ```
//!
//! The master is solved by depth-first search with cuts added lazily at the
//! leaves, so the whole loop runs as a single branch-and-cut.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet, VecDeque};
use std::time::Duration;

use thiserror::Error;

use crate::dfs::solution_from_order;
use crate::graph::{bit, enumerate_cliques, members, Instance, VertexSet};
use crate::order::{check_order, greedy_from_clique, VertexOrder};
use crate::presolve::{presolve, PresolveOptions, PresolveResult};
use crate::solution::{Deadline, Solution, Stats, Status};

/// Clique choice, witness sets and vertex-indexed doubles.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WitnessState {
    /// Initial clique (the `kappa` variables).
    pub clique: VertexSet,
    /// `witnesses[v]` holds every `u` with `w_vu = 1`.
    pub witnesses: Vec<VertexSet>,
    pub doubles: Vec<bool>,
}

impl WitnessState {
    pub fn in_clique(&self, v: usize) -> bool {
        self.clique & bit(v) != 0
    }

    /// All arcs `(v, u)` with `u` witnessing `v`.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.witnesses
            .iter()
            .enumerate()
            .flat_map(|(v, &w)| members(w).map(move |u| (v, u)))
    }

    pub fn has_arc(&self, v: usize, u: usize) -> bool {
        self.witnesses[v] & bit(u) != 0
    }

    /// Sum of doubles plus one for the always-double rank `K`.
    pub fn objective(&self) -> usize {
        self.doubles.iter().filter(|&&d| d).count() + 1
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error("state has wrong dimensions")]
    Shape,
    #[error("clique has {0} vertices")]
    CliqueSize(usize),
    #[error("clique vertices {0} and {1} are not adjacent")]
    CliqueNotComplete(usize, usize),
    #[error("vertex {v} neighbours clique vertex {c} but is not witnessed by it")]
    MissingCliqueWitness { v: usize, c: usize },
    #[error("vertex {v} is witnessed by non-neighbour {u}")]
    NonNeighbourWitness { v: usize, u: usize },
    #[error("vertex {v} has {got} witnesses, expected {expected}")]
    WitnessCount {
        v: usize,
        got: usize,
        expected: usize,
    },
    #[error("clique vertex {0} is flagged double")]
    CliqueDouble(usize),
}

/// Checks the master constraints (clique size and adjacency, clique
/// witnessing, the witness-count linking rule, singles in the clique).
pub fn check_state(inst: &Instance, s: &WitnessState) -> Result<(), WitnessError> {
    let n = inst.n();
    let k = inst.k();
    if s.witnesses.len() != n || s.doubles.len() != n || s.clique & !inst.all_vertices() != 0 {
        return Err(WitnessError::Shape);
    }
    let size = s.clique.count_ones() as usize;
    if size != k + 1 {
        return Err(WitnessError::CliqueSize(size));
    }
    for a in members(s.clique) {
        for b in members(s.clique) {
            if a < b && !inst.adjacent(a, b) {
                return Err(WitnessError::CliqueNotComplete(a, b));
            }
        }
    }
    for v in 0..n {
        if s.witnesses[v] & !inst.neighbor_set(v) != 0 {
            let u = (s.witnesses[v] & !inst.neighbor_set(v)).trailing_zeros() as usize;
            return Err(WitnessError::NonNeighbourWitness { v, u });
        }
        for c in members(inst.neighbor_set(v) & s.clique) {
            if s.witnesses[v] & bit(c) == 0 {
                return Err(WitnessError::MissingCliqueWitness { v, c });
            }
        }
        let kappa = s.in_clique(v);
        if kappa && s.doubles[v] {
            return Err(WitnessError::CliqueDouble(v));
        }
        let expected = if kappa {
            k
        } else {
            k + 1 - usize::from(s.doubles[v])
        };
        let got = s.witnesses[v].count_ones() as usize;
        if got != expected {
            return Err(WitnessError::WitnessCount { v, got, expected });
        }
    }
    Ok(())
}

/// The state an order induces: its first `K+1` vertices form the clique,
/// every later vertex is witnessed by its clique neighbours and then its
/// earliest other neighbours, `K` in total for a double and `K+1` otherwise.
pub fn induced_state(inst: &Instance, ord: &VertexOrder) -> WitnessState {
    let n = inst.n();
    let k = inst.k();
    let clique = ord.perm()[..=k].iter().fold(0, |m, &v| m | bit(v));
    let mut witnesses = vec![0; n];
    let mut doubles = vec![false; n];
    let mut placed: VertexSet = 0;
    for (r, &v) in ord.perm().iter().enumerate() {
        if r <= k {
            witnesses[v] = clique & !bit(v);
        } else {
            let preds = inst.neighbor_set(v) & placed;
            let double = preds.count_ones() as usize == k;
            doubles[v] = double;
            let need = if double { k } else { k + 1 };
            let mut w = preds & clique;
            for &u in &ord.perm()[k + 1..r] {
                if w.count_ones() as usize == need {
                    break;
                }
                if preds & bit(u) != 0 {
                    w |= bit(u);
                }
            }
            witnesses[v] = w;
        }
        placed |= bit(v);
    }
    WitnessState {
        clique,
        witnesses,
        doubles,
    }
}

/// A lifted cycle-breaking inequality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleCut {
    /// Arcs `(v, u)` standing for `w_vu`, sorted.
    pub arcs: Vec<(usize, usize)>,
    pub vertices: VertexSet,
    /// Smallest vertex of the cycle.
    pub lift_vertex: usize,
    /// Whether `kappa_{lift_vertex}` appears on the right-hand side.
    pub lifted: bool,
}

impl CycleCut {
    pub fn len(&self) -> usize {
        self.vertices.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.vertices == 0
    }

    pub fn rhs(&self, clique: VertexSet) -> usize {
        self.len() - 1 + usize::from(self.lifted && clique & bit(self.lift_vertex) != 0)
    }

    pub fn lhs(&self, s: &WitnessState) -> usize {
        self.arcs.iter().filter(|&&(v, u)| s.has_arc(v, u)).count()
    }

    pub fn satisfied_by(&self, s: &WitnessState) -> bool {
        self.lhs(s) <= self.rhs(s.clique)
    }
}

/// Builds the cut for a directed cycle given as witness arcs `(v, u)`.
pub fn make_cycle_cut(arcs: &[(usize, usize)], k: usize) -> CycleCut {
    let vertices = arcs.iter().fold(0, |m, &(v, u)| m | bit(v) | bit(u));
    let mut sorted = arcs.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    CycleCut {
        lift_vertex: vertices.trailing_zeros() as usize,
        lifted: vertices.count_ones() as usize <= k + 1,
        arcs: sorted,
        vertices,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sp2Outcome {
    Order(VertexOrder),
    /// Witness arcs `(v, u)` of a directed cycle.
    Cycle(Vec<(usize, usize)>),
}

/// Digraph on non-clique vertices with an arc `u -> v` whenever `u`
/// witnesses `v` (so `u` must come first).
fn precedence_graph(s: &WitnessState) -> Vec<VertexSet> {
    let n = s.witnesses.len();
    let mut succ = vec![0; n];
    for v in 0..n {
        if s.in_clique(v) {
            continue;
        }
        for u in members(s.witnesses[v] & !s.clique) {
            succ[u] |= bit(v);
        }
    }
    succ
}

/// First back arc of a depth-first search over `allowed`, closed into a
/// cycle by a shortest path. Returned as witness arcs.
fn find_cycle(succ: &[VertexSet], allowed: VertexSet) -> Option<Vec<(usize, usize)>> {
    let n = succ.len();
    let mut state = vec![0u8; n]; // 0 new, 1 on stack, 2 done
    for root in members(allowed) {
        if state[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, VertexSet)> = vec![(root, succ[root] & allowed)];
        state[root] = 1;
        while let Some(top) = stack.last_mut() {
            let x = top.0;
            if top.1 == 0 {
                state[x] = 2;
                stack.pop();
                continue;
            }
            let y = top.1.trailing_zeros() as usize;
            top.1 &= top.1 - 1;
            match state[y] {
                0 => {
                    state[y] = 1;
                    stack.push((y, succ[y] & allowed));
                }
                1 => {
                    let path = shortest_path(succ, allowed, y, x);
                    let mut arcs: Vec<(usize, usize)> =
                        path.windows(2).map(|p| (p[1], p[0])).collect();
                    arcs.push((y, x));
                    return Some(arcs);
                }
                _ => {}
            }
        }
    }
    None
}

fn shortest_path(succ: &[VertexSet], allowed: VertexSet, from: usize, to: usize) -> Vec<usize> {
    let mut parent = vec![usize::MAX; succ.len()];
    let mut seen = bit(from);
    let mut queue = VecDeque::from([from]);
    while let Some(a) = queue.pop_front() {
        if a == to {
            break;
        }
        for b in members(succ[a] & allowed & !seen) {
            seen |= bit(b);
            parent[b] = a;
            queue.push_back(b);
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = parent[cur];
        path.push(cur);
    }
    path.reverse();
    path
}

/// Orders the clique first (by index), then the remaining vertices in the
/// smallest-index-first topological order of the witness digraph, or
/// reports a directed cycle.
pub fn sp2_check(inst: &Instance, s: &WitnessState) -> Result<Sp2Outcome, WitnessError> {
    check_state(inst, s)?;
    Ok(sp2_unchecked(s))
}

fn sp2_unchecked(s: &WitnessState) -> Sp2Outcome {
    let n = s.witnesses.len();
    let outside = (if n == 128 { VertexSet::MAX } else { bit(n) - 1 }) & !s.clique;
    let succ = precedence_graph(s);
    if let Some(c) = find_cycle(&succ, outside) {
        return Sp2Outcome::Cycle(c);
    }
    let mut indeg = vec![0usize; n];
    for u in members(outside) {
        for v in members(succ[u]) {
            indeg[v] += 1;
        }
    }
    let mut perm: Vec<usize> = members(s.clique).collect();
    let mut heap: BinaryHeap<Reverse<usize>> = members(outside)
        .filter(|&v| indeg[v] == 0)
        .map(Reverse)
        .collect();
    while let Some(Reverse(u)) = heap.pop() {
        perm.push(u);
        for v in members(succ[u]) {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                heap.push(Reverse(v));
            }
        }
    }
    Sp2Outcome::Order(VertexOrder::new(perm).expect("acyclic digraph yields a permutation"))
}

/// Vertex-disjoint cycles found by repeated search, first one as in
/// [`sp2_check`].
fn disjoint_cycles(s: &WitnessState) -> Vec<Vec<(usize, usize)>> {
    let n = s.witnesses.len();
    let mut allowed = (if n == 128 { VertexSet::MAX } else { bit(n) - 1 }) & !s.clique;
    let succ = precedence_graph(s);
    let mut out = Vec::new();
    while let Some(c) = find_cycle(&succ, allowed) {
        for &(v, _) in &c {
            allowed &= !bit(v);
        }
        out.push(c);
    }
    out
}

/// Checks `(state, order)` against the combined formulation: the master
/// constraints, a permutation, clique vertices at ranks up to `K`, and
/// every non-clique witness of a non-clique vertex placed before it.
pub fn ef_validate(inst: &Instance, s: &WitnessState, ord: &VertexOrder) -> bool {
    if check_state(inst, s).is_err() || ord.len() != inst.n() {
        return false;
    }
    let k = inst.k();
    if members(s.clique).any(|v| ord.rank_of(v) > k) {
        return false;
    }
    (0..inst.n())
        .filter(|&v| !s.in_clique(v))
        .all(|v| members(s.witnesses[v] & !s.clique).all(|u| ord.rank_of(u) < ord.rank_of(v)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreBreak {
    None,
    /// Cuts for every 2-cycle of the arc digraph.
    TwoCycles,
    /// Cuts for every 2-cycle and both orientations of every triangle.
    TwoAndThreeCycles,
}

#[derive(Debug, Clone, Copy)]
pub struct WitnessOptions {
    pub time_limit: Option<Duration>,
    pub pre_break: PreBreak,
    /// Only checks the final order against the rank fixings; the master's
    /// doubles are vertex-indexed.
    pub use_presolve: bool,
    /// Separate all vertex-disjoint cycles of a master solution, not one.
    pub all_disjoint_cycles: bool,
    /// Prune search nodes that no acyclic completion can improve on.
    /// Without it, cycles are only found by the subproblem at leaves.
    pub node_bound: bool,
    pub presolve: PresolveOptions,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        Self {
            time_limit: None,
            pre_break: PreBreak::None,
            use_presolve: true,
            all_disjoint_cycles: false,
            node_bound: true,
            presolve: PresolveOptions::default(),
        }
    }
}

/// Observation points of a run.
#[derive(Debug)]
pub enum Event<'a> {
    /// A master solution handed to the subproblem.
    Master(&'a WitnessState),
    /// A cut separated from a master solution.
    Cut {
        cut: &'a CycleCut,
        state: &'a WitnessState,
    },
}

#[derive(Debug, Clone)]
pub struct WitnessRun {
    pub solution: Solution,
    /// Separated cuts with the master solution each came from.
    pub cuts: Vec<(CycleCut, WitnessState)>,
    /// Seeded cuts (no generating solution).
    pub seeded: Vec<CycleCut>,
    /// Final master solution and the order that realizes it.
    pub accepted: Option<(WitnessState, VertexOrder)>,
}

fn seed_cuts(inst: &Instance, mode: PreBreak) -> Vec<CycleCut> {
    let k = inst.k();
    let mut out = Vec::new();
    if mode == PreBreak::None {
        return out;
    }
    for &(u, v) in inst.edges() {
        out.push(make_cycle_cut(&[(u, v), (v, u)], k));
    }
    if mode == PreBreak::TwoAndThreeCycles {
        for t in enumerate_cliques(inst, 3) {
            let [a, b, c] = [t.members[0], t.members[1], t.members[2]];
            out.push(make_cycle_cut(&[(a, b), (b, c), (c, a)], k));
            out.push(make_cycle_cut(&[(a, c), (c, b), (b, a)], k));
        }
    }
    out
}

/// Ways to witness one vertex for a fixed clique.
struct VertexOptions {
    v: usize,
    /// `(witness set, double)`, singles first, each group lexicographic.
    choices: Vec<(VertexSet, bool)>,
    can_be_single: bool,
}

fn combinations(pool: &[usize], size: usize, mut f: impl FnMut(VertexSet)) {
    fn rec(
        pool: &[usize],
        size: usize,
        start: usize,
        acc: VertexSet,
        f: &mut impl FnMut(VertexSet),
    ) {
        if size == 0 {
            f(acc);
            return;
        }
        for i in start..pool.len() {
            if pool.len() - i < size {
                break;
            }
            rec(pool, size - 1, i + 1, acc | bit(pool[i]), f);
        }
    }
    rec(pool, size, 0, 0, &mut f);
}

fn vertex_options(inst: &Instance, clique: VertexSet, v: usize) -> VertexOptions {
    let k = inst.k();
    let fixed = inst.neighbor_set(v) & clique;
    let c = fixed.count_ones() as usize;
    let others: Vec<usize> = members(inst.neighbor_set(v) & !clique).collect();
    let mut choices = Vec::new();
    if c <= k + 1 {
        combinations(&others, k + 1 - c, |w| choices.push((fixed | w, false)));
    }
    let can_be_single = !choices.is_empty();
    if c <= k {
        combinations(&others, k - c, |w| choices.push((fixed | w, true)));
    }
    VertexOptions {
        v,
        choices,
        can_be_single,
    }
}

enum Mode {
    /// Keep the best leaf; no subproblem.
    Master,
    /// Separate at every leaf; accept acyclic ones.
    BranchAndCut {
        all_disjoint: bool,
        node_bound: bool,
    },
}

struct Engine<'a, 'o> {
    inst: &'a Instance,
    mode: Mode,
    pool: Vec<CycleCut>,
    pool_keys: HashSet<Vec<(usize, usize)>>,
    /// Exclusive upper bound on the objective (doubles incl. the `+1`).
    bound: Option<usize>,
    best_state: Option<WitnessState>,
    best_order: Option<VertexOrder>,
    generated: Vec<(CycleCut, WitnessState)>,
    observer: &'o mut dyn FnMut(Event<'_>),
    deadline: Deadline,
    timed_out: bool,
    stats: Stats,
    polls: u64,
    // Per-clique search state.
    clique: VertexSet,
    order: Vec<VertexOptions>,
    pos_of: Vec<usize>,
    buckets: Vec<Vec<usize>>,
    forced_after: Vec<usize>,
    state: WitnessState,
    doubles: usize,
    backjump: Option<usize>,
    clique_reached_sp2: bool,
}

impl<'a, 'o> Engine<'a, 'o> {
    fn new(
        inst: &'a Instance,
        mode: Mode,
        pool: Vec<CycleCut>,
        bound: Option<usize>,
        observer: &'o mut dyn FnMut(Event<'_>),
        deadline: Deadline,
    ) -> Self {
        let n = inst.n();
        let pool_keys = pool.iter().map(|c| c.arcs.clone()).collect();
        Self {
            inst,
            mode,
            pool,
            pool_keys,
            bound,
            best_state: None,
            best_order: None,
            generated: Vec::new(),
            observer,
            deadline,
            timed_out: false,
            stats: Stats::default(),
            polls: 0,
            clique: 0,
            order: Vec::new(),
            pos_of: vec![usize::MAX; n],
            buckets: Vec::new(),
            forced_after: Vec::new(),
            state: WitnessState {
                clique: 0,
                witnesses: vec![0; n],
                doubles: vec![false; n],
            },
            doubles: 0,
            backjump: None,
            clique_reached_sp2: false,
        }
    }

    /// Position at which a cut becomes checkable for the current clique,
    /// or `None` if the clique already satisfies it.
    fn cut_position(&self, cut: &CycleCut) -> Option<usize> {
        if cut.vertices & self.clique != 0 {
            return None;
        }
        members(cut.vertices).map(|v| self.pos_of[v]).max()
    }

    fn add_to_bucket(&mut self, idx: usize) {
        if let Some(p) = self.cut_position(&self.pool[idx]) {
            self.buckets[p].push(idx);
        }
    }

    fn search_clique(&mut self, clique: VertexSet) {
        let inst = self.inst;
        let n = inst.n();
        self.clique = clique;
        let mut order: Vec<VertexOptions> = (0..n)
            .filter(|&v| clique & bit(v) == 0)
            .map(|v| vertex_options(inst, clique, v))
            .collect();
        if order.iter().any(|o| o.choices.is_empty()) {
            return;
        }
        order.sort_by_key(|o| (Reverse((inst.neighbor_set(o.v) & clique).count_ones()), o.v));
        self.pos_of = vec![usize::MAX; n];
        for (i, o) in order.iter().enumerate() {
            self.pos_of[o.v] = i;
        }
        let m = order.len();
        self.forced_after = vec![0; m + 1];
        for i in (0..m).rev() {
            self.forced_after[i] = self.forced_after[i + 1] + usize::from(!order[i].can_be_single);
        }
        self.order = order;
        self.buckets = vec![Vec::new(); m];
        for idx in 0..self.pool.len() {
            self.add_to_bucket(idx);
        }
        self.state = WitnessState {
            clique,
            witnesses: (0..n)
                .map(|v| {
                    if clique & bit(v) != 0 {
                        clique & !bit(v)
                    } else {
                        0
                    }
                })
                .collect(),
            doubles: vec![false; n],
        };
        self.doubles = 0;
        self.backjump = None;
        self.clique_reached_sp2 = false;
        self.descend(0);
        if self.clique_reached_sp2 {
            self.stats.cliques_considered += 1;
        }
    }

    fn pruned_by_bound(&self, pos: usize) -> bool {
        let extra = match self.mode {
            Mode::BranchAndCut {
                node_bound: true, ..
            } => self.completion_bound(pos),
            _ => Some(self.forced_after[pos]),
        };
        match (extra, self.bound) {
            (None, _) => true,
            (Some(e), Some(b)) => self.doubles + e + 1 >= b,
            (Some(_), None) => false,
        }
    }

    /// Lower bound on the doubles still needed among `order[pos..]` by any
    /// acyclic completion, or `None` if none exists. Peels vertices in from
    /// the clique: assigned ones once their witnesses are in, free ones once
    /// `K+1` neighbours are in. Each time this stalls, every free vertex with
    /// `K` neighbours in goes in at once and one double is counted; by
    /// monotonicity no completion can get by with fewer.
    fn completion_bound(&self, pos: usize) -> Option<usize> {
        let inst = self.inst;
        let k = inst.k() as u32;
        let free: VertexSet = self.order[pos..].iter().fold(0, |acc, o| acc | bit(o.v));
        let mut placed = self.clique;
        let mut rest: VertexSet = self.order.iter().fold(0, |acc, o| acc | bit(o.v));
        let mut rounds = 0;
        loop {
            let mut changed = true;
            while changed {
                changed = false;
                for v in members(rest) {
                    let ready = if free & bit(v) != 0 {
                        (inst.neighbor_set(v) & placed).count_ones() > k
                    } else {
                        self.state.witnesses[v] & !placed == 0
                    };
                    if ready {
                        placed |= bit(v);
                        rest &= !bit(v);
                        changed = true;
                    }
                }
            }
            if rest == 0 {
                return Some(rounds.max(self.forced_after[pos]));
            }
            let batch: VertexSet = members(rest & free)
                .filter(|&v| (inst.neighbor_set(v) & placed).count_ones() >= k)
                .fold(0, |acc, v| acc | bit(v));
            if batch == 0 {
                return None;
            }
            rounds += 1;
            placed |= batch;
            rest &= !batch;
        }
    }

    fn descend(&mut self, pos: usize) {
        self.polls += 1;
        self.stats.choice_points += 1;
        if self.polls.is_multiple_of(1024) && self.deadline.expired() {
            self.timed_out = true;
        }
        if self.timed_out || self.pruned_by_bound(pos) {
            return;
        }
        if pos == self.order.len() {
            self.leaf();
            return;
        }
        let v = self.order[pos].v;
        for i in 0..self.order[pos].choices.len() {
            let (w, double) = self.order[pos].choices[i];
            self.state.witnesses[v] = w;
            self.state.doubles[v] = double;
            self.doubles += usize::from(double);
            let violated = self.buckets[pos].iter().any(|&c| {
                let cut = &self.pool[c];
                cut.arcs
                    .iter()
                    .all(|&(a, b)| self.state.witnesses[a] & bit(b) != 0)
            });
            if !violated && !self.pruned_by_bound(pos + 1) {
                self.descend(pos + 1);
            }
            self.doubles -= usize::from(double);
            self.state.witnesses[v] = 0;
            self.state.doubles[v] = false;
            if self.timed_out {
                return;
            }
            if let Some(target) = self.backjump {
                if target < pos {
                    return;
                }
                self.backjump = None;
            }
        }
    }

    fn leaf(&mut self) {
        let value = self.doubles + 1;
        match self.mode {
            Mode::Master => {
                self.bound = Some(value);
                self.best_state = Some(self.state.clone());
            }
            Mode::BranchAndCut { all_disjoint, .. } => {
                self.stats.iterations += 1;
                self.clique_reached_sp2 = true;
                (self.observer)(Event::Master(&self.state));
                match sp2_unchecked(&self.state) {
                    Sp2Outcome::Order(ord) => {
                        let actual = check_order(self.inst, &ord)
                            .expect("length matches")
                            .double_count;
                        debug_assert!(actual <= value);
                        self.bound = Some(actual);
                        self.best_state = Some(self.state.clone());
                        self.best_order = Some(ord);
                    }
                    Sp2Outcome::Cycle(first) => {
                        let cycles = if all_disjoint {
                            disjoint_cycles(&self.state)
                        } else {
                            vec![first]
                        };
                        let mut jump = usize::MAX;
                        for arcs in cycles {
                            let cut = make_cycle_cut(&arcs, self.inst.k());
                            if let Some(p) = self.cut_position(&cut) {
                                jump = jump.min(p);
                            }
                            if !self.pool_keys.insert(cut.arcs.clone()) {
                                continue;
                            }
                            (self.observer)(Event::Cut {
                                cut: &cut,
                                state: &self.state,
                            });
                            self.stats.cuts += 1;
                            self.generated.push((cut.clone(), self.state.clone()));
                            self.pool.push(cut);
                            self.add_to_bucket(self.pool.len() - 1);
                        }
                        if jump != usize::MAX {
                            self.backjump = Some(jump);
                        }
                    }
                }
            }
        }
    }
}

/// Cheapest master solution under a fixed cut pool, strictly below
/// `incumbent` when given. The rank fixings in `head` only concern
/// rank-indexed doubles and are not used here.
pub fn mp2_solve(
    inst: &Instance,
    cuts: &[CycleCut],
    incumbent: Option<usize>,
    _head: &PresolveResult,
) -> Option<WitnessState> {
    let mut noop = |_: Event<'_>| {};
    let mut engine = Engine::new(
        inst,
        Mode::Master,
        cuts.to_vec(),
        incumbent,
        &mut noop,
        Deadline::none(),
    );
    for c in enumerate_cliques(inst, inst.k() + 1) {
        engine.search_clique(c.as_set());
    }
    engine.best_state
}

/// Full decomposition. Objective: minimum number of doubles.
pub fn solve_witness(inst: &Instance, opts: &WitnessOptions) -> WitnessRun {
    solve_witness_with(inst, opts, &mut |_| {})
}

/// As [`solve_witness`], reporting every master solution and cut.
pub fn solve_witness_with(
    inst: &Instance,
    opts: &WitnessOptions,
    observer: &mut dyn FnMut(Event<'_>),
) -> WitnessRun {
    let deadline = Deadline::new(opts.time_limit);
    let k = inst.k();

    // Starting cliques, best greedy completion first. Cliques from which the
    // greedy gets stuck start no valid order at all and are skipped.
    let mut starts: Vec<(usize, VertexSet, VertexOrder)> = Vec::new();
    for c in enumerate_cliques(inst, k + 1) {
        if let Some(ord) = greedy_from_clique(inst, &c.members) {
            let d = check_order(inst, &ord)
                .expect("length matches")
                .double_count;
            starts.push((d, c.as_set(), ord));
        }
    }
    starts.sort_by_key(|&(d, _, _)| d);

    let seeded = seed_cuts(inst, opts.pre_break);
    let Some((best_d, _, greedy_order)) = starts.first().cloned() else {
        let stats = Stats {
            time_ms: deadline.elapsed_ms(),
            ..Stats::default()
        };
        return WitnessRun {
            solution: Solution::infeasible(stats),
            cuts: Vec::new(),
            seeded,
            accepted: None,
        };
    };

    let mode = Mode::BranchAndCut {
        all_disjoint: opts.all_disjoint_cycles,
        node_bound: opts.node_bound,
    };
    let mut engine = Engine::new(inst, mode, seeded.clone(), Some(best_d), observer, deadline);
    for &(_, clique, _) in &starts {
        engine.search_clique(clique);
        if engine.timed_out {
            break;
        }
    }

    let status = if engine.timed_out {
        Status::Timeout
    } else {
        Status::Optimal
    };
    let (state, order) = match (engine.best_state.take(), engine.best_order.take()) {
        (Some(s), Some(o)) => (s, o),
        _ => (induced_state(inst, &greedy_order), greedy_order),
    };
    if opts.use_presolve && status == Status::Optimal {
        let rep = check_order(inst, &order).expect("length matches");
        debug_assert!(presolve(inst, &opts.presolve).satisfied_by(&rep.doubles));
    }
    let mut stats = engine.stats.clone();
    stats.time_ms = deadline.elapsed_ms();
    let value = check_order(inst, &order)
        .expect("length matches")
        .double_count as u128;
    WitnessRun {
        solution: solution_from_order(inst, status, value, order.perm().to_vec(), stats),
        cuts: engine.generated,
        seeded,
        accepted: Some((state, order)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::presolve::base_fixings;

    /// The worked assignment: clique {0,1,3}; 4 by {0,1}; 2 by {0,1,4};
    /// 5 by {0,1,3}.
    fn worked_state() -> WitnessState {
        let q = bit(0) | bit(1) | bit(3);
        let mut w = vec![0; 6];
        w[0] = bit(1) | bit(3);
        w[1] = bit(0) | bit(3);
        w[3] = bit(0) | bit(1);
        w[4] = bit(0) | bit(1);
        w[2] = bit(0) | bit(1) | bit(4);
        w[5] = bit(0) | bit(1) | bit(3);
        let mut y = vec![false; 6];
        y[4] = true;
        WitnessState {
            clique: q,
            witnesses: w,
            doubles: y,
        }
    }

    #[test]
    fn worked_assignment() {
        let g = witness_example(2);
        let s = worked_state();
        check_state(&g, &s).unwrap();
        assert_eq!(s.objective(), 2);
        let Sp2Outcome::Order(ord) = sp2_check(&g, &s).unwrap() else {
            panic!("expected an order");
        };
        assert_eq!(ord.perm(), &[0, 1, 3, 4, 2, 5]);
        assert!(check_order(&g, &ord).unwrap().is_dvop);
        assert_eq!(check_order(&g, &ord).unwrap().double_count, 2);
        assert!(ef_validate(&g, &s, &ord));
        let moved = VertexOrder::new(vec![0, 4, 1, 3, 2, 5]).unwrap();
        assert!(!ef_validate(&g, &s, &moved));
        let mut bad = s.clone();
        bad.doubles[0] = true;
        assert!(!ef_validate(&g, &bad, &ord));
    }

    #[test]
    fn two_cycle_detected() {
        let g = witness_example(2);
        let mut s = worked_state();
        // 2 and 4 witness each other.
        s.witnesses[4] = bit(0) | bit(1) | bit(2);
        s.doubles[4] = false;
        let Sp2Outcome::Cycle(arcs) = sp2_check(&g, &s).unwrap() else {
            panic!("expected a cycle");
        };
        let cut = make_cycle_cut(&arcs, 2);
        assert_eq!(cut.vertices, bit(2) | bit(4));
        assert!(cut.lifted);
        assert_eq!(cut.lift_vertex, 2);
        assert!(!cut.satisfied_by(&s));
    }

    #[test]
    fn cut_lifting() {
        let four = make_cycle_cut(&[(0, 1), (1, 2), (2, 3), (3, 0)], 2);
        assert!(!four.lifted);
        assert_eq!(four.rhs(bit(0)), 3);
        let three = make_cycle_cut(&[(4, 1), (1, 2), (2, 4)], 2);
        assert!(three.lifted && three.lift_vertex == 1);
        assert_eq!(three.rhs(bit(1)), 3);
        assert_eq!(three.rhs(0), 2);
    }

    #[test]
    fn master_examples() {
        let k5 = complete(5, 2);
        let s = mp2_solve(&k5, &[], None, &base_fixings(&k5)).unwrap();
        assert_eq!(s.objective(), 1);
        for v in 0..5 {
            if !s.in_clique(v) {
                assert_eq!(s.witnesses[v].count_ones(), 3);
            }
        }
        assert!(mp2_solve(&path(5, 2), &[], None, &base_fixings(&path(5, 2))).is_none());
    }

    #[test]
    fn decomposition_examples() {
        for pre in [
            PreBreak::None,
            PreBreak::TwoCycles,
            PreBreak::TwoAndThreeCycles,
        ] {
            for (all, node_bound) in [(false, true), (true, true), (false, false), (true, false)] {
                let o = WitnessOptions {
                    pre_break: pre,
                    all_disjoint_cycles: all,
                    node_bound,
                    ..WitnessOptions::default()
                };
                let run = solve_witness(&six_vertex(2), &o);
                assert_eq!(run.solution.objective, Some(2));
                let (s, ord) = run.accepted.unwrap();
                assert!(ef_validate(&six_vertex(2), &s, &ord));
                assert_eq!(
                    solve_witness(&witness_example(2), &o).solution.objective,
                    Some(1)
                );
                assert_eq!(
                    solve_witness(&six_vertex(3), &o).solution.status,
                    Status::Infeasible
                );
            }
        }
    }

    #[test]
    fn induced_state_is_master_feasible() {
        let g = six_vertex(2);
        for perm in [[0, 1, 2, 3, 4, 5], [3, 5, 2, 1, 0, 4]] {
            let ord = VertexOrder::new(perm.to_vec()).unwrap();
            let s = induced_state(&g, &ord);
            check_state(&g, &s).unwrap();
            assert!(ef_validate(&g, &s, &ord));
            assert_eq!(s.objective(), check_order(&g, &ord).unwrap().double_count);
        }
    }
}
