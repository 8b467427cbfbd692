//! Integer programming models for MIN DOUBLE and MIN NODES as LP files,
//! with per-family size accounting against the published closed forms.

pub mod lp;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::dfs::Formulation;
use crate::graph::{enumerate_cliques, Instance};
use crate::order::{check_order, VertexOrder};

pub use lp::{parse_lp, Assignment, Evaluation, LpError, Model, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    /// Vertex-rank IP.
    Ip,
    /// Vertex-rank IP with per-level node counts.
    MinNodesIp,
    /// Precedence model with 2- and 3-cycle constraints.
    Cycles,
    /// Precedence model with rank variables.
    Ranks,
    /// Cycle cut generation master seeded with short cycles.
    CcgMaster,
    /// Witness master problem.
    Mp2,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Ip,
        ModelKind::MinNodesIp,
        ModelKind::Cycles,
        ModelKind::Ranks,
        ModelKind::CcgMaster,
        ModelKind::Mp2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Ip => "ip",
            ModelKind::MinNodesIp => "minnodes",
            ModelKind::Cycles => "cycles",
            ModelKind::Ranks => "ranks",
            ModelKind::CcgMaster => "ccg",
            ModelKind::Mp2 => "mp2",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown model {0:?}")]
pub struct UnknownModel(pub String);

impl FromStr for ModelKind {
    type Err = UnknownModel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase())
            .ok_or_else(|| UnknownModel(s.into()))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExportOptions {
    /// One rank labeling per extendable `K`-clique instead of all `K!`.
    pub unordered_cliques: bool,
}

/// Size of one variable or constraint family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyCount {
    pub family: &'static str,
    /// Rows or columns actually written.
    pub emitted: u64,
    /// Closed form of the family as formulated.
    pub expected: u64,
    /// The summary table's formula, where it lists the family.
    pub published: Option<u64>,
}

impl FamilyCount {
    pub fn matches_published(&self) -> bool {
        self.published.is_none_or(|p| p == self.emitted)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSummary {
    pub model: ModelKind,
    pub variables: Vec<FamilyCount>,
    pub constraints: Vec<FamilyCount>,
    /// Set when a clique-indexed model has no clique to choose.
    pub warning: Option<String>,
}

impl ModelSummary {
    pub fn families(&self) -> impl Iterator<Item = (&'static str, &FamilyCount)> {
        self.variables
            .iter()
            .map(|f| ("variable", f))
            .chain(self.constraints.iter().map(|f| ("constraint", f)))
    }

    /// Families whose emitted size differs from the published formula.
    pub fn published_mismatches(&self) -> Vec<&'static str> {
        self.families()
            .filter(|(_, f)| !f.matches_published())
            .map(|(_, f)| f.family)
            .collect()
    }

    /// `model,kind,family,emitted,expected,published` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,kind,family,emitted,expected,published\n");
        for (kind, f) in self.families() {
            let published = f.published.map(|p| p.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{kind},{},{},{},{published}\n",
                self.model, f.family, f.emitted, f.expected
            ));
        }
        out
    }
}

/// Instance sizes the closed forms are written in.
struct Sizes {
    n: u64,
    m: u64,
    k: u64,
    labels: u64,
    triangles: u64,
}

impl Sizes {
    fn of(inst: &Instance, opts: &ExportOptions) -> Self {
        Self {
            n: inst.n() as u64,
            m: inst.num_edges() as u64,
            k: inst.k() as u64,
            labels: clique_labels(inst, opts).len() as u64,
            triangles: enumerate_cliques(inst, 3).len() as u64,
        }
    }
}

/// `(family, expected, published)` for every family of a model.
type Forms = (
    Vec<(&'static str, u64, Option<u64>)>,
    Vec<(&'static str, u64, Option<u64>)>,
);

fn closed_forms(kind: ModelKind, s: &Sizes) -> Forms {
    let Sizes {
        n,
        m,
        k,
        labels,
        triangles,
    } = *s;
    let non_edges = n * (n - 1) / 2 - m;
    match kind {
        ModelKind::Ip | ModelKind::MinNodesIp => {
            let mut vars = vec![
                ("y", n, Some(n)),
                ("x", n * n, Some(n * n)),
                ("z", n * (n - k), None),
            ];
            let mut cons = vec![
                ("assignment", 2 * n, Some(2 * n)),
                ("clique", n * n, Some(n * n)),
                ("fixing", k + 1, Some(k + 1)),
                ("linking", 2 * n * (n - k), Some(2 * (n * n - k - 1))),
            ];
            if kind == ModelKind::MinNodesIp {
                vars.push(("m", n, None));
                cons.push(("nodes_fixing", k, None));
                cons.push(("nodes_increase", n - k, None));
                cons.push(("nodes_double", n - k, None));
            }
            (vars, cons)
        }
        ModelKind::Cycles => (
            vec![
                ("y", n, Some(n)),
                ("kappa", labels, Some(n)),
                ("p", n * (n - 1), Some(n * n)),
            ],
            vec![
                (
                    "linear_ordering",
                    n * (n - 1) / 2 + 2 * m * (n - 2),
                    Some(n * n + n * n * m),
                ),
                ("clique_selection", 1, Some(1)),
                ("linking", n, Some(n)),
            ],
        ),
        ModelKind::Ranks => (
            vec![
                ("y", n, Some(n)),
                ("kappa", labels, Some(n)),
                ("p", 2 * m, Some(2 * m)),
                ("r", n, Some(n)),
            ],
            vec![
                ("linear_ordering", 2 * m, Some(m)),
                ("clique_selection", 1, Some(1)),
                ("linking", n, Some(n)),
            ],
        ),
        ModelKind::CcgMaster => (
            vec![
                ("y", n, Some(n)),
                ("kappa", labels, Some(n)),
                ("p", 2 * m, Some(2 * m)),
            ],
            vec![
                ("clique_selection", 1, Some(1)),
                ("linking", n, Some(n)),
                ("cycle_breaking", m + 2 * triangles, None),
            ],
        ),
        ModelKind::Mp2 => (
            vec![
                ("y", n, Some(n)),
                ("kappa", n, Some(n)),
                ("w", 2 * m, Some(2 * m)),
            ],
            vec![
                ("clique_selection", 1, Some(1)),
                (
                    "clique_witness",
                    non_edges + 2 * m,
                    Some(n * (n - 1) / 2 + m),
                ),
                ("witness", n, Some(n)),
            ],
        ),
    }
}

/// Families where the published formula does not count the model as
/// written: the table's linking count for the vertex-rank IP, the
/// clique-variable count of the precedence models (listed per vertex), the
/// diagonal in the cycles model's precedence count, and both linear
/// ordering counts.
pub fn known_published_mismatches(kind: ModelKind) -> &'static [&'static str] {
    match kind {
        ModelKind::Ip | ModelKind::MinNodesIp => &["linking"],
        ModelKind::Cycles => &["kappa", "p", "linear_ordering"],
        ModelKind::Ranks => &["kappa", "linear_ordering"],
        ModelKind::CcgMaster => &["kappa"],
        ModelKind::Mp2 => &[],
    }
}

/// Published clique-constraint counts of the constraint programming models,
/// which are not exported.
pub fn cp_clique_constraint_count(inst: &Instance, f: Formulation) -> Option<u64> {
    let n = inst.n() as u64;
    let m = inst.num_edges() as u64;
    let k = inst.k() as u64;
    match f {
        Formulation::CpRank => Some(n * (n - 1) / 2 - m),
        Formulation::CpVertex => Some(k * (k + 1) / 2),
        Formulation::CpCombined => Some((n * (n - 1) + k * (k + 1)) / 2 - m),
        Formulation::Ip => None,
    }
}

/// Ordered `K`-cliques extendable to a `(K+1)`-clique; entry `i` of a
/// labeling has clique rank `i + 1`.
pub fn clique_labels(inst: &Instance, opts: &ExportOptions) -> Vec<Vec<usize>> {
    let k = inst.k();
    let mut base: BTreeSet<Vec<usize>> = BTreeSet::new();
    for c in enumerate_cliques(inst, k + 1) {
        for skip in 0..=k {
            base.insert(
                c.members
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect(),
            );
        }
    }
    let mut out = Vec::new();
    for c in base {
        if opts.unordered_cliques {
            out.push(c);
        } else {
            permutations(&c, &mut out);
        }
    }
    out
}

/// Lexicographic permutations of a sorted slice.
fn permutations(items: &[usize], out: &mut Vec<Vec<usize>>) {
    let mut p = items.to_vec();
    loop {
        out.push(p.clone());
        let Some(i) = (0..p.len().saturating_sub(1))
            .rev()
            .find(|&i| p[i] < p[i + 1])
        else {
            return;
        };
        let j = (i + 1..p.len())
            .rev()
            .find(|&j| p[j] > p[i])
            .expect("successor exists");
        p.swap(i, j);
        p[i + 1..].reverse();
    }
}

fn x(v: usize, r: usize) -> String {
    format!("x_{v}_{r}")
}
fn z(v: usize, r: usize) -> String {
    format!("z_{v}_{r}")
}
fn y(i: usize) -> String {
    format!("y_{i}")
}
fn p(u: usize, v: usize) -> String {
    format!("p_{u}_{v}")
}
fn kappa(c: usize) -> String {
    format!("kappa_{c}")
}
fn w(v: usize, u: usize) -> String {
    format!("w_{v}_{u}")
}
fn mr(r: usize) -> String {
    format!("m_{r}")
}
fn rank(v: usize) -> String {
    format!("r_{v}")
}

/// Builds the model and its size summary.
pub fn build(inst: &Instance, kind: ModelKind, opts: &ExportOptions) -> (Model, ModelSummary) {
    let mut model = Model {
        comments: vec![
            format!("model {kind}"),
            format!("instance {}", inst.name),
            format!("n {} m {} K {}", inst.n(), inst.num_edges(), inst.k()),
        ],
        ..Model::default()
    };
    let mut var_counts: Vec<(&'static str, u64)> = Vec::new();
    let mut con_counts: Vec<(&'static str, u64)> = Vec::new();
    let mut warning = None;
    {
        let mut b = Builder {
            model: &mut model,
            var_counts: &mut var_counts,
            con_counts: &mut con_counts,
        };
        match kind {
            ModelKind::Ip | ModelKind::MinNodesIp => vertex_rank(inst, kind, &mut b),
            ModelKind::Cycles | ModelKind::Ranks | ModelKind::CcgMaster => {
                let labels = clique_labels(inst, opts);
                if labels.is_empty() {
                    warning = Some(format!(
                        "no {}-clique extends to a {}-clique",
                        inst.k(),
                        inst.k() + 1
                    ));
                }
                precedence(inst, kind, &labels, &mut b);
            }
            ModelKind::Mp2 => witness_master(inst, &mut b),
        }
    }
    if let Some(w) = &warning {
        model
            .comments
            .push(format!("warning: {w}; model is infeasible"));
    }
    let (vf, cf) = closed_forms(kind, &Sizes::of(inst, opts));
    let attach = |forms: Vec<(&'static str, u64, Option<u64>)>, counts: &[(&'static str, u64)]| {
        forms
            .into_iter()
            .map(|(family, expected, published)| FamilyCount {
                family,
                emitted: counts
                    .iter()
                    .filter(|(f, _)| *f == family)
                    .map(|(_, c)| c)
                    .sum(),
                expected,
                published,
            })
            .collect()
    };
    let summary = ModelSummary {
        model: kind,
        variables: attach(vf, &var_counts),
        constraints: attach(cf, &con_counts),
        warning,
    };
    (model, summary)
}

/// LP text and size summary.
pub fn export(inst: &Instance, kind: ModelKind, opts: &ExportOptions) -> (String, ModelSummary) {
    let (model, summary) = build(inst, kind, opts);
    (model.to_lp(), summary)
}

/// Whether every family has the size its closed form predicts, and the
/// summary's published figures are the table's formulas for this instance.
pub fn verify_counts(summary: &ModelSummary, inst: &Instance, opts: &ExportOptions) -> bool {
    let (vf, cf) = closed_forms(summary.model, &Sizes::of(inst, opts));
    let check = |forms: Vec<(&'static str, u64, Option<u64>)>, got: &[FamilyCount]| {
        forms.len() == got.len()
            && forms
                .iter()
                .zip(got)
                .all(|(&(family, expected, published), f)| {
                    f.family == family
                        && f.expected == expected
                        && f.emitted == expected
                        && f.published == published
                })
    };
    check(vf, &summary.variables) && check(cf, &summary.constraints)
}

struct Builder<'a> {
    model: &'a mut Model,
    var_counts: &'a mut Vec<(&'static str, u64)>,
    con_counts: &'a mut Vec<(&'static str, u64)>,
}

impl Builder<'_> {
    fn binary(&mut self, family: &'static str, name: String) {
        self.model.binary(name);
        self.var_counts.push((family, 1));
    }

    fn integer(&mut self, family: &'static str, name: String, lower: i128, upper: Option<i128>) {
        self.model.integer(name, lower, upper);
        self.var_counts.push((family, 1));
    }

    fn row(
        &mut self,
        family: &'static str,
        name: String,
        terms: Vec<(i128, String)>,
        sense: Sense,
        rhs: i128,
    ) {
        self.model.add(name, terms, sense, rhs);
        self.con_counts.push((family, 1));
    }
}

fn vertex_rank(inst: &Instance, kind: ModelKind, b: &mut Builder<'_>) {
    let n = inst.n();
    let k = inst.k();
    for r in 0..n {
        b.binary("y", y(r));
    }
    for v in 0..n {
        for r in 0..n {
            b.binary("x", x(v, r));
        }
    }
    for v in 0..n {
        for r in k..n {
            b.binary("z", z(v, r));
        }
    }
    if kind == ModelKind::MinNodesIp {
        for r in 0..n {
            b.integer("m", mr(r), 0, None);
        }
        b.model.objective = (0..n).map(|r| (1, mr(r))).collect();
    } else {
        b.model.objective = (0..n).map(|r| (1, y(r))).collect();
    }

    for v in 0..n {
        b.row(
            "assignment",
            format!("vertex_{v}"),
            (0..n).map(|r| (1, x(v, r))).collect(),
            Sense::Eq,
            1,
        );
    }
    for r in 0..n {
        b.row(
            "assignment",
            format!("rank_{r}"),
            (0..n).map(|v| (1, x(v, r))).collect(),
            Sense::Eq,
            1,
        );
    }
    // Adjacent predecessors of v if placed at r.
    let preds = |v: usize, r: usize| -> Vec<(i128, String)> {
        inst.neighbors(v)
            .flat_map(|u| (0..r).map(move |j| (1, x(u, j))))
            .collect()
    };
    // Rank 0 rows are vacuous; they are kept so the family has n^2 rows.
    for v in 0..n {
        for r in 0..=k {
            let mut t = preds(v, r);
            t.push((-(r as i128), x(v, r)));
            b.row("clique", format!("clique_{v}_{r}"), t, Sense::Ge, 0);
        }
        for r in k + 1..n {
            let mut t = preds(v, r);
            t.push((-(k as i128), x(v, r)));
            b.row("clique", format!("pred_{v}_{r}"), t, Sense::Ge, 0);
        }
    }
    for r in 0..k {
        b.row(
            "fixing",
            format!("single_{r}"),
            vec![(1, y(r))],
            Sense::Eq,
            0,
        );
    }
    b.row(
        "fixing",
        format!("double_{k}"),
        vec![(1, y(k))],
        Sense::Eq,
        1,
    );
    for v in 0..n {
        for r in k..n {
            let mut t = preds(v, r);
            t.push((-(k as i128 + 1), z(v, r)));
            b.row("linking", format!("nondouble_{v}_{r}"), t, Sense::Ge, 0);
            b.row(
                "linking",
                format!("indicator_{v}_{r}"),
                vec![(1, x(v, r)), (-1, y(r)), (-1, z(v, r))],
                Sense::Le,
                0,
            );
        }
    }
    if kind == ModelKind::MinNodesIp {
        for r in 0..k {
            b.row(
                "nodes_fixing",
                format!("nodes_{r}"),
                vec![(1, mr(r))],
                Sense::Eq,
                1,
            );
        }
        for r in k..n {
            b.row(
                "nodes_increase",
                format!("grow_{r}"),
                vec![(1, mr(r)), (-1, mr(r - 1))],
                Sense::Ge,
                0,
            );
        }
        // m_r >= 2 m_{r-1} whenever rank r is double.
        for r in k..n {
            let big = 1i128 << (r - k);
            b.row(
                "nodes_double",
                format!("branch_{r}"),
                vec![(1, mr(r)), (-2, mr(r - 1)), (-big, y(r))],
                Sense::Ge,
                -big,
            );
        }
    }
}

fn precedence(inst: &Instance, kind: ModelKind, labels: &[Vec<usize>], b: &mut Builder<'_>) {
    let n = inst.n();
    let k = inst.k();
    for (c, l) in labels.iter().enumerate() {
        b.model.comments.push(format!(
            "{} = ({})",
            kappa(c),
            l.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ));
    }
    for v in 0..n {
        b.binary("y", y(v));
    }
    for c in 0..labels.len() {
        b.binary("kappa", kappa(c));
    }
    let arcs: Vec<(usize, usize)> = if kind == ModelKind::Cycles {
        (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect()
    } else {
        let mut a: Vec<(usize, usize)> = inst
            .edges()
            .iter()
            .flat_map(|&(u, v)| [(u, v), (v, u)])
            .collect();
        a.sort_unstable();
        a
    };
    for &(i, j) in &arcs {
        b.binary("p", p(i, j));
    }
    if kind == ModelKind::Ranks {
        for v in 0..n {
            b.integer("r", rank(v), 0, Some(n as i128 - 1));
        }
    }
    b.model.objective = (0..n).map(|v| (1, y(v))).collect();
    b.model.objective_constant = -(k as i128);

    match kind {
        ModelKind::Cycles => {
            for i in 0..n {
                for j in i + 1..n {
                    b.row(
                        "linear_ordering",
                        format!("tour_{i}_{j}"),
                        vec![(1, p(i, j)), (1, p(j, i))],
                        Sense::Eq,
                        1,
                    );
                }
            }
            for &(i, j) in inst.edges() {
                for (a, c) in [(i, j), (j, i)] {
                    for l in (0..n).filter(|&l| l != i && l != j) {
                        b.row(
                            "linear_ordering",
                            format!("tri_{a}_{c}_{l}"),
                            vec![(1, p(a, c)), (1, p(c, l)), (1, p(l, a))],
                            Sense::Le,
                            2,
                        );
                    }
                }
            }
        }
        ModelKind::Ranks => {
            for &(i, j) in &arcs {
                b.row(
                    "linear_ordering",
                    format!("order_{i}_{j}"),
                    vec![(n as i128, p(i, j)), (1, rank(i)), (-1, rank(j))],
                    Sense::Le,
                    n as i128 - 1,
                );
            }
        }
        _ => {}
    }
    b.row(
        "clique_selection",
        "one_clique".into(),
        (0..labels.len()).map(|c| (1, kappa(c))).collect(),
        Sense::Eq,
        1,
    );
    // Predecessor sum uses p_ji (j before i).
    for i in 0..n {
        let mut t: Vec<(i128, String)> = inst.neighbors(i).map(|j| (1, p(j, i))).collect();
        for (c, l) in labels.iter().enumerate() {
            if let Some(pos) = l.iter().position(|&v| v == i) {
                t.push(((k - pos) as i128, kappa(c)));
            }
        }
        t.push((1, y(i)));
        b.row("linking", format!("link_{i}"), t, Sense::Ge, k as i128 + 1);
    }
    if kind == ModelKind::CcgMaster {
        for &(i, j) in inst.edges() {
            b.row(
                "cycle_breaking",
                format!("cyc2_{i}_{j}"),
                vec![(1, p(i, j)), (1, p(j, i))],
                Sense::Le,
                1,
            );
        }
        for t in enumerate_cliques(inst, 3) {
            let [a, c, d] = [t.members[0], t.members[1], t.members[2]];
            for (u, v, w) in [(a, c, d), (a, d, c)] {
                b.row(
                    "cycle_breaking",
                    format!("cyc3_{u}_{v}_{w}"),
                    vec![(1, p(u, v)), (1, p(v, w)), (1, p(w, u))],
                    Sense::Le,
                    2,
                );
            }
        }
    }
}

fn witness_master(inst: &Instance, b: &mut Builder<'_>) {
    let n = inst.n();
    let k = inst.k() as i128;
    for v in 0..n {
        b.binary("y", y(v));
    }
    for v in 0..n {
        b.binary("kappa", kappa(v));
    }
    for v in 0..n {
        for u in inst.neighbors(v) {
            b.binary("w", w(v, u));
        }
    }
    b.model.objective = (0..n).map(|v| (1, y(v))).collect();
    b.model.objective_constant = 1;
    b.row(
        "clique_selection",
        "clique_size".into(),
        (0..n).map(|v| (1, kappa(v))).collect(),
        Sense::Eq,
        k + 1,
    );
    for v in 0..n {
        for u in v + 1..n {
            if !inst.adjacent(u, v) {
                b.row(
                    "clique_witness",
                    format!("nonadj_{v}_{u}"),
                    vec![(1, kappa(v)), (1, kappa(u))],
                    Sense::Le,
                    1,
                );
            }
        }
    }
    for v in 0..n {
        for u in inst.neighbors(v) {
            b.row(
                "clique_witness",
                format!("witnessed_{u}_{v}"),
                vec![(1, kappa(v)), (-1, w(u, v))],
                Sense::Le,
                0,
            );
        }
    }
    // sum_u w_vu = (K+1)(1 - kappa_v) - y_v + K kappa_v
    for v in 0..n {
        let mut t: Vec<(i128, String)> = inst.neighbors(v).map(|u| (1, w(v, u))).collect();
        t.push((1, y(v)));
        t.push((1, kappa(v)));
        b.row("witness", format!("witnesses_{v}"), t, Sense::Eq, k + 1);
    }
}

/// The assignment a DVOP order induces for a model's variables.
pub fn assignment_for_order(
    inst: &Instance,
    kind: ModelKind,
    ord: &VertexOrder,
    opts: &ExportOptions,
) -> Assignment {
    let n = inst.n();
    let k = inst.k();
    let report = check_order(inst, ord).expect("order matches the instance");
    let mut a = Assignment::new();
    let mut set = |name: String, value: i128| {
        a.insert(name, value);
    };
    match kind {
        ModelKind::Ip | ModelKind::MinNodesIp => {
            let counts = report.doubles.node_counts(k);
            for r in 0..n {
                let v = ord.vertex_at(r);
                let dbl = report.doubles.bits[r];
                set(y(r), dbl as i128);
                set(x(v, r), 1);
                if r >= k && !dbl {
                    set(z(v, r), 1);
                }
                if kind == ModelKind::MinNodesIp {
                    set(mr(r), counts[r] as i128);
                }
            }
        }
        ModelKind::Cycles | ModelKind::Ranks | ModelKind::CcgMaster => {
            let first: Vec<usize> = ord.perm()[..k].to_vec();
            if let Some(c) = clique_labels(inst, opts).iter().position(|l| *l == first) {
                set(kappa(c), 1);
            }
            for v in 0..n {
                let r = ord.rank_of(v);
                let dbl = r < k || report.doubles.bits[r];
                set(y(v), dbl as i128);
                if kind == ModelKind::Ranks {
                    set(rank(v), r as i128);
                }
                for u in 0..n {
                    if u != v
                        && (kind == ModelKind::Cycles || inst.adjacent(u, v))
                        && ord.rank_of(u) < r
                    {
                        set(p(u, v), 1);
                    }
                }
            }
        }
        ModelKind::Mp2 => {
            let s = crate::witness::induced_state(inst, ord);
            for v in 0..n {
                set(y(v), s.doubles[v] as i128);
                set(kappa(v), s.in_clique(v) as i128);
                for u in crate::graph::members(s.witnesses[v]) {
                    set(w(v, u), 1);
                }
            }
        }
    }
    a
}
