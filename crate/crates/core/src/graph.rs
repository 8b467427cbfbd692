//! Undirected instance graphs: parsing, rendering, clique enumeration and
//! degree queries.
//!
//! Vertices are dense `0..n` indices. Neighbourhoods are stored as `u128`
//! bitmasks, so an instance holds at most [`MAX_VERTICES`] vertices.

use std::fmt::Write as _;

use thiserror::Error;

/// Hard upper bound on the vertex count (one bit per vertex in a `u128`).
pub const MAX_VERTICES: usize = 128;

/// Set of vertices as a bitmask.
pub type VertexSet = u128;

#[inline]
pub fn bit(v: usize) -> VertexSet {
    1u128 << v
}

/// Iterates the members of a vertex set in increasing order.
pub fn members(mut set: VertexSet) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if set == 0 {
            None
        } else {
            let v = set.trailing_zeros() as usize;
            set &= set - 1;
            Some(v)
        }
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("missing `p dvop <n> <m> <K>` header")]
    MissingHeader,
    #[error("line {line}: malformed edge line")]
    MalformedEdge { line: usize },
    #[error("line {line}: unknown line type `{tag}`")]
    UnknownLine { line: usize, tag: String },
    #[error("line {line}: vertex {vertex} out of range 0..{n}")]
    VertexOutOfRange {
        line: usize,
        vertex: usize,
        n: usize,
    },
    #[error("line {line}: duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: self-loop on vertex {v}")]
    SelfLoop { line: usize, v: usize },
    #[error("header announces {expected} edges but {found} were given")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("dimension K={k} must satisfy 0 < K < n={n}")]
    InvalidDimension { k: usize, n: usize },
    #[error("{n} vertices exceeds the supported maximum of {MAX_VERTICES}")]
    TooManyVertices { n: usize },
}

/// A problem instance: a connected simple graph plus the embedding
/// dimension `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    k: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<VertexSet>,
    pub name: String,
    /// Free-form `c` lines carried through parse/render (excluding `c name`).
    pub comments: Vec<String>,
}

impl Instance {
    /// Builds an instance from an edge list, enforcing every invariant the
    /// file parser enforces. Edge endpoints may come in either order.
    pub fn new(
        n: usize,
        k: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, ParseError> {
        let mut builder = Builder::new(n)?;
        for (i, (u, v)) in edges.into_iter().enumerate() {
            builder.add_edge(u, v, i + 1)?;
        }
        builder.finish(k)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Embedding dimension `K`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Edges as `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u] & bit(v) != 0
    }

    /// Neighbourhood of `v` as a bitmask.
    #[inline]
    pub fn neighbor_set(&self, v: usize) -> VertexSet {
        self.adj[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> {
        members(self.adj[v])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    /// All vertices as a bitmask.
    pub fn all_vertices(&self) -> VertexSet {
        if self.n == MAX_VERTICES {
            VertexSet::MAX
        } else {
            bit(self.n) - 1
        }
    }

    /// Edge density `2|E| / (n (n-1))`.
    pub fn density(&self) -> f64 {
        let n = self.n as f64;
        2.0 * self.edges.len() as f64 / (n * (n - 1.0))
    }

    /// Row-major adjacency matrix.
    pub fn adjacency_matrix(&self) -> Vec<Vec<bool>> {
        (0..self.n)
            .map(|u| (0..self.n).map(|v| self.adjacent(u, v)).collect())
            .collect()
    }

    /// True when every pair in `set` is adjacent.
    pub fn is_clique(&self, set: VertexSet) -> bool {
        members(set).all(|v| (set & !bit(v)) & !self.adj[v] == 0)
    }

    /// Renders the instance in the line-oriented text format.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if !self.name.is_empty() {
            let _ = writeln!(out, "c name {}", self.name);
        }
        for c in &self.comments {
            let _ = writeln!(out, "c {c}");
        }
        let _ = writeln!(out, "p dvop {} {} {}", self.n, self.edges.len(), self.k);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "e {u} {v}");
        }
        out
    }
}

struct Builder {
    n: usize,
    adj: Vec<VertexSet>,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    fn new(n: usize) -> Result<Self, ParseError> {
        if n > MAX_VERTICES {
            return Err(ParseError::TooManyVertices { n });
        }
        Ok(Self {
            n,
            adj: vec![0; n],
            edges: Vec::new(),
        })
    }

    fn add_edge(&mut self, u: usize, v: usize, line: usize) -> Result<(), ParseError> {
        for vertex in [u, v] {
            if vertex >= self.n {
                return Err(ParseError::VertexOutOfRange {
                    line,
                    vertex,
                    n: self.n,
                });
            }
        }
        if u == v {
            return Err(ParseError::SelfLoop { line, v });
        }
        let (u, v) = (u.min(v), u.max(v));
        if self.adj[u] & bit(v) != 0 {
            return Err(ParseError::DuplicateEdge { line, u, v });
        }
        self.adj[u] |= bit(v);
        self.adj[v] |= bit(u);
        self.edges.push((u, v));
        Ok(())
    }

    fn finish(mut self, k: usize) -> Result<Instance, ParseError> {
        if k == 0 || k >= self.n {
            return Err(ParseError::InvalidDimension { k, n: self.n });
        }
        if !connected(&self.adj) {
            return Err(ParseError::Disconnected);
        }
        self.edges.sort_unstable();
        Ok(Instance {
            n: self.n,
            k,
            edges: self.edges,
            adj: self.adj,
            name: String::new(),
            comments: Vec::new(),
        })
    }
}

fn connected(adj: &[VertexSet]) -> bool {
    let n = adj.len();
    if n == 0 {
        return true;
    }
    let mut seen: VertexSet = 1;
    let mut frontier: VertexSet = 1;
    while frontier != 0 {
        let mut next = 0;
        for v in members(frontier) {
            next |= adj[v];
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen.count_ones() as usize == n
}

/// Parses the `p dvop` instance format.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut builder: Option<Builder> = None;
    let mut name = String::new();
    let mut comments = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let tag = tokens.next().unwrap_or_default();
        match tag {
            "c" => {
                let rest = trimmed[1..].trim();
                if let Some(label) = rest.strip_prefix("name ") {
                    name = label.trim().to_string();
                } else if !rest.is_empty() {
                    comments.push(rest.to_string());
                }
            }
            "p" => {
                if header.is_some() {
                    return Err(ParseError::MalformedHeader {
                        line,
                        reason: "more than one header line".into(),
                    });
                }
                let fields: Vec<&str> = tokens.collect();
                if fields.len() != 4 || fields[0] != "dvop" {
                    return Err(ParseError::MalformedHeader {
                        line,
                        reason: "expected `p dvop <n> <m> <K>`".into(),
                    });
                }
                let parse = |s: &str| {
                    s.parse::<usize>().map_err(|_| ParseError::MalformedHeader {
                        line,
                        reason: format!("`{s}` is not a non-negative integer"),
                    })
                };
                let (n, m, k) = (parse(fields[1])?, parse(fields[2])?, parse(fields[3])?);
                builder = Some(Builder::new(n)?);
                header = Some((n, m, k));
            }
            "e" => {
                let b = builder.as_mut().ok_or(ParseError::MissingHeader)?;
                let fields: Vec<usize> = tokens
                    .map(|t| t.parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| ParseError::MalformedEdge { line })?;
                if fields.len() != 2 {
                    return Err(ParseError::MalformedEdge { line });
                }
                b.add_edge(fields[0], fields[1], line)?;
            }
            other => {
                return Err(ParseError::UnknownLine {
                    line,
                    tag: other.to_string(),
                })
            }
        }
    }

    let (_, m, k) = header.ok_or(ParseError::MissingHeader)?;
    let builder = builder.ok_or(ParseError::MissingHeader)?;
    if builder.edges.len() != m {
        return Err(ParseError::EdgeCountMismatch {
            expected: m,
            found: builder.edges.len(),
        });
    }
    let mut inst = builder.finish(k)?;
    inst.name = name;
    inst.comments = comments;
    Ok(inst)
}

/// A clique, members sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clique {
    pub members: Vec<usize>,
}

impl Clique {
    pub fn as_set(&self) -> VertexSet {
        self.members.iter().fold(0, |acc, &v| acc | bit(v))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Enumerates every clique of exactly `size` vertices, in lexicographic
/// order of the sorted member lists.
///
/// Each clique is grown from its smallest member using only larger
/// candidates, so every clique is produced exactly once.
pub fn enumerate_cliques(inst: &Instance, size: usize) -> Vec<Clique> {
    let mut out = Vec::new();
    for_each_clique(inst, size, |members| {
        out.push(Clique {
            members: members.to_vec(),
        });
        true
    });
    out
}

/// Streams cliques of exactly `size` vertices in lexicographic order. The
/// callback returns `false` to stop early. Returns the number visited.
pub fn for_each_clique(inst: &Instance, size: usize, mut f: impl FnMut(&[usize]) -> bool) -> usize {
    if size == 0 || size > inst.n() {
        return 0;
    }
    let mut stack = Vec::with_capacity(size);
    let mut count = 0;
    extend(
        inst,
        size,
        &mut stack,
        inst.all_vertices(),
        &mut count,
        &mut f,
    );
    count
}

fn extend(
    inst: &Instance,
    size: usize,
    current: &mut Vec<usize>,
    candidates: VertexSet,
    count: &mut usize,
    f: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if current.len() == size {
        *count += 1;
        return f(current);
    }
    let missing = size - current.len();
    let mut rest = candidates;
    while rest.count_ones() as usize >= missing {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        current.push(v);
        let keep_going = extend(inst, size, current, rest & inst.neighbor_set(v), count, f);
        current.pop();
        if !keep_going {
            return false;
        }
    }
    true
}

/// Minimum vertex degree.
pub fn min_degree(inst: &Instance) -> usize {
    (0..inst.n()).map(|v| inst.degree(v)).min().unwrap_or(0)
}

/// The graphs used as worked examples throughout the test-suites.
pub mod fixtures {
    use super::Instance;

    /// Six vertices, eleven edges; feasible for `K = 2` only.
    pub fn six_vertex(k: usize) -> Instance {
        Instance::new(
            6,
            k,
            [
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (2, 4),
                (0, 2),
                (0, 5),
                (3, 5),
                (1, 3),
                (1, 5),
                (2, 5),
            ],
        )
        .expect("valid fixture")
        .with_name("six_vertex")
    }

    /// Six vertices, twelve edges; the witness-decomposition worked example.
    pub fn witness_example(k: usize) -> Instance {
        Instance::new(
            6,
            k,
            [
                (0, 1),
                (0, 2),
                (0, 3),
                (0, 4),
                (0, 5),
                (1, 2),
                (1, 3),
                (1, 4),
                (1, 5),
                (2, 4),
                (2, 5),
                (3, 5),
            ],
        )
        .expect("valid fixture")
        .with_name("witness_example")
    }

    pub fn complete(n: usize, k: usize) -> Instance {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Instance::new(n, k, edges)
            .expect("valid fixture")
            .with_name(format!("complete_{n}"))
    }

    pub fn path(n: usize, k: usize) -> Instance {
        Instance::new(n, k, (1..n).map(|v| (v - 1, v)))
            .expect("valid fixture")
            .with_name(format!("path_{n}"))
    }
}
