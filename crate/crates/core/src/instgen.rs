//! Seeded instance generators: independent-edge random graphs and sparse
//! synthetic graphs with a planted order.

use thiserror::Error;

use crate::graph::Instance;
use crate::order::DoublePattern;

/// Connectivity retries for [`gen_random`].
pub const MAX_RETRIES: u64 = 64;

/// 64-bit linear congruential generator.
#[derive(Debug, Clone)]
pub struct Rng {
    pub state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.state
    }

    /// Uniform-ish integer in `0..t` (plain modulo).
    pub fn uniform_int(&mut self, t: u64) -> u64 {
        self.next_u64() % t
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        ((self.next_u64() >> 11) as f64 / (1u64 << 53) as f64) < p
    }

    /// First `size` entries of a partial Fisher-Yates shuffle of `0..len`.
    pub fn sample(&mut self, len: usize, size: usize) -> Vec<usize> {
        let mut pool: Vec<usize> = (0..len).collect();
        for i in 0..size {
            let j = i + self.uniform_int((len - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(size);
        pool
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("invalid arguments: {0}")]
    InvalidArgs(String),
    #[error("no connected graph after {attempts} attempts from seed {seed}")]
    RetriesExhausted { seed: u64, attempts: u64 },
    #[error("cannot place {needed} noise edges: only {available} unmarked pairs are free")]
    NoiseUnplaceable { needed: usize, available: usize },
}

/// Each pair `{i, j}` becomes an edge with probability `density`.
/// Disconnected draws are redrawn from `seed + 1`, `seed + 2`, and so on.
pub fn gen_random(n: usize, density: f64, k: usize, seed: u64) -> Result<Instance, GenError> {
    if !(density > 0.0 && density < 1.0) {
        return Err(GenError::InvalidArgs(format!(
            "density {density} must lie strictly between 0 and 1"
        )));
    }
    if k == 0 || k >= n {
        return Err(GenError::InvalidArgs(format!("need 0 < K={k} < n={n}")));
    }
    if n > crate::graph::MAX_VERTICES {
        return Err(GenError::InvalidArgs(format!("n={n} is too large")));
    }
    for attempt in 0..MAX_RETRIES {
        let mut rng = Rng::new(seed.wrapping_add(attempt));
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.bernoulli(density) {
                    edges.push((i, j));
                }
            }
        }
        if let Ok(mut inst) = Instance::new(n, k, edges) {
            inst.name = format!("random_n{n}_d{density}_k{k}_s{seed}");
            inst.comments = vec![
                "generator random".into(),
                format!("seed {seed}"),
                format!("retries {attempt}"),
            ];
            return Ok(inst);
        }
    }
    Err(GenError::RetriesExhausted {
        seed,
        attempts: MAX_RETRIES,
    })
}

/// A synthetic instance together with its planted double pattern.
#[derive(Debug, Clone)]
pub struct Synthetic {
    pub instance: Instance,
    /// Ranks marked double during construction (the identity order's doubles).
    pub marks: DoublePattern,
    pub noise_edges: usize,
}

/// Planted construction: a clique on `0..=K`, then each later vertex gets
/// `K` (marked) or `K+1` (unmarked) random earlier neighbours, then
/// `ceil(noise * n)` extra edges between unmarked non-clique vertices.
pub fn gen_synthetic(
    k: usize,
    num_doubles: usize,
    noise: f64,
    n: usize,
    seed: u64,
) -> Result<Synthetic, GenError> {
    if k == 0 || k + 2 > n {
        return Err(GenError::InvalidArgs(format!(
            "need 0 < K={k} and K+2 <= n={n}"
        )));
    }
    if num_doubles == 0 || num_doubles > n - k - 1 {
        return Err(GenError::InvalidArgs(format!(
            "num_doubles={num_doubles} must lie in 1..={}",
            n - k - 1
        )));
    }
    if noise.is_nan() || noise < 0.0 {
        return Err(GenError::InvalidArgs(format!(
            "noise {noise} must be non-negative"
        )));
    }
    if n > crate::graph::MAX_VERTICES {
        return Err(GenError::InvalidArgs(format!("n={n} is too large")));
    }
    let mut rng = Rng::new(seed);
    let mut y = vec![false; n];
    y[k] = true;
    let mut marked = 1;
    while marked < num_doubles {
        let r = k + 1 + rng.uniform_int((n - k - 1) as u64) as usize;
        if !y[r] {
            y[r] = true;
            marked += 1;
        }
    }

    let mut adj = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    let mut add = |u: usize, v: usize, adj: &mut Vec<Vec<bool>>| {
        adj[u][v] = true;
        adj[v][u] = true;
        edges.push((u.min(v), u.max(v)));
    };
    for i in 0..=k {
        for j in i + 1..=k {
            add(i, j, &mut adj);
        }
    }
    for v in k + 1..n {
        let size = if y[v] { k } else { k + 1 };
        for u in rng.sample(v, size) {
            add(u, v, &mut adj);
        }
    }

    // Float products such as 0.15 * 20 land just above the integer.
    let needed = (noise * n as f64 - 1e-9).ceil().max(0.0) as usize;
    // Draw from the free pairs directly: the low bits of the generator cycle
    // quickly, so rejection sampling of endpoints can loop forever.
    let eligible: Vec<usize> = (k + 1..n).filter(|&v| !y[v]).collect();
    let mut free: Vec<(usize, usize)> = eligible
        .iter()
        .enumerate()
        .flat_map(|(i, &u)| eligible[i + 1..].iter().map(move |&v| (u, v)))
        .filter(|&(u, v)| !adj[u][v])
        .collect();
    if needed > free.len() {
        return Err(GenError::NoiseUnplaceable {
            needed,
            available: free.len(),
        });
    }
    for _ in 0..needed {
        let (u, v) = free.swap_remove(rng.uniform_int(free.len() as u64) as usize);
        add(u, v, &mut adj);
    }

    let marks = DoublePattern { bits: y };
    let mut inst = Instance::new(n, k, edges)
        .map_err(|e| GenError::InvalidArgs(format!("construction produced {e}")))?;
    inst.name = format!("synthetic_n{n}_k{k}_d{num_doubles}_z{noise}_s{seed}");
    inst.comments = vec![
        "generator synthetic".into(),
        format!("seed {seed}"),
        format!("marks {}", marks.to_line()),
    ];
    Ok(Synthetic {
        instance: inst,
        marks,
        noise_edges: needed,
    })
}
