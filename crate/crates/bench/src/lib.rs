//! Fixed instance sets shared by the benchmarks.

use dvop_core::{gen_random, gen_synthetic, Instance};

/// Dense random graphs with `K = 3`, seeds `seed..`, keeping the feasible
/// draws a solver would actually have to optimise over.
pub fn random_set(n: usize, density: f64, count: usize, seed: u64) -> Vec<Instance> {
    (seed..)
        .filter_map(|s| gen_random(n, density, 3, s).ok())
        .filter(|g| dvop_core::greedy_dvop(g).is_some())
        .take(count)
        .collect()
}

/// Synthetic graphs with a planted order; seeds without room for the
/// requested noise are skipped.
pub fn synthetic_set(k: usize, n: usize, doubles: usize, count: usize, seed: u64) -> Vec<Instance> {
    (seed..)
        .filter_map(|s| gen_synthetic(k, doubles, 0.1, n, s).ok())
        .map(|s| s.instance)
        .take(count)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sets_have_requested_size() {
        let r = random_set(10, 0.6, 3, 1);
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(|g| g.n() == 10 && g.k() == 3));
        assert_eq!(synthetic_set(3, 14, 3, 4, 1).len(), 4);
    }
}
