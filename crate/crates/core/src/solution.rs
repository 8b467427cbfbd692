//! Solver results, statistics, deadlines and the solution text format.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::order::{DoublePattern, VertexOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    MinDouble,
    MinNodes,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::MinDouble => "double",
            Objective::MinNodes => "nodes",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Optimal,
    Infeasible,
    Timeout,
    /// The task failed before producing a result (harness only).
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "OPTIMAL",
            Status::Infeasible => "INFEASIBLE",
            Status::Timeout => "TIMEOUT",
            Status::Error => "ERROR",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown status `{0}`")]
pub struct UnknownStatus(pub String);

impl FromStr for Status {
    type Err = UnknownStatus;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "OPTIMAL" => Ok(Status::Optimal),
            "INFEASIBLE" => Ok(Status::Infeasible),
            "TIMEOUT" => Ok(Status::Timeout),
            "ERROR" => Ok(Status::Error),
            other => Err(UnknownStatus(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stats {
    /// Search nodes of the branch-and-bound (choice points).
    pub choice_points: u64,
    pub time_ms: f64,
    pub cuts: usize,
    pub iterations: usize,
    pub cliques_considered: usize,
    /// Time spent extracting irreducible infeasible subsets.
    pub iis_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: Status,
    /// Objective of the returned order (doubles or total nodes).
    pub objective: Option<u128>,
    pub order: Option<VertexOrder>,
    pub doubles: Option<DoublePattern>,
    /// Double count and total node count of `order`.
    pub double_count: Option<usize>,
    pub total_nodes: Option<u128>,
    pub stats: Stats,
}

impl Solution {
    pub fn infeasible(stats: Stats) -> Self {
        Self {
            status: Status::Infeasible,
            objective: None,
            order: None,
            doubles: None,
            double_count: None,
            total_nodes: None,
            stats,
        }
    }

    /// Renders the `s` / `o` / `d` lines. Missing values print as `-`.
    pub fn to_text(&self) -> String {
        let dc = self
            .double_count
            .map_or_else(|| "-".to_string(), |d| d.to_string());
        let tn = self
            .total_nodes
            .map_or_else(|| "-".to_string(), |t| t.to_string());
        let mut out = format!("s {} {dc} {tn}\n", self.status);
        match (&self.order, &self.doubles) {
            (Some(ord), Some(pat)) => {
                let perm: Vec<String> = ord.perm().iter().map(|v| v.to_string()).collect();
                out.push_str(&format!("o {}\n", perm.join(" ")));
                out.push_str(&format!("d {}\n", pat.to_line()));
            }
            _ => out.push_str("o -\nd -\n"),
        }
        out
    }
}

/// Cooperative wall-clock limit polled by the solvers.
#[derive(Debug, Clone, Copy)]
pub struct Deadline {
    start: Instant,
    limit: Option<Duration>,
}

impl Deadline {
    pub fn new(limit: Option<Duration>) -> Self {
        Self {
            start: Instant::now(),
            limit,
        }
    }

    pub fn none() -> Self {
        Self::new(None)
    }

    pub fn expired(&self) -> bool {
        self.limit.is_some_and(|l| self.start.elapsed() >= l)
    }

    pub fn elapsed_ms(&self) -> f64 {
        self.start.elapsed().as_secs_f64() * 1e3
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_round_trip() {
        for s in [
            Status::Optimal,
            Status::Infeasible,
            Status::Timeout,
            Status::Error,
        ] {
            assert_eq!(s.to_string().parse::<Status>().unwrap(), s);
        }
        assert!("DONE".parse::<Status>().is_err());
    }

    #[test]
    fn infeasible_text() {
        let s = Solution::infeasible(Stats::default());
        assert_eq!(s.to_text(), "s INFEASIBLE - -\no -\nd -\n");
    }

    #[test]
    fn zero_deadline_expires() {
        assert!(Deadline::new(Some(Duration::ZERO)).expired());
        assert!(!Deadline::none().expired());
    }
}
