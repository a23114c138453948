//! The r-bond bootstrap percolation process: closure computation,
//! percolation testing, minimality testing.
//!
//! A healthy edge becomes infected once one of its endpoints is incident
//! with at least r infected edges; infected edges stay infected. The healthy
//! edge itself never counts toward its own threshold.

use crate::error::{Error, Result};
use crate::graph::Graph;

/// A set of edges of a fixed host graph, keyed by the host's edge order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSet {
    present: Vec<bool>,
}

impl EdgeSet {
    pub fn empty(host_edges: usize) -> Self {
        EdgeSet {
            present: vec![false; host_edges],
        }
    }

    pub fn full(host_edges: usize) -> Self {
        EdgeSet {
            present: vec![true; host_edges],
        }
    }

    pub fn from_indices(host_edges: usize, indices: &[usize]) -> Result<Self> {
        let mut s = EdgeSet::empty(host_edges);
        for &i in indices {
            if i >= host_edges {
                return Err(Error::NotAnEdge(format!("edge index {i}")));
            }
            s.present[i] = true;
        }
        Ok(s)
    }

    pub fn host_size(&self) -> usize {
        self.present.len()
    }

    pub fn contains(&self, e: usize) -> bool {
        self.present.get(e).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, e: usize) {
        self.present[e] = true;
    }

    pub fn remove(&mut self, e: usize) {
        self.present[e] = false;
    }

    pub fn len(&self) -> usize {
        self.present.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.present.iter().any(|&b| b)
    }

    pub fn indices(&self) -> Vec<usize> {
        self.present
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_subset_of(&self, other: &EdgeSet) -> bool {
        self.present
            .iter()
            .zip(&other.present)
            .all(|(&a, &b)| !a || b)
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet {
            present: self
                .present
                .iter()
                .zip(&other.present)
                .map(|(&a, &b)| a || b)
                .collect(),
        }
    }

    /// Resolves label pairs against the host's edge order.
    pub fn from_label_pairs(g: &Graph, pairs: &[(String, String)]) -> Result<EdgeSet> {
        let mut s = EdgeSet::empty(g.edge_count());
        for (a, b) in pairs {
            let ia = g
                .labels()
                .iter()
                .position(|l| l.to_string() == *a)
                .ok_or_else(|| Error::UnknownVertex(a.clone()))?;
            let ib = g
                .labels()
                .iter()
                .position(|l| l.to_string() == *b)
                .ok_or_else(|| Error::UnknownVertex(b.clone()))?;
            let e = g
                .edge_index(ia, ib)
                .ok_or_else(|| Error::NotAnEdge(format!("{a}-{b}")))?;
            s.insert(e);
        }
        Ok(s)
    }

    pub fn to_label_pairs(&self, g: &Graph) -> Vec<(String, String)> {
        self.indices()
            .into_iter()
            .map(|e| {
                let (a, b) = g.edge_endpoints(e);
                (g.label(a).to_string(), g.label(b).to_string())
            })
            .collect()
    }
}

/// The synchronous infection history: per-round deltas plus the closed set.
#[derive(Debug, Clone)]
pub struct PercolationTrace {
    pub rounds: Vec<EdgeSet>,
    pub final_set: EdgeSet,
}

impl PercolationTrace {
    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }
}

fn check_host(g: &Graph, s: &EdgeSet) -> Result<()> {
    if s.host_size() != g.edge_count() {
        return Err(Error::NotAnEdge(format!(
            "edge set is keyed to {} edges, host has {}",
            s.host_size(),
            g.edge_count()
        )));
    }
    Ok(())
}

/// Runs the process to its fixed point. Each round infects every healthy
/// edge with an endpoint at or above threshold simultaneously; the final set
/// is order-independent.
pub fn closure(g: &Graph, s: &EdgeSet, r: u32) -> Result<PercolationTrace> {
    check_host(g, s)?;
    let m = g.edge_count();
    let mut infected = s.clone();
    let mut infected_degree = vec![0u32; g.vertex_count()];
    for e in infected.indices() {
        let (a, b) = g.edge_endpoints(e);
        infected_degree[a] += 1;
        infected_degree[b] += 1;
    }
    let mut rounds = Vec::new();
    loop {
        let mut delta = EdgeSet::empty(m);
        let mut any = false;
        for e in 0..m {
            if infected.contains(e) {
                continue;
            }
            let (a, b) = g.edge_endpoints(e);
            if infected_degree[a] >= r || infected_degree[b] >= r {
                delta.insert(e);
                any = true;
            }
        }
        if !any {
            break;
        }
        for e in delta.indices() {
            infected.insert(e);
            let (a, b) = g.edge_endpoints(e);
            infected_degree[a] += 1;
            infected_degree[b] += 1;
        }
        rounds.push(delta);
    }
    Ok(PercolationTrace {
        rounds,
        final_set: infected,
    })
}

pub fn percolates(g: &Graph, s: &EdgeSet, r: u32) -> Result<bool> {
    Ok(closure(g, s, r)?.final_set.len() == g.edge_count())
}

/// True when `s` percolates but no single-edge deletion does.
pub fn is_minimal_percolating(g: &Graph, s: &EdgeSet, r: u32) -> Result<bool> {
    if !percolates(g, s, r)? {
        return Err(Error::DoesNotPercolate);
    }
    for e in s.indices() {
        let mut smaller = s.clone();
        smaller.remove(e);
        if percolates(g, &smaller, r)? {
            return Ok(false);
        }
    }
    Ok(true)
}
