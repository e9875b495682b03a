//! Interaction graphs: edge-list parsing and instance generators.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Undirected weighted graph on `0..n`. Edges are stored with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Graph> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (a, b, w) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) outside 0..{n}")));
            }
            if !w.is_finite() {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) has non-finite weight")));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({},{})", key.0, key.1)));
            }
            out.push((key.0, key.1, w));
        }
        Ok(Graph { n, edges: out })
    }

    pub fn unweighted(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        Graph::new(n, edges.iter().map(|&(a, b)| (a, b, 1.0)))
    }

    pub fn complete(n: usize) -> Graph {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0))).collect();
        Graph { n, edges }
    }

    /// Unordered pairs with `i < j`.
    pub fn pairs(&self) -> BTreeSet<(usize, usize)> {
        self.edges.iter().map(|&(a, b, _)| (a, b)).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * self.n.saturating_sub(1) / 2
    }

    /// Random `d`-regular graph from the configuration model. Pairings that
    /// produce a self-loop or a repeated edge are rejected and redrawn.
    pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
        if d >= n || (n * d) % 2 != 0 {
            return Err(Error::InvalidGraph(format!("no {d}-regular graph on {n} vertices")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
        for _ in 0..100_000 {
            stubs.shuffle(&mut rng);
            let mut seen = BTreeSet::new();
            let ok = stubs.chunks(2).all(|p| p[0] != p[1] && seen.insert((p[0].min(p[1]), p[0].max(p[1]))));
            if ok {
                return Ok(Graph { n, edges: seen.into_iter().map(|(a, b)| (a, b, 1.0)).collect() });
            }
        }
        Err(Error::InvalidGraph("configuration model failed to produce a simple graph".into()))
    }

    /// Parses `n` on the first line followed by `i j [weight]` lines.
    /// Blank lines and `#` comments are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "empty edge list".into() })?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::Parse { line: hl, msg: format!("expected qubit count, got {header:?}") })?;
        let mut edges = Vec::new();
        for (line, l) in lines {
            let w: Vec<&str> = l.split_whitespace().collect();
            let bad = |msg: &str| Error::Parse { line, msg: msg.to_string() };
            if w.len() < 2 || w.len() > 3 {
                return Err(bad("expected `i j [weight]`"));
            }
            let a: usize = w[0].parse().map_err(|_| bad("bad vertex index"))?;
            let b: usize = w[1].parse().map_err(|_| bad("bad vertex index"))?;
            let wt: f64 = match w.get(2) {
                Some(s) => s.parse().map_err(|_| bad("bad weight"))?,
                None => 1.0,
            };
            edges.push((a, b, wt));
        }
        Graph::new(n, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for &(a, b, w) in &self.edges {
            s.push_str(&format!("{a} {b} {w}\n"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_graphs_are_simple_and_regular() {
        for seed in 0..20 {
            for n in [6, 8, 10] {
                let g = Graph::random_regular(n, 3, seed).unwrap();
                assert_eq!(g.edges.len(), 3 * n / 2);
                let mut deg = vec![0; n];
                for &(a, b, _) in &g.edges {
                    assert!(a < b);
                    deg[a] += 1;
                    deg[b] += 1;
                }
                assert!(deg.iter().all(|&d| d == 3));
            }
        }
        assert_eq!(Graph::random_regular(8, 3, 4), Graph::random_regular(8, 3, 4));
        assert!(Graph::random_regular(5, 3, 0).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::parse_edge_list("# triangle\n3\n0 1\n1 2 0.5\n2 0\n").unwrap();
        assert_eq!(g.edges, vec![(0, 1, 1.0), (1, 2, 0.5), (0, 2, 1.0)]);
        assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
        assert!(matches!(Graph::parse_edge_list("3\n0 0\n"), Err(Error::InvalidGraph(_))));
        assert!(matches!(Graph::parse_edge_list("3\n0 x\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn complete_graph() {
        let g = Graph::complete(5);
        assert!(g.is_complete());
        assert_eq!(g.pairs().len(), 10);
    }
}
