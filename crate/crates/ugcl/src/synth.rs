//! Deterministic synthetic graph generators.
//!
//! These back the randomized verification suites and the offline test
//! fixtures: Erdős–Rényi graphs, labeled community (stochastic block)
//! graphs, and disconnected multi-component graphs.

use crate::graph::Graph;
use crate::linalg::DenseMatrix;
use crate::rng::SplitMix64;

/// G(n, p) with constant single-column features.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut feat = DenseMatrix::zeros(n, 1);
    for v in feat.data_mut() {
        *v = 1.0;
    }
    let edges = gnp_edges(n, p, &mut SplitMix64::new(seed));
    Graph::from_edges(n, &edges, feat, None).expect("generator produces valid edges")
}

/// G(n, p) with uniform random features in ±1.
pub fn erdos_renyi_features(n: usize, p: f64, feat_dim: usize, seed: u64) -> Graph {
    let mut rng = SplitMix64::new(seed);
    let edges = gnp_edges(n, p, &mut rng);
    let mut feat = DenseMatrix::zeros(n, feat_dim);
    for v in feat.data_mut() {
        *v = rng.next_symmetric(1.0);
    }
    Graph::from_edges(n, &edges, feat, None).expect("generator produces valid edges")
}

/// Two equally sized communities with intra-edge probability `p_in` and
/// inter-edge probability `p_out`. Labels mark the community; features are
/// uniform noise shifted by ±`shift` in the first column.
pub fn two_block_sbm(
    n: usize,
    p_in: f64,
    p_out: f64,
    feat_dim: usize,
    shift: f64,
    seed: u64,
) -> Graph {
    let mut rng = SplitMix64::new(seed);
    let half = n / 2;
    let block = |u: usize| usize::from(u >= half);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if block(u) == block(v) { p_in } else { p_out };
            if rng.next_f64() < p {
                edges.push((u, v));
            }
        }
    }
    let labels: Vec<i64> = (0..n).map(|u| block(u) as i64).collect();
    let mut feat = DenseMatrix::zeros(n, feat_dim.max(1));
    for u in 0..n {
        let row = feat.row_mut(u);
        for x in row.iter_mut() {
            *x = rng.next_symmetric(1.0);
        }
        row[0] += if block(u) == 0 { shift } else { -shift };
    }
    Graph::from_edges(n, &edges, feat, Some(labels)).expect("generator produces valid edges")
}

/// Random labeled graph built as two loosely linked communities; used by the
/// subsampling property sweeps.
pub fn labeled_community_pair(n: usize, p_in: f64, p_out: f64, feat_dim: usize, seed: u64) -> Graph {
    two_block_sbm(n, p_in, p_out, feat_dim, 0.5, seed)
}

/// Two disjoint components of sizes `n_a` and `n_b` with random features;
/// each block is a spanning path plus Erdős–Rényi extras, so the component
/// count is exactly two. Blocks carry labels 0 and 1.
pub fn two_component(n_a: usize, n_b: usize, p: f64, feat_dim: usize, seed: u64) -> Graph {
    let mut rng = SplitMix64::new(seed);
    let n = n_a + n_b;
    let mut edges = Vec::new();
    for u in 0..n_a.saturating_sub(1) {
        edges.push((u, u + 1));
    }
    for u in n_a..n.saturating_sub(1) {
        edges.push((u, u + 1));
    }
    for u in 0..n_a {
        for v in (u + 2)..n_a {
            if rng.next_f64() < p {
                edges.push((u, v));
            }
        }
    }
    for u in n_a..n {
        for v in (u + 2)..n {
            if rng.next_f64() < p {
                edges.push((u, v));
            }
        }
    }
    let mut feat = DenseMatrix::zeros(n, feat_dim);
    for v in feat.data_mut() {
        *v = rng.next_symmetric(1.0);
    }
    let labels: Vec<i64> = (0..n).map(|u| i64::from(u >= n_a)).collect();
    Graph::from_edges(n, &edges, feat, Some(labels)).expect("generator produces valid edges")
}

fn gnp_edges(n: usize, p: f64, rng: &mut SplitMix64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.next_f64() < p {
                edges.push((u, v));
            }
        }
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erdos_renyi_is_seeded() {
        let a = erdos_renyi(50, 0.1, 7);
        let b = erdos_renyi(50, 0.1, 7);
        assert_eq!(a.num_edges(), b.num_edges());
        let c = erdos_renyi(50, 0.1, 8);
        // different seed should (overwhelmingly) give a different graph
        assert!(a.num_edges() != c.num_edges() || (0..50).any(|u| a.neighbors(u) != c.neighbors(u)));
    }

    #[test]
    fn sbm_blocks_are_labeled() {
        let g = two_block_sbm(40, 0.3, 0.02, 4, 0.5, 3);
        assert_eq!(g.label_of(0), Some(0));
        assert_eq!(g.label_of(39), Some(1));
        assert_eq!(g.num_classes(), 2);
    }

    #[test]
    fn two_component_graph_has_two_components() {
        let g = two_component(10, 8, 0.5, 3, 5);
        let (_, k) = g.connected_components();
        assert_eq!(k, 2);
        // no cross edges
        for u in 0..10 {
            for &v in g.neighbors(u) {
                assert!(v < 10);
            }
        }
    }
}
