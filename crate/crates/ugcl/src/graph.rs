//! Graph storage, symmetric normalization, connected components, statistics,
//! and induced subsampling.
//!
//! Graphs are undirected and stored as compressed sparse neighbor lists with
//! each edge present in both endpoint rows. Self-loops only ever appear in
//! the normalized augmented operator, never in the raw adjacency.

use crate::error::{Result, UgclError};
use crate::linalg::DenseMatrix;
use crate::rng::SplitMix64;

/// Sentinel label for unlabeled nodes.
pub const UNLABELED: i64 = -1;

/// An attributed undirected graph: sparse adjacency, dense node features,
/// optional class labels.
#[derive(Debug, Clone)]
pub struct Graph {
    num_nodes: usize,
    /// CSR offsets, length num_nodes + 1.
    row_ptr: Vec<usize>,
    /// Concatenated sorted neighbor lists; every undirected edge appears in
    /// both endpoint rows.
    col_idx: Vec<usize>,
    features: DenseMatrix,
    labels: Option<Vec<i64>>,
    /// Undirected edge count (each edge counted once).
    num_edges: usize,
}

/// Input hygiene counters reported by graph construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EdgeHygiene {
    pub duplicates_dropped: usize,
    pub self_loops_dropped: usize,
}

/// Basic size/shape statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphStats {
    pub num_nodes: usize,
    pub num_edges: usize,
    /// E / N.
    pub avg_degree: f64,
    /// E / N^2.
    pub sparsity: f64,
    pub num_components: usize,
}

impl Graph {
    /// Build a graph from an undirected edge list, deduplicating repeated
    /// edges (in either orientation) and dropping self-loops.
    pub fn from_edges(
        num_nodes: usize,
        edges: &[(usize, usize)],
        features: DenseMatrix,
        labels: Option<Vec<i64>>,
    ) -> Result<Graph> {
        Self::from_edges_with_hygiene(num_nodes, edges, features, labels).map(|(g, _)| g)
    }

    /// Like [`Graph::from_edges`] but also reports how many inputs were dropped.
    pub fn from_edges_with_hygiene(
        num_nodes: usize,
        edges: &[(usize, usize)],
        features: DenseMatrix,
        labels: Option<Vec<i64>>,
    ) -> Result<(Graph, EdgeHygiene)> {
        if features.rows() != num_nodes {
            return Err(UgclError::DimensionMismatch(format!(
                "feature matrix has {} rows, graph has {} nodes",
                features.rows(),
                num_nodes
            )));
        }
        if !features.is_finite() {
            return Err(UgclError::InvalidArgument(
                "feature matrix contains non-finite entries".into(),
            ));
        }
        if let Some(ls) = &labels {
            if ls.len() != num_nodes {
                return Err(UgclError::DimensionMismatch(format!(
                    "label vector has {} entries, graph has {} nodes",
                    ls.len(),
                    num_nodes
                )));
            }
            if ls.iter().any(|&l| l < UNLABELED) {
                return Err(UgclError::InvalidArgument(
                    "labels must be class indices or -1 for unlabeled".into(),
                ));
            }
        }

        let mut hygiene = EdgeHygiene::default();
        let mut canon: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= num_nodes || v >= num_nodes {
                return Err(UgclError::InvalidArgument(format!(
                    "edge ({u}, {v}) out of range for {num_nodes} nodes"
                )));
            }
            if u == v {
                hygiene.self_loops_dropped += 1;
                continue;
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        let before = canon.len();
        canon.dedup();
        hygiene.duplicates_dropped = before - canon.len();

        let num_edges = canon.len();
        let mut degree = vec![0usize; num_nodes];
        for &(u, v) in &canon {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut row_ptr = vec![0usize; num_nodes + 1];
        for u in 0..num_nodes {
            row_ptr[u + 1] = row_ptr[u] + degree[u];
        }
        let mut col_idx = vec![0usize; 2 * num_edges];
        let mut cursor = row_ptr.clone();
        for &(u, v) in &canon {
            col_idx[cursor[u]] = v;
            cursor[u] += 1;
            col_idx[cursor[v]] = u;
            cursor[v] += 1;
        }
        // canon is sorted by (min, max), so rows come out sorted except for
        // the reversed copies; sort each row to restore ascending order.
        for u in 0..num_nodes {
            col_idx[row_ptr[u]..row_ptr[u + 1]].sort_unstable();
        }

        Ok((
            Graph {
                num_nodes,
                row_ptr,
                col_idx,
                features,
                labels,
                num_edges,
            },
            hygiene,
        ))
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Undirected edge count (each edge once).
    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn feature_dim(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &DenseMatrix {
        &self.features
    }

    /// Replace the feature matrix (row count must stay N).
    pub fn with_features(mut self, features: DenseMatrix) -> Result<Graph> {
        if features.rows() != self.num_nodes {
            return Err(UgclError::DimensionMismatch(format!(
                "feature matrix has {} rows, graph has {} nodes",
                features.rows(),
                self.num_nodes
            )));
        }
        self.features = features;
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    /// Class label of `u`, if the graph is labeled and `u` is not the sentinel.
    pub fn label_of(&self, u: usize) -> Option<usize> {
        self.labels
            .as_ref()
            .and_then(|ls| (ls[u] != UNLABELED).then_some(ls[u] as usize))
    }

    /// Number of classes (max label + 1); 0 when unlabeled.
    pub fn num_classes(&self) -> usize {
        self.labels
            .as_ref()
            .map(|ls| ls.iter().copied().max().map_or(0, |m| (m + 1).max(0) as usize))
            .unwrap_or(0)
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row_ptr[u + 1] - self.row_ptr[u]
    }

    /// Sorted neighbor list of `u` (no self entry).
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.col_idx[self.row_ptr[u]..self.row_ptr[u + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Component id per node plus the component count. Ids are assigned in
    /// order of each component's smallest node index.
    pub fn connected_components(&self) -> (Vec<usize>, usize) {
        let mut ids = vec![usize::MAX; self.num_nodes];
        let mut k = 0;
        let mut queue = Vec::new();
        for start in 0..self.num_nodes {
            if ids[start] != usize::MAX {
                continue;
            }
            ids[start] = k;
            queue.push(start);
            while let Some(u) = queue.pop() {
                for &v in self.neighbors(u) {
                    if ids[v] == usize::MAX {
                        ids[v] = k;
                        queue.push(v);
                    }
                }
            }
            k += 1;
        }
        (ids, k)
    }

    /// Sparsity, average degree, and component count.
    pub fn stats(&self) -> Result<GraphStats> {
        if self.num_nodes == 0 {
            return Err(UgclError::EmptyGraph);
        }
        let n = self.num_nodes as f64;
        let e = self.num_edges as f64;
        let (_, k) = self.connected_components();
        Ok(GraphStats {
            num_nodes: self.num_nodes,
            num_edges: self.num_edges,
            avg_degree: e / n,
            sparsity: e / (n * n),
            num_components: k,
        })
    }

    /// Symmetric-normalized augmented adjacency
    /// `Â = D̂^{-1/2} (A + I) D̂^{-1/2}` with `d̂_u = deg(u) + 1`.
    ///
    /// Entries are computed as `1 / sqrt(d̂_u * d̂_v)`: the product commutes,
    /// so the matrix is bitwise symmetric.
    pub fn normalize_augmented(&self) -> NormalizedAdjacency {
        let n = self.num_nodes;
        let aug: Vec<f64> = (0..n).map(|u| (self.degree(u) + 1) as f64).collect();
        let entry = |u: usize, v: usize| 1.0 / (aug[u] * aug[v]).sqrt();

        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::with_capacity(self.col_idx.len() + n);
        let mut values = Vec::with_capacity(self.col_idx.len() + n);
        row_ptr.push(0);
        for u in 0..n {
            let mut self_inserted = false;
            for &v in self.neighbors(u) {
                if !self_inserted && v > u {
                    col_idx.push(u);
                    values.push(entry(u, u));
                    self_inserted = true;
                }
                col_idx.push(v);
                values.push(entry(u, v));
            }
            if !self_inserted {
                col_idx.push(u);
                values.push(entry(u, u));
            }
            row_ptr.push(col_idx.len());
        }

        let (component_id, num_components) = self.connected_components();
        NormalizedAdjacency {
            num_nodes: n,
            row_ptr,
            col_idx,
            values,
            component_id,
            num_components,
        }
    }

    /// Induced subgraph on `sample_size` nodes drawn uniformly without
    /// replacement. Chosen nodes are relabeled 0..S-1 preserving their
    /// relative order; feature and label rows are carried over.
    pub fn induced_subsample(&self, sample_size: usize, rng: &mut SplitMix64) -> Result<Graph> {
        self.induced_subsample_with_nodes(sample_size, rng)
            .map(|(g, _)| g)
    }

    /// Like [`Graph::induced_subsample`], also returning the ascending
    /// original indices of the sampled nodes.
    pub fn induced_subsample_with_nodes(
        &self,
        sample_size: usize,
        rng: &mut SplitMix64,
    ) -> Result<(Graph, Vec<usize>)> {
        if sample_size < 2 || sample_size > self.num_nodes {
            return Err(UgclError::InvalidSampleSize {
                requested: sample_size,
                available: self.num_nodes,
            });
        }
        let picked = rng.sample_indices(self.num_nodes, sample_size);
        let sub = self.induced_subgraph(&picked)?;
        Ok((sub, picked))
    }

    /// Induced subgraph on an ascending list of distinct node indices.
    pub fn induced_subgraph(&self, picked: &[usize]) -> Result<Graph> {
        if !picked.windows(2).all(|w| w[0] < w[1])
            || picked.last().is_some_and(|&u| u >= self.num_nodes)
        {
            return Err(UgclError::InvalidArgument(
                "picked nodes must be strictly ascending and in range".into(),
            ));
        }
        let mut new_id = vec![usize::MAX; self.num_nodes];
        for (new, &old) in picked.iter().enumerate() {
            new_id[old] = new;
        }

        let mut edges = Vec::new();
        for (nu, &u) in picked.iter().enumerate() {
            for &v in self.neighbors(u) {
                if v > u && new_id[v] != usize::MAX {
                    edges.push((nu, new_id[v]));
                }
            }
        }

        let d = self.feature_dim();
        let mut feat = DenseMatrix::zeros(picked.len(), d);
        for (new, &old) in picked.iter().enumerate() {
            feat.row_mut(new).copy_from_slice(self.features.row(old));
        }
        let labels = self
            .labels
            .as_ref()
            .map(|ls| picked.iter().map(|&old| ls[old]).collect());

        Graph::from_edges(picked.len(), &edges, feat, labels)
    }
}

/// Symmetric-normalized augmented adjacency in CSR form.
///
/// Every row holds deg(u)+1 nonzeros (neighbors plus self-loop) with entries
/// `(d̂_u d̂_v)^{-1/2}`, columns ascending. All eigenvalues lie in (-1, 1] and
/// eigenvalue 1 has multiplicity equal to the number of connected components.
#[derive(Debug, Clone)]
pub struct NormalizedAdjacency {
    num_nodes: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    component_id: Vec<usize>,
    num_components: usize,
}

impl NormalizedAdjacency {
    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn component_id(&self) -> &[usize] {
        &self.component_id
    }

    pub fn num_components(&self) -> usize {
        self.num_components
    }

    /// Nonzeros of row `u` as (column, value), columns ascending.
    pub fn row_entries(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[u];
        let hi = self.row_ptr[u + 1];
        self.col_idx[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    pub fn entry(&self, u: usize, v: usize) -> f64 {
        let lo = self.row_ptr[u];
        let hi = self.row_ptr[u + 1];
        match self.col_idx[lo..hi].binary_search(&v) {
            Ok(off) => self.values[lo + off],
            Err(_) => 0.0,
        }
    }

    /// Dense copy, for small-graph oracles and eigendecomposition.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.num_nodes, self.num_nodes);
        for u in 0..self.num_nodes {
            for (v, w) in self.row_entries(u) {
                m.set(u, v, w);
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feat(n: usize) -> DenseMatrix {
        DenseMatrix::zeros(n, 1)
    }

    #[test]
    fn single_node_normalizes_to_identity() {
        let g = Graph::from_edges(1, &[], feat(1), None).unwrap();
        let a = g.normalize_augmented();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.entry(0, 0), 1.0);
    }

    #[test]
    fn two_node_single_edge_normalization() {
        let g = Graph::from_edges(2, &[(0, 1)], feat(2), None).unwrap();
        let a = g.normalize_augmented();
        for u in 0..2 {
            for v in 0..2 {
                assert!((a.entry(u, v) - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn path_graph_normalization_hand_values() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)], feat(3), None).unwrap();
        let a = g.normalize_augmented();
        assert!((a.entry(0, 1) - 1.0 / 6f64.sqrt()).abs() < 1e-15);
        assert!((a.entry(1, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert!((a.entry(0, 0) - 0.5).abs() < 1e-15);
        // row u holds deg(u)+1 nonzeros
        assert_eq!(a.row_entries(0).count(), 2);
        assert_eq!(a.row_entries(1).count(), 3);
    }

    #[test]
    fn normalization_is_bitwise_symmetric() {
        let g = crate::synth::erdos_renyi_features(40, 0.15, 1, 5);
        let a = g.normalize_augmented();
        for u in 0..40 {
            for (v, w) in a.row_entries(u) {
                assert_eq!(w.to_bits(), a.entry(v, u).to_bits(), "asym at ({u},{v})");
            }
        }
    }

    #[test]
    fn components_edgeless() {
        let g = Graph::from_edges(3, &[], feat(3), None).unwrap();
        let (ids, k) = g.connected_components();
        assert_eq!(ids, vec![0, 1, 2]);
        assert_eq!(k, 3);
    }

    #[test]
    fn components_path() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)], feat(3), None).unwrap();
        let (ids, k) = g.connected_components();
        assert_eq!(ids, vec![0, 0, 0]);
        assert_eq!(k, 1);
    }

    #[test]
    fn components_two_pairs() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)], feat(4), None).unwrap();
        let (ids, k) = g.connected_components();
        assert_eq!(ids, vec![0, 0, 1, 1]);
        assert_eq!(k, 2);
    }

    #[test]
    fn components_match_brute_force_reachability() {
        for seed in 0..20 {
            let g = crate::synth::erdos_renyi_features(12, 0.12, 1, seed);
            let (ids, _) = g.connected_components();
            // brute force: reachable via repeated squaring of boolean adjacency
            let n = g.num_nodes();
            let mut reach = vec![vec![false; n]; n];
            for u in 0..n {
                reach[u][u] = true;
                for &v in g.neighbors(u) {
                    reach[u][v] = true;
                }
            }
            for _ in 0..4 {
                let prev = reach.clone();
                for u in 0..n {
                    for mid in 0..n {
                        if prev[u][mid] {
                            for v in 0..n {
                                if prev[mid][v] {
                                    reach[u][v] = true;
                                }
                            }
                        }
                    }
                }
            }
            for u in 0..n {
                for v in 0..n {
                    assert_eq!(ids[u] == ids[v], reach[u][v], "nodes {u},{v}");
                }
            }
        }
    }

    #[test]
    fn stats_single_node() {
        let g = Graph::from_edges(1, &[], feat(1), None).unwrap();
        let s = g.stats().unwrap();
        assert_eq!(s.sparsity, 0.0);
        assert_eq!(s.avg_degree, 0.0);
        assert_eq!(s.num_components, 1);
    }

    #[test]
    fn stats_empty_graph_errors() {
        let g = Graph::from_edges(0, &[], DenseMatrix::zeros(0, 1), None).unwrap();
        assert!(matches!(g.stats(), Err(UgclError::EmptyGraph)));
    }

    #[test]
    fn stats_degree_sparsity_relation() {
        for seed in 0..10 {
            let g = crate::synth::erdos_renyi_features(30, 0.2, 1, seed);
            let s = g.stats().unwrap();
            let lhs = s.avg_degree;
            let rhs = s.sparsity * s.num_nodes as f64;
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300));
        }
    }

    #[test]
    fn stats_reproduce_citation_table_sparsities() {
        // Edge/node counts of the two small citation benchmarks; the
        // undirected-edge convention must reproduce 0.074% and 0.042%.
        let cora = (2708usize, 5429usize);
        let citeseer = (3327usize, 4732usize);
        for ((n, e), expected) in [cora, citeseer].into_iter().zip([7.40e-4, 4.27e-4]) {
            // a graph with exactly e edges: ring + extra chords
            let mut edges = Vec::with_capacity(e);
            for u in 0..n {
                edges.push((u, (u + 1) % n));
            }
            let mut stride = 2;
            'outer: while edges.len() < e {
                for u in 0..n {
                    if edges.len() == e {
                        break 'outer;
                    }
                    edges.push((u, (u + stride) % n));
                }
                stride += 1;
            }
            let g = Graph::from_edges(n, &edges, feat(n), None).unwrap();
            assert_eq!(g.num_edges(), e);
            let s = g.stats().unwrap();
            assert!(
                (s.sparsity - expected).abs() < 5e-6,
                "sparsity {} vs {}",
                s.sparsity,
                expected
            );
        }
    }

    #[test]
    fn dedup_and_self_loop_hygiene() {
        let (g, h) = Graph::from_edges_with_hygiene(
            3,
            &[(0, 1), (1, 0), (1, 2), (2, 2)],
            feat(3),
            None,
        )
        .unwrap();
        assert_eq!(g.num_edges(), 2);
        assert_eq!(h.duplicates_dropped, 1);
        assert_eq!(h.self_loops_dropped, 1);
    }

    #[test]
    fn subsample_full_size_is_identity() {
        let g = crate::synth::erdos_renyi_features(10, 0.3, 2, 3);
        let mut rng = SplitMix64::new(0);
        let sub = g.induced_subsample(10, &mut rng).unwrap();
        assert_eq!(sub.num_edges(), g.num_edges());
        for u in 0..10 {
            assert_eq!(sub.neighbors(u), g.neighbors(u));
            assert_eq!(sub.features().row(u), g.features().row(u));
        }
    }

    #[test]
    fn subsample_complete_graph_keeps_completeness() {
        let edges: Vec<(usize, usize)> =
            (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))).collect();
        let g = Graph::from_edges(4, &edges, feat(4), None).unwrap();
        for seed in 0..10 {
            let mut rng = SplitMix64::new(seed);
            let sub = g.induced_subsample(2, &mut rng).unwrap();
            assert_eq!(sub.num_nodes(), 2);
            assert_eq!(sub.num_edges(), 1);
        }
    }

    #[test]
    fn subsample_rejects_bad_sizes() {
        let g = crate::synth::erdos_renyi_features(5, 0.5, 1, 1);
        let mut rng = SplitMix64::new(0);
        assert!(g.induced_subsample(1, &mut rng).is_err());
        assert!(g.induced_subsample(6, &mut rng).is_err());
    }

    #[test]
    fn subsample_is_deterministic_and_edge_subset() {
        let g = crate::synth::erdos_renyi_features(25, 0.2, 2, 9);
        let a = g.induced_subsample(12, &mut SplitMix64::new(7)).unwrap();
        let b = g.induced_subsample(12, &mut SplitMix64::new(7)).unwrap();
        assert_eq!(a.num_edges(), b.num_edges());
        for u in 0..12 {
            assert_eq!(a.neighbors(u), b.neighbors(u));
            assert_eq!(a.features().row(u), b.features().row(u));
        }
    }

    #[test]
    fn subsample_preserves_sparsity_in_expectation() {
        // Monte-Carlo check of the sparsity-preservation property.
        let g = crate::synth::erdos_renyi_features(400, 0.02, 1, 100);
        let t_full = g.stats().unwrap().sparsity;
        let mut mean = 0.0;
        let reps = 200;
        for seed in 0..reps {
            let sub = g.induced_subsample(200, &mut SplitMix64::new(seed)).unwrap();
            mean += sub.stats().unwrap().sparsity;
        }
        mean /= reps as f64;
        assert!(
            (mean - t_full).abs() / t_full < 0.10,
            "mean sampled sparsity {mean} vs full {t_full}"
        );
    }

    #[test]
    fn subsample_preserves_symmetry_edges_and_homophily() {
        // randomized sweep: subsamples stay symmetric, contain exactly the
        // induced parent edges, and keep the 1-hop homophily rate close on
        // average over seeds.
        let mut master = SplitMix64::new(2024);
        for _ in 0..100 {
            let n = 30 + master.next_below(20) as usize;
            let g = crate::synth::labeled_community_pair(
                n,
                0.25,
                0.05,
                1,
                master.next_u64(),
            );
            let full_rate = one_hop_homophily(&g);
            let mut mean_rate = 0.0;
            let mut rated = 0u32;
            for _ in 0..20 {
                let s = (g.num_nodes() / 2).max(2);
                let (sub, picked) = g
                    .induced_subsample_with_nodes(s, &mut SplitMix64::new(master.next_u64()))
                    .unwrap();
                for u in 0..sub.num_nodes() {
                    for &v in sub.neighbors(u) {
                        assert!(sub.has_edge(v, u));
                        assert!(g.has_edge(picked[u], picked[v]), "edge not in parent");
                    }
                }
                if let Some(r) = maybe_one_hop_homophily(&sub) {
                    mean_rate += r;
                    rated += 1;
                }
            }
            if rated > 0 {
                mean_rate /= rated as f64;
                assert!(
                    (mean_rate - full_rate).abs() < 0.1,
                    "homophily drift: sub {mean_rate} vs full {full_rate}"
                );
            }
        }
    }

    #[test]
    fn subsampled_edges_exist_in_parent() {
        let g = crate::synth::erdos_renyi_features(40, 0.15, 1, 11);
        // fixed ascending pick so old ids are known
        let picked: Vec<usize> = (0..40).step_by(2).collect();
        let sub = g.induced_subgraph(&picked).unwrap();
        for u in 0..sub.num_nodes() {
            for &v in sub.neighbors(u) {
                assert!(g.has_edge(picked[u], picked[v]));
            }
        }
        // and every parent edge between picked nodes survives
        for (nu, &u) in picked.iter().enumerate() {
            for &v in g.neighbors(u) {
                if let Ok(nv) = picked.binary_search(&v) {
                    assert!(sub.has_edge(nu, nv));
                }
            }
        }
    }

    fn one_hop_homophily(g: &Graph) -> f64 {
        maybe_one_hop_homophily(g).expect("labeled graph with edges")
    }

    fn maybe_one_hop_homophily(g: &Graph) -> Option<f64> {
        let mut total = 0.0;
        let mut counted = 0usize;
        for u in 0..g.num_nodes() {
            let Some(yu) = g.label_of(u) else { continue };
            let nbrs = g.neighbors(u);
            if nbrs.is_empty() {
                continue;
            }
            let same = nbrs
                .iter()
                .filter(|&&v| g.label_of(v) == Some(yu))
                .count();
            total += same as f64 / nbrs.len() as f64;
            counted += 1;
        }
        (counted > 0).then(|| total / counted as f64)
    }
}
