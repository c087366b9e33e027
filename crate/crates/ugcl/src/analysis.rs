//! Executable graph theory: contextual homophily measurement, the
//! degree/homophily lower bound with its monotonicity properties, the
//! scope-selection rule, and spectral verification that adjacency powers
//! contract embeddings toward the component-indicator subspace.

use crate::eigen::{sym_eigen, SymEigen};
use crate::error::{Result, UgclError};
use crate::graph::{Graph, NormalizedAdjacency};
use crate::linalg::{spmm, DenseMatrix};

/// Largest graph the dense eigendecomposition path accepts by default.
pub const DEFAULT_EIGEN_BUDGET: usize = 2000;

/// Eigenvalues within this distance of 1 count toward the unit eigenspace.
const UNIT_EIG_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// contextual homophily
// ---------------------------------------------------------------------------

/// Mean contextual homophily rate for every scope `n` in `1..=n_max`.
///
/// For a labeled node `i`, the scope-`n` neighborhood is every node at hop
/// distance between 1 and `n`; the rate is the fraction of that neighborhood
/// sharing `i`'s label, averaged over labeled nodes with at least one
/// neighbor. Unlabeled neighbors count toward the denominator only.
pub fn measure_contextual_homophily(g: &Graph, n_max: usize) -> Result<Vec<f64>> {
    if n_max == 0 {
        return Err(UgclError::InvalidArgument("n_max must be >= 1".into()));
    }
    let labels = g.labels().ok_or(UgclError::NoLabeledNodes)?;
    if labels.iter().all(|&l| l == crate::graph::UNLABELED) {
        return Err(UgclError::NoLabeledNodes);
    }

    let n = g.num_nodes();
    let mut rate_sums = vec![0.0f64; n_max];
    let mut counted = 0usize;

    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n {
        let Some(y) = g.label_of(start) else { continue };
        if g.degree(start) == 0 {
            continue;
        }

        // BFS to depth n_max, tallying same-label counts per hop ring
        dist[start] = 0;
        queue.push_back(start);
        let mut touched = vec![start];
        let mut ring_same = vec![0usize; n_max + 1];
        let mut ring_total = vec![0usize; n_max + 1];
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            if du == n_max {
                continue;
            }
            for &v in g.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = du + 1;
                    touched.push(v);
                    ring_total[du + 1] += 1;
                    if g.label_of(v) == Some(y) {
                        ring_same[du + 1] += 1;
                    }
                    queue.push_back(v);
                }
            }
        }
        for &u in &touched {
            dist[u] = usize::MAX;
        }

        let mut same = 0usize;
        let mut total = 0usize;
        for hop in 1..=n_max {
            same += ring_same[hop];
            total += ring_total[hop];
            // total >= degree(start) >= 1 for every hop
            rate_sums[hop - 1] += same as f64 / total as f64;
        }
        counted += 1;
    }

    if counted == 0 {
        return Err(UgclError::InvalidArgument(
            "no labeled node has any neighbors".into(),
        ));
    }
    Ok(rate_sums.iter().map(|s| s / counted as f64).collect())
}

// ---------------------------------------------------------------------------
// lower bound and its properties
// ---------------------------------------------------------------------------

/// Lower bound on the scope-`n` homophily rate implied by average degree `d`
/// and 1-hop rate `p1`, as the ratio of direct geometric sums:
///
/// ```text
/// bound(n) = sum_{k=1..n} (d p1)^k / sum_{k=1..n} d^k
///          = p1 * sum_{j=0..n-1} p1^j (1/d)^{n-1-j} / sum_{i=0..n-1} (1/d)^i
/// ```
///
/// Both sums are normalized by `d^{n-1}`, so every term lies in [0, 1] and
/// large scopes cannot overflow. The factored form makes `bound(1) == p1`
/// and `p1 = 1 -> 1` hold exactly, and it stays finite at the closed form's
/// singular points `d = 1` and `d p1 = 1`.
pub fn homophily_lower_bound(d: f64, p1: f64, n: usize) -> Result<f64> {
    if d.is_nan() || d < 1.0 {
        return Err(UgclError::InvalidArgument(format!(
            "average degree must be >= 1, got {d}"
        )));
    }
    if p1.is_nan() || p1 <= 0.0 || p1 > 1.0 {
        return Err(UgclError::InvalidArgument(format!(
            "1-hop homophily rate must lie in (0, 1], got {p1}"
        )));
    }
    if n == 0 {
        return Err(UgclError::InvalidArgument("scope n must be >= 1".into()));
    }
    // ascending powers of p1: p1^0 .. p1^{n-1}
    let mut p_pow = Vec::with_capacity(n);
    let mut x = 1.0;
    for _ in 0..n {
        p_pow.push(x);
        x *= p1;
    }
    let inv_d = 1.0 / d;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut dpow = 1.0; // (1/d)^i
    for i in 0..n {
        num += p_pow[n - 1 - i] * dpow;
        den += dpow;
        dpow *= inv_d;
    }
    Ok(p1 * num / den)
}

/// The closed-form expression for the same bound:
/// `(d-1) p1 ((d p1)^n - 1) / ((d^n - 1)(d p1 - 1))`.
///
/// Singular at `d = 1` and `d p1 = 1`; elsewhere it agrees with
/// [`homophily_lower_bound`] and serves as its independent algebraic route.
pub fn homophily_lower_bound_closed_form(d: f64, p1: f64, n: usize) -> f64 {
    let dp = d * p1;
    (d - 1.0) * p1 * (dp.powi(n as i32) - 1.0) / ((d.powi(n as i32) - 1.0) * (dp - 1.0))
}

/// One monotonicity violation found by [`verify_bound_properties`].
#[derive(Debug, Clone)]
pub struct BoundViolation {
    /// Which property failed (1: decreasing in n, 2: increasing in p1,
    /// 3: non-increasing in d).
    pub property: u8,
    pub d: f64,
    pub p1: f64,
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
}

impl std::fmt::Display for BoundViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "property {} violated at d={} p1={} n={}: {} vs {}",
            self.property, self.d, self.p1, self.n, self.lhs, self.rhs
        )
    }
}

/// Outcome of the monotonicity grid check.
#[derive(Debug, Clone, Default)]
pub struct BoundPropertyReport {
    pub points_checked: usize,
    pub comparisons: usize,
    pub violations: Vec<BoundViolation>,
    /// Grid points where monotonicity in `n` is vacuous (`p1 = 1`).
    pub boundary_points: Vec<(f64, f64)>,
}

impl BoundPropertyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check the bound's proved monotonicities over a grid: strictly decreasing
/// in `n` (for `p1 < 1`), strictly increasing in `p1`, non-increasing in `d`
/// (equivalently in sparsity at fixed node count).
pub fn verify_bound_properties(
    d_grid: &[f64],
    p1_grid: &[f64],
    n_max: usize,
) -> Result<BoundPropertyReport> {
    if d_grid.is_empty() || p1_grid.is_empty() || n_max == 0 {
        return Err(UgclError::InvalidArgument(
            "grids must be nonempty and n_max >= 1".into(),
        ));
    }
    let mut d_sorted = d_grid.to_vec();
    d_sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    let mut p1_sorted = p1_grid.to_vec();
    p1_sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));

    let mut report = BoundPropertyReport::default();

    for &d in &d_sorted {
        for &p1 in &p1_sorted {
            report.points_checked += 1;
            if p1 >= 1.0 {
                report.boundary_points.push((d, p1));
            }
            // property 1: strictly decreasing in n when p1 < 1
            if p1 < 1.0 {
                let mut prev = homophily_lower_bound(d, p1, 1)?;
                for n in 2..=n_max {
                    let next = homophily_lower_bound(d, p1, n)?;
                    report.comparisons += 1;
                    if next >= prev {
                        report.violations.push(BoundViolation {
                            property: 1,
                            d,
                            p1,
                            n,
                            lhs: next,
                            rhs: prev,
                        });
                    }
                    prev = next;
                }
            }
        }
    }

    // property 2: strictly increasing in p1
    for &d in &d_sorted {
        for w in p1_sorted.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if lo >= hi {
                continue;
            }
            for n in 1..=n_max {
                let a = homophily_lower_bound(d, lo, n)?;
                let b = homophily_lower_bound(d, hi, n)?;
                report.comparisons += 1;
                if b <= a {
                    report.violations.push(BoundViolation {
                        property: 2,
                        d,
                        p1: hi,
                        n,
                        lhs: b,
                        rhs: a,
                    });
                }
            }
        }
    }

    // properties 3/4: non-increasing in d (at n = 1 the bound is constant p1)
    for &p1 in &p1_sorted {
        for w in d_sorted.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if lo >= hi {
                continue;
            }
            for n in 1..=n_max {
                let a = homophily_lower_bound(lo, p1, n)?;
                let b = homophily_lower_bound(hi, p1, n)?;
                report.comparisons += 1;
                if b > a + 1e-12 {
                    report.violations.push(BoundViolation {
                        property: 3,
                        d: hi,
                        p1,
                        n,
                        lhs: b,
                        rhs: a,
                    });
                }
            }
        }
    }

    Ok(report)
}

// ---------------------------------------------------------------------------
// scope recommendation
// ---------------------------------------------------------------------------

/// Recommended contextual scope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScopeRecommendation {
    pub n: usize,
    /// Set when even the 1-hop rate is below threshold (fallback to 1).
    pub below_threshold: bool,
}

/// Pick the scope just before strong homophily dominance breaks: the largest
/// `n` whose rate is still at or above `threshold`. `rates[k]` is the rate
/// at scope `k + 1`. Falls back to 1 (flagged) when every rate is below.
pub fn recommend_n(rates: &[f64], threshold: f64) -> Result<ScopeRecommendation> {
    if rates.is_empty() {
        return Err(UgclError::InvalidArgument("rates must be nonempty".into()));
    }
    let mut best = None;
    for (idx, &r) in rates.iter().enumerate() {
        if r >= threshold {
            best = Some(idx + 1);
        }
    }
    Ok(match best {
        Some(n) => ScopeRecommendation {
            n,
            below_threshold: false,
        },
        None => ScopeRecommendation {
            n: 1,
            below_threshold: true,
        },
    })
}

/// Default dominance threshold: rates at or above one half.
pub const DEFAULT_SCOPE_THRESHOLD: f64 = 0.5;

/// Combined homophily analysis of one labeled graph.
#[derive(Debug, Clone)]
pub struct HomophilyReport {
    /// Measured rate per scope; index `k` is scope `k + 1`.
    pub measured: Vec<f64>,
    /// Analytic lower bound per scope, when `d_used >= 1`.
    pub bounds: Option<Vec<f64>>,
    pub recommended: ScopeRecommendation,
    pub threshold: f64,
    pub d_used: f64,
    pub p1_used: f64,
}

/// Knobs for [`analyze_homophily`].
#[derive(Debug, Clone, Default)]
pub struct HomophilyOptions {
    /// Override the average degree fed to the bound (default: E/N).
    pub d_override: Option<f64>,
    /// Override the 1-hop rate fed to the bound (default: measured).
    pub p1_override: Option<f64>,
    /// Scale the degree as if measured on an S-node uniform subsample
    /// (d * S/N), the per-epoch training view of the graph.
    pub subsample_scaled: Option<usize>,
}

/// Measure rates, compute bounds, and recommend a scope.
pub fn analyze_homophily(
    g: &Graph,
    n_max: usize,
    threshold: f64,
    opts: &HomophilyOptions,
) -> Result<HomophilyReport> {
    let measured = measure_contextual_homophily(g, n_max)?;
    let stats = g.stats()?;
    let mut d_used = opts.d_override.unwrap_or(stats.avg_degree);
    if let Some(s) = opts.subsample_scaled {
        d_used *= s as f64 / stats.num_nodes as f64;
    }
    let p1_used = opts.p1_override.unwrap_or(measured[0]);
    let bounds = if d_used >= 1.0 && p1_used > 0.0 && p1_used <= 1.0 {
        Some(
            (1..=n_max)
                .map(|n| homophily_lower_bound(d_used, p1_used, n))
                .collect::<Result<Vec<f64>>>()?,
        )
    } else {
        None
    };
    let recommended = recommend_n(&measured, threshold)?;
    Ok(HomophilyReport {
        measured,
        bounds,
        recommended,
        threshold,
        d_used,
        p1_used,
    })
}

// ---------------------------------------------------------------------------
// spectral verification
// ---------------------------------------------------------------------------

/// Distance of `h` from the span of the unit-eigenvalue eigenvectors of `a`:
/// the Frobenius norm of the complement projection `F̂ᵀ h`.
pub fn subspace_distance(a: &NormalizedAdjacency, h: &DenseMatrix) -> Result<f64> {
    subspace_distance_with_budget(a, h, DEFAULT_EIGEN_BUDGET)
}

pub fn subspace_distance_with_budget(
    a: &NormalizedAdjacency,
    h: &DenseMatrix,
    budget: usize,
) -> Result<f64> {
    let eig = decompose(a, budget)?;
    let k = unit_multiplicity(&eig.values);
    Ok(complement_distance(&eig, k, h))
}

fn decompose(a: &NormalizedAdjacency, budget: usize) -> Result<SymEigen> {
    if a.num_nodes() > budget {
        return Err(UgclError::EigenBudgetExceeded {
            nodes: a.num_nodes(),
            budget,
        });
    }
    sym_eigen(&a.to_dense())
}

fn unit_multiplicity(values: &[f64]) -> usize {
    values.iter().filter(|&&l| l > 1.0 - UNIT_EIG_TOL).count()
}

/// `|| F̂ᵀ h ||_F` where `F̂` is every eigenvector except the top `k`.
fn complement_distance(eig: &SymEigen, k: usize, h: &DenseMatrix) -> f64 {
    let n = eig.values.len();
    let mut sq = 0.0;
    for row in 0..n.saturating_sub(k) {
        let f = eig.vectors.row(row);
        for j in 0..h.cols() {
            let mut proj = 0.0;
            for i in 0..n {
                proj += f[i] * h.get(i, j);
            }
            sq += proj * proj;
        }
    }
    sq.sqrt()
}

/// Spectral verification output.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// Ascending eigenvalues of the normalized augmented adjacency.
    pub eigenvalues: Vec<f64>,
    /// Multiplicity of eigenvalue 1 (numerically, within 1e-9).
    pub multiplicity: usize,
    /// Connected-component count of the graph.
    pub num_components: usize,
    /// Largest |eigenvalue| outside the unit eigenspace.
    pub lambda_abs: f64,
    /// `d_M(Â^n h)` for `n = 0..=n_max`.
    pub distances: Vec<f64>,
    /// `distances[n] / distances[n-1]`; NaN once the denominator vanishes.
    pub contraction_ratios: Vec<f64>,
    /// Human-readable assertion failures; empty means verified.
    pub failures: Vec<String>,
}

impl SpectralReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Check the contraction theorem on one graph: eigenvalue layout, unit
/// multiplicity against the component count, and the per-step inequality
/// `d_M(Â^n h) <= lambda_abs * d_M(Â^{n-1} h) + 1e-9`.
pub fn verify_contraction(g: &Graph, h: &DenseMatrix, n_max: usize) -> Result<SpectralReport> {
    verify_contraction_with_budget(g, h, n_max, DEFAULT_EIGEN_BUDGET)
}

pub fn verify_contraction_with_budget(
    g: &Graph,
    h: &DenseMatrix,
    n_max: usize,
    budget: usize,
) -> Result<SpectralReport> {
    if n_max == 0 {
        return Err(UgclError::InvalidArgument("n_max must be >= 1".into()));
    }
    if g.num_nodes() == 0 {
        return Err(UgclError::EmptyGraph);
    }
    if h.rows() != g.num_nodes() {
        return Err(UgclError::DimensionMismatch(format!(
            "feature block has {} rows, graph has {} nodes",
            h.rows(),
            g.num_nodes()
        )));
    }
    let a = g.normalize_augmented();
    let eig = decompose(&a, budget)?;
    let n = eig.values.len();
    let k = unit_multiplicity(&eig.values);
    let (_, num_components) = g.connected_components();

    let mut failures = Vec::new();
    if k != num_components {
        failures.push(format!(
            "unit-eigenvalue multiplicity {k} != component count {num_components}"
        ));
    }
    if (eig.values[n - 1] - 1.0).abs() > UNIT_EIG_TOL {
        failures.push(format!(
            "largest eigenvalue {} not within {UNIT_EIG_TOL:e} of 1",
            eig.values[n - 1]
        ));
    }
    if eig.values[0] <= -1.0 {
        failures.push(format!("smallest eigenvalue {} not above -1", eig.values[0]));
    }
    let lambda_abs = eig.values[..n - k]
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l.abs()));
    if lambda_abs >= 1.0 {
        failures.push(format!(
            "non-unit spectral radius {lambda_abs} reached 1"
        ));
    }

    let mut distances = Vec::with_capacity(n_max + 1);
    let mut ratios = Vec::with_capacity(n_max);
    let mut current = h.clone();
    distances.push(complement_distance(&eig, k, &current));
    for step in 1..=n_max {
        current = spmm(&a, &current)?;
        let d_now = complement_distance(&eig, k, &current);
        let d_prev = distances[step - 1];
        if d_now > lambda_abs * d_prev + 1e-9 {
            failures.push(format!(
                "contraction violated at step {step}: {d_now} > {lambda_abs} * {d_prev} + 1e-9"
            ));
        }
        ratios.push(if d_prev > 1e-300 { d_now / d_prev } else { f64::NAN });
        distances.push(d_now);
    }

    Ok(SpectralReport {
        eigenvalues: eig.values,
        multiplicity: k,
        num_components,
        lambda_abs,
        distances,
        contraction_ratios: ratios,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::linalg::xavier_init;
    use crate::rng::SplitMix64;
    use crate::synth;

    fn triangle_same_label() -> Graph {
        Graph::from_edges(
            3,
            &[(0, 1), (1, 2), (0, 2)],
            DenseMatrix::zeros(3, 1),
            Some(vec![1, 1, 1]),
        )
        .unwrap()
    }

    #[test]
    fn homophily_triangle_all_same() {
        let g = triangle_same_label();
        let rates = measure_contextual_homophily(&g, 4).unwrap();
        assert!(rates.iter().all(|&r| r == 1.0));
    }

    #[test]
    fn homophily_single_mixed_edge() {
        let g = Graph::from_edges(
            2,
            &[(0, 1)],
            DenseMatrix::zeros(2, 1),
            Some(vec![0, 1]),
        )
        .unwrap();
        let rates = measure_contextual_homophily(&g, 2).unwrap();
        assert_eq!(rates[0], 0.0);
    }

    #[test]
    fn homophily_requires_labels() {
        let g = synth::erdos_renyi_features(5, 0.5, 1, 0);
        assert!(matches!(
            measure_contextual_homophily(&g, 2),
            Err(UgclError::NoLabeledNodes)
        ));
    }

    #[test]
    fn homophily_hand_computed_path() {
        // path 0-1-2 with labels [0, 0, 1]:
        //   n=1: node0 -> 1/1; node1 -> 1/2; node2 -> 0/1; mean = 1/2
        //   n=2: node0 -> 1/2; node1 -> 1/2; node2 -> 0/2; mean = 1/3
        let g = Graph::from_edges(
            3,
            &[(0, 1), (1, 2)],
            DenseMatrix::zeros(3, 1),
            Some(vec![0, 0, 1]),
        )
        .unwrap();
        let rates = measure_contextual_homophily(&g, 2).unwrap();
        assert!((rates[0] - 0.5).abs() < 1e-15);
        assert!((rates[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bound_scope_one_is_exactly_p1() {
        for d in [1.0, 1.7, 3.0, 100.0] {
            for p1 in [0.001, 0.3, 0.5, 0.9999, 1.0] {
                let b = homophily_lower_bound(d, p1, 1).unwrap();
                assert_eq!(b.to_bits(), p1.to_bits(), "d={d} p1={p1}");
            }
        }
    }

    #[test]
    fn bound_p1_one_saturates() {
        for d in [1.0, 2.0, 9.5] {
            for n in 1..=12 {
                let b = homophily_lower_bound(d, 1.0, n).unwrap();
                assert_eq!(b, 1.0);
            }
        }
    }

    #[test]
    fn bound_hand_value_at_singular_point() {
        // d = 2, p1 = 0.5 puts the closed form at its d*p1 = 1 singularity;
        // the direct sum gives (1 + 1) / (2 + 4) = 1/3.
        let b = homophily_lower_bound(2.0, 0.5, 2).unwrap();
        assert!((b - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bound_agrees_with_closed_form_off_singularities() {
        let mut rng = SplitMix64::new(31);
        for _ in 0..500 {
            let d = 1.0 + rng.next_f64() * 20.0;
            let p1 = 0.01 + rng.next_f64() * 0.98;
            if d <= 1.0 + 1e-9 || (d * p1 - 1.0).abs() < 1e-6 {
                continue;
            }
            for n in 1..=10 {
                let direct = homophily_lower_bound(d, p1, n).unwrap();
                let closed = homophily_lower_bound_closed_form(d, p1, n);
                let rel = (direct - closed).abs() / direct.abs().max(1e-300);
                assert!(rel < 1e-12, "d={d} p1={p1} n={n}: {direct} vs {closed}");
            }
        }
    }

    #[test]
    fn bound_rejects_degenerate_degree() {
        assert!(homophily_lower_bound(0.5, 0.5, 2).is_err());
        assert!(homophily_lower_bound(2.0, 0.0, 2).is_err());
        assert!(homophily_lower_bound(2.0, 1.5, 2).is_err());
    }

    #[test]
    fn bound_stays_finite_at_huge_scope() {
        // raw geometric sums would overflow here; the normalized form must
        // not produce NaN or infinities
        for (d, p1, n) in [(16.0, 0.9, 500), (1.01, 0.1, 400), (50.0, 0.999, 1000)] {
            let b = homophily_lower_bound(d, p1, n).unwrap();
            assert!(b.is_finite() && (0.0..=1.0).contains(&b), "({d},{p1},{n}) -> {b}");
        }
        // spot value cross-checked against exact rational arithmetic
        let b = homophily_lower_bound(1.01, 0.1, 400).unwrap();
        assert!((b - 2.117783432454628e-5).abs() / b < 1e-12, "{b}");
    }

    #[test]
    fn property_grid_is_clean() {
        let report = verify_bound_properties(
            &[1.0, 2.0, 4.0, 8.0],
            &[0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
            10,
        )
        .unwrap();
        assert!(report.passed(), "violations: {:?}", report.violations);
        assert!(report.comparisons > 0);
        assert!(report.boundary_points.is_empty());
    }

    #[test]
    fn property_grid_flags_saturated_row() {
        let report = verify_bound_properties(&[2.0], &[0.5, 1.0], 5).unwrap();
        assert!(report.passed());
        assert_eq!(report.boundary_points, vec![(2.0, 1.0)]);
    }

    #[test]
    fn property_single_point_grid() {
        let report = verify_bound_properties(&[3.0], &[0.6], 4).unwrap();
        assert!(report.passed());
        assert!(report.violations.is_empty());
    }

    #[test]
    fn recommend_matches_published_sequences() {
        // digitized per-scope homophily rates of the five benchmark graphs
        let cora = [0.81, 0.75, 0.67, 0.59, 0.52, 0.45, 0.39, 0.34, 0.29, 0.25];
        let citeseer = [0.73, 0.6, 0.48, 0.38, 0.3, 0.23, 0.17, 0.13, 0.1, 0.07];
        let pubmed = [0.80, 0.73, 0.68, 0.63, 0.59, 0.56, 0.54, 0.52, 0.51, 0.50];
        let computers = [0.78, 0.62, 0.48, 0.37, 0.29, 0.23, 0.18, 0.14, 0.11, 0.08];
        let photos = [0.83, 0.71, 0.59, 0.49, 0.4, 0.33, 0.28, 0.23, 0.19, 0.16];
        for (rates, want) in [
            (&cora[..], 5),
            (&citeseer[..], 2),
            (&pubmed[..], 10),
            (&computers[..], 2),
            (&photos[..], 3),
        ] {
            let rec = recommend_n(rates, DEFAULT_SCOPE_THRESHOLD).unwrap();
            assert_eq!(rec.n, want);
            assert!(!rec.below_threshold);
        }
    }

    #[test]
    fn recommend_fallback_below_threshold() {
        let rec = recommend_n(&[0.4, 0.3, 0.2], 0.5).unwrap();
        assert_eq!(rec.n, 1);
        assert!(rec.below_threshold);
    }

    #[test]
    fn recommend_invariant_to_appended_low_rates() {
        let base = [0.9, 0.7, 0.55, 0.4];
        let rec_a = recommend_n(&base, 0.5).unwrap();
        let mut extended = base.to_vec();
        extended.extend([0.3, 0.2, 0.1, 0.05]);
        let rec_b = recommend_n(&extended, 0.5).unwrap();
        assert_eq!(rec_a, rec_b);
    }

    #[test]
    fn subspace_distance_zero_for_members() {
        // h built from the unit eigenspace has distance ~0
        let g = synth::two_component(5, 4, 0.6, 1, 12);
        let a = g.normalize_augmented();
        let eig = sym_eigen(&a.to_dense()).unwrap();
        let n = g.num_nodes();
        let k = unit_multiplicity(&eig.values);
        assert_eq!(k, 2);
        // mix the two unit eigenvectors into a 3-column block
        let mut h = DenseMatrix::zeros(n, 3);
        let mut rng = SplitMix64::new(3);
        for col in 0..3 {
            let c1 = rng.next_symmetric(2.0);
            let c2 = rng.next_symmetric(2.0);
            for i in 0..n {
                let v = c1 * eig.vectors.get(n - 1, i) + c2 * eig.vectors.get(n - 2, i);
                h.set(i, col, v);
            }
        }
        let d = subspace_distance(&a, &h).unwrap();
        assert!(d < 1e-9, "distance {d}");
    }

    #[test]
    fn subspace_distance_zero_on_edgeless_graph() {
        let g = Graph::from_edges(6, &[], DenseMatrix::zeros(6, 2), None).unwrap();
        let a = g.normalize_augmented();
        let h = xavier_init(6, 4, &mut SplitMix64::new(5));
        let d = subspace_distance(&a, &h).unwrap();
        assert!(d < 1e-12);
    }

    #[test]
    fn subspace_distance_matches_projection_residual() {
        // || F̂ᵀ H ||_F == || H - V̂ V̂ᵀ H ||_F
        for seed in 0..10 {
            let g = synth::erdos_renyi_features(10, 0.3, 1, 400 + seed);
            let a = g.normalize_augmented();
            let h = xavier_init(10, 4, &mut SplitMix64::new(seed));
            let direct = subspace_distance(&a, &h).unwrap();

            let eig = sym_eigen(&a.to_dense()).unwrap();
            let k = unit_multiplicity(&eig.values);
            let n = 10;
            // residual = h - V̂ V̂ᵀ h
            let mut residual = h.clone();
            for row in (n - k)..n {
                let v = eig.vectors.row(row);
                for j in 0..h.cols() {
                    let mut proj = 0.0;
                    for i in 0..n {
                        proj += v[i] * h.get(i, j);
                    }
                    for i in 0..n {
                        let cur = residual.get(i, j);
                        residual.set(i, j, cur - proj * v[i]);
                    }
                }
            }
            let oracle = residual.frobenius_norm();
            assert!(
                (direct - oracle).abs() < 1e-10,
                "seed {seed}: {direct} vs {oracle}"
            );
        }
    }

    #[test]
    fn subspace_distance_respects_budget() {
        let g = synth::erdos_renyi_features(12, 0.3, 1, 1);
        let a = g.normalize_augmented();
        let h = DenseMatrix::zeros(12, 1);
        assert!(matches!(
            subspace_distance_with_budget(&a, &h, 8),
            Err(UgclError::EigenBudgetExceeded { nodes: 12, budget: 8 })
        ));
    }

    #[test]
    fn unit_eigenvectors_match_scaled_indicators() {
        // the unit eigenspace is spanned by D̂^{1/2} * component indicators
        let g = synth::two_component(6, 5, 0.5, 1, 77);
        let a = g.normalize_augmented();
        let (comp, k) = g.connected_components();
        assert_eq!(k, 2);
        for target in 0..k {
            let n = g.num_nodes();
            let mut vec_mat = DenseMatrix::zeros(n, 1);
            let mut norm_sq = 0.0;
            for u in 0..n {
                if comp[u] == target {
                    let w = ((g.degree(u) + 1) as f64).sqrt();
                    vec_mat.set(u, 0, w);
                    norm_sq += w * w;
                }
            }
            let norm = norm_sq.sqrt();
            for u in 0..n {
                let v = vec_mat.get(u, 0) / norm;
                vec_mat.set(u, 0, v);
            }
            // Â v = v for a unit eigenvector
            let av = spmm(&a, &vec_mat).unwrap();
            assert!(av.max_abs_diff(&vec_mat) < 1e-12);
            // and it lies in the unit eigenspace: complement distance ~ 0
            let d = subspace_distance(&a, &vec_mat).unwrap();
            assert!(d < 1e-9);
        }
    }

    #[test]
    fn contraction_randomized_sweep() {
        for seed in 0..25 {
            let g = synth::erdos_renyi_features(4 + (seed as usize % 16), 0.3, 1, 3000 + seed);
            let h = xavier_init(g.num_nodes(), 3, &mut SplitMix64::new(seed));
            let report = verify_contraction(&g, &h, 12).unwrap();
            assert!(report.passed(), "seed {seed}: {:?}", report.failures);
            assert_eq!(report.multiplicity, report.num_components);
        }
    }

    #[test]
    fn contraction_edgeless_graph_trivial() {
        let g = Graph::from_edges(5, &[], DenseMatrix::zeros(5, 1), None).unwrap();
        let h = xavier_init(5, 2, &mut SplitMix64::new(9));
        let report = verify_contraction(&g, &h, 5).unwrap();
        assert!(report.passed());
        assert!(report.distances.iter().all(|&d| d < 1e-12));
        assert_eq!(report.multiplicity, 5);
    }

    #[test]
    fn contraction_two_component_limits_differ() {
        let g = synth::two_component(6, 6, 0.5, 1, 41);
        let h = xavier_init(12, 2, &mut SplitMix64::new(13));
        let report = verify_contraction(&g, &h, 20).unwrap();
        assert!(report.passed());
        assert_eq!(report.multiplicity, 2);
        // distances decay essentially geometrically
        assert!(report.distances[20] < report.distances[0] * report.lambda_abs.powi(10));

        // the per-component limits of Â^n h differ between components
        let a = g.normalize_augmented();
        let far = crate::linalg::power_apply(&a, &h, 200).unwrap();
        let diff: f64 = far
            .row(0)
            .iter()
            .zip(far.row(6))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(diff > 1e-6, "components collapsed to the same limit");
    }

    #[test]
    fn distances_non_increasing() {
        let g = synth::erdos_renyi_features(14, 0.25, 1, 8);
        let h = xavier_init(14, 3, &mut SplitMix64::new(2));
        let report = verify_contraction(&g, &h, 15).unwrap();
        for w in report.distances.windows(2) {
            assert!(w[1] <= w[0] + 1e-9);
        }
    }

    #[test]
    fn analyze_homophily_end_to_end() {
        let g = synth::two_block_sbm(60, 0.25, 0.02, 2, 0.5, 4);
        let report = analyze_homophily(
            &g,
            6,
            DEFAULT_SCOPE_THRESHOLD,
            &HomophilyOptions::default(),
        )
        .unwrap();
        assert_eq!(report.measured.len(), 6);
        assert!(report.measured.iter().all(|&r| (0.0..=1.0).contains(&r)));
        assert!(report.recommended.n >= 1);
        if let Some(bounds) = &report.bounds {
            assert_eq!(bounds.len(), 6);
            assert!((bounds[0] - report.p1_used).abs() < 1e-15);
        }
    }

    #[test]
    fn analyze_homophily_subsample_scaled_degree() {
        let g = synth::two_block_sbm(60, 0.25, 0.02, 2, 0.5, 4);
        let full = analyze_homophily(&g, 3, 0.5, &HomophilyOptions::default()).unwrap();
        let scaled = analyze_homophily(
            &g,
            3,
            0.5,
            &HomophilyOptions {
                subsample_scaled: Some(30),
                ..HomophilyOptions::default()
            },
        )
        .unwrap();
        assert!((scaled.d_used - full.d_used * 0.5).abs() < 1e-12);
    }
}
