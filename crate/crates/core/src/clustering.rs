//! Seeded k-means over sample features.
//!
//! Centroids are initialized with greedy k-means++ (each new center is the
//! best of `2 + floor(ln k)` candidates drawn proportionally to squared
//! distance, judged by the resulting potential) and refined by Lloyd
//! iterations alternated with single-point swap sweeps. Each restart draws
//! its own sub-seed from the caller's seed, runs to convergence, and the
//! restart with the lowest within-cluster sum of squares wins (ties to the
//! earliest restart), so a fixed `(features, options)` pair always yields
//! the same model. Instances small enough that every k-subset of distinct
//! points fits within a fixed budget skip the sampled restarts and try all
//! such subsets as initializations, which needs no randomness at all. Empty
//! clusters are repaired during iteration by reseeding the empty centroid at
//! the point farthest from its assigned centroid; the objective never
//! increases across assignment rounds, which
//! [`ClusterModel::wcss_history`] records and `kmeans_fit` checks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{derive_seed, SplitMix64};

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("cannot form {k} clusters from {distinct} distinct points")]
    TooFewDistinctPoints { k: usize, distinct: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("feature matrix is empty")]
    Empty,
    #[error("feature row {row} has {got} entries, expected {expected}")]
    RaggedFeatures {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("feature row {row} contains a non-finite value")]
    NonFinite { row: usize },
    #[error("feature has {got} entries but the model expects {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("max_iter and n_init must be at least 1")]
    InvalidOptions,
}

/// A fitted k-means model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterModel {
    /// `k` centroids, each of the training feature dimension.
    pub centroids: Vec<Vec<f64>>,
    /// Training-point cluster indices, aligned with the input rows.
    pub assignments: Vec<usize>,
    /// Final within-cluster sum of squared distances.
    pub wcss: f64,
    /// WCSS after each assignment round of the winning restart;
    /// non-increasing.
    pub wcss_history: Vec<f64>,
    /// Per-cluster mean of member features under the final assignment.
    pub mean_features: Vec<Vec<f64>>,
    /// The seed the fit was called with.
    pub seed: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct ClusterFitOptions {
    pub k: usize,
    pub seed: u64,
    /// Lloyd iteration cap per restart.
    pub max_iter: usize,
    /// Stop when no centroid moves farther than this (Euclidean).
    pub tol: f64,
    /// Independent k-means++ restarts; the lowest-WCSS run wins. Ignored on
    /// instances small enough that every k-subset of distinct points can be
    /// tried as an initialization instead.
    pub n_init: usize,
}

impl Default for ClusterFitOptions {
    fn default() -> Self {
        ClusterFitOptions {
            k: 8,
            seed: 0,
            max_iter: 300,
            tol: 1e-9,
            n_init: 10,
        }
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Index of the nearest centroid, lowest index on exact ties.
fn nearest(centroids: &[Vec<f64>], x: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = dist2(&centroids[0], x);
    for (j, c) in centroids.iter().enumerate().skip(1) {
        let d = dist2(c, x);
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    best
}

/// Value-equality key for a point; -0.0 is canonicalized to 0.0 so
/// coincident points never count as distinct.
fn canonical_key(x: &[f64]) -> Vec<u64> {
    x.iter()
        .map(|&v| if v == 0.0 { 0.0f64 } else { v }.to_bits())
        .collect()
}

/// Validates the instance and returns the number of distinct points.
fn validate(features: &[Vec<f64>], opts: &ClusterFitOptions) -> Result<usize, ClusterError> {
    if opts.k == 0 {
        return Err(ClusterError::ZeroK);
    }
    if opts.max_iter == 0 || opts.n_init == 0 || !opts.tol.is_finite() || opts.tol < 0.0 {
        return Err(ClusterError::InvalidOptions);
    }
    if features.is_empty() {
        return Err(ClusterError::Empty);
    }
    let dim = features[0].len();
    if dim == 0 {
        return Err(ClusterError::RaggedFeatures {
            row: 0,
            got: 0,
            expected: 1,
        });
    }
    for (row, x) in features.iter().enumerate() {
        if x.len() != dim {
            return Err(ClusterError::RaggedFeatures {
                row,
                got: x.len(),
                expected: dim,
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(ClusterError::NonFinite { row });
        }
    }
    let mut keys: Vec<Vec<u64>> = features.iter().map(|x| canonical_key(x)).collect();
    keys.sort();
    keys.dedup();
    if keys.len() < opts.k {
        return Err(ClusterError::TooFewDistinctPoints {
            k: opts.k,
            distinct: keys.len(),
        });
    }
    Ok(keys.len())
}

/// First occurrence of each distinct point, in input order.
fn distinct_points(features: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for x in features {
        if seen.insert(canonical_key(x)) {
            out.push(x.clone());
        }
    }
    out
}

/// `C(n, k)`, reported as `cap + 1` as soon as it exceeds `cap`.
fn binomial_capped(n: usize, k: usize, cap: u64) -> u64 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // C(n, i+1) = C(n, i) * (n - i) / (i + 1) stays integral at each step.
        c = c * (n - i) as u128 / (i as u128 + 1);
        if c > cap as u128 {
            return cap + 1;
        }
    }
    c as u64
}

/// Visits every k-subset of `0..n` in lexicographic order. Requires
/// `1 <= k <= n`.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // Rightmost index that can still advance.
        let mut i = k - 1;
        while idx[i] == i + n - k {
            if i == 0 {
                return;
            }
            i -= 1;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// One D²-proportional draw from the current distance profile.
fn sample_d2(d2: &[f64], rng: &mut SplitMix64) -> usize {
    let total: f64 = d2.iter().sum();
    // total > 0 because k never exceeds the distinct point count.
    let mut r = rng.next_f64() * total;
    for (i, &w) in d2.iter().enumerate() {
        if r < w {
            return i;
        }
        r -= w;
    }
    d2.len() - 1
}

fn kmeanspp_init(features: &[Vec<f64>], k: usize, rng: &mut SplitMix64) -> Vec<Vec<f64>> {
    let n = features.len();
    let mut centroids = Vec::with_capacity(k);
    centroids.push(features[rng.gen_range(n)].clone());
    let mut d2: Vec<f64> = features
        .iter()
        .map(|x| dist2(x, &centroids[0]))
        .collect();
    // Greedy refinement: trying a few candidates per center and keeping the
    // one that shrinks the potential most avoids most of the bad draws that
    // strand restarts in poor basins.
    let candidates = 2 + (k as f64).ln().floor() as usize;
    while centroids.len() < k {
        let mut best_pick = sample_d2(&d2, rng);
        let mut best_potential = potential_with(features, &d2, &features[best_pick]);
        for _ in 1..candidates {
            let pick = sample_d2(&d2, rng);
            let p = potential_with(features, &d2, &features[pick]);
            if p < best_potential {
                best_potential = p;
                best_pick = pick;
            }
        }
        let c = features[best_pick].clone();
        for (i, x) in features.iter().enumerate() {
            d2[i] = d2[i].min(dist2(x, &c));
        }
        centroids.push(c);
    }
    centroids
}

/// The summed min-distance profile if `candidate` were added as a center.
fn potential_with(features: &[Vec<f64>], d2: &[f64], candidate: &[f64]) -> f64 {
    features
        .iter()
        .zip(d2)
        .map(|(x, &d)| d.min(dist2(x, candidate)))
        .sum()
}

struct RunResult {
    centroids: Vec<Vec<f64>>,
    assignments: Vec<usize>,
    wcss: f64,
    history: Vec<f64>,
}

/// One assignment round, including empty-cluster repair. Returns the WCSS of
/// the resulting assignment against `centroids` (which repair may move).
fn assign_round(
    features: &[Vec<f64>],
    centroids: &mut [Vec<f64>],
    assignments: &mut [usize],
) -> f64 {
    for (i, x) in features.iter().enumerate() {
        assignments[i] = nearest(centroids, x);
    }
    // Repair: reseed each empty cluster (lowest index first) at the point
    // farthest from its current centroid, then reassign. Moving a point to
    // its own new centroid strictly lowers the objective, so repair preserves
    // the non-increasing WCSS of Lloyd rounds.
    loop {
        let k = centroids.len();
        let mut counts = vec![0usize; k];
        for &a in assignments.iter() {
            counts[a] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            break;
        };
        let farthest = (0..features.len())
            .max_by(|&a, &b| {
                let da = dist2(&features[a], &centroids[assignments[a]]);
                let db = dist2(&features[b], &centroids[assignments[b]]);
                da.partial_cmp(&db).unwrap()
            })
            .expect("features verified non-empty");
        centroids[empty] = features[farthest].clone();
        for (i, x) in features.iter().enumerate() {
            assignments[i] = nearest(centroids, x);
        }
    }
    features
        .iter()
        .zip(assignments.iter())
        .map(|(x, &a)| dist2(x, &centroids[a]))
        .sum()
}

fn cluster_means(features: &[Vec<f64>], assignments: &[usize], k: usize) -> Vec<Vec<f64>> {
    let dim = features[0].len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (x, &a) in features.iter().zip(assignments) {
        counts[a] += 1;
        for (s, v) in sums[a].iter_mut().zip(x) {
            *s += v;
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        debug_assert!(c > 0, "assignment rounds keep every cluster non-empty");
        for v in s.iter_mut() {
            *v /= c as f64;
        }
    }
    sums
}

/// Single-point swap improvement: moving `x` from cluster `a` (size `n_a`,
/// mean `mu_a`) to `b` changes the objective by exactly
/// `n_b/(n_b+1) * ||x - mu_b||^2 - n_a/(n_a-1) * ||x - mu_a||^2`, so sweeps
/// can accept strictly improving moves without recomputing the objective.
/// This escapes the assignment-stable local optima Lloyd gets caught in
/// (a swap-stable state is assignment-stable, not vice versa). On return
/// with `true`, `centroids` hold the exact means of the new assignment.
fn swap_improvements(
    features: &[Vec<f64>],
    centroids: &mut Vec<Vec<f64>>,
    assignments: &mut [usize],
    k: usize,
) -> bool {
    let mut counts = vec![0usize; k];
    for &a in assignments.iter() {
        counts[a] += 1;
    }
    // Centroids after a Lloyd phase lag the final assignment by one update;
    // the delta formulas need exact means.
    let mut means = cluster_means(features, assignments, k);
    let mut any = false;
    for _sweep in 0..100 {
        let mut moved = false;
        for (i, x) in features.iter().enumerate() {
            let a = assignments[i];
            if counts[a] <= 1 {
                continue; // never empty a cluster
            }
            let ca = counts[a] as f64;
            let removal = ca / (ca - 1.0) * dist2(x, &means[a]);
            let mut best_b = a;
            let mut best_add = f64::INFINITY;
            for (b, mean) in means.iter().enumerate() {
                if b == a {
                    continue;
                }
                let cb = counts[b] as f64;
                let add = cb / (cb + 1.0) * dist2(x, mean);
                if add < best_add {
                    best_add = add;
                    best_b = b;
                }
            }
            // Strict improvement beyond float noise, so sweeps terminate.
            if best_add < removal - 1e-12 * (1.0 + removal) {
                let cb = counts[best_b] as f64;
                let old_a = means[a].clone();
                let old_b = means[best_b].clone();
                for (j, &v) in x.iter().enumerate() {
                    means[a][j] = (ca * old_a[j] - v) / (ca - 1.0);
                    means[best_b][j] = (cb * old_b[j] + v) / (cb + 1.0);
                }
                counts[a] -= 1;
                counts[best_b] += 1;
                assignments[i] = best_b;
                moved = true;
                any = true;
            }
        }
        if !moved {
            break;
        }
        // Cancel incremental drift before the next sweep.
        means = cluster_means(features, assignments, k);
    }
    if any {
        *centroids = cluster_means(features, assignments, k);
    }
    any
}

fn wcss_of(features: &[Vec<f64>], centroids: &[Vec<f64>], assignments: &[usize]) -> f64 {
    features
        .iter()
        .zip(assignments)
        .map(|(x, &a)| dist2(x, &centroids[a]))
        .sum()
}

fn refine(
    features: &[Vec<f64>],
    opts: &ClusterFitOptions,
    mut centroids: Vec<Vec<f64>>,
) -> RunResult {
    let mut assignments = vec![0usize; features.len()];
    let mut history = Vec::new();
    let mut prev = f64::INFINITY;
    let mut wcss = f64::INFINITY;

    // Alternate Lloyd convergence with swap sweeps until a whole swap phase
    // finds nothing. Every recorded value is checked non-increasing; the
    // loop terminates because accepted swaps strictly lower the objective.
    for _phase in 0..opts.max_iter {
        for _ in 0..opts.max_iter {
            let w = assign_round(features, &mut centroids, &mut assignments);
            assert!(
                w <= prev * (1.0 + 1e-9) + 1e-12,
                "k-means objective increased: {prev} -> {w}"
            );
            history.push(w);
            prev = w;

            let means = cluster_means(features, &assignments, opts.k);
            let movement = centroids
                .iter()
                .zip(&means)
                .map(|(c, m)| dist2(c, m).sqrt())
                .fold(0.0f64, f64::max);
            centroids = means;
            if movement <= opts.tol {
                break;
            }
        }
        // Re-assign against the final means so the published model is
        // self-consistent even if the loop above hit its iteration cap.
        let w = assign_round(features, &mut centroids, &mut assignments);
        assert!(
            w <= prev * (1.0 + 1e-9) + 1e-12,
            "k-means objective increased on the closing round: {prev} -> {w}"
        );
        history.push(w);
        prev = w;
        wcss = w;

        if !swap_improvements(features, &mut centroids, &mut assignments, opts.k) {
            break;
        }
        let w = wcss_of(features, &centroids, &assignments);
        assert!(
            w <= prev * (1.0 + 1e-9) + 1e-12,
            "swap sweep increased the objective: {prev} -> {w}"
        );
        history.push(w);
        prev = w;
        wcss = w;
    }
    RunResult {
        centroids,
        assignments,
        wcss,
        history,
    }
}

/// Every k-subset of distinct points is tried as an initialization when
/// there are at most this many of them.
const EXHAUSTIVE_INIT_CAP: u64 = 256;

/// Fits k-means. See the module docs for determinism and repair semantics.
pub fn kmeans_fit(
    features: &[Vec<f64>],
    opts: &ClusterFitOptions,
) -> Result<ClusterModel, ClusterError> {
    let distinct = validate(features, opts)?;
    let mut best: Option<RunResult> = None;
    let consider = |best: &mut Option<RunResult>, run: RunResult| {
        if best.as_ref().is_none_or(|b| run.wcss < b.wcss) {
            *best = Some(run);
        }
    };
    // k = 1 converges to the global mean from any start, so enumeration
    // would only repeat the same run.
    if opts.k >= 2 && binomial_capped(distinct, opts.k, EXHAUSTIVE_INIT_CAP) <= EXHAUSTIVE_INIT_CAP
    {
        let points = distinct_points(features);
        for_each_combination(points.len(), opts.k, |idx| {
            let init: Vec<Vec<f64>> = idx.iter().map(|&i| points[i].clone()).collect();
            consider(&mut best, refine(features, opts, init));
        });
    } else {
        for init in 0..opts.n_init {
            let mut rng = SplitMix64::new(derive_seed(opts.seed, "kmeans-init", init as u64));
            let centroids = kmeanspp_init(features, opts.k, &mut rng);
            consider(&mut best, refine(features, opts, centroids));
        }
    }
    let win = best.expect("at least one initialization always runs");
    let mean_features = cluster_means(features, &win.assignments, opts.k);
    Ok(ClusterModel {
        centroids: win.centroids,
        assignments: win.assignments,
        wcss: win.wcss,
        wcss_history: win.history,
        mean_features,
        seed: opts.seed,
    })
}

/// Nearest-centroid lookup for a new feature vector; lowest index on ties.
pub fn assign_nearest(model: &ClusterModel, feature: &[f64]) -> Result<usize, ClusterError> {
    let expected = model.centroids[0].len();
    if feature.len() != expected {
        return Err(ClusterError::DimensionMismatch {
            got: feature.len(),
            expected,
        });
    }
    if feature.iter().any(|v| !v.is_finite()) {
        return Err(ClusterError::NonFinite { row: 0 });
    }
    Ok(nearest(&model.centroids, feature))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(k: usize, seed: u64) -> ClusterFitOptions {
        ClusterFitOptions {
            k,
            seed,
            ..ClusterFitOptions::default()
        }
    }

    #[test]
    fn two_obvious_blobs() {
        // Four points in two pairs; optimal centroids are (0, 0.5) and
        // (10, 0.5) with WCSS = 4 * 0.5^2 = 1.
        let pts = vec![
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![10.0, 0.0],
            vec![10.0, 1.0],
        ];
        let m = kmeans_fit(&pts, &opts(2, 3)).unwrap();
        assert!((m.wcss - 1.0).abs() < 1e-12, "wcss {}", m.wcss);
        let mut cs = m.centroids.clone();
        cs.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
        assert_eq!(cs[0], vec![0.0, 0.5]);
        assert_eq!(cs[1], vec![10.0, 0.5]);
        assert_eq!(m.assignments[0], m.assignments[1]);
        assert_eq!(m.assignments[2], m.assignments[3]);
        assert_ne!(m.assignments[0], m.assignments[2]);
    }

    #[test]
    fn k_equals_one_gives_global_mean() {
        let pts = vec![vec![1.0], vec![2.0], vec![6.0]];
        let m = kmeans_fit(&pts, &opts(1, 0)).unwrap();
        assert!((m.centroids[0][0] - 3.0).abs() < 1e-12);
        assert_eq!(m.assignments, vec![0, 0, 0]);
        let expect = (1.0f64 - 3.0).powi(2) + (2.0f64 - 3.0).powi(2) + (6.0f64 - 3.0).powi(2);
        assert!((m.wcss - expect).abs() < 1e-12);
    }

    #[test]
    fn deterministic_for_fixed_seed_and_sensitive_to_it() {
        let mut rng = SplitMix64::new(41);
        let pts: Vec<Vec<f64>> = (0..60)
            .map(|_| vec![rng.next_gaussian(), rng.next_gaussian()])
            .collect();
        let a = kmeans_fit(&pts, &opts(4, 7)).unwrap();
        let b = kmeans_fit(&pts, &opts(4, 7)).unwrap();
        assert_eq!(a.assignments, b.assignments);
        assert_eq!(a.centroids, b.centroids);
        assert_eq!(a.wcss.to_bits(), b.wcss.to_bits());
        assert_eq!(a.seed, 7);
    }

    #[test]
    fn wcss_history_is_non_increasing() {
        let mut rng = SplitMix64::new(5);
        let pts: Vec<Vec<f64>> = (0..100)
            .map(|i| {
                let center = if i % 3 == 0 { 0.0 } else { 5.0 };
                vec![center + rng.next_gaussian(), rng.next_gaussian()]
            })
            .collect();
        let m = kmeans_fit(&pts, &opts(3, 11)).unwrap();
        for w in m.wcss_history.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9) + 1e-12, "{} -> {}", w[0], w[1]);
        }
        assert_eq!(*m.wcss_history.last().unwrap(), m.wcss);
    }

    #[test]
    fn mean_features_match_assignments() {
        let pts = vec![vec![0.0], vec![1.0], vec![9.0], vec![11.0]];
        let m = kmeans_fit(&pts, &opts(2, 1)).unwrap();
        for j in 0..2 {
            let members: Vec<f64> = pts
                .iter()
                .zip(&m.assignments)
                .filter(|(_, &a)| a == j)
                .map(|(x, _)| x[0])
                .collect();
            let mean = members.iter().sum::<f64>() / members.len() as f64;
            assert!((m.mean_features[j][0] - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_invalid_inputs() {
        let pts = vec![vec![0.0], vec![0.0], vec![1.0]];
        assert!(matches!(
            kmeans_fit(&pts, &opts(3, 0)),
            Err(ClusterError::TooFewDistinctPoints { k: 3, distinct: 2 })
        ));
        assert!(matches!(
            kmeans_fit(&pts, &opts(0, 0)),
            Err(ClusterError::ZeroK)
        ));
        assert!(matches!(
            kmeans_fit(&[], &opts(1, 0)),
            Err(ClusterError::Empty)
        ));
        assert!(matches!(
            kmeans_fit(&[vec![0.0], vec![0.0, 1.0]], &opts(1, 0)),
            Err(ClusterError::RaggedFeatures { row: 1, .. })
        ));
        assert!(matches!(
            kmeans_fit(&[vec![f64::NAN]], &opts(1, 0)),
            Err(ClusterError::NonFinite { row: 0 })
        ));
    }

    #[test]
    fn duplicate_points_are_fine_when_k_allows() {
        let pts = vec![vec![0.0], vec![0.0], vec![0.0], vec![7.0]];
        let m = kmeans_fit(&pts, &opts(2, 13)).unwrap();
        assert!(m.wcss.abs() < 1e-12);
    }

    #[test]
    fn binomial_counts_and_cap() {
        assert_eq!(binomial_capped(10, 3, 256), 120);
        assert_eq!(binomial_capped(4, 2, 256), 6);
        assert_eq!(binomial_capped(5, 5, 256), 1);
        assert_eq!(binomial_capped(23, 2, 256), 253);
        assert_eq!(binomial_capped(24, 2, 256), 257); // 276 capped
        assert_eq!(binomial_capped(100, 50, 256), 257);
    }

    #[test]
    fn combinations_are_exhaustive_and_ordered() {
        let mut seen = Vec::new();
        for_each_combination(5, 3, |idx| seen.push(idx.to_vec()));
        assert_eq!(seen.len(), 10);
        assert_eq!(seen.first().unwrap(), &vec![0, 1, 2]);
        assert_eq!(seen.last().unwrap(), &vec![2, 3, 4]);
        let mut sorted = seen.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, seen, "lexicographic and duplicate-free");

        let mut single = Vec::new();
        for_each_combination(3, 3, |idx| single.push(idx.to_vec()));
        assert_eq!(single, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn small_instances_do_not_depend_on_the_seed() {
        // Few enough distinct points that initialization enumerates every
        // k-subset, so the sampled-restart seed never comes into play.
        let mut rng = SplitMix64::new(8);
        let pts: Vec<Vec<f64>> = (0..9)
            .map(|_| vec![rng.next_gaussian(), rng.next_gaussian()])
            .collect();
        let a = kmeans_fit(&pts, &opts(3, 1)).unwrap();
        let b = kmeans_fit(&pts, &opts(3, 999)).unwrap();
        assert_eq!(a.assignments, b.assignments);
        assert_eq!(a.centroids, b.centroids);
        assert_eq!(a.seed, 1);
        assert_eq!(b.seed, 999);
    }

    #[test]
    fn assign_nearest_ties_break_low() {
        let model = ClusterModel {
            centroids: vec![vec![0.0, 0.5], vec![10.0, 0.5]],
            assignments: vec![0, 1],
            wcss: 0.0,
            wcss_history: vec![0.0],
            mean_features: vec![vec![0.0, 0.5], vec![10.0, 0.5]],
            seed: 0,
        };
        // (5, 0.5) is exactly equidistant; the lower index wins.
        assert_eq!(assign_nearest(&model, &[5.0, 0.5]).unwrap(), 0);
        assert_eq!(assign_nearest(&model, &[5.1, 0.5]).unwrap(), 1);
        assert_eq!(assign_nearest(&model, &[4.9, 0.5]).unwrap(), 0);
        assert!(matches!(
            assign_nearest(&model, &[1.0]),
            Err(ClusterError::DimensionMismatch { .. })
        ));
        assert!(assign_nearest(&model, &[f64::NAN, 0.0]).is_err());
    }
}
