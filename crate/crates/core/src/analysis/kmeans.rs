//! Lloyd's algorithm on scalars with k-means++ seeding.
//!
//! Lloyd only finds a local optimum. [`kmeans_1d_restarts`] therefore adds,
//! next to the seeded restarts, one run started from the exact optimum,
//! computed by dynamic programming over contiguous splits of the sorted
//! values (the optimal 1-D partition is always contiguous).

use rand::Rng;

use crate::rng::keyed_rng;
use crate::{Error, Result};

pub const MAX_ITERATIONS: usize = 300;

#[derive(Clone, Debug, PartialEq)]
pub struct KMeans1d {
    /// Ascending.
    pub centers: Vec<f64>,
    /// Cluster index per input value, in input order.
    pub assignments: Vec<usize>,
    /// Within-cluster sum of squares.
    pub inertia: f64,
    /// Inertia after each center update; non-increasing.
    pub inertia_history: Vec<f64>,
    pub iterations: usize,
}

impl KMeans1d {
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.centers.len()];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }
}

pub fn distinct_count(values: &[f64]) -> usize {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

/// One seeded k-means++ / Lloyd run.
pub fn kmeans_1d(values: &[f64], k: usize, seed: u64) -> Result<KMeans1d> {
    run(values, k, seed, 0)
}

/// Best (lowest inertia) of `restarts` seeded runs plus one run started from
/// the exact optimal centers; earlier runs win ties.
pub fn kmeans_1d_restarts(values: &[f64], k: usize, seed: u64, restarts: usize) -> Result<KMeans1d> {
    let mut best = run(values, k, seed, 0)?;
    for r in 1..restarts.max(1) as u64 {
        let candidate = run(values, k, seed, r)?;
        if candidate.inertia < best.inertia {
            best = candidate;
        }
    }
    let exact = lloyd(values, optimal_centers(values, k));
    if exact.inertia < best.inertia {
        best = exact;
    }
    Ok(best)
}

fn check(values: &[f64], k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    if values.is_empty() {
        return Err(Error::Argument("cannot cluster an empty set".into()));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Argument(format!("non-finite value {v}")));
    }
    let distinct = distinct_count(values);
    if k > distinct {
        return Err(Error::DegenerateK { k, distinct });
    }
    Ok(())
}

fn run(values: &[f64], k: usize, seed: u64, restart: u64) -> Result<KMeans1d> {
    check(values, k)?;
    let mut rng = keyed_rng("kmeans1d", seed, &k.to_string(), restart);
    Ok(lloyd(values, plus_plus(values, k, &mut rng)))
}

fn lloyd(values: &[f64], mut centers: Vec<f64>) -> KMeans1d {
    let k = centers.len();
    let n = values.len();
    let mut assignments = vec![usize::MAX; n];
    let mut history = Vec::new();
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        let mut changed = false;
        for (a, &v) in assignments.iter_mut().zip(values) {
            let nearest = nearest(&centers, v);
            if *a != nearest {
                *a = nearest;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        iterations += 1;
        update_centers(values, &mut assignments, &mut centers);
        history.push(inertia(values, &assignments, &centers));
    }

    // relabel so that centers ascend
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| centers[a].total_cmp(&centers[b]));
    let mut relabel = vec![0; k];
    for (new, &old) in order.iter().enumerate() {
        relabel[old] = new;
    }
    let centers: Vec<f64> = order.iter().map(|&o| centers[o]).collect();
    let assignments: Vec<usize> = assignments.iter().map(|&a| relabel[a]).collect();
    let inertia = inertia(values, &assignments, &centers);

    KMeans1d {
        centers,
        assignments,
        inertia,
        inertia_history: history,
        iterations,
    }
}

/// Centers of the minimum-inertia partition into `k` contiguous groups of
/// the sorted values. `O(k n^2)`.
fn optimal_centers(values: &[f64], k: usize) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let anchor = v[0];
    let mut s1 = vec![0.0; n + 1];
    let mut s2 = vec![0.0; n + 1];
    for (i, x) in v.iter().enumerate() {
        let d = x - anchor;
        s1[i + 1] = s1[i] + d;
        s2[i + 1] = s2[i] + d * d;
    }
    // cost of v[i..j]
    let cost = |i: usize, j: usize| {
        let m = (j - i) as f64;
        let s = s1[j] - s1[i];
        (s2[j] - s2[i] - s * s / m).max(0.0)
    };
    // best[g][j]: g + 1 groups over v[..j]; cut[g][j]: start of the last group
    let mut best = vec![vec![f64::INFINITY; n + 1]; k];
    let mut cut = vec![vec![0usize; n + 1]; k];
    for (j, b) in best[0].iter_mut().enumerate().skip(1) {
        *b = cost(0, j);
    }
    for g in 1..k {
        for j in g + 1..=n {
            for i in g..j {
                let c = best[g - 1][i] + cost(i, j);
                if c < best[g][j] {
                    best[g][j] = c;
                    cut[g][j] = i;
                }
            }
        }
    }
    let mut centers = vec![0.0; k];
    let mut j = n;
    for g in (0..k).rev() {
        let i = if g == 0 { 0 } else { cut[g][j] };
        centers[g] = anchored_mean(&v[i..j]);
        j = i;
    }
    centers
}

/// Mean computed relative to the first element, exact for constant input.
fn anchored_mean(v: &[f64]) -> f64 {
    let a = v[0];
    a + v.iter().map(|x| x - a).sum::<f64>() / v.len() as f64
}

fn plus_plus(values: &[f64], k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut centers = Vec::with_capacity(k);
    centers.push(values[rng.random_range(0..values.len())]);
    let mut d2: Vec<f64> = values.iter().map(|v| (v - centers[0]).powi(2)).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        // k <= distinct values guarantees some point is away from every center
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = d2
            .iter()
            .rposition(|&d| d > 0.0)
            .expect("a point with positive distance");
        for (i, &d) in d2.iter().enumerate() {
            acc += d;
            if acc > target && d > 0.0 {
                pick = i;
                break;
            }
        }
        let c = values[pick];
        centers.push(c);
        for (d, v) in d2.iter_mut().zip(values) {
            *d = d.min((v - c).powi(2));
        }
    }
    centers
}

fn nearest(centers: &[f64], v: f64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, c) in centers.iter().enumerate() {
        let d = (v - c).abs();
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    best
}

fn update_centers(values: &[f64], assignments: &mut [usize], centers: &mut [f64]) {
    let k = centers.len();
    loop {
        let mut anchors = vec![f64::NAN; k];
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for (&a, &v) in assignments.iter().zip(values) {
            if counts[a] == 0 {
                anchors[a] = v;
            }
            sums[a] += v - anchors[a];
            counts[a] += 1;
        }
        for j in 0..k {
            if counts[j] > 0 {
                centers[j] = anchors[j] + sums[j] / counts[j] as f64;
            }
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        // reseed with the point farthest from its own center, taken from a
        // cluster that can spare it
        let far = (0..values.len())
            .filter(|&i| counts[assignments[i]] > 1)
            .max_by(|&a, &b| {
                let da = (values[a] - centers[assignments[a]]).abs();
                let db = (values[b] - centers[assignments[b]]).abs();
                da.total_cmp(&db).then(b.cmp(&a))
            })
            .expect("k <= n leaves a cluster with two or more points");
        assignments[far] = empty;
        centers[empty] = values[far];
    }
}

fn inertia(values: &[f64], assignments: &[usize], centers: &[f64]) -> f64 {
    values
        .iter()
        .zip(assignments)
        .map(|(v, &a)| (v - centers[a]).powi(2))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Optimal 1-D k-means by enumerating contiguous partitions of the
    /// sorted values.
    fn exhaustive(values: &[f64], k: usize) -> f64 {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        fn cost(v: &[f64]) -> f64 {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|x| (x - m).powi(2)).sum()
        }
        fn go(v: &[f64], k: usize) -> f64 {
            if k == 1 {
                return cost(v);
            }
            (1..=v.len() - (k - 1))
                .map(|cut| cost(&v[..cut]) + go(&v[cut..], k - 1))
                .fold(f64::INFINITY, f64::min)
        }
        go(&v, k)
    }

    #[test]
    fn single_cluster_of_equal_values() {
        let r = kmeans_1d(&[0.8; 10], 1, 0).unwrap();
        assert_eq!(r.centers, vec![0.8]);
        assert_eq!(r.inertia, 0.0);
    }

    #[test]
    fn two_spikes_separate() {
        let mut v = vec![0.1; 40];
        v.extend([0.9; 10]);
        let r = kmeans_1d_restarts(&v, 2, 7, 10).unwrap();
        assert_eq!(r.centers, vec![0.1, 0.9]);
        assert_eq!(r.sizes(), vec![40, 10]);
        assert!((r.inertia - exhaustive(&v, 2)).abs() < 1e-12);
    }

    #[test]
    fn too_many_clusters() {
        let err = kmeans_1d(&[0.1, 0.1, 0.9], 3, 0).unwrap_err();
        assert!(matches!(err, Error::DegenerateK { k: 3, distinct: 2 }));
        assert!(kmeans_1d(&[], 1, 0).is_err());
        assert!(kmeans_1d(&[0.1], 0, 0).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let v: Vec<f64> = (0..50).map(|i| ((i * 37) % 101) as f64 / 101.0).collect();
        assert_eq!(kmeans_1d(&v, 4, 3).unwrap(), kmeans_1d(&v, 4, 3).unwrap());
    }

    proptest! {
        #[test]
        fn inertia_never_increases(v in prop::collection::vec(0.0f64..1.0, 2..60), k in 1usize..8, seed: u64) {
            prop_assume!(k <= distinct_count(&v));
            let r = kmeans_1d(&v, k, seed).unwrap();
            for w in r.inertia_history.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12);
            }
            prop_assert_eq!(r.centers.len(), k);
            prop_assert!(r.centers.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn restarts_reach_exhaustive_optimum(v in prop::collection::vec(0.0f64..1.0, 3..=12), k in 2usize..5, seed: u64) {
            prop_assume!(k <= distinct_count(&v));
            let r = kmeans_1d_restarts(&v, k, seed, 10).unwrap();
            let best = exhaustive(&v, k);
            prop_assert!((r.inertia - best).abs() <= 1e-12, "lloyd {} vs optimum {}", r.inertia, best);
        }
    }
}
