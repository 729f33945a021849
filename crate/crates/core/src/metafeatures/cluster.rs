use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;

use super::{encode, TabularDataset};
use crate::{seed, Scalar};

const RESTARTS: usize = 10;
const MAX_ITER: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans<T> {
    pub labels: Vec<usize>,
    pub centers: Vec<Vec<T>>,
    pub inertia: T,
}

fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

fn nearest<T: Scalar>(point: &[T], centers: &[Vec<T>]) -> (usize, T) {
    centers
        .iter()
        .enumerate()
        .map(|(c, center)| (c, sq_dist(point, center)))
        .fold((0, T::infinity()), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// Samples an index with probability proportional to `weights`.
fn weighted_pick<T: Scalar, R: Rng>(weights: &[T], total: T, rng: &mut R) -> usize {
    let target = T::lit(rng.gen::<f64>()) * total;
    let mut acc = T::zero();
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if acc > target && w > T::zero() {
            return i;
        }
    }
    weights.iter().rposition(|&w| w > T::zero()).unwrap_or(0)
}

/// Greedy k-means++: each new center is the best of `2 + ln k` candidates
/// drawn proportionally to squared distance.
fn seed_centers<T: Scalar, R: Rng>(points: &[Vec<T>], k: usize, rng: &mut R) -> Vec<Vec<T>> {
    let n = points.len();
    let trials = 2 + (k as f64).ln().floor() as usize;
    let mut centers = vec![points[rng.gen_range(0..n)].clone()];
    let mut closest: Vec<T> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let potential: T = closest.iter().copied().sum();
        let mut best: Option<(T, usize, Vec<T>)> = None;
        for _ in 0..trials {
            let cand = weighted_pick(&closest, potential, rng);
            let updated: Vec<T> = points.iter().zip(&closest).map(|(p, &c)| c.min(sq_dist(p, &points[cand]))).collect();
            let pot: T = updated.iter().copied().sum();
            if best.as_ref().is_none_or(|b| pot < b.0) {
                best = Some((pot, cand, updated));
            }
        }
        let (_, cand, updated) = best.expect("at least two trials");
        centers.push(points[cand].clone());
        closest = updated;
    }
    centers
}

fn lloyd<T: Scalar>(points: &[Vec<T>], mut centers: Vec<Vec<T>>) -> KMeans<T> {
    let k = centers.len();
    let dims = points[0].len();
    let mut labels: Vec<usize> = points.iter().map(|p| nearest(p, &centers).0).collect();
    for _ in 0..MAX_ITER {
        let mut sums = vec![vec![T::zero(); dims]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, &v) in sums[l].iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|&s| s / T::from_count(counts[c])).collect();
            } else {
                // Relocate an empty cluster to the point worst served by its center.
                let far = points
                    .iter()
                    .zip(&labels)
                    .enumerate()
                    .map(|(i, (p, &l))| (i, sq_dist(p, &centers[l])))
                    .fold((0, T::neg_infinity()), |b, cur| if cur.1 > b.1 { cur } else { b })
                    .0;
                centers[c] = points[far].clone();
            }
        }
        let next: Vec<usize> = points.iter().map(|p| nearest(p, &centers).0).collect();
        if next == labels {
            break;
        }
        labels = next;
    }
    let inertia = points.iter().zip(&labels).map(|(p, &l)| sq_dist(p, &centers[l])).sum();
    KMeans { labels, centers, inertia }
}

/// k-means with greedy k-means++ seeding, 10 restarts and at most 100 Lloyd
/// iterations each; the lowest-inertia run is returned.
pub fn kmeans<T: Scalar>(points: &[Vec<T>], k: usize, seed: u64) -> KMeans<T> {
    assert!(k >= 1 && k <= points.len(), "k must lie in 1..=n");
    let mut rng = seed::rng(seed);
    let mut best: Option<KMeans<T>> = None;
    for _ in 0..RESTARTS {
        let run = lloyd(points, seed_centers(points, k, &mut rng));
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    best.expect("restarts > 0")
}

fn distance_matrix<T: Scalar>(points: &[Vec<T>]) -> Vec<Vec<T>> {
    points.iter().map(|a| points.iter().map(|b| sq_dist(a, b).sqrt()).collect()).collect()
}

/// Mean silhouette for a labelling, from a precomputed distance matrix.
/// Points alone in their cluster score 0, as do points with `a = b = 0`.
pub fn silhouette_score<T: Scalar>(dist: &[Vec<T>], labels: &[usize], k: usize) -> T {
    let n = labels.len();
    let mut sizes = vec![0usize; k];
    for &l in labels {
        sizes[l] += 1;
    }
    let mut total = T::zero();
    for i in 0..n {
        if sizes[labels[i]] <= 1 {
            continue;
        }
        let mut sums = vec![T::zero(); k];
        for j in 0..n {
            sums[labels[j]] += dist[i][j];
        }
        let a = sums[labels[i]] / T::from_count(sizes[labels[i]] - 1);
        let b = (0..k)
            .filter(|&c| c != labels[i] && sizes[c] > 0)
            .map(|c| sums[c] / T::from_count(sizes[c]))
            .fold(T::infinity(), T::min);
        let denom = a.max(b);
        if denom > T::zero() && b.is_finite() {
            total += (b - a) / denom;
        }
    }
    total / T::from_count(n)
}

fn distinct_rows<T: Scalar>(points: &[Vec<T>]) -> usize {
    let keys: BTreeSet<Vec<u64>> = points
        .iter()
        .map(|r| r.iter().map(|v| (v.to_f64_lossy() + 0.0).to_bits()).collect())
        .collect();
    keys.len()
}

/// Silhouette of the k-means clustering of `points` for each `k`.
///
/// When every row is identical the value is 0; otherwise a `k` larger than
/// the number of distinct rows gives `None`.
pub fn silhouette_profile<T: Scalar>(points: &[Vec<T>], ks: &[usize], seed: u64) -> Vec<Option<T>> {
    if points.is_empty() {
        return vec![None; ks.len()];
    }
    let distinct = distinct_rows(points);
    if distinct == 1 {
        return vec![Some(T::zero()); ks.len()];
    }
    let dist = distance_matrix(points);
    ks.par_iter()
        .map(|&k| {
            (k >= 2 && k <= distinct).then(|| {
                let fit = kmeans(points, k, seed::derive(seed, &[k as u64]));
                silhouette_score(&dist, &fit.labels, k)
            })
        })
        .collect()
}

pub fn silhouette_of_points<T: Scalar>(points: &[Vec<T>], k: usize, seed: u64) -> Option<T> {
    silhouette_profile(points, &[k], seed).pop().flatten()
}

/// Silhouette index of k-means on the encoded dataset (all rows).
pub fn silhouette_index<T: Scalar>(ds: &TabularDataset<T>, k: usize, seed: u64) -> Option<T> {
    silhouette_of_points(&encode(ds).rows, k, seed)
}
