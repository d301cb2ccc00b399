//! Cover comparison metrics (overlapping F1, ONMI distance) and descriptive
//! cover statistics.
//!
//! Both metrics operate on plain member-ID sets so detected covers can be
//! compared against ground-truth files without rebuilding the graph. IDs are
//! original input IDs; each community must be sorted ascending and deduped
//! (see [`normalize_communities`]).

use crate::error::Error;

/// Sort and dedupe raw community member lists; drops empty communities.
pub fn normalize_communities(communities: &[Vec<u64>]) -> Vec<Vec<u64>> {
    communities
        .iter()
        .filter(|c| !c.is_empty())
        .map(|c| {
            let mut m = c.clone();
            m.sort_unstable();
            m.dedup();
            m
        })
        .collect()
}

fn intersection_count(a: &[u64], b: &[u64]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

fn pair_f1(detected: &[u64], truth: &[u64]) -> f64 {
    let inter = intersection_count(detected, truth);
    if inter == 0 {
        return 0.0;
    }
    let precision = inter as f64 / detected.len() as f64;
    let recall = inter as f64 / truth.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Average best-match F1 of the detected cover against the truth cover.
/// Asymmetric: every detected community is scored by its best truth match.
/// Communities must be sorted ascending (see [`normalize_communities`]).
pub fn f1_overlapping(detected: &[Vec<u64>], truth: &[Vec<u64>]) -> Result<f64, Error> {
    if detected.is_empty() || truth.is_empty() {
        return Err(Error::UndefinedScore(
            "overlapping F1 needs nonempty covers".into(),
        ));
    }
    let sum: f64 = detected
        .iter()
        .map(|c| {
            truth
                .iter()
                .map(|t| pair_f1(c, t))
                .fold(0.0f64, f64::max)
        })
        .sum();
    Ok(sum / detected.len() as f64)
}

/// -p log2 p term for a count out of n.
fn h(count: usize, n: usize) -> f64 {
    if count == 0 {
        0.0
    } else {
        let p = count as f64 / n as f64;
        -p * p.log2()
    }
}

/// Entropy of a community viewed as a binary indicator over n nodes.
fn community_entropy(size: usize, n: usize) -> f64 {
    h(size, n) + h(n - size, n)
}

/// Constrained conditional entropy H*(C'|C): the lack of information about
/// membership of C' once C is known. Falls back to H(C') for unmatchable
/// pairs (the joint split must be dominated by agreement terms).
fn conditional_entropy(detected: &[u64], truth: &[u64], n: usize) -> f64 {
    let both = intersection_count(detected, truth);
    let only_detected = detected.len() - both;
    let only_truth = truth.len() - both;
    let neither = n - both - only_detected - only_truth;
    if h(both, n) + h(neither, n) >= h(only_detected, n) + h(only_truth, n) {
        let joint = h(both, n) + h(neither, n) + h(only_detected, n) + h(only_truth, n);
        joint - community_entropy(truth.len(), n)
    } else {
        community_entropy(detected.len(), n)
    }
}

/// Average over `from` of the best-match normalized lack of information
/// against `to`: min over `to` of H*(C'|C) / H(C').
fn directional_distance(from: &[Vec<u64>], to: &[Vec<u64>], n: usize) -> f64 {
    let sum: f64 = from
        .iter()
        .map(|c| {
            let entropy = community_entropy(c.len(), n);
            if entropy <= 0.0 {
                return 0.0;
            }
            let best = to
                .iter()
                .map(|t| conditional_entropy(c, t, n))
                .fold(f64::INFINITY, f64::min);
            (best / entropy).clamp(0.0, 1.0)
        })
        .sum();
    sum / from.len() as f64
}

/// Symmetric overlapping NMI distance over a universe of `n` nodes:
/// 0 identical, 1 maximally dissimilar. The mean of the two directional
/// best-match averages.
pub fn onmi_distance(detected: &[Vec<u64>], truth: &[Vec<u64>], n: usize) -> Result<f64, Error> {
    if n == 0 {
        return Err(Error::UndefinedScore("ONMI needs a nonempty universe".into()));
    }
    if detected.is_empty() || truth.is_empty() {
        return Err(Error::UndefinedScore("ONMI needs nonempty covers".into()));
    }
    Ok(0.5 * (directional_distance(detected, truth, n) + directional_distance(truth, detected, n)))
}

/// One-directional variant: average best-match distance of detected
/// communities against the truth only.
pub fn onmi_distance_one_sided(
    detected: &[Vec<u64>],
    truth: &[Vec<u64>],
    n: usize,
) -> Result<f64, Error> {
    if n == 0 {
        return Err(Error::UndefinedScore("ONMI needs a nonempty universe".into()));
    }
    if detected.is_empty() || truth.is_empty() {
        return Err(Error::UndefinedScore("ONMI needs nonempty covers".into()));
    }
    Ok(directional_distance(detected, truth, n))
}

/// Descriptive statistics of a cover.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverStats {
    pub community_count: usize,
    pub size_min: usize,
    pub size_max: usize,
    pub size_mean: f64,
    /// Mean memberships over the nodes that hold at least one membership.
    pub overlap_mean: f64,
}

pub fn cover_stats(communities: &[Vec<u64>]) -> Result<CoverStats, Error> {
    let normalized = normalize_communities(communities);
    if normalized.is_empty() {
        return Err(Error::UndefinedScore("stats of an empty cover".into()));
    }
    let sizes: Vec<usize> = normalized.iter().map(|c| c.len()).collect();
    let total: usize = sizes.iter().sum();
    let mut covered: Vec<u64> = normalized.iter().flatten().copied().collect();
    covered.sort_unstable();
    covered.dedup();
    Ok(CoverStats {
        community_count: normalized.len(),
        size_min: *sizes.iter().min().expect("nonempty"),
        size_max: *sizes.iter().max().expect("nonempty"),
        size_mean: total as f64 / normalized.len() as f64,
        overlap_mean: total as f64 / covered.len() as f64,
    })
}
