//! Orbit enumeration over freely reduced words.
//!
//! Words are grown on the left, so the orbit point of `g w` is `g` applied
//! to the point of `w` and only vectors are carried unless matrix hashing
//! is requested. The top-level letters are processed in parallel and
//! merged in letter order; distances are then sorted, so the sample does
//! not depend on the thread count.

use std::collections::HashSet;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generators::GroupGenerators;
use super::model::{distance_with_norms, CMat, CVec, IsometryModel};
use super::OrbitError;

/// Word cap used when `HYPSPEC_MAX_WORDS` is unset.
pub const DEFAULT_MAX_WORDS: u64 = 50_000_000;

/// Quantization step of the matrix hash.
pub const HASH_RESOLUTION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DedupPolicy {
    /// Every freely reduced word is one group element.
    FreeReduction,
    /// Additionally collapse words whose matrices agree after quantization.
    MatrixHash,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitSample {
    pub model: IsometryModel,
    #[serde(skip)]
    pub base_point: CVec,
    pub max_word_length: usize,
    pub dedup_policy: DedupPolicy,
    /// `d(x, gamma x)` for the enumerated elements, ascending.
    pub distances: Vec<f64>,
    /// Number of reduced words of each length `0..=max_word_length`.
    pub words_by_length: Vec<u64>,
    /// Smallest distance among the words of each length.
    pub shell_minimum: Vec<f64>,
    pub duplicates_removed: u64,
}

impl OrbitSample {
    /// `N(R)`, the number of recorded elements with `d <= R`.
    pub fn count_by_radius(&self, r: f64) -> usize {
        self.distances.partition_point(|&d| d <= r)
    }

    pub fn words_enumerated(&self) -> u64 {
        self.words_by_length.iter().sum()
    }

    /// Radius below which the ball count is taken as complete: the
    /// smallest displacement among words of maximal length. Elements of
    /// longer words are assumed to lie farther out.
    pub fn completeness_radius(&self) -> f64 {
        *self.shell_minimum.last().expect("identity shell")
    }
}

/// Number of freely reduced words of length at most `max_len` in `g` free generators.
pub fn word_count(generators: usize, max_len: usize) -> u128 {
    let mut total: u128 = 1;
    let mut shell: u128 = 2 * generators as u128;
    for _ in 0..max_len {
        total = total.saturating_add(shell);
        shell = shell.saturating_mul(2 * generators as u128 - 1);
    }
    total
}

/// The word cap from `HYPSPEC_MAX_WORDS`, falling back to [`DEFAULT_MAX_WORDS`].
pub fn max_words_from_env() -> Result<u64, OrbitError> {
    match std::env::var("HYPSPEC_MAX_WORDS") {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map_err(|_| OrbitError::ParseError(format!("HYPSPEC_MAX_WORDS is not a count: {v:?}"))),
        Err(_) => Ok(DEFAULT_MAX_WORDS),
    }
}

pub fn enumerate_orbit(
    gens: &GroupGenerators,
    base: &CVec,
    max_len: usize,
    policy: DedupPolicy,
) -> Result<OrbitSample, OrbitError> {
    enumerate_orbit_capped(gens, base, max_len, policy, max_words_from_env()?)
}

struct Branch {
    entries: Vec<(f64, Option<Vec<i128>>)>,
    counts: Vec<u64>,
    minima: Vec<f64>,
}

struct Walk<'a> {
    model: IsometryModel,
    letters: Vec<&'a CMat>,
    base: &'a [Complex64],
    norm: f64,
    max_len: usize,
    hash: bool,
}

impl Walk<'_> {
    fn visit(&self, depth: usize, left: usize, point: &[Complex64], mat: Option<&CMat>, out: &mut Branch) {
        let d = distance_with_norms(&self.model, self.base, point, self.norm, self.norm);
        out.counts[depth] += 1;
        out.minima[depth] = out.minima[depth].min(d);
        out.entries.push((d, mat.map(quantize)));
        if depth == self.max_len {
            return;
        }
        let mut next = vec![Complex64::new(0.0, 0.0); point.len()];
        for (k, g) in self.letters.iter().enumerate() {
            if k == left ^ 1 {
                continue;
            }
            for (i, v) in next.iter_mut().enumerate() {
                *v = (0..point.len()).map(|j| g[(i, j)] * point[j]).sum();
            }
            let child = mat.map(|m| *g * m);
            self.visit(depth + 1, k, &next, child.as_ref(), out);
        }
    }
}

fn quantize(m: &CMat) -> Vec<i128> {
    m.iter()
        .flat_map(|v| [v.re, v.im])
        .map(|x| (x / HASH_RESOLUTION).round() as i128)
        .collect()
}

pub fn enumerate_orbit_capped(
    gens: &GroupGenerators,
    base: &CVec,
    max_len: usize,
    policy: DedupPolicy,
    cap: u64,
) -> Result<OrbitSample, OrbitError> {
    if max_len < 1 {
        return Err(OrbitError::DomainError("max_len must be at least 1".into()));
    }
    let model = gens.model;
    let norm = model.point_norm(base.as_slice())?;
    let words = word_count(gens.generators.len(), max_len);
    if words > cap as u128 {
        return Err(OrbitError::CombinatorialBlowup { words, cap });
    }
    let hash = policy == DedupPolicy::MatrixHash;
    let walk = Walk { model, letters: gens.letters(), base: base.as_slice(), norm, max_len, hash };
    let empty = || Branch { entries: Vec::new(), counts: vec![0; max_len + 1], minima: vec![f64::INFINITY; max_len + 1] };

    let mut identity = empty();
    identity.counts[0] = 1;
    identity.minima[0] = 0.0;
    let id = CMat::identity(model.dim(), model.dim());
    identity.entries.push((0.0, walk.hash.then(|| quantize(&id))));

    let branches: Vec<Branch> = (0..walk.letters.len())
        .into_par_iter()
        .map(|k| {
            let g = walk.letters[k];
            let point: Vec<Complex64> = (0..base.len()).map(|i| (0..base.len()).map(|j| g[(i, j)] * base[j]).sum()).collect();
            let mut out = empty();
            let mat = walk.hash.then(|| g.clone());
            walk.visit(1, k, &point, mat.as_ref(), &mut out);
            out
        })
        .collect();

    let mut counts = vec![0u64; max_len + 1];
    let mut minima = vec![f64::INFINITY; max_len + 1];
    let mut distances = Vec::with_capacity(words.min(cap as u128) as usize);
    let mut seen: HashSet<Vec<i128>> = HashSet::new();
    let mut duplicates = 0u64;
    for b in std::iter::once(identity).chain(branches) {
        for l in 0..=max_len {
            counts[l] += b.counts[l];
            minima[l] = minima[l].min(b.minima[l]);
        }
        for (d, key) in b.entries {
            let fresh = key.map_or(true, |k| seen.insert(k));
            if fresh {
                distances.push(d);
            } else {
                duplicates += 1;
            }
        }
    }
    distances.sort_by(f64::total_cmp);
    Ok(OrbitSample {
        model,
        base_point: base.clone(),
        max_word_length: max_len,
        dedup_policy: policy,
        distances,
        words_by_length: counts,
        shell_minimum: minima,
        duplicates_removed: duplicates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit_geometry::generators::{cyclic_boost, schottky_pair};
    use crate::orbit_geometry::model::distance;

    #[test]
    fn cyclic_distances() {
        let g = cyclic_boost(3, 1.5).unwrap();
        let s = enumerate_orbit(&g, &g.base(), 6, DedupPolicy::FreeReduction).unwrap();
        assert_eq!(s.distances.len(), 13);
        assert_eq!(s.distances[0], 0.0);
        for k in 1..=6 {
            for j in 0..2 {
                assert!((s.distances[2 * k - 1 + j] - 1.5 * k as f64).abs() < 1e-12);
            }
        }
        assert_eq!(s.count_by_radius(3.0 + 1e-9), 5);
        assert!((s.completeness_radius() - 9.0).abs() < 1e-12);
    }

    #[test]
    fn schottky_word_count() {
        let g = schottky_pair(2.0, 3.0).unwrap();
        let s = enumerate_orbit(&g, &g.base(), 10, DedupPolicy::FreeReduction).unwrap();
        let expected: u64 = 1 + (1..=10).map(|k| 4 * 3u64.pow(k - 1)).sum::<u64>();
        assert_eq!(s.words_enumerated(), expected);
        assert_eq!(s.distances.len() as u64, expected);
        assert_eq!(word_count(2, 10), expected as u128);
        let hashed = enumerate_orbit(&g, &g.base(), 6, DedupPolicy::MatrixHash).unwrap();
        assert_eq!(hashed.duplicates_removed, 0);
    }

    #[test]
    fn matrix_hash_collapses_repeated_generator() {
        // Listing the same translation twice makes a and b coincide.
        let a = cyclic_boost(2, 1.0).unwrap();
        let m = a.generators[0].matrix.clone();
        let g = GroupGenerators::new(a.model, vec![("a".into(), m.clone()), ("b".into(), m)]).unwrap();
        let free = enumerate_orbit(&g, &g.base(), 3, DedupPolicy::FreeReduction).unwrap();
        let hashed = enumerate_orbit(&g, &g.base(), 3, DedupPolicy::MatrixHash).unwrap();
        assert_eq!(free.distances.len(), 1 + 4 + 12 + 36);
        // Words in a, b of length <= 3 give the translations a^k for |k| <= 3.
        assert_eq!(hashed.distances.len(), 7);
        assert_eq!(hashed.duplicates_removed as usize, free.distances.len() - 7);
    }

    #[test]
    fn blowup_guard() {
        let g = schottky_pair(2.0, 3.0).unwrap();
        let err = enumerate_orbit_capped(&g, &g.base(), 12, DedupPolicy::FreeReduction, 1000).unwrap_err();
        assert!(matches!(err, OrbitError::CombinatorialBlowup { cap: 1000, .. }));
        assert!(enumerate_orbit_capped(&g, &g.base(), 0, DedupPolicy::FreeReduction, 1000).is_err());
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let g = schottky_pair(1.0, 2.0).unwrap();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| enumerate_orbit(&g, &g.base(), 7, DedupPolicy::MatrixHash).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(4));
        assert_eq!(one, run(1));
    }

    #[test]
    fn off_center_base_point() {
        let g = schottky_pair(1.5, 2.5).unwrap();
        let x = CVec::from_vec(vec![Complex64::new(0.3, 0.0), Complex64::new(-0.2, 0.0), Complex64::new(1.2, 0.0)]);
        let s = enumerate_orbit(&g, &x, 2, DedupPolicy::FreeReduction).unwrap();
        let a = &g.generators[0].matrix;
        let d = distance(&g.model, x.as_slice(), (a * &x).as_slice()).unwrap();
        assert!(s.distances.iter().any(|v| (v - d).abs() < 1e-12));
    }
}
