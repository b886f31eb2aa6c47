//! All-pairs attitude evaluation over a population.
//!
//! Agents with bit-identical identities share one row and column, so a
//! population expanded from a handful of prototypes costs a handful of
//! profile evaluations regardless of its size.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::Result;
use crate::model::{AttitudeProfile, CulturalIdentity, Grid, ModelParams, TargetRanges};
use crate::population::Population;

#[derive(Clone, Debug)]
pub struct PairwiseAttitudes {
    class_of: Vec<usize>,
    n_classes: usize,
    /// Row-major `n_classes x n_classes`, observer class by target class.
    values: Vec<f64>,
}

/// Weighted mean and population standard deviation over agent pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairStats {
    pub mean: f64,
    pub std: f64,
    pub pairs: usize,
}

fn identity_key(id: &CulturalIdentity) -> Vec<u64> {
    id.segments()
        .iter()
        .flat_map(|s| [s.position().to_bits(), s.lower().to_bits(), s.upper().to_bits()])
        .collect()
}

impl PairwiseAttitudes {
    pub fn compute(pop: &Population, grid: &Grid, params: &ModelParams) -> Result<Self> {
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut reps: Vec<&CulturalIdentity> = Vec::new();
        let class_of = pop
            .agents()
            .iter()
            .map(|a| {
                *index.entry(identity_key(&a.identity)).or_insert_with(|| {
                    reps.push(&a.identity);
                    reps.len() - 1
                })
            })
            .collect();
        let n = reps.len();
        let targets = reps
            .iter()
            .map(|t| TargetRanges::new(t, grid))
            .collect::<Result<Vec<_>>>()?;
        let rows: Vec<Vec<f64>> = reps
            .par_iter()
            .map(|obs| {
                let profile = AttitudeProfile::new(obs, grid);
                targets
                    .iter()
                    .map(|t| profile.identity_attitude_with(t, params))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        Ok(PairwiseAttitudes {
            class_of,
            n_classes: n,
            values: rows.concat(),
        })
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Attitude of agent `i` about agent `j` (positions in the population).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.class_value(self.class_of[i], self.class_of[j])
    }

    fn class_value(&self, ci: usize, cj: usize) -> f64 {
        self.values[ci * self.n_classes + cj]
    }

    fn class_counts(&self, mut member: impl FnMut(usize) -> bool) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for (i, &c) in self.class_of.iter().enumerate() {
            if member(i) {
                counts[c] += 1;
            }
        }
        counts
    }

    /// Statistics of `w(i, j)` over all `i` in `observers`, `j` in `targets`, `i != j`.
    pub fn pair_stats(
        &self,
        mut observers: impl FnMut(usize) -> bool,
        mut targets: impl FnMut(usize) -> bool,
    ) -> Option<PairStats> {
        let obs = self.class_counts(&mut observers);
        let tgt = self.class_counts(&mut targets);
        let both = self.class_counts(|i| observers(i) && targets(i));
        let weight = |ci: usize, cj: usize| {
            let w = obs[ci] * tgt[cj];
            if ci == cj {
                w - both[ci]
            } else {
                w
            }
        };
        let mut pairs = 0usize;
        let mut sum = 0.0;
        for ci in 0..self.n_classes {
            for cj in 0..self.n_classes {
                let w = weight(ci, cj);
                if w > 0 {
                    pairs += w;
                    sum += w as f64 * self.class_value(ci, cj);
                }
            }
        }
        if pairs == 0 {
            return None;
        }
        let mean = sum / pairs as f64;
        let mut ss = 0.0;
        for ci in 0..self.n_classes {
            for cj in 0..self.n_classes {
                let w = weight(ci, cj);
                if w > 0 {
                    let d = self.class_value(ci, cj) - mean;
                    ss += w as f64 * d * d;
                }
            }
        }
        Some(PairStats {
            mean,
            std: (ss / pairs as f64).sqrt(),
            pairs,
        })
    }

    /// For every agent `i`, the mean of `w(i, j)` over targets `j != i`;
    /// `None` when `i` has no such target.
    pub fn mean_toward(&self, mut targets: impl FnMut(usize) -> bool) -> Vec<Option<f64>> {
        let is_target: Vec<bool> = (0..self.class_of.len()).map(&mut targets).collect();
        let tgt = self.class_counts(|i| is_target[i]);
        let total: usize = tgt.iter().sum();
        let sums: Vec<f64> = (0..self.n_classes)
            .map(|ci| {
                (0..self.n_classes)
                    .filter(|&cj| tgt[cj] > 0)
                    .map(|cj| tgt[cj] as f64 * self.class_value(ci, cj))
                    .sum()
            })
            .collect();
        self.class_of
            .iter()
            .zip(&is_target)
            .map(|(&ci, &self_is_target)| {
                if self_is_target {
                    let n = total - 1;
                    (n > 0).then(|| (sums[ci] - self.class_value(ci, ci)) / n as f64)
                } else {
                    (total > 0).then(|| sums[ci] / total as f64)
                }
            })
            .collect()
    }
}
