//! Per-cluster majority decoding with known partitions, and the exact error
//! probability of that decoder.
//!
//! The ML decoder ignores erasures and takes a majority vote inside every
//! cluster. Its error probability factorizes over clusters because the
//! channel is memoryless, so the exact value only needs the multiset of
//! cluster sizes.

use std::collections::HashMap;

use rand::Rng;
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::model::{BlockConstantMatrix, ChannelParams, ObservedMatrix, Partition, TiePolicy};

/// Largest cluster the exact evaluator accepts by default.
pub const DEFAULT_SIZE_CAP: usize = 20_000;

/// Output of [`majority_decode`].
#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub estimate: BlockConstantMatrix,
    pub tie_occurred: bool,
}

/// Majority vote over the non-erased entries of each cluster `rows x cols`.
///
/// Tied clusters (including fully erased ones) are scanned row-major over
/// cluster ids. `FairCoin` draws one fair bit per tied cluster from `rng`;
/// `CountAsError` emits 0 and sets `tie_occurred`.
pub fn majority_decode<R: Rng + ?Sized>(
    y: &ObservedMatrix,
    rows: &Partition,
    cols: &Partition,
    tie: TiePolicy,
    rng: &mut R,
) -> Result<Decoded> {
    if rows.len() != y.m() || cols.len() != y.n() {
        return Err(Error::DimensionMismatch(format!(
            "partitions of length {}x{} for a {}x{} observation",
            rows.len(),
            cols.len(),
            y.m(),
            y.n()
        )));
    }
    let t = cols.cluster_count();
    let cells = rows.cluster_count() * t;
    // votes[c] = (#zeros, #ones)
    let mut votes = vec![(0u32, 0u32); cells];
    for (i, &ri) in rows.labels().iter().enumerate() {
        let base = ri * t;
        for (sym, &cj) in y.row(i).iter().zip(cols.labels()) {
            match sym.bit() {
                Some(0) => votes[base + cj].0 += 1,
                Some(_) => votes[base + cj].1 += 1,
                None => {}
            }
        }
    }

    let mut tie_occurred = false;
    let values = votes
        .iter()
        .map(|&(zeros, ones)| match zeros.cmp(&ones) {
            std::cmp::Ordering::Greater => 0,
            std::cmp::Ordering::Less => 1,
            std::cmp::Ordering::Equal => {
                tie_occurred = true;
                match tie {
                    TiePolicy::FairCoin => u8::from(rng.random::<bool>()),
                    TiePolicy::CountAsError => 0,
                }
            }
        })
        .collect();

    Ok(Decoded {
        estimate: BlockConstantMatrix::new(rows.clone(), cols.clone(), values)?,
        tie_occurred,
    })
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::param("p", format!("{p} not in [0, 1/2]")));
    }
    Ok(())
}

/// `k ln x`, with `0 ln 0 = 0`.
fn xlnx(k: usize, x: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * x.ln()
    }
}

/// `ln P(Binomial(n, prob) = k)`.
fn ln_binomial_pmf(n: usize, k: usize, prob: f64) -> f64 {
    ln_binomial(n as u64, k as u64) + xlnx(k, prob) + xlnx(n - k, 1.0 - prob)
}

/// `P(Binomial(s, p) >= k)` for `k >= s/2` and `p <= 1/2`, where the terms are
/// non-increasing. Evaluated as the first term in log space times a ratio
/// series, so nothing underflows before it is negligible.
fn upper_tail_from_half(s: usize, k: usize, p: f64) -> f64 {
    if k > s {
        return 0.0;
    }
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let odds = p / (1.0 - p);
    let mut term = 1.0;
    let mut sum = 1.0;
    for q in k..s {
        term *= (s - q) as f64 / (q + 1) as f64 * odds;
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    (ln_binomial_pmf(s, k, p)).exp() * sum
}

/// Probability that majority decoding of a cluster with `s` non-erased
/// samples is wrong.
pub fn cluster_error_prob_given_s(s: usize, p: f64, tie: TiePolicy) -> Result<f64> {
    check_p(p)?;
    Ok(error_given_s(s, p, tie))
}

fn tie_loss(tie: TiePolicy) -> f64 {
    match tie {
        TiePolicy::FairCoin => 0.5,
        TiePolicy::CountAsError => 1.0,
    }
}

fn error_given_s(s: usize, p: f64, tie: TiePolicy) -> f64 {
    if s % 2 == 1 {
        upper_tail_from_half(s, s / 2 + 1, p)
    } else {
        let half = s / 2;
        let tie_mass = if p == 0.0 {
            if half == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            ln_binomial_pmf(s, half, p).exp()
        };
        upper_tail_from_half(s, half + 1, p) + tie_loss(tie) * tie_mass
    }
}

/// Probability of a correct decision in a cluster with `s` non-erased samples.
pub fn cluster_correct_prob_given_s(s: usize, p: f64, tie: TiePolicy) -> Result<f64> {
    Ok(1.0 - cluster_error_prob_given_s(s, p, tie)?)
}

/// Probability that a cluster of `size` entries is decoded wrongly, averaged
/// over the number of non-erased samples.
pub fn cluster_error_prob(size: usize, ch: &ChannelParams, tie: TiePolicy) -> Result<f64> {
    if size == 0 {
        return Err(Error::param("size", "cluster size must be at least 1"));
    }
    let (eps, p) = (ch.epsilon(), ch.p());
    let mut acc = NeumaierSum::default();
    for s in 0..=size {
        let ln_weight = ln_binomial_pmf(size, s, 1.0 - eps);
        if ln_weight < -745.0 {
            continue;
        }
        let err = error_given_s(s, p, tie);
        if err > 0.0 {
            acc.add(ln_weight.exp() * err);
        }
    }
    Ok(acc.total().clamp(0.0, 1.0))
}

/// Probability that a cluster of `size` entries is decoded correctly.
pub fn cluster_correct_prob(size: usize, ch: &ChannelParams, tie: TiePolicy) -> Result<f64> {
    Ok(1.0 - cluster_error_prob(size, ch, tie)?)
}

/// Exact error probability of the known-cluster decoder: one minus the
/// product of per-cluster correct probabilities. `sizes` lists `m_i n_j` for
/// every cluster.
pub fn exact_pe_known_clusters(sizes: &[usize], ch: &ChannelParams, tie: TiePolicy) -> Result<f64> {
    exact_pe_known_clusters_with_cap(sizes, ch, tie, DEFAULT_SIZE_CAP)
}

/// As [`exact_pe_known_clusters`] with an explicit size cap.
pub fn exact_pe_known_clusters_with_cap(
    sizes: &[usize],
    ch: &ChannelParams,
    tie: TiePolicy,
    cap: usize,
) -> Result<f64> {
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for &s in sizes {
        *counts.entry(s).or_default() += 1;
    }
    let mut keys: Vec<_> = counts.into_iter().collect();
    keys.sort_unstable();
    exact_pe_from_counts(&keys, ch, tie, cap)
}

/// Exact error probability from `(size, count)` pairs.
pub fn exact_pe_from_counts(
    counts: &[(usize, usize)],
    ch: &ChannelParams,
    tie: TiePolicy,
    cap: usize,
) -> Result<f64> {
    let mut log_correct = NeumaierSum::default();
    for &(size, count) in counts {
        if size > cap {
            return Err(Error::SizeCapExceeded { size, cap });
        }
        let err = cluster_error_prob(size, ch, tie)?;
        log_correct.add(count as f64 * (-err).ln_1p());
    }
    Ok((-log_correct.total().exp_m1()).clamp(0.0, 1.0))
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Symbol;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Direct transcription of the per-s correct-probability sums, used as an
    /// oracle for the log-space evaluation.
    fn oracle_correct_given_s(s: usize, p: f64, w: f64) -> f64 {
        let c = |n: usize, k: usize| -> f64 {
            (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
        };
        let term = |q: usize| c(s, q) * p.powi(q as i32) * (1.0 - p).powi((s - q) as i32);
        if s % 2 == 1 {
            (0..=s / 2).map(term).sum()
        } else {
            (0..s / 2).map(term).sum::<f64>() + w * term(s / 2)
        }
    }

    fn oracle_correct(size: usize, eps: f64, p: f64, w: f64) -> f64 {
        let c = |n: usize, k: usize| -> f64 {
            (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
        };
        (0..=size)
            .map(|s| {
                c(size, s)
                    * eps.powi((size - s) as i32)
                    * (1.0 - eps).powi(s as i32)
                    * oracle_correct_given_s(s, p, w)
            })
            .sum()
    }

    fn ch(eps: f64, p: f64) -> ChannelParams {
        ChannelParams::new(eps, p).unwrap()
    }

    fn obs(m: usize, n: usize, s: &str) -> ObservedMatrix {
        let entries = s
            .chars()
            .map(|c| match c {
                '0' => Symbol::Zero,
                '1' => Symbol::One,
                _ => Symbol::Erased,
            })
            .collect();
        ObservedMatrix::new(m, n, entries).unwrap()
    }

    #[test]
    fn strict_majority() {
        let y = obs(1, 3, "110");
        let one = Partition::from_labels(&[0]).unwrap();
        let cols = Partition::from_labels(&[0, 0, 0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let d = majority_decode(&y, &one, &cols, TiePolicy::CountAsError, &mut rng).unwrap();
        assert_eq!(d.estimate.block_value(0, 0), 1);
        assert!(!d.tie_occurred);
    }

    #[test]
    fn all_erased_cluster_ties() {
        let y = obs(1, 2, "ee");
        let rows = Partition::from_labels(&[0]).unwrap();
        let cols = Partition::from_labels(&[0, 0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let d = majority_decode(&y, &rows, &cols, TiePolicy::CountAsError, &mut rng).unwrap();
        assert!(d.tie_occurred);
        assert_eq!(d.estimate.block_value(0, 0), 0);

        let mut ones = 0;
        for seed in 0..2000 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = majority_decode(&y, &rows, &cols, TiePolicy::FairCoin, &mut rng).unwrap();
            assert!(d.tie_occurred);
            ones += d.estimate.block_value(0, 0) as usize;
        }
        assert!((ones as f64 / 2000.0 - 0.5).abs() < 0.05);
    }

    #[test]
    fn balanced_cluster_takes_tie_path() {
        let y = obs(1, 4, "10ee");
        let rows = Partition::from_labels(&[0]).unwrap();
        let cols = Partition::from_labels(&[0, 0, 0, 0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let d = majority_decode(&y, &rows, &cols, TiePolicy::FairCoin, &mut rng).unwrap();
        assert!(d.tie_occurred);
    }

    #[test]
    fn decode_dimension_mismatch() {
        let y = obs(1, 4, "10ee");
        let rows = Partition::from_labels(&[0, 0]).unwrap();
        let cols = Partition::from_labels(&[0, 0, 0, 0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(majority_decode(&y, &rows, &cols, TiePolicy::FairCoin, &mut rng).is_err());
    }

    #[test]
    fn correct_given_s_examples() {
        assert_abs_diff_eq!(
            cluster_correct_prob_given_s(1, 0.1, TiePolicy::FairCoin).unwrap(),
            0.9,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            cluster_correct_prob_given_s(0, 0.1, TiePolicy::FairCoin).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            cluster_correct_prob_given_s(0, 0.1, TiePolicy::CountAsError).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            cluster_correct_prob_given_s(3, 0.1, TiePolicy::FairCoin).unwrap(),
            0.972,
            epsilon = 1e-14
        );
        assert!(cluster_correct_prob_given_s(3, 0.6, TiePolicy::FairCoin).is_err());
    }

    #[test]
    fn correct_given_s_matches_direct_sum() {
        for s in 0..40 {
            for &p in &[0.0, 0.01, 0.1, 0.25, 0.4, 0.5] {
                for (tie, w) in [(TiePolicy::FairCoin, 0.5), (TiePolicy::CountAsError, 0.0)] {
                    let got = cluster_correct_prob_given_s(s, p, tie).unwrap();
                    let want = oracle_correct_given_s(s, p, w);
                    assert_abs_diff_eq!(got, want, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn cluster_correct_examples() {
        assert_abs_diff_eq!(
            cluster_correct_prob(1, &ch(0.5, 0.1), TiePolicy::FairCoin).unwrap(),
            0.70,
            epsilon = 1e-15
        );
        for s0 in [1usize, 2, 5, 9] {
            let eps: f64 = 0.35;
            assert_abs_diff_eq!(
                cluster_correct_prob(s0, &ch(eps, 0.0), TiePolicy::CountAsError).unwrap(),
                1.0 - eps.powi(s0 as i32),
                epsilon = 1e-15
            );
            assert_abs_diff_eq!(
                cluster_correct_prob(s0, &ch(eps, 0.0), TiePolicy::FairCoin).unwrap(),
                1.0 - eps.powi(s0 as i32) / 2.0,
                epsilon = 1e-15
            );
        }
        assert!(cluster_correct_prob(0, &ch(0.5, 0.1), TiePolicy::FairCoin).is_err());
    }

    #[test]
    fn cluster_correct_matches_direct_sum() {
        for size in 1..30 {
            for &eps in &[0.0, 0.1, 0.5, 0.9, 1.0] {
                for &p in &[0.0, 0.05, 0.3, 0.5] {
                    for (tie, w) in [(TiePolicy::FairCoin, 0.5), (TiePolicy::CountAsError, 0.0)] {
                        let got = cluster_correct_prob(size, &ch(eps, p), tie).unwrap();
                        assert_abs_diff_eq!(got, oracle_correct(size, eps, p, w), epsilon = 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn exact_pe_examples() {
        assert_abs_diff_eq!(
            exact_pe_known_clusters(&[1], &ch(0.5, 0.1), TiePolicy::FairCoin).unwrap(),
            0.30,
            epsilon = 1e-15
        );
        assert_eq!(
            exact_pe_known_clusters(&[3, 7, 1], &ch(0.0, 0.0), TiePolicy::CountAsError).unwrap(),
            0.0
        );
        let eps: f64 = 0.6;
        let got = exact_pe_known_clusters(&[4; 9], &ch(eps, 0.0), TiePolicy::CountAsError).unwrap();
        assert_abs_diff_eq!(got, 1.0 - (1.0 - eps.powi(4)).powi(9), epsilon = 1e-14);
    }

    #[test]
    fn size_cap_enforced() {
        let err = exact_pe_known_clusters_with_cap(&[11], &ch(0.5, 0.1), TiePolicy::FairCoin, 10);
        assert!(matches!(
            err,
            Err(Error::SizeCapExceeded { size: 11, cap: 10 })
        ));
    }

    #[test]
    fn large_cluster_stays_finite() {
        let e = cluster_error_prob(20_000, &ch(0.9, 0.4), TiePolicy::FairCoin).unwrap();
        assert!(e.is_finite() && (0.0..1.0).contains(&e));
        // Per-cluster lower bound holds: error <= p1^size, here vanishingly small.
        let e = cluster_error_prob(5_000, &ch(0.5, 0.1), TiePolicy::FairCoin).unwrap();
        assert!(e < 1e-300);
    }

    #[test]
    fn monotone_in_p_and_eps() {
        for s in 0..25 {
            let mut prev = f64::INFINITY;
            for k in 0..=50 {
                let p = k as f64 / 100.0;
                let c = cluster_correct_prob_given_s(s, p, TiePolicy::FairCoin).unwrap();
                assert!(c <= prev + 1e-14, "s={s} p={p}");
                prev = c;
            }
        }
        for size in [1usize, 2, 6, 13] {
            for &p in &[0.0, 0.1, 0.4] {
                let mut prev = f64::INFINITY;
                for k in 0..=20 {
                    let eps = k as f64 / 20.0;
                    let c = cluster_correct_prob(size, &ch(eps, p), TiePolicy::FairCoin).unwrap();
                    assert!(c <= prev + 1e-14);
                    prev = c;
                }
            }
        }
    }

    #[test]
    fn per_sample_lower_bound() {
        for s in 0..60 {
            for k in 0..=50 {
                let p = k as f64 / 100.0;
                let c = cluster_correct_prob_given_s(s, p, TiePolicy::FairCoin).unwrap();
                let lb = 1.0 - (2.0 * (p * (1.0 - p)).sqrt()).powi(s as i32);
                assert!(c >= lb - 1e-12, "s={s} p={p} c={c} lb={lb}");
            }
        }
    }
}
