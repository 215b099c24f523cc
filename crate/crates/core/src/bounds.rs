//! Closed-form error bounds and cluster-size thresholds.
//!
//! All evaluators work in log space where products or high powers appear and
//! return values clamped to `[0, 1]`. Bounds whose hypothesis can fail carry
//! an explicit validity flag instead of extrapolating.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::model::{ChannelParams, Partition};

/// Number of clusters of each size: `N_X(s)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClusterSizeHistogram {
    counts: BTreeMap<usize, usize>,
}

impl ClusterSizeHistogram {
    /// From `(size, count)` pairs; zero counts are dropped, zero sizes rejected.
    pub fn from_counts<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for (size, count) in pairs {
            if size == 0 {
                return Err(Error::param("size", "cluster sizes must be positive"));
            }
            if count > 0 {
                *counts.entry(size).or_insert(0) += count;
            }
        }
        Ok(Self { counts })
    }

    /// From a list of cluster sizes.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        Self::from_counts(sizes.iter().map(|&s| (s, 1)))
    }

    /// `count` clusters of equal `size`.
    pub fn uniform(size: usize, count: usize) -> Result<Self> {
        Self::from_counts([(size, count)])
    }

    /// All `m_i n_j` for a row/column partition pair.
    pub fn from_partitions(rows: &Partition, cols: &Partition) -> Self {
        let mut counts = BTreeMap::new();
        for &mi in rows.sizes() {
            for &nj in cols.sizes() {
                *counts.entry(mi * nj).or_insert(0) += 1;
            }
        }
        Self { counts }
    }

    pub fn counts(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.counts.iter().map(|(&s, &c)| (s, c))
    }

    /// Smallest cluster size `s_*`.
    pub fn s_min(&self) -> Option<usize> {
        self.counts.keys().next().copied()
    }

    /// Largest cluster size `s^*`.
    pub fn s_max(&self) -> Option<usize> {
        self.counts.keys().next_back().copied()
    }

    pub fn cluster_count(&self) -> usize {
        self.counts.values().sum()
    }

    /// Sum of `s * N(s)`, the number of matrix entries covered.
    pub fn total_entries(&self) -> usize {
        self.counts.iter().map(|(s, c)| s * c).sum()
    }

    /// Flattened list of sizes.
    pub fn sizes(&self) -> Vec<usize> {
        self.counts
            .iter()
            .flat_map(|(&s, &c)| std::iter::repeat_n(s, c))
            .collect()
    }

    /// `sum_s N(s) u^s`.
    fn power_sum(&self, u: f64) -> f64 {
        self.counts
            .iter()
            .map(|(&s, &c)| c as f64 * pow_size(u, s))
            .sum()
    }
}

fn pow_size(u: f64, s: usize) -> f64 {
    if s > i32::MAX as usize {
        u.powf(s as f64)
    } else {
        u.powi(s as i32)
    }
}

/// A bound value together with whether its hypothesis holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checked {
    pub value: f64,
    pub valid: bool,
}

impl Checked {
    fn valid(value: f64) -> Self {
        Self { value, valid: true }
    }

    fn invalid(value: f64) -> Self {
        Self {
            value,
            valid: false,
        }
    }
}

/// `p1 = epsilon + 2 (1 - epsilon) sqrt(p (1 - p))`.
pub fn p1(ch: &ChannelParams) -> f64 {
    let (eps, p) = (ch.epsilon(), ch.p());
    (eps + 2.0 * (1.0 - eps) * (p * (1.0 - p)).sqrt()).min(1.0)
}

/// `G(u) = 1 - prod_s (1 - u^s)^{N(s)}`.
pub fn g(u: f64, sizes: &ClusterSizeHistogram) -> f64 {
    let log_prod: f64 = sizes
        .counts()
        .map(|(s, c)| c as f64 * (-pow_size(u, s)).ln_1p())
        .sum();
    (-log_prod.exp_m1()).clamp(0.0, 1.0)
}

/// `(G(epsilon), G(p1))`: lower and upper bounds on the known-cluster
/// error probability.
pub fn error_prob_bounds(sizes: &ClusterSizeHistogram, ch: &ChannelParams) -> (f64, f64) {
    (g(ch.epsilon(), sizes), g(p1(ch), sizes))
}

/// `ln 2 / ln(1 / p1)`: smallest cluster size for which `p1^s <= 1/2`.
/// Infinite when `p1 = 1`.
pub fn exponential_bound_min_size(p1: f64) -> f64 {
    if p1 >= 1.0 {
        f64::INFINITY
    } else if p1 <= 0.0 {
        0.0
    } else {
        LN_2 / (1.0 / p1).ln()
    }
}

/// Histogram form of the exponential bounds:
/// `lower = 1 - exp(-sum N(s) eps^s)`,
/// `upper = 1 - exp(-2 ln2 sum N(s) p1^s)`, valid when `s_min >= ln2/ln(1/p1)`.
pub fn exponential_bounds(sizes: &ClusterSizeHistogram, ch: &ChannelParams) -> (f64, Checked) {
    let lower = -(-sizes.power_sum(ch.epsilon())).exp_m1();
    let u = p1(ch);
    let upper = (-(-2.0 * LN_2 * sizes.power_sum(u)).exp_m1()).clamp(0.0, 1.0);
    let valid = sizes
        .s_min()
        .is_some_and(|s| (s as f64) >= exponential_bound_min_size(u));
    (
        lower.clamp(0.0, 1.0),
        Checked {
            value: upper,
            valid,
        },
    )
}

/// Bounds in terms of `s_min`, `s_max` and `mn` only:
/// `lower = 1 - exp(-mn eps^{s_max} / s_max)`,
/// `upper = 1 - exp(-2 ln2 mn p1^{s_min} / s_min)`.
pub fn exponential_bounds_simple(
    s_min: usize,
    s_max: usize,
    m: usize,
    n: usize,
    ch: &ChannelParams,
) -> Result<(f64, Checked)> {
    if s_min == 0 || s_max == 0 {
        return Err(Error::param("s_min", "cluster sizes must be positive"));
    }
    let mn = (m * n) as f64;
    let lower = -(-mn * pow_size(ch.epsilon(), s_max) / s_max as f64).exp_m1();
    let u = p1(ch);
    let upper = -(-2.0 * LN_2 * mn * pow_size(u, s_min) / s_min as f64).exp_m1();
    let valid = (s_min as f64) >= exponential_bound_min_size(u);
    Ok((
        lower.clamp(0.0, 1.0),
        Checked {
            value: upper.clamp(0.0, 1.0),
            valid,
        },
    ))
}

/// Asymptotic cluster-size thresholds for a matrix of `m x n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// `ln(mn) / ln(1/p1)`; `None` when `p1` is 0 or 1.
    pub decodable_min_size: Option<f64>,
    /// `(1 - delta) ln(mn) / ln(1/eps)`; `None` when `eps` is 0 or 1.
    pub undecodable_max_size: Option<f64>,
}

pub fn size_thresholds(m: usize, n: usize, ch: &ChannelParams, delta: f64) -> Result<Thresholds> {
    if !(delta > 0.0 && delta < 1.0) && delta != 0.0 {
        return Err(Error::param("delta", format!("{delta} not in (0, 1)")));
    }
    let ln_mn = ((m * n) as f64).ln();
    let u = p1(ch);
    let eps = ch.epsilon();
    let interior = |x: f64| x > 0.0 && x < 1.0;
    Ok(Thresholds {
        decodable_min_size: interior(u).then(|| ln_mn / (1.0 / u).ln()),
        undecodable_max_size: interior(eps).then(|| (1.0 - delta) * ln_mn / (1.0 / eps).ln()),
    })
}

/// Clustering statistics for a channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusteringStats {
    /// Expected normalized distance between rows of the same cluster.
    pub mu: f64,
    /// Separation gained per unit fraction of disagreeing columns.
    pub delta: f64,
    /// Threshold `mu + delta / 3`.
    pub d0: f64,
}

pub fn mu_delta_d0(ch: &ChannelParams) -> ClusteringStats {
    let (eps, p) = (ch.epsilon(), ch.p());
    let keep = (1.0 - eps) * (1.0 - eps);
    let mu = 2.0 * p * (1.0 - p) * keep;
    let delta = keep * (1.0 - 2.0 * p) * (1.0 - 2.0 * p);
    ClusteringStats {
        mu,
        delta,
        d0: mu + delta / 3.0,
    }
}

/// Expected distance of a pair disagreeing in `s_ij` of `n` columns:
/// `mu + delta s_ij / n`.
pub fn expected_cross_distance(n: usize, s_ij: usize, ch: &ChannelParams) -> f64 {
    let st = mu_delta_d0(ch);
    st.mu + st.delta * s_ij as f64 / n as f64
}

/// Per-column probability that two observed entries with differing true
/// values disagree: `(1 - eps)^2 (p^2 + (1 - p)^2)`.
pub fn nu(ch: &ChannelParams) -> f64 {
    let (eps, p) = (ch.epsilon(), ch.p());
    (1.0 - eps) * (1.0 - eps) * (p * p + (1.0 - p) * (1.0 - p))
}

/// Chernoff bound on declaring two same-cluster rows different, with the
/// default margin `alpha_n = n / 3`.
pub fn same_cluster_error_bound(n: usize, ch: &ChannelParams) -> f64 {
    same_cluster_error_bound_with_alpha(n, n as f64 / 3.0, ch)
}

/// `exp(-delta^2 alpha^2 / (mu n))`, capped at 1.
pub fn same_cluster_error_bound_with_alpha(n: usize, alpha: f64, ch: &ChannelParams) -> f64 {
    let st = mu_delta_d0(ch);
    if st.delta == 0.0 || alpha == 0.0 {
        return 1.0;
    }
    if st.mu == 0.0 {
        return 0.0;
    }
    (-(st.delta * st.delta * alpha * alpha) / (st.mu * n as f64))
        .exp()
        .min(1.0)
}

/// Chernoff bound on declaring two rows that disagree in `s_ij` columns to
/// be in the same cluster, with `alpha_n = n / 3`. Equals 1 below `alpha_n`.
pub fn diff_cluster_error_bound(n: usize, s_ij: usize, ch: &ChannelParams) -> f64 {
    diff_cluster_error_bound_with_alpha(n, s_ij, n as f64 / 3.0, ch)
}

/// `exp(-delta^2 (s_ij - alpha)^2 / (6 (n mu + delta alpha)))` for
/// `s_ij >= alpha`, else 1.
pub fn diff_cluster_error_bound_with_alpha(
    n: usize,
    s_ij: usize,
    alpha: f64,
    ch: &ChannelParams,
) -> f64 {
    let s = s_ij as f64;
    if s < alpha {
        return 1.0;
    }
    let st = mu_delta_d0(ch);
    let denom = 6.0 * (n as f64 * st.mu + st.delta * alpha);
    if denom == 0.0 {
        return if s > alpha && st.delta > 0.0 {
            0.0
        } else {
            1.0
        };
    }
    (-(st.delta * st.delta * (s - alpha) * (s - alpha)) / denom)
        .exp()
        .min(1.0)
}

/// `min(1, 2 exp(-t_n / 54))`: probability that two row clusters differ in
/// at most a third of the column clusters.
pub fn close_clusters_bound(t_n: usize) -> f64 {
    (2.0 * (-(t_n as f64) / 54.0).exp()).min(1.0)
}

/// Binary entropy in bits.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::param("x", format!("{x} not in [0, 1]")));
    }
    let term = |q: f64| if q == 0.0 { 0.0 } else { -q * q.log2() };
    Ok(term(x) + term(1.0 - x))
}

/// The entropy term `t_n 2^{-t_n (1 - h(4/9))}` of the cross-cluster
/// expectation bound.
pub fn entropy_tail_term(t_n: usize) -> f64 {
    let h = binary_entropy(4.0 / 9.0).expect("4/9 is in range");
    let t = t_n as f64;
    t * (-(t * (1.0 - h)) * LN_2).exp()
}

/// `C sqrt(mn ln m ln n)`: cluster size needed for a vanishing clustering
/// error on a fixed matrix.
pub fn fixed_matrix_cluster_threshold(m: usize, n: usize, c: f64) -> Result<f64> {
    if m < 2 || n < 2 {
        return Err(Error::param("m", "m and n must be at least 2"));
    }
    let (mf, nf) = (m as f64, n as f64);
    Ok(c * (mf * nf * mf.ln() * nf.ln()).sqrt())
}

/// All closed-form quantities for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub p1: f64,
    pub g_eps: f64,
    pub g_p1: f64,
    pub exp_lower: Checked,
    pub exp_upper: Checked,
    pub exp_simple_lower: Checked,
    pub exp_simple_upper: Checked,
    pub undecodable_max_size: Checked,
    pub decodable_min_size: Checked,
}

impl BoundsReport {
    /// Below `undecodable_max_size` every estimator fails; above
    /// `decodable_min_size` majority decoding succeeds.
    pub fn compute(
        sizes: &ClusterSizeHistogram,
        m: usize,
        n: usize,
        ch: &ChannelParams,
        delta: f64,
    ) -> Result<Self> {
        let (g_eps, g_p1) = error_prob_bounds(sizes, ch);
        let (exp_lower, exp_upper) = exponential_bounds(sizes, ch);
        let (s_min, s_max) = sizes
            .s_min()
            .zip(sizes.s_max())
            .ok_or_else(|| Error::param("sizes", "histogram is empty"))?;
        let (simple_lower, simple_upper) = exponential_bounds_simple(s_min, s_max, m, n, ch)?;
        let th = size_thresholds(m, n, ch, delta)?;
        let opt = |v: Option<f64>| match v {
            Some(x) => Checked::valid(x),
            None => Checked::invalid(f64::NAN),
        };
        Ok(Self {
            p1: p1(ch),
            g_eps,
            g_p1,
            exp_lower: Checked::valid(exp_lower),
            exp_upper,
            exp_simple_lower: Checked::valid(simple_lower),
            exp_simple_upper: simple_upper,
            undecodable_max_size: opt(th.undecodable_max_size),
            decodable_min_size: opt(th.decodable_min_size),
        })
    }

    /// `(name, value)` pairs in report order.
    pub fn entries(&self) -> Vec<(&'static str, Checked)> {
        vec![
            ("p1", Checked::valid(self.p1)),
            ("G_eps", Checked::valid(self.g_eps)),
            ("G_p1", Checked::valid(self.g_p1)),
            ("exp_lower", self.exp_lower),
            ("exp_upper", self.exp_upper),
            ("exp_simple_lower", self.exp_simple_lower),
            ("exp_simple_upper", self.exp_simple_upper),
            ("undecodable_max_size", self.undecodable_max_size),
            ("decodable_min_size", self.decodable_min_size),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ch(eps: f64, p: f64) -> ChannelParams {
        ChannelParams::new(eps, p).unwrap()
    }

    #[test]
    fn p1_examples() {
        assert_eq!(p1(&ch(0.0, 0.0)), 0.0);
        assert_abs_diff_eq!(p1(&ch(0.5, 0.5)), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p1(&ch(0.5, 0.1)), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn p1_range() {
        for i in 0..=20 {
            for j in 0..=10 {
                let c = ch(i as f64 / 20.0, j as f64 / 20.0);
                let v = p1(&c);
                assert!(v >= c.epsilon() - 1e-15 && v <= 1.0);
                assert_eq!(v == c.epsilon(), c.p() == 0.0 || c.epsilon() == 1.0);
            }
        }
    }

    #[test]
    fn g_examples() {
        let one = ClusterSizeHistogram::uniform(1, 1).unwrap();
        assert_eq!(g(0.0, &one), 0.0);
        assert_abs_diff_eq!(g(0.5, &one), 0.5, epsilon = 1e-15);
        let four = ClusterSizeHistogram::uniform(2, 4).unwrap();
        assert_abs_diff_eq!(g(0.5, &four), 0.68359375, epsilon = 1e-15);
        assert_eq!(g(1.0, &four), 1.0);
    }

    #[test]
    fn g_monotone() {
        let base = ClusterSizeHistogram::from_sizes(&[2, 3, 3, 5]).unwrap();
        let more = ClusterSizeHistogram::from_sizes(&[2, 3, 3, 3, 5]).unwrap();
        let mut prev = 0.0;
        for k in 0..=100 {
            let u = k as f64 / 100.0;
            let v = g(u, &base);
            assert!(v >= prev);
            assert!(g(u, &more) >= v);
            prev = v;
        }
    }

    #[test]
    fn error_prob_bound_examples() {
        let four = ClusterSizeHistogram::uniform(2, 4).unwrap();
        let (lo, hi) = error_prob_bounds(&four, &ch(0.5, 0.1));
        assert_abs_diff_eq!(lo, 0.68359375, epsilon = 1e-15);
        assert_abs_diff_eq!(hi, 1.0 - 0.36f64.powi(4), epsilon = 1e-14);
        assert_abs_diff_eq!(hi, 0.98320384, epsilon = 1e-8);

        let (lo, hi) = error_prob_bounds(&four, &ch(0.3, 0.0));
        assert_eq!(lo, hi);
        assert_eq!(error_prob_bounds(&four, &ch(1.0, 0.2)), (1.0, 1.0));
    }

    #[test]
    fn exponential_bound_examples() {
        let four = ClusterSizeHistogram::uniform(2, 4).unwrap();
        let (lo, _) = exponential_bounds(&four, &ch(0.0, 0.1));
        assert_eq!(lo, 0.0);
        let (lo, hi) = exponential_bounds(&four, &ch(0.5, 0.1));
        assert_abs_diff_eq!(lo, 1.0 - (-1.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(lo, 0.63212, epsilon = 1e-5);
        assert!(!hi.valid);
        assert_abs_diff_eq!(exponential_bound_min_size(0.8), 3.106, epsilon = 1e-3);
        let (_, hi) =
            exponential_bounds(&ClusterSizeHistogram::uniform(4, 4).unwrap(), &ch(0.5, 0.1));
        assert!(hi.valid);
        let (_, hi) = exponential_bounds(&four, &ch(0.5, 0.5));
        assert!(!hi.valid);
    }

    #[test]
    fn exponential_bound_simple_examples() {
        let (lo, _) = exponential_bounds_simple(2, 2, 10, 10, &ch(0.0, 0.1)).unwrap();
        assert_eq!(lo, 0.0);
        let (lo, _) = exponential_bounds_simple(16, 16, 100, 100, &ch(0.5, 0.1)).unwrap();
        let x = 1e4 * 2f64.powi(-16) / 16.0;
        assert_abs_diff_eq!(lo, 1.0 - (-x).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(lo, 0.009492, epsilon = 1e-5);

        // On equal sizes the histogram form is at least as tight.
        for s in [4usize, 8, 16] {
            let h = ClusterSizeHistogram::uniform(s, 64 * 64 / s).unwrap();
            let c = ch(0.3, 0.05);
            let (l2, u2) = exponential_bounds(&h, &c);
            let (l3, u3) = exponential_bounds_simple(s, s, 64, 64, &c).unwrap();
            assert!(l2 >= l3 - 1e-12);
            assert!(u2.value <= u3.value + 1e-12);
        }
    }

    #[test]
    fn size_threshold_examples() {
        // p1 = 0.8 at eps=0.5, p=0.1
        let th = size_thresholds(1000, 1000, &ch(0.5, 0.1), 0.5).unwrap();
        assert_abs_diff_eq!(th.decodable_min_size.unwrap(), 61.91, epsilon = 1e-2);
        assert_abs_diff_eq!(th.undecodable_max_size.unwrap(), 9.966, epsilon = 1e-3);

        let th = size_thresholds(500, 700, &ch(0.4, 0.0), 0.0).unwrap();
        assert_abs_diff_eq!(
            th.decodable_min_size.unwrap(),
            th.undecodable_max_size.unwrap(),
            epsilon = 1e-12
        );

        let th = size_thresholds(10, 10, &ch(0.0, 0.0), 0.5).unwrap();
        assert!(th.decodable_min_size.is_none() && th.undecodable_max_size.is_none());
        assert!(size_thresholds(10, 10, &ch(0.2, 0.1), 1.5).is_err());
    }

    #[test]
    fn clustering_stats_examples() {
        let st = mu_delta_d0(&ch(0.0, 0.0));
        assert_eq!((st.mu, st.delta), (0.0, 1.0));
        assert_abs_diff_eq!(st.d0, 1.0 / 3.0, epsilon = 1e-15);
        let st = mu_delta_d0(&ch(0.5, 0.1));
        assert_abs_diff_eq!(st.mu, 0.045, epsilon = 1e-15);
        assert_abs_diff_eq!(st.delta, 0.16, epsilon = 1e-15);
        assert_abs_diff_eq!(st.d0, 0.045 + 0.16 / 3.0, epsilon = 1e-15);
        let st = mu_delta_d0(&ch(0.2, 0.5));
        assert_eq!(st.delta, 0.0);
        assert_eq!(st.d0, st.mu);
        // nu - mu = delta
        let c = ch(0.3, 0.1);
        assert_abs_diff_eq!(
            nu(&c) - mu_delta_d0(&c).mu,
            mu_delta_d0(&c).delta,
            epsilon = 1e-15
        );
    }

    #[test]
    fn same_cluster_bound_examples() {
        let c = ch(0.5, 0.1);
        let b = same_cluster_error_bound(1000, &c);
        assert_abs_diff_eq!(b.ln(), -0.0256 * 1000.0 / (9.0 * 0.045), epsilon = 1e-9);
        assert!((b / 3.5e-28 - 1.0).abs() < 0.05);
        assert_eq!(same_cluster_error_bound(1000, &ch(0.5, 0.5)), 1.0);
        assert_abs_diff_eq!(
            same_cluster_error_bound(9, &c),
            (-0.568_888_9f64).exp(),
            epsilon = 1e-7
        );
        assert_abs_diff_eq!(same_cluster_error_bound(9, &c), 0.566, epsilon = 1e-3);
        assert_eq!(same_cluster_error_bound(9, &ch(0.2, 0.0)), 0.0);
    }

    #[test]
    fn diff_cluster_bound_examples() {
        let c = ch(0.5, 0.1);
        assert_eq!(diff_cluster_error_bound(1200, 400, &c), 1.0);
        assert_eq!(diff_cluster_error_bound(1200, 399, &c), 1.0);
        // 6 (1200 * 0.045 + 0.16 * 400) = 708
        let want = (-1024.0f64 / 708.0).exp();
        assert_abs_diff_eq!(
            diff_cluster_error_bound(1200, 600, &c),
            want,
            epsilon = 1e-12
        );
    }

    #[test]
    fn close_clusters_examples() {
        assert_abs_diff_eq!(
            close_clusters_bound(54),
            2.0 / std::f64::consts::E,
            epsilon = 1e-15
        );
        assert!(close_clusters_bound(100_000) < 1e-300);
        assert_eq!(close_clusters_bound(1), 1.0);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(binary_entropy(4.0 / 9.0).unwrap(), 0.991076, epsilon = 1e-6);
        assert!(binary_entropy(1.1).is_err());
        assert!(entropy_tail_term(10_000) < entropy_tail_term(1000));
    }

    #[test]
    fn fixed_matrix_threshold_examples() {
        let n = 300usize;
        assert_abs_diff_eq!(
            fixed_matrix_cluster_threshold(n, n, 1.0).unwrap(),
            n as f64 * (n as f64).ln(),
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            fixed_matrix_cluster_threshold(1024, 1024, 1.0).unwrap(),
            7097.8,
            epsilon = 0.1
        );
        assert_eq!(fixed_matrix_cluster_threshold(5, 7, 0.0).unwrap(), 0.0);
        assert!(fixed_matrix_cluster_threshold(1, 7, 1.0).is_err());
    }

    #[test]
    fn report_ordering_invariants() {
        for s in [1usize, 2, 4, 9, 25] {
            for &(eps, p) in &[(0.1, 0.0), (0.3, 0.05), (0.5, 0.1), (0.9, 0.4)] {
                let h = ClusterSizeHistogram::uniform(s, 100).unwrap();
                let r = BoundsReport::compute(&h, 10 * s, 10, &ch(eps, p), 0.5).unwrap();
                assert!(r.g_eps <= r.g_p1);
                if r.exp_upper.valid {
                    assert!(r.exp_lower.value <= r.exp_upper.value);
                }
            }
        }
    }

    #[test]
    fn histogram_accessors() {
        let rows = Partition::from_labels(&[0, 0, 1]).unwrap();
        let cols = Partition::from_labels(&[0, 1, 1, 1]).unwrap();
        let h = ClusterSizeHistogram::from_partitions(&rows, &cols);
        assert_eq!(h.total_entries(), 12);
        assert_eq!((h.s_min(), h.s_max()), (Some(1), Some(6)));
        assert_eq!(h.cluster_count(), 4);
        assert_eq!(h.sizes(), vec![1, 2, 3, 6]);
        assert!(ClusterSizeHistogram::from_sizes(&[0]).is_err());
    }
}
