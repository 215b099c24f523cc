//! Row and column clustering by thresholded normalized Hamming distance.
//!
//! Two rows are declared to share a cluster when the fraction of columns in
//! which both are observed and disagree is strictly below `d0`. Clusters are
//! the connected components of the resulting "same cluster" graph.

use rayon::prelude::*;

use crate::bounds::mu_delta_d0;
use crate::error::{Error, Result};
use crate::model::{ChannelParams, ObservedMatrix, Partition, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Rows,
    Columns,
}

/// Decision for one unordered pair of rows (or columns).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseDecision {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
    pub same_cluster: bool,
}

/// Bit-packed view of one axis: for every line, a mask of observed positions
/// and the observed bit values.
struct PackedLines {
    words: usize,
    observed: Vec<u64>,
    ones: Vec<u64>,
    /// Line length the distance is normalized by.
    length: usize,
}

impl PackedLines {
    fn new(y: &ObservedMatrix, axis: Axis) -> Self {
        let (lines, length) = match axis {
            Axis::Rows => (y.m(), y.n()),
            Axis::Columns => (y.n(), y.m()),
        };
        let words = length.div_ceil(64);
        let mut observed = vec![0u64; lines * words];
        let mut ones = vec![0u64; lines * words];
        for i in 0..y.m() {
            for k in 0..y.n() {
                let (line, pos) = match axis {
                    Axis::Rows => (i, k),
                    Axis::Columns => (k, i),
                };
                let slot = line * words + pos / 64;
                let bit = 1u64 << (pos % 64);
                match y.get(i, k) {
                    Symbol::Erased => {}
                    Symbol::Zero => observed[slot] |= bit,
                    Symbol::One => {
                        observed[slot] |= bit;
                        ones[slot] |= bit;
                    }
                }
            }
        }
        Self {
            words,
            observed,
            ones,
            length,
        }
    }

    fn lines(&self) -> usize {
        self.observed.len() / self.words.max(1)
    }

    fn disagreements(&self, i: usize, j: usize) -> u32 {
        let (a, b) = (i * self.words, j * self.words);
        (0..self.words)
            .map(|w| {
                let both = self.observed[a + w] & self.observed[b + w];
                (both & (self.ones[a + w] ^ self.ones[b + w])).count_ones()
            })
            .sum()
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        self.disagreements(i, j) as f64 / self.length as f64
    }
}

fn axis_len(y: &ObservedMatrix, axis: Axis) -> usize {
    match axis {
        Axis::Rows => y.m(),
        Axis::Columns => y.n(),
    }
}

/// Fraction of positions (out of the full line length) where both lines are
/// observed and unequal.
pub fn pairwise_distance(y: &ObservedMatrix, i: usize, j: usize, axis: Axis) -> Result<f64> {
    let lines = axis_len(y, axis);
    if i >= lines || j >= lines {
        return Err(Error::param(
            "index",
            format!("pair ({i}, {j}) out of range for {lines} lines"),
        ));
    }
    if i == j {
        return Err(Error::param("index", "pair indices must differ"));
    }
    let (length, at): (usize, Box<dyn Fn(usize, usize) -> Symbol>) = match axis {
        Axis::Rows => (y.n(), Box::new(|line, k| y.get(line, k))),
        Axis::Columns => (y.m(), Box::new(|line, k| y.get(k, line))),
    };
    let count = (0..length)
        .filter(|&k| match (at(i, k).bit(), at(j, k).bit()) {
            (Some(a), Some(b)) => a != b,
            _ => false,
        })
        .count();
    Ok(count as f64 / length as f64)
}

/// Every pairwise decision `i < j` along `axis`, in lexicographic order.
pub fn pairwise_decisions(y: &ObservedMatrix, d0: f64, axis: Axis) -> Vec<PairwiseDecision> {
    let packed = PackedLines::new(y, axis);
    let lines = packed.lines();
    (0..lines)
        .flat_map(|i| ((i + 1)..lines).map(move |j| (i, j)))
        .map(|(i, j)| {
            let distance = packed.distance(i, j);
            PairwiseDecision {
                i,
                j,
                distance,
                same_cluster: distance < d0,
            }
        })
        .collect()
}

/// Connected components of the graph whose edges are the pairs declared
/// `same_cluster`.
pub fn partition_from_decisions(len: usize, decisions: &[PairwiseDecision]) -> Result<Partition> {
    let mut sets = DisjointSet::new(len);
    for d in decisions.iter().filter(|d| d.same_cluster) {
        if d.i >= len || d.j >= len {
            return Err(Error::param(
                "index",
                format!("pair ({}, {}) out of range", d.i, d.j),
            ));
        }
        sets.union(d.i, d.j);
    }
    sets.into_partition()
}

/// Clusters one axis with threshold `d0`. Pair distances are computed in
/// parallel; the resulting components do not depend on merge order.
pub fn cluster_axis(y: &ObservedMatrix, d0: f64, axis: Axis) -> Result<Partition> {
    if !(0.0..=1.0).contains(&d0) {
        return Err(Error::param("d0", format!("{d0} not in [0, 1]")));
    }
    let packed = PackedLines::new(y, axis);
    let lines = packed.lines();
    let edges: Vec<Vec<usize>> = (0..lines)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..lines)
                .filter(|&j| packed.distance(i, j) < d0)
                .collect()
        })
        .collect();
    let mut sets = DisjointSet::new(lines);
    for (i, js) in edges.iter().enumerate() {
        for &j in js {
            sets.union(i, j);
        }
    }
    sets.into_partition()
}

/// Number of raw pairwise threshold decisions along `axis` that disagree
/// with `truth`. Unlike [`pairwise_error_count`] this is measured before
/// the decisions are assembled into components.
pub fn decision_error_count(
    y: &ObservedMatrix,
    d0: f64,
    axis: Axis,
    truth: &Partition,
) -> Result<u64> {
    let packed = PackedLines::new(y, axis);
    let lines = packed.lines();
    if truth.len() != lines {
        return Err(Error::DimensionMismatch(format!(
            "truth of length {} for {lines} lines",
            truth.len()
        )));
    }
    Ok((0..lines)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..lines)
                .filter(|&j| (packed.distance(i, j) < d0) != (truth.label(i) == truth.label(j)))
                .count() as u64
        })
        .sum())
}

/// True when the partitions agree up to relabeling.
pub fn partition_match(estimated: &Partition, truth: &Partition) -> Result<bool> {
    check_lengths(estimated, truth)?;
    Ok(estimated.labels() == truth.labels())
}

/// Number of pairs `i < j` whose same/different status differs between the
/// two partitions.
pub fn pairwise_error_count(estimated: &Partition, truth: &Partition) -> Result<u64> {
    check_lengths(estimated, truth)?;
    let (a, b) = (estimated.labels(), truth.labels());
    let mut count = 0u64;
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            if (a[i] == a[j]) != (b[i] == b[j]) {
                count += 1;
            }
        }
    }
    Ok(count)
}

fn check_lengths(a: &Partition, b: &Partition) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "partitions of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// Rows then columns, each independently, with `d0 = mu + delta / 3`.
pub fn cluster_pipeline(y: &ObservedMatrix, ch: &ChannelParams) -> Result<(Partition, Partition)> {
    let d0 = mu_delta_d0(ch).d0.min(1.0);
    let rows = cluster_axis(y, d0, Axis::Rows)?;
    let cols = cluster_axis(y, d0, Axis::Columns)?;
    Ok((rows, cols))
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut node: usize) -> usize {
        let mut root = node;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[node] != root {
            let next = self.parent[node];
            self.parent[node] = root;
            node = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] = self.rank[a].saturating_add(1);
        }
    }

    fn into_partition(mut self) -> Result<Partition> {
        let labels: Vec<usize> = (0..self.parent.len()).map(|i| self.find(i)).collect();
        Partition::from_labels(&labels)
    }
}
