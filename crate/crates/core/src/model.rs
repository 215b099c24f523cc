//! Domain types shared by the generator, channel, decoder and clusterer.
//!
//! Partitions are stored as label arrays rather than index sets, so a random
//! row or column permutation is just a different label assignment. Labels are
//! kept canonical (cluster ids numbered in order of first occurrence), which
//! makes partition equality up to relabeling a plain array comparison.

use crate::error::{Error, Result};

/// Erasure probability followed by a binary symmetric channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    epsilon: f64,
    p: f64,
}

impl ChannelParams {
    /// `epsilon` must lie in `[0, 1]` and `p` in `[0, 1/2]`.
    pub fn new(epsilon: f64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::param("epsilon", format!("{epsilon} not in [0, 1]")));
        }
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::param("p", format!("{p} not in [0, 1/2]")));
        }
        Ok(Self { epsilon, p })
    }

    /// Erasure probability.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// BSC crossover probability.
    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Assignment of row (or column) indices to clusters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    sizes: Vec<usize>,
}

impl Partition {
    /// Builds a canonical partition from arbitrary nonnegative labels.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyPartition);
        }
        let mut remap = std::collections::HashMap::new();
        let mut sizes = Vec::new();
        let canonical = labels
            .iter()
            .map(|&raw| {
                let next = remap.len();
                let id = *remap.entry(raw).or_insert(next);
                if id == sizes.len() {
                    sizes.push(0);
                }
                sizes[id] += 1;
                id
            })
            .collect();
        Ok(Self {
            labels: canonical,
            sizes,
        })
    }

    /// Contiguous blocks of `block` indices each; `len` must be a multiple of `block`.
    pub fn contiguous(len: usize, block: usize) -> Result<Self> {
        if block == 0 || len == 0 || !len.is_multiple_of(block) {
            return Err(Error::param(
                "block",
                format!("cluster size {block} does not divide length {len}"),
            ));
        }
        let labels: Vec<usize> = (0..len).map(|i| i / block).collect();
        Ok(Self {
            sizes: vec![block; len / block],
            labels,
        })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn cluster_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, index: usize) -> usize {
        self.labels[index]
    }

    /// Partition with every index in its own cluster.
    pub fn singletons(len: usize) -> Result<Self> {
        Self::contiguous(len, 1)
    }
}

/// A binary matrix constant on every block `A_i x B_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockConstantMatrix {
    rows: Partition,
    cols: Partition,
    /// Row-major `r x t` table of block values.
    values: Vec<u8>,
}

impl BlockConstantMatrix {
    /// `values` is the row-major `r x t` table, entries 0 or 1.
    pub fn new(rows: Partition, cols: Partition, values: Vec<u8>) -> Result<Self> {
        let expected = rows.cluster_count() * cols.cluster_count();
        if values.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "block table has {} entries, expected {}x{}",
                values.len(),
                rows.cluster_count(),
                cols.cluster_count()
            )));
        }
        if values.iter().any(|&v| v > 1) {
            return Err(Error::param("block_values", "entries must be 0 or 1"));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn row_partition(&self) -> &Partition {
        &self.rows
    }

    pub fn col_partition(&self) -> &Partition {
        &self.cols
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.cols.len()
    }

    /// Value of block `(row_cluster, col_cluster)`.
    pub fn block_value(&self, row_cluster: usize, col_cluster: usize) -> u8 {
        self.values[row_cluster * self.cols.cluster_count() + col_cluster]
    }

    pub fn block_values(&self) -> &[u8] {
        &self.values
    }

    pub fn entry_at(&self, i: usize, k: usize) -> Result<u8> {
        if i >= self.m() || k >= self.n() {
            return Err(Error::IndexOutOfRange {
                row: i,
                col: k,
                m: self.m(),
                n: self.n(),
            });
        }
        Ok(self.block_value(self.rows.label(i), self.cols.label(k)))
    }

    /// Expands to a dense row-major `m x n` bit array.
    pub fn to_dense(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.m() * self.n());
        for &ri in self.rows.labels() {
            for &cj in self.cols.labels() {
                out.push(self.block_value(ri, cj));
            }
        }
        out
    }

    /// True when both matrices have identical entries (partitions may differ).
    pub fn same_entries(&self, other: &BlockConstantMatrix) -> bool {
        if self.m() != other.m() || self.n() != other.n() {
            return false;
        }
        self.rows
            .labels()
            .iter()
            .zip(other.rows.labels())
            .all(|(&a, &b)| {
                self.cols
                    .labels()
                    .iter()
                    .zip(other.cols.labels())
                    .all(|(&c, &d)| self.block_value(a, c) == other.block_value(b, d))
            })
    }
}

/// One observed entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Zero,
    One,
    Erased,
}

impl Symbol {
    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            Symbol::Zero
        } else {
            Symbol::One
        }
    }

    pub fn bit(self) -> Option<u8> {
        match self {
            Symbol::Zero => Some(0),
            Symbol::One => Some(1),
            Symbol::Erased => None,
        }
    }
}

/// `m x n` matrix over `{0, 1, e}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservedMatrix {
    m: usize,
    n: usize,
    entries: Vec<Symbol>,
}

impl ObservedMatrix {
    /// `entries` is row-major with exactly `m * n` elements.
    pub fn new(m: usize, n: usize, entries: Vec<Symbol>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::DimensionMismatch(format!(
                "dimensions must be positive, got {m}x{n}"
            )));
        }
        if entries.len() != m * n {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {m}x{n} matrix",
                entries.len()
            )));
        }
        Ok(Self { m, n, entries })
    }

    /// Noiseless observation of a block-constant matrix.
    pub fn from_block_matrix(x: &BlockConstantMatrix) -> Self {
        Self {
            m: x.m(),
            n: x.n(),
            entries: x.to_dense().into_iter().map(Symbol::from_bit).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, k: usize) -> Symbol {
        self.entries[i * self.n + k]
    }

    pub fn entries(&self) -> &[Symbol] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Symbol] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Dense bits when the matrix contains no erasures.
    pub fn to_bits(&self) -> Option<Vec<u8>> {
        self.entries.iter().map(|s| s.bit()).collect()
    }

    pub fn erasure_count(&self) -> usize {
        self.entries
            .iter()
            .filter(|&&s| s == Symbol::Erased)
            .count()
    }
}

/// The equal-cluster-size probability law on block-constant matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationLaw {
    pub m: usize,
    pub n: usize,
    pub m0: usize,
    pub n0: usize,
    /// Assign indices to clusters uniformly at random instead of contiguously.
    pub permute: bool,
}

impl GenerationLaw {
    pub fn new(m: usize, n: usize, m0: usize, n0: usize, permute: bool) -> Result<Self> {
        let law = Self {
            m,
            n,
            m0,
            n0,
            permute,
        };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m0 == 0 || self.m == 0 || !self.m.is_multiple_of(self.m0) {
            return Err(Error::param(
                "m0",
                format!("{} does not divide m = {}", self.m0, self.m),
            ));
        }
        if self.n0 == 0 || self.n == 0 || !self.n.is_multiple_of(self.n0) {
            return Err(Error::param(
                "n0",
                format!("{} does not divide n = {}", self.n0, self.n),
            ));
        }
        Ok(())
    }

    /// Number of row clusters.
    pub fn r(&self) -> usize {
        self.m / self.m0
    }

    /// Number of column clusters.
    pub fn t(&self) -> usize {
        self.n / self.n0
    }

    pub fn cluster_size(&self) -> usize {
        self.m0 * self.n0
    }
}

/// How the majority decoder handles a tied cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TiePolicy {
    /// Resolve ties with a fair coin.
    #[default]
    FairCoin,
    /// Emit 0 and count the cluster as decoded wrongly.
    CountAsError,
}

impl std::str::FromStr for TiePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fair_coin" | "fair-coin" | "coin" => Ok(TiePolicy::FairCoin),
            "count_as_error" | "count-as-error" | "error" => Ok(TiePolicy::CountAsError),
            other => Err(Error::param("tie", format!("unknown tie policy `{other}`"))),
        }
    }
}

impl std::fmt::Display for TiePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TiePolicy::FairCoin => f.write_str("fair_coin"),
            TiePolicy::CountAsError => f.write_str("count_as_error"),
        }
    }
}
