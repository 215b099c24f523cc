//! Sampling from the equal-cluster-size law and detection of degenerate
//! block tables (two row clusters or two column clusters generated equal).

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::model::{BlockConstantMatrix, GenerationLaw, Partition};

/// Samples `X`: `r x t` i.i.d. fair block values over clusters of size
/// `m0 x n0`. With `law.permute` the indices are assigned to clusters by a
/// uniform shuffle; otherwise clusters are contiguous.
///
/// Draw order: row shuffle, column shuffle, then block values row-major.
pub fn sample_block_matrix<R: Rng + ?Sized>(
    law: &GenerationLaw,
    rng: &mut R,
) -> Result<BlockConstantMatrix> {
    law.validate()?;
    let rows = axis_partition(law.m, law.m0, law.permute, rng)?;
    let cols = axis_partition(law.n, law.n0, law.permute, rng)?;
    let values = (0..law.r() * law.t())
        .map(|_| u8::from(rng.random::<bool>()))
        .collect();
    BlockConstantMatrix::new(rows, cols, values)
}

fn axis_partition<R: Rng + ?Sized>(
    len: usize,
    block: usize,
    permute: bool,
    rng: &mut R,
) -> Result<Partition> {
    let contiguous = Partition::contiguous(len, block)?;
    if !permute {
        return Ok(contiguous);
    }
    let mut labels = contiguous.labels().to_vec();
    labels.shuffle(rng);
    Partition::from_labels(&labels)
}

/// Coarsest partitions under which `x` is still block constant: row clusters
/// with identical block rows merge, and likewise for columns.
pub fn effective_partition(x: &BlockConstantMatrix) -> (Partition, Partition) {
    let r = x.row_partition().cluster_count();
    let t = x.col_partition().cluster_count();

    let row_keys: Vec<Vec<u8>> = (0..r)
        .map(|i| (0..t).map(|j| x.block_value(i, j)).collect())
        .collect();
    let col_keys: Vec<Vec<u8>> = (0..t)
        .map(|j| (0..r).map(|i| x.block_value(i, j)).collect())
        .collect();

    (
        merge_by_key(x.row_partition(), &row_keys),
        merge_by_key(x.col_partition(), &col_keys),
    )
}

fn merge_by_key(partition: &Partition, keys: &[Vec<u8>]) -> Partition {
    let mut first_with_key = std::collections::HashMap::new();
    let representative: Vec<usize> = keys
        .iter()
        .enumerate()
        .map(|(cluster, key)| *first_with_key.entry(key.as_slice()).or_insert(cluster))
        .collect();
    let labels: Vec<usize> = partition
        .labels()
        .iter()
        .map(|&l| representative[l])
        .collect();
    Partition::from_labels(&labels).expect("partition is nonempty")
}

/// The event that some effective cluster is larger than the generated
/// cluster size, i.e. the effective partition coarsens either axis.
pub fn degenerate_event_t(x: &BlockConstantMatrix) -> bool {
    let (rows, cols) = effective_partition(x);
    rows.cluster_count() < x.row_partition().cluster_count()
        || cols.cluster_count() < x.col_partition().cluster_count()
}

fn pairs(k: usize) -> f64 {
    (k as f64) * (k.saturating_sub(1) as f64) / 2.0
}

/// Union bound on the probability of the degenerate event:
/// `C(r,2) 2^-t + C(t,2) 2^-r`, capped at 1.
pub fn prob_t_union_bound(r: usize, t: usize) -> f64 {
    let bound = pairs(r) * 2f64.powi(-(t as i32)) + pairs(t) * 2f64.powi(-(r as i32));
    bound.min(1.0)
}

/// The looser form `m^2 2^-t + n^2 2^-r`, capped at 1.
pub fn prob_t_union_bound_loose(m: usize, n: usize, r: usize, t: usize) -> f64 {
    let (m, n) = (m as f64, n as f64);
    (m * m * 2f64.powi(-(t as i32)) + n * n * 2f64.powi(-(r as i32))).min(1.0)
}
