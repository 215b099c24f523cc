//! Memoryless erasure channel cascaded with a binary symmetric channel.

use rand::Rng;

use crate::model::{BlockConstantMatrix, ChannelParams, ObservedMatrix, Symbol};

/// Passes every entry of `x` through the channel.
///
/// Entries are visited row-major from the single stream `rng`. For each
/// entry one uniform draw decides erasure (`< epsilon`); a surviving entry
/// takes a second draw that flips it when `< p`.
pub fn transmit<R: Rng + ?Sized>(
    x: &BlockConstantMatrix,
    ch: &ChannelParams,
    rng: &mut R,
) -> ObservedMatrix {
    let (eps, p) = (ch.epsilon(), ch.p());
    let mut entries = Vec::with_capacity(x.m() * x.n());
    for &ri in x.row_partition().labels() {
        for &cj in x.col_partition().labels() {
            let bit = x.block_value(ri, cj);
            entries.push(observe(bit, eps, p, rng));
        }
    }
    ObservedMatrix::new(x.m(), x.n(), entries).expect("dimensions come from x")
}

#[inline]
fn observe<R: Rng + ?Sized>(bit: u8, eps: f64, p: f64, rng: &mut R) -> Symbol {
    if rng.random::<f64>() < eps {
        return Symbol::Erased;
    }
    let flipped = rng.random::<f64>() < p;
    Symbol::from_bit(bit ^ u8::from(flipped))
}
