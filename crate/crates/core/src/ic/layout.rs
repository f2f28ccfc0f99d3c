//! Position maps inside each code block, segmentation and coupling.
//!
//! The last 24 positions of every block hold its CB CRC. The remaining
//! `K − 24` data positions are split into `D` pre positions (dummy head in
//! the first block, bits shared with the previous block otherwise), `D` post
//! positions (bits shared with the next block, dummy tail in the last
//! block) and the uncoupled rest. Pre positions sit at `⌊j·M/D⌋` and post
//! positions half a step later at `⌊(2j+1)·M/(2D)⌋`, `M = K − 24`, so both
//! sets are nearly equally spaced and disjoint whenever `2D ≤ M`.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::params::CodeParameters;
use crate::crc::{crc24_compute, CrcPolynomial, CRC_LEN};
use crate::{Bit, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    /// Known all-zero bits, never transmitted.
    Dummy,
    /// Bits shared with the neighbouring block.
    Coupled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CbLayout {
    pub index: usize,
    pub cb_len: usize,
    pub pre: Vec<usize>,
    pub pre_kind: BoundaryKind,
    pub post: Vec<usize>,
    pub post_kind: BoundaryKind,
    pub uncoupled: Vec<usize>,
}

impl CbLayout {
    pub fn crc(&self) -> Range<usize> {
        self.cb_len - CRC_LEN..self.cb_len
    }

    pub fn data_len(&self) -> usize {
        self.cb_len - CRC_LEN
    }

    /// Positions whose systematic bit is never sent by this block: dummy
    /// bits, and pre bits (sent by the previous block).
    pub fn is_head_dummy(&self) -> bool {
        self.pre_kind == BoundaryKind::Dummy
    }

    pub fn is_tail_dummy(&self) -> bool {
        self.post_kind == BoundaryKind::Dummy
    }

    /// Information bits of this block in TB order: uncoupled positions,
    /// then post positions unless they are dummies.
    pub fn info_positions(&self) -> impl Iterator<Item = usize> + '_ {
        let post: &[usize] = if self.is_tail_dummy() {
            &[]
        } else {
            &self.post
        };
        self.uncoupled.iter().chain(post).copied()
    }

    pub fn info_len(&self) -> usize {
        self.uncoupled.len()
            + if self.is_tail_dummy() {
                0
            } else {
                self.post.len()
            }
    }
}

/// Pre and post positions for data length `m` and coupling length `d`.
pub fn coupled_positions(m: usize, d: usize) -> (Vec<usize>, Vec<usize>) {
    let pre = (0..d).map(|j| j * m / d).collect();
    let post = (0..d).map(|j| (2 * j + 1) * m / (2 * d)).collect();
    (pre, post)
}

/// Layout of block `index` out of `num_cbs`.
pub fn cb_layout(index: usize, num_cbs: usize, cb_len: usize, coupling_len: usize) -> CbLayout {
    let m = cb_len - CRC_LEN;
    let (pre, post) = coupled_positions(m, coupling_len);
    let mut taken = vec![false; m];
    for &p in pre.iter().chain(&post) {
        taken[p] = true;
    }
    let uncoupled = (0..m).filter(|&p| !taken[p]).collect();
    CbLayout {
        index,
        cb_len,
        pre,
        pre_kind: if index == 0 {
            BoundaryKind::Dummy
        } else {
            BoundaryKind::Coupled
        },
        post,
        post_kind: if index + 1 == num_cbs {
            BoundaryKind::Dummy
        } else {
            BoundaryKind::Coupled
        },
        uncoupled,
    }
}

pub fn build_layouts(params: &CodeParameters) -> Vec<CbLayout> {
    (0..params.num_cbs)
        .map(|n| cb_layout(n, params.num_cbs, params.cb_len, params.coupling_len))
        .collect()
}

/// Splits the payload (TB with its CRC) into coupled code blocks.
///
/// Each block's information bits are filled in TB order; the block's last
/// `D` information bits land on its post positions and are copied to the
/// next block's pre positions. Padding zeros close the last block. Every
/// block gets its CB CRC under `cb_crc` over its first `K − 24` bits.
pub fn segment_and_couple(
    payload: &[Bit],
    params: &CodeParameters,
    cb_crc: CrcPolynomial,
) -> Result<(Vec<Vec<Bit>>, Vec<CbLayout>)> {
    if payload.len() != params.payload_len() {
        return Err(Error::MalformedInput(format!(
            "payload has {} bits, parameters expect {}",
            payload.len(),
            params.payload_len()
        )));
    }
    let layouts = build_layouts(params);
    let mut cbs = Vec::with_capacity(layouts.len());
    let mut source = payload
        .iter()
        .copied()
        .chain(std::iter::repeat_n(0, params.padding));
    let mut carried: Vec<Bit> = Vec::new();
    for lay in &layouts {
        let mut cb = vec![0 as Bit; lay.cb_len];
        if !lay.is_head_dummy() {
            for (&p, &b) in lay.pre.iter().zip(&carried) {
                cb[p] = b;
            }
        }
        for p in lay.info_positions() {
            cb[p] = source.next().expect("payload length checked");
        }
        carried = lay.post.iter().map(|&p| cb[p]).collect();
        let crc = crc24_compute(&cb[..lay.data_len()], cb_crc);
        cb[lay.crc()].copy_from_slice(&crc);
        cbs.push(cb);
    }
    Ok((cbs, layouts))
}

/// Inverse of [`segment_and_couple`]: gathers the information bits of each
/// block in order and strips the padding.
pub fn reassemble(cbs: &[Vec<Bit>], layouts: &[CbLayout], params: &CodeParameters) -> Vec<Bit> {
    let mut out = Vec::with_capacity(params.payload_len() + params.padding);
    for (cb, lay) in cbs.iter().zip(layouts) {
        out.extend(lay.info_positions().map(|p| cb[p]));
    }
    out.truncate(params.payload_len());
    out
}
