//! Tamper functions on finite seed domains.
//!
//! An adversary is a fixed-point-free function on a dense index space
//! `0..domain_size`; whoever consumes it decides what the indices mean
//! (raw seed strings, embedded field elements, F_p values). Storing the
//! table over indices keeps the exhaustive sweeps branch-free.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableAdversary {
    table: Vec<u32>,
}

impl TableAdversary {
    /// Validates the fixed-point-free condition on construction.
    pub fn new(table: Vec<u32>) -> Result<Self> {
        for (i, &v) in table.iter().enumerate() {
            if v as usize == i {
                return Err(Error::FixedPointAdversary(i as u64));
            }
            if v as usize >= table.len() {
                return Err(Error::InvalidParam(format!(
                    "adversary output {v} outside domain of size {}",
                    table.len()
                )));
            }
        }
        Ok(TableAdversary { table })
    }

    pub fn domain_size(&self) -> usize {
        self.table.len()
    }

    pub fn apply(&self, i: u64) -> u64 {
        self.table[i as usize] as u64
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    /// XOR-offset adversary y -> y ^ c on a 2^bits domain, c != 0.
    pub fn offset(bits: u32, c: u64) -> Result<Self> {
        if c == 0 || c >= (1 << bits) {
            return Err(Error::InvalidParam(format!("offset {c} invalid for {bits} bits")));
        }
        let n = 1usize << bits;
        Ok(TableAdversary {
            table: (0..n).map(|y| (y as u64 ^ c) as u32).collect(),
        })
    }

    /// Flip the most significant bit of an n-bit seed.
    pub fn flip_top_bit(bits: u32) -> Self {
        TableAdversary::offset(bits, 1 << (bits - 1)).unwrap()
    }
}
