//! Deterministic seeded random streams and the sampling primitives used by
//! the growth algorithm.
//!
//! A [`RandomStream`] is derived from a 64-bit master seed and a stream
//! index; the same pair always reproduces the same sequence, and distinct
//! indices give statistically independent streams. Stream indices are
//! assigned by convention: 0 for a standalone generation run, `1000 + r`
//! for replica `r` in sweeps.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{EdgeRecord, MultiGraph, VertexId};
use crate::model::WeightTable;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic random stream, confined to one worker at a time.
#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    /// Derives the stream for `(master_seed, stream_index)`.
    ///
    /// The key is expanded with a splittable-counter construction: the
    /// index is mixed into the master seed through a strong integer hash,
    /// so replicas can be assigned disjoint indices without seed
    /// collisions.
    pub fn derive(master_seed: u64, stream_index: u64) -> Self {
        let mut state = master_seed ^ stream_index.wrapping_mul(0xA076_1D64_78BD_642F);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        RandomStream { rng: ChaCha8Rng::from_seed(key) }
    }

    /// Uniform draw from `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `[0, bound)`.
    pub fn next_index(&mut self, bound: u64) -> u64 {
        self.rng.random_range(0..bound)
    }

    #[cfg(test)]
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform edge record: each of the `m * n` records has probability
    /// exactly `1 / (m * n)`.
    pub fn sample_uniform_edge(&mut self, g: &MultiGraph) -> Result<EdgeRecord> {
        if g.edge_count() == 0 {
            return Err(Error::Precondition("graph has no edges to sample".into()));
        }
        let idx = self.next_index(g.edge_count() as u64) as usize;
        Ok(g.edge_at(idx))
    }

    /// Uniform vertex id in `{1, ..., bound}`.
    pub fn sample_uniform_vertex(&mut self, bound: u32) -> VertexId {
        debug_assert!(bound >= 1);
        1 + self.next_index(bound as u64) as VertexId
    }

    /// Draws a `(k, l)` entry with probability equal to its weight.
    ///
    /// Tables are tiny, so cumulative-weight inversion is used; zero-weight
    /// entries are never returned.
    pub fn sample_weight_entry(&mut self, table: &WeightTable) -> (u32, u32) {
        let u = self.next_f64();
        let mut acc = 0.0;
        let mut last = None;
        for e in table.entries() {
            if e.weight <= 0.0 {
                continue;
            }
            acc += e.weight;
            last = Some((e.k, e.l));
            if u < acc {
                return (e.k, e.l);
            }
        }
        last.expect("validated table has positive total weight")
    }
}
