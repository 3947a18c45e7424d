//! Length-sorted batching.
//!
//! Sequences are stably sorted by length and the sorted run is cut into
//! contiguous batches, so each batch holds neighbours in length. A batch is
//! bounded both by item count and by its padded size, `items * longest`.
//!
//! Cut points are chosen to use as few batches as possible and, among those,
//! the least padding. Any valid partition of the sequences can be rearranged
//! into a contiguous one over the sorted run with the same batch sizes and no
//! batch's longest member raised (give the batch with the smallest maximum the
//! smallest items, and so on), so no partition, in any order, beats the result
//! on (batches, padded tokens) compared lexicographically.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SamplerError {
    #[error("batch_size and batch_max_tokens must be positive")]
    ZeroCap,

    #[error("sequence {index} has length {len}, over the budget of {budget} tokens")]
    TooLong { index: usize, len: usize, budget: usize },

    #[error("sequence {0} is empty")]
    Empty(usize),

    #[error("expected {expected} outputs, got {actual}")]
    Cardinality { expected: usize, actual: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSpec {
    pub batch_size: usize,
    pub batch_max_tokens: usize,
}

impl Default for BatchSpec {
    fn default() -> Self {
        BatchSpec {
            batch_size: 128,
            batch_max_tokens: 12800,
        }
    }
}

impl BatchSpec {
    pub fn new(batch_size: usize, batch_max_tokens: usize) -> Result<Self, SamplerError> {
        if batch_size == 0 || batch_max_tokens == 0 {
            return Err(SamplerError::ZeroCap);
        }
        Ok(BatchSpec {
            batch_size,
            batch_max_tokens,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Batch {
    pub indices: Vec<usize>,
    pub max_len: usize,
}

impl Batch {
    pub fn padded_tokens(&self) -> usize {
        self.indices.len() * self.max_len
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BatchAssignment {
    pub batches: Vec<Batch>,
}

impl BatchAssignment {
    pub fn len(&self) -> usize {
        self.batches.iter().map(|b| b.indices.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.batches.is_empty()
    }

    pub fn padded_tokens(&self) -> usize {
        self.batches.iter().map(Batch::padded_tokens).sum()
    }
}

/// Greedily packs `order` (indices into `lengths`) into batches under `spec`,
/// closing a batch as soon as the next sequence does not fit. This is the
/// unsorted baseline that [`build_batches`] is measured against.
pub fn pack_in_order(order: &[usize], lengths: &[usize], spec: BatchSpec) -> Result<BatchAssignment, SamplerError> {
    if spec.batch_size == 0 || spec.batch_max_tokens == 0 {
        return Err(SamplerError::ZeroCap);
    }
    let mut batches: Vec<Batch> = Vec::new();
    let mut current = Batch {
        indices: Vec::new(),
        max_len: 0,
    };
    for &index in order {
        let len = lengths[index];
        if len == 0 {
            return Err(SamplerError::Empty(index));
        }
        if len > spec.batch_max_tokens {
            return Err(SamplerError::TooLong {
                index,
                len,
                budget: spec.batch_max_tokens,
            });
        }
        let max_len = current.max_len.max(len);
        let fits = current.indices.len() < spec.batch_size && (current.indices.len() + 1) * max_len <= spec.batch_max_tokens;
        if !fits {
            batches.push(std::mem::replace(
                &mut current,
                Batch {
                    indices: Vec::new(),
                    max_len: 0,
                },
            ));
        }
        current.max_len = current.max_len.max(len);
        current.indices.push(index);
    }
    if !current.indices.is_empty() {
        batches.push(current);
    }
    Ok(BatchAssignment { batches })
}

/// Sorts by length (ties by original index) and splits the sorted run into the
/// fewest batches, then the least padding, then the largest leading batches.
pub fn build_batches(lengths: &[usize], spec: BatchSpec) -> Result<BatchAssignment, SamplerError> {
    if spec.batch_size == 0 || spec.batch_max_tokens == 0 {
        return Err(SamplerError::ZeroCap);
    }
    for (index, &len) in lengths.iter().enumerate() {
        if len == 0 {
            return Err(SamplerError::Empty(index));
        }
        if len > spec.batch_max_tokens {
            return Err(SamplerError::TooLong {
                index,
                len,
                budget: spec.batch_max_tokens,
            });
        }
    }
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by_key(|&i| lengths[i]);
    let n = order.len();

    // best[i] = (batches, padded tokens, end of first batch) for order[i..]
    let mut best = vec![(0usize, 0usize, n); n + 1];
    for i in (0..n).rev() {
        let mut choice: Option<(usize, usize, usize)> = None;
        for j in i + 1..=n.min(i + spec.batch_size) {
            let padded = (j - i) * lengths[order[j - 1]];
            if padded > spec.batch_max_tokens {
                break;
            }
            let cand = (1 + best[j].0, padded + best[j].1, j);
            if choice.is_none_or(|c| (cand.0, cand.1) <= (c.0, c.1)) {
                choice = Some(cand);
            }
        }
        best[i] = choice.expect("a single sequence always fits");
    }

    let mut batches = Vec::new();
    let mut i = 0;
    while i < n {
        let j = best[i].2;
        batches.push(Batch {
            indices: order[i..j].to_vec(),
            max_len: lengths[order[j - 1]],
        });
        i = j;
    }
    Ok(BatchAssignment { batches })
}

/// Puts outputs produced batch by batch back into input order.
pub fn restore_order<T>(batched_outputs: Vec<Vec<T>>, assignment: &BatchAssignment) -> Result<Vec<T>, SamplerError> {
    let expected = assignment.len();
    let actual: usize = batched_outputs.iter().map(Vec::len).sum();
    if batched_outputs.len() != assignment.batches.len()
        || actual != expected
        || batched_outputs
            .iter()
            .zip(&assignment.batches)
            .any(|(out, b)| out.len() != b.indices.len())
    {
        return Err(SamplerError::Cardinality { expected, actual });
    }
    let mut slots: Vec<Option<T>> = (0..expected).map(|_| None).collect();
    for (outputs, batch) in batched_outputs.into_iter().zip(&assignment.batches) {
        for (out, &index) in outputs.into_iter().zip(&batch.indices) {
            match slots.get_mut(index) {
                Some(slot @ None) => *slot = Some(out),
                _ => return Err(SamplerError::Cardinality { expected, actual }),
            }
        }
    }
    // Every index was filled exactly once above.
    Ok(slots.into_iter().map(|s| s.expect("slot filled")).collect())
}
