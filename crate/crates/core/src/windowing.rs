//! Sliding-window encoding of sub-token sequences that exceed the encoder's
//! maximum input length.
//!
//! A sequence `t` of length `n` begins with a boundary marker `B` (position 0)
//! and ends with `E` (position `n - 1`). When `n > m`, the interior is cut into
//! overlapping middles of width `m - 2` advancing by the stride
//! `s = ceil((m - 2) / 2)`, and every window is fed to the encoder as
//! `[B] ++ middle ++ [E]`. From each window only the `s` positions starting at
//! offset `o = ceil(s / 2)` into its middle are kept; the first window also
//! keeps everything before that (including `B`) and the last window everything
//! after (including `E`). The kept ranges partition `0..n`, so [`restore`]
//! stitches exactly one output per original position, always taken from a
//! window where that position has context on both sides.

use std::ops::Range;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WindowError {
    #[error("window size {0} leaves no room between the boundary markers (need m >= 4)")]
    WindowTooSmall(usize),

    #[error("sequence of length {0} lacks boundary markers (need n >= 2)")]
    SequenceTooShort(usize),

    #[error("plan was built for length {expected}, got a sequence of length {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("window {window}: expected {expected} outputs, got {actual}")]
    ShapeMismatch {
        window: usize,
        expected: usize,
        actual: usize,
    },

    #[error("token {0} has an empty or out-of-order sub-token range")]
    BadAlignment(usize),
}

/// One encoder window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    /// Interior positions of the original sequence placed between the copies
    /// of `B` and `E`. For a single window covering the whole sequence this is
    /// `1..n-1`.
    pub middle: Range<usize>,
    /// Original positions whose outputs are taken from this window.
    pub kept: Range<usize>,
}

impl Window {
    /// Number of positions the encoder sees.
    pub fn len(&self) -> usize {
        self.middle.len() + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index inside the window for original position `p`, which must lie in
    /// `kept`.
    fn local(&self, p: usize, n: usize) -> usize {
        if p == 0 {
            0
        } else if p == n - 1 {
            self.middle.len() + 1
        } else {
            p - self.middle.start + 1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowPlan {
    pub len: usize,
    pub max_window: usize,
    pub stride: usize,
    pub offset: usize,
    pub windows: Vec<Window>,
}

pub fn stride(m: usize) -> usize {
    (m - 2).div_ceil(2)
}

pub fn start_offset(m: usize) -> usize {
    stride(m).div_ceil(2)
}

/// Plans the windows for a sequence of length `n` under window size `m`.
pub fn plan_windows(n: usize, m: usize) -> Result<WindowPlan, WindowError> {
    if m < 4 {
        return Err(WindowError::WindowTooSmall(m));
    }
    if n < 2 {
        return Err(WindowError::SequenceTooShort(n));
    }
    let s = stride(m);
    let o = start_offset(m);
    let width = m - 2;
    let last = n - 1;

    let mut windows = Vec::new();
    if n <= m {
        windows.push(Window {
            middle: 1..last,
            kept: 0..n,
        });
    } else {
        let mut start = 1;
        loop {
            let end = (start + width).min(last);
            let first = windows.is_empty();
            let final_window = end == last;
            let kept_start = if first { 0 } else { start + o };
            let kept_end = if final_window { n } else { start + o + s };
            windows.push(Window {
                middle: start..end,
                kept: kept_start..kept_end,
            });
            if final_window {
                break;
            }
            start += s;
        }
    }
    Ok(WindowPlan {
        len: n,
        max_window: m,
        stride: s,
        offset: o,
        windows,
    })
}

/// Materializes every window as `[B] ++ middle ++ [E]`.
pub fn apply_windows<T: Clone>(seq: &[T], plan: &WindowPlan) -> Result<Vec<Vec<T>>, WindowError> {
    if seq.len() != plan.len {
        return Err(WindowError::LengthMismatch {
            expected: plan.len,
            actual: seq.len(),
        });
    }
    let first = &seq[0];
    let last = &seq[seq.len() - 1];
    Ok(plan
        .windows
        .iter()
        .map(|w| {
            let mut out = Vec::with_capacity(w.len());
            out.push(first.clone());
            out.extend_from_slice(&seq[w.middle.clone()]);
            out.push(last.clone());
            out
        })
        .collect())
}

/// Stitches per-window outputs back into one output per original position.
pub fn restore<V: Clone>(window_outputs: &[Vec<V>], plan: &WindowPlan) -> Result<Vec<V>, WindowError> {
    if window_outputs.len() != plan.windows.len() {
        return Err(WindowError::ShapeMismatch {
            window: window_outputs.len().min(plan.windows.len()),
            expected: plan.windows.len(),
            actual: window_outputs.len(),
        });
    }
    let mut restored = Vec::with_capacity(plan.len);
    for (idx, (w, outputs)) in plan.windows.iter().zip(window_outputs).enumerate() {
        if outputs.len() != w.len() {
            return Err(WindowError::ShapeMismatch {
                window: idx,
                expected: w.len(),
                actual: outputs.len(),
            });
        }
        restored.extend(w.kept.clone().map(|p| outputs[w.local(p, plan.len)].clone()));
    }
    Ok(restored)
}

/// A sub-tokenized sentence with boundary markers in place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtokenSequence<T> {
    pub items: Vec<T>,
    /// For each original token, its sub-token positions in `items`.
    pub alignment: Vec<Range<usize>>,
}

impl<T> SubtokenSequence<T> {
    /// Wraps per-token sub-token lists with `begin`/`end` markers.
    pub fn new(begin: T, end: T, pieces: Vec<Vec<T>>) -> Self {
        let mut items = vec![begin];
        let mut alignment = Vec::with_capacity(pieces.len());
        for token_pieces in pieces {
            let start = items.len();
            items.extend(token_pieces);
            alignment.push(start..items.len());
        }
        items.push(end);
        SubtokenSequence { items, alignment }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Checks that `alignment` tiles `1..n-1` with non-empty, contiguous ranges.
pub fn check_alignment(alignment: &[Range<usize>], n: usize) -> Result<(), WindowError> {
    let mut next = 1;
    for (idx, r) in alignment.iter().enumerate() {
        if r.start != next || r.end <= r.start {
            return Err(WindowError::BadAlignment(idx));
        }
        next = r.end;
    }
    if n < 2 || next != n - 1 {
        return Err(WindowError::BadAlignment(alignment.len()));
    }
    Ok(())
}

/// Averages sub-token vectors into one vector per token.
pub fn pool_subtokens(alignment: &[Range<usize>], subtoken_vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, WindowError> {
    alignment
        .iter()
        .enumerate()
        .map(|(idx, r)| {
            if r.is_empty() || r.end > subtoken_vectors.len() {
                return Err(WindowError::BadAlignment(idx));
            }
            let dim = subtoken_vectors[r.start].len();
            let mut sum = vec![0.0; dim];
            for v in &subtoken_vectors[r.clone()] {
                for (acc, x) in sum.iter_mut().zip(v) {
                    *acc += x;
                }
            }
            let count = r.len() as f64;
            Ok(sum.into_iter().map(|x| x / count).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_sequence_is_one_window() {
        let plan = plan_windows(7, 16).unwrap();
        assert_eq!(plan.windows, vec![Window { middle: 1..6, kept: 0..7 }]);
        let seq: Vec<u32> = (0..7).collect();
        assert_eq!(apply_windows(&seq, &plan).unwrap(), vec![seq.clone()]);
        assert_eq!(restore(std::slice::from_ref(&seq), &plan).unwrap(), seq);
    }

    #[test]
    fn exact_fit_is_one_window() {
        let plan = plan_windows(6, 6).unwrap();
        assert_eq!(plan.windows.len(), 1);
    }

    #[test]
    fn stride_and_offset() {
        // m = 6: s = ceil(4/2) = 2, o = ceil(2/2) = 1
        assert_eq!((stride(6), start_offset(6)), (2, 1));
        // m = 7: s = ceil(5/2) = 3, o = 2
        assert_eq!((stride(7), start_offset(7)), (3, 2));
        assert_eq!((stride(512), start_offset(512)), (255, 128));
    }

    #[test]
    fn rejects_bad_sizes() {
        assert_eq!(plan_windows(10, 3), Err(WindowError::WindowTooSmall(3)));
        assert_eq!(plan_windows(1, 8), Err(WindowError::SequenceTooShort(1)));
        let plan = plan_windows(5, 8).unwrap();
        assert!(matches!(apply_windows(&[1, 2, 3], &plan), Err(WindowError::LengthMismatch { .. })));
        assert!(matches!(restore::<u8>(&[], &plan), Err(WindowError::ShapeMismatch { .. })));
        assert!(matches!(restore(&[vec![1, 2]], &plan), Err(WindowError::ShapeMismatch { .. })));
    }

    #[test]
    fn subtoken_sequence_alignment() {
        let seq = SubtokenSequence::new(0, 9, vec![vec![1], vec![2, 3], vec![4]]);
        assert_eq!(seq.items, vec![0, 1, 2, 3, 4, 9]);
        assert_eq!(seq.alignment, vec![1..2, 2..4, 4..5]);
        assert!(check_alignment(&seq.alignment, seq.len()).is_ok());
        assert!(check_alignment(&[1..2, 3..4], 5).is_err());
        assert!(check_alignment(&[1..2], 5).is_err());
    }

    #[test]
    fn pooling() {
        let vecs = vec![vec![0.0, 0.0], vec![1.0, 3.0], vec![3.0, 5.0], vec![7.0, 7.0], vec![0.0, 0.0]];
        let pooled = pool_subtokens(&[1..3, 3..4], &vecs).unwrap();
        assert_eq!(pooled, vec![vec![2.0, 4.0], vec![7.0, 7.0]]);
        assert_eq!(pool_subtokens(&[1..1], &vecs), Err(WindowError::BadAlignment(0)));
    }
}
