//! Sub-word tokenization and encoder plug-in points, with deterministic
//! reference implementations that need no model files.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use thiserror::Error;

pub type SubtokenId = u32;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("encoder failure: {0}")]
pub struct EncodeError(pub String);

/// FNV-1a, used wherever a stable hash is needed.
pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// splitmix64 finalizer.
pub(crate) fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Maps a hash to `[-1, 1)`.
pub(crate) fn unit(x: u64) -> f64 {
    (x >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

pub trait SubwordTokenizer: Send + Sync {
    /// Sub-token ids of one token, never empty for a non-empty token.
    fn split(&self, token: &str) -> Vec<SubtokenId>;

    fn begin(&self) -> SubtokenId;

    fn end(&self) -> SubtokenId;
}

/// Cuts each token into chunks of `chunk` characters and hashes each chunk
/// into the id space below the two boundary sentinels.
#[derive(Clone, Debug)]
pub struct CharChunkTokenizer {
    pub chunk: usize,
    pub begin: SubtokenId,
    pub end: SubtokenId,
}

impl Default for CharChunkTokenizer {
    fn default() -> Self {
        CharChunkTokenizer {
            chunk: 4,
            begin: SubtokenId::MAX - 1,
            end: SubtokenId::MAX,
        }
    }
}

impl CharChunkTokenizer {
    pub fn with_chunk(chunk: usize) -> Self {
        CharChunkTokenizer {
            chunk: chunk.max(1),
            ..Default::default()
        }
    }
}

impl SubwordTokenizer for CharChunkTokenizer {
    fn split(&self, token: &str) -> Vec<SubtokenId> {
        let chars: Vec<char> = token.chars().collect();
        chars
            .chunks(self.chunk)
            .map(|piece| {
                let piece: String = piece.iter().collect();
                (fnv1a(piece.as_bytes()) & 0x7fff_ffff) as SubtokenId
            })
            .collect()
    }

    fn begin(&self) -> SubtokenId {
        self.begin
    }

    fn end(&self) -> SubtokenId {
        self.end
    }
}

pub trait Encoder: Send + Sync {
    fn dim(&self) -> usize;

    /// Encodes a batch of windows; returns one vector per window position.
    fn encode(&self, windows: &[Vec<SubtokenId>]) -> Result<Vec<Vec<Vec<f64>>>, EncodeError>;
}

/// Embeds every sub-token id as a fixed pseudo-random vector. Outputs do not
/// depend on the surrounding window, which makes window stitching exactly
/// checkable.
#[derive(Clone, Debug)]
pub struct HashEncoder {
    pub dim: usize,
}

impl Default for HashEncoder {
    fn default() -> Self {
        HashEncoder { dim: 32 }
    }
}

impl HashEncoder {
    pub fn embed(&self, id: SubtokenId) -> Vec<f64> {
        let base = mix(id as u64);
        (0..self.dim).map(|k| unit(mix(base ^ (k as u64).wrapping_mul(0x1000_0001)))).collect()
    }
}

impl Encoder for HashEncoder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn encode(&self, windows: &[Vec<SubtokenId>]) -> Result<Vec<Vec<Vec<f64>>>, EncodeError> {
        Ok(windows
            .iter()
            .map(|w| w.iter().map(|&id| self.embed(id)).collect())
            .collect())
    }
}

/// Wraps an encoder and counts how many times it was invoked.
pub struct CountingEncoder {
    inner: Arc<dyn Encoder>,
    calls: AtomicUsize,
    windows: AtomicUsize,
}

impl CountingEncoder {
    pub fn new(inner: Arc<dyn Encoder>) -> Self {
        CountingEncoder {
            inner,
            calls: AtomicUsize::new(0),
            windows: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn windows(&self) -> usize {
        self.windows.load(Ordering::SeqCst)
    }

    pub fn reset(&self) {
        self.calls.store(0, Ordering::SeqCst);
        self.windows.store(0, Ordering::SeqCst);
    }
}

impl Encoder for CountingEncoder {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn encode(&self, windows: &[Vec<SubtokenId>]) -> Result<Vec<Vec<Vec<f64>>>, EncodeError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.windows.fetch_add(windows.len(), Ordering::SeqCst);
        self.inner.encode(windows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunking() {
        let t = CharChunkTokenizer::default();
        assert_eq!(t.split("Atlanta").len(), 2);
        assert_eq!(t.split("is").len(), 1);
        assert_eq!(t.split("is"), t.split("is"));
        assert_ne!(t.split("is"), t.split("in"));
        assert!(t.split("Atlanta").iter().all(|&id| id < t.begin() && id < t.end()));
        assert_eq!(CharChunkTokenizer::with_chunk(1).split("héé").len(), 3);
    }

    #[test]
    fn hash_encoder_is_deterministic_and_bounded() {
        let e = HashEncoder::default();
        let out = e.encode(&[vec![1, 2], vec![2]]).unwrap();
        assert_eq!(out[0][1], out[1][0]);
        assert_eq!(out[0][0].len(), 32);
        assert!(out.iter().flatten().flatten().all(|x| (-1.0..1.0).contains(x)));
        assert_ne!(out[0][0], out[0][1]);
    }

    #[test]
    fn counting() {
        let e = CountingEncoder::new(Arc::new(HashEncoder::default()));
        e.encode(&[vec![1], vec![2]]).unwrap();
        e.encode(&[vec![1]]).unwrap();
        assert_eq!((e.calls(), e.windows()), (2, 3));
        e.reset();
        assert_eq!(e.calls(), 0);
    }
}
