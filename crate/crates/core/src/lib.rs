//! Multi-task NLP inference over a shared encoder.
//!
//! Sentences are split into sub-tokens, encoded once through bounded-size
//! sliding windows, pooled back to token vectors and then handed to every
//! requested task decoder in parallel. Results are collected into a
//! [`Document`](doc::Document), whose JSON form is the wire format used by
//! the native API, the REST server and the CLI alike.

pub mod decoders;
pub mod doc;
pub mod pipeline;
pub mod sampler;
pub mod windowing;

pub use doc::{AmrTriple, ConNode, CorefCluster, CorefMention, DepArc, DocError, Document, EntitySpan};
pub use pipeline::{Input, Pipeline, PipelineError, Task};
