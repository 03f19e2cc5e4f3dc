//! Selective encrypted streams.
//!
//! Writers append rows to a shared stream, each row encrypted under one
//! public key. A data owner holding the master secret issues, per access
//! request `(policy, k)`, a predicate token that lets an untrusted processor
//! pick out the rows satisfying a conjunction of equality tests, and a
//! message token that lets the requester open cell `k` of those rows.
//!
//! * [`bilinear`]: the pairing group and the hashes built on it.
//! * [`aoe`]: amortized orthogonality encryption, the underlying primitive.
//! * [`sss`]: rows, policies, tokens and the hybrid cell envelope.
//! * [`invert`]: constructs a row satisfying a set of policy constraints.
//! * [`secharness`]: leakage profiles, real views and the simulator.
//! * [`store`], [`bench`], [`cli`]: the append-only stream file, the
//!   benchmark runner and the command-line front end.

pub mod aoe;
pub mod bench;
pub mod bilinear;
pub mod cli;
mod codec;
pub mod envelope;
pub mod error;
pub mod invert;
pub mod secharness;
pub mod sss;
pub mod store;

pub use error::{Error, Result};
