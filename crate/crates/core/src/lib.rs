//! Desk-scale harness self-distillation.
//!
//! A small autoregressive token policy is trained to reproduce, without
//! assistance, the behavior it shows when wrapped in a programmatic
//! inference harness. The crate provides the policy and its exact gradients,
//! the deterministic harness runtime with two concrete programs
//! (draft-verify over an online memory bank, plan-solve over reference
//! solutions), the distillation and policy-gradient objectives, synthetic
//! task generators with exact verifiers, and the evaluation battery.

pub mod context;
pub mod error;
pub mod harness;
pub mod membank;
pub mod policy;
pub mod seeds;
pub mod vocab;

pub use error::{Error, Result};
pub use policy::{ModelDims, PolicyParams, Rollout};
pub use vocab::{Token, Vocab};
