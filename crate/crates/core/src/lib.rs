//! Dynamic multichannel access over correlated Markov channels.
//!
//! A single user senses one of `N` good/bad channels per slot and earns +1
//! on a good channel, -1 on a bad one. The crate provides:
//!
//! - [`channel`]: fixed-pattern, perfectly correlated, sliding-window, joint
//!   Markov, replayed-trace and nonstationary channel models with a seeded
//!   step interface;
//! - [`belief`]: exact belief filtering, Bellman backups, a small exact
//!   expectimax solver and closed-form fixed-pattern Q-values;
//! - [`policy`]: random, myopic, Whittle-index and fixed-pattern genie
//!   policies;
//! - [`nn`]: history-state encoding, a hand-written MLP with Adam, experience
//!   replay, deep and tabular Q-learning;
//! - [`harness`]: evaluation, adaptive retraining, multi-user extension,
//!   configuration and CSV experiment bundles.
//!
//! Channels and actions are 0-based throughout.

pub mod belief;
pub mod channel;
pub mod harness;
pub mod nn;
pub mod policy;
mod error;

pub use error::{Error, Result};

/// Random generator used for every simulation component.
pub type SimRng = rand_chacha::ChaCha8Rng;
