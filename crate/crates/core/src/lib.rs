//! Exact, certificate-producing constructions around sequences that
//! diverge to infinity.
//!
//! * [`exact`]: rationals, open intervals and normalized open sets.
//! * [`omega`]: functions `ω → ω`, eventual domination, dominators and envelopes.
//! * [`sequence`]: diverging sequences with constructive moduli, the block
//!   generator, the coverage functional and the finite-horizon probe.
//! * [`adversary`]: an open set, unbounded above, that a given finite family
//!   of sequences visits only finitely often, with checkable certificates.
//! * [`category`]: dense open oracles and nested-interval witnesses.
//! * [`verify`]: re-checkers that recompute claims along separate code paths.

pub mod adversary;
pub mod category;
pub mod enclosure;
pub mod error;
pub mod exact;
pub mod omega;
pub mod sequence;
pub mod verify;

pub use error::{Error, Result};
pub use exact::{ClosedInterval, Endpoint, Interval, OpenSet, PatternSet, Rational, Tail};
pub use omega::OmegaFunction;
pub use sequence::{DivergingSequence, Generator, SequenceFamily, SequenceSpec};
