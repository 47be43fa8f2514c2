//! Exact rationals, open intervals and normalized finite unions of them.

mod interval;
mod open_set;
mod pattern;
pub mod rational;

pub use interval::{ClosedInterval, Endpoint, Interval};
pub use open_set::OpenSet;
pub use pattern::{PatternSet, Tail};
pub use rational::{format_rational, parse_rational, q, Rational};
