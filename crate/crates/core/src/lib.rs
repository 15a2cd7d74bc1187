//! Online housing markets: agents arrive and depart over time, each bringing
//! one indivisible item, and a mechanism must settle every agent's item by the
//! time she leaves.
//!
//! The library covers serial dictatorship (static, dynamic and safe variants),
//! online top trading cycles with pluggable partition rules, brute-force
//! optimality oracles and an exhaustive misreport search.
//!
//! Everything is generic over an exact [`Time`] scalar. The aliases below fix
//! it to [`TimePoint`], which is what the CLI and the fixtures use.

pub mod fixtures;
pub mod generate;
pub mod io;
pub mod matching;
pub mod market;
pub mod mechanism;
pub mod orderings;
pub mod partitions;
pub mod serial;
pub mod time;
pub mod trace;
pub mod trading;
pub mod verification;

pub use market::{AgentId, Allocation, ItemId, MarketError};
pub use mechanism::MechanismError;
pub use time::Time;

/// Exact rational time with 64-bit numerator and denominator.
pub type TimePoint = num_rational::Ratio<i64>;
/// Arbitrary-precision rational time.
pub type BigTimePoint = num_rational::BigRational;

pub type Instance = market::Instance<TimePoint>;
pub type AgentRecord = market::AgentRecord<TimePoint>;
pub type EventStream = market::EventStream<TimePoint>;
pub type OrderingRule = orderings::OrderingRule<TimePoint>;
pub type PartitionRule = partitions::PartitionRule<TimePoint>;
pub type Scheduling = partitions::Scheduling<TimePoint>;
pub type Threshold = partitions::Threshold<TimePoint>;
pub type Mechanism = mechanism::Mechanism<TimePoint>;
pub type MechanismRun = mechanism::MechanismRun<TimePoint>;
pub type ExecutionTrace = trace::ExecutionTrace<TimePoint>;
pub type PropertyReport = verification::PropertyReport<TimePoint>;
