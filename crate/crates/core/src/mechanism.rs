//! Configured mechanisms: a procedure paired with its ordering or partition rule.

use std::fmt;

use thiserror::Error;

use crate::market::{AgentId, Allocation, Instance, MarketError};
use crate::orderings::OrderingRule;
use crate::partitions::PartitionRule;
use crate::serial;
use crate::time::Time;
use crate::trace::ExecutionTrace;
use crate::trading;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MechanismError {
    #[error("ordering is not prefix-stable: its prefix changed at the departure of agent {agent} (t={time})")]
    NotPrefixStable { agent: AgentId, time: String },
    #[error("partition is not progress-preserving: the block of agent {agent} at t={time} overlaps already matched agents")]
    NotProgressPreserving { agent: AgentId, time: String },
    #[error("agent {agent} has nothing to choose from")]
    EmptyChoiceSet { agent: AgentId },
    #[error("no safe item is left for agent {agent}")]
    NoSafeChoice { agent: AgentId },
    #[error("rule output does not cover agent {agent}")]
    MalformedRule { agent: AgentId },
    #[error(transparent)]
    Market(#[from] MarketError),
}

/// Allocation plus the phase-by-phase trace that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MechanismRun<T> {
    pub allocation: Allocation,
    pub trace: ExecutionTrace<T>,
}

#[derive(Debug, Clone)]
pub enum Mechanism<T> {
    StaticSd(OrderingRule<T>),
    DynamicSd(OrderingRule<T>),
    SafeSd(OrderingRule<T>),
    OnlineTtc(PartitionRule<T>),
    /// Plain TTC over every agent at once. Not online; used as a negative control.
    OfflineTtc,
}

impl<T: Time> Mechanism<T> {
    pub fn name(&self) -> String {
        match self {
            Mechanism::StaticSd(r) => format!("static-sd+{}", r.name()),
            Mechanism::DynamicSd(r) => format!("dynamic-sd+{}", r.name()),
            Mechanism::SafeSd(r) => format!("safe-sd+{}", r.name()),
            Mechanism::OnlineTtc(p) => format!("online-ttc+{}", p.name()),
            Mechanism::OfflineTtc => "offline-ttc".to_string(),
        }
    }

    pub fn run(&self, inst: &Instance<T>) -> Result<Allocation, MechanismError> {
        self.execute(inst, None)
    }

    pub fn run_traced(&self, inst: &Instance<T>) -> Result<MechanismRun<T>, MechanismError> {
        let mut trace = ExecutionTrace::default();
        let allocation = self.execute(inst, Some(&mut trace))?;
        Ok(MechanismRun { allocation, trace })
    }

    fn execute(&self, inst: &Instance<T>, trace: Option<&mut ExecutionTrace<T>>) -> Result<Allocation, MechanismError> {
        match self {
            Mechanism::StaticSd(r) => serial::static_sd(inst, r, trace),
            Mechanism::DynamicSd(r) => serial::dynamic_sd(inst, r, trace, serial::Choice::Best),
            Mechanism::SafeSd(r) => serial::dynamic_sd(inst, r, trace, serial::Choice::Safe),
            Mechanism::OnlineTtc(p) => trading::online_ttc(inst, p, trace),
            Mechanism::OfflineTtc => Ok(trading::run_ttc(&inst.agent_ids(), inst)),
        }
    }

    /// Absolute times the mechanism compares departures against, besides event times.
    pub fn time_breakpoints(&self) -> Vec<T> {
        match self {
            Mechanism::OnlineTtc(p) => p.breakpoints().to_vec(),
            _ => Vec::new(),
        }
    }
}

impl<T: Time> fmt::Display for Mechanism<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}
