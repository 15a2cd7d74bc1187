//! JSON files for instances and schedulings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market::{AgentId, AgentRecord, Instance, ItemId, MarketError};
use crate::partitions::{Interval, PartitionError, Scheduling};
use crate::time::{self, Time};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("syntax error: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid instance: {0}")]
    Invalid(#[from] MarketError),
    #[error("invalid scheduling: {0}")]
    Scheduling(#[from] PartitionError),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, bound = "T: Time")]
struct InstanceFile<T> {
    #[serde(with = "time::as_string")]
    market_open: T,
    #[serde(with = "time::as_string")]
    market_close: T,
    agents: Vec<AgentFile<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Time")]
struct AgentFile<T> {
    id: AgentId,
    endowment: ItemId,
    #[serde(with = "time::as_string")]
    arrival: T,
    #[serde(with = "time::as_string")]
    departure: T,
    preferences: Vec<ItemId>,
}

/// Parses and validates an instance document.
pub fn parse_instance<T: Time>(bytes: &[u8]) -> Result<Instance<T>, IoError> {
    let file: InstanceFile<T> = serde_json::from_slice(bytes)?;
    let agents = file
        .agents
        .into_iter()
        .map(|a| AgentRecord {
            id: a.id,
            endowment: a.endowment,
            arrival: a.arrival,
            departure: a.departure,
            preferences: a.preferences,
        })
        .collect();
    Ok(Instance::new(file.market_open, file.market_close, agents)?)
}

/// Canonical form: pretty-printed, agents by arrival, trailing newline.
pub fn serialize_instance<T: Time>(inst: &Instance<T>) -> String {
    let file = InstanceFile {
        market_open: inst.market_open().clone(),
        market_close: inst.market_close().clone(),
        agents: inst
            .agents()
            .iter()
            .map(|a| AgentFile {
                id: a.id,
                endowment: a.endowment.clone(),
                arrival: a.arrival.clone(),
                departure: a.departure.clone(),
                preferences: a.preferences.clone(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("instance serializes");
    text.push('\n');
    text
}

/// A JSON list of `{"start": .., "end": ..}` half-open intervals.
pub fn parse_scheduling<T: Time>(bytes: &[u8]) -> Result<Scheduling<T>, IoError> {
    let intervals: Vec<Interval<T>> = serde_json::from_slice(bytes)?;
    Ok(Scheduling::new(intervals)?)
}

pub fn serialize_scheduling<T: Time>(xi: &Scheduling<T>) -> String {
    let mut text = serde_json::to_string_pretty(xi.intervals()).expect("scheduling serializes");
    text.push('\n');
    text
}
