//! Per-departure execution records, with a text rendering and a JSON twin.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::market::{AgentId, ItemId};
use crate::time::{self, Time};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub agent: AgentId,
    pub item: ItemId,
}

impl Assignment {
    pub fn new(agent: AgentId, item: ItemId) -> Self {
        Assignment { agent, item }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.agent, self.item)
    }
}

/// One round of top trading cycles: the graph and the cycles removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TtcRound {
    pub edges: Vec<(AgentId, AgentId)>,
    pub cycles: Vec<Vec<AgentId>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PhaseDetail {
    Serial {
        /// Permanent picks by agents ahead of the departing one (static variant only).
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        picks: Vec<Assignment>,
        reservations: Vec<Assignment>,
        assignment: Assignment,
    },
    Trading {
        block: Vec<AgentId>,
        rounds: Vec<TtcRound>,
        assignments: Vec<Assignment>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Time")]
pub struct Phase<T> {
    #[serde(with = "time::as_string")]
    pub time: T,
    pub departing: AgentId,
    #[serde(flatten)]
    pub detail: PhaseDetail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Time")]
pub struct ExecutionTrace<T> {
    pub phases: Vec<Phase<T>>,
}

impl<T> Default for ExecutionTrace<T> {
    fn default() -> Self {
        ExecutionTrace { phases: Vec::new() }
    }
}

fn list<I: fmt::Display>(items: &[I]) -> String {
    let parts: Vec<String> = items.iter().map(|i| i.to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn agents(ids: &[AgentId]) -> String {
    let parts: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
    parts.join(",")
}

impl<T: Time> ExecutionTrace<T> {
    pub fn push(&mut self, phase: Phase<T>) {
        self.phases.push(phase);
    }

    /// One line per serial phase; trading phases add one indented line per round.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.phases {
            out.push_str(&format!("t={} dep={}", p.time, p.departing));
            match &p.detail {
                PhaseDetail::Serial {
                    picks,
                    reservations,
                    assignment,
                } => {
                    if !picks.is_empty() {
                        out.push_str(&format!(" pick={}", list(picks)));
                    }
                    out.push_str(&format!(" reserve={} assign={}\n", list(reservations), assignment));
                }
                PhaseDetail::Trading {
                    block,
                    rounds,
                    assignments,
                } => {
                    out.push_str(&format!(" block={{{}}} assign={}\n", agents(block), list(assignments)));
                    for (r, round) in rounds.iter().enumerate() {
                        let edges: Vec<String> = round.edges.iter().map(|(a, b)| format!("{a}->{b}")).collect();
                        let cycles: Vec<String> = round.cycles.iter().map(|c| format!("({})", agents(c))).collect();
                        out.push_str(&format!(
                            "  round={} edges=[{}] cycles=[{}]\n",
                            r + 1,
                            edges.join(","),
                            cycles.join(",")
                        ));
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("trace serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TimePoint;

    fn sample() -> ExecutionTrace<TimePoint> {
        let a = |agent: u32, item: &str| Assignment::new(AgentId(agent), ItemId::new(item));
        let mut trace = ExecutionTrace::default();
        trace.push(Phase {
            time: TimePoint::new(7, 2),
            departing: AgentId(2),
            detail: PhaseDetail::Serial {
                picks: vec![],
                reservations: vec![a(1, "e2")],
                assignment: a(2, "e1"),
            },
        });
        trace.push(Phase {
            time: TimePoint::from_int(6),
            departing: AgentId(2),
            detail: PhaseDetail::Trading {
                block: vec![AgentId(2), AgentId(3)],
                rounds: vec![TtcRound {
                    edges: vec![(AgentId(2), AgentId(3)), (AgentId(3), AgentId(2))],
                    cycles: vec![vec![AgentId(2), AgentId(3)]],
                }],
                assignments: vec![a(2, "e3"), a(3, "e2")],
            },
        });
        trace
    }

    #[test]
    fn text_rendering() {
        assert_eq!(
            sample().to_text(),
            "t=7/2 dep=2 reserve=[(1,e2)] assign=(2,e1)\n\
             t=6 dep=2 block={2,3} assign=[(2,e3),(3,e2)]\n  \
             round=1 edges=[2->3,3->2] cycles=[(2,3)]\n"
        );
    }

    #[test]
    fn json_twin_round_trips() {
        let trace = sample();
        let json = trace.to_json();
        assert_eq!(json["phases"][0]["time"], "7/2");
        assert_eq!(json["phases"][0]["kind"], "serial");
        let back: ExecutionTrace<TimePoint> = serde_json::from_value(json).unwrap();
        assert_eq!(back, trace);
    }
}
