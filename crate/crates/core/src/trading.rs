//! Top trading cycles, offline and driven by a partition rule.

use std::collections::{BTreeMap, BTreeSet};

use crate::market::{AgentId, Allocation, Instance};
use crate::mechanism::{MechanismError, MechanismRun};
use crate::partitions::PartitionRule;
use crate::time::Time;
use crate::trace::{Assignment, ExecutionTrace, Phase, PhaseDetail, TtcRound};

/// Functional graph: each agent points at the owner of her favourite item in the group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TtcGraph {
    pub points_to: BTreeMap<AgentId, AgentId>,
}

impl TtcGraph {
    pub fn vertices(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.points_to.keys().copied()
    }

    pub fn edges(&self) -> Vec<(AgentId, AgentId)> {
        self.points_to.iter().map(|(a, b)| (*a, *b)).collect()
    }
}

/// Agents absent from `inst` are ignored.
pub fn build_ttc_graph<T: Time>(group: &[AgentId], inst: &Instance<T>) -> TtcGraph {
    let members: Vec<_> = group.iter().filter_map(|&a| inst.agent(a)).collect();
    let mut points_to = BTreeMap::new();
    for m in &members {
        let target = m
            .preferences
            .iter()
            .find_map(|item| members.iter().find(|o| o.endowment == *item))
            .map_or(m.id, |o| o.id);
        points_to.insert(m.id, target);
    }
    TtcGraph { points_to }
}

/// All cycles, each rotated to start at its smallest id, sorted by that id.
pub fn find_cycles(g: &TtcGraph) -> Vec<Vec<AgentId>> {
    // 0 = unvisited, 1 = on the current walk, 2 = done
    let mut state: BTreeMap<AgentId, u8> = g.vertices().map(|v| (v, 0)).collect();
    let mut cycles = Vec::new();
    for start in g.vertices() {
        if state[&start] != 0 {
            continue;
        }
        let mut walk = Vec::new();
        let mut v = start;
        while state.get(&v) == Some(&0) {
            state.insert(v, 1);
            walk.push(v);
            v = g.points_to[&v];
        }
        if state.get(&v) == Some(&1) {
            let from = walk.iter().position(|&w| w == v).expect("on walk");
            let mut cycle = walk[from..].to_vec();
            let min_at = cycle.iter().enumerate().min_by_key(|(_, a)| **a).map(|(i, _)| i).unwrap_or(0);
            cycle.rotate_left(min_at);
            cycles.push(cycle);
        }
        for w in walk {
            state.insert(w, 2);
        }
    }
    cycles.sort();
    cycles
}

/// Offline TTC restricted to `group`, recording every round.
pub fn ttc_rounds<T: Time>(group: &[AgentId], inst: &Instance<T>) -> (Allocation, Vec<TtcRound>) {
    let mut left: BTreeSet<AgentId> = group.iter().copied().filter(|&a| inst.contains(a)).collect();
    let mut alloc = Allocation::new();
    let mut rounds = Vec::new();
    while !left.is_empty() {
        let members: Vec<AgentId> = left.iter().copied().collect();
        let g = build_ttc_graph(&members, inst);
        let cycles = find_cycles(&g);
        for cycle in &cycles {
            for &c in cycle {
                let target = g.points_to[&c];
                let item = inst.agent(target).expect("member").endowment.clone();
                alloc.insert_unchecked(c, item);
                left.remove(&c);
            }
        }
        rounds.push(TtcRound {
            edges: g.edges(),
            cycles,
        });
    }
    (alloc, rounds)
}

pub fn run_ttc<T: Time>(group: &[AgentId], inst: &Instance<T>) -> Allocation {
    ttc_rounds(group, inst).0
}

pub(crate) fn online_ttc<T: Time>(
    inst: &Instance<T>,
    rule: &PartitionRule<T>,
    mut trace: Option<&mut ExecutionTrace<T>>,
) -> Result<Allocation, MechanismError> {
    let mut alloc = Allocation::new();
    for leaving in inst.departure_order() {
        if alloc.get(leaving).is_some() {
            continue;
        }
        let departure = inst.agent(leaving).expect("listed agent").departure.clone();
        let cut = inst.truncate(&departure);
        let partition = rule.evaluate(&cut);
        let block: Vec<AgentId> = partition
            .block_of(leaving)
            .ok_or(MechanismError::MalformedRule { agent: leaving })?
            .iter()
            .copied()
            .collect();
        if block.iter().any(|&a| alloc.get(a).is_some() || !cut.contains(a)) {
            return Err(MechanismError::NotProgressPreserving {
                agent: leaving,
                time: departure.to_string(),
            });
        }
        let (part, rounds) = ttc_rounds(&block, &cut);
        let mut assignments = Vec::new();
        for (a, item) in part.iter() {
            alloc.insert_unchecked(a, item.clone());
            assignments.push(Assignment::new(a, item.clone()));
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(Phase {
                time: departure,
                departing: leaving,
                detail: PhaseDetail::Trading {
                    block,
                    rounds,
                    assignments,
                },
            });
        }
    }
    Ok(alloc)
}

/// At each departure of an unmatched agent, TTC runs on her block of the
/// partition of the truncated instance and settles the whole block.
pub fn run_online_ttc<T: Time>(inst: &Instance<T>, rule: &PartitionRule<T>) -> Result<MechanismRun<T>, MechanismError> {
    let mut trace = ExecutionTrace::default();
    let allocation = online_ttc(inst, rule, Some(&mut trace))?;
    Ok(MechanismRun { allocation, trace })
}
