//! Serial dictatorship driven by departures: static, dynamic and safe variants.

use std::collections::BTreeSet;

use crate::market::{AgentId, AgentRecord, Allocation, Instance, ItemId};
use crate::matching::saturates_left;
use crate::mechanism::{MechanismError, MechanismRun};
use crate::orderings::OrderingRule;
use crate::time::Time;
use crate::trace::{Assignment, ExecutionTrace, Phase, PhaseDetail};

/// Most preferred item of `agent` within `available`.
pub fn best<T: Time>(agent: &AgentRecord<T>, available: &BTreeSet<ItemId>) -> Result<ItemId, MechanismError> {
    agent
        .preferences
        .iter()
        .find(|p| available.contains(*p))
        .cloned()
        .ok_or(MechanismError::EmptyChoiceSet { agent: agent.id })
}

/// State seen by [`best_safe`] during one phase.
#[derive(Debug, Clone, Default)]
pub struct SafeContext {
    /// Present agents without a permanent item, the choosing agent included.
    pub unmatched: Vec<AgentId>,
    /// Items already reserved in this phase.
    pub reservations: Allocation,
}

/// Can `remaining` each get an available item at least as good as her own?
///
/// Items held by `fixed` are never offered to `remaining`.
pub fn safeness_check<T: Time>(
    fixed: &Allocation,
    remaining: &[AgentId],
    available: &BTreeSet<ItemId>,
    inst: &Instance<T>,
) -> bool {
    let items: Vec<&ItemId> = available.iter().filter(|i| !fixed.contains_item(i)).collect();
    let mut adj = Vec::with_capacity(remaining.len());
    for &k in remaining {
        let Some(rec) = inst.agent(k) else {
            return false;
        };
        let edges: Vec<usize> = items
            .iter()
            .enumerate()
            .filter(|(_, item)| rec.weakly_prefers(item, &rec.endowment))
            .map(|(v, _)| v)
            .collect();
        adj.push(edges);
    }
    saturates_left(&adj, items.len())
}

/// Most preferred item of `agent` within `available` that still leaves an
/// individually rational completion for every other unmatched agent, treating
/// the phase's reservations as fixed.
pub fn best_safe<T: Time>(
    agent: &AgentRecord<T>,
    available: &BTreeSet<ItemId>,
    ctx: &SafeContext,
    inst: &Instance<T>,
) -> Result<ItemId, MechanismError> {
    if available.is_empty() {
        return Err(MechanismError::EmptyChoiceSet { agent: agent.id });
    }
    let remaining: Vec<AgentId> = ctx
        .unmatched
        .iter()
        .copied()
        .filter(|&k| k != agent.id && ctx.reservations.get(k).is_none())
        .collect();
    for x in agent.preferences.iter().filter(|p| available.contains(*p)) {
        let mut fixed = ctx.reservations.clone();
        fixed.insert_unchecked(agent.id, x.clone());
        let mut rest = available.clone();
        rest.remove(x);
        if safeness_check(&fixed, &remaining, &rest, inst) {
            return Ok(x.clone());
        }
    }
    Err(MechanismError::NoSafeChoice { agent: agent.id })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    Best,
    Safe,
}

fn lookup<T: Time>(inst: &Instance<T>, id: AgentId) -> Result<&AgentRecord<T>, MechanismError> {
    inst.agent(id).ok_or(MechanismError::MalformedRule { agent: id })
}

pub(crate) fn static_sd<T: Time>(
    inst: &Instance<T>,
    rule: &OrderingRule<T>,
    mut trace: Option<&mut ExecutionTrace<T>>,
) -> Result<Allocation, MechanismError> {
    let mut alloc = Allocation::new();
    let mut assigned: BTreeSet<ItemId> = BTreeSet::new();
    // Agents the pointer has passed, in order; this is B.
    let mut passed: Vec<AgentId> = Vec::new();
    for leaving in inst.departure_order() {
        if alloc.get(leaving).is_some() {
            continue;
        }
        let rec = lookup(inst, leaving)?;
        let cut = inst.truncate(&rec.departure);
        let order = rule.evaluate(&cut);
        let stale = || MechanismError::NotPrefixStable {
            agent: leaving,
            time: rec.departure.to_string(),
        };
        if order.len() < passed.len() || order[..passed.len()] != passed[..] {
            return Err(stale());
        }
        let mut available: BTreeSet<ItemId> = cut.items();
        available.retain(|i| !assigned.contains(i));
        let mut picks = Vec::new();
        let mut j = passed.len();
        loop {
            let Some(&next) = order.get(j) else {
                return Err(stale());
            };
            if passed.contains(&next) {
                return Err(stale());
            }
            let item = best(lookup(inst, next)?, &available)?;
            available.remove(&item);
            assigned.insert(item.clone());
            alloc.insert_unchecked(next, item.clone());
            passed.push(next);
            j += 1;
            if next == leaving {
                if let Some(t) = trace.as_deref_mut() {
                    t.push(Phase {
                        time: rec.departure.clone(),
                        departing: leaving,
                        detail: PhaseDetail::Serial {
                            picks,
                            reservations: Vec::new(),
                            assignment: Assignment::new(leaving, item),
                        },
                    });
                }
                break;
            }
            picks.push(Assignment::new(next, item));
        }
    }
    Ok(alloc)
}

pub(crate) fn dynamic_sd<T: Time>(
    inst: &Instance<T>,
    rule: &OrderingRule<T>,
    mut trace: Option<&mut ExecutionTrace<T>>,
    choice: Choice,
) -> Result<Allocation, MechanismError> {
    let mut alloc = Allocation::new();
    let mut assigned: BTreeSet<ItemId> = BTreeSet::new();
    for leaving in inst.departure_order() {
        let rec = lookup(inst, leaving)?;
        let cut = inst.truncate(&rec.departure);
        let order = rule.evaluate(&cut);
        let mut available: BTreeSet<ItemId> = cut.items();
        available.retain(|i| !assigned.contains(i));
        let mut ctx = SafeContext {
            unmatched: cut.agent_ids().into_iter().filter(|a| alloc.get(*a).is_none()).collect(),
            reservations: Allocation::new(),
        };
        let mut reservations = Vec::new();
        let mut reached = false;
        for &next in &order {
            if next == leaving {
                reached = true;
                break;
            }
            if alloc.get(next).is_some() {
                continue;
            }
            let who = lookup(&cut, next)?;
            let item = match choice {
                Choice::Best => best(who, &available)?,
                Choice::Safe => best_safe(who, &available, &ctx, &cut)?,
            };
            available.remove(&item);
            ctx.reservations.insert_unchecked(next, item.clone());
            reservations.push(Assignment::new(next, item));
        }
        if !reached {
            return Err(MechanismError::MalformedRule { agent: leaving });
        }
        let who = lookup(&cut, leaving)?;
        let item = match choice {
            Choice::Best => best(who, &available)?,
            Choice::Safe => best_safe(who, &available, &ctx, &cut)?,
        };
        assigned.insert(item.clone());
        alloc.insert_unchecked(leaving, item.clone());
        if let Some(t) = trace.as_deref_mut() {
            t.push(Phase {
                time: rec.departure.clone(),
                departing: leaving,
                detail: PhaseDetail::Serial {
                    picks: Vec::new(),
                    reservations,
                    assignment: Assignment::new(leaving, item),
                },
            });
        }
    }
    Ok(alloc)
}

/// Algorithm with irrevocable picks by every agent ahead of the departing one.
pub fn run_static_sd<T: Time>(inst: &Instance<T>, rule: &OrderingRule<T>) -> Result<MechanismRun<T>, MechanismError> {
    let mut trace = ExecutionTrace::default();
    let allocation = static_sd(inst, rule, Some(&mut trace))?;
    Ok(MechanismRun { allocation, trace })
}

/// Agents ahead only reserve; the reservations are dropped after each phase.
pub fn run_dynamic_sd<T: Time>(inst: &Instance<T>, rule: &OrderingRule<T>) -> Result<MechanismRun<T>, MechanismError> {
    let mut trace = ExecutionTrace::default();
    let allocation = dynamic_sd(inst, rule, Some(&mut trace), Choice::Best)?;
    Ok(MechanismRun { allocation, trace })
}

/// As [`run_dynamic_sd`], choosing with [`best_safe`].
pub fn run_safe_sd<T: Time>(inst: &Instance<T>, rule: &OrderingRule<T>) -> Result<MechanismRun<T>, MechanismError> {
    let mut trace = ExecutionTrace::default();
    let allocation = dynamic_sd(inst, rule, Some(&mut trace), Choice::Safe)?;
    Ok(MechanismRun { allocation, trace })
}
