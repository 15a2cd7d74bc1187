use crate::market::{is_compatible, pareto_dominates, AgentRecord, Allocation, Instance, ItemId};
use crate::mechanism::Mechanism;
use crate::time::Time;

use super::{Property, PropertyReport, Shortfall, VerifyError, Witness};

/// Default agent cap for the enumeration oracles.
pub const ENUMERATION_CAP: usize = 7;

/// Every compatible allocation, in lexicographic order of item choices
/// (agents and items both taken in arrival order).
pub fn enumerate_compatible<T: Time>(inst: &Instance<T>, cap: usize) -> Result<Vec<Allocation>, VerifyError> {
    if inst.len() > cap {
        return Err(VerifyError::TooLarge {
            n: inst.len(),
            cap,
            what: "allocation enumeration".to_string(),
        });
    }
    let agents = inst.agents();
    let allowed: Vec<Vec<usize>> = agents
        .iter()
        .map(|a| (0..agents.len()).filter(|&o| agents[o].arrival < a.departure).collect())
        .collect();
    let mut out = Vec::new();
    let mut used = vec![false; agents.len()];
    let mut choice = Vec::with_capacity(agents.len());
    extend(agents, &allowed, &mut used, &mut choice, &mut out);
    Ok(out)
}

fn extend<T: Time>(
    agents: &[AgentRecord<T>],
    allowed: &[Vec<usize>],
    used: &mut [bool],
    choice: &mut Vec<usize>,
    out: &mut Vec<Allocation>,
) {
    let k = choice.len();
    if k == agents.len() {
        let mut alloc = Allocation::new();
        for (a, &o) in agents.iter().zip(choice.iter()) {
            alloc.insert_unchecked(a.id, agents[o].endowment.clone());
        }
        out.push(alloc);
        return;
    }
    for &o in &allowed[k] {
        if !used[o] {
            used[o] = true;
            choice.push(o);
            extend(agents, allowed, used, choice, out);
            choice.pop();
            used[o] = false;
        }
    }
}

/// Not Pareto-dominated by any compatible allocation.
pub fn is_mpo<T: Time>(alloc: &Allocation, inst: &Instance<T>) -> Result<PropertyReport<T>, VerifyError> {
    if !is_compatible(alloc, inst) {
        return Err(VerifyError::NotCompatible);
    }
    for other in enumerate_compatible(inst, ENUMERATION_CAP)? {
        if pareto_dominates(&other, alloc, inst) {
            return Ok(PropertyReport::violated(Property::Mpo, Witness::Dominated { dominating: other }));
        }
    }
    Ok(PropertyReport::holds(Property::Mpo))
}

/// Every agent gets an item at least as good as her endowment.
pub fn is_ir<T: Time>(alloc: &Allocation, inst: &Instance<T>) -> PropertyReport<T> {
    let violations: Vec<Shortfall> = inst
        .agents()
        .iter()
        .filter_map(|a| match alloc.get(a.id) {
            Some(item) if a.weakly_prefers(item, &a.endowment) => None,
            other => Some(Shortfall {
                agent: a.id,
                item: other.cloned().unwrap_or_else(|| ItemId::new("")),
                endowment: a.endowment.clone(),
            }),
        })
        .collect();
    if violations.is_empty() {
        PropertyReport::holds(Property::Ir)
    } else {
        PropertyReport::violated(Property::Ir, Witness::Individual { violations })
    }
}

/// Backtracking search for an injective acceptable assignment.
fn completable<T: Time>(rest: &[&AgentRecord<T>], pool: &mut Vec<(ItemId, bool)>) -> bool {
    let Some((first, tail)) = rest.split_first() else {
        return true;
    };
    for slot in 0..pool.len() {
        if pool[slot].1 || !first.weakly_prefers(&pool[slot].0, &first.endowment) {
            continue;
        }
        pool[slot].1 = true;
        let ok = completable(tail, pool);
        pool[slot].1 = false;
        if ok {
            return true;
        }
    }
    false
}

/// IR, and at every departure `d_i` the agents already gone keep their items
/// while the others still present can each be given an acceptable arrived item.
///
/// Completions are searched by plain backtracking, independently of the
/// matching routine the mechanisms use.
pub fn is_safe_allocation<T: Time>(alloc: &Allocation, inst: &Instance<T>) -> Result<PropertyReport<T>, VerifyError> {
    if !is_compatible(alloc, inst) {
        return Err(VerifyError::NotCompatible);
    }
    let ir = is_ir(alloc, inst);
    if let Some(w) = ir.witness {
        return Ok(PropertyReport::violated(Property::Safe, w));
    }
    for i in inst.agents() {
        let d = &i.departure;
        let present: Vec<&AgentRecord<T>> = inst.agents().iter().filter(|a| a.arrival < *d).collect();
        let (gone, rest): (Vec<&AgentRecord<T>>, Vec<&AgentRecord<T>>) =
            present.iter().partition(|a| a.departure <= *d);
        let taken: Vec<&ItemId> = gone.iter().filter_map(|a| alloc.get(a.id)).collect();
        let mut pool: Vec<(ItemId, bool)> = present
            .iter()
            .map(|a| a.endowment.clone())
            .filter(|e| !taken.contains(&e))
            .map(|e| (e, false))
            .collect();
        if !completable(&rest, &mut pool) {
            return Ok(PropertyReport::violated(
                Property::Safe,
                Witness::Unsafe {
                    agent: i.id,
                    no_completion_at: d.clone(),
                },
            ));
        }
    }
    Ok(PropertyReport::holds(Property::Safe))
}

/// Not Pareto-dominated by any safe allocation.
pub fn is_spo<T: Time>(alloc: &Allocation, inst: &Instance<T>) -> Result<PropertyReport<T>, VerifyError> {
    if !is_safe_allocation(alloc, inst)?.is_holds() {
        return Err(VerifyError::NotSafe);
    }
    for other in enumerate_compatible(inst, ENUMERATION_CAP)? {
        if pareto_dominates(&other, alloc, inst) && is_safe_allocation(&other, inst)?.is_holds() {
            return Ok(PropertyReport::violated(Property::Spo, Witness::Dominated { dominating: other }));
        }
    }
    Ok(PropertyReport::holds(Property::Spo))
}

/// Each agent's item is the same on `I` and on `I_{<d_i}`.
pub fn check_online<T: Time>(mech: &Mechanism<T>, inst: &Instance<T>) -> Result<PropertyReport<T>, VerifyError> {
    let full = mech.run(inst)?;
    for a in inst.agents() {
        let cut = mech.run(&inst.truncate(&a.departure))?;
        let (x, y) = (full.get(a.id), cut.get(a.id));
        if x != y {
            let missing = || ItemId::new("");
            return Ok(PropertyReport::violated(
                Property::Online,
                Witness::Online {
                    agent: a.id,
                    full_item: x.cloned().unwrap_or_else(missing),
                    truncated_item: y.cloned().unwrap_or_else(missing),
                },
            ));
        }
    }
    Ok(PropertyReport::holds(Property::Online))
}
