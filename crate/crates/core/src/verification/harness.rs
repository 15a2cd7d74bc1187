use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use crate::generate::{below, shuffle};
use crate::market::{AgentRecord, Instance, ItemId};
use crate::mechanism::Mechanism;
use crate::time::Time;

use super::{Manipulation, Property, PropertyReport, VerifyError, Witness};

/// Which parts of her report an agent may change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Notion {
    /// Preferences only.
    Wic,
    /// Preferences and a later arrival.
    Aic,
    /// Preferences and an earlier departure.
    Dic,
    /// Preferences and both times.
    Sic,
}

impl Notion {
    pub fn property(self) -> Property {
        match self {
            Notion::Wic => Property::Wic,
            Notion::Aic => Property::Aic,
            Notion::Dic => Property::Dic,
            Notion::Sic => Property::Sic,
        }
    }

    fn moves_arrival(self) -> bool {
        matches!(self, Notion::Aic | Notion::Sic)
    }

    fn moves_departure(self) -> bool {
        matches!(self, Notion::Dic | Notion::Sic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleConfig {
    pub seed: u64,
    pub draws: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarnessConfig {
    /// Largest instance searched exhaustively for SIC.
    pub sic_cap: usize,
    /// Largest instance searched exhaustively for WIC, a-IC and d-IC.
    pub single_cap: usize,
    /// Above the caps, sample misreports instead of failing.
    pub sample: Option<SampleConfig>,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            sic_cap: 4,
            single_cap: 6,
            sample: None,
        }
    }
}

/// One representative time per order class strictly inside `(lo, hi)`.
///
/// Class boundaries are the other agents' event times and `extra` (the
/// mechanism's own breakpoints) lying strictly inside the window. Each gap
/// between consecutive boundaries contributes its midpoint; the two outer
/// gaps contribute the point a third of the way in from the window end.
pub fn candidate_times<T: Time>(inst: &Instance<T>, agent: &AgentRecord<T>, lo: &T, hi: &T, extra: &[T]) -> Vec<T> {
    let mut cuts: Vec<T> = inst
        .agents()
        .iter()
        .filter(|a| a.id != agent.id)
        .flat_map(|a| [a.arrival.clone(), a.departure.clone()])
        .chain(extra.iter().cloned())
        .filter(|t| lo < t && t < hi)
        .collect();
    cuts.sort();
    cuts.dedup();
    let Some(first) = cuts.first() else {
        return vec![lo.lerp(hi, 1, 3), lo.lerp(hi, 2, 3)];
    };
    let mut out = vec![lo.lerp(first, 1, 3)];
    for w in cuts.windows(2) {
        out.push(w[0].midpoint(&w[1]));
    }
    out.push(hi.lerp(cuts.last().expect("nonempty"), 1, 3));
    out
}

fn arrival_options<T: Time>(inst: &Instance<T>, me: &AgentRecord<T>, notion: Notion, extra: &[T]) -> Vec<T> {
    let mut out = vec![me.arrival.clone()];
    if notion.moves_arrival() {
        out.extend(candidate_times(inst, me, &me.arrival, &me.departure, extra));
    }
    out
}

fn departure_options<T: Time>(inst: &Instance<T>, me: &AgentRecord<T>, arrival: &T, notion: Notion, extra: &[T]) -> Vec<T> {
    let mut out = Vec::new();
    if notion.moves_departure() {
        out.extend(candidate_times(inst, me, arrival, &me.departure, extra));
    }
    out.push(me.departure.clone());
    out
}

/// All strict orders over `items`, lexicographic in positions of `items`.
fn permutations(items: &[ItemId]) -> Vec<Vec<ItemId>> {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    let mut out = vec![idx.iter().map(|&i| items[i].clone()).collect()];
    // next_permutation
    loop {
        let Some(i) = (1..idx.len()).rev().find(|&i| idx[i - 1] < idx[i]) else {
            return out;
        };
        let j = (i..idx.len()).rev().find(|&j| idx[j] > idx[i - 1]).expect("pivot exists");
        idx.swap(i - 1, j);
        idx[i..].reverse();
        out.push(idx.iter().map(|&k| items[k].clone()).collect());
    }
}

/// Runs `mech` on `inst` with `m` applied and returns the deviator's item.
pub fn replay<T: Time>(mech: &Mechanism<T>, inst: &Instance<T>, m: &Manipulation<T>) -> Result<ItemId, VerifyError> {
    let me = inst.agent(m.agent).ok_or(VerifyError::NotCompatible)?;
    let mut record = me.clone();
    if let Some(a) = &m.reported_arrival {
        record.arrival = a.clone();
    }
    if let Some(d) = &m.reported_departure {
        record.departure = d.clone();
    }
    if let Some(p) = &m.reported_preferences {
        record.preferences = p.clone();
    }
    let deviated = inst.with_agent(record)?;
    let out = mech.run(&deviated)?;
    out.get(m.agent).cloned().ok_or(VerifyError::NotCompatible)
}

struct Probe<'a, T> {
    mech: &'a Mechanism<T>,
    inst: &'a Instance<T>,
}

impl<T: Time> Probe<'_, T> {
    /// Item obtained by `me` when reporting `(a, d, prefs)`.
    fn try_report(&self, me: &AgentRecord<T>, a: &T, d: &T, prefs: &[ItemId]) -> Result<ItemId, VerifyError> {
        let record = AgentRecord {
            id: me.id,
            endowment: me.endowment.clone(),
            arrival: a.clone(),
            departure: d.clone(),
            preferences: prefs.to_vec(),
        };
        let deviated = self.inst.with_agent(record)?;
        let out = self.mech.run(&deviated)?;
        out.get(me.id).cloned().ok_or(VerifyError::NotCompatible)
    }

    fn witness(&self, me: &AgentRecord<T>, a: &T, d: &T, prefs: &[ItemId], truthful: &ItemId, got: ItemId) -> Witness<T> {
        Witness::Manipulation(Manipulation {
            agent: me.id,
            reported_arrival: (*a != me.arrival).then(|| a.clone()),
            reported_departure: (*d != me.departure).then(|| d.clone()),
            reported_preferences: (prefs != me.preferences.as_slice()).then(|| prefs.to_vec()),
            truthful_item: truthful.clone(),
            improved_item: got,
        })
    }
}

/// Searches for a misreport allowed by `notion` that gets some agent an item
/// she truly prefers to her truthful one.
///
/// Agents are tried in arrival order, then arrival candidates ascending,
/// departure candidates ascending, and preference orders with the truthful
/// one first and the rest lexicographic. The first hit is the witness.
pub fn find_manipulation<T: Time>(
    mech: &Mechanism<T>,
    inst: &Instance<T>,
    notion: Notion,
    cfg: &HarnessConfig,
) -> Result<PropertyReport<T>, VerifyError> {
    let cap = if notion == Notion::Sic { cfg.sic_cap } else { cfg.single_cap };
    if inst.len() > cap {
        return match cfg.sample {
            Some(sample) => sampled_search(mech, inst, notion, sample),
            None => Err(VerifyError::TooLarge {
                n: inst.len(),
                cap,
                what: format!("{} search", notion.property().name()),
            }),
        };
    }
    let extra = mech.time_breakpoints();
    let truthful = mech.run(inst)?;
    let probe = Probe { mech, inst };
    let items: Vec<ItemId> = inst.agents().iter().map(|a| a.endowment.clone()).collect();
    let orders = permutations(&items);
    for me in inst.agents() {
        let have = truthful.get(me.id).cloned().ok_or(VerifyError::NotCompatible)?;
        if me.preferences.first() == Some(&have) {
            continue;
        }
        let mut prefs: Vec<&[ItemId]> = vec![me.preferences.as_slice()];
        prefs.extend(orders.iter().map(Vec::as_slice).filter(|p| *p != me.preferences.as_slice()));
        for a in arrival_options(inst, me, notion, &extra) {
            for d in departure_options(inst, me, &a, notion, &extra) {
                for p in &prefs {
                    if a == me.arrival && d == me.departure && *p == me.preferences.as_slice() {
                        continue;
                    }
                    let got = probe.try_report(me, &a, &d, p)?;
                    if me.prefers(&got, &have) {
                        let w = probe.witness(me, &a, &d, p, &have, got);
                        return Ok(PropertyReport::violated(notion.property(), w));
                    }
                }
            }
        }
    }
    Ok(PropertyReport::holds(notion.property()))
}

fn sampled_search<T: Time>(
    mech: &Mechanism<T>,
    inst: &Instance<T>,
    notion: Notion,
    sample: SampleConfig,
) -> Result<PropertyReport<T>, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(sample.seed);
    let extra = mech.time_breakpoints();
    let truthful = mech.run(inst)?;
    let probe = Probe { mech, inst };
    let mut report = PropertyReport::holds(notion.property());
    for _ in 0..sample.draws {
        let me = &inst.agents()[below(&mut rng, inst.len())];
        let have = truthful.get(me.id).cloned().ok_or(VerifyError::NotCompatible)?;
        let arrivals = arrival_options(inst, me, notion, &extra);
        let a = arrivals[below(&mut rng, arrivals.len())].clone();
        let departures = departure_options(inst, me, &a, notion, &extra);
        let d = departures[below(&mut rng, departures.len())].clone();
        let mut p = me.preferences.clone();
        shuffle(&mut rng, &mut p);
        let got = probe.try_report(me, &a, &d, &p)?;
        if me.prefers(&got, &have) {
            report = PropertyReport::violated(notion.property(), probe.witness(me, &a, &d, &p, &have, got));
            break;
        }
    }
    report.sampled = true;
    Ok(report)
}
