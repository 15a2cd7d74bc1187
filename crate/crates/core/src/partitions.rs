//! Partition rules for online trading cycles and the progress check.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market::{AgentId, Instance};
use crate::time::{self, Time};

/// Disjoint blocks of agents.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Partition(BTreeSet<BTreeSet<AgentId>>);

impl Partition {
    pub fn from_blocks<I, B>(blocks: I) -> Self
    where
        I: IntoIterator<Item = B>,
        B: IntoIterator<Item = u32>,
    {
        Partition(
            blocks
                .into_iter()
                .map(|b| b.into_iter().map(AgentId).collect())
                .collect(),
        )
    }

    fn push(&mut self, block: BTreeSet<AgentId>) {
        if !block.is_empty() {
            self.0.insert(block);
        }
    }

    pub fn blocks(&self) -> impl Iterator<Item = &BTreeSet<AgentId>> {
        self.0.iter()
    }

    pub fn block_of(&self, agent: AgentId) -> Option<&BTreeSet<AgentId>> {
        self.0.iter().find(|b| b.contains(&agent))
    }

    /// Blocks are nonempty, pairwise disjoint and cover exactly `inst`'s agents.
    pub fn is_partition_of<T: Time>(&self, inst: &Instance<T>) -> bool {
        let mut seen = BTreeSet::new();
        for b in &self.0 {
            if b.is_empty() {
                return false;
            }
            for a in b {
                if !seen.insert(*a) {
                    return false;
                }
            }
        }
        seen == inst.agent_ids().into_iter().collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .0
            .iter()
            .map(|b| {
                let ids: Vec<String> = b.iter().map(|a| a.to_string()).collect();
                format!("{{{}}}", ids.join(","))
            })
            .collect();
        write!(f, "{{{}}}", blocks.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("bad scheduling: {0}")]
    BadScheduling(String),
}

/// Half-open interval `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Time")]
pub struct Interval<T> {
    #[serde(with = "time::as_string")]
    pub start: T,
    #[serde(with = "time::as_string")]
    pub end: T,
}

impl<T: Time> Interval<T> {
    pub fn new(start: T, end: T) -> Self {
        Interval { start, end }
    }

    pub fn contains(&self, t: &T) -> bool {
        self.start <= *t && *t < self.end
    }
}

/// Disjoint intervals `ξ1 … ξk`; everything else is `ξ0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scheduling<T> {
    intervals: Vec<Interval<T>>,
}

impl<T: Time> Scheduling<T> {
    pub fn new(intervals: Vec<Interval<T>>) -> Result<Self, PartitionError> {
        for (n, iv) in intervals.iter().enumerate() {
            if iv.start >= iv.end {
                return Err(PartitionError::BadScheduling(format!(
                    "interval {} is empty: [{}, {})",
                    n + 1,
                    iv.start,
                    iv.end
                )));
            }
        }
        let mut sorted: Vec<&Interval<T>> = intervals.iter().collect();
        sorted.sort_by(|a, b| a.start.cmp(&b.start));
        for w in sorted.windows(2) {
            if w[1].start < w[0].end {
                return Err(PartitionError::BadScheduling(format!(
                    "[{}, {}) overlaps [{}, {})",
                    w[0].start, w[0].end, w[1].start, w[1].end
                )));
            }
        }
        Ok(Scheduling { intervals })
    }

    pub fn intervals(&self) -> &[Interval<T>] {
        &self.intervals
    }

    /// Index of the interval holding `t`: `1..=k`, or `0` for the remainder.
    pub fn index_of(&self, t: &T) -> usize {
        self.intervals
            .iter()
            .position(|iv| iv.contains(t))
            .map_or(0, |p| p + 1)
    }

    pub fn endpoints(&self) -> Vec<T> {
        self.intervals
            .iter()
            .flat_map(|iv| [iv.start.clone(), iv.end.clone()])
            .collect()
    }
}

/// Trigger time `τ` for [`zeta`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Threshold<T> {
    pub tau: T,
}

impl<T: Time> Threshold<T> {
    pub fn new(tau: T) -> Self {
        Threshold { tau }
    }
}

/// Each unpartitioned departing agent becomes a singleton; the other
/// arrived and unpartitioned agents form one block with her.
pub fn gamma<T: Time>(inst: &Instance<T>) -> Partition {
    let mut part = Partition::default();
    let mut placed: BTreeSet<AgentId> = BTreeSet::new();
    for k in inst.departure_order() {
        if placed.contains(&k) {
            continue;
        }
        let d = &inst.agent(k).expect("listed agent").departure;
        let present = inst.agents_before(d);
        part.push([k].into());
        part.push(present.iter().copied().filter(|a| *a != k && !placed.contains(a)).collect());
        placed = present;
    }
    part
}

/// The first departure inside an unused interval groups every arrived agent
/// departing in that interval; other departures are singletons.
pub fn theta<T: Time>(inst: &Instance<T>, xi: &Scheduling<T>) -> Partition {
    let mut part = Partition::default();
    let mut used: BTreeSet<usize> = [0].into();
    let mut placed: BTreeSet<AgentId> = BTreeSet::new();
    for k in inst.departure_order() {
        let d = &inst.agent(k).expect("listed agent").departure;
        let j = xi.index_of(d);
        if !used.contains(&j) {
            let block: BTreeSet<AgentId> = inst
                .agents()
                .iter()
                .filter(|a| a.arrival < *d && xi.index_of(&a.departure) == j)
                .map(|a| a.id)
                .collect();
            used.insert(j);
            placed.extend(block.iter().copied());
            part.push(block);
        } else if !placed.contains(&k) {
            part.push([k].into());
            placed.insert(k);
        }
    }
    part
}

/// At the first departure `d >= τ`, the departing agent is a singleton and
/// the other arrived, unpartitioned agents form one block. Everyone else
/// is a singleton.
pub fn zeta<T: Time>(inst: &Instance<T>, threshold: &Threshold<T>) -> Partition {
    let mut part = Partition::default();
    let mut passed = false;
    let mut placed: BTreeSet<AgentId> = BTreeSet::new();
    for k in inst.departure_order() {
        let d = &inst.agent(k).expect("listed agent").departure;
        if !passed && *d >= threshold.tau {
            passed = true;
            let present = inst.agents_before(d);
            part.push([k].into());
            part.push(present.iter().copied().filter(|a| *a != k && !placed.contains(a)).collect());
            placed = present;
        } else if !placed.contains(&k) {
            part.push([k].into());
            placed.insert(k);
        }
    }
    part
}

type PartitionFn<T> = dyn Fn(&Instance<T>) -> Partition + Send + Sync;

/// A named function from an instance to a partition of its agents.
#[derive(Clone)]
pub struct PartitionRule<T> {
    name: String,
    eval: Arc<PartitionFn<T>>,
    breakpoints: Vec<T>,
}

impl<T> fmt::Debug for PartitionRule<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartitionRule({})", self.name)
    }
}

impl<T: Time> PartitionRule<T> {
    /// `breakpoints` lists absolute times the rule compares departures against.
    pub fn new<F>(name: &str, breakpoints: Vec<T>, eval: F) -> Self
    where
        F: Fn(&Instance<T>) -> Partition + Send + Sync + 'static,
    {
        PartitionRule {
            name: name.to_string(),
            eval: Arc::new(eval),
            breakpoints,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn evaluate(&self, inst: &Instance<T>) -> Partition {
        (self.eval)(inst)
    }

    pub fn gamma() -> Self {
        Self::new("gamma", Vec::new(), gamma)
    }

    pub fn theta(xi: Scheduling<T>) -> Self {
        let points = xi.endpoints();
        Self::new("theta", points, move |inst| theta(inst, &xi))
    }

    pub fn zeta(threshold: Threshold<T>) -> Self {
        let points = vec![threshold.tau.clone()];
        Self::new("zeta", points, move |inst| zeta(inst, &threshold))
    }

    /// One block with every agent. Not progress-preserving; a negative control.
    pub fn grand_coalition() -> Self {
        Self::new("grand", Vec::new(), |inst: &Instance<T>| {
            let mut part = Partition::default();
            part.push(inst.agent_ids().into_iter().collect());
            part
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PpCheck {
    Pass,
    Violation { agent: AgentId },
}

impl PpCheck {
    pub fn is_pass(&self) -> bool {
        matches!(self, PpCheck::Pass)
    }
}

/// Every agent's block must be the same on `I` and on `I_{<d_i}`.
pub fn check_pp<T: Time>(rule: &PartitionRule<T>, inst: &Instance<T>) -> PpCheck {
    let full = rule.evaluate(inst);
    for a in inst.agents() {
        let cut = rule.evaluate(&inst.truncate(&a.departure));
        if full.block_of(a.id) != cut.block_of(a.id) {
            return PpCheck::Violation { agent: a.id };
        }
    }
    PpCheck::Pass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::market::AgentRecord;
    use crate::TimePoint;
    use proptest::prelude::*;

    fn t(p: i64, q: i64) -> TimePoint {
        TimePoint::new(p, q)
    }

    fn random(n: usize, seed: u64) -> Instance<TimePoint> {
        crate::generate::generate_instance(&crate::generate::GenConfig::dense(n, seed))
    }

    fn two_apart() -> Instance<TimePoint> {
        Instance::new(
            t(0, 1),
            t(5, 1),
            vec![
                AgentRecord::new(1, "e1", t(1, 1), t(2, 1), &["e2", "e1"]),
                AgentRecord::new(2, "e2", t(3, 1), t(4, 1), &["e1", "e2"]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma(&fixtures::fig5()), Partition::from_blocks([vec![1], vec![2, 3], vec![4], vec![5]]));
        let one = random(1, 1);
        assert_eq!(gamma(&one), Partition::from_blocks([vec![1]]));
        assert_eq!(gamma(&two_apart()), Partition::from_blocks([vec![1], vec![2]]));
    }

    #[test]
    fn theta_examples() {
        let fig5 = fixtures::fig5();
        assert_eq!(
            theta(&fig5, &fixtures::fig5_scheduling()),
            Partition::from_blocks([vec![1, 2], vec![3, 4], vec![5]])
        );
        let none = Scheduling::new(vec![]).unwrap();
        assert_eq!(
            theta(&fig5, &none),
            Partition::from_blocks([vec![1], vec![2], vec![3], vec![4], vec![5]])
        );
        assert_eq!(
            theta(&fixtures::ce_dic_theta(), &fixtures::ce_dic_theta_scheduling()),
            Partition::from_blocks([vec![1], vec![2]])
        );
    }

    #[test]
    fn zeta_examples() {
        let fig5 = fixtures::fig5();
        assert_eq!(zeta(&fig5, &Threshold::new(*fig5.market_open())), gamma(&fig5));
        assert_eq!(
            zeta(&fig5, &Threshold::new(fixtures::fig5_tau_prime())),
            Partition::from_blocks([vec![1], vec![2], vec![3, 4], vec![5]])
        );
        let late = Threshold::new(*fig5.market_close() + t(1, 1));
        assert_eq!(
            zeta(&fig5, &late),
            Partition::from_blocks([vec![1], vec![2], vec![3], vec![4], vec![5]])
        );
    }

    #[test]
    fn scheduling_validation() {
        let iv = |a, b| Interval::new(t(a, 1), t(b, 1));
        assert!(Scheduling::new(vec![iv(1, 3), iv(3, 5)]).is_ok());
        assert!(Scheduling::new(vec![iv(1, 4), iv(3, 5)]).is_err());
        assert!(Scheduling::new(vec![iv(3, 5), iv(1, 4)]).is_err());
        assert!(Scheduling::new(vec![iv(3, 3)]).is_err());
        let xi = Scheduling::new(vec![iv(1, 3), iv(3, 5)]).unwrap();
        assert_eq!(xi.index_of(&t(3, 1)), 2);
        assert_eq!(xi.index_of(&t(5, 1)), 0);
        assert_eq!(xi.index_of(&t(1, 1)), 1);
    }

    #[test]
    fn progress_preservation() {
        let fig5 = fixtures::fig5();
        assert!(check_pp(&PartitionRule::gamma(), &fig5).is_pass());
        assert!(check_pp(&PartitionRule::theta(fixtures::fig5_scheduling()), &fig5).is_pass());
        assert_eq!(
            check_pp(&PartitionRule::grand_coalition(), &fig5),
            PpCheck::Violation { agent: AgentId(1) }
        );
    }

    #[test]
    fn display() {
        assert_eq!(gamma(&fixtures::fig5()).to_string(), "{{1},{2,3},{4},{5}}");
    }

    proptest! {
        #[test]
        fn rules_partition_and_preserve_progress(n in 1usize..=6, seed in any::<u64>(), a in 0i64..14, b in 0i64..14, tau in 0i64..14) {
            let inst = random(n, seed);
            let (lo, hi) = (a.min(b), a.max(b) + 1);
            let xi = Scheduling::new(vec![Interval::new(t(2 * lo + 1, 2), t(2 * hi + 1, 2))]).unwrap();
            let rules = [
                PartitionRule::gamma(),
                PartitionRule::theta(xi),
                PartitionRule::zeta(Threshold::new(t(tau, 1))),
            ];
            for rule in &rules {
                prop_assert!(rule.evaluate(&inst).is_partition_of(&inst));
                prop_assert!(check_pp(rule, &inst).is_pass());
            }
            let z = rules[2].evaluate(&inst);
            prop_assert!(z.blocks().filter(|b| b.len() > 1).count() <= 1);
        }
    }
}
