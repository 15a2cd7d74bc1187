//! Ordering rules over instances and checkers for their stability properties.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::market::{AgentId, Instance};
use crate::time::Time;

type OrderFn<T> = dyn Fn(&Instance<T>) -> Vec<AgentId> + Send + Sync;

/// A named function from an instance to a permutation of its agents.
///
/// Rules must only look at arrival and departure times.
#[derive(Clone)]
pub struct OrderingRule<T> {
    name: String,
    eval: Arc<OrderFn<T>>,
}

impl<T> fmt::Debug for OrderingRule<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrderingRule({})", self.name)
    }
}

impl<T: Time> OrderingRule<T> {
    pub fn new<F>(name: &str, eval: F) -> Self
    where
        F: Fn(&Instance<T>) -> Vec<AgentId> + Send + Sync + 'static,
    {
        OrderingRule {
            name: name.to_string(),
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn evaluate(&self, inst: &Instance<T>) -> Vec<AgentId> {
        (self.eval)(inst)
    }

    /// `δ`: increasing departure time.
    pub fn delta() -> Self {
        Self::new("delta", ascending_departure)
    }

    /// `α`: increasing arrival time.
    pub fn alpha() -> Self {
        Self::new("alpha", ascending_arrival)
    }

    /// Decreasing arrival time. Not prefix-stable; kept as a negative control.
    pub fn desc_arrival() -> Self {
        Self::new("desc-arrival", descending_arrival)
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "delta" => Some(Self::delta()),
            "alpha" => Some(Self::alpha()),
            "desc-arrival" => Some(Self::desc_arrival()),
            _ => None,
        }
    }
}

pub fn ascending_departure<T: Time>(inst: &Instance<T>) -> Vec<AgentId> {
    inst.departure_order()
}

pub fn ascending_arrival<T: Time>(inst: &Instance<T>) -> Vec<AgentId> {
    inst.agent_ids()
}

pub fn descending_arrival<T: Time>(inst: &Instance<T>) -> Vec<AgentId> {
    let mut ids = inst.agent_ids();
    ids.reverse();
    ids
}

/// Outcome of [`check_prefix_stable`]. Positions are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrefixCheck {
    Pass,
    Violation { agent: AgentId, position: usize },
}

impl PrefixCheck {
    pub fn is_pass(&self) -> bool {
        matches!(self, PrefixCheck::Pass)
    }
}

/// Outcome of [`check_pfe`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PfeCheck {
    Pass,
    Violation { i: AgentId, j: AgentId, k: AgentId },
}

impl PfeCheck {
    pub fn is_pass(&self) -> bool {
        matches!(self, PfeCheck::Pass)
    }
}

/// For every agent `i` at position `p` of `Π(I)`, the first `p` entries of
/// `Π(I)` and `Π(I_{<d_i})` must agree.
pub fn check_prefix_stable<T: Time>(rule: &OrderingRule<T>, inst: &Instance<T>) -> PrefixCheck {
    let full = rule.evaluate(inst);
    for agent in inst.agents() {
        let Some(pos) = full.iter().position(|&a| a == agent.id) else {
            return PrefixCheck::Violation {
                agent: agent.id,
                position: 0,
            };
        };
        let cut = rule.evaluate(&inst.truncate(&agent.departure));
        for (p, want) in full.iter().enumerate().take(pos + 1) {
            if cut.get(p) != Some(want) {
                return PrefixCheck::Violation {
                    agent: agent.id,
                    position: p + 1,
                };
            }
        }
    }
    PrefixCheck::Pass
}

/// Relative order of two agents in a permutation; `None` if either is absent.
fn behind(order: &[AgentId], later: AgentId, earlier: AgentId) -> Option<bool> {
    let pl = order.iter().position(|&a| a == later)?;
    let pe = order.iter().position(|&a| a == earlier)?;
    Some(pl > pe)
}

/// Checks the extended prefix condition over all triples `(i, j, k)`:
/// whenever `a_i < d_k < d_i`, `d_k < d_j`, `a_j < d_i`, `k` is behind `i` in
/// `Π(I_{<d_k})`, and `j` either arrives after `d_k` or is also behind `i`
/// there, then `j` must still be behind `i` in `Π(I_{<min(d_i, d_j)})`.
pub fn check_pfe<T: Time>(rule: &OrderingRule<T>, inst: &Instance<T>) -> PfeCheck {
    let at_departure: BTreeMap<AgentId, Vec<AgentId>> = inst
        .agents()
        .iter()
        .map(|a| (a.id, rule.evaluate(&inst.truncate(&a.departure))))
        .collect();
    let agents = inst.agents();
    for i in agents {
        for j in agents {
            if j.id == i.id || j.arrival >= i.departure {
                continue;
            }
            for k in agents {
                if k.id == i.id || k.id == j.id {
                    continue;
                }
                if !(i.arrival < k.departure && k.departure < i.departure && k.departure < j.departure) {
                    continue;
                }
                let pk = &at_departure[&k.id];
                if behind(pk, k.id, i.id) != Some(true) {
                    continue;
                }
                let j_late = j.arrival > k.departure;
                if !j_late && behind(pk, j.id, i.id) != Some(true) {
                    continue;
                }
                let first_out = if i.departure < j.departure { i.id } else { j.id };
                if behind(&at_departure[&first_out], j.id, i.id) != Some(true) {
                    return PfeCheck::Violation {
                        i: i.id,
                        j: j.id,
                        k: k.id,
                    };
                }
            }
        }
    }
    PfeCheck::Pass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::TimePoint;
    use proptest::prelude::*;

    fn ids(v: &[u32]) -> Vec<AgentId> {
        v.iter().map(|&i| AgentId(i)).collect()
    }

    fn single() -> Instance<TimePoint> {
        crate::generate::generate_instance(&crate::generate::GenConfig::dense(1, 3))
    }

    /// Agents who arrived after the first departure go first.
    fn late_arrivers_first() -> OrderingRule<TimePoint> {
        OrderingRule::new("late-first", |inst: &Instance<TimePoint>| {
            let first_departure = inst.agents().iter().map(|a| a.departure).min();
            let (late, early): (Vec<_>, Vec<_>) = inst
                .agents()
                .iter()
                .partition(|a| first_departure.is_some_and(|d| a.arrival > d));
            late.iter().chain(early.iter()).map(|a| a.id).collect()
        })
    }

    #[test]
    fn concrete_orders() {
        let fig1 = fixtures::fig1();
        assert_eq!(ascending_departure(&fig1), ids(&[2, 3, 1]));
        assert_eq!(ascending_arrival(&fig1), ids(&[1, 2, 3]));
        assert_eq!(descending_arrival(&fig1), ids(&[3, 2, 1]));
        let fig5 = fixtures::fig5();
        assert_eq!(ascending_departure(&fig5), ids(&[1, 2, 3, 4, 5]));
        assert_eq!(descending_arrival(&fig5), ids(&[5, 4, 3, 2, 1]));
        assert_eq!(ascending_arrival(&fixtures::fig2()), ids(&[1, 2, 3, 4]));
        for f in [ascending_departure, ascending_arrival, descending_arrival] {
            assert_eq!(f(&single()), ids(&[1]));
        }
    }

    #[test]
    fn prefix_stability() {
        assert!(check_prefix_stable(&OrderingRule::delta(), &fixtures::fig1()).is_pass());
        assert!(check_prefix_stable(&OrderingRule::alpha(), &fixtures::fig5()).is_pass());
        let verdict = check_prefix_stable(&OrderingRule::desc_arrival(), &fixtures::fig1());
        assert_eq!(
            verdict,
            PrefixCheck::Violation {
                agent: AgentId(2),
                position: 1
            }
        );
    }

    #[test]
    fn pfe_negative_control() {
        let rule = late_arrivers_first();
        let fig1 = fixtures::fig1();
        assert!(!check_prefix_stable(&rule, &fig1).is_pass());
        assert_eq!(
            check_pfe(&rule, &fig1),
            PfeCheck::Violation {
                i: AgentId(1),
                j: AgentId(3),
                k: AgentId(2)
            }
        );
        assert!(check_pfe(&OrderingRule::delta(), &fig1).is_pass());
        assert!(check_pfe(&OrderingRule::alpha(), &fig1).is_pass());
    }

    #[test]
    fn names_round_trip() {
        for name in ["delta", "alpha", "desc-arrival"] {
            assert_eq!(OrderingRule::<TimePoint>::by_name(name).unwrap().name(), name);
        }
        assert!(OrderingRule::<TimePoint>::by_name("beta").is_none());
    }

    proptest! {
        #[test]
        fn rules_ignore_preferences(n in 1usize..=6, seed in any::<u64>(), shift in 1usize..6) {
            let inst = crate::generate::generate_instance::<TimePoint>(&crate::generate::GenConfig::dense(n, seed));
            let rotated: Vec<_> = inst
                .agents()
                .iter()
                .map(|a| {
                    let mut r = a.clone();
                    let len = r.preferences.len();
                    r.preferences.rotate_left(shift % len);
                    r
                })
                .collect();
            let other = Instance::new(*inst.market_open(), *inst.market_close(), rotated).unwrap();
            for rule in [OrderingRule::delta(), OrderingRule::alpha(), OrderingRule::desc_arrival()] {
                prop_assert_eq!(rule.evaluate(&inst), rule.evaluate(&other));
            }
        }

        #[test]
        fn prefix_stable_implies_pfe(n in 1usize..=6, seed in any::<u64>()) {
            let inst = crate::generate::generate_instance::<TimePoint>(&crate::generate::GenConfig::dense(n, seed));
            for rule in [OrderingRule::delta(), OrderingRule::alpha(), OrderingRule::desc_arrival(), late_arrivers_first()] {
                if check_prefix_stable(&rule, &inst).is_pass() {
                    prop_assert!(check_pfe(&rule, &inst).is_pass());
                }
            }
        }
    }
}
