//! Instances, allocations and the timing vocabulary shared by every mechanism.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::time::Time;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Label of an item. Each agent brings exactly one item (her endowment).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(Arc<str>);

impl ItemId {
    pub fn new(label: &str) -> Self {
        ItemId(Arc::from(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for ItemId {
    fn from(label: &str) -> Self {
        ItemId::new(label)
    }
}

impl fmt::Debug for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for ItemId {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for ItemId {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let label = String::deserialize(de)?;
        Ok(ItemId(Arc::from(label)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarketError {
    #[error("two events share the time {time}")]
    DuplicateTime { time: String },
    #[error("agent {agent}: arrival/departure window is invalid ({detail})")]
    BadWindow { agent: AgentId, detail: String },
    #[error("agent {agent}: preference list is invalid ({detail})")]
    BadPreference { agent: AgentId, detail: String },
    #[error("agent id {agent} appears more than once")]
    DuplicateId { agent: AgentId },
    #[error("item {item} is the endowment of more than one agent")]
    DuplicateItem { item: ItemId },
    #[error("agent {agent} is assigned more than once")]
    DuplicateAssignment { agent: AgentId },
    #[error("market closes before it opens")]
    BadMarketWindow,
}

/// One participant: `(id, endowment, arrival, departure, preference)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentRecord<T> {
    pub id: AgentId,
    pub endowment: ItemId,
    pub arrival: T,
    pub departure: T,
    /// Strict order over items, best first.
    pub preferences: Vec<ItemId>,
}

impl<T: Time> AgentRecord<T> {
    pub fn new(
        id: u32,
        endowment: &str,
        arrival: T,
        departure: T,
        preferences: &[&str],
    ) -> Self {
        AgentRecord {
            id: AgentId(id),
            endowment: ItemId::new(endowment),
            arrival,
            departure,
            preferences: preferences.iter().map(|p| ItemId::new(p)).collect(),
        }
    }

    /// Position of `item` in the preference list (0 = favourite).
    pub fn rank(&self, item: &ItemId) -> Option<usize> {
        self.preferences.iter().position(|p| p == item)
    }

    /// `a ≻ b`.
    pub fn prefers(&self, a: &ItemId, b: &ItemId) -> bool {
        match (self.rank(a), self.rank(b)) {
            (Some(ra), Some(rb)) => ra < rb,
            _ => false,
        }
    }

    /// `a ⪰ b`.
    pub fn weakly_prefers(&self, a: &ItemId, b: &ItemId) -> bool {
        a == b || self.prefers(a, b)
    }

    /// Items this agent accepts in place of her endowment, best first.
    pub fn acceptable(&self) -> &[ItemId] {
        let cut = self.rank(&self.endowment).map_or(0, |r| r + 1);
        &self.preferences[..cut]
    }

    pub fn is_present_at(&self, t: &T) -> bool {
        self.arrival < *t && *t <= self.departure
    }
}

/// A validated market instance.
///
/// Invariants: all `2n` event times are pairwise distinct, every agent has
/// `open <= arrival < departure <= close`, ids and endowments are unique,
/// every preference list ranks every item exactly once, and agents are stored
/// by increasing arrival time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance<T> {
    open: T,
    close: T,
    agents: Vec<AgentRecord<T>>,
}

impl<T: Time> Instance<T> {
    pub fn new(open: T, close: T, agents: Vec<AgentRecord<T>>) -> Result<Self, MarketError> {
        validate_instance(open, close, agents)
    }

    pub fn market_open(&self) -> &T {
        &self.open
    }

    pub fn market_close(&self) -> &T {
        &self.close
    }

    /// Agents in canonical (arrival) order.
    pub fn agents(&self) -> &[AgentRecord<T>] {
        &self.agents
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn agent(&self, id: AgentId) -> Option<&AgentRecord<T>> {
        self.agents.iter().find(|a| a.id == id)
    }

    pub fn contains(&self, id: AgentId) -> bool {
        self.agents.iter().any(|a| a.id == id)
    }

    pub fn owner(&self, item: &ItemId) -> Option<AgentId> {
        self.agents.iter().find(|a| a.endowment == *item).map(|a| a.id)
    }

    pub fn agent_ids(&self) -> Vec<AgentId> {
        self.agents.iter().map(|a| a.id).collect()
    }

    pub fn items(&self) -> BTreeSet<ItemId> {
        self.agents.iter().map(|a| a.endowment.clone()).collect()
    }

    /// Number of agents with `arrival < t`; they form a prefix of `agents()`.
    fn arrived_count(&self, t: &T) -> usize {
        self.agents.partition_point(|a| a.arrival < *t)
    }

    /// `N_{<t}`: agents arriving strictly before `t`.
    pub fn agents_before(&self, t: &T) -> BTreeSet<AgentId> {
        self.agents[..self.arrived_count(t)].iter().map(|a| a.id).collect()
    }

    /// `E_{<t}`: endowments of `N_{<t}`.
    pub fn items_before(&self, t: &T) -> BTreeSet<ItemId> {
        self.agents[..self.arrived_count(t)]
            .iter()
            .map(|a| a.endowment.clone())
            .collect()
    }

    /// `I_{<t}`: the agents of `N_{<t}` with preferences restricted to their items.
    pub fn truncate(&self, t: &T) -> Instance<T> {
        let kept = self.arrived_count(t);
        if kept == self.agents.len() {
            return self.clone();
        }
        let survivors = &self.agents[..kept];
        let alive = |item: &ItemId| survivors.iter().any(|a| a.endowment == *item);
        let agents = survivors
            .iter()
            .map(|a| AgentRecord {
                id: a.id,
                endowment: a.endowment.clone(),
                arrival: a.arrival.clone(),
                departure: a.departure.clone(),
                preferences: a.preferences.iter().filter(|p| alive(p)).cloned().collect(),
            })
            .collect();
        Instance {
            open: self.open.clone(),
            close: self.close.clone(),
            agents,
        }
    }

    /// The ascending departure order (`δ`).
    pub fn departure_order(&self) -> Vec<AgentId> {
        let mut order: Vec<&AgentRecord<T>> = self.agents.iter().collect();
        order.sort_by(|a, b| a.departure.cmp(&b.departure));
        order.into_iter().map(|a| a.id).collect()
    }

    pub fn event_stream(&self) -> EventStream<T> {
        let mut events = Vec::with_capacity(2 * self.agents.len());
        for a in &self.agents {
            events.push(Event {
                time: a.arrival.clone(),
                kind: EventKind::Arrival,
                agent: a.id,
            });
            events.push(Event {
                time: a.departure.clone(),
                kind: EventKind::Departure,
                agent: a.id,
            });
        }
        events.sort_by(|a, b| a.time.cmp(&b.time));
        EventStream(events)
    }

    /// Every agent keeps her own item.
    pub fn identity_allocation(&self) -> Allocation {
        Allocation(
            self.agents
                .iter()
                .map(|a| (a.id, a.endowment.clone()))
                .collect(),
        )
    }

    /// All event times, sorted.
    pub fn event_times(&self) -> Vec<T> {
        self.event_stream().0.into_iter().map(|e| e.time).collect()
    }

    /// Copy of this instance with one agent's record replaced and re-validated.
    pub fn with_agent(&self, record: AgentRecord<T>) -> Result<Instance<T>, MarketError> {
        let agents = self
            .agents
            .iter()
            .map(|a| if a.id == record.id { record.clone() } else { a.clone() })
            .collect();
        Instance::new(self.open.clone(), self.close.clone(), agents)
    }
}

/// Checks every instance invariant and returns the agents in arrival order.
pub fn validate_instance<T: Time>(
    open: T,
    close: T,
    mut agents: Vec<AgentRecord<T>>,
) -> Result<Instance<T>, MarketError> {
    if close < open {
        return Err(MarketError::BadMarketWindow);
    }
    let mut ids = BTreeSet::new();
    let mut items = BTreeSet::new();
    for a in &agents {
        if !ids.insert(a.id) {
            return Err(MarketError::DuplicateId { agent: a.id });
        }
        if !items.insert(a.endowment.clone()) {
            return Err(MarketError::DuplicateItem {
                item: a.endowment.clone(),
            });
        }
    }
    for a in &agents {
        if a.arrival >= a.departure {
            return Err(MarketError::BadWindow {
                agent: a.id,
                detail: format!("arrival {} is not before departure {}", a.arrival, a.departure),
            });
        }
        if a.arrival < open || a.departure > close {
            return Err(MarketError::BadWindow {
                agent: a.id,
                detail: format!("[{}, {}] leaves the market window [{open}, {close}]", a.arrival, a.departure),
            });
        }
    }
    let mut times: Vec<&T> = agents
        .iter()
        .flat_map(|a| [&a.arrival, &a.departure])
        .collect();
    times.sort();
    if let Some(w) = times.windows(2).find(|w| w[0] == w[1]) {
        return Err(MarketError::DuplicateTime {
            time: w[0].to_string(),
        });
    }
    for a in &agents {
        if a.preferences.len() != items.len() {
            return Err(MarketError::BadPreference {
                agent: a.id,
                detail: format!("ranks {} items, instance has {}", a.preferences.len(), items.len()),
            });
        }
        let mut seen = BTreeSet::new();
        for p in &a.preferences {
            if !items.contains(p) {
                return Err(MarketError::BadPreference {
                    agent: a.id,
                    detail: format!("unknown item {p}"),
                });
            }
            if !seen.insert(p) {
                return Err(MarketError::BadPreference {
                    agent: a.id,
                    detail: format!("item {p} ranked twice"),
                });
            }
        }
    }
    agents.sort_by(|a, b| a.arrival.cmp(&b.arrival));
    Ok(Instance {
        open,
        close,
        agents,
    })
}

/// An injective assignment of items to agents.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Allocation(BTreeMap<AgentId, ItemId>);

// Keys are parsed by hand so that allocations also load from buffered
// content (untagged enums), where integer keys arrive as strings.
impl<'de> Deserialize<'de> for Allocation {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, ItemId>::deserialize(de)?;
        let mut alloc = Allocation::new();
        for (key, item) in raw {
            let agent = key
                .parse::<u32>()
                .map_err(|_| D::Error::custom(format!("agent id expected, got {key:?}")))?;
            alloc.assign(AgentId(agent), item).map_err(D::Error::custom)?;
        }
        Ok(alloc)
    }
}

impl Allocation {
    pub fn new() -> Self {
        Allocation(BTreeMap::new())
    }

    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self, MarketError>
    where
        I: IntoIterator<Item = (u32, &'a str)>,
    {
        let mut alloc = Allocation::new();
        for (agent, item) in pairs {
            alloc.assign(AgentId(agent), ItemId::new(item))?;
        }
        Ok(alloc)
    }

    /// Adds `agent ↦ item`, refusing to break injectivity.
    pub fn assign(&mut self, agent: AgentId, item: ItemId) -> Result<(), MarketError> {
        if self.0.contains_key(&agent) {
            return Err(MarketError::DuplicateAssignment { agent });
        }
        if self.0.values().any(|i| *i == item) {
            return Err(MarketError::DuplicateItem { item });
        }
        self.0.insert(agent, item);
        Ok(())
    }

    pub(crate) fn insert_unchecked(&mut self, agent: AgentId, item: ItemId) {
        debug_assert!(!self.0.contains_key(&agent));
        self.0.insert(agent, item);
    }

    pub fn get(&self, agent: AgentId) -> Option<&ItemId> {
        self.0.get(&agent)
    }

    pub fn iter(&self) -> impl Iterator<Item = (AgentId, &ItemId)> {
        self.0.iter().map(|(a, i)| (*a, i))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains_item(&self, item: &ItemId) -> bool {
        self.0.values().any(|i| i == item)
    }

    /// Defined exactly on the agents of `inst`.
    pub fn is_total_for<T: Time>(&self, inst: &Instance<T>) -> bool {
        self.0.len() == inst.len() && inst.agents().iter().all(|a| self.0.contains_key(&a.id))
    }
}

impl fmt::Display for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, i) in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{a}:{i}")?;
        }
        Ok(())
    }
}

/// `M(i) ∈ E_{<d_i}` for every agent of `inst`.
pub fn is_compatible<T: Time>(alloc: &Allocation, inst: &Instance<T>) -> bool {
    alloc.is_total_for(inst)
        && inst.agents().iter().all(|a| {
            let item = &alloc.0[&a.id];
            inst.agents()
                .iter()
                .any(|b| b.endowment == *item && b.arrival < a.departure)
        })
}

/// `better` Pareto-dominates `worse`: nobody is worse off and somebody is better off.
pub fn pareto_dominates<T: Time>(better: &Allocation, worse: &Allocation, inst: &Instance<T>) -> bool {
    let mut strict = false;
    for a in inst.agents() {
        let (Some(x), Some(y)) = (better.get(a.id), worse.get(a.id)) else {
            return false;
        };
        if a.prefers(y, x) {
            return false;
        }
        if a.prefers(x, y) {
            strict = true;
        }
    }
    strict
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    Arrival,
    Departure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event<T> {
    pub time: T,
    pub kind: EventKind,
    pub agent: AgentId,
}

/// All arrivals and departures in strictly increasing time order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventStream<T>(pub Vec<Event<T>>);

impl<T> EventStream<T> {
    pub fn events(&self) -> &[Event<T>] {
        &self.0
    }

    pub fn departures(&self) -> impl Iterator<Item = &Event<T>> {
        self.0.iter().filter(|e| e.kind == EventKind::Departure)
    }
}
