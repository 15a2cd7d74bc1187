//! Instance families for property sweeps.

use std::str::FromStr;

use crate::generate::{generate_instance, GenConfig};
use crate::market::{AgentId, AgentRecord, Instance, ItemId};
use crate::time::Time;

/// Every way to interleave the arrivals and departures of agents `1..=n`,
/// as `(arrival, departure)` slots in `1..=2n`, indexed by agent id.
pub fn interleavings(n: usize) -> Vec<Vec<(i64, i64)>> {
    fn go(n: usize, slot: i64, windows: &mut Vec<(i64, i64)>, out: &mut Vec<Vec<(i64, i64)>>) {
        if slot > 2 * n as i64 {
            out.push(windows.clone());
            return;
        }
        for k in 0..n {
            let (a, d) = windows[k];
            if a == 0 {
                windows[k].0 = slot;
                go(n, slot + 1, windows, out);
                windows[k].0 = 0;
            } else if d == 0 {
                windows[k].1 = slot;
                go(n, slot + 1, windows, out);
                windows[k].1 = 0;
            }
        }
    }
    let mut out = Vec::new();
    go(n, 1, &mut vec![(0, 0); n], &mut out);
    out
}

fn orders(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for k in 0..rest.len() {
            let x = rest.remove(k);
            cur.push(x);
            go(rest, cur, out);
            cur.pop();
            rest.insert(k, x);
        }
    }
    go(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}

/// All `(2n)! / 2^n` interleavings times all `(n!)^n` preference profiles,
/// with integer times `1..=2n` on a market open over `[0, 2n+1]`.
pub fn exhaustive<T: Time>(n: usize) -> impl Iterator<Item = Instance<T>> {
    let items: Vec<ItemId> = (1..=n).map(|i| ItemId::new(&format!("e{i}"))).collect();
    let prefs: Vec<Vec<ItemId>> = orders(n)
        .into_iter()
        .map(|o| o.into_iter().map(|k| items[k].clone()).collect())
        .collect();
    let per_agent = prefs.len();
    let profiles = per_agent.pow(n as u32);
    interleavings(n).into_iter().flat_map(move |windows| {
        let items = items.clone();
        let prefs = prefs.clone();
        (0..profiles).map(move |mut code| {
            let agents = windows
                .iter()
                .enumerate()
                .map(|(k, &(a, d))| {
                    let choice = code % per_agent;
                    code /= per_agent;
                    AgentRecord {
                        id: AgentId(k as u32 + 1),
                        endowment: items[k].clone(),
                        arrival: T::from_int(a),
                        departure: T::from_int(d),
                        preferences: prefs[choice].clone(),
                    }
                })
                .collect();
            Instance::new(T::from_int(0), T::from_int(2 * n as i64 + 1), agents).expect("sweep instance is valid")
        })
    })
}

/// `count` dense instances with seeds `first_seed..first_seed + count`.
pub fn seeded<T: Time>(n: usize, count: usize, first_seed: u64) -> impl Iterator<Item = Instance<T>> {
    (0..count as u64).map(move |k| generate_instance(&GenConfig::dense(n, first_seed + k)))
}

/// `n=<k>` (exhaustive) or `n=<k>,count=<m>[,seed=<s>]` (seeded).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepSpec {
    Exhaustive { n: usize },
    Seeded { n: usize, count: usize, seed: u64 },
}

impl SweepSpec {
    pub fn instances<T: Time>(self) -> Box<dyn Iterator<Item = Instance<T>>> {
        match self {
            SweepSpec::Exhaustive { n } => Box::new(exhaustive(n)),
            SweepSpec::Seeded { n, count, seed } => Box::new(seeded(n, count, seed)),
        }
    }
}

/// Largest `n` accepted for an exhaustive sweep.
pub const EXHAUSTIVE_CAP: usize = 3;

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut n = None;
        let mut count = None;
        let mut seed = 0u64;
        for part in s.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value in sweep spec, got {part:?}"))?;
            let bad = |e: std::num::ParseIntError| format!("{key}: {e}");
            match key.trim() {
                "n" => n = Some(value.trim().parse::<usize>().map_err(bad)?),
                "count" => count = Some(value.trim().parse::<usize>().map_err(bad)?),
                "seed" => seed = value.trim().parse::<u64>().map_err(bad)?,
                other => return Err(format!("unknown sweep key {other:?}")),
            }
        }
        let n = n.ok_or("sweep spec needs n=<agents>")?;
        if n == 0 {
            return Err("sweep needs at least one agent".to_string());
        }
        match count {
            Some(count) => Ok(SweepSpec::Seeded { n, count, seed }),
            None if n <= EXHAUSTIVE_CAP => Ok(SweepSpec::Exhaustive { n }),
            None => Err(format!("exhaustive sweeps stop at n={EXHAUSTIVE_CAP}; add count=<m> to sample")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TimePoint;

    #[test]
    fn counts() {
        assert_eq!(interleavings(1).len(), 1);
        assert_eq!(interleavings(2).len(), 6);
        assert_eq!(interleavings(3).len(), 90);
        assert_eq!(exhaustive::<TimePoint>(2).count(), 24);
        assert_eq!(exhaustive::<TimePoint>(3).count(), 90 * 216);
    }

    #[test]
    fn specs() {
        assert_eq!("n=3".parse::<SweepSpec>().unwrap(), SweepSpec::Exhaustive { n: 3 });
        assert_eq!(
            "n=4,count=10,seed=5".parse::<SweepSpec>().unwrap(),
            SweepSpec::Seeded { n: 4, count: 10, seed: 5 }
        );
        assert!("n=4".parse::<SweepSpec>().is_err());
        assert!("m=3".parse::<SweepSpec>().is_err());
        assert_eq!(SweepSpec::Seeded { n: 4, count: 7, seed: 0 }.instances::<TimePoint>().count(), 7);
    }
}
