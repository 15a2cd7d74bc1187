//! Named regression instances.
//!
//! Event times are the integers `1..=2n` in event order, with the market open
//! on `[0, 2n+1]`. Only the order of events matters to the mechanisms, except
//! for the schedulings and thresholds defined alongside.

use crate::market::{AgentRecord, Instance};
use crate::partitions::{Interval, Scheduling};
use crate::TimePoint;

fn t(v: i64) -> TimePoint {
    TimePoint::from_integer(v)
}

fn build(close: i64, rows: &[(u32, i64, i64, &[&str])]) -> Instance<TimePoint> {
    let agents = rows
        .iter()
        .map(|&(id, a, d, prefs)| AgentRecord {
            id: crate::AgentId(id),
            endowment: crate::ItemId::new(&format!("e{id}")),
            arrival: t(a),
            departure: t(d),
            preferences: prefs.iter().map(|p| crate::ItemId::new(p)).collect(),
        })
        .collect();
    Instance::new(t(0), t(close), agents).expect("fixture is valid")
}

/// a1 < a2 < d2 < a3 < d3 < d1.
pub fn fig1() -> Instance<TimePoint> {
    build(
        7,
        &[
            (1, 1, 6, &["e2", "e1", "e3"]),
            (2, 2, 3, &["e1", "e2", "e3"]),
            (3, 4, 5, &["e2", "e3", "e1"]),
        ],
    )
}

/// a1 < a2 < a3 < d2 < a4 < d1 < d3 < d4.
pub fn fig2() -> Instance<TimePoint> {
    build(
        9,
        &[
            (1, 1, 6, &["e4", "e3", "e2", "e1"]),
            (2, 2, 4, &["e1", "e2", "e3", "e4"]),
            (3, 3, 7, &["e1", "e2", "e3", "e4"]),
            (4, 5, 8, &["e1", "e2", "e3", "e4"]),
        ],
    )
}

/// a1 < a2 < d1 < a3 < a4 < d3 < d2 < d4.
pub fn fig3() -> Instance<TimePoint> {
    build(
        9,
        &[
            (1, 1, 3, &["e2", "e1", "e3", "e4"]),
            (2, 2, 7, &["e3", "e2", "e1", "e4"]),
            (3, 4, 6, &["e2", "e3", "e4", "e1"]),
            (4, 5, 8, &["e4", "e1", "e2", "e3"]),
        ],
    )
}

/// a1 < a2 < a3 < d1 < a4 < d2 < d3 < a5 < d4 < d5.
pub fn fig5() -> Instance<TimePoint> {
    build(
        11,
        &[
            (1, 1, 4, &["e2", "e1", "e3", "e4", "e5"]),
            (2, 2, 6, &["e3", "e2", "e1", "e4", "e5"]),
            (3, 3, 7, &["e2", "e4", "e3", "e1", "e5"]),
            (4, 5, 9, &["e3", "e4", "e5", "e1", "e2"]),
            (5, 8, 10, &["e2", "e5", "e1", "e3", "e4"]),
        ],
    )
}

/// `ξ1 = [3, 13/2)` covers `[a3, d2]`, `ξ2 = [13/2, 21/2)` covers `[d3, d5]`.
pub fn fig5_scheduling() -> Scheduling<TimePoint> {
    Scheduling::new(vec![
        Interval::new(t(3), TimePoint::new(13, 2)),
        Interval::new(TimePoint::new(13, 2), TimePoint::new(21, 2)),
    ])
    .expect("disjoint")
}

/// A threshold between `a4` and `d2`.
pub fn fig5_tau_prime() -> TimePoint {
    TimePoint::new(11, 2)
}

/// Same timing as [`fig1`]; agent 1 gains by arriving between `d2` and `a3`.
pub fn ce_aic_sd() -> Instance<TimePoint> {
    build(
        7,
        &[
            (1, 1, 6, &["e3", "e1", "e2"]),
            (2, 2, 3, &["e1", "e2", "e3"]),
            (3, 4, 5, &["e1", "e3", "e2"]),
        ],
    )
}

/// a1 < a2 < a3 < d1 < d2 < d3; agent 3 gains by misreporting preferences.
pub fn ce_wic_safe() -> Instance<TimePoint> {
    build(
        7,
        &[
            (1, 1, 4, &["e3", "e2", "e1"]),
            (2, 2, 5, &["e1", "e3", "e2"]),
            (3, 3, 6, &["e1", "e2", "e3"]),
        ],
    )
}

/// a1 < a2 < a3 < d3 < d2 < a4 < a5 < d5 < d4 < d1; agent 1 gains by arriving later.
pub fn ce_aic_gamma() -> Instance<TimePoint> {
    build(
        11,
        &[
            (1, 1, 10, &["e4", "e2", "e1", "e3", "e5"]),
            (2, 2, 5, &["e1", "e2", "e3", "e4", "e5"]),
            (3, 3, 4, &["e3", "e1", "e2", "e4", "e5"]),
            (4, 6, 9, &["e1", "e4", "e2", "e3", "e5"]),
            (5, 7, 8, &["e5", "e1", "e2", "e3", "e4"]),
        ],
    )
}

/// a1 < a2 < ξ1 start < d2 < ξ1 end < d1; agent 1 gains by leaving inside `ξ1`.
pub fn ce_dic_theta() -> Instance<TimePoint> {
    build(7, &[(1, 1, 6, &["e2", "e1"]), (2, 2, 4, &["e1", "e2"])])
}

/// `ξ1 = [3, 5)`.
pub fn ce_dic_theta_scheduling() -> Scheduling<TimePoint> {
    Scheduling::new(vec![Interval::new(t(3), t(5))]).expect("single interval")
}

/// Every shipped instance with its file name.
pub fn all() -> Vec<(&'static str, Instance<TimePoint>)> {
    vec![
        ("fig1.json", fig1()),
        ("fig2.json", fig2()),
        ("fig3.json", fig3()),
        ("fig5.json", fig5()),
        ("ce_aic_sd.json", ce_aic_sd()),
        ("ce_wic_safe.json", ce_wic_safe()),
        ("ce_aic_gamma.json", ce_aic_gamma()),
        ("ce_dic_theta.json", ce_dic_theta()),
    ]
}

/// Shipped schedulings with their file names.
pub fn schedulings() -> Vec<(&'static str, Scheduling<TimePoint>)> {
    vec![
        ("fig5_scheduling.json", fig5_scheduling()),
        ("ce_dic_theta_scheduling.json", ce_dic_theta_scheduling()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid_and_in_event_order() {
        for (name, inst) in all() {
            let times = inst.event_times();
            if name == "ce_dic_theta.json" {
                // leaves room for the interval boundaries at 3 and 5
                assert_eq!(times, vec![t(1), t(2), t(4), t(6)]);
                continue;
            }
            let expected: Vec<TimePoint> = (1..=2 * inst.len() as i64).map(t).collect();
            assert_eq!(times, expected, "{name}");
        }
    }
}
