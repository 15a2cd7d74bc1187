//! Brute-force oracles and the misreport search.

mod harness;
mod oracles;
pub mod sweep;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market::{AgentId, Allocation, Instance, ItemId, MarketError};
use crate::mechanism::{Mechanism, MechanismError};
use crate::time::{self, Time};

pub use harness::{candidate_times, find_manipulation, replay, HarnessConfig, Notion, SampleConfig};
pub use oracles::{
    check_online, enumerate_compatible, is_ir, is_mpo, is_safe_allocation, is_spo, ENUMERATION_CAP,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("{n} agents exceed the cap of {cap} for {what}")]
    TooLarge { n: usize, cap: usize, what: String },
    #[error("allocation is not compatible with the instance")]
    NotCompatible,
    #[error("allocation is not safe")]
    NotSafe,
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
    #[error(transparent)]
    Market(#[from] MarketError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    TooLarge,
}

/// A profitable deviation. Absent fields were reported truthfully.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Time")]
pub struct Manipulation<T> {
    pub agent: AgentId,
    #[serde(default, with = "time::opt_as_string", skip_serializing_if = "Option::is_none")]
    pub reported_arrival: Option<T>,
    #[serde(default, with = "time::opt_as_string", skip_serializing_if = "Option::is_none")]
    pub reported_departure: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reported_preferences: Option<Vec<ItemId>>,
    pub truthful_item: ItemId,
    pub improved_item: ItemId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shortfall {
    pub agent: AgentId,
    pub item: ItemId,
    pub endowment: ItemId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, bound = "T: Time")]
pub enum Witness<T> {
    Manipulation(Manipulation<T>),
    /// The agent's item changes when the instance is cut at her departure.
    Online {
        agent: AgentId,
        full_item: ItemId,
        truncated_item: ItemId,
    },
    /// Every agent left worse off than with her endowment, by arrival.
    Individual { violations: Vec<Shortfall> },
    /// No acceptable completion exists at this agent's departure.
    Unsafe {
        agent: AgentId,
        #[serde(with = "time::as_string")]
        no_completion_at: T,
    },
    Dominated {
        dominating: Allocation,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Time")]
pub struct PropertyReport<T> {
    pub property: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness<T>>,
    /// Set when the verdict comes from random sampling rather than exhaustive search.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub sampled: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl<T: Time> PropertyReport<T> {
    pub fn holds(property: Property) -> Self {
        PropertyReport {
            property: property.name().to_string(),
            verdict: Verdict::Holds,
            witness: None,
            sampled: false,
            detail: None,
        }
    }

    pub fn violated(property: Property, witness: Witness<T>) -> Self {
        PropertyReport {
            verdict: Verdict::Violated,
            witness: Some(witness),
            ..Self::holds(property)
        }
    }

    pub fn too_large(property: Property, detail: String) -> Self {
        PropertyReport {
            verdict: Verdict::TooLarge,
            detail: Some(detail),
            ..Self::holds(property)
        }
    }

    pub fn is_holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

impl<T: Time> fmt::Display for PropertyReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match self.verdict {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::TooLarge => "too-large",
        };
        write!(f, "{}: {verdict}", self.property)?;
        if self.sampled {
            write!(f, " (sampled)")?;
        }
        if let Some(w) = &self.witness {
            write!(f, " witness={}", serde_json::to_string(w).expect("witness serializes"))?;
        }
        if let Some(d) = &self.detail {
            write!(f, " ({d})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    Mpo,
    Spo,
    Ir,
    Online,
    Safe,
    Wic,
    Aic,
    Dic,
    Sic,
}

impl Property {
    pub const ALL: [Property; 9] = [
        Property::Mpo,
        Property::Spo,
        Property::Ir,
        Property::Online,
        Property::Safe,
        Property::Wic,
        Property::Aic,
        Property::Dic,
        Property::Sic,
    ];

    /// Name used in reports.
    pub fn name(self) -> &'static str {
        match self {
            Property::Mpo => "m-PO",
            Property::Spo => "s-PO",
            Property::Ir => "IR",
            Property::Online => "online",
            Property::Safe => "safe",
            Property::Wic => "WIC",
            Property::Aic => "a-IC",
            Property::Dic => "d-IC",
            Property::Sic => "SIC",
        }
    }

    /// Name used on the command line.
    pub fn flag(self) -> &'static str {
        match self {
            Property::Mpo => "mpo",
            Property::Spo => "spo",
            Property::Ir => "ir",
            Property::Online => "online",
            Property::Safe => "safe",
            Property::Wic => "wic",
            Property::Aic => "a-ic",
            Property::Dic => "d-ic",
            Property::Sic => "sic",
        }
    }

    pub fn notion(self) -> Option<Notion> {
        match self {
            Property::Wic => Some(Notion::Wic),
            Property::Aic => Some(Notion::Aic),
            Property::Dic => Some(Notion::Dic),
            Property::Sic => Some(Notion::Sic),
            _ => None,
        }
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .into_iter()
            .find(|p| p.flag() == s || p.name() == s)
            .ok_or_else(|| format!("unknown property {s:?}"))
    }
}

/// Runs `mech` on `inst` where needed and checks one property.
///
/// For s-PO, an allocation outside the safe set is reported as a violation
/// carrying the safeness witness.
pub fn check_property<T: Time>(
    mech: &Mechanism<T>,
    inst: &Instance<T>,
    property: Property,
    cfg: &HarnessConfig,
) -> Result<PropertyReport<T>, VerifyError> {
    if let Some(notion) = property.notion() {
        return find_manipulation(mech, inst, notion, cfg);
    }
    if property == Property::Online {
        return check_online(mech, inst);
    }
    let alloc = mech.run(inst)?;
    match property {
        Property::Mpo => is_mpo(&alloc, inst),
        Property::Ir => Ok(is_ir(&alloc, inst)),
        Property::Safe => is_safe_allocation(&alloc, inst),
        Property::Spo => {
            let safe = is_safe_allocation(&alloc, inst)?;
            match safe.witness {
                Some(w) => Ok(PropertyReport::violated(Property::Spo, w)),
                None => is_spo(&alloc, inst),
            }
        }
        _ => unreachable!("handled above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TimePoint;

    #[test]
    fn report_json_shape() {
        let report: PropertyReport<TimePoint> = PropertyReport::violated(
            Property::Aic,
            Witness::Manipulation(Manipulation {
                agent: AgentId(1),
                reported_arrival: Some(TimePoint::new(7, 2)),
                reported_departure: None,
                reported_preferences: None,
                truthful_item: ItemId::new("e2"),
                improved_item: ItemId::new("e3"),
            }),
        );
        let json = report.to_json();
        assert_eq!(
            json,
            r#"{"property":"a-IC","verdict":"violated","witness":{"agent":1,"reported_arrival":"7/2","truthful_item":"e2","improved_item":"e3"}}"#
        );
        let back: PropertyReport<TimePoint> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn witness_variants_round_trip() {
        let witnesses: Vec<Witness<TimePoint>> = vec![
            Witness::Online {
                agent: AgentId(2),
                full_item: ItemId::new("e1"),
                truncated_item: ItemId::new("e2"),
            },
            Witness::Individual {
                violations: vec![Shortfall {
                    agent: AgentId(5),
                    item: ItemId::new("e1"),
                    endowment: ItemId::new("e5"),
                }],
            },
            Witness::Unsafe {
                agent: AgentId(1),
                no_completion_at: TimePoint::new(9, 4),
            },
            Witness::Dominated {
                dominating: Allocation::from_pairs([(1, "e2"), (2, "e1")]).unwrap(),
            },
        ];
        for w in witnesses {
            let report = PropertyReport::violated(Property::Ir, w);
            let back: PropertyReport<TimePoint> = serde_json::from_str(&report.to_json()).unwrap();
            assert_eq!(back, report);
        }
        let sampled = PropertyReport::<TimePoint> {
            sampled: true,
            ..PropertyReport::holds(Property::Sic)
        };
        assert_eq!(sampled.to_json(), r#"{"property":"SIC","verdict":"holds","sampled":true}"#);
    }

    #[test]
    fn property_names() {
        for p in Property::ALL {
            assert_eq!(p.flag().parse::<Property>().unwrap(), p);
            assert_eq!(p.name().parse::<Property>().unwrap(), p);
        }
        assert!("po".parse::<Property>().is_err());
    }
}
