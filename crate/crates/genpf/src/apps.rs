//! Instance generators for the two flagship applications.
//!
//! Wireless power control: receivers are entities, transmitters are
//! affectors, and gains are path-loss attenuated distances. Solving the
//! generated system yields the best achievable signal-to-interference
//! threshold; the optimum activates one transmitter per receiver.
//!
//! Input-output economy: industries are entities, commodities are
//! affectors, production rates support and requirement rates repress.
//! The optimum is the best guaranteed profit margin, and the one-active-
//! supporter structure means each industry charges for a single commodity.

use serde::{Deserialize, Serialize};

use crate::numeric::{approximate_with_denominator, rat_from_f64, Rat};
use crate::system::GainSystem;
use crate::{Error, Result};

/// A transmitter location owned by one receiver.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Transmitter {
    pub position: Vec<f64>,
    /// Index of the owning receiver.
    pub receiver: usize,
}

/// Receivers, transmitters and the path-loss exponent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MisoScenario {
    pub receivers: Vec<Vec<f64>>,
    pub transmitters: Vec<Transmitter>,
    pub path_loss_exponent: f64,
}

impl MisoScenario {
    pub fn validate(&self) -> Result<()> {
        if self.receivers.is_empty() {
            return Err(Error::InvalidScenario("no receivers".into()));
        }
        if self.path_loss_exponent <= 0.0 {
            return Err(Error::InvalidScenario(
                "path-loss exponent must be positive".into(),
            ));
        }
        let dim = self.receivers[0].len();
        if dim == 0 {
            return Err(Error::InvalidScenario("zero-dimensional positions".into()));
        }
        for (i, r) in self.receivers.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::InvalidScenario(format!(
                    "receiver {i} has dimension {} instead of {dim}",
                    r.len()
                )));
            }
        }
        for (l, t) in self.transmitters.iter().enumerate() {
            if t.receiver >= self.receivers.len() {
                return Err(Error::InvalidScenario(format!(
                    "transmitter {l} owned by unknown receiver {}",
                    t.receiver
                )));
            }
            if t.position.len() != dim {
                return Err(Error::InvalidScenario(format!(
                    "transmitter {l} has dimension {} instead of {dim}",
                    t.position.len()
                )));
            }
        }
        for i in 0..self.receivers.len() {
            if !self.transmitters.iter().any(|t| t.receiver == i) {
                return Err(Error::InvalidScenario(format!(
                    "receiver {i} owns no transmitter"
                )));
            }
        }
        Ok(())
    }
}

fn distance(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Builds the power-control system: supporter gain `d(r_i, t_l)^-alpha`
/// when receiver `i` owns transmitter `l`, repressor gain otherwise.
///
/// `max_denominator`, when given, rounds each gain to the nearest rational
/// with a bounded denominator so exact-mode runs stay small.
pub fn miso_to_system(
    scenario: &MisoScenario,
    max_denominator: Option<u64>,
) -> Result<GainSystem> {
    scenario.validate()?;
    let n = scenario.receivers.len();
    let m = scenario.transmitters.len();
    if n == 1 {
        // A lone receiver has no interference; there is nothing to solve.
        return Err(Error::DegenerateScenario(
            "single receiver: every repressor set is empty".into(),
        ));
    }
    let mut sup = vec![vec![Rat::from_integer(0.into()); m]; n];
    let mut rep = vec![vec![Rat::from_integer(0.into()); m]; n];
    for (l, t) in scenario.transmitters.iter().enumerate() {
        for i in 0..n {
            let d = distance(&scenario.receivers[i], &t.position);
            if d == 0.0 {
                return Err(Error::CoincidentPositions {
                    receiver: i,
                    transmitter: l,
                });
            }
            let gain = d.powf(-scenario.path_loss_exponent);
            let mut gain = rat_from_f64(gain)?;
            if let Some(cap) = max_denominator {
                gain = approximate_with_denominator(&gain, cap);
            }
            if t.receiver == i {
                sup[i][l] = gain;
            } else {
                rep[i][l] = gain;
            }
        }
    }
    GainSystem::from_split(sup, rep)
}

/// One industry: how much of each commodity it produces and requires per
/// time unit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Industry {
    pub production_rates: Vec<serde_json::Value>,
    pub requirement_rates: Vec<serde_json::Value>,
}

/// Industries over a shared commodity space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EconomyScenario {
    pub commodities: usize,
    pub industries: Vec<Industry>,
}

/// Builds the pricing system: production rates are supporter gains,
/// requirement rates repressor gains.
pub fn economy_to_system(scenario: &EconomyScenario) -> Result<GainSystem> {
    let m = scenario.commodities;
    if scenario.industries.is_empty() {
        return Err(Error::InvalidScenario("no industries".into()));
    }
    let mut sup = Vec::with_capacity(scenario.industries.len());
    let mut rep = Vec::with_capacity(scenario.industries.len());
    let mut producer: Vec<Option<usize>> = vec![None; m];
    let mut any_requirement = false;
    for (i, industry) in scenario.industries.iter().enumerate() {
        if industry.production_rates.len() != m || industry.requirement_rates.len() != m {
            return Err(Error::InvalidScenario(format!(
                "industry {i} rate vectors must have length {m}"
            )));
        }
        let prod: Vec<Rat> = industry
            .production_rates
            .iter()
            .map(crate::json::rational_from_value)
            .collect::<Result<_>>()?;
        let req: Vec<Rat> = industry
            .requirement_rates
            .iter()
            .map(crate::json::rational_from_value)
            .collect::<Result<_>>()?;
        let mut produces_any = false;
        for j in 0..m {
            use num::traits::Signed;
            if prod[j].is_negative() || req[j].is_negative() {
                return Err(Error::InvalidScenario(format!(
                    "industry {i} has a negative rate for commodity {j}"
                )));
            }
            if prod[j].is_positive() {
                produces_any = true;
                if req[j].is_positive() {
                    return Err(Error::InvalidScenario(format!(
                        "industry {i} both produces and consumes commodity {j}"
                    )));
                }
                match producer[j] {
                    Some(prev) => {
                        return Err(Error::InvalidScenario(format!(
                            "commodity {j} is produced by industries {prev} and {i}; \
                             shared supporters make the system reducible"
                        )));
                    }
                    None => producer[j] = Some(i),
                }
            }
            if req[j].is_positive() {
                any_requirement = true;
            }
        }
        if !produces_any {
            return Err(Error::InvalidScenario(format!(
                "industry {i} produces nothing"
            )));
        }
        sup.push(prod);
        rep.push(req);
    }
    if !any_requirement {
        return Err(Error::DegenerateScenario(
            "no industry requires anything; every repressor set is empty".into(),
        ));
    }
    GainSystem::from_split(sup, rep)
}
