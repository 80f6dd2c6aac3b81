//! Base inflation and superimposed inflation (SI) indices.
//!
//! All times are continuous calendar times in simulation periods, measured from
//! the start of occurrence period 1. Claim sizes passed to the SI functions are
//! always uninflated.

use crate::config::SimulationConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum BaseIndex {
    /// Constant effective rate per simulation period.
    Constant { rate_per_period: f64 },
    /// Quarterly effective rates, compounded at quarter ends and exponentially
    /// interpolated within quarters. The last rate is extended indefinitely.
    Quarterly {
        rates: Vec<f64>,
        /// Cumulative log index at the end of each quarter, starting with 0 at time 0.
        log_ends: Vec<f64>,
        quarters_per_period: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InflationModel {
    base: BaseIndex,
    occurrence_enabled: bool,
    occurrence_breakpoint: u32,
    occurrence_floor_scale: f64,
    occurrence_max_reduction: f64,
    payment_enabled: bool,
    gamma_per_period: f64,
    payment_scale: f64,
}

impl InflationModel {
    pub fn from_config(config: &SimulationConfig) -> Self {
        let unit = config.time_unit_years;
        let base = match &config.base_inflation_quarterly {
            Some(rates) => {
                let mut log_ends = Vec::with_capacity(rates.len() + 1);
                log_ends.push(0.0);
                let mut acc = 0.0;
                for r in rates {
                    acc += (1.0 + r).ln();
                    log_ends.push(acc);
                }
                BaseIndex::Quarterly {
                    rates: rates.clone(),
                    log_ends,
                    quarters_per_period: 4.0 * unit,
                }
            }
            None => BaseIndex::Constant {
                rate_per_period: (1.0 + config.base_inflation_annual).powf(unit) - 1.0,
            },
        };
        let si = &config.si;
        Self {
            base,
            occurrence_enabled: si.occurrence_enabled,
            occurrence_breakpoint: si.occurrence_breakpoint,
            occurrence_floor_scale: si.occurrence_floor_scale,
            occurrence_max_reduction: si.occurrence_max_reduction,
            payment_enabled: si.payment_enabled,
            gamma_per_period: (1.0 + si.payment_gamma_annual).powf(unit) - 1.0,
            payment_scale: si.payment_scale,
        }
    }

    /// Every index identically 1: amounts stay in constant dollars.
    pub fn none() -> Self {
        Self {
            base: BaseIndex::Constant { rate_per_period: 0.0 },
            occurrence_enabled: false,
            occurrence_breakpoint: 0,
            occurrence_floor_scale: 1.0,
            occurrence_max_reduction: 0.0,
            payment_enabled: false,
            gamma_per_period: 0.0,
            payment_scale: 1.0,
        }
    }

    pub fn is_identity(&self) -> bool {
        let base_flat = match &self.base {
            BaseIndex::Constant { rate_per_period } => *rate_per_period == 0.0,
            BaseIndex::Quarterly { rates, .. } => rates.iter().all(|r| *r == 0.0),
        };
        base_flat
            && (!self.payment_enabled || self.gamma_per_period == 0.0)
            && (!self.occurrence_enabled || self.occurrence_max_reduction == 0.0)
    }

    /// Base inflation index `f(t)`, the ratio of dollar values at time `t` to time 0.
    pub fn base_index(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        Ok(self.base_index_unchecked(t))
    }

    pub(crate) fn base_index_unchecked(&self, t: f64) -> f64 {
        match &self.base {
            BaseIndex::Constant { rate_per_period } => (1.0 + rate_per_period).powf(t),
            BaseIndex::Quarterly {
                rates,
                log_ends,
                quarters_per_period,
            } => {
                let q = t * quarters_per_period;
                let whole = q.floor();
                let k = whole as usize;
                let frac = q - whole;
                let last = rates.len();
                let log_at_k = if k <= last {
                    log_ends[k]
                } else {
                    log_ends[last] + (k - last) as f64 * (1.0 + rates[last - 1]).ln()
                };
                let next_rate = rates[k.min(last - 1)];
                (log_at_k + frac * (1.0 + next_rate).ln()).exp()
            }
        }
    }

    /// Occurrence-period SI `g_O(i | s)`.
    pub fn occurrence_si(&self, period: u32, size: f64) -> f64 {
        if !self.occurrence_enabled || period <= self.occurrence_breakpoint {
            return 1.0;
        }
        1.0 - self.occurrence_max_reduction * (1.0 - size / self.occurrence_floor_scale).max(0.0)
    }

    /// Payment-period SI `g_P(t | s)`, also written `g_C`.
    pub fn payment_si(&self, t: f64, size: f64) -> f64 {
        if !self.payment_enabled {
            return 1.0;
        }
        let beta = self.gamma_per_period * (1.0 - size / self.payment_scale).max(0.0);
        (1.0 + beta).powf(t)
    }

    pub fn calendar_si(&self, t: f64, size: f64) -> f64 {
        self.payment_si(t, size)
    }

    /// Inflated value of an uninflated payment made at time `t` on a claim of
    /// occurrence period `period` and uninflated size `size`.
    pub fn inflate_payment(&self, amount: f64, t: f64, period: u32, size: f64) -> f64 {
        amount
            * self.base_index_unchecked(t)
            * self.payment_si(t, size)
            * self.occurrence_si(period, size)
    }
}
