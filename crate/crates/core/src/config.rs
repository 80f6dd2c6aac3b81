//! Simulation configuration.
//!
//! The configuration is a TOML document. Every field is optional; anything left
//! out falls back to the reference parameterization (quarterly time unit,
//! 40 occurrence periods, reference claim size 200,000, and so on).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Either one value for every occurrence period or an explicit per-period vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerPeriod {
    Constant(f64),
    Vector(Vec<f64>),
}

impl PerPeriod {
    /// Value for the 1-based occurrence period `i`.
    pub fn at(&self, i: u32) -> f64 {
        match self {
            PerPeriod::Constant(v) => *v,
            PerPeriod::Vector(vs) => vs[(i as usize - 1).min(vs.len() - 1)],
        }
    }

    fn first(&self) -> f64 {
        self.at(1)
    }

    fn validate(&self, field: &str, periods: u32) -> Result<()> {
        let values: &[f64] = match self {
            PerPeriod::Constant(v) => std::slice::from_ref(v),
            PerPeriod::Vector(vs) => {
                if vs.len() < periods as usize {
                    return Err(Error::invalid(
                        field,
                        format!("expected {periods} per-period values, got {}", vs.len()),
                    ));
                }
                vs
            }
        };
        match values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            Some(v) => Err(Error::invalid(field, format!("must be > 0, got {v}"))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Reference parameterization, including size-dependent superimposed inflation.
    #[default]
    DefaultHeterogeneous,
    /// Every component independent of occurrence period and inflation at a
    /// constant rate, so that the chain ladder's assumptions hold.
    Homogeneous,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default_heterogeneous" | "default" => Ok(Preset::DefaultHeterogeneous),
            "homogeneous" => Ok(Preset::Homogeneous),
            other => Err(Error::invalid("preset", format!("unknown preset `{other}`"))),
        }
    }
}

/// Superimposed inflation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuperimposedInflationParams {
    pub occurrence_enabled: bool,
    /// Occurrence periods up to and including this one carry no occurrence SI.
    pub occurrence_breakpoint: u32,
    pub occurrence_floor_scale: f64,
    pub occurrence_max_reduction: f64,
    pub payment_enabled: bool,
    /// Annual rate of payment-period SI for a claim of negligible size.
    pub payment_gamma_annual: f64,
    pub payment_scale: f64,
}

impl Default for SuperimposedInflationParams {
    fn default() -> Self {
        Self {
            occurrence_enabled: true,
            occurrence_breakpoint: 20,
            occurrence_floor_scale: 50_000.0,
            occurrence_max_reduction: 0.4,
            payment_enabled: true,
            payment_gamma_annual: 0.30,
            payment_scale: 200_000.0,
        }
    }
}

/// Parameters of the default paid-loss hooks (claim size, delays, payment pattern).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PaymentParams {
    pub size_log_mean: f64,
    pub size_log_sd: f64,
    /// Mean notification delay in periods.
    pub notification_mean: f64,
    pub settlement_log_intercept: f64,
    pub settlement_log_slope: f64,
    pub settlement_log_sd: f64,
    /// Change in settlement log-mean per occurrence period after the first.
    pub settlement_period_log_slope: f64,
    /// Upper limit of the settlement log-mean.
    pub settlement_log_mean_cap: f64,
    pub count_scale: f64,
    pub count_size_unit: f64,
    pub count_noise_sd: f64,
    pub weight_low: f64,
    pub weight_high: f64,
    /// Claims with at least this many payments pay most of their cost in the
    /// last two payments.
    pub tail_min_payments: usize,
    pub tail_share_low: f64,
    pub tail_share_high: f64,
    /// Part of the last-two share paid by the final payment.
    pub final_fraction_low: f64,
    pub final_fraction_high: f64,
    /// Range of the penultimate payment epoch as a fraction of the settlement
    /// delay, for claims with at least `tail_min_payments` payments.
    pub penultimate_epoch_low: f64,
    pub penultimate_epoch_high: f64,
    /// Payments before the penultimate one fall within this fraction of the
    /// settlement delay.
    pub head_epoch_fraction: f64,
    pub min_delay: f64,
}

impl Default for PaymentParams {
    fn default() -> Self {
        Self {
            size_log_mean: 9.5,
            size_log_sd: 1.4,
            notification_mean: 0.5,
            settlement_log_intercept: 2.3,
            settlement_log_slope: 3.0,
            settlement_log_sd: 0.5,
            settlement_period_log_slope: -0.02,
            settlement_log_mean_cap: 60f64.ln(),
            count_scale: 1.5,
            count_size_unit: 15_000.0,
            count_noise_sd: 1.0,
            weight_low: 0.5,
            weight_high: 1.5,
            tail_min_payments: 4,
            tail_share_low: 0.8,
            tail_share_high: 0.92,
            final_fraction_low: 0.05,
            final_fraction_high: 0.25,
            penultimate_epoch_low: 0.85,
            penultimate_epoch_high: 0.97,
            head_epoch_fraction: 1.0 / 3.0,
            min_delay: 1e-6,
        }
    }
}

/// Major revision parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MajorParams {
    /// Claims of at most this size never get a post-notification major revision.
    pub size_threshold: f64,
    pub ramp_width: f64,
    pub p_two_base: f64,
    pub p_two_slope: f64,
    pub p_three_slope: f64,
    pub min_payments: usize,
    pub coincidence_threshold: f64,
    pub coincidence_width: f64,
    pub coincidence_max: f64,
    /// Lower end of the epoch range as a fraction of the settlement delay.
    pub epoch_lower_fraction: f64,
    pub second_log_mean: f64,
    pub second_log_sd: f64,
    pub third_log_intercept: f64,
    pub third_log_slope: f64,
    pub third_pivot: f64,
    pub third_log_sd: f64,
}

impl Default for MajorParams {
    fn default() -> Self {
        Self {
            size_threshold: 15_000.0,
            ramp_width: 185_000.0,
            p_two_base: 0.1,
            p_two_slope: 0.3,
            p_three_slope: 0.5,
            min_payments: 4,
            coincidence_threshold: 200_000.0,
            coincidence_width: 2_800_000.0,
            coincidence_max: 0.2,
            epoch_lower_fraction: 1.0 / 3.0,
            second_log_mean: 1.8,
            second_log_sd: 0.2,
            third_log_intercept: 1.0,
            third_log_slope: 0.07,
            third_pivot: 6.0,
            third_log_sd: 0.2,
        }
    }
}

/// Minor revision parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinorParams {
    pub payment_probability: f64,
    pub free_mean_cap: f64,
    pub free_mean_divisor: f64,
    pub free_lower_fraction: f64,
    pub early_log_mean: f64,
    pub mid_log_mean: f64,
    pub late_log_mean: f64,
    pub log_sd: f64,
    pub log_sd_after_major: f64,
}

impl Default for MinorParams {
    fn default() -> Self {
        Self {
            payment_probability: 0.5,
            free_mean_cap: 3.0,
            free_mean_divisor: 4.0,
            free_lower_fraction: 1.0 / 6.0,
            early_log_mean: 0.15,
            mid_log_mean: 0.0,
            late_log_mean: -0.1,
            log_sd: 0.1,
            log_sd_after_major: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub time_unit_years: f64,
    pub n_occurrence_periods: u32,
    pub reference_claim_size: f64,
    pub exposure_per_period: PerPeriod,
    pub frequency_per_exposure: PerPeriod,
    pub kappa: f64,
    pub base_inflation_annual: f64,
    /// Optional quarterly effective base inflation rates, past and future.
    /// Overrides `base_inflation_annual` when present.
    pub base_inflation_quarterly: Option<Vec<f64>>,
    pub si: SuperimposedInflationParams,
    pub payments: PaymentParams,
    pub major: MajorParams,
    pub minor: MinorParams,
    pub master_seed: u64,
    pub preset: Preset,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            time_unit_years: 0.25,
            n_occurrence_periods: 40,
            reference_claim_size: 200_000.0,
            exposure_per_period: PerPeriod::Constant(6_000.0),
            frequency_per_exposure: PerPeriod::Constant(0.1),
            kappa: 0.95,
            base_inflation_annual: 0.02,
            base_inflation_quarterly: None,
            si: SuperimposedInflationParams::default(),
            payments: PaymentParams::default(),
            major: MajorParams::default(),
            minor: MinorParams::default(),
            master_seed: 0x5EED_2021,
            preset: Preset::DefaultHeterogeneous,
        }
    }
}

impl SimulationConfig {
    /// Parses a TOML document, applies the preset and validates the result.
    pub fn from_toml_str(source: &str) -> Result<Self> {
        let config: SimulationConfig =
            toml::from_str(source).map_err(|e| Error::ConfigParse(e.to_string()))?;
        config.finalize()
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let source = std::fs::read_to_string(path)?;
        Self::from_toml_str(&source)
    }

    /// Applies preset-driven overrides, then validates.
    pub fn finalize(mut self) -> Result<Self> {
        self.validate()?;
        if self.preset == Preset::Homogeneous {
            self.collapse_to_homogeneous();
        }
        Ok(self)
    }

    pub fn with_preset(mut self, preset: Preset) -> Result<Self> {
        self.preset = preset;
        self.finalize()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    fn collapse_to_homogeneous(&mut self) {
        self.exposure_per_period = PerPeriod::Constant(self.exposure_per_period.first());
        self.frequency_per_exposure = PerPeriod::Constant(self.frequency_per_exposure.first());
        if let Some(rates) = self.base_inflation_quarterly.take() {
            let quarterly = rates.first().copied().unwrap_or(0.0);
            self.base_inflation_annual = (1.0 + quarterly).powi(4) - 1.0;
        }
        // Occurrence SI at period 1 is the identity; payment SI depends on claim
        // size, which shifts the size mix across occurrence periods.
        self.si.occurrence_enabled = false;
        self.si.payment_enabled = false;
        self.payments.settlement_period_log_slope = 0.0;
    }

    pub fn expected_claims(&self, period: u32) -> f64 {
        self.exposure_per_period.at(period) * self.frequency_per_exposure.at(period)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(field, format!("must be > 0, got {v}")))
            }
        };
        let probability = |field: &str, v: f64| -> Result<()> {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::invalid(field, format!("must lie in [0, 1], got {v}")))
            }
        };

        positive("time_unit_years", self.time_unit_years)?;
        if self.n_occurrence_periods < 1 {
            return Err(Error::invalid("n_occurrence_periods", "must be >= 1"));
        }
        positive("reference_claim_size", self.reference_claim_size)?;
        self.exposure_per_period
            .validate("exposure_per_period", self.n_occurrence_periods)?;
        self.frequency_per_exposure
            .validate("frequency_per_exposure", self.n_occurrence_periods)?;
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return Err(Error::invalid(
                "kappa",
                format!("must lie in (0, 1), got {}", self.kappa),
            ));
        }
        if !(self.base_inflation_annual > -1.0) {
            return Err(Error::invalid("base_inflation_annual", "must exceed -1"));
        }
        if let Some(rates) = &self.base_inflation_quarterly {
            if rates.is_empty() {
                return Err(Error::invalid("base_inflation_quarterly", "must not be empty"));
            }
            if let Some(r) = rates.iter().find(|r| !(**r > -1.0 && r.is_finite())) {
                return Err(Error::invalid(
                    "base_inflation_quarterly",
                    format!("rates must exceed -1, got {r}"),
                ));
            }
        }

        let si = &self.si;
        positive("si.occurrence_floor_scale", si.occurrence_floor_scale)?;
        probability("si.occurrence_max_reduction", si.occurrence_max_reduction)?;
        if si.occurrence_max_reduction >= 1.0 {
            return Err(Error::invalid("si.occurrence_max_reduction", "must be < 1"));
        }
        if !(si.payment_gamma_annual > -1.0) {
            return Err(Error::invalid("si.payment_gamma_annual", "must exceed -1"));
        }
        positive("si.payment_scale", si.payment_scale)?;

        let p = &self.payments;
        positive("payments.size_log_sd", p.size_log_sd)?;
        positive("payments.notification_mean", p.notification_mean)?;
        positive("payments.settlement_log_sd", p.settlement_log_sd)?;
        positive("payments.count_size_unit", p.count_size_unit)?;
        if !(p.count_noise_sd >= 0.0) {
            return Err(Error::invalid("payments.count_noise_sd", "must be >= 0"));
        }
        positive("payments.weight_low", p.weight_low)?;
        if !(p.weight_high > p.weight_low) {
            return Err(Error::invalid(
                "payments.weight_high",
                "must exceed payments.weight_low",
            ));
        }
        positive("payments.min_delay", p.min_delay)?;
        if !(p.head_epoch_fraction > 0.0 && p.head_epoch_fraction <= 1.0) {
            return Err(Error::invalid("payments.head_epoch_fraction", "must lie in (0, 1]"));
        }
        if p.tail_min_payments < 3 {
            return Err(Error::invalid("payments.tail_min_payments", "must be >= 3"));
        }
        for (field, lo, hi) in [
            ("payments.tail_share", p.tail_share_low, p.tail_share_high),
            ("payments.final_fraction", p.final_fraction_low, p.final_fraction_high),
            ("payments.penultimate_epoch", p.penultimate_epoch_low, p.penultimate_epoch_high),
        ] {
            if !(lo > 0.0 && lo <= hi && hi < 1.0) {
                return Err(Error::invalid(
                    field,
                    format!("need 0 < low <= high < 1, got ({lo}, {hi})"),
                ));
            }
        }

        let ma = &self.major;
        positive("major.ramp_width", ma.ramp_width)?;
        positive("major.coincidence_width", ma.coincidence_width)?;
        probability("major.coincidence_max", ma.coincidence_max)?;
        if ma.min_payments < 2 {
            return Err(Error::invalid("major.min_payments", "must be >= 2"));
        }
        let p_max = ma.p_two_base + ma.p_two_slope + ma.p_three_slope;
        if ma.p_two_base < 0.0 || ma.p_two_slope < 0.0 || ma.p_three_slope < 0.0 || p_max > 1.0 {
            return Err(Error::invalid(
                "major.p_two_base",
                format!("revision-count probabilities must be non-negative and sum to <= 1 (max {p_max})"),
            ));
        }
        if !(ma.epoch_lower_fraction > 0.0 && ma.epoch_lower_fraction < 1.0) {
            return Err(Error::invalid("major.epoch_lower_fraction", "must lie in (0, 1)"));
        }
        positive("major.second_log_sd", ma.second_log_sd)?;
        positive("major.third_log_sd", ma.third_log_sd)?;

        let mi = &self.minor;
        probability("minor.payment_probability", mi.payment_probability)?;
        if !(mi.free_mean_cap >= 0.0) {
            return Err(Error::invalid("minor.free_mean_cap", "must be >= 0"));
        }
        positive("minor.free_mean_divisor", mi.free_mean_divisor)?;
        if !(mi.free_lower_fraction >= 0.0 && mi.free_lower_fraction < 1.0) {
            return Err(Error::invalid("minor.free_lower_fraction", "must lie in [0, 1)"));
        }
        positive("minor.log_sd", mi.log_sd)?;
        positive("minor.log_sd_after_major", mi.log_sd_after_major)?;
        Ok(())
    }

    /// Canonical TOML rendering, used for hashing run manifests.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_reference_defaults() {
        let config = SimulationConfig::from_toml_str("").unwrap();
        assert_eq!(config.time_unit_years, 0.25);
        assert_eq!(config.reference_claim_size, 200_000.0);
        assert_eq!(config.n_occurrence_periods, 40);
        assert_eq!(config.kappa, 0.95);
        assert_eq!(config.preset, Preset::DefaultHeterogeneous);
    }

    #[test]
    fn kappa_out_of_range_names_the_field() {
        let err = SimulationConfig::from_toml_str("kappa = 1.5").unwrap_err();
        match err {
            Error::InvalidConfig { field, .. } => assert_eq!(field, "kappa"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn malformed_document_is_a_parse_error() {
        assert!(matches!(
            SimulationConfig::from_toml_str("kappa = = 3"),
            Err(Error::ConfigParse(_))
        ));
        assert!(matches!(
            SimulationConfig::from_toml_str("no_such_field = 1"),
            Err(Error::ConfigParse(_))
        ));
    }

    #[test]
    fn zero_exposure_is_rejected() {
        let err = SimulationConfig::from_toml_str("exposure_per_period = 0.0").unwrap_err();
        assert!(matches!(err, Error::InvalidConfig { ref field, .. } if field == "exposure_per_period"));
    }

    #[test]
    fn short_per_period_vector_is_rejected() {
        let err = SimulationConfig::from_toml_str(
            "n_occurrence_periods = 3\nfrequency_per_exposure = [0.1, 0.2]",
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidConfig { ref field, .. } if field == "frequency_per_exposure"));
    }

    #[test]
    fn homogeneous_preset_collapses_period_dependence() {
        let config = SimulationConfig::from_toml_str(
            r#"
            preset = "homogeneous"
            n_occurrence_periods = 3
            exposure_per_period = [100.0, 200.0, 300.0]
            frequency_per_exposure = [0.5, 0.6, 0.7]
            base_inflation_quarterly = [0.01, 0.02, 0.03]
            "#,
        )
        .unwrap();
        assert_eq!(config.exposure_per_period, PerPeriod::Constant(100.0));
        assert_eq!(config.frequency_per_exposure, PerPeriod::Constant(0.5));
        assert!(config.base_inflation_quarterly.is_none());
        assert!((config.base_inflation_annual - (1.01f64.powi(4) - 1.0)).abs() < 1e-15);
        assert!(!config.si.occurrence_enabled);
        assert!(!config.si.payment_enabled);
        for i in 1..=3 {
            assert_eq!(config.expected_claims(i), 50.0);
        }
    }

    #[test]
    fn serialized_config_round_trips() {
        let config = SimulationConfig::default();
        let again = SimulationConfig::from_toml_str(&config.to_toml_string()).unwrap();
        assert_eq!(config, again);
    }
}
