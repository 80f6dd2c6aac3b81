//! Paid-loss base: claim counts, occurrence, size, delays and partial payments.
//!
//! Every distributional choice goes through [`PaymentModel`], so any of the hooks
//! can be swapped out. [`DefaultPaymentModel`] is the built-in parameterization.

use crate::config::{PaymentParams, SimulationConfig};
use crate::error::{Error, Result};
use crate::rng::{derive_stream, sample_standard, DistSpec, RngStream};

/// One partial payment, in constant dollars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Payment {
    /// Delay since the previous payment (or since notification for the first one).
    pub delay: f64,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClaimRecord {
    /// Global claim number, 1-based, in canonical (period, id) order.
    pub claim_no: u64,
    pub occurrence_period: u32,
    /// Claim id within its occurrence period, 1-based.
    pub claim_id: u32,
    pub occurrence_time: f64,
    /// Uninflated claim size, equal to the sum of the payment amounts.
    pub size: f64,
    pub notification_delay: f64,
    /// Delay from notification to settlement.
    pub settlement_delay: f64,
    pub payments: Vec<Payment>,
}

impl ClaimRecord {
    pub fn notification_time(&self) -> f64 {
        self.occurrence_time + self.notification_delay
    }

    pub fn settlement_time(&self) -> f64 {
        self.notification_time() + self.settlement_delay
    }

    pub fn n_payments(&self) -> usize {
        self.payments.len()
    }

    /// Delays from notification to each payment, `w^(1) .. w^(m)`.
    pub fn payment_epochs(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out: Vec<f64> = self
            .payments
            .iter()
            .map(|p| {
                acc += p.delay;
                acc
            })
            .collect();
        // the final epoch is the settlement delay by definition
        if let Some(last) = out.last_mut() {
            *last = self.settlement_delay;
        }
        out
    }

    /// Delay to the penultimate payment, or `None` for a single-payment claim.
    pub fn penultimate_epoch(&self) -> Option<f64> {
        let epochs = self.payment_epochs();
        (epochs.len() >= 2).then(|| epochs[epochs.len() - 2])
    }

    pub fn check_invariants(&self) -> Result<()> {
        let fail = |reason: String| {
            Err(Error::Timeline {
                claim_no: self.claim_no,
                reason,
            })
        };
        if self.payments.is_empty() {
            return fail("claim has no payments".into());
        }
        if !(self.size > 0.0) {
            return fail(format!("claim size {} not positive", self.size));
        }
        if !(self.notification_delay > 0.0 && self.settlement_delay > 0.0) {
            return fail("delays must be positive".into());
        }
        let lo = self.occurrence_period as f64 - 1.0;
        if !(self.occurrence_time > lo && self.occurrence_time <= lo + 1.0) {
            return fail(format!(
                "occurrence time {} outside period {}",
                self.occurrence_time, self.occurrence_period
            ));
        }
        if self.payments.iter().any(|p| !(p.delay > 0.0 && p.amount > 0.0)) {
            return fail("payment delays and amounts must be positive".into());
        }
        let total: f64 = self.payments.iter().map(|p| p.amount).sum();
        if (total - self.size).abs() > 1e-9 * self.size {
            return fail(format!("payments sum to {total}, claim size {}", self.size));
        }
        let delay_total: f64 = self.payments.iter().map(|p| p.delay).sum();
        if (delay_total - self.settlement_delay).abs() > 1e-9 * self.settlement_delay.max(1.0) {
            return fail(format!(
                "inter-partial delays sum to {delay_total}, settlement delay {}",
                self.settlement_delay
            ));
        }
        let epochs = self.payment_epochs();
        if epochs.windows(2).any(|w| !(w[0] < w[1])) {
            return fail("payment epochs not strictly increasing".into());
        }
        Ok(())
    }
}

/// Distribution hooks for the paid-loss base. Times are in simulation periods.
pub trait PaymentModel: Send + Sync {
    fn claim_size(&self, period: u32, rng: &mut RngStream) -> f64;
    fn notification_delay(&self, period: u32, size: f64, rng: &mut RngStream) -> f64;
    /// Delay from notification to settlement.
    fn settlement_delay(&self, period: u32, size: f64, rng: &mut RngStream) -> f64;
    fn payment_count(&self, period: u32, size: f64, rng: &mut RngStream) -> usize;
    /// Proportions of the claim size paid in each payment; must sum to 1.
    fn payment_proportions(&self, count: usize, rng: &mut RngStream) -> Vec<f64>;
    /// Inter-partial delays; must be positive and sum to `settlement_delay`.
    fn inter_payment_delays(&self, settlement_delay: f64, count: usize, rng: &mut RngStream) -> Vec<f64>;
}

#[derive(Debug, Clone)]
pub struct DefaultPaymentModel {
    params: PaymentParams,
    reference_claim_size: f64,
}

impl DefaultPaymentModel {
    pub fn new(config: &SimulationConfig) -> Self {
        Self {
            params: config.payments.clone(),
            reference_claim_size: config.reference_claim_size,
        }
    }
}

impl PaymentModel for DefaultPaymentModel {
    fn claim_size(&self, _period: u32, rng: &mut RngStream) -> f64 {
        let spec = DistSpec::LogNormal {
            mu: self.params.size_log_mean,
            sigma: self.params.size_log_sd,
        };
        sample_standard(rng, spec).expect("validated config").as_f64()
    }

    fn notification_delay(&self, _period: u32, _size: f64, rng: &mut RngStream) -> f64 {
        rng.exponential(self.params.notification_mean)
            .max(self.params.min_delay)
    }

    fn settlement_delay(&self, period: u32, size: f64, rng: &mut RngStream) -> f64 {
        let p = &self.params;
        let log_mean = p.settlement_log_intercept
            + p.settlement_log_slope * (size / self.reference_claim_size).ln_1p()
            + p.settlement_period_log_slope * (period as f64 - 1.0);
        let log_mean = log_mean.min(p.settlement_log_mean_cap);
        rng.normal(log_mean, p.settlement_log_sd).exp().max(p.min_delay)
    }

    fn payment_count(&self, _period: u32, size: f64, rng: &mut RngStream) -> usize {
        let p = &self.params;
        let noise = if p.count_noise_sd > 0.0 {
            rng.normal(0.0, p.count_noise_sd)
        } else {
            0.0
        };
        let raw = 1.0 + p.count_scale * (size / p.count_size_unit).ln_1p() + noise;
        raw.round().max(1.0) as usize
    }

    fn payment_proportions(&self, count: usize, rng: &mut RngStream) -> Vec<f64> {
        let p = &self.params;
        let mut weights: Vec<f64> = (0..count)
            .map(|_| p.weight_low + (p.weight_high - p.weight_low) * rng.uniform())
            .collect();
        if count >= p.tail_min_payments {
            // most of the cost goes out in the last two payments
            let tail = p.tail_share_low + (p.tail_share_high - p.tail_share_low) * rng.uniform();
            let last = p.final_fraction_low + (p.final_fraction_high - p.final_fraction_low) * rng.uniform();
            let head: f64 = weights[..count - 2].iter().sum();
            for w in &mut weights[..count - 2] {
                *w *= (1.0 - tail) / head;
            }
            weights[count - 2] = tail * (1.0 - last);
            weights[count - 1] = tail * last;
            let argmax = index_of(&weights, |a, b| a > b);
            weights.swap(argmax, count - 2);
            return weights;
        }
        if count >= 2 {
            // largest weight is the penultimate payment, smallest the final one
            let argmax = index_of(&weights, |a, b| a > b);
            weights.swap(argmax, count - 2);
            let argmin = index_of(&weights, |a, b| a < b);
            weights.swap(argmin, count - 1);
            if weights[count - 2] < weights[count - 1] {
                weights.swap(count - 2, count - 1);
            }
        }
        let total: f64 = weights.iter().sum();
        weights.iter().map(|w| w / total).collect()
    }

    fn inter_payment_delays(&self, settlement_delay: f64, count: usize, rng: &mut RngStream) -> Vec<f64> {
        let p = &self.params;
        let mut cuts: Vec<f64> = if count >= p.tail_min_payments {
            // early payments come soon after notification, the large penultimate one late
            let frac = p.penultimate_epoch_low + (p.penultimate_epoch_high - p.penultimate_epoch_low) * rng.uniform();
            let penultimate = settlement_delay * frac;
            let head_end = penultimate.min(settlement_delay * p.head_epoch_fraction);
            let mut early: Vec<f64> = (0..count - 2).map(|_| head_end * rng.uniform()).collect();
            early.push(penultimate);
            early
        } else {
            (0..count.saturating_sub(1))
                .map(|_| settlement_delay * rng.uniform())
                .collect()
        };
        cuts.sort_by(f64::total_cmp);
        let mut delays = Vec::with_capacity(count);
        let mut prev = 0.0;
        for c in cuts.iter().copied().chain(std::iter::once(settlement_delay)) {
            delays.push((c - prev).max(p.min_delay));
            prev = c;
        }
        let total: f64 = delays.iter().sum();
        delays.iter().map(|d| d * settlement_delay / total).collect()
    }
}

fn index_of(values: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if better(*v, values[best]) {
            best = i;
        }
    }
    best
}

/// Claim counts `n_1 .. n_I`, each Poisson with mean `E_i * lambda_i`.
pub fn simulate_claim_counts(config: &SimulationConfig) -> Vec<u64> {
    let mut stream = derive_stream(config.master_seed, "counts");
    (1..=config.n_occurrence_periods)
        .map(|i| {
            let lambda = config.expected_claims(i);
            sample_standard(&mut stream, DistSpec::Poisson { lambda })
                .expect("validated config")
                .as_count()
        })
        .collect()
}

pub fn claim_scope(period: u32, claim_id: u32, purpose: &str) -> String {
    format!("claim/{period}/{claim_id}/{purpose}")
}

/// Simulates claim `claim_id` of occurrence period `period` from the given stream.
pub fn simulate_claim(
    period: u32,
    claim_id: u32,
    claim_no: u64,
    model: &dyn PaymentModel,
    stream: &mut RngStream,
) -> ClaimRecord {
    let occurrence_time = period as f64 - stream.uniform();
    let size = model.claim_size(period, stream);
    let notification_delay = model.notification_delay(period, size, stream);
    let settlement_delay = model.settlement_delay(period, size, stream);
    let count = model.payment_count(period, size, stream).max(1);
    let proportions = model.payment_proportions(count, stream);
    let delays = model.inter_payment_delays(settlement_delay, count, stream);
    build_claim(
        claim_no,
        period,
        claim_id,
        occurrence_time,
        size,
        notification_delay,
        settlement_delay,
        &proportions,
        &delays,
    )
}

#[allow(clippy::too_many_arguments)]
fn build_claim(
    claim_no: u64,
    period: u32,
    claim_id: u32,
    occurrence_time: f64,
    size: f64,
    notification_delay: f64,
    settlement_delay: f64,
    proportions: &[f64],
    delays: &[f64],
) -> ClaimRecord {
    let payments: Vec<Payment> = proportions
        .iter()
        .zip(delays)
        .map(|(p, d)| Payment {
            delay: *d,
            amount: size * p,
        })
        .collect();
    // The stored size is the exact floating sum of the stored payments.
    let size = payments.iter().map(|p| p.amount).sum();
    ClaimRecord {
        claim_no,
        occurrence_period: period,
        claim_id,
        occurrence_time,
        size,
        notification_delay,
        settlement_delay,
        payments,
    }
}

/// Simulates every claim's paid-loss base with per-claim streams.
pub fn simulate_paid_losses(config: &SimulationConfig, model: &dyn PaymentModel) -> Vec<ClaimRecord> {
    let counts = simulate_claim_counts(config);
    let mut claims = Vec::with_capacity(counts.iter().sum::<u64>() as usize);
    let mut claim_no = 0;
    for (idx, n) in counts.iter().enumerate() {
        let period = idx as u32 + 1;
        for r in 1..=*n as u32 {
            claim_no += 1;
            let mut stream = derive_stream(config.master_seed, &claim_scope(period, r, "payments"));
            claims.push(simulate_claim(period, r, claim_no, model, &mut stream));
        }
    }
    claims
}

/// Builds a claim from externally supplied payments (time from notification,
/// constant-dollar amount), for use in place of the default hooks.
pub fn claim_from_payments(
    claim_no: u64,
    occurrence_time: f64,
    notification_time: f64,
    payments: &[(f64, f64)],
) -> Result<ClaimRecord> {
    let fail = |reason: String| Error::Timeline { claim_no, reason };
    if payments.is_empty() {
        return Err(fail("no payments".into()));
    }
    let period = occurrence_time.ceil().max(1.0) as u32;
    let mut prev = 0.0;
    let mut delays = Vec::with_capacity(payments.len());
    for (delay, _) in payments {
        if !(*delay > prev) {
            return Err(fail(format!("payment delays must be strictly increasing and positive, got {delay}")));
        }
        delays.push(delay - prev);
        prev = *delay;
    }
    let records: Vec<Payment> = payments
        .iter()
        .zip(&delays)
        .map(|((_, amount), delay)| Payment {
            delay: *delay,
            amount: *amount,
        })
        .collect();
    let claim = ClaimRecord {
        claim_no,
        occurrence_period: period,
        // claim numbers are unique, so they double as the within-period id
        claim_id: claim_no as u32,
        occurrence_time,
        size: records.iter().map(|p| p.amount).sum(),
        notification_delay: notification_time - occurrence_time,
        settlement_delay: prev,
        payments: records,
    };
    claim.check_invariants()?;
    Ok(claim)
}
