//! Major revisions of incurred loss: count, epochs and multiplicative factors.
//!
//! The count includes the revision at notification, so `k = 1` means the
//! estimate is only established at notification and never majorly revised.

use crate::config::MajorParams;
use crate::rng::{sample_triangular, RngStream};

#[derive(Debug, Clone, PartialEq)]
pub struct MajorRevisionSet {
    /// Delays from notification; the first is always 0.
    pub epochs: Vec<f64>,
    /// The last revision coincides with the penultimate payment.
    pub at_penultimate_payment: bool,
    /// Sampled factors; the first is always 1.
    pub factors: Vec<f64>,
}

impl MajorRevisionSet {
    pub fn count(&self) -> usize {
        self.epochs.len()
    }

    pub fn notification_only() -> Self {
        Self {
            epochs: vec![0.0],
            at_penultimate_payment: false,
            factors: vec![1.0],
        }
    }
}

fn ramp(size: f64, params: &MajorParams) -> f64 {
    ((size - params.size_threshold).max(0.0) / params.ramp_width).min(1.0)
}

/// `[P(K=1), P(K=2), P(K=3)]` for a claim of size `size` with `payments` payments.
pub fn major_count_probabilities(size: f64, payments: usize, params: &MajorParams) -> [f64; 3] {
    if size <= params.size_threshold || payments < params.min_payments {
        return [1.0, 0.0, 0.0];
    }
    let x = ramp(size, params);
    let p2 = params.p_two_base + params.p_two_slope * x;
    let p3 = params.p_three_slope * x;
    let p1 = 1.0 - p2 - p3;
    assert!(p1 >= 0.0, "major revision count probabilities exceed 1");
    [p1, p2, p3]
}

pub fn sample_major_count(size: f64, payments: usize, params: &MajorParams, stream: &mut RngStream) -> usize {
    let [p1, p2, _] = major_count_probabilities(size, payments, params);
    if p1 >= 1.0 {
        return 1;
    }
    let u = stream.uniform();
    if u < p1 {
        1
    } else if u < p1 + p2 {
        2
    } else {
        3
    }
}

/// Probability that the last major revision lands on the penultimate payment.
pub fn coincidence_probability(size: f64, params: &MajorParams) -> f64 {
    params.coincidence_max
        * ((size - params.coincidence_threshold).max(0.0) / params.coincidence_width).min(1.0)
}

/// Draws `count` distinct triangular epochs on `(upper * lower_fraction, upper)`
/// with the mode at the lower end.
fn triangular_epochs(count: usize, upper: f64, lower_fraction: f64, stream: &mut RngStream) -> Vec<f64> {
    let lower = upper * lower_fraction;
    let mut out: Vec<f64> = Vec::with_capacity(count);
    while out.len() < count {
        let tau = sample_triangular(stream, lower, upper, lower).expect("lower < upper");
        if !(tau > 0.0 && tau < upper) || out.contains(&tau) {
            continue;
        }
        out.push(tau);
    }
    out
}

/// Epochs for `count` major revisions, `count >= 1`.
pub fn sample_major_epochs(
    count: usize,
    settlement_delay: f64,
    penultimate_epoch: Option<f64>,
    size: f64,
    params: &MajorParams,
    stream: &mut RngStream,
) -> (Vec<f64>, bool) {
    let mut epochs = vec![0.0];
    if count <= 1 {
        return (epochs, false);
    }
    let coincide = match penultimate_epoch {
        Some(_) => stream.bernoulli(coincidence_probability(size, params)),
        None => false,
    };
    if coincide {
        let penultimate = penultimate_epoch.expect("checked above");
        let mut middle = triangular_epochs(count - 2, penultimate, params.epoch_lower_fraction, stream);
        middle.sort_by(f64::total_cmp);
        epochs.extend(middle);
        epochs.push(penultimate);
    } else {
        let mut rest = triangular_epochs(count - 1, settlement_delay, params.epoch_lower_fraction, stream);
        rest.sort_by(f64::total_cmp);
        epochs.extend(rest);
    }
    (epochs, coincide)
}

/// Factors `g_1 .. g_k`, with `g_1 = 1` and the third depending on the second.
pub fn sample_major_factors(count: usize, params: &MajorParams, stream: &mut RngStream) -> Vec<f64> {
    let mut factors = vec![1.0];
    if count >= 2 {
        let g2 = stream.normal(params.second_log_mean, params.second_log_sd).exp();
        factors.push(g2);
        if count >= 3 {
            factors.push(stream.normal(third_log_mean(g2, params), params.third_log_sd).exp());
        }
    }
    factors
}

/// Log-mean of the third factor given the second.
pub fn third_log_mean(second: f64, params: &MajorParams) -> f64 {
    params.third_log_intercept + params.third_log_slope * (params.third_pivot - second)
}

/// Samples the full major revision set for a claim.
pub fn sample_majors(
    size: f64,
    payment_epochs: &[f64],
    params: &MajorParams,
    stream: &mut RngStream,
) -> MajorRevisionSet {
    let m = payment_epochs.len();
    let settlement = *payment_epochs.last().expect("at least one payment");
    let penultimate = (m >= 2).then(|| payment_epochs[m - 2]);
    let count = sample_major_count(size, m, params, stream);
    let (epochs, at_penultimate_payment) =
        sample_major_epochs(count, settlement, penultimate, size, params, stream);
    let factors = sample_major_factors(count, params, stream);
    MajorRevisionSet {
        epochs,
        at_penultimate_payment,
        factors,
    }
}
