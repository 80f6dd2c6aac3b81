//! Minor revisions of the outstanding estimate: payment-coincident events,
//! free-standing events, collision resolution against major revisions, and
//! revision factors.

use crate::config::MinorParams;
use crate::major::MajorRevisionSet;
use crate::rng::{sample_standard, DistSpec, RngStream};
use crate::timeline::{Revision, RevisionKind, Timeline, TimelineEvent};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MinorRevisionSet {
    /// 0-based indices of payments with a coincident minor revision.
    pub at_payment: Vec<usize>,
    /// Sorted delays of free-standing minor revisions.
    pub free_epochs: Vec<f64>,
}

impl MinorRevisionSet {
    pub fn count(&self) -> usize {
        self.at_payment.len() + self.free_epochs.len()
    }
}

/// Each payment independently gets a coincident minor revision.
pub fn sample_minor_at_payments(payments: usize, params: &MinorParams, stream: &mut RngStream) -> Vec<usize> {
    (0..payments)
        .filter(|_| stream.bernoulli(params.payment_probability))
        .collect()
}

/// Mean number of free-standing minor revisions for settlement delay `w`.
pub fn free_minor_mean(settlement_delay: f64, params: &MinorParams) -> f64 {
    params
        .free_mean_cap
        .min(settlement_delay / params.free_mean_divisor)
}

/// Geometric count of free-standing revisions with uniform epochs on `(w/6, w)`.
pub fn sample_minor_free(settlement_delay: f64, params: &MinorParams, stream: &mut RngStream) -> Vec<f64> {
    let mean = free_minor_mean(settlement_delay, params);
    let count = sample_standard(stream, DistSpec::Geometric { mean })
        .expect("mean is non-negative")
        .as_count();
    let lower = settlement_delay * params.free_lower_fraction;
    let mut epochs: Vec<f64> = (0..count)
        .map(|_| stream.uniform_open(lower, settlement_delay))
        .collect();
    epochs.sort_by(f64::total_cmp);
    epochs
}

pub fn sample_minors(payment_epochs: &[f64], params: &MinorParams, stream: &mut RngStream) -> MinorRevisionSet {
    let at_payment = sample_minor_at_payments(payment_epochs.len(), params, stream);
    let settlement = *payment_epochs.last().expect("at least one payment");
    let free_epochs = sample_minor_free(settlement, params, stream);
    MinorRevisionSet {
        at_payment,
        free_epochs,
    }
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    delay: f64,
    payment: Option<f64>,
    major: Option<f64>,
    minor: bool,
}

/// Merges payments, major and minor revisions into one timeline.
///
/// A minor revision at the epoch of a major revision is discarded. Minor
/// revisions are given a placeholder factor of 1; see [`sample_minor_factors`].
pub fn resolve_collisions(
    payment_epochs: &[f64],
    payment_amounts: &[f64],
    majors: &MajorRevisionSet,
    minors: &MinorRevisionSet,
) -> Timeline {
    let mut pending: Vec<Pending> = Vec::new();
    for (tau, g) in majors.epochs.iter().zip(&majors.factors) {
        pending.push(Pending {
            delay: *tau,
            payment: None,
            major: Some(*g),
            minor: false,
        });
    }
    for (idx, (tau, amount)) in payment_epochs.iter().zip(payment_amounts).enumerate() {
        pending.push(Pending {
            delay: *tau,
            payment: Some(*amount),
            major: None,
            minor: minors.at_payment.contains(&idx),
        });
    }
    for tau in &minors.free_epochs {
        pending.push(Pending {
            delay: *tau,
            payment: None,
            major: None,
            minor: true,
        });
    }
    // stable sort keeps the notification ahead of anything else at delay 0
    pending.sort_by(|a, b| a.delay.total_cmp(&b.delay));

    let mut merged: Vec<Pending> = Vec::with_capacity(pending.len());
    for p in pending {
        match merged.last_mut() {
            Some(last) if last.delay == p.delay => {
                last.payment = last.payment.or(p.payment);
                last.major = last.major.or(p.major);
                last.minor |= p.minor;
            }
            _ => merged.push(p),
        }
    }

    let events = merged
        .into_iter()
        .map(|p| {
            let revision = match (p.major, p.minor) {
                (Some(g), _) => Some(Revision {
                    kind: RevisionKind::Major,
                    factor: g,
                }),
                (None, true) => Some(Revision {
                    kind: RevisionKind::Minor,
                    factor: 1.0,
                }),
                (None, false) => None,
            };
            TimelineEvent {
                delay: p.delay,
                payment: p.payment,
                revision,
            }
        })
        .collect();
    Timeline { events }
}

/// Location and dispersion of `ln g` for a minor revision at delay `tau`.
pub fn minor_factor_log_params(
    settlement_delay: f64,
    tau: f64,
    after_second_major: bool,
    params: &MinorParams,
) -> (f64, f64) {
    let mean = if tau <= settlement_delay / 3.0 {
        params.early_log_mean
    } else if tau <= 2.0 * settlement_delay / 3.0 {
        params.mid_log_mean
    } else {
        params.late_log_mean
    };
    let sd = if after_second_major {
        params.log_sd_after_major
    } else {
        params.log_sd
    };
    (mean, sd)
}

pub fn sample_minor_factor(
    settlement_delay: f64,
    tau: f64,
    after_second_major: bool,
    params: &MinorParams,
    stream: &mut RngStream,
) -> f64 {
    let (mean, sd) = minor_factor_log_params(settlement_delay, tau, after_second_major, params);
    stream.normal(mean, sd).exp()
}

/// Draws the factor of every minor revision on the timeline, in chronological order.
pub fn sample_minor_factors(timeline: &mut Timeline, settlement_delay: f64, params: &MinorParams, stream: &mut RngStream) {
    let first_major = timeline.major_epochs().next();
    for event in &mut timeline.events {
        if let Some(rev) = event.revision.as_mut() {
            if rev.kind == RevisionKind::Minor {
                let after = first_major.is_some_and(|m| m < event.delay);
                rev.factor = sample_minor_factor(settlement_delay, event.delay, after, params, stream);
            }
        }
    }
}
