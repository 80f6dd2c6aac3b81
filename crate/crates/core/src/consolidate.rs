//! Case-estimate paths.
//!
//! The path of a claim is computed backward from settlement, where the incurred
//! estimate is pinned to the total amount paid. Walking back one revision at a
//! time, the pre-revision estimate is recovered from the post-revision one:
//!
//! * major revision: `y(τ-0) = y(τ) / g`
//! * minor revision: `y(τ-0) = c(τ-0) + (y(τ) - c(τ-0)) / g`
//!
//! where `c(τ-0)` is paid to date excluding any payment at `τ` (the revision
//! happens first). The estimate held before a revision must satisfy
//! `κ·y ≥ c` against everything paid up to that revision; if not, it is raised
//! to `c/κ` and the factor recorded for the revision is the effective one.
//!
//! In the inflated view every revision (and settlement) also carries the base
//! inflation accrued since the previous revision, `f(t)/f(t*)`, so each estimate
//! is expressed in money of its own date.

use crate::claims::ClaimRecord;
use crate::error::{Error, Result};
use crate::inflation::InflationModel;
use crate::timeline::{Revision, RevisionKind, Timeline, TxnType};

/// Incurred estimate after a major revision of `incurred_before` by `factor`.
pub fn revise_major(incurred_before: f64, factor: f64) -> f64 {
    factor * incurred_before
}

/// Incurred estimate after a minor revision of the outstanding estimate.
pub fn revise_minor(paid_before: f64, outstanding_before: f64, factor: f64) -> f64 {
    paid_before + factor * outstanding_before
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEvent {
    /// Delay from notification.
    pub delay: f64,
    /// Calendar time.
    pub time: f64,
    pub txn_type: TxnType,
    /// Amount paid at this event, 0 when there is no payment.
    pub payment: f64,
    pub incurred: f64,
    pub outstanding: f64,
    pub cum_paid: f64,
    /// Effective revision factor, present only on revision events.
    pub multiplier: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EstimatePath {
    pub events: Vec<PathEvent>,
}

impl EstimatePath {
    pub fn initial_estimate(&self) -> f64 {
        self.events.first().map_or(0.0, |e| e.incurred)
    }

    pub fn final_event(&self) -> Option<&PathEvent> {
        self.events.last()
    }
}

#[derive(Debug, Clone, Copy)]
struct Step {
    /// Time at which the inflation index is read.
    index_time: f64,
    payment: f64,
    revision: Option<Revision>,
}

#[derive(Debug, Clone, Copy)]
struct Solved {
    incurred: f64,
    kind: Option<RevisionKind>,
    multiplier: Option<f64>,
}

fn backward(claim_no: u64, steps: &[Step], kappa: f64, index: impl Fn(f64) -> f64) -> Result<Vec<Solved>> {
    let fail = |reason: &str| Error::Timeline {
        claim_no,
        reason: reason.to_owned(),
    };
    let n = steps.len();
    match steps.first() {
        Some(Step {
            revision: Some(Revision {
                kind: RevisionKind::Major,
                ..
            }),
            payment,
            ..
        }) if *payment == 0.0 => {}
        _ => return Err(fail("timeline must open with the notification revision")),
    }
    if n < 2 || steps[n - 1].payment <= 0.0 {
        return Err(fail("timeline must end with the final payment"));
    }

    let mut cum_before = Vec::with_capacity(n);
    let mut acc = 0.0;
    for s in steps {
        cum_before.push(acc);
        acc += s.payment;
    }
    let total = acc;

    let mut out: Vec<Solved> = steps
        .iter()
        .map(|s| Solved {
            incurred: 0.0,
            kind: s.revision.map(|r| r.kind),
            multiplier: None,
        })
        .collect();

    let points: Vec<usize> = (1..n)
        .filter(|&i| steps[i].revision.is_some() || i == n - 1)
        .collect();

    let mut y_post = total;
    let mut upper = n;
    for (k, &p) in points.iter().enumerate().rev() {
        let prev = if k == 0 { 0 } else { points[k - 1] };
        for slot in &mut out[p..upper] {
            slot.incurred = y_post;
        }
        let paid = cum_before[p];
        let raw_pre = match steps[p].revision {
            Some(Revision {
                kind: RevisionKind::Major,
                factor,
            }) => y_post / factor,
            Some(Revision {
                kind: RevisionKind::Minor,
                factor,
            }) => paid + (y_post - paid) / factor,
            None => y_post,
        };
        let ratio = index(steps[prev].index_time) / index(steps[p].index_time);
        let mut held = raw_pre * ratio;
        let capped = kappa * held < paid;
        if capped {
            held = paid / kappa;
            // division can land one ulp short of the bound
            while kappa * held < paid {
                held = held.next_up();
            }
        }
        let y_pre = held / ratio;
        let slot = &mut out[p];
        slot.multiplier = match (steps[p].revision, capped) {
            (Some(rev), false) => Some(rev.factor),
            (Some(Revision {
                kind: RevisionKind::Major,
                ..
            }), true) => Some(y_post / y_pre),
            (Some(_), true) | (None, true) => {
                slot.kind = Some(RevisionKind::Minor);
                Some((y_post - paid) / (y_pre - paid))
            }
            (None, false) => None,
        };
        if !(held > 0.0 && held.is_finite()) {
            return Err(fail("non-positive incurred estimate"));
        }
        y_post = held;
        upper = p;
    }
    for slot in &mut out[..upper] {
        slot.incurred = y_post;
    }
    out[0].multiplier = Some(1.0);
    Ok(out)
}

fn assemble(
    delays: &[f64],
    notification_time: f64,
    payments: &[f64],
    solved: &[Solved],
) -> EstimatePath {
    let mut cum_paid = 0.0;
    let events = solved
        .iter()
        .enumerate()
        .map(|(i, s)| {
            cum_paid += payments[i];
            let txn_type = TxnType::from_parts(payments[i] > 0.0, s.kind).expect("event has content");
            PathEvent {
                delay: delays[i],
                time: notification_time + delays[i],
                txn_type,
                payment: payments[i],
                incurred: s.incurred,
                outstanding: s.incurred - cum_paid,
                cum_paid,
                multiplier: s.multiplier,
            }
        })
        .collect();
    EstimatePath { events }
}

/// Constant-dollar case-estimate path of `claim` for the given timeline.
pub fn consolidate_backward(claim: &ClaimRecord, timeline: &Timeline, kappa: f64) -> Result<EstimatePath> {
    let steps: Vec<Step> = timeline
        .events
        .iter()
        .map(|e| Step {
            index_time: e.delay,
            payment: e.payment.unwrap_or(0.0),
            revision: e.revision,
        })
        .collect();
    let solved = backward(claim.claim_no, &steps, kappa, |_| 1.0)?;
    let delays: Vec<f64> = timeline.events.iter().map(|e| e.delay).collect();
    let payments: Vec<f64> = steps.iter().map(|s| s.payment).collect();
    Ok(assemble(&delays, claim.notification_time(), &payments, &solved))
}

/// Re-expresses a constant-dollar path in inflated money.
///
/// Payments are inflated with the full index set. Estimates carry superimposed
/// inflation through the settlement anchor and base inflation up to the epoch
/// of each revision. `dev_limit`, when given, is the number of development
/// periods after which transactions are treated as occurring at the end of the
/// last development period for the purpose of inflation.
pub fn apply_base_inflation(
    path: &EstimatePath,
    claim: &ClaimRecord,
    inflation: &InflationModel,
    kappa: f64,
    dev_limit: Option<u32>,
) -> Result<EstimatePath> {
    let horizon = dev_limit.map(|j| claim.occurrence_period as f64 - 1.0 + j as f64);
    let cap = |t: f64| horizon.map_or(t, |h| t.min(h));
    let steps: Vec<Step> = path
        .events
        .iter()
        .map(|e| {
            let t = cap(e.time);
            Step {
                index_time: t,
                payment: if e.payment > 0.0 {
                    inflation.inflate_payment(e.payment, t, claim.occurrence_period, claim.size)
                } else {
                    0.0
                },
                revision: e.txn_type.revision().map(|kind| Revision {
                    kind,
                    factor: e.multiplier.expect("revision events carry a multiplier"),
                }),
            }
        })
        .collect();
    let solved = backward(claim.claim_no, &steps, kappa, |t| inflation.base_index_unchecked(t))?;
    let delays: Vec<f64> = path.events.iter().map(|e| e.delay).collect();
    let payments: Vec<f64> = steps.iter().map(|s| s.payment).collect();
    Ok(assemble(&delays, claim.notification_time(), &payments, &solved))
}

/// One row of the transaction output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transaction {
    pub claim_no: u64,
    /// Uninflated claim size.
    pub claim_size: f64,
    pub txn_time: f64,
    pub txn_delay: f64,
    pub txn_type: TxnType,
    pub incurred: f64,
    pub ocl: f64,
    pub cumpaid: f64,
    pub multiplier: Option<f64>,
}

pub fn emit_transactions(claim: &ClaimRecord, path: &EstimatePath) -> Vec<Transaction> {
    path.events
        .iter()
        .map(|e| Transaction {
            claim_no: claim.claim_no,
            claim_size: claim.size,
            txn_time: e.time,
            txn_delay: e.delay,
            txn_type: e.txn_type,
            incurred: e.incurred,
            ocl: e.outstanding,
            cumpaid: e.cum_paid,
            multiplier: e.multiplier,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::claims::claim_from_payments;
    use crate::timeline::TimelineEvent;

    fn ev(delay: f64, payment: Option<f64>, revision: Option<(RevisionKind, f64)>) -> TimelineEvent {
        TimelineEvent {
            delay,
            payment,
            revision: revision.map(|(kind, factor)| Revision { kind, factor }),
        }
    }

    fn notification() -> TimelineEvent {
        ev(0.0, None, Some((RevisionKind::Major, 1.0)))
    }

    #[test]
    fn worked_minor_and_major_steps() {
        assert!((revise_minor(2_005.0, 21_688.0, 1.0503) - 24_784.0).abs() < 1.0);
        let y = revise_major(52_969.0, 3.1759);
        assert!((y - 168_224.0).abs() < 1.0);
        assert!((y - 19_727.0 - 148_497.0).abs() < 1.0);
    }

    #[test]
    fn backward_minor_recovers_worked_state() {
        // notification, payment of 2,005, then a minor 1.0503 coincident with a
        // payment that takes outstanding from 22,779 to 20,654, then settlement.
        let after = 2_005.0 + 21_688.0 * 1.0503;
        let second = after - 2_005.0 - 20_654.0;
        let final_payment = 20_654.0;
        let claim = claim_from_payments(1, 0.5, 1.0, &[(0.9, 2_005.0), (1.4, second), (2.3, final_payment)]).unwrap();
        let t = Timeline {
            events: vec![
                notification(),
                ev(0.9, Some(2_005.0), None),
                ev(1.4, Some(second), Some((RevisionKind::Minor, 1.0503))),
                ev(2.3, Some(final_payment), None),
            ],
        };
        let path = consolidate_backward(&claim, &t, 0.95).unwrap();
        let e = &path.events[2];
        assert_eq!(e.txn_type, TxnType::PMi);
        assert!((e.incurred - 24_784.0).abs() < 1.0);
        assert!((path.events[1].outstanding - 21_688.0).abs() < 1e-6);
        assert!((e.outstanding - 20_654.0).abs() < 1e-6);
    }

    #[test]
    fn no_revisions_keeps_incurred_at_size() {
        let claim = claim_from_payments(2, 0.2, 0.4, &[(1.0, 30.0), (2.0, 60.0), (3.0, 10.0)]).unwrap();
        let t = Timeline {
            events: vec![
                notification(),
                ev(1.0, Some(30.0), None),
                ev(2.0, Some(60.0), None),
                ev(3.0, Some(10.0), None),
            ],
        };
        let path = consolidate_backward(&claim, &t, 0.95).unwrap();
        assert!(path.events.iter().all(|e| e.incurred == 100.0));
        let ocl: Vec<f64> = path.events.iter().map(|e| e.outstanding).collect();
        assert_eq!(ocl, vec![100.0, 70.0, 10.0, 0.0]);
        assert_eq!(path.events[0].multiplier, Some(1.0));
        assert!(path.events[1..].iter().all(|e| e.multiplier.is_none()));
    }

    #[test]
    fn oversized_major_factor_is_capped() {
        // huge factor would push the pre-revision estimate below paid-to-date
        let claim = claim_from_payments(3, 0.2, 0.4, &[(1.0, 50.0), (3.0, 50.0)]).unwrap();
        let t = Timeline {
            events: vec![
                notification(),
                ev(1.0, Some(50.0), None),
                ev(2.0, None, Some((RevisionKind::Major, 10.0))),
                ev(3.0, Some(50.0), None),
            ],
        };
        let path = consolidate_backward(&claim, &t, 0.95).unwrap();
        let held = path.events[1].incurred;
        assert!((held - 50.0 / 0.95).abs() < 1e-9);
        let g = path.events[2].multiplier.unwrap();
        assert!((g - 0.95 * 100.0 / 50.0).abs() < 1e-9);
        assert!(g < 10.0);
    }

    #[test]
    fn small_final_payment_without_revision_is_promoted() {
        let claim = claim_from_payments(4, 0.2, 0.4, &[(1.0, 99.0), (2.0, 1.0)]).unwrap();
        let t = Timeline {
            events: vec![notification(), ev(1.0, Some(99.0), None), ev(2.0, Some(1.0), None)],
        };
        let path = consolidate_backward(&claim, &t, 0.95).unwrap();
        let last = path.events[2];
        assert_eq!(last.txn_type, TxnType::PMi);
        assert!(last.multiplier.unwrap() < 1.0);
        assert!(0.95 * path.events[1].incurred >= path.events[1].cum_paid - 1e-9);
    }

    #[test]
    fn timeline_must_end_with_payment() {
        let claim = claim_from_payments(5, 0.2, 0.4, &[(1.0, 10.0)]).unwrap();
        let t = Timeline {
            events: vec![
                notification(),
                ev(1.0, Some(10.0), None),
                ev(1.5, None, Some((RevisionKind::Minor, 1.1))),
            ],
        };
        assert!(matches!(
            consolidate_backward(&claim, &t, 0.95),
            Err(Error::Timeline { claim_no: 5, .. })
        ));
    }

    #[test]
    fn one_year_of_base_inflation_at_settlement() {
        use crate::config::{SimulationConfig, SuperimposedInflationParams};
        let config = SimulationConfig {
            si: SuperimposedInflationParams {
                occurrence_enabled: false,
                payment_enabled: false,
                ..Default::default()
            },
            ..SimulationConfig::default()
        };
        let inflation = InflationModel::from_config(&config);
        // notified at time 0 (to within the positivity floor), paid in full 4 quarters later
        let claim = claim_from_payments(6, 1e-12, 2e-12, &[(4.0, 100.0)]).unwrap();
        let t = Timeline {
            events: vec![notification(), ev(4.0, Some(100.0), None)],
        };
        let path = consolidate_backward(&claim, &t, 0.95).unwrap();
        let inflated = apply_base_inflation(&path, &claim, &inflation, 0.95, None).unwrap();
        assert!((inflated.events[1].incurred - 102.0).abs() < 1e-6);
        assert!((inflated.events[0].incurred - 100.0).abs() < 1e-6);
        assert_eq!(inflated.events[1].outstanding, 0.0);
    }

    #[test]
    fn zero_inflation_leaves_path_unchanged() {
        let claim = claim_from_payments(7, 3.3, 3.5, &[(1.0, 20.0), (2.5, 70.0), (4.0, 10.0)]).unwrap();
        let t = Timeline {
            events: vec![
                notification(),
                ev(1.0, Some(20.0), Some((RevisionKind::Minor, 1.2))),
                ev(1.7, None, Some((RevisionKind::Major, 3.0))),
                ev(2.5, Some(70.0), None),
                ev(3.1, None, Some((RevisionKind::Minor, 0.9))),
                ev(4.0, Some(10.0), None),
            ],
        };
        let path = consolidate_backward(&claim, &t, 0.95).unwrap();
        let same = apply_base_inflation(&path, &claim, &InflationModel::none(), 0.95, Some(40)).unwrap();
        assert_eq!(path, same);
    }
}
