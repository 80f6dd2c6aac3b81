//! Property tests over randomly generated timelines and datasets.

mod common;

use approx::assert_relative_eq;
use casesim::claims::claim_from_payments;
use casesim::consolidate::{consolidate_backward, Transaction};
use casesim::csv_io::{read_triangle, write_triangle};
use casesim::dataset::{ClaimSummary, Dataset};
use casesim::timeline::{Revision, RevisionKind, Timeline, TimelineEvent, TxnType};
use casesim::triangle::{aggregate, reaggregate, TriangleKind, TriangleShape};
use proptest::prelude::*;

use common::forward_replay;

#[derive(Debug, Clone)]
struct Step {
    gap: f64,
    payment: Option<f64>,
    revision: Option<(bool, f64)>,
}

fn step() -> impl Strategy<Value = Step> {
    let revision = prop_oneof![
        Just(None),
        (any::<bool>(), 0.2..4.0_f64).prop_map(Some),
    ];
    (0.05..3.0_f64, proptest::option::of(1.0..50_000.0_f64), revision).prop_map(|(gap, payment, revision)| {
        // every event needs a payment or a revision
        let payment = if revision.is_none() { payment.or(Some(100.0)) } else { payment };
        Step { gap, payment, revision }
    })
}

fn timeline(steps: &[Step], last_payment: f64) -> Timeline {
    let mut events = vec![TimelineEvent {
        delay: 0.0,
        payment: None,
        revision: Some(Revision { kind: RevisionKind::Major, factor: 1.0 }),
    }];
    let mut delay = 0.0;
    for (k, s) in steps.iter().enumerate() {
        delay += s.gap;
        let last = k + 1 == steps.len();
        events.push(TimelineEvent {
            delay,
            payment: if last { Some(s.payment.unwrap_or(last_payment)) } else { s.payment },
            revision: s.revision.map(|(major, factor)| Revision {
                kind: if major { RevisionKind::Major } else { RevisionKind::Minor },
                factor,
            }),
        });
    }
    Timeline { events }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn backward_paths_settle_replay_and_respect_kappa(
        steps in prop::collection::vec(step(), 1..12),
        last_payment in 1.0..50_000.0_f64,
        kappa in 0.3..1.0_f64,
    ) {
        let tl = timeline(&steps, last_payment);
        let payments: Vec<(f64, f64)> = tl.events.iter().filter_map(|e| e.payment.map(|p| (e.delay, p))).collect();
        let claim = claim_from_payments(1, 0.5, 0.75, &payments).unwrap();
        let path = consolidate_backward(&claim, &tl, kappa).unwrap();
        prop_assert_eq!(path.events.len(), tl.events.len());

        let total: f64 = payments.iter().map(|p| p.1).sum();
        let last = path.final_event().unwrap();
        assert_relative_eq!(last.incurred, total, max_relative = 1e-12);
        assert_relative_eq!(last.cum_paid, total, max_relative = 1e-12);

        for (k, e) in path.events.iter().enumerate() {
            prop_assert!(e.incurred > 0.0);
            prop_assert!((e.time - 0.75 - e.delay).abs() < 1e-12);
            if let Some(m) = e.multiplier {
                prop_assert!(m > 0.0 && m.is_finite());
            }
            if k > 0 {
                let prev = &path.events[k - 1];
                prop_assert!(kappa * prev.incurred >= prev.cum_paid, "event {}", k);
            }
        }

        let replay = forward_replay(&path.events, &|_| 1.0, f64::INFINITY);
        for (e, r) in path.events.iter().zip(&replay) {
            assert_relative_eq!(e.incurred, *r, max_relative = 1e-9);
        }
    }
}

#[derive(Debug, Clone)]
struct RawClaim {
    period: u32,
    offset: u32,
    txns: Vec<(u32, u32, u32)>,
}

const PERIODS: u32 = 8;

/// Claims on a quarter-period grid, so that transactions land on period ends
/// as well as inside periods and beyond the development limit. Amounts are
/// whole units to keep every sum exact.
fn raw_claim() -> impl Strategy<Value = RawClaim> {
    (1..=PERIODS, 0..4_u32, prop::collection::vec((1..12_u32, 0..5000_u32, 1..8000_u32), 1..6))
        .prop_map(|(period, offset, txns)| RawClaim { period, offset, txns })
}

fn dataset(raw: &[RawClaim]) -> Dataset {
    let mut data = Dataset::default();
    for (n, r) in raw.iter().enumerate() {
        let claim_no = n as u64 + 1;
        let occurred = (r.period - 1) as f64 + 0.25 * (r.offset + 1) as f64;
        let (mut t, mut paid) = (occurred, 0.0);
        for (k, (gap, payment, incurred)) in r.txns.iter().enumerate() {
            t += 0.25 * *gap as f64;
            paid += *payment as f64;
            let incurred = paid + *incurred as f64;
            data.transactions.push(Transaction {
                claim_no,
                claim_size: 0.0,
                txn_time: t,
                txn_delay: t - occurred,
                txn_type: if k == 0 { TxnType::PMa } else { TxnType::PMi },
                incurred,
                ocl: incurred - paid,
                cumpaid: paid,
                multiplier: Some(1.0),
            });
        }
        data.claims.push(ClaimSummary {
            claim_no,
            occurrence_period: r.period,
            occurrence_time: occurred,
            notification_time: occurred,
            settlement_time: t,
            claim_size: paid,
        });
    }
    data
}

fn csv_bytes(t: &casesim::triangle::Triangle) -> Vec<u8> {
    let mut out = Vec::new();
    write_triangle(&mut out, t).unwrap();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn reaggregation_matches_direct_aggregation(
        raw in prop::collection::vec(raw_claim(), 1..40),
        multiple in prop::sample::select(vec![2_u32, 4, 8]),
    ) {
        let data = dataset(&raw);
        for kind in [TriangleKind::Incurred, TriangleKind::CumulativePaid] {
            let base = aggregate(&data, kind, TriangleShape::square(PERIODS, 1)).unwrap();
            let direct = aggregate(&data, kind, TriangleShape::square(PERIODS, multiple)).unwrap();
            prop_assert_eq!(reaggregate(&base, multiple).unwrap(), direct);
        }
    }

    #[test]
    fn triangle_csv_round_trip(raw in prop::collection::vec(raw_claim(), 1..40), masked in any::<bool>()) {
        let data = dataset(&raw);
        let tri = aggregate(&data, TriangleKind::Incurred, TriangleShape::square(PERIODS, 1)).unwrap();
        let tri = if masked { tri.masked() } else { tri };
        let bytes = csv_bytes(&tri);
        let back = read_triangle(bytes.as_slice(), TriangleKind::Incurred, 1).unwrap();
        prop_assert_eq!(back.n_rows(), tri.n_rows());
        for (a, b) in tri.values.iter().flatten().zip(back.values.iter().flatten()) {
            prop_assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()));
        }
        prop_assert_eq!(csv_bytes(&back), bytes);
    }
}
