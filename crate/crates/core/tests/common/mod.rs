#![allow(dead_code)]

use casesim::chainladder::chain_ladder;
use casesim::claims::DefaultPaymentModel;
use casesim::consolidate::{EstimatePath, PathEvent};
use casesim::dataset::Dataset;
use casesim::inflation::InflationModel;
use casesim::simulate::{simulate_with_threads, SimulatedClaim, SimulationOutput};
use casesim::timeline::RevisionKind;
use casesim::triangle::{actual_outstanding, aggregate, TriangleKind, TriangleShape};
use casesim::{Preset, SimulationConfig};

pub fn config(seed: u64, preset: Preset) -> SimulationConfig {
    SimulationConfig::default()
        .with_seed(seed)
        .with_preset(preset)
        .expect("reference config is valid")
}

pub fn run(config: &SimulationConfig, threads: usize) -> SimulationOutput {
    let model = DefaultPaymentModel::new(config);
    let inflation = InflationModel::from_config(config);
    simulate_with_threads(config, &model, &inflation, threads).expect("simulation succeeds")
}

/// Base index for a constant annual rate on a quarterly clock, computed
/// directly rather than through the library.
pub fn quarterly_index(annual: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| (1.0 + annual).powf(t / 4.0)
}

/// Replays a path forward from its initial estimate using only the recorded
/// payments and multipliers. Between revisions the estimate is held in the
/// money of the last revision; at each revision (and at settlement) it is
/// restated at the current index before the factor applies.
pub fn forward_replay(events: &[PathEvent], index: &dyn Fn(f64) -> f64, horizon: f64) -> Vec<f64> {
    let at = |e: &PathEvent| index(e.time.min(horizon));
    let mut out = Vec::with_capacity(events.len());
    let mut y = events[0].incurred;
    let mut anchor = at(&events[0]);
    let mut paid = events[0].payment;
    out.push(y);
    for (k, e) in events.iter().enumerate().skip(1) {
        let last = k + 1 == events.len();
        let revision = e.txn_type.revision();
        if revision.is_some() || last {
            let now = at(e);
            let y_pre = y * now / anchor;
            y = match revision {
                Some(RevisionKind::Major) => y_pre * e.multiplier.expect("multiplier"),
                Some(RevisionKind::Minor) => paid + (y_pre - paid) * e.multiplier.expect("multiplier"),
                None => y_pre,
            };
            anchor = now;
        }
        paid += e.payment;
        out.push(y);
    }
    out
}

pub fn max_replay_error(path: &EstimatePath, index: &dyn Fn(f64) -> f64, horizon: f64) -> f64 {
    let replay = forward_replay(&path.events, index, horizon);
    path.events
        .iter()
        .zip(&replay)
        .map(|(e, r)| ((e.incurred - r) / e.incurred).abs())
        .fold(0.0, f64::max)
}

pub fn horizon(claim: &SimulatedClaim, config: &SimulationConfig) -> f64 {
    claim.claim.occurrence_period as f64 - 1.0 + config.n_occurrence_periods as f64
}

/// Total chain-ladder reserve deviation in percent against simulated future payments.
pub fn total_deviation(data: &Dataset, periods: u32) -> f64 {
    let shape = TriangleShape::square(periods, 1);
    let incurred = aggregate(data, TriangleKind::Incurred, shape).unwrap().masked();
    let paid = aggregate(data, TriangleKind::CumulativePaid, shape).unwrap().masked();
    let cl = chain_ladder(&incurred, &paid).unwrap();
    let target: f64 = actual_outstanding(data, periods as f64, periods).unwrap().iter().sum();
    100.0 * (cl.total_reserve() / target - 1.0)
}

/// Mean of a sample and its standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}
