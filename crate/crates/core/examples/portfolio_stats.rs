//! Prints summary statistics of simulated portfolios over several seeds.
//!
//! Usage: `cargo run --release --example portfolio_stats -- [seeds] [preset] [config.toml]`

use casesim::chainladder::chain_ladder;
use casesim::claims::DefaultPaymentModel;
use casesim::diagnostics::{major_factor_dependency, recognition_profile};
use casesim::inflation::InflationModel;
use casesim::simulate::{simulate, View};
use casesim::triangle::{actual_outstanding, aggregate, TriangleKind, TriangleShape};
use casesim::{Preset, SimulationConfig};

fn main() -> casesim::Result<()> {
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().map_or(5, |s| s.parse().expect("seed count"));
    let preset: Preset = args.next().map_or(Ok(Preset::DefaultHeterogeneous), |s| s.parse())?;
    let base = match args.next() {
        Some(path) => SimulationConfig::load(std::path::Path::new(&path))?,
        None => SimulationConfig::default(),
    };
    for seed in 1..=seeds {
        let config = base.clone().with_seed(seed).with_preset(preset)?;
        let model = DefaultPaymentModel::new(&config);
        let out = simulate(&config, &model, &InflationModel::from_config(&config))?;
        let n = config.n_occurrence_periods;
        let shape = TriangleShape::square(n, 1);

        let constant = out.dataset(View::ConstantDollar);
        let (pairs, r) = major_factor_dependency(&constant)?;

        let data = out.dataset(View::Inflated);
        let incurred = aggregate(&data, TriangleKind::Incurred, shape)?;
        let profile = recognition_profile(&incurred, 10)?;
        let head: f64 = profile.smoothed[..5].iter().sum::<f64>() / 5.0;
        let tail: f64 = profile.smoothed[profile.smoothed.len() - 5..].iter().sum::<f64>() / 5.0;

        let paid = aggregate(&data, TriangleKind::CumulativePaid, shape)?;
        let cl = chain_ladder(&incurred.masked(), &paid.masked())?;
        let target: f64 = actual_outstanding(&data, n as f64, n)?.iter().sum();
        let dev = 100.0 * (cl.total_reserve() / target - 1.0);
        println!(
            "seed {seed}: claims {} pairs {} corr {r:.3} recog {head:.3} -> {tail:.3} reserve {:.0} target {target:.0} dev {dev:+.1}%",
            out.n_claims(),
            pairs.len(),
            cl.total_reserve(),
        );
    }
    Ok(())
}
