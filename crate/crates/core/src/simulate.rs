//! End-to-end per-claim simulation: paid losses, revisions and estimate paths.

use rayon::prelude::*;

use crate::claims::{claim_scope, simulate_claim, simulate_claim_counts, ClaimRecord, PaymentModel};
use crate::config::SimulationConfig;
use crate::consolidate::{apply_base_inflation, consolidate_backward, emit_transactions, EstimatePath, Transaction};
use crate::dataset::{ClaimSummary, Dataset};
use crate::error::Result;
use crate::inflation::InflationModel;
use crate::major::{sample_majors, MajorRevisionSet};
use crate::minor::{resolve_collisions, sample_minor_factors, sample_minors};
use crate::rng::derive_stream;
use crate::timeline::Timeline;

/// Money basis of emitted transactions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum View {
    ConstantDollar,
    Inflated,
}

#[derive(Debug, Clone)]
pub struct SimulatedClaim {
    pub claim: ClaimRecord,
    pub majors: MajorRevisionSet,
    pub timeline: Timeline,
    pub constant: EstimatePath,
    pub inflated: EstimatePath,
}

impl SimulatedClaim {
    pub fn path(&self, view: View) -> &EstimatePath {
        match view {
            View::ConstantDollar => &self.constant,
            View::Inflated => &self.inflated,
        }
    }

    pub fn summary(&self) -> ClaimSummary {
        ClaimSummary::from_claim(&self.claim)
    }
}

#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub claims: Vec<SimulatedClaim>,
}

impl SimulationOutput {
    pub fn transactions(&self, view: View) -> Vec<Transaction> {
        self.claims
            .iter()
            .flat_map(|c| emit_transactions(&c.claim, c.path(view)))
            .collect()
    }

    pub fn dataset(&self, view: View) -> Dataset {
        Dataset {
            claims: self.claims.iter().map(SimulatedClaim::summary).collect(),
            transactions: self.transactions(view),
        }
    }

    pub fn n_claims(&self) -> usize {
        self.claims.len()
    }
}

/// Samples revisions for a claim and consolidates both money views.
pub fn develop_claim(claim: ClaimRecord, config: &SimulationConfig, inflation: &InflationModel) -> Result<SimulatedClaim> {
    let scope = |purpose| claim_scope(claim.occurrence_period, claim.claim_id, purpose);
    let epochs = claim.payment_epochs();
    let amounts: Vec<f64> = claim.payments.iter().map(|p| p.amount).collect();

    let mut major_stream = derive_stream(config.master_seed, &scope("major"));
    let majors = sample_majors(claim.size, &epochs, &config.major, &mut major_stream);

    let mut minor_stream = derive_stream(config.master_seed, &scope("minor"));
    let minors = sample_minors(&epochs, &config.minor, &mut minor_stream);
    let mut timeline = resolve_collisions(&epochs, &amounts, &majors, &minors);
    sample_minor_factors(&mut timeline, claim.settlement_delay, &config.minor, &mut minor_stream);

    let constant = consolidate_backward(&claim, &timeline, config.kappa)?;
    let inflated = apply_base_inflation(
        &constant,
        &claim,
        inflation,
        config.kappa,
        Some(config.n_occurrence_periods),
    )?;
    Ok(SimulatedClaim {
        claim,
        majors,
        timeline,
        constant,
        inflated,
    })
}

/// Runs the full simulation on the current rayon pool. The result does not
/// depend on the number of threads.
pub fn simulate(config: &SimulationConfig, model: &dyn PaymentModel, inflation: &InflationModel) -> Result<SimulationOutput> {
    let counts = simulate_claim_counts(config);
    let mut slots = Vec::with_capacity(counts.iter().sum::<u64>() as usize);
    for (idx, n) in counts.iter().enumerate() {
        for r in 1..=*n as u32 {
            slots.push((idx as u32 + 1, r));
        }
    }
    let claims = slots
        .par_iter()
        .enumerate()
        .map(|(k, &(period, r))| {
            let mut stream = derive_stream(config.master_seed, &claim_scope(period, r, "payments"));
            let claim = simulate_claim(period, r, k as u64 + 1, model, &mut stream);
            develop_claim(claim, config, inflation)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimulationOutput { claims })
}

/// Develops externally supplied paid-loss histories.
pub fn simulate_from_claims(
    claims: Vec<ClaimRecord>,
    config: &SimulationConfig,
    inflation: &InflationModel,
) -> Result<SimulationOutput> {
    let claims = claims
        .into_par_iter()
        .map(|c| develop_claim(c, config, inflation))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimulationOutput { claims })
}

/// Runs `f` on a dedicated pool with `threads` workers (0 = one per core).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| crate::error::Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(f)
}

/// Runs [`simulate`] on a dedicated pool with `threads` workers.
pub fn simulate_with_threads(
    config: &SimulationConfig,
    model: &dyn PaymentModel,
    inflation: &InflationModel,
    threads: usize,
) -> Result<SimulationOutput> {
    with_threads(threads, || simulate(config, model, inflation))
}
