//! Claim-level metadata paired with transaction rows, the input to every
//! post-processing step.

use std::collections::HashMap;

use crate::claims::ClaimRecord;
use crate::consolidate::Transaction;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClaimSummary {
    pub claim_no: u64,
    pub occurrence_period: u32,
    pub occurrence_time: f64,
    pub notification_time: f64,
    pub settlement_time: f64,
    pub claim_size: f64,
}

impl ClaimSummary {
    pub fn from_claim(claim: &ClaimRecord) -> Self {
        Self {
            claim_no: claim.claim_no,
            occurrence_period: claim.occurrence_period,
            occurrence_time: claim.occurrence_time,
            notification_time: claim.notification_time(),
            settlement_time: claim.settlement_time(),
            claim_size: claim.size,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub claims: Vec<ClaimSummary>,
    /// Rows grouped by claim, chronological within each claim.
    pub transactions: Vec<Transaction>,
}

impl Dataset {
    /// Pairs each claim with its transactions, in transaction order.
    ///
    /// Fails if a claim's rows are not contiguous or have no claim record.
    pub fn by_claim(&self) -> Result<Vec<(&ClaimSummary, &[Transaction])>> {
        let index: HashMap<u64, &ClaimSummary> = self.claims.iter().map(|c| (c.claim_no, c)).collect();
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::with_capacity(self.claims.len());
        for rows in self.transactions.chunk_by(|a, b| a.claim_no == b.claim_no) {
            let no = rows[0].claim_no;
            let claim = index
                .get(&no)
                .ok_or_else(|| Error::Degenerate(format!("transactions for unknown claim {no}")))?;
            if !seen.insert(no) {
                return Err(Error::Degenerate(format!("transactions of claim {no} are not contiguous")));
            }
            out.push((*claim, rows));
        }
        Ok(out)
    }

    pub fn n_occurrence_periods(&self) -> u32 {
        self.claims.iter().map(|c| c.occurrence_period).max().unwrap_or(0)
    }
}

/// Payment amounts implied by the cumulative paid column of one claim's rows.
pub fn payment_increments(rows: &[Transaction]) -> impl Iterator<Item = (f64, f64)> + '_ {
    let mut prev = 0.0;
    rows.iter().map(move |r| {
        let paid = r.cumpaid - prev;
        prev = r.cumpaid;
        (r.txn_time, paid)
    })
}
