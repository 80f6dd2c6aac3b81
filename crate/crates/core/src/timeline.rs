//! Merged per-claim event timeline: notification, payments and revisions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Transaction type codes as they appear in the transaction CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TxnType {
    Ma,
    Mi,
    P,
    PMa,
    PMi,
}

impl TxnType {
    pub fn from_parts(payment: bool, revision: Option<RevisionKind>) -> Option<Self> {
        match (payment, revision) {
            (false, Some(RevisionKind::Major)) => Some(TxnType::Ma),
            (false, Some(RevisionKind::Minor)) => Some(TxnType::Mi),
            (true, None) => Some(TxnType::P),
            (true, Some(RevisionKind::Major)) => Some(TxnType::PMa),
            (true, Some(RevisionKind::Minor)) => Some(TxnType::PMi),
            (false, None) => None,
        }
    }

    pub fn has_payment(self) -> bool {
        matches!(self, TxnType::P | TxnType::PMa | TxnType::PMi)
    }

    pub fn revision(self) -> Option<RevisionKind> {
        match self {
            TxnType::Ma | TxnType::PMa => Some(RevisionKind::Major),
            TxnType::Mi | TxnType::PMi => Some(RevisionKind::Minor),
            TxnType::P => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TxnType::Ma => "Ma",
            TxnType::Mi => "Mi",
            TxnType::P => "P",
            TxnType::PMa => "PMa",
            TxnType::PMi => "PMi",
        }
    }
}

impl fmt::Display for TxnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TxnType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "Ma" => Ok(TxnType::Ma),
            "Mi" => Ok(TxnType::Mi),
            "P" => Ok(TxnType::P),
            "PMa" => Ok(TxnType::PMa),
            "PMi" => Ok(TxnType::PMi),
            other => Err(Error::Degenerate(format!("unknown transaction type `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RevisionKind {
    /// Factor applied to the incurred estimate.
    Major,
    /// Factor applied to the outstanding estimate.
    Minor,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Revision {
    pub kind: RevisionKind,
    pub factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimelineEvent {
    /// Delay from notification.
    pub delay: f64,
    /// Payment amount made at this epoch, if any.
    pub payment: Option<f64>,
    pub revision: Option<Revision>,
}

impl TimelineEvent {
    pub fn txn_type(&self) -> TxnType {
        TxnType::from_parts(self.payment.is_some(), self.revision.map(|r| r.kind))
            .expect("timeline events carry a payment or a revision")
    }
}

/// Chronologically ordered events of one claim, starting with the notification
/// (a major revision with factor 1) and ending with the final payment.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Timeline {
    pub events: Vec<TimelineEvent>,
}

impl Timeline {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn minor_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e.revision, Some(Revision { kind: RevisionKind::Minor, .. })))
            .count()
    }

    /// Delays of post-notification major revisions.
    pub fn major_epochs(&self) -> impl Iterator<Item = f64> + '_ {
        self.events
            .iter()
            .filter(|e| e.delay > 0.0 && matches!(e.revision, Some(Revision { kind: RevisionKind::Major, .. })))
            .map(|e| e.delay)
    }
}
