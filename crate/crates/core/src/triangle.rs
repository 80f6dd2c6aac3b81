//! Occurrence × development triangles of cumulative paid and incurred loss.

use std::fmt;
use std::str::FromStr;

use crate::dataset::{payment_increments, Dataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleKind {
    CumulativePaid,
    Incurred,
}

impl TriangleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TriangleKind::CumulativePaid => "paid",
            TriangleKind::Incurred => "incurred",
        }
    }
}

impl fmt::Display for TriangleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TriangleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paid" | "cumulative_paid" => Ok(TriangleKind::CumulativePaid),
            "incurred" | "incurred_estimate" => Ok(TriangleKind::Incurred),
            other => Err(Error::InvalidParameter(format!(
                "unknown triangle kind `{other}` (expected paid or incurred)"
            ))),
        }
    }
}

/// Row `i`, column `j` (both 0-based here) holds the value for occurrence
/// period `i + 1` at the end of development period `j + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangle {
    pub kind: TriangleKind,
    /// Length of one triangle period in simulation periods.
    pub period_multiple: u32,
    pub values: Vec<Vec<f64>>,
}

impl Triangle {
    pub fn n_rows(&self) -> usize {
        self.values.len()
    }

    pub fn n_cols(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    /// Whether cell `(i, j)` (0-based) is known at the end of the last occurrence period.
    pub fn is_observed(&self, i: usize, j: usize) -> bool {
        i + j < self.n_rows()
    }

    /// Copy with unobserved cells set to NaN.
    pub fn masked(&self) -> Triangle {
        let mut out = self.clone();
        for (i, row) in out.values.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                if i + j >= self.values.len() {
                    *v = f64::NAN;
                }
            }
        }
        out
    }

    /// Latest observed column of row `i`.
    pub fn diagonal_index(&self, i: usize) -> usize {
        (self.n_rows() - 1 - i).min(self.n_cols() - 1)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows())
            .map(|i| self.values[i][self.diagonal_index(i)])
            .collect()
    }
}

/// Shape of a triangle in simulation periods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangleShape {
    /// Number of occurrence periods `I`.
    pub occurrence_periods: u32,
    /// Development limit `J`; later transactions count at the end of period `J`.
    pub development_periods: u32,
    pub period_multiple: u32,
}

impl TriangleShape {
    pub fn square(periods: u32, period_multiple: u32) -> Self {
        Self {
            occurrence_periods: periods,
            development_periods: periods,
            period_multiple,
        }
    }

    fn check(&self) -> Result<(usize, usize)> {
        let p = self.period_multiple;
        if p == 0 {
            return Err(Error::InvalidParameter("period multiple must be >= 1".into()));
        }
        if self.occurrence_periods % p != 0 || self.development_periods % p != 0 {
            return Err(Error::InvalidParameter(format!(
                "period multiple {p} does not divide {} occurrence / {} development periods",
                self.occurrence_periods, self.development_periods
            )));
        }
        Ok(((self.occurrence_periods / p) as usize, (self.development_periods / p) as usize))
    }
}

/// 1-based development period of calendar time `t` for a row starting at `start`,
/// clamped to `1..=limit`.
pub fn development_period(t: f64, start: f64, period_length: f64, limit: usize) -> usize {
    let d = ((t - start) / period_length).ceil();
    (d.max(1.0) as usize).min(limit)
}

/// Aggregates a dataset into a triangle.
///
/// Incurred cells hold the latest estimate at or before each period end, zero
/// before notification. Paid cells are cumulative.
pub fn aggregate(data: &Dataset, kind: TriangleKind, shape: TriangleShape) -> Result<Triangle> {
    let (rows, cols) = shape.check()?;
    let p = shape.period_multiple as f64;
    let mut values = vec![vec![0.0; cols]; rows];
    let mut contribution = vec![0.0; cols];
    for (claim, txns) in data.by_claim()? {
        let i = claim.occurrence_period;
        if i == 0 || i > shape.occurrence_periods {
            return Err(Error::Degenerate(format!(
                "claim {} has occurrence period {i} outside 1..={}",
                claim.claim_no, shape.occurrence_periods
            )));
        }
        let k = ((i - 1) / shape.period_multiple) as usize;
        let start = k as f64 * p;
        contribution.iter_mut().for_each(|c| *c = 0.0);
        match kind {
            TriangleKind::Incurred => {
                let mut set = vec![false; cols];
                for t in txns {
                    let d = development_period(t.txn_time, start, p, cols);
                    contribution[d - 1] = t.incurred;
                    set[d - 1] = true;
                }
                let mut last = 0.0;
                for (c, s) in contribution.iter_mut().zip(&set) {
                    if *s {
                        last = *c;
                    }
                    *c = last;
                }
            }
            TriangleKind::CumulativePaid => {
                for (t, paid) in payment_increments(txns) {
                    let d = development_period(t, start, p, cols);
                    contribution[d - 1] += paid;
                }
                let mut acc = 0.0;
                for c in contribution.iter_mut() {
                    acc += *c;
                    *c = acc;
                }
            }
        }
        for (cell, c) in values[k].iter_mut().zip(&contribution) {
            *cell += c;
        }
    }
    Ok(Triangle {
        kind,
        period_multiple: shape.period_multiple,
        values,
    })
}

/// Re-aggregates a triangle built on single simulation periods into one with
/// periods `multiple` times as long.
///
/// Cell `(K, D)` sums `Q(i, (K-1)p + Dp - i + 1)` over the periods `i` of `K`;
/// the last column takes each period's last column, which already holds
/// everything beyond the development limit.
pub fn reaggregate(base: &Triangle, multiple: u32) -> Result<Triangle> {
    if base.period_multiple != 1 {
        return Err(Error::InvalidParameter("re-aggregation needs a single-period triangle".into()));
    }
    let shape = TriangleShape {
        occurrence_periods: base.n_rows() as u32,
        development_periods: base.n_cols() as u32,
        period_multiple: multiple,
    };
    let (rows, cols) = shape.check()?;
    let p = multiple as usize;
    let mut values = vec![vec![0.0; cols]; rows];
    for (k, row) in values.iter_mut().enumerate() {
        for (d, cell) in row.iter_mut().enumerate() {
            let end = k * p + (d + 1) * p;
            *cell = (k * p..(k + 1) * p)
                .map(|i| {
                    let j = if d + 1 == cols { base.n_cols() } else { (end - i).min(base.n_cols()) };
                    base.values[i][j - 1]
                })
                .sum();
        }
    }
    Ok(Triangle {
        kind: base.kind,
        period_multiple: multiple,
        values,
    })
}

/// Payments per occurrence period made after calendar time `cutoff`.
pub fn actual_outstanding(data: &Dataset, cutoff: f64, occurrence_periods: u32) -> Result<Vec<f64>> {
    let mut out = vec![0.0; occurrence_periods as usize];
    for (claim, txns) in data.by_claim()? {
        let i = claim.occurrence_period;
        if i == 0 || i > occurrence_periods {
            return Err(Error::Degenerate(format!(
                "claim {} has occurrence period {i} outside 1..={occurrence_periods}",
                claim.claim_no
            )));
        }
        out[i as usize - 1] += payment_increments(txns)
            .filter(|(t, _)| *t > cutoff)
            .map(|(_, paid)| paid)
            .sum::<f64>();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consolidate::Transaction;
    use crate::dataset::ClaimSummary;
    use crate::timeline::TxnType;

    fn claim(no: u64, period: u32, notified: f64) -> ClaimSummary {
        ClaimSummary {
            claim_no: no,
            occurrence_period: period,
            occurrence_time: period as f64 - 0.5,
            notification_time: notified,
            settlement_time: 0.0,
            claim_size: 0.0,
        }
    }

    fn row(no: u64, time: f64, txn_type: TxnType, incurred: f64, cumpaid: f64) -> Transaction {
        Transaction {
            claim_no: no,
            claim_size: 0.0,
            txn_time: time,
            txn_delay: 0.0,
            txn_type,
            incurred,
            ocl: incurred - cumpaid,
            cumpaid,
            multiplier: None,
        }
    }

    #[test]
    fn development_period_boundaries() {
        assert_eq!(development_period(0.3, 0.0, 1.0, 40), 1);
        assert_eq!(development_period(1.0, 0.0, 1.0, 40), 1);
        assert_eq!(development_period(1.0001, 0.0, 1.0, 40), 2);
        assert_eq!(development_period(55.0, 0.0, 1.0, 40), 40);
        assert_eq!(development_period(7.5, 4.0, 4.0, 10), 1);
    }

    #[test]
    fn single_payment_accumulates() {
        let data = Dataset {
            claims: vec![claim(1, 1, 0.6)],
            transactions: vec![
                row(1, 0.6, TxnType::Ma, 100.0, 0.0),
                row(1, 1.5, TxnType::P, 100.0, 100.0),
            ],
        };
        let t = aggregate(&data, TriangleKind::CumulativePaid, TriangleShape::square(4, 1)).unwrap();
        assert_eq!(t.values[0], vec![0.0, 100.0, 100.0, 100.0]);
        assert!(t.values[1..].iter().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn unknown_kind_is_rejected() {
        assert!("reported".parse::<TriangleKind>().is_err());
        assert_eq!("paid".parse::<TriangleKind>().unwrap(), TriangleKind::CumulativePaid);
    }

    #[test]
    fn masked_cells_follow_calendar_cutoff() {
        let t = Triangle {
            kind: TriangleKind::Incurred,
            period_multiple: 1,
            values: vec![vec![1.0; 3]; 3],
        };
        let m = t.masked();
        assert!(m.values[0].iter().all(|v| !v.is_nan()));
        assert!(m.values[1][2].is_nan() && !m.values[1][1].is_nan());
        assert!(m.values[2][1].is_nan());
        assert_eq!(t.diagonal_index(2), 0);
    }

    #[test]
    fn reaggregation_needs_divisible_shape() {
        let t = Triangle {
            kind: TriangleKind::Incurred,
            period_multiple: 1,
            values: vec![vec![1.0; 6]; 6],
        };
        assert!(reaggregate(&t, 4).is_err());
        assert!(reaggregate(&t, 3).is_ok());
    }

    #[test]
    fn outstanding_after_cutoff() {
        let data = Dataset {
            claims: vec![claim(1, 2, 1.6)],
            transactions: vec![
                row(1, 1.6, TxnType::Ma, 80.0, 0.0),
                row(1, 3.0, TxnType::P, 80.0, 30.0),
                row(1, 5.0, TxnType::P, 80.0, 80.0),
            ],
        };
        assert_eq!(actual_outstanding(&data, 4.0, 3).unwrap(), vec![0.0, 50.0, 0.0]);
        assert_eq!(actual_outstanding(&data, 6.0, 3).unwrap(), vec![0.0; 3]);
    }
}
