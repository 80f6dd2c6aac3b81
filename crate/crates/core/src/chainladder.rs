//! Chain-ladder forecast and deviation report against simulated outcomes.

use crate::error::{Error, Result};
use crate::triangle::Triangle;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainLadderResult {
    /// Volume-weighted factors from development period `j` to `j + 1`.
    pub factors: Vec<f64>,
    pub ultimates: Vec<f64>,
    /// Cumulative paid at the latest observed period of each row.
    pub paid_to_date: Vec<f64>,
    pub reserves: Vec<f64>,
}

impl ChainLadderResult {
    pub fn total_reserve(&self) -> f64 {
        self.reserves.iter().sum()
    }
}

fn latest(row: &[f64]) -> Option<(usize, f64)> {
    row.iter()
        .enumerate()
        .take_while(|(_, v)| !v.is_nan())
        .last()
        .map(|(j, v)| (j, *v))
}

/// Projects the incurred triangle to ultimate. Unobserved cells are NaN
/// (see [`Triangle::masked`]); a row's latest value is its last non-NaN cell.
pub fn chain_ladder(incurred: &Triangle, paid: &Triangle) -> Result<ChainLadderResult> {
    let rows = incurred.n_rows();
    let cols = incurred.n_cols();
    if paid.n_rows() != rows || paid.n_cols() != cols {
        return Err(Error::InvalidParameter("paid and incurred triangles differ in shape".into()));
    }
    if rows == 0 || cols == 0 {
        return Err(Error::Degenerate("empty triangle".into()));
    }

    let mut factors = Vec::with_capacity(cols.saturating_sub(1));
    for j in 0..cols - 1 {
        let (mut num, mut den, mut pairs) = (0.0, 0.0, 0usize);
        for row in &incurred.values {
            if !row[j].is_nan() && !row[j + 1].is_nan() {
                num += row[j + 1];
                den += row[j];
                pairs += 1;
            }
        }
        let f = if pairs == 0 {
            1.0
        } else if den == 0.0 {
            return Err(Error::Degenerate(format!(
                "development column {} sums to zero over observed rows",
                j + 1
            )));
        } else {
            num / den
        };
        factors.push(f);
    }

    let mut ultimates = Vec::with_capacity(rows);
    let mut paid_to_date = Vec::with_capacity(rows);
    for (i, row) in incurred.values.iter().enumerate() {
        let (j, value) =
            latest(row).ok_or_else(|| Error::Degenerate(format!("occurrence row {} has no observations", i + 1)))?;
        let tail: f64 = factors[j..].iter().product();
        ultimates.push(value * tail);
        let paid_row = &paid.values[i];
        if paid_row[j].is_nan() {
            return Err(Error::Degenerate(format!("paid row {} shorter than incurred", i + 1)));
        }
        paid_to_date.push(paid_row[j]);
    }
    let reserves = ultimates.iter().zip(&paid_to_date).map(|(u, c)| u - c).collect();
    Ok(ChainLadderResult {
        factors,
        ultimates,
        paid_to_date,
        reserves,
    })
}

/// Contiguous range of occurrence periods reported on one line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Band {
    pub first: u32,
    pub last: u32,
}

impl Band {
    pub fn label(&self) -> String {
        if self.first == self.last {
            self.first.to_string()
        } else {
            format!("{}-{}", self.first, self.last)
        }
    }
}

/// The last ten periods singly, the ten before in fives, earlier ones in tens.
pub fn default_bands(periods: u32) -> Vec<Band> {
    let single_from = periods.saturating_sub(9).max(1);
    let five_from = periods.saturating_sub(19).max(1);
    let mut bands = Vec::new();
    let chunk = |from: u32, to: u32, width: u32, bands: &mut Vec<Band>| {
        let mut a = from;
        while a <= to {
            let b = (a + width - 1).min(to);
            bands.push(Band { first: a, last: b });
            a = b + 1;
        }
    };
    chunk(1, five_from - 1, 10, &mut bands);
    chunk(five_from, single_from - 1, 5, &mut bands);
    chunk(single_from, periods, 1, &mut bands);
    bands
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationRow {
    /// Band label, or `Total`.
    pub label: String,
    pub target: f64,
    pub estimate: f64,
    /// `100 * (estimate / target - 1)`; NaN for a zero target.
    pub deviation_pct: f64,
}

fn deviation_row(label: String, target: f64, estimate: f64) -> DeviationRow {
    let deviation_pct = if target == 0.0 {
        f64::NAN
    } else {
        100.0 * (estimate / target - 1.0)
    };
    DeviationRow {
        label,
        target,
        estimate,
        deviation_pct,
    }
}

/// Compares estimated reserves against actual outstanding payments band by band.
pub fn deviation_report(estimate: &[f64], target: &[f64], bands: &[Band]) -> Result<Vec<DeviationRow>> {
    if estimate.len() != target.len() {
        return Err(Error::InvalidParameter("estimate and target lengths differ".into()));
    }
    let mut rows = Vec::with_capacity(bands.len() + 1);
    for band in bands {
        if band.first == 0 || band.last < band.first || band.last as usize > target.len() {
            return Err(Error::InvalidParameter(format!("band {} out of range", band.label())));
        }
        let range = band.first as usize - 1..band.last as usize;
        rows.push(deviation_row(
            band.label(),
            target[range.clone()].iter().sum(),
            estimate[range].iter().sum(),
        ));
    }
    rows.push(deviation_row(
        "Total".into(),
        target.iter().sum(),
        estimate.iter().sum(),
    ));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangle::TriangleKind;

    fn tri(kind: TriangleKind, values: Vec<Vec<f64>>) -> Triangle {
        Triangle {
            kind,
            period_multiple: 1,
            values,
        }
    }

    #[test]
    fn single_factor_textbook_case() {
        let nan = f64::NAN;
        let inc = tri(TriangleKind::Incurred, vec![vec![100.0, 150.0], vec![120.0, nan]]);
        let paid = tri(TriangleKind::CumulativePaid, vec![vec![50.0, 150.0], vec![40.0, nan]]);
        let r = chain_ladder(&inc, &paid).unwrap();
        assert_eq!(r.factors, vec![1.5]);
        assert_eq!(r.ultimates, vec![150.0, 180.0]);
        assert_eq!(r.reserves, vec![0.0, 140.0]);
    }

    #[test]
    fn fully_developed_square_needs_no_projection() {
        let inc = tri(TriangleKind::Incurred, vec![vec![10.0, 12.0], vec![20.0, 25.0]]);
        let paid = tri(TriangleKind::CumulativePaid, vec![vec![5.0, 12.0], vec![6.0, 19.0]]);
        let r = chain_ladder(&inc, &paid).unwrap();
        assert_eq!(r.reserves, vec![0.0, 6.0]);
    }

    #[test]
    fn zero_column_is_degenerate() {
        let nan = f64::NAN;
        let inc = tri(TriangleKind::Incurred, vec![vec![0.0, 5.0], vec![0.0, nan]]);
        let paid = inc.clone();
        assert!(matches!(chain_ladder(&inc, &paid), Err(Error::Degenerate(_))));
    }

    #[test]
    fn bands_for_forty_periods() {
        let labels: Vec<String> = default_bands(40).iter().map(Band::label).collect();
        let mut expected = vec!["1-10", "11-20", "21-25", "26-30"]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>();
        expected.extend((31..=40).map(|i| i.to_string()));
        assert_eq!(labels, expected);
        assert_eq!(default_bands(3).len(), 3);
    }

    #[test]
    fn deviation_percentages() {
        let bands = vec![Band { first: 1, last: 2 }, Band { first: 3, last: 3 }];
        let r = deviation_report(&[10.0, 20.0, 0.0], &[10.0, 10.0, 0.0], &bands).unwrap();
        assert!((r[0].deviation_pct - 50.0).abs() < 1e-12);
        assert!(r[1].deviation_pct.is_nan());
        assert_eq!(r[2].label, "Total");
        assert_eq!(r[2].target, 20.0);
    }
}
