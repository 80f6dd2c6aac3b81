//! Recognition profile over occurrence periods and major-factor dependency.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::timeline::RevisionKind;
use crate::triangle::Triangle;

#[derive(Debug, Clone, PartialEq)]
pub struct RecognitionProfile {
    /// Development period at which recognition is measured.
    pub dev_period: usize,
    /// Incurred at `dev_period` over ultimate incurred, per occurrence period.
    pub proportions: Vec<f64>,
    /// Centered 5-point moving average of `proportions`.
    pub smoothed: Vec<f64>,
}

/// Centered moving average of width `width`, truncated at both ends.
pub fn moving_average(values: &[f64], width: usize) -> Vec<f64> {
    let half = width / 2;
    (0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(values.len());
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Recognition profile from an unmasked incurred triangle whose last column
/// holds ultimate incurred.
pub fn recognition_profile(incurred: &Triangle, dev_period: usize) -> Result<RecognitionProfile> {
    let cols = incurred.n_cols();
    if dev_period == 0 || dev_period > cols {
        return Err(Error::InvalidParameter(format!(
            "development period {dev_period} outside 1..={cols}"
        )));
    }
    let proportions: Vec<f64> = incurred
        .values
        .iter()
        .map(|row| {
            let ultimate = row[cols - 1];
            if ultimate == 0.0 {
                f64::NAN
            } else {
                row[dev_period - 1] / ultimate
            }
        })
        .collect();
    let smoothed = moving_average(&proportions, 5);
    Ok(RecognitionProfile {
        dev_period,
        proportions,
        smoothed,
    })
}

/// Multipliers of claims with exactly two post-notification major revisions.
pub fn major_factor_pairs(data: &Dataset) -> Result<Vec<(u64, f64, f64)>> {
    let mut pairs = Vec::new();
    for (claim, rows) in data.by_claim()? {
        let majors: Vec<f64> = rows
            .iter()
            .skip(1)
            .filter(|r| r.txn_type.revision() == Some(RevisionKind::Major))
            .filter_map(|r| r.multiplier)
            .collect();
        if let [g2, g3] = majors[..] {
            pairs.push((claim.claim_no, g2, g3));
        }
    }
    Ok(pairs)
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len();
    if n != ys.len() || n < 2 {
        return Err(Error::Degenerate(format!("correlation needs at least 2 pairs, got {n}")));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("correlation undefined for constant data".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Pearson correlation of second and third major factors.
pub fn major_factor_dependency(data: &Dataset) -> Result<(Vec<(u64, f64, f64)>, f64)> {
    let pairs = major_factor_pairs(data)?;
    let g2: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let g3: Vec<f64> = pairs.iter().map(|p| p.2).collect();
    let r = pearson(&g2, &g3)?;
    Ok((pairs, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangle::TriangleKind;

    #[test]
    fn moving_average_truncates_edges() {
        let m = moving_average(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 5);
        assert_eq!(m[0], 2.0);
        assert_eq!(m[1], 2.5);
        assert_eq!(m[2], 3.0);
        assert_eq!(m[5], 5.0);
    }

    #[test]
    fn fully_recognized_row_has_proportion_one() {
        let t = Triangle {
            kind: TriangleKind::Incurred,
            period_multiple: 1,
            values: vec![vec![50.0, 50.0, 50.0], vec![10.0, 30.0, 40.0]],
        };
        let p = recognition_profile(&t, 2).unwrap();
        assert_eq!(p.proportions, vec![1.0, 0.75]);
        assert!(recognition_profile(&t, 4).is_err());
    }

    #[test]
    fn pearson_known_values() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!(pearson(&[1.0], &[1.0]).is_err());
        assert!(pearson(&[6.0, 6.0, 6.0], &[1.0, 2.0, 3.0]).is_err());
    }
}
