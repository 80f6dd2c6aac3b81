//! CSV emission and parsing for transactions, claim metadata, triangles and reports.
//!
//! Money is written in whole units and times with six decimals. `OCL` is
//! written as rounded incurred minus rounded paid so every row balances.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::chainladder::DeviationRow;
use crate::claims::{claim_from_payments, ClaimRecord};
use crate::consolidate::Transaction;
use crate::dataset::ClaimSummary;
use crate::diagnostics::RecognitionProfile;
use crate::error::{Error, Result};
use crate::timeline::TxnType;
use crate::triangle::{Triangle, TriangleKind};

pub const TRANSACTION_HEADER: [&str; 9] = [
    "claim_no",
    "claim_size",
    "txn_time",
    "txn_delay",
    "txn_type",
    "incurred",
    "OCL",
    "cumpaid",
    "multiplier",
];

pub const CLAIM_HEADER: [&str; 6] = [
    "claim_no",
    "occurrence_period",
    "occurrence_time",
    "notification_time",
    "settlement_time",
    "claim_size",
];

fn money(x: f64) -> i64 {
    x.round() as i64
}

fn fixed6(x: f64) -> String {
    format!("{x:.6}")
}

fn reparse(s: &str) -> f64 {
    s.parse().expect("formatted float parses")
}

fn csv_err(e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Csv {
            row,
            reason: format!("{other:?}"),
        },
    }
}

/// The row exactly as it reads back after emission.
pub fn quantize(t: &Transaction) -> Transaction {
    let incurred = money(t.incurred) as f64;
    let cumpaid = money(t.cumpaid) as f64;
    Transaction {
        claim_no: t.claim_no,
        claim_size: money(t.claim_size) as f64,
        txn_time: reparse(&fixed6(t.txn_time)),
        txn_delay: reparse(&fixed6(t.txn_delay)),
        txn_type: t.txn_type,
        incurred,
        ocl: incurred - cumpaid,
        cumpaid,
        multiplier: t.multiplier.map(|m| reparse(&fixed6(m))),
    }
}

fn transaction_record(t: &Transaction) -> [String; 9] {
    let incurred = money(t.incurred);
    let cumpaid = money(t.cumpaid);
    [
        t.claim_no.to_string(),
        money(t.claim_size).to_string(),
        fixed6(t.txn_time),
        fixed6(t.txn_delay),
        t.txn_type.to_string(),
        incurred.to_string(),
        (incurred - cumpaid).to_string(),
        cumpaid.to_string(),
        t.multiplier.map(fixed6).unwrap_or_default(),
    ]
}

pub fn write_transactions<W: Write>(out: W, rows: &[Transaction]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRANSACTION_HEADER).map_err(csv_err)?;
    for t in rows {
        w.write_record(transaction_record(t)).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

struct Fields<'a> {
    record: &'a csv::StringRecord,
    row: usize,
}

impl Fields<'_> {
    fn raw(&self, idx: usize, name: &str) -> Result<&str> {
        self.record.get(idx).map(str::trim).ok_or_else(|| Error::Csv {
            row: self.row,
            reason: format!("missing column `{name}`"),
        })
    }

    fn parse<T: std::str::FromStr>(&self, idx: usize, name: &str) -> Result<T> {
        let s = self.raw(idx, name)?;
        s.parse().map_err(|_| Error::Csv {
            row: self.row,
            reason: format!("cannot parse `{s}` in column `{name}`"),
        })
    }

    fn finite(&self, idx: usize, name: &str) -> Result<f64> {
        let v: f64 = self.parse(idx, name)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Csv {
                row: self.row,
                reason: format!("non-finite value in column `{name}`"),
            })
        }
    }
}

fn check_header(reader: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<()> {
    let header = reader.headers().map_err(csv_err)?;
    let found: Vec<&str> = header.iter().map(str::trim).collect();
    if found != expected {
        return Err(Error::Csv {
            row: 1,
            reason: format!("expected header {}, found {}", expected.join(","), found.join(",")),
        });
    }
    Ok(())
}

fn records<R: Read>(input: R, expected: &[&str]) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    check_header(&mut reader, expected)?;
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(csv_err)?;
        let row = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != expected.len() {
            return Err(Error::Csv {
                row,
                reason: format!("expected {} fields, found {}", expected.len(), rec.len()),
            });
        }
        out.push((row, rec));
    }
    Ok(out)
}

pub fn read_transactions<R: Read>(input: R) -> Result<Vec<Transaction>> {
    records(input, &TRANSACTION_HEADER)?
        .iter()
        .map(|(row, record)| {
            let f = Fields { record, row: *row };
            let txn_type: TxnType = f.parse(4, "txn_type")?;
            let incurred = f.finite(5, "incurred")?;
            let ocl = f.finite(6, "OCL")?;
            let cumpaid = f.finite(7, "cumpaid")?;
            if (incurred - ocl - cumpaid).abs() > 0.5 {
                return Err(Error::Csv {
                    row: *row,
                    reason: "incurred does not equal OCL + cumpaid".into(),
                });
            }
            let multiplier = match f.raw(8, "multiplier")? {
                "" => None,
                _ => Some(f.finite(8, "multiplier")?),
            };
            Ok(Transaction {
                claim_no: f.parse(0, "claim_no")?,
                claim_size: f.finite(1, "claim_size")?,
                txn_time: f.finite(2, "txn_time")?,
                txn_delay: f.finite(3, "txn_delay")?,
                txn_type,
                incurred,
                ocl,
                cumpaid,
                multiplier,
            })
        })
        .collect()
}

pub fn write_claims<W: Write>(out: W, claims: &[ClaimSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CLAIM_HEADER).map_err(csv_err)?;
    for c in claims {
        w.write_record([
            c.claim_no.to_string(),
            c.occurrence_period.to_string(),
            fixed6(c.occurrence_time),
            fixed6(c.notification_time),
            fixed6(c.settlement_time),
            money(c.claim_size).to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_claims<R: Read>(input: R) -> Result<Vec<ClaimSummary>> {
    records(input, &CLAIM_HEADER)?
        .iter()
        .map(|(row, record)| {
            let f = Fields { record, row: *row };
            let occurrence_period: u32 = f.parse(1, "occurrence_period")?;
            if occurrence_period == 0 {
                return Err(Error::Csv {
                    row: *row,
                    reason: "occurrence_period must be >= 1".into(),
                });
            }
            Ok(ClaimSummary {
                claim_no: f.parse(0, "claim_no")?,
                occurrence_period,
                occurrence_time: f.finite(2, "occurrence_time")?,
                notification_time: f.finite(3, "notification_time")?,
                settlement_time: f.finite(4, "settlement_time")?,
                claim_size: f.finite(5, "claim_size")?,
            })
        })
        .collect()
}

/// Rebuilds paid-loss histories from payment rows of a transaction file.
///
/// Occurrence times come from `claims` when given; otherwise a claim is taken
/// to occur just before its notification.
pub fn payment_histories(rows: &[Transaction], claims: Option<&[ClaimSummary]>, min_delay: f64) -> Result<Vec<ClaimRecord>> {
    let occurrence: BTreeMap<u64, f64> = claims
        .unwrap_or_default()
        .iter()
        .map(|c| (c.claim_no, c.occurrence_time))
        .collect();
    let mut grouped: BTreeMap<u64, (f64, Vec<(f64, f64)>, f64)> = BTreeMap::new();
    for t in rows {
        let entry = grouped
            .entry(t.claim_no)
            .or_insert_with(|| (t.txn_time - t.txn_delay, Vec::new(), 0.0));
        if t.txn_type.has_payment() {
            let amount = t.cumpaid - entry.2;
            entry.2 = t.cumpaid;
            entry.1.push((t.txn_delay, amount));
        }
    }
    let mut out = Vec::with_capacity(grouped.len());
    for (claim_no, (notified, payments, _)) in grouped {
        let occurred = match occurrence.get(&claim_no) {
            Some(u) => *u,
            None if claims.is_some() => {
                return Err(Error::Degenerate(format!("claim {claim_no} missing from claim file")));
            }
            None => notified - min_delay,
        };
        out.push(claim_from_payments(claim_no, occurred, notified, &payments)?);
    }
    out.sort_by_key(|c| (c.occurrence_period, c.claim_no));
    Ok(out)
}

pub fn write_triangle<W: Write>(out: W, triangle: &Triangle) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["occurrence_period".to_string()];
    header.extend((1..=triangle.n_cols()).map(|j| j.to_string()));
    w.write_record(&header).map_err(csv_err)?;
    for (i, row) in triangle.values.iter().enumerate() {
        let mut rec = vec![(i + 1).to_string()];
        rec.extend(row.iter().map(|v| if v.is_nan() { String::new() } else { v.to_string() }));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_triangle<R: Read>(input: R, kind: TriangleKind, period_multiple: u32) -> Result<Triangle> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let cols = reader.headers().map_err(csv_err)?.len().saturating_sub(1);
    let mut values = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(csv_err)?;
        let row = rec.position().map_or(0, |p| p.line() as usize);
        let f = Fields { record: &rec, row };
        let expected = values.len() + 1;
        if f.parse::<usize>(0, "occurrence_period")? != expected {
            return Err(Error::Csv {
                row,
                reason: format!("expected occurrence period {expected}"),
            });
        }
        let cells = (1..=cols)
            .map(|j| match f.raw(j, "value")? {
                "" => Ok(f64::NAN),
                _ => f.parse::<f64>(j, "value"),
            })
            .collect::<Result<Vec<f64>>>()?;
        values.push(cells);
    }
    Ok(Triangle {
        kind,
        period_multiple,
        values,
    })
}

pub fn write_deviation_report<W: Write>(out: W, rows: &[DeviationRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["occurrence_periods", "target", "estimate", "deviation_pct"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.label.clone(),
            money(r.target).to_string(),
            money(r.estimate).to_string(),
            if r.deviation_pct.is_nan() {
                String::new()
            } else {
                format!("{:.1}", r.deviation_pct)
            },
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_profile<W: Write>(out: W, profile: &RecognitionProfile) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["occurrence_period", "proportion", "moving_average_5"])
        .map_err(csv_err)?;
    for (i, (p, s)) in profile.proportions.iter().zip(&profile.smoothed).enumerate() {
        w.write_record([(i + 1).to_string(), fixed6(*p), fixed6(*s)])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_factor_pairs<W: Write>(out: W, pairs: &[(u64, f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["claim_no", "g2", "g3"]).map_err(csv_err)?;
    for (no, g2, g3) in pairs {
        w.write_record([no.to_string(), fixed6(*g2), fixed6(*g3)])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
