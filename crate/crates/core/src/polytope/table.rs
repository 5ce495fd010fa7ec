use std::io::Read;

use super::{Inequality, QuantumBound};
use crate::{Error, Result};

/// The 26 facet classes of the four-cycle scenario: `id, sliwa_class, 26
/// coefficients, beta_l, beta_q`.
pub const BUNDLED_TABLE: &str = include_str!("../../data/table1.csv");

const COEFFS: usize = 26;
const COLUMNS: usize = COEFFS + 4;

pub fn bundled_table() -> Vec<Inequality> {
    load_table(BUNDLED_TABLE.as_bytes()).expect("bundled table parses")
}

/// Row `id` (1-based) of the bundled table.
pub fn table_row(id: u32) -> Option<Inequality> {
    bundled_table().into_iter().find(|i| i.id() == Some(id))
}

pub fn load_table<R: Read>(input: R) -> Result<Vec<Inequality>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(input);
    let mut rows = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = line + 2;
        if rec.len() != COLUMNS {
            return Err(Error::Table(format!("line {line}: expected {COLUMNS} columns, found {}", rec.len())));
        }
        let int = |i: usize| -> Result<i64> {
            rec[i]
                .parse::<i64>()
                .map_err(|e| Error::Table(format!("line {line}, column {}: {:?}: {e}", i + 1, &rec[i])))
        };
        let id = u32::try_from(int(0)?).map_err(|_| Error::Table(format!("line {line}: negative id")))?;
        let sliwa = match &rec[1] {
            "" | "-" => None,
            _ => Some(u32::try_from(int(1)?).map_err(|_| Error::Table(format!("line {line}: bad Sliwa class")))?),
        };
        let coeffs = (2..2 + COEFFS).map(int).collect::<Result<Vec<_>>>()?;
        let beta_l = int(2 + COEFFS)?;
        let beta_q = parse_printed(&rec[3 + COEFFS]).ok_or_else(|| {
            Error::Table(format!("line {line}: quantum bound {:?} is not a number", &rec[3 + COEFFS]))
        })?;
        let ineq = Inequality::new(coeffs, beta_l)
            .map_err(|_| Error::Table(format!("line {line}: all coefficients are zero")))?
            .with_id(id, sliwa)
            .with_quantum_bound(beta_q);
        rows.push(ineq);
    }
    if rows.is_empty() {
        return Err(Error::Table("no rows".into()));
    }
    Ok(rows)
}

fn parse_printed(field: &str) -> Option<QuantumBound> {
    let value: f64 = field.parse().ok()?;
    let decimals = field.split_once('.').map_or(0, |(_, frac)| frac.len() as u32);
    Some(QuantumBound { value, decimals: Some(decimals) })
}
