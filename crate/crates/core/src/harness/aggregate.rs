use std::collections::BTreeMap;

use super::run::{Region, ScoreTable, Variant};
use crate::error::{Error, Result};

/// Median of one (series, axis value, region, metric) group.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    /// Corruption kind, `crop`, or `<kind>@<severity>` in fgbg runs.
    pub kind: String,
    pub axis_name: &'static str,
    pub axis_value: f64,
    pub region: Option<Region>,
    pub metric: String,
    /// `None` when every cell of the group failed.
    pub median_normalized: Option<f64>,
    pub n: usize,
    pub errors: usize,
}

/// Exact sample median; the mean of the central pair for even lengths.
pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    })
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct GroupKey {
    kind: String,
    metric: String,
    severity: Option<u8>,
    axis_bits: OrderedF64,
    region: Option<Region>,
}

struct OrderedF64(f64);

impl PartialEq for OrderedF64 {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0).is_eq()
    }
}

impl Eq for OrderedF64 {}

impl PartialOrd for OrderedF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrderedF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Groups the table's records and takes the median of normalized scores.
/// Error rows are left out of the median and counted in `errors`.
pub fn aggregate_median(table: &ScoreTable) -> Result<Vec<SummaryRow>> {
    if table.records.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut groups: BTreeMap<GroupKey, (&Variant, Vec<f64>, usize)> = BTreeMap::new();
    for rec in &table.records {
        let key = GroupKey {
            kind: rec.variant.label(),
            metric: rec.metric.clone(),
            severity: rec.variant.severity(),
            axis_bits: OrderedF64(rec.variant.axis_value()),
            region: rec.variant.region(),
        };
        let entry = groups.entry(key).or_insert((&rec.variant, Vec::new(), 0));
        match rec.normalized() {
            Some(v) => entry.1.push(v),
            None => entry.2 += 1,
        }
    }
    Ok(groups
        .into_iter()
        .map(|(key, (variant, mut values, errors))| SummaryRow {
            axis_name: variant.axis_name(),
            axis_value: key.axis_bits.0,
            region: key.region,
            n: values.len(),
            median_normalized: median(&mut values),
            kind: key.kind,
            metric: key.metric,
            errors,
        })
        .collect())
}
