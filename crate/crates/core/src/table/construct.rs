//! Edge-building joins: similarity join and predecessor/successor join.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::str::FromStr;

use rayon::prelude::*;

use super::ops::{combine, float_bits};
use super::{Column, ColumnTable, Schema};
use crate::error::{Error, Result};

/// Distance over the listed numeric columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Sum of absolute differences.
    L1,
    /// Euclidean distance.
    L2,
}

impl Metric {
    /// Distance between `a` and `b`, accumulated in column order.
    pub fn distance(self, a: impl IntoIterator<Item = f64>, b: impl IntoIterator<Item = f64>) -> f64 {
        let terms = a.into_iter().zip(b);
        match self {
            Metric::L1 => terms.fold(0.0, |acc, (x, y)| acc + (x - y).abs()),
            Metric::L2 => terms.fold(0.0, |acc, (x, y)| acc + (x - y) * (x - y)).sqrt(),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" | "manhattan" => Ok(Metric::L1),
            "l2" | "euclidean" => Ok(Metric::L2),
            other => Err(Error::InvalidArgument(format!("unknown metric `{other}`"))),
        }
    }
}

impl ColumnTable {
    /// Pairs every left row with every right row whose distance over `cols`
    /// is strictly below `threshold`.
    ///
    /// Output rows are ordered by (left row, right row) and hold the left
    /// columns followed by the right columns.
    pub fn sim_join<A: AsRef<str>, B: AsRef<str>>(
        &self,
        right: &ColumnTable,
        cols: &[(A, B)],
        metric: Metric,
        threshold: f64,
    ) -> Result<ColumnTable> {
        if threshold.is_nan() || threshold < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "threshold must be non-negative, got {threshold}"
            )));
        }
        if cols.is_empty() {
            return Err(Error::InvalidArgument(
                "similarity join needs at least one column pair".into(),
            ));
        }
        let mut lvals = Vec::with_capacity(cols.len());
        let mut rvals = Vec::with_capacity(cols.len());
        for (l, r) in cols {
            let (l, r) = (l.as_ref(), r.as_ref());
            lvals.push(self.column(l)?.as_f64(l)?);
            rvals.push(right.column(r)?.as_f64(r)?);
        }
        let schema = Schema::concat(&self.schema, &right.schema)?;

        let pairs = if cols.len() == 1 && metric == Metric::L1 {
            sorted_l1_pairs(&lvals[0], &rvals[0], threshold)
        } else {
            let (nl, nr) = (self.num_rows(), right.num_rows());
            let (lvals, rvals) = (&lvals, &rvals);
            (0..nl)
                .into_par_iter()
                .flat_map_iter(|l| {
                    (0..nr)
                        .filter(move |&r| {
                            let d = metric.distance(lvals.iter().map(|c| c[l]), rvals.iter().map(|c| c[r]));
                            d < threshold
                        })
                        .map(move |r| (l, r))
                })
                .collect()
        };
        let (lrows, rrows): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
        Ok(combine(self, &lrows, right, &rrows, schema))
    }

    /// Joins each row with its next `k` successors within its group.
    ///
    /// Rows sharing a `group_col` value are ordered by `order_col` (ties by
    /// row id); each is paired with up to `k` following rows. Groups appear in
    /// order of first occurrence.
    pub fn next_k(&self, group_col: &str, order_col: &str, k: usize) -> Result<ColumnTable> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        let group = self.column(group_col)?;
        let order = self.column(order_col)?;
        if !order.column_type().is_numeric() {
            return Err(Error::type_mismatch(order_col, "numeric", order.column_type()));
        }
        let schema = Schema::concat(&self.schema, &self.schema)?;

        let mut slot: HashMap<u64, usize> = HashMap::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for row in 0..self.num_rows() {
            let key = match group {
                Column::Int(v) => v[row] as u64,
                Column::Float(v) => float_bits(v[row]),
                Column::Str(v) => u64::from(v[row]),
            };
            let g = *slot.entry(key).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[g].push(row);
        }

        let ids = self.row_ids();
        let cmp = |a: usize, b: usize| -> Ordering {
            let by_time = match order {
                Column::Int(v) => v[a].cmp(&v[b]),
                Column::Float(v) => v[a].total_cmp(&v[b]),
                Column::Str(_) => unreachable!(),
            };
            by_time.then(ids[a].cmp(&ids[b]))
        };
        let pairs: Vec<(usize, usize)> = groups
            .into_par_iter()
            .flat_map_iter(|mut members| {
                members.sort_by(|&a, &b| cmp(a, b));
                let mut out = Vec::new();
                for i in 0..members.len() {
                    for j in i + 1..members.len().min(i + k + 1) {
                        out.push((members[i], members[j]));
                    }
                }
                out
            })
            .collect();
        let (pred, succ): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
        Ok(combine(self, &pred, self, &succ, schema))
    }
}

/// Single-column L1 similarity pairs via a sorted probe.
///
/// `|x - y|` is monotone in `y` on either side of `x` under round-to-nearest,
/// so the matches for each `x` form one contiguous run of the sorted values.
/// Every candidate in the run is still checked with the exact predicate.
fn sorted_l1_pairs(left: &[f64], right: &[f64], threshold: f64) -> Vec<(usize, usize)> {
    let mut sorted: Vec<(f64, usize)> = right
        .iter()
        .enumerate()
        .filter(|(_, y)| !y.is_nan())
        .map(|(i, &y)| (y, i))
        .collect();
    sorted.par_sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    left.par_iter()
        .enumerate()
        .flat_map_iter(|(l, &x)| {
            let lo = sorted.partition_point(|&(y, _)| y < x && (x - y).abs() >= threshold);
            let hi = sorted.partition_point(|&(y, _)| y <= x || (x - y).abs() < threshold);
            let mut hits: Vec<usize> = sorted[lo..hi.max(lo)]
                .iter()
                .filter(|&&(y, _)| (x - y).abs() < threshold)
                .map(|&(_, r)| r)
                .collect();
            hits.sort_unstable();
            hits.into_iter().map(move |r| (l, r))
        })
        .collect()
}
