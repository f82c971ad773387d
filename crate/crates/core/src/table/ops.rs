//! Relational operators: select, project, join, group/aggregate, order and
//! multiset operations.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use super::{merge_pools, remap, Column, ColumnTable, ColumnType, Predicate, Schema, StringPool, Value};
use crate::containers::IdHashMap;
use crate::error::{Error, Result};

/// Float bits with `-0.0` folded onto `0.0` and every NaN onto one pattern.
#[inline]
pub(crate) fn float_bits(x: f64) -> u64 {
    if x == 0.0 {
        0
    } else if x.is_nan() {
        f64::NAN.to_bits()
    } else {
        x.to_bits()
    }
}

/// Hashable stand-in for a cell, valid only within one table (string codes
/// are compared, not decoded strings).
#[inline]
fn key_part(column: &Column, row: usize) -> u64 {
    match column {
        Column::Int(v) => v[row] as u64,
        Column::Float(v) => float_bits(v[row]),
        Column::Str(v) => u64::from(v[row]),
    }
}

/// Rank of every pool code under byte-wise string order.
fn string_ranks(pool: &StringPool) -> Vec<u32> {
    let mut codes: Vec<u32> = (0..pool.len() as u32).collect();
    codes.par_sort_unstable_by(|&a, &b| pool.get(a).cmp(pool.get(b)));
    let mut ranks = vec![0u32; codes.len()];
    for (rank, &code) in codes.iter().enumerate() {
        ranks[code as usize] = rank as u32;
    }
    ranks
}

fn fresh(schema: Schema, columns: Vec<Column>, pool: Arc<StringPool>) -> ColumnTable {
    ColumnTable::assemble(schema, columns, None, pool).expect("operator produced an inconsistent table")
}

fn filter_rows(rows: usize, keep: impl Fn(usize) -> bool + Sync) -> Vec<usize> {
    (0..rows).into_par_iter().filter(|&i| keep(i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersection,
    Difference,
}

impl FromStr for SetOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "union" => Ok(SetOp::Union),
            "intersection" | "intersect" => Ok(SetOp::Intersection),
            "difference" | "minus" | "except" => Ok(SetOp::Difference),
            other => Err(Error::InvalidArgument(format!("unknown set operation `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggFn {
    Count,
    Sum,
    Min,
    Max,
    Mean,
}

impl fmt::Display for AggFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AggFn::Count => "count",
            AggFn::Sum => "sum",
            AggFn::Min => "min",
            AggFn::Max => "max",
            AggFn::Mean => "mean",
        })
    }
}

impl FromStr for AggFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "count" => Ok(AggFn::Count),
            "sum" => Ok(AggFn::Sum),
            "min" => Ok(AggFn::Min),
            "max" => Ok(AggFn::Max),
            "mean" | "avg" => Ok(AggFn::Mean),
            other => Err(Error::InvalidArgument(format!("unknown aggregate `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aggregate {
    pub func: AggFn,
    pub column: String,
}

impl Aggregate {
    pub fn new(func: AggFn, column: impl Into<String>) -> Self {
        Aggregate {
            func,
            column: column.into(),
        }
    }

    /// Output column name, e.g. `sum_Score`.
    pub fn output_name(&self) -> String {
        format!("{}_{}", self.func, self.column)
    }
}

impl FromStr for Aggregate {
    type Err = Error;

    /// Parses `sum(col)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (func, rest) = s
            .split_once('(')
            .ok_or_else(|| Error::InvalidArgument(format!("expected fn(column), found `{s}`")))?;
        let column = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::InvalidArgument(format!("expected fn(column), found `{s}`")))?;
        Ok(Aggregate::new(func.trim().parse()?, column.trim()))
    }
}

impl ColumnTable {
    fn matching_rows(&self, pred: &Predicate) -> Result<Vec<usize>> {
        let index = self.schema.index_of(&pred.column)?;
        let op = pred.op;
        let n = self.num_rows();
        let float_test = |v: &[f64], c: f64| {
            filter_rows(n, |i| {
                v[i].partial_cmp(&c).map_or(op == super::CmpOp::Ne, |o| op.holds(o))
            })
        };
        Ok(match (&self.columns[index], &pred.value) {
            (Column::Int(v), Value::Int(c)) => filter_rows(n, |i| op.holds(v[i].cmp(c))),
            (Column::Float(v), Value::Float(c)) => float_test(v, *c),
            (Column::Float(v), Value::Int(c)) => float_test(v, *c as f64),
            (Column::Str(v), Value::Str(c)) => {
                let verdict: Vec<bool> = (0..self.pool.len() as u32)
                    .map(|code| op.holds(self.pool.get(code).cmp(c.as_str())))
                    .collect();
                filter_rows(n, |i| verdict[v[i] as usize])
            }
            (column, value) => {
                return Err(Error::type_mismatch(
                    &pred.column,
                    format!("a {} constant", column.column_type()),
                    value.value_type(),
                ))
            }
        })
    }

    /// Rows satisfying `pred`, in their original order and with their ids.
    pub fn select(&self, pred: &Predicate) -> Result<ColumnTable> {
        let rows = self.matching_rows(pred)?;
        Ok(self.gather(&rows))
    }

    /// Like [`select`](Self::select) but drops non-matching rows from `self`.
    pub fn select_in_place(&mut self, pred: &Predicate) -> Result<()> {
        let rows = self.matching_rows(pred)?;
        if rows.len() == self.num_rows() {
            return Ok(());
        }
        self.columns.par_iter_mut().for_each(|c| c.compact(&rows));
        for (dst, &src) in rows.iter().enumerate() {
            self.row_ids[dst] = self.row_ids[src];
        }
        self.row_ids.truncate(rows.len());
        Ok(())
    }

    pub fn project<S: AsRef<str>>(&self, names: &[S]) -> Result<ColumnTable> {
        let indices = names
            .iter()
            .map(|n| self.schema.index_of(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let schema = Schema::new(
            indices
                .iter()
                .map(|&i| (self.schema.name(i), self.schema.column_type(i))),
        )?;
        Ok(ColumnTable {
            schema,
            columns: indices.iter().map(|&i| self.columns[i].clone()).collect(),
            row_ids: self.row_ids.clone(),
            pool: Arc::clone(&self.pool),
        })
    }

    /// Equi-join on `left_col = right_col`.
    ///
    /// Hash join that builds on the smaller input. Output rows are ordered by
    /// (left row, right row); columns are left then right, with shared names
    /// suffixed `-1`/`-2`. Row ids are fresh.
    pub fn join(&self, right: &ColumnTable, left_col: &str, right_col: &str) -> Result<ColumnTable> {
        let li = self.schema.index_of(left_col)?;
        let ri = right.schema.index_of(right_col)?;
        let (lkeys, rkeys) = join_keys(self, li, right, ri, right_col)?;
        let schema = Schema::concat(&self.schema, &right.schema)?;

        let build_left = lkeys.len() <= rkeys.len();
        let (build, probe) = if build_left { (&lkeys, &rkeys) } else { (&rkeys, &lkeys) };

        const NONE: usize = usize::MAX;
        let mut heads: IdHashMap<u64, usize> = IdHashMap::default();
        heads.reserve(build.len());
        let mut next = vec![NONE; build.len()];
        for (i, key) in build.iter().enumerate().rev() {
            if let Some(k) = *key {
                if let Some(prev) = heads.insert(k, i) {
                    next[i] = prev;
                }
            }
        }
        let mut pairs: Vec<(usize, usize)> = (0..probe.len())
            .into_par_iter()
            .flat_map_iter(|p| {
                let mut cursor = probe[p].and_then(|k| heads.get(&k).copied()).unwrap_or(NONE);
                let next = &next;
                std::iter::from_fn(move || {
                    (cursor != NONE).then(|| {
                        let b = cursor;
                        cursor = next[b];
                        (p, b)
                    })
                })
            })
            .collect();
        if build_left {
            pairs.par_iter_mut().for_each(|pair| *pair = (pair.1, pair.0));
            pairs.par_sort_unstable();
        }
        let (lrows, rrows): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
        Ok(combine(self, &lrows, right, &rrows, schema))
    }

    /// One output row per distinct group key, in order of first appearance.
    pub fn group_aggregate<S: AsRef<str>>(&self, group_cols: &[S], aggs: &[Aggregate]) -> Result<ColumnTable> {
        let gidx = group_cols
            .iter()
            .map(|n| self.schema.index_of(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let aidx = aggs
            .iter()
            .map(|a| {
                let i = self.schema.index_of(&a.column)?;
                let ty = self.schema.column_type(i);
                if matches!(a.func, AggFn::Sum | AggFn::Mean) && !ty.is_numeric() {
                    return Err(Error::type_mismatch(
                        &a.column,
                        format!("numeric column for {}", a.func),
                        ty,
                    ));
                }
                Ok(i)
            })
            .collect::<Result<Vec<_>>>()?;

        let mut out_schema: Vec<(String, ColumnType)> = gidx
            .iter()
            .map(|&i| (self.schema.name(i).to_string(), self.schema.column_type(i)))
            .collect();
        for (agg, &i) in aggs.iter().zip(&aidx) {
            let ty = match agg.func {
                AggFn::Count => ColumnType::Int,
                AggFn::Mean => ColumnType::Float,
                AggFn::Sum | AggFn::Min | AggFn::Max => self.schema.column_type(i),
            };
            out_schema.push((agg.output_name(), ty));
        }
        let out_schema = Schema::new(out_schema)?;

        let n = self.num_rows();
        let mut group_of = vec![0usize; n];
        let mut first_rows = Vec::new();
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut key = Vec::with_capacity(gidx.len());
        for (row, slot) in group_of.iter_mut().enumerate() {
            key.clear();
            key.extend(gidx.iter().map(|&c| key_part(&self.columns[c], row)));
            *slot = match index.get(&key) {
                Some(&g) => g,
                None => {
                    let g = first_rows.len();
                    index.insert(key.clone(), g);
                    first_rows.push(row);
                    g
                }
            };
        }
        let groups = first_rows.len();

        let mut columns: Vec<Column> = gidx.iter().map(|&c| self.columns[c].gather(&first_rows)).collect();
        let mut counts = vec![0i64; groups];
        for &g in &group_of {
            counts[g] += 1;
        }
        let ranks = aggs
            .iter()
            .zip(&aidx)
            .any(|(a, &i)| matches!(a.func, AggFn::Min | AggFn::Max) && self.schema.column_type(i) == ColumnType::Str)
            .then(|| string_ranks(&self.pool));

        for (agg, &ci) in aggs.iter().zip(&aidx) {
            let column = &self.columns[ci];
            columns.push(match (agg.func, column) {
                (AggFn::Count, _) => Column::Int(counts.clone()),
                (AggFn::Sum, Column::Int(v)) => {
                    let mut acc = vec![0i64; groups];
                    for (row, &g) in group_of.iter().enumerate() {
                        acc[g] = acc[g].wrapping_add(v[row]);
                    }
                    Column::Int(acc)
                }
                (AggFn::Sum, Column::Float(v)) => {
                    let mut acc = vec![0f64; groups];
                    for (row, &g) in group_of.iter().enumerate() {
                        acc[g] += v[row];
                    }
                    Column::Float(acc)
                }
                (AggFn::Mean, Column::Int(v)) => {
                    let mut acc = vec![0i128; groups];
                    for (row, &g) in group_of.iter().enumerate() {
                        acc[g] += i128::from(v[row]);
                    }
                    Column::Float(acc.iter().zip(&counts).map(|(&s, &c)| s as f64 / c as f64).collect())
                }
                (AggFn::Mean, Column::Float(v)) => {
                    let mut acc = vec![0f64; groups];
                    for (row, &g) in group_of.iter().enumerate() {
                        acc[g] += v[row];
                    }
                    Column::Float(acc.iter().zip(&counts).map(|(&s, &c)| s / c as f64).collect())
                }
                (f @ (AggFn::Min | AggFn::Max), column) => {
                    let want = if f == AggFn::Min {
                        Ordering::Less
                    } else {
                        Ordering::Greater
                    };
                    let mut best = first_rows.clone();
                    for (row, &g) in group_of.iter().enumerate() {
                        let ord = match column {
                            Column::Int(v) => v[row].cmp(&v[best[g]]),
                            Column::Float(v) => v[row].total_cmp(&v[best[g]]),
                            Column::Str(v) => {
                                let ranks = ranks.as_ref().expect("string ranks");
                                ranks[v[row] as usize].cmp(&ranks[v[best[g]] as usize])
                            }
                        };
                        if ord == want {
                            best[g] = row;
                        }
                    }
                    column.gather(&best)
                }
                (_, Column::Str(_)) => unreachable!("numeric aggregates are type-checked above"),
            });
        }
        Ok(fresh(out_schema, columns, Arc::clone(&self.pool)))
    }

    /// Stable lexicographic sort on `cols`. Row ids travel with their rows.
    pub fn order<S: AsRef<str>>(&self, cols: &[S], ascending: bool) -> Result<ColumnTable> {
        let idx = cols
            .iter()
            .map(|n| self.schema.index_of(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let ranks = idx
            .iter()
            .any(|&i| self.schema.column_type(i) == ColumnType::Str)
            .then(|| string_ranks(&self.pool));
        let compare = |a: usize, b: usize| -> Ordering {
            for &c in &idx {
                let ord = match &self.columns[c] {
                    Column::Int(v) => v[a].cmp(&v[b]),
                    Column::Float(v) => v[a].total_cmp(&v[b]),
                    Column::Str(v) => {
                        let ranks = ranks.as_ref().expect("string ranks");
                        ranks[v[a] as usize].cmp(&ranks[v[b] as usize])
                    }
                };
                if ord != Ordering::Equal {
                    return if ascending { ord } else { ord.reverse() };
                }
            }
            Ordering::Equal
        };
        let mut perm: Vec<usize> = (0..self.num_rows()).collect();
        perm.par_sort_by(|&a, &b| compare(a, b));
        Ok(self.gather(&perm))
    }

    /// Multiset union, intersection or difference over whole rows.
    pub fn set_op(&self, right: &ColumnTable, op: SetOp) -> Result<ColumnTable> {
        if self.schema != right.schema {
            return Err(Error::SchemaMismatch(format!(
                "`{}` vs `{}`",
                self.schema, right.schema
            )));
        }
        if op == SetOp::Union {
            let (pool, map) = merge_pools(&self.pool, &right.pool);
            let columns = self
                .columns
                .iter()
                .zip(&right.columns)
                .map(|(l, r)| match (l, remap(r.clone(), map.as_deref())) {
                    (Column::Int(a), Column::Int(b)) => Column::Int([a.as_slice(), &b].concat()),
                    (Column::Float(a), Column::Float(b)) => Column::Float([a.as_slice(), &b].concat()),
                    (Column::Str(a), Column::Str(b)) => Column::Str([a.as_slice(), &b].concat()),
                    _ => unreachable!("schemas are equal"),
                })
                .collect();
            return Ok(fresh(self.schema.clone(), columns, pool));
        }

        let mut remaining: HashMap<Vec<Cell<'_>>, usize> = HashMap::new();
        for row in 0..right.num_rows() {
            *remaining.entry(row_key(right, row)).or_default() += 1;
        }
        let keep_on_match = op == SetOp::Intersection;
        let mut kept = Vec::new();
        for row in 0..self.num_rows() {
            let matched = match remaining.get_mut(&row_key(self, row)) {
                Some(n) if *n > 0 => {
                    *n -= 1;
                    true
                }
                _ => false,
            };
            if matched == keep_on_match {
                kept.push(row);
            }
        }
        let columns = self.columns.iter().map(|c| c.gather(&kept)).collect();
        Ok(fresh(self.schema.clone(), columns, Arc::clone(&self.pool)))
    }

    /// Replaces string column `col` by dense integer codes numbered in order
    /// of first occurrence. Also returns the `(code, value)` dictionary.
    pub fn encode_strings(&self, col: &str) -> Result<(ColumnTable, ColumnTable)> {
        let index = self.schema.index_of(col)?;
        let Column::Str(codes) = &self.columns[index] else {
            return Err(Error::type_mismatch(col, "str", self.schema.column_type(index)));
        };
        let mut dense = vec![u32::MAX; self.pool.len()];
        let mut order = Vec::new();
        let encoded: Vec<i64> = codes
            .iter()
            .map(|&c| {
                if dense[c as usize] == u32::MAX {
                    dense[c as usize] = order.len() as u32;
                    order.push(c);
                }
                i64::from(dense[c as usize])
            })
            .collect();

        let schema = Schema::new(
            self.schema
                .columns()
                .iter()
                .enumerate()
                .map(|(i, (name, ty))| (name.clone(), if i == index { ColumnType::Int } else { *ty })),
        )?;
        let mut columns = self.columns.clone();
        columns[index] = Column::Int(encoded);
        let table = ColumnTable::assemble(schema, columns, Some(self.row_ids.clone()), Arc::clone(&self.pool))?;

        let dict_schema = Schema::new([("code", ColumnType::Int), ("value", ColumnType::Str)])?;
        let dict = fresh(
            dict_schema,
            vec![Column::Int((0..order.len() as i64).collect()), Column::Str(order)],
            Arc::clone(&self.pool),
        );
        Ok((table, dict))
    }
}

/// Builds the output of a pairwise operator from matched row indices.
pub(super) fn combine(
    left: &ColumnTable,
    lrows: &[usize],
    right: &ColumnTable,
    rrows: &[usize],
    schema: Schema,
) -> ColumnTable {
    let (pool, map) = merge_pools(left.shared_pool(), right.shared_pool());
    let mut columns: Vec<Column> = left.columns().par_iter().map(|c| c.gather(lrows)).collect();
    columns.extend(
        right
            .columns()
            .par_iter()
            .map(|c| remap(c.gather(rrows), map.as_deref()))
            .collect::<Vec<_>>(),
    );
    fresh(schema, columns, pool)
}

/// Hashable join keys per row; `None` never matches.
type KeyColumn = Vec<Option<u64>>;

fn join_keys(
    left: &ColumnTable,
    li: usize,
    right: &ColumnTable,
    ri: usize,
    right_col: &str,
) -> Result<(KeyColumn, KeyColumn)> {
    let float_key = |x: f64| (!x.is_nan()).then(|| float_bits(x));
    Ok(match (left.column_at(li), right.column_at(ri)) {
        (Column::Int(a), Column::Int(b)) => (
            a.iter().map(|&x| Some(x as u64)).collect(),
            b.iter().map(|&x| Some(x as u64)).collect(),
        ),
        (Column::Float(a), Column::Float(b)) => (
            a.iter().map(|&x| float_key(x)).collect(),
            b.iter().map(|&x| float_key(x)).collect(),
        ),
        (Column::Str(a), Column::Str(b)) => {
            let translate: Vec<Option<u64>> = (0..right.pool().len() as u32)
                .map(|c| left.pool().code(right.pool().get(c)).map(u64::from))
                .collect();
            (
                a.iter().map(|&c| Some(u64::from(c))).collect(),
                b.iter().map(|&c| translate[c as usize]).collect(),
            )
        }
        (l, r) => {
            return Err(Error::type_mismatch(
                right_col,
                l.column_type().to_string(),
                r.column_type(),
            ))
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Cell<'a> {
    Int(i64),
    Float(u64),
    Str(&'a str),
}

fn row_key(table: &ColumnTable, row: usize) -> Vec<Cell<'_>> {
    table
        .columns()
        .iter()
        .map(|c| match c {
            Column::Int(v) => Cell::Int(v[row]),
            Column::Float(v) => Cell::Float(float_bits(v[row])),
            Column::Str(v) => Cell::Str(table.pool().get(v[row])),
        })
        .collect()
}

/// Two-column `(key:int, value:float)` table sorted by key.
pub fn table_from_map(
    pairs: impl IntoIterator<Item = (i64, f64)>,
    key_name: &str,
    val_name: &str,
) -> Result<ColumnTable> {
    let mut pairs: Vec<(i64, f64)> = pairs.into_iter().collect();
    pairs.sort_by_key(|&(k, _)| k);
    let schema = Schema::new([(key_name, ColumnType::Int), (val_name, ColumnType::Float)])?;
    let (keys, vals): (Vec<i64>, Vec<f64>) = pairs.into_iter().unzip();
    ColumnTable::assemble(
        schema,
        vec![Column::Int(keys), Column::Float(vals)],
        None,
        Arc::default(),
    )
}
