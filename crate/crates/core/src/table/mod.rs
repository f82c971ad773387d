//! Columnar tables with persistent row identifiers.
//!
//! A [`ColumnTable`] stores one typed vector per column plus a parallel
//! vector of row ids. String columns hold dense codes into a shared
//! [`StringPool`]; codes are an encoding detail and every comparison or
//! join on strings goes through the decoded bytes.

mod construct;
mod io;
mod ops;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use construct::Metric;
pub use io::{load_tsv, read_tsv, save_tsv, write_tsv};
pub use ops::{table_from_map, AggFn, Aggregate, SetOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnType {
    Int,
    Float,
    Str,
}

impl ColumnType {
    pub fn is_numeric(self) -> bool {
        matches!(self, ColumnType::Int | ColumnType::Float)
    }
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColumnType::Int => "int",
            ColumnType::Float => "float",
            ColumnType::Str => "str",
        })
    }
}

impl FromStr for ColumnType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "int" | "integer" | "i64" => Ok(ColumnType::Int),
            "float" | "double" | "f64" => Ok(ColumnType::Float),
            "str" | "string" => Ok(ColumnType::Str),
            other => Err(Error::Schema(format!("unknown column type `{other}`"))),
        }
    }
}

/// Ordered, non-empty list of uniquely named, typed columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    columns: Vec<(String, ColumnType)>,
}

impl Schema {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = (S, ColumnType)>) -> Result<Self> {
        let columns: Vec<(String, ColumnType)> = columns.into_iter().map(|(n, t)| (n.into(), t)).collect();
        if columns.is_empty() {
            return Err(Error::Schema("a schema needs at least one column".into()));
        }
        for (i, (name, _)) in columns.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::Schema(format!("column {i} has an empty name")));
            }
            if columns[..i].iter().any(|(n, _)| n == name) {
                return Err(Error::Schema(format!("duplicate column name `{name}`")));
            }
        }
        Ok(Schema { columns })
    }

    /// Parses `name:type,name:type,...`, e.g. `id:int,tag:str`.
    pub fn parse(spec: &str) -> Result<Self> {
        let columns = spec
            .split(',')
            .map(|part| {
                let (name, ty) = part
                    .split_once(':')
                    .ok_or_else(|| Error::Schema(format!("expected name:type, found `{part}`")))?;
                Ok((name.trim().to_string(), ty.parse::<ColumnType>()?))
            })
            .collect::<Result<Vec<_>>>()?;
        Schema::new(columns)
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.columns[index].0
    }

    pub fn column_type(&self, index: usize) -> ColumnType {
        self.columns[index].1
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(n, _)| n.as_str())
    }

    pub fn columns(&self) -> &[(String, ColumnType)] {
        &self.columns
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|(n, _)| n == name)
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.position(name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// Left columns followed by right columns. Names present on both sides
    /// get a `-1` (left) or `-2` (right) suffix.
    pub fn concat(left: &Schema, right: &Schema) -> Result<Schema> {
        let clash = |name: &str, other: &Schema| other.position(name).is_some();
        let mut columns = Vec::with_capacity(left.len() + right.len());
        for (name, ty) in &left.columns {
            let name = if clash(name, right) {
                format!("{name}-1")
            } else {
                name.clone()
            };
            columns.push((name, *ty));
        }
        for (name, ty) in &right.columns {
            let name = if clash(name, left) {
                format!("{name}-2")
            } else {
                name.clone()
            };
            columns.push((name, *ty));
        }
        Schema::new(columns)
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, ty)) in self.columns.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{name}:{ty}")?;
        }
        Ok(())
    }
}

/// Dictionary of interned strings; codes are dense and assigned on first use.
#[derive(Debug, Clone, Default)]
pub struct StringPool {
    strings: Vec<String>,
    codes: HashMap<String, u32>,
}

impl StringPool {
    pub fn intern(&mut self, s: &str) -> u32 {
        if let Some(&code) = self.codes.get(s) {
            return code;
        }
        let code = u32::try_from(self.strings.len()).expect("string pool overflow");
        self.strings.push(s.to_string());
        self.codes.insert(s.to_string(), code);
        code
    }

    pub fn code(&self, s: &str) -> Option<u32> {
        self.codes.get(s).copied()
    }

    pub fn get(&self, code: u32) -> &str {
        &self.strings[code as usize]
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Int(Vec<i64>),
    Float(Vec<f64>),
    /// Codes into the owning table's [`StringPool`].
    Str(Vec<u32>),
}

impl Column {
    pub fn empty(ty: ColumnType) -> Self {
        match ty {
            ColumnType::Int => Column::Int(Vec::new()),
            ColumnType::Float => Column::Float(Vec::new()),
            ColumnType::Str => Column::Str(Vec::new()),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Column::Int(v) => v.len(),
            Column::Float(v) => v.len(),
            Column::Str(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn column_type(&self) -> ColumnType {
        match self {
            Column::Int(_) => ColumnType::Int,
            Column::Float(_) => ColumnType::Float,
            Column::Str(_) => ColumnType::Str,
        }
    }

    pub(crate) fn gather(&self, rows: &[usize]) -> Column {
        match self {
            Column::Int(v) => Column::Int(rows.iter().map(|&r| v[r]).collect()),
            Column::Float(v) => Column::Float(rows.iter().map(|&r| v[r]).collect()),
            Column::Str(v) => Column::Str(rows.iter().map(|&r| v[r]).collect()),
        }
    }

    /// Numeric view of the column as `f64`.
    pub(crate) fn as_f64(&self, name: &str) -> Result<Vec<f64>> {
        match self {
            Column::Int(v) => Ok(v.iter().map(|&x| x as f64).collect()),
            Column::Float(v) => Ok(v.clone()),
            Column::Str(_) => Err(Error::type_mismatch(name, "numeric", ColumnType::Str)),
        }
    }

    /// Keeps the cells at `rows` (strictly ascending) in place.
    pub(crate) fn compact(&mut self, rows: &[usize]) {
        fn keep<T: Copy>(v: &mut Vec<T>, rows: &[usize]) {
            for (dst, &src) in rows.iter().enumerate() {
                v[dst] = v[src];
            }
            v.truncate(rows.len());
        }
        match self {
            Column::Int(v) => keep(v, rows),
            Column::Float(v) => keep(v, rows),
            Column::Str(v) => keep(v, rows),
        }
    }
}

/// A single cell value.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Str(String),
}

impl Value {
    pub fn value_type(&self) -> ColumnType {
        match self {
            Value::Int(_) => ColumnType::Int,
            Value::Float(_) => ColumnType::Float,
            Value::Str(_) => ColumnType::Str,
        }
    }

    /// Parses `text` as a value of type `ty`.
    pub fn parse_as(text: &str, ty: ColumnType) -> std::result::Result<Value, String> {
        match ty {
            ColumnType::Int => text
                .parse::<i64>()
                .map(Value::Int)
                .map_err(|e| format!("`{text}` is not an integer ({e})")),
            ColumnType::Float => text
                .parse::<f64>()
                .map(Value::Float)
                .map_err(|e| format!("`{text}` is not a float ({e})")),
            ColumnType::Str => Ok(Value::Str(text.to_string())),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{v}"),
            Value::Str(v) => f.write_str(v),
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CmpOp::Eq => ord == Equal,
            CmpOp::Ne => ord != Equal,
            CmpOp::Lt => ord == Less,
            CmpOp::Le => ord != Greater,
            CmpOp::Gt => ord == Greater,
            CmpOp::Ge => ord != Less,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// `column <op> constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct Predicate {
    pub column: String,
    pub op: CmpOp,
    pub value: Value,
}

impl Predicate {
    pub fn new(column: impl Into<String>, op: CmpOp, value: impl Into<Value>) -> Self {
        Predicate {
            column: column.into(),
            op,
            value: value.into(),
        }
    }

    /// Parses expressions such as `Tag=Java` or `age>=4`, typing the constant
    /// after the column it refers to.
    pub fn parse(expr: &str, schema: &Schema) -> Result<Self> {
        const OPS: [(&str, CmpOp); 7] = [
            ("<=", CmpOp::Le),
            (">=", CmpOp::Ge),
            ("!=", CmpOp::Ne),
            ("<>", CmpOp::Ne),
            ("=", CmpOp::Eq),
            ("<", CmpOp::Lt),
            (">", CmpOp::Gt),
        ];
        let (at, symbol, op) = OPS
            .iter()
            .filter_map(|&(sym, op)| expr.find(sym).map(|at| (at, sym, op)))
            .min_by_key(|&(at, sym, _)| (at, std::cmp::Reverse(sym.len())))
            .ok_or_else(|| Error::InvalidArgument(format!("no comparison operator in `{expr}`")))?;
        let column = expr[..at].trim();
        let constant = expr[at + symbol.len()..].trim();
        let index = schema.index_of(column)?;
        let ty = schema.column_type(index);
        let value = Value::parse_as(constant, ty).map_err(|message| Error::Parse {
            line: 0,
            column: column.to_string(),
            message,
        })?;
        Ok(Predicate::new(column, op, value))
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.column, self.op.symbol(), self.value)
    }
}

/// Schema-typed columnar table.
///
/// Every row carries an `i64` id. Ids are unique within a table, survive
/// selection, projection and ordering, and are freshly numbered `0..n` by
/// operators that build new rows (joins, set operations, aggregation).
#[derive(Debug, Clone)]
pub struct ColumnTable {
    schema: Schema,
    columns: Vec<Column>,
    row_ids: Vec<i64>,
    pool: Arc<StringPool>,
}

impl ColumnTable {
    pub fn empty(schema: Schema) -> Self {
        let columns = schema.columns.iter().map(|&(_, ty)| Column::empty(ty)).collect();
        ColumnTable {
            schema,
            columns,
            row_ids: Vec::new(),
            pool: Arc::default(),
        }
    }

    /// Assembles a table from columns whose string codes refer to `pool`.
    /// Row ids are numbered `0..n`.
    pub fn from_columns(schema: Schema, columns: Vec<Column>, pool: StringPool) -> Result<Self> {
        Self::assemble(schema, columns, None, Arc::new(pool))
    }

    pub(crate) fn assemble(
        schema: Schema,
        columns: Vec<Column>,
        row_ids: Option<Vec<i64>>,
        pool: Arc<StringPool>,
    ) -> Result<Self> {
        if columns.len() != schema.len() {
            return Err(Error::Schema(format!(
                "{} columns supplied for a {}-column schema",
                columns.len(),
                schema.len()
            )));
        }
        let rows = columns.first().map_or(0, Column::len);
        for (i, col) in columns.iter().enumerate() {
            if col.column_type() != schema.column_type(i) {
                return Err(Error::type_mismatch(
                    schema.name(i),
                    schema.column_type(i).to_string(),
                    col.column_type(),
                ));
            }
            if col.len() != rows {
                return Err(Error::Schema(format!(
                    "column `{}` has {} cells, expected {rows}",
                    schema.name(i),
                    col.len()
                )));
            }
            if let Column::Str(codes) = col {
                if codes.iter().any(|&c| c as usize >= pool.len()) {
                    return Err(Error::Schema(format!(
                        "column `{}` holds an unknown string code",
                        schema.name(i)
                    )));
                }
            }
        }
        let row_ids = row_ids.unwrap_or_else(|| (0..rows as i64).collect());
        debug_assert_eq!(row_ids.len(), rows);
        Ok(ColumnTable {
            schema,
            columns,
            row_ids,
            pool,
        })
    }

    /// Builds a table row by row. Integer values are accepted in float columns.
    pub fn from_rows(schema: Schema, rows: impl IntoIterator<Item = Vec<Value>>) -> Result<Self> {
        let mut columns: Vec<Column> = schema.columns.iter().map(|&(_, ty)| Column::empty(ty)).collect();
        let mut pool = StringPool::default();
        for (line, row) in rows.into_iter().enumerate() {
            if row.len() != schema.len() {
                return Err(Error::Arity {
                    line: line + 1,
                    expected: schema.len(),
                    found: row.len(),
                });
            }
            for (i, (col, value)) in columns.iter_mut().zip(row).enumerate() {
                match (col, value) {
                    (Column::Int(v), Value::Int(x)) => v.push(x),
                    (Column::Float(v), Value::Float(x)) => v.push(x),
                    (Column::Float(v), Value::Int(x)) => v.push(x as f64),
                    (Column::Str(v), Value::Str(s)) => v.push(pool.intern(&s)),
                    (col, value) => {
                        return Err(Error::type_mismatch(
                            schema.name(i),
                            col.column_type().to_string(),
                            value.value_type(),
                        ))
                    }
                }
            }
        }
        Self::assemble(schema, columns, None, Arc::new(pool))
    }

    /// Table of integer columns, e.g. an edge table `[("src", ..), ("dst", ..)]`.
    pub fn from_int_columns<S: Into<String>>(columns: impl IntoIterator<Item = (S, Vec<i64>)>) -> Result<Self> {
        let (names, data): (Vec<String>, Vec<Column>) =
            columns.into_iter().map(|(n, v)| (n.into(), Column::Int(v))).unzip();
        let schema = Schema::new(names.into_iter().map(|n| (n, ColumnType::Int)))?;
        Self::assemble(schema, data, None, Arc::default())
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn num_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn row_ids(&self) -> &[i64] {
        &self.row_ids
    }

    pub fn pool(&self) -> &StringPool {
        &self.pool
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column_at(&self, index: usize) -> &Column {
        &self.columns[index]
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        Ok(&self.columns[self.schema.index_of(name)?])
    }

    pub fn int_column(&self, name: &str) -> Result<&[i64]> {
        match self.column(name)? {
            Column::Int(v) => Ok(v),
            other => Err(Error::type_mismatch(name, "int", other.column_type())),
        }
    }

    pub fn float_column(&self, name: &str) -> Result<&[f64]> {
        match self.column(name)? {
            Column::Float(v) => Ok(v),
            other => Err(Error::type_mismatch(name, "float", other.column_type())),
        }
    }

    /// Decoded strings of a string column.
    pub fn str_column(&self, name: &str) -> Result<Vec<&str>> {
        match self.column(name)? {
            Column::Str(v) => Ok(v.iter().map(|&c| self.pool.get(c)).collect()),
            other => Err(Error::type_mismatch(name, "str", other.column_type())),
        }
    }

    pub fn cell(&self, row: usize, column: usize) -> Value {
        match &self.columns[column] {
            Column::Int(v) => Value::Int(v[row]),
            Column::Float(v) => Value::Float(v[row]),
            Column::Str(v) => Value::Str(self.pool.get(v[row]).to_string()),
        }
    }

    pub fn row(&self, row: usize) -> Vec<Value> {
        (0..self.columns.len()).map(|c| self.cell(row, c)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<Value>> {
        (0..self.num_rows()).map(|r| self.row(r)).collect()
    }

    /// Approximate heap footprint in bytes.
    pub fn memory_bytes(&self) -> usize {
        let cells: usize = self
            .columns
            .iter()
            .map(|c| match c {
                Column::Int(v) => v.capacity() * 8,
                Column::Float(v) => v.capacity() * 8,
                Column::Str(v) => v.capacity() * 4,
            })
            .sum();
        let strings: usize = self.pool.strings.iter().map(|s| s.capacity() * 2 + 48).sum();
        cells + self.row_ids.capacity() * 8 + strings
    }

    /// Rows at `rows`, keeping their ids and the string pool.
    pub(crate) fn gather(&self, rows: &[usize]) -> ColumnTable {
        ColumnTable {
            schema: self.schema.clone(),
            columns: self.columns.iter().map(|c| c.gather(rows)).collect(),
            row_ids: rows.iter().map(|&r| self.row_ids[r]).collect(),
            pool: Arc::clone(&self.pool),
        }
    }

    pub(crate) fn shared_pool(&self) -> &Arc<StringPool> {
        &self.pool
    }
}

/// Combines the string pools of two tables. Returns the merged pool and a
/// translation from `right` codes to merged codes.
pub(crate) fn merge_pools(left: &Arc<StringPool>, right: &Arc<StringPool>) -> (Arc<StringPool>, Option<Vec<u32>>) {
    if Arc::ptr_eq(left, right) || right.is_empty() {
        return (Arc::clone(left), None);
    }
    let mut pool = (**left).clone();
    let map = right.strings.iter().map(|s| pool.intern(s)).collect();
    (Arc::new(pool), Some(map))
}

pub(crate) fn remap(column: Column, map: Option<&[u32]>) -> Column {
    match (column, map) {
        (Column::Str(codes), Some(map)) => Column::Str(codes.into_iter().map(|c| map[c as usize]).collect()),
        (column, _) => column,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_parse_and_display() {
        let s = Schema::parse("id:int, tag:str,score:float").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.column_type(1), ColumnType::Str);
        assert_eq!(s.to_string(), "id:int,tag:str,score:float");
    }

    #[test]
    fn schema_rejects_bad_definitions() {
        assert!(Schema::parse("a:int,a:str").is_err());
        assert!(Schema::parse(":int").is_err());
        assert!(Schema::parse("a:blob").is_err());
        assert!(Schema::new(Vec::<(String, ColumnType)>::new()).is_err());
    }

    #[test]
    fn concat_suffixes_shared_names() {
        let l = Schema::parse("UserId:int,Q:int").unwrap();
        let r = Schema::parse("UserId:int,A:int").unwrap();
        let s = Schema::concat(&l, &r).unwrap();
        let names: Vec<_> = s.names().collect();
        assert_eq!(names, ["UserId-1", "Q", "UserId-2", "A"]);
    }

    #[test]
    fn predicate_parse_picks_longest_operator() {
        let s = Schema::parse("age:int,tag:str").unwrap();
        assert_eq!(
            Predicate::parse("age>=4", &s).unwrap(),
            Predicate::new("age", CmpOp::Ge, 4)
        );
        assert_eq!(
            Predicate::parse("tag != x", &s).unwrap(),
            Predicate::new("tag", CmpOp::Ne, "x")
        );
        assert_eq!(
            Predicate::parse("tag=Java", &s).unwrap(),
            Predicate::new("tag", CmpOp::Eq, "Java")
        );
        assert!(Predicate::parse("age=x", &s).is_err());
        assert!(matches!(Predicate::parse("nope<1", &s), Err(Error::UnknownColumn(_))));
    }

    #[test]
    fn from_rows_checks_types() {
        let s = Schema::parse("a:int,b:float").unwrap();
        let t = ColumnTable::from_rows(s.clone(), vec![vec![1.into(), 2.into()]]).unwrap();
        assert_eq!(t.row(0), vec![Value::Int(1), Value::Float(2.0)]);
        assert!(ColumnTable::from_rows(s, vec![vec![Value::from("x"), 2.into()]]).is_err());
    }

    #[test]
    fn compact_keeps_selected_rows() {
        let mut c = Column::Int(vec![10, 11, 12, 13]);
        c.compact(&[1, 3]);
        assert_eq!(c, Column::Int(vec![11, 13]));
    }
}
