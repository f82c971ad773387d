//! Python bindings.
//!
//! Tables, graphs and score vectors stay inside the engine; Python only holds
//! opaque handles to them. Data crosses into Python only through the explicit
//! export methods (`rows`, `column`, `edges`, `to_dict`, `top`).
//!
//! Function names follow the interactive API (`LoadTableTSV`, `Select`,
//! `Join`, `ToGraph`, `GetPageRank`, `TableFromHashMap`), each with a
//! snake_case alias.
//!
//!     import tablegraph as tg
//!     P = tg.LoadTableTSV("PostId:int,Type:str,Tag:str,UserId:int,AnswerId:int", "posts.tsv")
//!     JP = tg.Select(P, "Tag = Java")
//!     Q = tg.Select(JP, "Type = question")
//!     A = tg.Select(JP, "Type = answer")
//!     QA = tg.Join(Q, A, "AnswerId", "PostId")
//!     G = tg.ToGraph(QA, "UserId-1", "UserId-2")
//!     PR = tg.GetPageRank(G)
//!     S = tg.TableFromHashMap(PR, "User", "Scr")

use std::collections::HashMap;
use std::io::ErrorKind;
use std::sync::Arc;

use pyo3::exceptions::{PyFileNotFoundError, PyIOError, PyIndexError, PyKeyError, PyValueError};
use pyo3::prelude::*;

use tablegraph_core::algo::{self, RankVector};
use tablegraph_core::table::{load_tsv, save_tsv};
use tablegraph_core::{
    graph_to_edge_table, table_from_map, table_to_graph, ColumnTable, ColumnType, EdgeSpec, Error, Graph, Predicate,
    Schema, Value,
};

fn to_py_err(e: Error) -> PyErr {
    let message = e.to_string();
    match e {
        Error::Io { source, .. } if source.kind() == ErrorKind::NotFound => PyFileNotFoundError::new_err(message),
        Error::Io { .. } => PyIOError::new_err(message),
        Error::UnknownColumn(_) => PyKeyError::new_err(message),
        Error::UnknownNode(_) => PyKeyError::new_err(message),
        _ => PyValueError::new_err(message),
    }
}

/// A schema given either as `"name:type,..."` or as `[(name, type), ...]`.
#[derive(FromPyObject)]
enum SchemaArg {
    Text(String),
    Pairs(Vec<(String, String)>),
}

impl SchemaArg {
    fn resolve(self) -> PyResult<Schema> {
        let text = match self {
            SchemaArg::Text(text) => text,
            SchemaArg::Pairs(pairs) => pairs
                .iter()
                .map(|(name, ty)| format!("{name}:{ty}"))
                .collect::<Vec<_>>()
                .join(","),
        };
        Schema::parse(&text).map_err(to_py_err)
    }
}

fn value_to_py(py: Python<'_>, value: Value) -> PyResult<Py<PyAny>> {
    Ok(match value {
        Value::Int(v) => v.into_pyobject(py)?.into_any().unbind(),
        Value::Float(v) => v.into_pyobject(py)?.into_any().unbind(),
        Value::Str(v) => v.into_pyobject(py)?.into_any().unbind(),
    })
}

/// Handle to an engine table.
#[pyclass(frozen, module = "tablegraph")]
struct Table {
    inner: Arc<ColumnTable>,
}

impl Table {
    fn wrap(table: ColumnTable) -> Self {
        Table { inner: Arc::new(table) }
    }
}

#[pymethods]
impl Table {
    #[getter]
    fn num_rows(&self) -> usize {
        self.inner.num_rows()
    }

    fn __len__(&self) -> usize {
        self.inner.num_rows()
    }

    #[getter]
    fn columns(&self) -> Vec<String> {
        self.inner.schema().names().map(str::to_string).collect()
    }

    /// Column names paired with their type names.
    #[getter]
    fn schema(&self) -> Vec<(String, String)> {
        self.inner
            .schema()
            .columns()
            .iter()
            .map(|(name, ty)| (name.clone(), ty.to_string()))
            .collect()
    }

    /// Persistent row ids.
    fn row_ids(&self) -> Vec<i64> {
        self.inner.row_ids().to_vec()
    }

    /// Copies every row out as a list of tuples.
    fn rows(&self, py: Python<'_>) -> PyResult<Vec<Vec<Py<PyAny>>>> {
        let t = &self.inner;
        (0..t.num_rows())
            .map(|r| t.row(r).into_iter().map(|v| value_to_py(py, v)).collect())
            .collect()
    }

    /// Copies one column out as a list.
    fn column(&self, py: Python<'_>, name: &str) -> PyResult<Vec<Py<PyAny>>> {
        let t = &self.inner;
        let index = t.schema().index_of(name).map_err(to_py_err)?;
        (0..t.num_rows()).map(|r| value_to_py(py, t.cell(r, index))).collect()
    }

    fn save_tsv(&self, py: Python<'_>, path: &str) -> PyResult<()> {
        let t = Arc::clone(&self.inner);
        py.detach(|| save_tsv(&t, path)).map_err(to_py_err)
    }

    fn project(&self, columns: Vec<String>) -> PyResult<Table> {
        self.inner.project(&columns).map(Table::wrap).map_err(to_py_err)
    }

    #[pyo3(signature = (columns, ascending=true))]
    fn order(&self, py: Python<'_>, columns: Vec<String>, ascending: bool) -> PyResult<Table> {
        let t = Arc::clone(&self.inner);
        py.detach(|| t.order(&columns, ascending))
            .map(Table::wrap)
            .map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        let cols: Vec<String> = self
            .inner
            .schema()
            .columns()
            .iter()
            .map(|(name, ty)| format!("{name}:{ty}"))
            .collect();
        format!("Table({} rows; {})", self.inner.num_rows(), cols.join(","))
    }
}

/// Handle to an engine graph.
#[pyclass(frozen, name = "Graph", module = "tablegraph")]
struct GraphHandle {
    inner: Arc<Graph>,
}

#[pymethods]
impl GraphHandle {
    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn has_edge(&self, src: i64, dst: i64) -> bool {
        self.inner.has_edge(src, dst)
    }

    /// Sorted node ids.
    fn nodes(&self) -> Vec<i64> {
        self.inner.node_ids()
    }

    /// Edges sorted by `(src, dst)`.
    fn edges(&self) -> Vec<(i64, i64)> {
        self.inner.edges()
    }

    /// The edge table `(src, dst)`.
    fn to_table(&self, py: Python<'_>) -> Table {
        let g = Arc::clone(&self.inner);
        Table::wrap(py.detach(|| graph_to_edge_table(&g)))
    }

    fn triangle_count(&self, py: Python<'_>) -> u64 {
        let g = Arc::clone(&self.inner);
        py.detach(|| algo::triangle_count(&g))
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph({} nodes, {} edges)",
            self.inner.node_count(),
            self.inner.edge_count()
        )
    }
}

/// Handle to a node score vector.
#[pyclass(frozen, module = "tablegraph")]
struct Ranks {
    inner: Arc<RankVector>,
}

#[pymethods]
impl Ranks {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __getitem__(&self, id: i64) -> PyResult<f64> {
        self.inner
            .get(id)
            .ok_or_else(|| PyIndexError::new_err(format!("unknown node {id}")))
    }

    fn sum(&self) -> f64 {
        self.inner.sum()
    }

    fn to_dict(&self) -> HashMap<i64, f64> {
        self.inner.iter().collect()
    }

    /// The `n` highest scores, ties broken by smaller id.
    #[pyo3(signature = (n=10))]
    fn top(&self, n: usize) -> Vec<(i64, f64)> {
        let mut pairs: Vec<(i64, f64)> = self.inner.iter().collect();
        pairs.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        pairs.truncate(n);
        pairs
    }

    fn __repr__(&self) -> String {
        format!("Ranks({} nodes)", self.inner.len())
    }
}

/// Loads a TSV file. `schema` is `"name:type,..."` or `[(name, type), ...]`.
#[pyfunction]
#[pyo3(name = "LoadTableTSV")]
fn load_table_tsv(py: Python<'_>, schema: SchemaArg, path: &str) -> PyResult<Table> {
    let schema = schema.resolve()?;
    py.detach(|| load_tsv(path, &schema))
        .map(Table::wrap)
        .map_err(to_py_err)
}

/// Rows satisfying a predicate such as `"Tag = Java"` or `"score >= 2.5"`.
#[pyfunction]
#[pyo3(name = "Select")]
fn select(py: Python<'_>, table: &Table, predicate: &str) -> PyResult<Table> {
    let t = Arc::clone(&table.inner);
    let pred = Predicate::parse(predicate, t.schema()).map_err(to_py_err)?;
    py.detach(|| t.select(&pred)).map(Table::wrap).map_err(to_py_err)
}

/// Equi-join; shared column names get `-1` and `-2` suffixes.
#[pyfunction]
#[pyo3(name = "Join")]
fn join(py: Python<'_>, left: &Table, right: &Table, left_col: &str, right_col: &str) -> PyResult<Table> {
    let (l, r) = (Arc::clone(&left.inner), Arc::clone(&right.inner));
    py.detach(|| l.join(&r, left_col, right_col))
        .map(Table::wrap)
        .map_err(to_py_err)
}

/// Directed graph from two integer columns of an edge table.
#[pyfunction]
#[pyo3(name = "ToGraph")]
fn to_graph(py: Python<'_>, table: &Table, src: &str, dst: &str) -> PyResult<GraphHandle> {
    let t = Arc::clone(&table.inner);
    let spec = EdgeSpec::new(src, dst);
    py.detach(|| table_to_graph(&t, &spec))
        .map(|g| GraphHandle { inner: Arc::new(g) })
        .map_err(to_py_err)
}

#[pyfunction]
#[pyo3(name = "GetPageRank", signature = (graph, damping=0.85, iterations=10))]
fn get_pagerank(py: Python<'_>, graph: &GraphHandle, damping: f64, iterations: usize) -> PyResult<Ranks> {
    let g = Arc::clone(&graph.inner);
    py.detach(|| algo::pagerank(&g, damping, iterations))
        .map(|r| Ranks { inner: Arc::new(r) })
        .map_err(to_py_err)
}

/// Two-column table `(key, value)` from a score vector, ascending by key.
#[pyfunction]
#[pyo3(name = "TableFromHashMap")]
fn table_from_hash_map(ranks: &Ranks, key: &str, value: &str) -> PyResult<Table> {
    table_from_map(ranks.inner.iter(), key, value)
        .map(Table::wrap)
        .map_err(to_py_err)
}

#[pymodule]
fn tablegraph(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Table>()?;
    m.add_class::<GraphHandle>()?;
    m.add_class::<Ranks>()?;

    let functions = [
        ("load_table_tsv", wrap_pyfunction!(load_table_tsv, m)?),
        ("select", wrap_pyfunction!(select, m)?),
        ("join", wrap_pyfunction!(join, m)?),
        ("to_graph", wrap_pyfunction!(to_graph, m)?),
        ("get_pagerank", wrap_pyfunction!(get_pagerank, m)?),
        ("table_from_hash_map", wrap_pyfunction!(table_from_hash_map, m)?),
    ];
    for (alias, function) in functions {
        m.add_function(function.clone())?;
        m.add(alias, function)?;
    }
    m.add("INT", ColumnType::Int.to_string())?;
    m.add("FLOAT", ColumnType::Float.to_string())?;
    m.add("STR", ColumnType::Str.to_string())?;
    Ok(())
}
