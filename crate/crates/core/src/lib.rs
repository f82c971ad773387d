//! In-memory columnar tables and dynamic directed graphs, with parallel
//! table/graph conversion and graph analytics kernels.
//!
//! The typical workflow loads relational data into a [`ColumnTable`], shapes
//! it with relational and edge-building operators into a two-column edge
//! table, converts that to a [`Graph`] with [`table_to_graph`], runs
//! algorithms from [`algo`], and turns results back into tables.

pub mod algo;
pub mod bench;
pub mod containers;
pub mod convert;
pub mod error;
pub mod graph;
pub mod parallel;
pub mod pipeline;
pub mod synth;
pub mod table;

pub use algo::{Components, DistanceMap, RankVector};
pub use containers::{ClaimVector, SlotMap};
pub use convert::{graph_to_edge_table, graph_to_node_table, table_to_graph, EdgeSpec};
pub use error::{Error, Result};
pub use graph::{Direction, Graph};
pub use table::{table_from_map, ColumnTable, ColumnType, Predicate, Schema, Value};
