//! Brute-force oracles and random inputs shared by the integration tests.
//!
//! Every oracle works on plain rows or edge lists and is written without
//! reference to the engine's internals: nested loops, dense matrices and
//! repeated scans.

#![allow(dead_code, clippy::needless_range_loop)]

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tablegraph_core::table::{AggFn, Aggregate, CmpOp, Metric, SetOp};
use tablegraph_core::{ColumnTable, ColumnType, Graph, Predicate, Schema, Value};

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// tables

pub type Row = Vec<Value>;

/// Bit-exact cell identity: floats by bit pattern, so `-0.0` and `0.0`
/// differ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Exact {
    Int(i64),
    Float(u64),
    Str(String),
}

pub fn exact(v: &Value) -> Exact {
    match v {
        Value::Int(x) => Exact::Int(*x),
        Value::Float(x) => Exact::Float(x.to_bits()),
        Value::Str(s) => Exact::Str(s.clone()),
    }
}

pub fn exact_rows(rows: &[Row]) -> Vec<Vec<Exact>> {
    rows.iter().map(|r| r.iter().map(exact).collect()).collect()
}

/// Cell equality used by relational semantics: `-0.0 == 0.0`.
pub fn same(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => x == y,
        (Value::Float(x), Value::Float(y)) => x == y,
        (Value::Str(x), Value::Str(y)) => x == y,
        _ => false,
    }
}

pub fn same_row(a: &[Value], b: &[Value]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| same(x, y))
}

pub fn compare(a: &Value, b: &Value) -> Ordering {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => x.cmp(y),
        (Value::Float(x), Value::Float(y)) => x.total_cmp(y),
        (Value::Str(x), Value::Str(y)) => x.as_bytes().cmp(y.as_bytes()),
        _ => panic!("comparing values of different types"),
    }
}

pub const WORDS: [&str; 8] = ["java", "rust", "", "Zeta", "alpha", "beta", "zz", "Ärger"];
pub const FLOATS: [f64; 9] = [0.0, -0.0, 0.25, -1.5, 2.0, 3.75, 1e-3, -7.0, 100.0];

pub fn table_schema() -> Schema {
    Schema::parse("k:int,s:str,x:float,v:int").unwrap()
}

/// Random rows over small domains so joins and groups collide often.
pub fn random_rows(rng: &mut ChaCha8Rng, rows: usize, key_range: i64) -> Vec<Row> {
    (0..rows)
        .map(|_| {
            vec![
                Value::Int(rng.gen_range(0..key_range.max(1))),
                Value::Str(WORDS.choose(rng).unwrap().to_string()),
                Value::Float(if rng.gen_bool(0.8) {
                    *FLOATS.choose(rng).unwrap()
                } else {
                    rng.gen_range(-10.0..10.0)
                }),
                Value::Int(rng.gen_range(-1_000_000..1_000_000)),
            ]
        })
        .collect()
}

pub fn table_of(rows: &[Row]) -> ColumnTable {
    ColumnTable::from_rows(table_schema(), rows.iter().cloned()).unwrap()
}

/// Rows paired with their row ids.
pub fn contents(t: &ColumnTable) -> (Vec<i64>, Vec<Vec<Exact>>) {
    (t.row_ids().to_vec(), exact_rows(&t.rows()))
}

pub fn random_predicate(rng: &mut ChaCha8Rng, rows: &[Row]) -> Predicate {
    let ops = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];
    let op = *ops.choose(rng).unwrap();
    let column = rng.gen_range(0..4);
    let name = ["k", "s", "x", "v"][column];
    let from_data = !rows.is_empty() && rng.gen_bool(0.7);
    let value = if from_data {
        rows[rng.gen_range(0..rows.len())][column].clone()
    } else {
        match column {
            0 | 3 => Value::Int(rng.gen_range(-5..60)),
            1 => Value::Str(["absent", "m", "java"].choose(rng).unwrap().to_string()),
            _ => Value::Float(rng.gen_range(-8.0..8.0)),
        }
    };
    Predicate::new(name, op, value)
}

fn holds(op: CmpOp, ord: Ordering) -> bool {
    match op {
        CmpOp::Eq => ord == Ordering::Equal,
        CmpOp::Ne => ord != Ordering::Equal,
        CmpOp::Lt => ord == Ordering::Less,
        CmpOp::Le => ord != Ordering::Greater,
        CmpOp::Gt => ord == Ordering::Greater,
        CmpOp::Ge => ord != Ordering::Less,
    }
}

/// Row indices satisfying `pred` under IEEE comparison for floats.
pub fn select_oracle(rows: &[Row], schema: &Schema, pred: &Predicate) -> Vec<usize> {
    let col = schema.position(&pred.column).unwrap();
    (0..rows.len())
        .filter(|&i| {
            let ord = match (&rows[i][col], &pred.value) {
                (Value::Float(a), Value::Float(b)) => a.partial_cmp(b),
                (Value::Float(a), Value::Int(b)) => a.partial_cmp(&(*b as f64)),
                (a, b) => Some(compare(a, b)),
            };
            ord.map_or(pred.op == CmpOp::Ne, |o| holds(pred.op, o))
        })
        .collect()
}

/// Nested-loop equi-join, ordered by (left, right).
pub fn join_oracle(left: &[Row], lcol: usize, right: &[Row], rcol: usize) -> Vec<Row> {
    let mut out = Vec::new();
    for l in left {
        for r in right {
            let equal = match (&l[lcol], &r[rcol]) {
                (Value::Float(a), Value::Float(b)) => a == b,
                (a, b) => same(a, b),
            };
            if equal {
                out.push(l.iter().chain(r).cloned().collect());
            }
        }
    }
    out
}

/// Groups in first-appearance order, aggregates folded in row order.
pub fn group_oracle(rows: &[Row], keys: &[usize], aggs: &[(AggFn, usize)]) -> Vec<Row> {
    let mut groups: Vec<(Row, Vec<usize>)> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let key: Row = keys.iter().map(|&k| row[k].clone()).collect();
        match groups.iter_mut().find(|(k, _)| same_row(k, &key)) {
            Some((_, members)) => members.push(i),
            None => groups.push((key, vec![i])),
        }
    }
    groups
        .into_iter()
        .map(|(key, members)| {
            let mut out = key;
            for &(func, col) in aggs {
                let cells: Vec<&Value> = members.iter().map(|&m| &rows[m][col]).collect();
                out.push(match func {
                    AggFn::Count => Value::Int(cells.len() as i64),
                    AggFn::Sum => match cells[0] {
                        Value::Int(_) => Value::Int(cells.iter().fold(0i64, |a, c| a.wrapping_add(int(c)))),
                        _ => Value::Float(cells.iter().fold(0.0, |a, c| a + float(c))),
                    },
                    AggFn::Mean => match cells[0] {
                        Value::Int(_) => {
                            let total: i128 = cells.iter().map(|c| int(c) as i128).sum();
                            Value::Float(total as f64 / cells.len() as f64)
                        }
                        _ => Value::Float(cells.iter().fold(0.0, |a, c| a + float(c)) / cells.len() as f64),
                    },
                    AggFn::Min | AggFn::Max => {
                        let want = if func == AggFn::Min {
                            Ordering::Less
                        } else {
                            Ordering::Greater
                        };
                        let mut best = cells[0];
                        for c in &cells[1..] {
                            if compare(c, best) == want {
                                best = c;
                            }
                        }
                        best.clone()
                    }
                });
            }
            out
        })
        .collect()
}

fn int(v: &Value) -> i64 {
    match v {
        Value::Int(x) => *x,
        _ => panic!("not an int"),
    }
}

fn float(v: &Value) -> f64 {
    match v {
        Value::Float(x) => *x,
        Value::Int(x) => *x as f64,
        _ => panic!("not numeric"),
    }
}

pub fn random_aggregates(rng: &mut ChaCha8Rng) -> Vec<(AggFn, usize)> {
    let count = rng.gen_range(1..=4);
    let mut aggs = Vec::new();
    for _ in 0..count {
        let func = *[AggFn::Count, AggFn::Sum, AggFn::Min, AggFn::Max, AggFn::Mean]
            .choose(rng)
            .unwrap();
        let col = match func {
            AggFn::Sum | AggFn::Mean => *[0, 2, 3].choose(rng).unwrap(),
            _ => rng.gen_range(0..4),
        };
        // output names must be unique
        if !aggs.contains(&(func, col)) {
            aggs.push((func, col));
        }
    }
    aggs
}

pub fn to_aggregates(schema: &Schema, aggs: &[(AggFn, usize)]) -> Vec<Aggregate> {
    aggs.iter().map(|&(f, c)| Aggregate::new(f, schema.name(c))).collect()
}

/// Multiset semantics by exhaustive matching: each right row cancels at most
/// one equal left row, earliest first.
pub fn set_oracle(left: &[Row], right: &[Row], op: SetOp) -> Vec<Row> {
    if op == SetOp::Union {
        return left.iter().chain(right).cloned().collect();
    }
    let mut used = vec![false; right.len()];
    let mut out = Vec::new();
    for l in left {
        let hit = (0..right.len()).find(|&j| !used[j] && same_row(l, &right[j]));
        if let Some(j) = hit {
            used[j] = true;
        }
        if hit.is_some() == (op == SetOp::Intersection) {
            out.push(l.clone());
        }
    }
    out
}

pub fn distance(metric: Metric, a: &[f64], b: &[f64]) -> f64 {
    match metric {
        Metric::L1 => a.iter().zip(b).fold(0.0, |s, (x, y)| s + (x - y).abs()),
        Metric::L2 => a.iter().zip(b).fold(0.0, |s, (x, y)| s + (x - y) * (x - y)).sqrt(),
    }
}

pub fn sim_join_oracle(
    left: &[Row],
    right: &[Row],
    cols: &[(usize, usize)],
    metric: Metric,
    threshold: f64,
) -> Vec<Row> {
    let mut out = Vec::new();
    for l in left {
        let a: Vec<f64> = cols.iter().map(|&(c, _)| float(&l[c])).collect();
        for r in right {
            let b: Vec<f64> = cols.iter().map(|&(_, c)| float(&r[c])).collect();
            if distance(metric, &a, &b) < threshold {
                out.push(l.iter().chain(r).cloned().collect());
            }
        }
    }
    out
}

/// Each row paired with up to `k` successors in (order value, row id) order
/// within its group; groups in first-appearance order.
pub fn next_k_oracle(rows: &[Row], ids: &[i64], group: usize, order: usize, k: usize) -> Vec<Row> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..rows.len() {
        match groups.iter_mut().find(|g| same(&rows[g[0]][group], &rows[i][group])) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    let mut out = Vec::new();
    for mut g in groups {
        g.sort_by(|&a, &b| compare(&rows[a][order], &rows[b][order]).then(ids[a].cmp(&ids[b])));
        for i in 0..g.len() {
            for j in i + 1..g.len().min(i + 1 + k) {
                out.push(rows[g[i]].iter().chain(&rows[g[j]]).cloned().collect());
            }
        }
    }
    out
}

pub fn schema_types(schema: &Schema) -> Vec<ColumnType> {
    (0..schema.len()).map(|i| schema.column_type(i)).collect()
}

// ---------------------------------------------------------------------------
// graphs

/// `m` random directed edges over ids `0..n` (duplicates and self-loops
/// included), optionally with a few isolated ids beyond `n`.
pub fn random_edges(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<(i64, i64)> {
    (0..m)
        .map(|_| (rng.gen_range(0..n) as i64, rng.gen_range(0..n) as i64))
        .collect()
}

pub fn graph_from(n: usize, edges: &[(i64, i64)]) -> Graph {
    let mut g = Graph::new();
    for v in 0..n as i64 {
        g.add_node(v);
    }
    for &(s, d) in edges {
        g.add_edge(s, d);
    }
    g
}

/// Directed adjacency matrix over `0..n`.
pub fn matrix(n: usize, edges: &[(i64, i64)]) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; n]; n];
    for &(s, d) in edges {
        a[s as usize][d as usize] = true;
    }
    a
}

/// Symmetrized adjacency without self-loops.
pub fn undirected(n: usize, edges: &[(i64, i64)]) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; n]; n];
    for &(s, d) in edges {
        if s != d {
            a[s as usize][d as usize] = true;
            a[d as usize][s as usize] = true;
        }
    }
    a
}

pub fn triangles_oracle(n: usize, edges: &[(i64, i64)]) -> u64 {
    let a = undirected(n, edges);
    let mut count = 0;
    for i in 0..n {
        for j in i + 1..n {
            if !a[i][j] {
                continue;
            }
            for k in j + 1..n {
                if a[j][k] && a[i][k] {
                    count += 1;
                }
            }
        }
    }
    count
}

/// All-pairs hop distances by Floyd-Warshall.
pub fn floyd_warshall(n: usize, edges: &[(i64, i64)]) -> Vec<Vec<Option<u64>>> {
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for &(s, t) in edges {
        if s != t {
            d[s as usize][t as usize] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = d[i][k] else { continue };
            for j in 0..n {
                if let Some(kj) = d[k][j] {
                    if d[i][j].is_none_or(|cur| ik + kj < cur) {
                        d[i][j] = Some(ik + kj);
                    }
                }
            }
        }
    }
    d
}

/// Reflexive transitive closure.
pub fn closure(n: usize, edges: &[(i64, i64)]) -> Vec<Vec<bool>> {
    let mut r = matrix(n, edges);
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Partition as a set of sorted member lists.
pub type Partition = BTreeSet<Vec<i64>>;

pub fn scc_oracle(n: usize, edges: &[(i64, i64)]) -> Partition {
    let r = closure(n, edges);
    (0..n)
        .map(|i| (0..n).filter(|&j| r[i][j] && r[j][i]).map(|j| j as i64).collect())
        .collect()
}

pub fn partition_of(ids: &[i64], labels: &[usize]) -> Partition {
    let mut groups: BTreeMap<usize, Vec<i64>> = BTreeMap::new();
    for (&id, &l) in ids.iter().zip(labels) {
        groups.entry(l).or_default().push(id);
    }
    groups
        .into_values()
        .map(|mut g| {
            g.sort_unstable();
            g
        })
        .collect()
}

/// Repeatedly deletes any node of symmetrized degree below `k`.
pub fn k_core_oracle(n: usize, edges: &[(i64, i64)], k: usize) -> BTreeSet<i64> {
    let a = undirected(n, edges);
    let mut alive = vec![true; n];
    loop {
        let victim = (0..n).find(|&v| alive[v] && (0..n).filter(|&u| alive[u] && a[v][u]).count() < k);
        match victim {
            Some(v) => alive[v] = false,
            None => break,
        }
    }
    (0..n).filter(|&v| alive[v]).map(|v| v as i64).collect()
}

pub struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

pub fn components_oracle(n: usize, edges: &[(i64, i64)]) -> Partition {
    let mut dsu = DisjointSet::new(n);
    for &(s, d) in edges {
        dsu.union(s as usize, d as usize);
    }
    let labels: Vec<usize> = (0..n).map(|v| dsu.find(v)).collect();
    let ids: Vec<i64> = (0..n as i64).collect();
    partition_of(&ids, &labels)
}

/// BFS distances used to cross-check a single source.
pub fn bfs(n: usize, edges: &[(i64, i64)], source: usize) -> Vec<Option<u64>> {
    let a = matrix(n, edges);
    let mut dist = vec![None; n];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if a[u][v] && dist[v].is_none() {
                dist[v] = Some(dist[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Dense power iteration: `M[v][u] = 1/outdeg(u)` for each edge `u -> v`,
/// dangling columns replaced by `1/n`.
pub fn pagerank_oracle(n: usize, edges: &[(i64, i64)], damping: f64, iterations: usize) -> Vec<f64> {
    let a = matrix(n, edges);
    let mut m = vec![vec![0.0; n]; n];
    for u in 0..n {
        let deg = a[u].iter().filter(|&&x| x).count();
        for v in 0..n {
            m[v][u] = if deg == 0 {
                1.0 / n as f64
            } else if a[u][v] {
                1.0 / deg as f64
            } else {
                0.0
            };
        }
    }
    let mut r = vec![1.0 / n as f64; n];
    for _ in 0..iterations {
        r = (0..n)
            .map(|v| (1.0 - damping) / n as f64 + damping * (0..n).map(|u| m[v][u] * r[u]).sum::<f64>())
            .collect();
    }
    r
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Deduplicated, sorted edge list.
pub fn dedup_sorted(edges: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let set: BTreeSet<(i64, i64)> = edges.iter().copied().collect();
    set.into_iter().collect()
}
