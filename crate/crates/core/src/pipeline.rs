//! Line-oriented pipeline scripts.
//!
//! A script is a sequence of commands, one per line. Blank lines and lines
//! starting with `#` are ignored. Every command except `save` binds its
//! result to a name:
//!
//! ```text
//! posts = load posts.tsv PostId:int,Type:str,Tag:str,UserId:int,AnswerId:int
//! java  = select posts Tag=Java
//! q     = select java Type=question
//! a     = select java Type=answer
//! qa    = join q a AnswerId PostId
//! g     = tograph qa UserId-1 UserId-2
//! pr    = pagerank g
//! scores = totable pr User Scr
//! save scores scores.tsv
//! ```
//!
//! | verb | arguments | result |
//! |------|-----------|--------|
//! | `load` | `PATH SCHEMA` | table |
//! | `select` | `TABLE PREDICATE` | table |
//! | `join` | `LEFT RIGHT LEFT_COL RIGHT_COL` | table |
//! | `project` | `TABLE COL[,COL...]` | table |
//! | `group` | `TABLE KEYS AGG[,AGG...]`, keys `-` for none, aggregates like `sum(x)` | table |
//! | `order` | `TABLE COL[,COL...] [asc\|desc]` | table |
//! | `simjoin` | `LEFT RIGHT L:R[,L:R...] l1\|l2 THRESHOLD` | table |
//! | `nextk` | `TABLE GROUP_COL ORDER_COL K` | table |
//! | `tograph` | `TABLE SRC_COL DST_COL` | graph |
//! | `totable` | `GRAPH [edges\|nodes]` or `RANKS KEY_NAME VALUE_NAME` | table |
//! | `pagerank` | `GRAPH [DAMPING [ITERATIONS]]` | ranks |
//! | `triangles` | `GRAPH` | one-row table `triangles` |
//! | `sssp` | `GRAPH SOURCE` | table `node, distance` (reachable nodes) |
//! | `scc` | `GRAPH` | table `node, component` |
//! | `kcore` | `GRAPH K` | graph |
//! | `save` | `OBJECT PATH` | writes TSV |
//!
//! Relative paths resolve against the script's directory. Saving a graph
//! writes its edge table; saving ranks writes `node, rank` rows.
//!
//! The whole script is parsed before anything runs, so a syntax error on
//! any line leaves the workspace untouched.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::algo::{self, RankVector};
use crate::convert::{graph_to_edge_table, graph_to_node_table, table_to_graph, EdgeSpec};
use crate::error::Error;
use crate::graph::Graph;
use crate::table::{load_tsv, save_tsv, table_from_map, Aggregate, ColumnTable, Metric, Predicate, Schema};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("cannot read script {path}: {source}")]
    Script {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: undefined object `{name}`")]
    Undefined { line: usize, name: String },

    #[error("line {line}: `{name}` is a {found}, expected a {expected}")]
    WrongKind {
        line: usize,
        name: String,
        expected: Kind,
        found: Kind,
    },

    #[error("line {line}: {source}")]
    Operator {
        line: usize,
        #[source]
        source: Error,
    },
}

impl PipelineError {
    /// Process exit status: 2 for unusable scripts, 1 for failures while
    /// running one.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Script { .. } | PipelineError::Syntax { .. } => 2,
            _ => 1,
        }
    }

    pub fn line(&self) -> Option<usize> {
        match self {
            PipelineError::Script { .. } => None,
            PipelineError::Syntax { line, .. }
            | PipelineError::Undefined { line, .. }
            | PipelineError::WrongKind { line, .. }
            | PipelineError::Operator { line, .. } => Some(*line),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Table,
    Graph,
    Ranks,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Table => "table",
            Kind::Graph => "graph",
            Kind::Ranks => "ranks",
        })
    }
}

#[derive(Debug, Clone)]
pub enum Object {
    Table(ColumnTable),
    Graph(Graph),
    Ranks(RankVector),
}

impl Object {
    pub fn kind(&self) -> Kind {
        match self {
            Object::Table(_) => Kind::Table,
            Object::Graph(_) => Kind::Graph,
            Object::Ranks(_) => Kind::Ranks,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Command {
    Load {
        path: String,
        schema: Schema,
    },
    Select {
        src: String,
        predicate: String,
    },
    Join {
        left: String,
        right: String,
        left_col: String,
        right_col: String,
    },
    Project {
        src: String,
        cols: Vec<String>,
    },
    Group {
        src: String,
        keys: Vec<String>,
        aggs: Vec<Aggregate>,
    },
    Order {
        src: String,
        cols: Vec<String>,
        ascending: bool,
    },
    SimJoin {
        left: String,
        right: String,
        cols: Vec<(String, String)>,
        metric: Metric,
        threshold: f64,
    },
    NextK {
        src: String,
        group_col: String,
        order_col: String,
        k: usize,
    },
    ToGraph {
        src: String,
        spec: EdgeSpec,
    },
    ToTable {
        src: String,
        args: Vec<String>,
    },
    PageRank {
        src: String,
        damping: f64,
        iterations: usize,
    },
    Triangles {
        src: String,
    },
    Sssp {
        src: String,
        source: i64,
    },
    Scc {
        src: String,
    },
    KCore {
        src: String,
        k: usize,
    },
    Save {
        src: String,
        path: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
struct Step {
    line: usize,
    target: Option<String>,
    command: Command,
}

/// A parsed script, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Script {
    steps: Vec<Step>,
}

impl Script {
    pub fn parse(text: &str) -> Result<Script, PipelineError> {
        let mut steps = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            steps.push(parse_line(content).map_err(|message| PipelineError::Syntax { line, message })?);
            steps.last_mut().unwrap().line = line;
        }
        Ok(Script { steps })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn parse_line(content: &str) -> Result<Step, String> {
    let (target, body) = match content.split_once('=') {
        Some((lhs, rhs)) if is_name(lhs.trim()) => (Some(lhs.trim().to_string()), rhs.trim()),
        _ => (None, content),
    };
    let (verb, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
    let rest = rest.trim();
    let args: Vec<&str> = rest.split_whitespace().collect();

    let arity = |min: usize, max: usize| -> Result<(), String> {
        if args.len() < min || args.len() > max {
            let expected = if min == max {
                min.to_string()
            } else {
                format!("{min} to {max}")
            };
            Err(format!("`{verb}` takes {expected} arguments, found {}", args.len()))
        } else {
            Ok(())
        }
    };
    let list = |s: &str| -> Vec<String> { s.split(',').map(|c| c.trim().to_string()).collect() };
    let number = |s: &str, what: &str| -> Result<usize, String> {
        s.parse()
            .map_err(|_| format!("{what} must be a non-negative integer, found `{s}`"))
    };

    let command = match verb {
        "load" => {
            arity(2, 2)?;
            let schema = Schema::parse(args[1]).map_err(|e| e.to_string())?;
            Command::Load {
                path: args[0].to_string(),
                schema,
            }
        }
        "select" => {
            let (src, predicate) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
            if predicate.trim().is_empty() {
                return Err("`select` takes a table and a predicate".into());
            }
            Command::Select {
                src: src.to_string(),
                predicate: predicate.trim().to_string(),
            }
        }
        "join" => {
            arity(4, 4)?;
            Command::Join {
                left: args[0].into(),
                right: args[1].into(),
                left_col: args[2].into(),
                right_col: args[3].into(),
            }
        }
        "project" => {
            arity(2, 2)?;
            Command::Project {
                src: args[0].into(),
                cols: list(args[1]),
            }
        }
        "group" => {
            arity(3, 3)?;
            let keys = if args[1] == "-" { Vec::new() } else { list(args[1]) };
            let aggs = args[2]
                .split(',')
                .map(|a| a.parse::<Aggregate>().map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;
            Command::Group {
                src: args[0].into(),
                keys,
                aggs,
            }
        }
        "order" => {
            arity(2, 3)?;
            let ascending = match args.get(2).copied() {
                None | Some("asc") => true,
                Some("desc") => false,
                Some(other) => return Err(format!("sort direction must be asc or desc, found `{other}`")),
            };
            Command::Order {
                src: args[0].into(),
                cols: list(args[1]),
                ascending,
            }
        }
        "simjoin" => {
            arity(5, 5)?;
            let cols = args[2]
                .split(',')
                .map(|pair| {
                    pair.split_once(':')
                        .map(|(l, r)| (l.to_string(), r.to_string()))
                        .ok_or_else(|| format!("expected LEFT:RIGHT column pair, found `{pair}`"))
                })
                .collect::<Result<_, _>>()?;
            let metric = args[3].parse().map_err(|e: Error| e.to_string())?;
            let threshold = args[4]
                .parse()
                .map_err(|_| format!("threshold must be a number, found `{}`", args[4]))?;
            Command::SimJoin {
                left: args[0].into(),
                right: args[1].into(),
                cols,
                metric,
                threshold,
            }
        }
        "nextk" => {
            arity(4, 4)?;
            Command::NextK {
                src: args[0].into(),
                group_col: args[1].into(),
                order_col: args[2].into(),
                k: number(args[3], "k")?,
            }
        }
        "tograph" => {
            arity(3, 3)?;
            Command::ToGraph {
                src: args[0].into(),
                spec: EdgeSpec::new(args[1], args[2]),
            }
        }
        "totable" => {
            arity(1, 3)?;
            Command::ToTable {
                src: args[0].into(),
                args: args[1..].iter().map(|s| s.to_string()).collect(),
            }
        }
        "pagerank" => {
            arity(1, 3)?;
            let damping = match args.get(1) {
                Some(d) => d
                    .parse()
                    .map_err(|_| format!("damping must be a number, found `{d}`"))?,
                None => algo::DEFAULT_DAMPING,
            };
            let iterations = match args.get(2) {
                Some(i) => number(i, "iterations")?,
                None => algo::DEFAULT_ITERATIONS,
            };
            Command::PageRank {
                src: args[0].into(),
                damping,
                iterations,
            }
        }
        "triangles" => {
            arity(1, 1)?;
            Command::Triangles { src: args[0].into() }
        }
        "sssp" => {
            arity(2, 2)?;
            let source = args[1]
                .parse()
                .map_err(|_| format!("source must be a node id, found `{}`", args[1]))?;
            Command::Sssp {
                src: args[0].into(),
                source,
            }
        }
        "scc" => {
            arity(1, 1)?;
            Command::Scc { src: args[0].into() }
        }
        "kcore" => {
            arity(2, 2)?;
            Command::KCore {
                src: args[0].into(),
                k: number(args[1], "k")?,
            }
        }
        "save" => {
            arity(2, 2)?;
            Command::Save {
                src: args[0].into(),
                path: args[1].into(),
            }
        }
        "" => return Err("missing verb".into()),
        other => return Err(format!("unknown verb `{other}`")),
    };

    match (&command, &target) {
        (Command::Save { .. }, Some(_)) => Err("`save` does not produce a value".into()),
        (Command::Save { .. }, None) => Ok(Step {
            line: 0,
            target,
            command,
        }),
        (_, None) => Err(format!(
            "`{verb}` result must be bound to a name, as in `name = {verb} ...`"
        )),
        (_, Some(_)) => Ok(Step {
            line: 0,
            target,
            command,
        }),
    }
}

/// Named objects produced by a running script.
#[derive(Debug, Default)]
pub struct Workspace {
    objects: HashMap<String, Object>,
    base_dir: PathBuf,
}

impl Workspace {
    /// A workspace resolving relative paths against `base_dir`.
    pub fn new(base_dir: impl Into<PathBuf>) -> Self {
        Workspace {
            objects: HashMap::new(),
            base_dir: base_dir.into(),
        }
    }

    pub fn get(&self, name: &str) -> Option<&Object> {
        self.objects.get(name)
    }

    pub fn table(&self, name: &str) -> Option<&ColumnTable> {
        match self.objects.get(name) {
            Some(Object::Table(t)) => Some(t),
            _ => None,
        }
    }

    pub fn graph(&self, name: &str) -> Option<&Graph> {
        match self.objects.get(name) {
            Some(Object::Graph(g)) => Some(g),
            _ => None,
        }
    }

    pub fn ranks(&self, name: &str) -> Option<&RankVector> {
        match self.objects.get(name) {
            Some(Object::Ranks(r)) => Some(r),
            _ => None,
        }
    }

    pub fn names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.objects.keys().map(String::as_str).collect();
        names.sort_unstable();
        names
    }

    /// Runs every step in order, stopping at the first failure.
    pub fn run(&mut self, script: &Script) -> Result<(), PipelineError> {
        for step in &script.steps {
            self.run_step(step)?;
        }
        Ok(())
    }

    fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn lookup(&self, line: usize, name: &str) -> Result<&Object, PipelineError> {
        self.objects.get(name).ok_or_else(|| PipelineError::Undefined {
            line,
            name: name.to_string(),
        })
    }

    fn expect<'a, T>(
        &'a self,
        line: usize,
        name: &str,
        expected: Kind,
        pick: impl FnOnce(&'a Object) -> Option<&'a T>,
    ) -> Result<&'a T, PipelineError> {
        let object = self.lookup(line, name)?;
        pick(object).ok_or_else(|| PipelineError::WrongKind {
            line,
            name: name.to_string(),
            expected,
            found: object.kind(),
        })
    }

    fn table_arg(&self, line: usize, name: &str) -> Result<&ColumnTable, PipelineError> {
        self.expect(line, name, Kind::Table, |o| match o {
            Object::Table(t) => Some(t),
            _ => None,
        })
    }

    fn graph_arg(&self, line: usize, name: &str) -> Result<&Graph, PipelineError> {
        self.expect(line, name, Kind::Graph, |o| match o {
            Object::Graph(g) => Some(g),
            _ => None,
        })
    }

    fn run_step(&mut self, step: &Step) -> Result<(), PipelineError> {
        let line = step.line;
        let op = |source: Error| PipelineError::Operator { line, source };
        let result = match &step.command {
            Command::Load { path, schema } => Object::Table(load_tsv(self.resolve(path), schema).map_err(op)?),
            Command::Select { src, predicate } => {
                let t = self.table_arg(line, src)?;
                let pred = Predicate::parse(predicate, t.schema()).map_err(op)?;
                Object::Table(t.select(&pred).map_err(op)?)
            }
            Command::Join {
                left,
                right,
                left_col,
                right_col,
            } => {
                let (l, r) = (self.table_arg(line, left)?, self.table_arg(line, right)?);
                Object::Table(l.join(r, left_col, right_col).map_err(op)?)
            }
            Command::Project { src, cols } => Object::Table(self.table_arg(line, src)?.project(cols).map_err(op)?),
            Command::Group { src, keys, aggs } => {
                Object::Table(self.table_arg(line, src)?.group_aggregate(keys, aggs).map_err(op)?)
            }
            Command::Order { src, cols, ascending } => {
                Object::Table(self.table_arg(line, src)?.order(cols, *ascending).map_err(op)?)
            }
            Command::SimJoin {
                left,
                right,
                cols,
                metric,
                threshold,
            } => {
                let (l, r) = (self.table_arg(line, left)?, self.table_arg(line, right)?);
                Object::Table(l.sim_join(r, cols, *metric, *threshold).map_err(op)?)
            }
            Command::NextK {
                src,
                group_col,
                order_col,
                k,
            } => Object::Table(
                self.table_arg(line, src)?
                    .next_k(group_col, order_col, *k)
                    .map_err(op)?,
            ),
            Command::ToGraph { src, spec } => {
                Object::Graph(table_to_graph(self.table_arg(line, src)?, spec).map_err(op)?)
            }
            Command::ToTable { src, args } => Object::Table(self.to_table(line, src, args)?),
            Command::PageRank {
                src,
                damping,
                iterations,
            } => Object::Ranks(algo::pagerank(self.graph_arg(line, src)?, *damping, *iterations).map_err(op)?),
            Command::Triangles { src } => {
                let count = algo::triangle_count(self.graph_arg(line, src)?);
                Object::Table(ColumnTable::from_int_columns([("triangles", vec![count as i64])]).map_err(op)?)
            }
            Command::Sssp { src, source } => {
                let d = algo::sssp(self.graph_arg(line, src)?, *source).map_err(op)?;
                let (nodes, dist): (Vec<i64>, Vec<i64>) =
                    d.iter().filter_map(|(id, dist)| dist.map(|x| (id, x as i64))).unzip();
                Object::Table(ColumnTable::from_int_columns([("node", nodes), ("distance", dist)]).map_err(op)?)
            }
            Command::Scc { src } => {
                let c = algo::scc(self.graph_arg(line, src)?);
                let (nodes, labels): (Vec<i64>, Vec<i64>) = c.iter().map(|(id, l)| (id, l as i64)).unzip();
                Object::Table(ColumnTable::from_int_columns([("node", nodes), ("component", labels)]).map_err(op)?)
            }
            Command::KCore { src, k } => Object::Graph(algo::k_core(self.graph_arg(line, src)?, *k).map_err(op)?),
            Command::Save { src, path } => {
                let path = self.resolve(path);
                let table = match self.lookup(line, src)? {
                    Object::Table(t) => {
                        save_tsv(t, &path).map_err(op)?;
                        return Ok(());
                    }
                    Object::Graph(g) => graph_to_edge_table(g),
                    Object::Ranks(r) => table_from_map(r.iter(), "node", "rank").map_err(op)?,
                };
                save_tsv(&table, &path).map_err(op)?;
                return Ok(());
            }
        };
        let target = step.target.clone().expect("parser binds every value");
        self.objects.insert(target, result);
        Ok(())
    }

    fn to_table(&self, line: usize, src: &str, args: &[String]) -> Result<ColumnTable, PipelineError> {
        let op = |source: Error| PipelineError::Operator { line, source };
        let bad = |message: String| PipelineError::Operator {
            line,
            source: Error::InvalidArgument(message),
        };
        match self.lookup(line, src)? {
            Object::Graph(g) => match args.first().map(String::as_str) {
                None | Some("edges") if args.len() <= 1 => Ok(graph_to_edge_table(g)),
                Some("nodes") if args.len() == 1 => graph_to_node_table(g, None, "value").map_err(op),
                _ => Err(bad(format!(
                    "graph tables take `edges` or `nodes`, found `{}`",
                    args.join(" ")
                ))),
            },
            Object::Ranks(r) => match args {
                [key, value] => table_from_map(r.iter(), key, value).map_err(op),
                [] => table_from_map(r.iter(), "node", "rank").map_err(op),
                _ => Err(bad("ranks tables take KEY_NAME VALUE_NAME".into())),
            },
            Object::Table(_) => Err(PipelineError::WrongKind {
                line,
                name: src.to_string(),
                expected: Kind::Graph,
                found: Kind::Table,
            }),
        }
    }
}

/// Parses and runs `text`, resolving paths against `base_dir`.
pub fn run_source(text: &str, base_dir: impl Into<PathBuf>) -> Result<Workspace, PipelineError> {
    let script = Script::parse(text)?;
    let mut ws = Workspace::new(base_dir);
    ws.run(&script)?;
    Ok(ws)
}

/// Reads, parses and runs the script at `path`.
pub fn run_script(path: impl AsRef<Path>) -> Result<Workspace, PipelineError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Script {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    run_source(&text, base)
}
