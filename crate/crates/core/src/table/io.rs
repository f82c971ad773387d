//! Tab-separated text format: one row per line, fields split by a single tab,
//! no header, no quoting. The schema is always supplied by the caller.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use super::{Column, ColumnTable, Schema, StringPool};
use crate::error::{Error, Result};

pub fn load_tsv(path: impl AsRef<Path>, schema: &Schema) -> Result<ColumnTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_tsv(BufReader::with_capacity(1 << 20, file), schema).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Parses TSV text. Row ids are assigned `0..n` in input order.
pub fn read_tsv(reader: impl Read, schema: &Schema) -> Result<ColumnTable> {
    let mut reader = BufReader::new(reader);
    let mut columns: Vec<Column> = schema.columns().iter().map(|&(_, ty)| Column::empty(ty)).collect();
    let mut pool = StringPool::default();
    let mut buf = String::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        let read = reader.read_line(&mut buf).map_err(|e| Error::io("<input>", e))?;
        if read == 0 {
            break;
        }
        line_no += 1;
        let line = buf.strip_suffix('\n').unwrap_or(&buf);
        let line = line.strip_suffix('\r').unwrap_or(line);
        let mut fields = line.split('\t');
        for (i, column) in columns.iter_mut().enumerate() {
            let Some(field) = fields.next() else {
                return Err(Error::Arity {
                    line: line_no,
                    expected: schema.len(),
                    found: i,
                });
            };
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                column: schema.name(i).to_string(),
                message,
            };
            match column {
                Column::Int(v) => v.push(
                    field
                        .parse()
                        .map_err(|e| parse_err(format!("`{field}` is not an integer ({e})")))?,
                ),
                Column::Float(v) => v.push(
                    field
                        .parse()
                        .map_err(|e| parse_err(format!("`{field}` is not a float ({e})")))?,
                ),
                Column::Str(v) => v.push(pool.intern(field)),
            }
        }
        let extra = fields.count();
        if extra > 0 {
            return Err(Error::Arity {
                line: line_no,
                expected: schema.len(),
                found: schema.len() + extra,
            });
        }
    }
    ColumnTable::assemble(schema.clone(), columns, None, Arc::new(pool))
}

pub fn save_tsv(table: &ColumnTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_tsv(table, BufWriter::with_capacity(1 << 20, file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Writes `table` as TSV. Strings containing tabs or newlines are rejected.
pub fn write_tsv(table: &ColumnTable, mut out: impl Write) -> Result<()> {
    let io = |e| Error::io("<output>", e);
    for (i, column) in table.columns().iter().enumerate() {
        if let Column::Str(codes) = column {
            if let Some(&bad) = codes
                .iter()
                .find(|&&c| table.pool().get(c).contains(['\t', '\n', '\r']))
            {
                return Err(Error::InvalidArgument(format!(
                    "column `{}` holds a value with a tab or newline: {:?}",
                    table.schema().name(i),
                    table.pool().get(bad)
                )));
            }
        }
    }
    for row in 0..table.num_rows() {
        for (i, column) in table.columns().iter().enumerate() {
            if i > 0 {
                out.write_all(b"\t").map_err(io)?;
            }
            match column {
                Column::Int(v) => write!(out, "{}", v[row]),
                Column::Float(v) => write!(out, "{}", v[row]),
                Column::Str(v) => out.write_all(table.pool().get(v[row]).as_bytes()),
            }
            .map_err(io)?;
        }
        out.write_all(b"\n").map_err(io)?;
    }
    out.flush().map_err(io)
}
