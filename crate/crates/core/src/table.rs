//! Input relations: tuples, tables and the aligned left/right table pair.
//!
//! Tables are read from comma-separated text with a header row. One column is
//! named by the user as the id column; every other column becomes an
//! attribute. The two tables are aligned on the union of their attribute
//! names, with absent columns filled by empty text.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// One record. `values` is aligned with the owning [`TablePair`]'s schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tuple {
    pub id: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    side: Side,
    tuples: Vec<Tuple>,
    index: HashMap<String, usize>,
}

impl Table {
    fn new(side: Side, tuples: Vec<Tuple>) -> Result<Self> {
        if tuples.is_empty() {
            return Err(Error::EmptyTable(side.to_string()));
        }
        let mut index = HashMap::with_capacity(tuples.len());
        for (pos, tuple) in tuples.iter().enumerate() {
            if tuple.id.trim().is_empty() {
                return Err(Error::parse(Some(pos as u64 + 2), format!("empty id in {side} table")));
            }
            if index.insert(tuple.id.clone(), pos).is_some() {
                return Err(Error::DuplicateId {
                    table: side.to_string(),
                    id: tuple.id.clone(),
                });
            }
        }
        Ok(Self {
            side,
            tuples,
            index,
        })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub fn get(&self, id: &str) -> Option<&Tuple> {
        self.index.get(id).map(|&pos| &self.tuples[pos])
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }
}

/// A table as read from disk, before schema alignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTable {
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<String>)>,
}

impl RawTable {
    /// Parses delimited text with a header row. `table` names the table in
    /// error messages.
    pub fn from_reader<R: Read>(reader: R, id_column: &str, table: &str) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(reader);
        let header = csv.headers()?.clone();
        let mut seen = HashSet::new();
        for name in header.iter() {
            if !seen.insert(name) {
                return Err(Error::parse(Some(1), format!("duplicate column {name:?}")));
            }
        }
        let id_pos = header
            .iter()
            .position(|h| h == id_column)
            .ok_or_else(|| Error::MissingIdColumn {
                table: table.to_string(),
                column: id_column.to_string(),
            })?;
        let columns: Vec<String> = header
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != id_pos)
            .map(|(_, h)| h.to_string())
            .collect();

        let mut rows = Vec::new();
        for record in csv.records() {
            let record = record?;
            let id = record[id_pos].to_string();
            let values = record
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != id_pos)
                .map(|(_, v)| v.to_string())
                .collect();
            rows.push((id, values));
        }
        Ok(Self { columns, rows })
    }

    pub fn from_path(path: &Path, id_column: &str, table: &str) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(std::io::BufReader::new(file), id_column, table)
    }
}

/// The two input relations with a shared, aligned schema. The left table is
/// the reference side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TablePair {
    schema: Vec<String>,
    left: Table,
    right: Table,
}

impl TablePair {
    /// Aligns two raw tables on the union of their columns (left order first,
    /// then right-only columns in right order).
    pub fn align(left: RawTable, right: RawTable) -> Result<Self> {
        let mut schema = left.columns.clone();
        for col in &right.columns {
            if !schema.contains(col) {
                schema.push(col.clone());
            }
        }
        let left = Table::new(Side::Left, realign(left, &schema))?;
        let right = Table::new(Side::Right, realign(right, &schema))?;
        Ok(Self {
            schema,
            left,
            right,
        })
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|s| s == name)
    }

    pub fn left(&self) -> &Table {
        &self.left
    }

    pub fn right(&self) -> &Table {
        &self.right
    }

    pub fn table(&self, side: Side) -> &Table {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// Values of `attrs` joined by single spaces. Unknown attributes and
    /// missing ids contribute nothing.
    pub fn concat_attrs(&self, side: Side, id: &str, attrs: &[String]) -> String {
        let Some(tuple) = self.table(side).get(id) else {
            return String::new();
        };
        self.concat_tuple(tuple, attrs)
    }

    pub fn concat_tuple(&self, tuple: &Tuple, attrs: &[String]) -> String {
        attrs
            .iter()
            .filter_map(|a| self.attribute_index(a))
            .map(|i| tuple.values[i].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Writes one side back out as delimited text, id column first.
    pub fn write_side<W: Write>(&self, side: Side, id_column: &str, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        let mut header = vec![id_column];
        header.extend(self.schema.iter().map(String::as_str));
        csv.write_record(&header)?;
        for tuple in self.table(side).tuples() {
            let mut row = vec![tuple.id.as_str()];
            row.extend(tuple.values.iter().map(String::as_str));
            csv.write_record(&row)?;
        }
        csv.flush().map_err(|e| Error::io("<table>", e))?;
        Ok(())
    }
}

fn realign(raw: RawTable, schema: &[String]) -> Vec<Tuple> {
    let positions: Vec<Option<usize>> = schema
        .iter()
        .map(|name| raw.columns.iter().position(|c| c == name))
        .collect();
    raw.rows
        .into_iter()
        .map(|(id, values)| Tuple {
            id,
            values: positions
                .iter()
                .map(|p| p.map(|i| values[i].clone()).unwrap_or_default())
                .collect(),
        })
        .collect()
}

/// Reads both files and aligns them.
pub fn ingest_table_pair(left_path: &Path, right_path: &Path, id_column: &str) -> Result<TablePair> {
    let left = RawTable::from_path(left_path, id_column, "left")?;
    let right = RawTable::from_path(right_path, id_column, "right")?;
    TablePair::align(left, right)
}
