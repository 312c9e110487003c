// Copyright 2026 The sgb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! CSV-backed relations.

use std::io::Read;
use std::path::Path;

use super::QueryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnType {
    Integer,
    Real,
    Text,
}

impl ColumnType {
    pub fn is_numeric(self) -> bool {
        matches!(self, ColumnType::Integer | ColumnType::Real)
    }
}

/// In-memory table of string cells. Row ids are zero-based file order
/// (header excluded).
#[derive(Debug, Clone)]
pub struct Relation {
    name: String,
    columns: Vec<String>,
    types: Vec<ColumnType>,
    rows: Vec<Vec<String>>,
}

impl Relation {
    /// Builds a relation from a header and rows, inferring column types.
    /// Empty cells are ignored by inference.
    pub fn new(
        name: impl Into<String>,
        columns: Vec<String>,
        rows: Vec<Vec<String>>,
    ) -> Result<Self, QueryError> {
        if let Some((i, r)) = rows
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != columns.len())
        {
            return Err(QueryError::Io(format!(
                "row {} has {} fields, header has {}",
                i + 1,
                r.len(),
                columns.len()
            )));
        }
        let types = (0..columns.len())
            .map(|c| infer(rows.iter().map(|r| r[c].as_str())))
            .collect();
        Ok(Self {
            name: name.into(),
            columns,
            types,
            rows,
        })
    }

    /// Reads a headed CSV file. Fields are trimmed; ragged rows are an error.
    pub fn ingest_csv(path: impl AsRef<Path>, name: &str) -> Result<Self, QueryError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| QueryError::Io(format!("{}: {e}", path.display())))?;
        Self::from_reader(file, name)
    }

    pub fn from_reader(reader: impl Read, name: &str) -> Result<Self, QueryError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let columns: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if columns.is_empty() || columns.iter().all(String::is_empty) {
            return Err(QueryError::Io("missing header row".into()));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            rows.push(rec?.iter().map(str::to_string).collect());
        }
        Self::new(name, columns, rows)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn column_type(&self, col: usize) -> ColumnType {
        self.types[col]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn cell(&self, row: usize, col: usize) -> &str {
        &self.rows[row][col]
    }

    /// Numeric value of a cell; `None` when empty or unparsable.
    pub fn number(&self, row: usize, col: usize) -> Option<f64> {
        parse_number(&self.rows[row][col])
    }

    /// Case-insensitive column lookup.
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name).or_else(|| {
            self.columns
                .iter()
                .position(|c| c.eq_ignore_ascii_case(name))
        })
    }

    /// Row ids whose two columns both hold finite numbers, and the number of
    /// rows rejected.
    pub fn finite_rows(&self, x: usize, y: usize) -> (Vec<usize>, usize) {
        let ok: Vec<usize> = (0..self.len())
            .filter(|&r| {
                let fin = |c| self.number(r, c).is_some_and(f64::is_finite);
                fin(x) && fin(y)
            })
            .collect();
        let rejected = self.len() - ok.len();
        (ok, rejected)
    }
}

pub(crate) fn parse_number(s: &str) -> Option<f64> {
    if s.is_empty() {
        None
    } else {
        s.parse().ok()
    }
}

fn infer<'a>(cells: impl Iterator<Item = &'a str>) -> ColumnType {
    let mut ty = None;
    for c in cells.filter(|c| !c.is_empty()) {
        if c.parse::<i64>().is_ok() {
            ty.get_or_insert(ColumnType::Integer);
        } else if c.parse::<f64>().is_ok() {
            ty = Some(ColumnType::Real);
        } else {
            return ColumnType::Text;
        }
    }
    ty.unwrap_or(ColumnType::Text)
}
