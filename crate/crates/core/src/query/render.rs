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

//! Result rendering.

use serde_json::{Map, Number, Value as Json};

use super::exec::{ResultSet, Value};
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("unknown output format '{s}'")),
        }
    }
}

pub fn render(rs: &ResultSet, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => render_csv(rs),
        OutputFormat::Json => render_json(rs),
    }
}

fn polygon_text(pts: &[Point]) -> String {
    pts.iter()
        .map(|p| format!("{} {}", p.x, p.y))
        .collect::<Vec<_>>()
        .join(", ")
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Int(i) => i.to_string(),
        Value::Real(r) => r.to_string(),
        Value::Text(s) => s.clone(),
        Value::List(vs) => vs.iter().map(cell_text).collect::<Vec<_>>().join(";"),
        Value::Polygon(pts) => polygon_text(pts),
    }
}

/// CSV with a header row; lists are `;`-joined and polygons are
/// `x1 y1, x2 y2, ...`.
pub fn render_csv(rs: &ResultSet) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let write = |w: &mut csv::Writer<Vec<u8>>, rec: Vec<String>| {
        w.write_record(rec).expect("writing to memory");
    };
    write(&mut w, rs.columns.clone());
    for row in &rs.rows {
        write(&mut w, row.iter().map(cell_text).collect());
    }
    let bytes = w.into_inner().expect("flushing to memory");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

fn json_value(v: &Value) -> Json {
    match v {
        Value::Null => Json::Null,
        Value::Int(i) => Json::from(*i),
        Value::Real(r) => Number::from_f64(*r).map_or(Json::Null, Json::Number),
        Value::Text(s) => Json::String(s.clone()),
        Value::List(vs) => Json::Array(vs.iter().map(json_value).collect()),
        Value::Polygon(pts) => Json::String(polygon_text(pts)),
    }
}

/// JSON array with one object per group; keys follow the column order.
pub fn render_json(rs: &ResultSet) -> String {
    let rows: Vec<Json> = rs
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Json> = rs
                .columns
                .iter()
                .cloned()
                .zip(row.iter().map(json_value))
                .collect();
            Json::Object(obj)
        })
        .collect();
    serde_json::to_string_pretty(&Json::Array(rows)).expect("serializing json")
}
