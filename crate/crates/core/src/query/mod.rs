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

//! Query front end: parse a similarity GROUP BY statement, bind it to a CSV
//! relation and evaluate it with the grouping engines.

mod exec;
mod lexer;
mod parser;
mod plan;
mod relation;
mod render;

use thiserror::Error;

use crate::sgb_all::SgbError;

pub use exec::{execute, ExecOptions, ResultSet, Value};
pub use lexer::{tokenize, Pos, Tok, Token};
pub use parser::{parse, parse_with_notes};
pub use plan::{
    AggArg, AggFn, AggregateSpec, CmpOp, GroupingMode, Literal, Predicate, QueryPlan, Threshold,
};
pub use relation::{ColumnType, Relation};
pub use render::{render, render_csv, render_json, OutputFormat};

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Semantic(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Engine(#[from] SgbError),
}

impl QueryError {
    pub fn syntax(pos: Pos, message: impl Into<String>) -> Self {
        QueryError::Syntax {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }

    /// Source position of a syntax error.
    pub fn position(&self) -> Option<Pos> {
        match self {
            QueryError::Syntax { line, column, .. } => Some(Pos {
                line: *line,
                column: *column,
            }),
            _ => None,
        }
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            QueryError::Syntax { .. } => 2,
            QueryError::Semantic(_) | QueryError::Engine(_) => 3,
            QueryError::Io(_) => 4,
        }
    }
}

impl From<std::io::Error> for QueryError {
    fn from(e: std::io::Error) -> Self {
        QueryError::Io(e.to_string())
    }
}

impl From<csv::Error> for QueryError {
    fn from(e: csv::Error) -> Self {
        QueryError::Io(e.to_string())
    }
}
