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

//! Parsed query representation and its canonical text form.

use std::fmt;

use crate::geometry::Metric;
use crate::sgb_all::OverlapPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AggFn {
    Count,
    Sum,
    Avg,
    Min,
    Max,
    /// List of the argument's values (`List-ID`, `array_agg`).
    Collect,
    /// Convex hull of the grouping columns (`ST_Polygon`).
    HullPolygon,
}

impl AggFn {
    /// Resolves a function name, case-insensitively, including the aliases
    /// seen in application queries.
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name.to_ascii_uppercase().as_str() {
            "COUNT" => AggFn::Count,
            "SUM" => AggFn::Sum,
            "AVG" | "AVERAGE" => AggFn::Avg,
            "MIN" => AggFn::Min,
            "MAX" => AggFn::Max,
            "COLLECT" | "LIST-ID" | "LIST_ID" | "ARRAY_AGG" => AggFn::Collect,
            "HULL_POLYGON" | "ST_POLYGON" => AggFn::HullPolygon,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            AggFn::Count => "count",
            AggFn::Sum => "sum",
            AggFn::Avg => "avg",
            AggFn::Min => "min",
            AggFn::Max => "max",
            AggFn::Collect => "collect",
            AggFn::HullPolygon => "hull_polygon",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AggArg {
    Star,
    Columns(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregateSpec {
    pub func: AggFn,
    pub arg: AggArg,
}

impl AggregateSpec {
    pub fn new(func: AggFn, arg: AggArg) -> Self {
        Self { func, arg }
    }

    pub fn count_star() -> Self {
        Self::new(AggFn::Count, AggArg::Star)
    }

    pub fn column(func: AggFn, col: &str) -> Self {
        Self::new(func, AggArg::Columns(vec![col.to_string()]))
    }

    /// Output column header, e.g. `count(*)` or `hull_polygon(lat, lon)`.
    pub fn label(&self) -> String {
        let arg = match &self.arg {
            AggArg::Star => "*".to_string(),
            AggArg::Columns(cs) => cs.join(", "),
        };
        format!("{}({arg})", self.func.name())
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
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "<>",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

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
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Predicate {
    pub column: String,
    pub op: CmpOp,
    pub value: Literal,
}

/// Similarity threshold: a literal or a named parameter bound at execution.
#[derive(Debug, Clone, PartialEq)]
pub enum Threshold {
    Value(f64),
    Param(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupingMode {
    /// DISTANCE-TO-ALL with its ON-OVERLAP clause.
    All(OverlapPolicy),
    /// DISTANCE-TO-ANY; overlaps merge groups so there is no policy.
    Any,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryPlan {
    pub source: String,
    pub projections: Vec<AggregateSpec>,
    /// Conjunction of simple comparisons.
    pub filter: Vec<Predicate>,
    pub group_cols: [String; 2],
    pub mode: GroupingMode,
    pub metric: Metric,
    pub eps: Threshold,
}

impl QueryPlan {
    pub fn overlap_policy(&self) -> Option<OverlapPolicy> {
        match self.mode {
            GroupingMode::All(p) => Some(p),
            GroupingMode::Any => None,
        }
    }
}

const RESERVED: &[&str] = &[
    "SELECT",
    "FROM",
    "WHERE",
    "GROUP",
    "GROUPBY",
    "BY",
    "AND",
    "WITHIN",
    "USING",
    "ON-OVERLAP",
    "ON_OVERLAP",
    "DISTANCE-TO-ALL",
    "DISTANCE-ALL",
    "DISTANCE-TO-ANY",
    "DISTANCE-ANY",
];

pub(crate) fn is_reserved(word: &str) -> bool {
    RESERVED.iter().any(|k| k.eq_ignore_ascii_case(word))
}

fn write_ident(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    let mut chars = name.chars();
    let bare = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        && !name.ends_with('-')
        && !name.contains("--")
        && !is_reserved(name);
    if bare {
        f.write_str(name)
    } else {
        write!(f, "\"{}\"", name.replace('"', "\"\""))
    }
}

struct Ident<'a>(&'a str);

impl fmt::Display for Ident<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_ident(f, self.0)
    }
}

/// Renders the canonical spelling of the plan; parsing the output yields an
/// equal plan.
impl fmt::Display for QueryPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SELECT ")?;
        for (i, p) in self.projections.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}(", p.func.name().to_ascii_uppercase())?;
            match &p.arg {
                AggArg::Star => f.write_str("*")?,
                AggArg::Columns(cs) => {
                    for (j, c) in cs.iter().enumerate() {
                        if j > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{}", Ident(c))?;
                    }
                }
            }
            f.write_str(")")?;
        }
        write!(f, " FROM {}", Ident(&self.source))?;
        for (i, pred) in self.filter.iter().enumerate() {
            f.write_str(if i == 0 { " WHERE " } else { " AND " })?;
            write!(f, "{} {} ", Ident(&pred.column), pred.op.symbol())?;
            match &pred.value {
                Literal::Number(n) => write!(f, "{n:?}")?,
                Literal::Text(s) => write!(f, "'{}'", s.replace('\'', "''"))?,
            }
        }
        write!(
            f,
            " GROUP BY {}, {} ",
            Ident(&self.group_cols[0]),
            Ident(&self.group_cols[1])
        )?;
        f.write_str(match self.mode {
            GroupingMode::All(_) => "DISTANCE-TO-ALL",
            GroupingMode::Any => "DISTANCE-TO-ANY",
        })?;
        write!(f, " {} WITHIN ", self.metric)?;
        match &self.eps {
            Threshold::Value(v) => write!(f, "{v:?}")?,
            Threshold::Param(p) => write!(f, "{}", Ident(p))?,
        }
        if let GroupingMode::All(policy) = self.mode {
            write!(f, " ON-OVERLAP {policy}")?;
        }
        Ok(())
    }
}
