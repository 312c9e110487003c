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

//! Plan evaluation against a relation.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::plan::{AggArg, AggFn, AggregateSpec, GroupingMode, Literal, QueryPlan, Threshold};
use super::relation::{parse_number, ColumnType, Relation};
use super::QueryError;
use crate::geometry::{convex_hull, Point};
use crate::group_store::{Record, RecordId};
use crate::sgb_all::{
    run_sgb_all, GroupingResult, SgbAllConfig, Strategy, DEFAULT_MAX_RECURSION_DEPTH,
};
use crate::sgb_any::{run_sgb_any, AnyStrategy, SgbAnyConfig};

/// Engine knobs that are not part of the query text.
#[derive(Debug, Clone)]
pub struct ExecOptions {
    pub strategy: Strategy,
    pub join_any_seed: Option<u64>,
    /// Values for symbolic thresholds, matched case-insensitively.
    pub params: HashMap<String, f64>,
    pub max_recursion_depth: usize,
}

impl Default for ExecOptions {
    fn default() -> Self {
        Self {
            strategy: Strategy::Indexed,
            join_any_seed: None,
            params: HashMap::new(),
            max_recursion_depth: DEFAULT_MAX_RECURSION_DEPTH,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    /// Aggregate over no non-empty cells.
    Null,
    Int(i64),
    Real(f64),
    Text(String),
    List(Vec<Value>),
    /// Hull vertices, counter-clockwise from the lexicographically least.
    Polygon(Vec<Point>),
}

impl Value {
    fn cmp_sort(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Text(a), Value::Text(b)) => a.cmp(b),
            (a, b) => match (a.as_f64(), b.as_f64()) {
                (Some(x), Some(y)) => x.total_cmp(&y),
                _ => Ordering::Equal,
            },
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Real(r) => Some(*r),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultSet {
    /// `group_id`, `group_size`, then one label per projection.
    pub columns: Vec<String>,
    /// One row per group, ordered by group id.
    pub rows: Vec<Vec<Value>>,
    /// Member row ids of each output row, in engine order.
    pub members: Vec<Vec<RecordId>>,
    pub eliminated: Vec<RecordId>,
    /// Rows that passed the WHERE clause and had finite grouping values.
    pub filtered_rows: usize,
    /// Rows that passed the WHERE clause but were rejected for non-finite or
    /// missing grouping values.
    pub rejected_rows: usize,
    pub pass_count: usize,
    pub truncated: bool,
}

/// Evaluates `plan` over `rel`. The plan's source name is not checked
/// against the relation name.
pub fn execute(
    plan: &QueryPlan,
    rel: &Relation,
    opts: &ExecOptions,
) -> Result<ResultSet, QueryError> {
    let col = |name: &str| {
        rel.column_index(name)
            .ok_or_else(|| QueryError::Semantic(format!("unknown column '{name}'")))
    };
    let gx = col(&plan.group_cols[0])?;
    let gy = col(&plan.group_cols[1])?;
    for (c, name) in [(gx, &plan.group_cols[0]), (gy, &plan.group_cols[1])] {
        if !rel.column_type(c).is_numeric() {
            return Err(QueryError::Semantic(format!(
                "grouping column '{name}' is not numeric"
            )));
        }
    }

    let eps = match &plan.eps {
        Threshold::Value(v) => *v,
        Threshold::Param(p) => opts
            .params
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(p))
            .map(|(_, v)| *v)
            .ok_or_else(|| QueryError::Semantic(format!("no value bound for threshold '{p}'")))?,
    };
    if !(eps.is_finite() && eps > 0.0) {
        return Err(QueryError::Semantic(format!(
            "similarity threshold must be positive, got {eps}"
        )));
    }

    let mut preds = Vec::with_capacity(plan.filter.len());
    for p in &plan.filter {
        let c = col(&p.column)?;
        if matches!(p.value, Literal::Number(_)) && !rel.column_type(c).is_numeric() {
            return Err(QueryError::Semantic(format!(
                "column '{}' is not numeric",
                p.column
            )));
        }
        preds.push((c, p));
    }
    let aggs = bind_aggregates(plan, rel, [gx, gy])?;

    let passes = |r: usize| {
        preds.iter().all(|(c, p)| {
            let cell = rel.cell(r, *c);
            let ord = match &p.value {
                Literal::Number(n) => parse_number(cell).and_then(|v| v.partial_cmp(n)),
                Literal::Text(s) => Some(cell.cmp(s.as_str())),
            };
            ord.is_some_and(|o| p.op.holds(o))
        })
    };
    let (finite, _) = rel.finite_rows(gx, gy);
    let selected = (0..rel.len()).filter(|&r| passes(r)).count();
    let records: Vec<Record> = finite
        .into_iter()
        .filter(|&r| passes(r))
        .map(|r| {
            let x = rel.number(r, gx).unwrap_or(f64::NAN);
            let y = rel.number(r, gy).unwrap_or(f64::NAN);
            Record::new(r as u64, x, y)
        })
        .collect();
    let rejected_rows = selected - records.len();
    if rejected_rows > 0 {
        log::warn!("{rejected_rows} row(s) skipped: non-finite or missing grouping values");
    }

    let result = run_engine(plan, &records, eps, opts)?;

    let mut columns = vec!["group_id".to_string(), "group_size".to_string()];
    columns.extend(plan.projections.iter().map(AggregateSpec::label));
    let mut rows = Vec::with_capacity(result.groups.len());
    let mut members = Vec::with_capacity(result.groups.len());
    for g in &result.groups {
        let ids: Vec<usize> = g.members.iter().map(|m| m.0 as usize).collect();
        let mut row = vec![Value::Int(g.id.0 as i64), Value::Int(ids.len() as i64)];
        for a in &aggs {
            row.push(a.eval(rel, &ids));
        }
        rows.push(row);
        members.push(g.members.clone());
    }
    Ok(ResultSet {
        columns,
        rows,
        members,
        eliminated: result.eliminated,
        filtered_rows: records.len(),
        rejected_rows,
        pass_count: result.pass_count,
        truncated: result.truncated,
    })
}

fn run_engine(
    plan: &QueryPlan,
    records: &[Record],
    eps: f64,
    opts: &ExecOptions,
) -> Result<GroupingResult, QueryError> {
    Ok(match plan.mode {
        GroupingMode::All(policy) => {
            let mut cfg = SgbAllConfig::new(plan.metric, eps, policy, opts.strategy);
            cfg.join_any_seed = opts.join_any_seed;
            cfg.max_recursion_depth = opts.max_recursion_depth;
            run_sgb_all(records, &cfg)?
        }
        GroupingMode::Any => {
            let strategy = match opts.strategy {
                Strategy::AllPairs => AnyStrategy::AllPairs,
                Strategy::BoundsChecking | Strategy::Indexed => AnyStrategy::Indexed,
            };
            run_sgb_any(records, &SgbAnyConfig::new(plan.metric, eps, strategy))?
        }
    })
}

enum BoundAgg {
    CountStar,
    Count(usize),
    Sum(usize, ColumnType),
    Avg(usize),
    Min(usize, ColumnType),
    Max(usize, ColumnType),
    Collect(usize, ColumnType),
    Hull(usize, usize),
}

fn bind_aggregates(
    plan: &QueryPlan,
    rel: &Relation,
    group: [usize; 2],
) -> Result<Vec<BoundAgg>, QueryError> {
    let mut out = Vec::with_capacity(plan.projections.len());
    for spec in &plan.projections {
        let cols: Vec<usize> = match &spec.arg {
            AggArg::Star => Vec::new(),
            AggArg::Columns(cs) => cs
                .iter()
                .map(|c| {
                    rel.column_index(c)
                        .ok_or_else(|| QueryError::Semantic(format!("unknown column '{c}'")))
                })
                .collect::<Result<_, _>>()?,
        };
        let one = || -> Result<usize, QueryError> {
            match cols.as_slice() {
                [c] => Ok(*c),
                _ => Err(QueryError::Semantic(format!(
                    "{} takes exactly one column",
                    spec.func.name()
                ))),
            }
        };
        let numeric = |c: usize| -> Result<usize, QueryError> {
            if rel.column_type(c).is_numeric() {
                Ok(c)
            } else {
                Err(QueryError::Semantic(format!(
                    "{} needs a numeric column, '{}' is text",
                    spec.func.name(),
                    rel.columns()[c]
                )))
            }
        };
        out.push(match spec.func {
            AggFn::Count if cols.is_empty() => BoundAgg::CountStar,
            AggFn::Count => BoundAgg::Count(one()?),
            AggFn::Sum => {
                let c = numeric(one()?)?;
                BoundAgg::Sum(c, rel.column_type(c))
            }
            AggFn::Avg => BoundAgg::Avg(numeric(one()?)?),
            AggFn::Min => BoundAgg::Min(one()?, rel.column_type(one()?)),
            AggFn::Max => BoundAgg::Max(one()?, rel.column_type(one()?)),
            AggFn::Collect => BoundAgg::Collect(one()?, rel.column_type(one()?)),
            AggFn::HullPolygon => match cols.as_slice() {
                [] => BoundAgg::Hull(group[0], group[1]),
                [x, y] => BoundAgg::Hull(numeric(*x)?, numeric(*y)?),
                _ => {
                    return Err(QueryError::Semantic(
                        "hull_polygon takes the two grouping columns".into(),
                    ))
                }
            },
        });
    }
    Ok(out)
}

fn cell_value(rel: &Relation, row: usize, col: usize, ty: ColumnType) -> Option<Value> {
    let s = rel.cell(row, col);
    if s.is_empty() {
        return None;
    }
    Some(match ty {
        ColumnType::Integer => Value::Int(s.parse().ok()?),
        ColumnType::Real => Value::Real(s.parse().ok()?),
        ColumnType::Text => Value::Text(s.to_string()),
    })
}

impl BoundAgg {
    fn eval(&self, rel: &Relation, rows: &[usize]) -> Value {
        let values = |c: usize, ty: ColumnType| -> Vec<Value> {
            rows.iter()
                .filter_map(|&r| cell_value(rel, r, c, ty))
                .collect()
        };
        let reals = |c: usize| -> Vec<f64> {
            rows.iter()
                .filter_map(|&r| rel.number(r, c))
                .filter(|v| !v.is_nan())
                .collect()
        };
        match *self {
            BoundAgg::CountStar => Value::Int(rows.len() as i64),
            BoundAgg::Count(c) => {
                Value::Int(rows.iter().filter(|&&r| !rel.cell(r, c).is_empty()).count() as i64)
            }
            BoundAgg::Sum(c, ColumnType::Integer) => Value::Int(
                values(c, ColumnType::Integer)
                    .iter()
                    .map(|v| match v {
                        Value::Int(i) => *i,
                        _ => 0,
                    })
                    .fold(0i64, i64::wrapping_add),
            ),
            BoundAgg::Sum(c, _) => Value::Real(reals(c).iter().sum()),
            BoundAgg::Avg(c) => {
                let v = reals(c);
                if v.is_empty() {
                    Value::Null
                } else {
                    Value::Real(v.iter().sum::<f64>() / v.len() as f64)
                }
            }
            BoundAgg::Min(c, ty) => extreme(values(c, ty), Ordering::Less),
            BoundAgg::Max(c, ty) => extreme(values(c, ty), Ordering::Greater),
            BoundAgg::Collect(c, ty) => {
                let mut v = values(c, ty);
                v.sort_by(Value::cmp_sort);
                Value::List(v)
            }
            BoundAgg::Hull(x, y) => {
                let pts: Vec<Point> = rows
                    .iter()
                    .filter_map(|&r| Some(Point::new(rel.number(r, x)?, rel.number(r, y)?)))
                    .filter(Point::is_finite)
                    .collect();
                Value::Polygon(convex_hull(&pts).vertices().to_vec())
            }
        }
    }
}

fn extreme(values: Vec<Value>, want: Ordering) -> Value {
    values
        .into_iter()
        .reduce(|best, v| if v.cmp_sort(&best) == want { v } else { best })
        .unwrap_or(Value::Null)
}
