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

//! Recursive-descent parser for the similarity GROUP BY dialect.
//!
//! ```text
//! query      := SELECT agg (',' agg)* FROM ident
//!               [WHERE pred (AND pred)*]
//!               GROUP BY col (',' | AND) col dist [';']
//! dist       := (DISTANCE-TO-ALL | DISTANCE-ALL) metricSpec overlap
//!             | (DISTANCE-TO-ANY | DISTANCE-ANY) metricSpec
//! metricSpec := metric WITHIN threshold | WITHIN threshold USING metric
//! metric     := L2 | LINF | LTWO | LONE
//! overlap    := (ON-OVERLAP | ON_OVERLAP) (JOIN-ANY | ELIMINATE | FORM-NEW-GROUP | FORM-NEW)
//! threshold  := number | ident
//! ```
//!
//! Keywords are case-insensitive. `DISTANCE-ALL`, `DISTANCE-ANY`, `USING`,
//! `LONE`/`LTWO`, `ON_OVERLAP` and `FORM-NEW` are accepted as non-canonical
//! spellings and reported as notes.

use super::lexer::{tokenize, Pos, Tok, Token};
use super::plan::{
    is_reserved, AggArg, AggFn, AggregateSpec, CmpOp, GroupingMode, Literal, Predicate, QueryPlan,
    Threshold,
};
use super::QueryError;
use crate::geometry::Metric;
use crate::sgb_all::OverlapPolicy;

/// Parses a query into a plan.
pub fn parse(text: &str) -> Result<QueryPlan, QueryError> {
    parse_with_notes(text).map(|(plan, _)| plan)
}

/// Like [`parse`], also returning notes about non-canonical spellings.
pub fn parse_with_notes(text: &str) -> Result<(QueryPlan, Vec<String>), QueryError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        at: 0,
        notes: Vec::new(),
        semantic: None,
    };
    let plan = p.query()?;
    if let Some(e) = p.semantic {
        return Err(e);
    }
    Ok((plan, p.notes))
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
    notes: Vec<String>,
    // first semantic problem; reported after the whole text parsed cleanly
    semantic: Option<QueryError>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if t.tok != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T, QueryError> {
        let t = self.peek();
        Err(QueryError::syntax(
            t.pos,
            format!("expected {expected}, found {}", t.tok.describe()),
        ))
    }

    fn semantic(&mut self, pos: Pos, msg: String) {
        if self.semantic.is_none() {
            self.semantic = Some(QueryError::Semantic(format!(
                "line {}, column {}: {msg}",
                pos.line, pos.column
            )));
        }
    }

    fn peek_keyword(&self, kws: &[&str]) -> Option<usize> {
        match &self.peek().tok {
            Tok::Word(w) => kws.iter().position(|k| k.eq_ignore_ascii_case(w)),
            _ => None,
        }
    }

    fn keyword(&mut self, kws: &[&str], expected: &str) -> Result<usize, QueryError> {
        match self.peek_keyword(kws) {
            Some(i) => {
                self.next();
                Ok(i)
            }
            None => self.error(expected),
        }
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }

    fn ident(&mut self, what: &str) -> Result<String, QueryError> {
        match &self.peek().tok {
            Tok::Word(w) if !is_reserved(w) => {
                let w = w.clone();
                self.next();
                Ok(w)
            }
            Tok::Quoted(w) => {
                let w = w.clone();
                self.next();
                Ok(w)
            }
            _ => self.error(what),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), QueryError> {
        if self.peek().tok == tok {
            self.next();
            Ok(())
        } else {
            self.error(&tok.describe())
        }
    }

    fn query(&mut self) -> Result<QueryPlan, QueryError> {
        self.keyword(&["SELECT"], "SELECT")?;
        let mut projections = vec![self.aggregate()?];
        while self.peek().tok == Tok::Comma {
            self.next();
            projections.push(self.aggregate()?);
        }

        self.keyword(&["FROM"], "FROM")?;
        let source = self.ident("a relation name")?;

        let mut filter = Vec::new();
        if self.peek_keyword(&["WHERE"]).is_some() {
            self.next();
            filter.push(self.predicate()?);
            while self.peek_keyword(&["AND"]).is_some() {
                self.next();
                filter.push(self.predicate()?);
            }
        }

        match self.keyword(&["GROUP", "GROUPBY"], "GROUP BY")? {
            0 => {
                self.keyword(&["BY"], "BY")?;
            }
            _ => self.note("GROUPBY written as one word"),
        }
        let first = self.ident("a grouping column")?;
        match &self.peek().tok {
            Tok::Comma => {
                self.next();
            }
            Tok::Word(w) if w.eq_ignore_ascii_case("AND") => {
                self.next();
            }
            _ => return self.error("',' between the two grouping columns"),
        }
        let second = self.ident("a second grouping column")?;
        if self.peek().tok == Tok::Comma {
            let pos = self.peek().pos;
            return Err(QueryError::syntax(
                pos,
                "similarity grouping takes exactly two columns",
            ));
        }

        let dist = self.keyword(
            &[
                "DISTANCE-TO-ALL",
                "DISTANCE-ALL",
                "DISTANCE-TO-ANY",
                "DISTANCE-ANY",
            ],
            "DISTANCE-TO-ALL or DISTANCE-TO-ANY",
        )?;
        if dist == 1 || dist == 3 {
            self.note("DISTANCE-ALL/DISTANCE-ANY is a non-canonical spelling");
        }
        let (metric, eps) = self.metric_spec()?;

        let overlap_pos = self.peek().pos;
        let policy = if let Some(k) = self.peek_keyword(&["ON-OVERLAP", "ON_OVERLAP"]) {
            self.next();
            if k == 1 {
                self.note("ON_OVERLAP is a non-canonical spelling");
            }
            let i = self.keyword(
                &["JOIN-ANY", "ELIMINATE", "FORM-NEW-GROUP", "FORM-NEW"],
                "JOIN-ANY, ELIMINATE or FORM-NEW-GROUP",
            )?;
            if i == 3 {
                self.note("FORM-NEW is a non-canonical spelling of FORM-NEW-GROUP");
            }
            Some(
                [
                    OverlapPolicy::JoinAny,
                    OverlapPolicy::Eliminate,
                    OverlapPolicy::FormNewGroup,
                    OverlapPolicy::FormNewGroup,
                ][i],
            )
        } else {
            None
        };

        let mode = if dist <= 1 {
            match policy {
                Some(p) => GroupingMode::All(p),
                None => return self.error("ON-OVERLAP clause for DISTANCE-TO-ALL"),
            }
        } else {
            if policy.is_some() {
                self.semantic(
                    overlap_pos,
                    "DISTANCE-TO-ANY does not take an ON-OVERLAP clause".into(),
                );
            }
            GroupingMode::Any
        };

        if self.peek().tok == Tok::Semicolon {
            self.next();
        }
        if self.peek().tok != Tok::Eof {
            return self.error("end of query");
        }

        let plan = QueryPlan {
            source,
            projections,
            filter,
            group_cols: [first, second],
            mode,
            metric,
            eps,
        };
        Ok(plan)
    }

    fn aggregate(&mut self) -> Result<AggregateSpec, QueryError> {
        let pos = self.peek().pos;
        let name = match &self.peek().tok {
            Tok::Word(w) => w.clone(),
            _ => return self.error("an aggregate function"),
        };
        let Some(func) = AggFn::from_name(&name) else {
            return Err(QueryError::syntax(
                pos,
                format!("unknown aggregate function '{name}'"),
            ));
        };
        self.next();
        self.expect(Tok::LParen)?;
        let arg = if self.peek().tok == Tok::Star {
            self.next();
            AggArg::Star
        } else if self.peek().tok == Tok::RParen {
            AggArg::Columns(Vec::new())
        } else {
            let mut cols = vec![self.ident("a column name or '*'")?];
            while self.peek().tok == Tok::Comma {
                self.next();
                cols.push(self.ident("a column name")?);
            }
            AggArg::Columns(cols)
        };
        self.expect(Tok::RParen)?;

        match (func, &arg) {
            (AggFn::Count, AggArg::Star) | (AggFn::HullPolygon, AggArg::Star) => {}
            (AggFn::HullPolygon, AggArg::Columns(c)) if c.is_empty() || c.len() == 2 => {}
            (AggFn::HullPolygon, _) => {
                self.semantic(pos, "hull_polygon takes the two grouping columns".into())
            }
            (_, AggArg::Columns(c)) if c.len() == 1 => {}
            (f, _) => self.semantic(pos, format!("{} takes exactly one column", f.name())),
        }
        Ok(AggregateSpec { func, arg })
    }

    fn predicate(&mut self) -> Result<Predicate, QueryError> {
        let column = self.ident("a column name")?;
        let op = match self.peek().tok {
            Tok::Eq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            _ => return self.error("a comparison operator"),
        };
        self.next();
        let value = match &self.peek().tok {
            Tok::Number(n) => Literal::Number(*n),
            Tok::Str(s) => Literal::Text(s.clone()),
            _ => return self.error("a number or quoted string"),
        };
        self.next();
        Ok(Predicate { column, op, value })
    }

    fn metric(&mut self) -> Result<Metric, QueryError> {
        let i = self.keyword(&["L2", "LINF", "LTWO", "LONE"], "L2 or LINF")?;
        if i >= 2 {
            self.note("LONE/LTWO are non-canonical spellings of LINF/L2");
        }
        Ok([Metric::L2, Metric::LInf, Metric::L2, Metric::LInf][i])
    }

    fn threshold(&mut self) -> Result<Threshold, QueryError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Number(n) => {
                self.next();
                if !(n.is_finite() && *n > 0.0) {
                    self.semantic(
                        t.pos,
                        format!("similarity threshold must be positive, got {n}"),
                    );
                }
                Ok(Threshold::Value(*n))
            }
            Tok::Word(_) | Tok::Quoted(_) => Ok(Threshold::Param(self.ident("a threshold")?)),
            _ => self.error("a numeric threshold or parameter name"),
        }
    }

    fn metric_spec(&mut self) -> Result<(Metric, Threshold), QueryError> {
        if self.peek_keyword(&["WITHIN"]).is_some() {
            self.next();
            let eps = self.threshold()?;
            self.keyword(&["USING"], "USING followed by a metric")?;
            self.note("WITHIN ... USING <metric> is a non-canonical form");
            let metric = self.metric()?;
            Ok((metric, eps))
        } else {
            let metric = self.metric()?;
            self.keyword(&["WITHIN"], "WITHIN")?;
            Ok((metric, self.threshold()?))
        }
    }
}
