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

//! Speedup tables and plot data.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{BenchRow, Mode};
use crate::geometry::Metric;
use crate::sgb_all::{OverlapPolicy, Strategy};

/// Time of the baseline strategy divided by the time of `strategy`, for
/// one (mode, policy, metric, n, eps) setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedupRow {
    pub mode: Mode,
    pub policy: Option<OverlapPolicy>,
    pub metric: Metric,
    pub n: usize,
    pub eps: f64,
    pub strategy: Strategy,
    pub ms: f64,
    pub speedup: f64,
}

type Setting = (Mode, Option<OverlapPolicy>, Metric, usize, u64);

fn setting(r: &BenchRow) -> Setting {
    (r.mode, r.policy, r.metric, r.n, r.eps.to_bits())
}

/// Speedups relative to all-pairs. A setting without an all-pairs row is
/// measured against its first row, so a lone strategy reports 1.0.
pub fn speedup_rows(rows: &[BenchRow]) -> Vec<SpeedupRow> {
    let mut order: Vec<Setting> = Vec::new();
    let mut by_setting: BTreeMap<usize, Vec<&BenchRow>> = BTreeMap::new();
    for r in rows {
        let key = setting(r);
        let slot = order.iter().position(|k| *k == key).unwrap_or_else(|| {
            order.push(key);
            order.len() - 1
        });
        by_setting.entry(slot).or_default().push(r);
    }
    let mut out = Vec::new();
    for group in by_setting.values() {
        let base = group
            .iter()
            .find(|r| r.strategy == Strategy::AllPairs)
            .unwrap_or(&group[0]);
        for r in group {
            let speedup = if r.ms > 0.0 {
                base.ms / r.ms
            } else if base.ms == 0.0 {
                1.0
            } else {
                f64::INFINITY
            };
            out.push(SpeedupRow {
                mode: r.mode,
                policy: r.policy,
                metric: r.metric,
                n: r.n,
                eps: r.eps,
                strategy: r.strategy,
                ms: r.ms,
                speedup,
            });
        }
    }
    out
}

/// Fixed-width speedup table.
pub fn report(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<5} {:<15} {:<6} {:>8} {:>8} {:<10} {:>12} {:>9}",
        "mode", "policy", "metric", "n", "eps", "strategy", "ms", "speedup"
    );
    for s in speedup_rows(rows) {
        let _ = writeln!(
            out,
            "{:<5} {:<15} {:<6} {:>8} {:>8} {:<10} {:>12.3} {:>8.2}x",
            s.mode.as_str(),
            s.policy.map_or("-", OverlapPolicy::as_str),
            s.metric.as_str(),
            s.n,
            s.eps,
            s.strategy.as_str(),
            s.ms,
            s.speedup
        );
    }
    out
}

/// One whitespace-separated data file per (mode, policy, metric, strategy)
/// series, named like `all-join-any-l2-indexed.dat`, with columns
/// `n eps ms groups eliminated` sorted by n then eps.
pub fn gnuplot_series(rows: &[BenchRow]) -> Vec<(String, String)> {
    let mut series: BTreeMap<String, Vec<&BenchRow>> = BTreeMap::new();
    for r in rows {
        let mut name = r.mode.as_str().to_string();
        if let Some(p) = r.policy {
            name.push('-');
            name.push_str(&p.as_str().to_ascii_lowercase());
        }
        name = format!(
            "{name}-{}-{}.dat",
            r.metric.as_str().to_ascii_lowercase(),
            r.strategy.as_str()
        );
        series.entry(name).or_default().push(r);
    }
    series
        .into_iter()
        .map(|(name, mut rs)| {
            rs.sort_by(|a, b| a.n.cmp(&b.n).then(a.eps.total_cmp(&b.eps)));
            let mut body = String::from("# n eps ms groups eliminated\n");
            for r in rs {
                let _ = writeln!(
                    body,
                    "{} {} {} {} {}",
                    r.n, r.eps, r.ms, r.groups, r.eliminated
                );
            }
            (name, body)
        })
        .collect()
}
