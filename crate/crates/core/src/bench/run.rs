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

//! Timing harness.

use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{generate, BenchError, BenchSpec, Mode};
use crate::geometry::Metric;
use crate::group_store::Record;
use crate::sgb_all::{run_sgb_all, GroupingResult, OverlapPolicy, SgbAllConfig, Strategy};
use crate::sgb_any::{run_sgb_any, AnyStrategy, SgbAnyConfig};
use crate::validate::{check_cliques, ComponentChecker};

pub const CSV_HEADER: &str = "mode,policy,metric,strategy,n,eps,ms,groups,eliminated";

/// One point of the benchmark matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub mode: Mode,
    /// `None` for distance-to-any.
    pub policy: Option<OverlapPolicy>,
    pub metric: Metric,
    pub strategy: Strategy,
    pub eps: f64,
}

impl Cell {
    fn run(&self, points: &[Record]) -> Result<GroupingResult, BenchError> {
        Ok(match self.mode {
            Mode::All => {
                let policy = self.policy.unwrap_or(OverlapPolicy::JoinAny);
                run_sgb_all(
                    points,
                    &SgbAllConfig::new(self.metric, self.eps, policy, self.strategy),
                )?
            }
            Mode::Any => {
                let strategy = match self.strategy {
                    Strategy::AllPairs => AnyStrategy::AllPairs,
                    _ => AnyStrategy::Indexed,
                };
                run_sgb_any(points, &SgbAnyConfig::new(self.metric, self.eps, strategy))?
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub mode: Mode,
    pub policy: Option<OverlapPolicy>,
    pub metric: Metric,
    pub strategy: Strategy,
    pub n: usize,
    pub eps: f64,
    /// Median wall time over the repetitions.
    pub ms: f64,
    pub groups: usize,
    pub eliminated: usize,
}

impl BenchRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.3},{},{}",
            self.mode.as_str(),
            self.policy.map_or("-", OverlapPolicy::as_str),
            self.metric,
            self.strategy,
            self.n,
            self.eps,
            self.ms,
            self.groups,
            self.eliminated
        )
    }
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// Re-checks a random `fraction` of the output groups (at least one):
/// cliques for distance-to-all, maximal connected components for
/// distance-to-any.
fn spot_check(
    points: &[Record],
    cell: &Cell,
    result: &GroupingResult,
    fraction: f64,
    seed: u64,
) -> Result<(), BenchError> {
    let total = result.groups.len();
    if total == 0 || fraction == 0.0 {
        return Ok(());
    }
    let k = ((total as f64 * fraction).ceil() as usize).clamp(1, total);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked: Vec<usize> = sample(&mut rng, total, k).into_iter().collect();
    match cell.mode {
        Mode::All => {
            let groups = picked.iter().map(|&i| result.groups[i].members.as_slice());
            check_cliques(points, groups, cell.metric, cell.eps).map_err(|(a, b)| {
                BenchError::Validation(format!(
                    "{} and {} share a group but are not similar",
                    a.0, b.0
                ))
            })
        }
        Mode::Any => {
            let checker = ComponentChecker::new(points, cell.metric, cell.eps);
            for &i in &picked {
                let g = &result.groups[i];
                checker
                    .check(&g.members)
                    .map_err(|e| BenchError::Validation(format!("group {}: {e}", g.id)))?;
            }
            Ok(())
        }
    }
}

/// Times one cell: an optional discarded warm-up run, then `repetitions`
/// timed runs. Each timed run starts from a fresh engine.
pub fn run_cell(
    points: &[Record],
    cell: &Cell,
    repetitions: usize,
    warmup: bool,
) -> Result<(BenchRow, GroupingResult), BenchError> {
    if warmup {
        cell.run(points)?;
    }
    let mut times = Vec::with_capacity(repetitions);
    let mut last = None;
    for _ in 0..repetitions.max(1) {
        let start = Instant::now();
        let result = cell.run(points)?;
        times.push(start.elapsed().as_secs_f64() * 1e3);
        last = Some(result);
    }
    let result = last.expect("at least one repetition");
    let row = BenchRow {
        mode: cell.mode,
        policy: cell.policy,
        metric: cell.metric,
        strategy: cell.strategy,
        n: points.len(),
        eps: cell.eps,
        ms: median(times),
        groups: result.groups.len(),
        eliminated: result.eliminated.len(),
    };
    Ok((row, result))
}

fn cells(spec: &BenchSpec) -> Vec<Cell> {
    let mut out = Vec::new();
    for &eps in &spec.eps {
        for &mode in &spec.modes {
            let policies: Vec<Option<OverlapPolicy>> = match mode {
                Mode::All => spec.policies.iter().copied().map(Some).collect(),
                Mode::Any => vec![None],
            };
            for &policy in &policies {
                for &metric in &spec.metrics {
                    for &strategy in &spec.strategies {
                        if mode == Mode::Any && strategy == Strategy::BoundsChecking {
                            continue;
                        }
                        out.push(Cell {
                            mode,
                            policy,
                            metric,
                            strategy,
                            eps,
                        });
                    }
                }
            }
        }
    }
    out
}

fn measure(
    spec: &BenchSpec,
    points: &[Record],
    cell: &Cell,
    ordinal: usize,
) -> Result<BenchRow, BenchError> {
    let (row, result) = run_cell(points, cell, spec.repetitions, spec.warmup)?;
    spot_check(
        points,
        cell,
        &result,
        spec.validate_fraction,
        spec.seed ^ ordinal as u64,
    )?;
    log::info!("{}", row.csv_line());
    Ok(row)
}

/// Generates the input and measures every cell of the matrix, in
/// eps, mode, policy, metric, strategy order.
pub fn run_matrix(spec: &BenchSpec) -> Result<Vec<BenchRow>, BenchError> {
    let points = generate(spec)?;
    let cells = cells(spec);
    if !spec.parallel {
        return cells
            .iter()
            .enumerate()
            .map(|(i, c)| measure(spec, &points, c, i))
            .collect();
    }

    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(cells.len().max(1));
    let mut slots: Vec<Option<Result<BenchRow, BenchError>>> =
        (0..cells.len()).map(|_| None).collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let (points, cells) = (&points, &cells);
                s.spawn(move || {
                    (w..cells.len())
                        .step_by(workers)
                        .map(|i| (i, measure(spec, points, &cells[i], i)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("bench worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots
        .into_iter()
        .map(|r| r.expect("every cell measured"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::Generator;

    #[test]
    fn one_cell_one_row() {
        let mut spec = BenchSpec::new(Generator::Uniform, 300, vec![0.05]);
        spec.modes = vec![Mode::Any];
        spec.strategies = vec![Strategy::Indexed];
        spec.repetitions = 1;
        let rows = run_matrix(&spec).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].n, 300);
        assert!(rows[0].ms >= 0.0);
        let csv = rows_to_csv(&rows);
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
        assert!(csv
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("any,-,L2,indexed,300,0.05,"));
    }

    #[test]
    fn matrix_shape_and_agreement() {
        let mut spec = BenchSpec::new(
            Generator::GaussClusters { k: 5, sigma: 0.02 },
            400,
            vec![0.03, 0.06],
        );
        spec.policies = vec![OverlapPolicy::JoinAny, OverlapPolicy::Eliminate];
        spec.repetitions = 1;
        spec.warmup = false;
        spec.validate_fraction = 1.0;
        let rows = run_matrix(&spec).unwrap();
        // per eps: all-mode 2 policies x 3 strategies, any-mode 2 strategies
        assert_eq!(rows.len(), 2 * (6 + 2));
        for chunk in rows.chunks(3).take(2) {
            assert!(chunk
                .iter()
                .all(|r| r.groups == chunk[0].groups && r.eliminated == chunk[0].eliminated));
        }
    }

    #[test]
    fn parallel_matches_sequential_counts() {
        let mut spec = BenchSpec::new(Generator::Uniform, 500, vec![0.02, 0.05, 0.1]);
        spec.repetitions = 1;
        spec.warmup = false;
        let seq = run_matrix(&spec).unwrap();
        spec.parallel = true;
        let par = run_matrix(&spec).unwrap();
        let key = |r: &BenchRow| {
            (
                r.mode,
                r.policy,
                r.strategy,
                r.eps.to_bits(),
                r.groups,
                r.eliminated,
            )
        };
        assert_eq!(
            seq.iter().map(key).collect::<Vec<_>>(),
            par.iter().map(key).collect::<Vec<_>>()
        );
    }

    #[test]
    fn any_eps_sweep_is_monotone() {
        let mut spec = BenchSpec::new(
            Generator::Uniform,
            800,
            (1..=9).map(|i| i as f64 * 0.01).collect(),
        );
        spec.modes = vec![Mode::Any];
        spec.strategies = vec![Strategy::Indexed];
        spec.repetitions = 1;
        let groups: Vec<usize> = run_matrix(&spec)
            .unwrap()
            .iter()
            .map(|r| r.groups)
            .collect();
        assert!(groups.windows(2).all(|w| w[1] <= w[0]), "{groups:?}");
    }

    #[test]
    fn spot_check_catches_a_bad_group() {
        let pts = vec![Record::new(0, 0.0, 0.0), Record::new(1, 5.0, 0.0)];
        let cell = Cell {
            mode: Mode::All,
            policy: Some(OverlapPolicy::JoinAny),
            metric: Metric::L2,
            strategy: Strategy::Indexed,
            eps: 1.0,
        };
        let bad = GroupingResult {
            groups: vec![crate::sgb_all::OutputGroup {
                id: crate::group_store::GroupId(0),
                members: vec![pts[0].id, pts[1].id],
            }],
            ..GroupingResult::default()
        };
        assert!(matches!(
            spot_check(&pts, &cell, &bad, 0.01, 0),
            Err(BenchError::Validation(_))
        ));
        let any = Cell {
            mode: Mode::Any,
            policy: None,
            ..cell
        };
        let split = GroupingResult {
            groups: vec![crate::sgb_all::OutputGroup {
                id: crate::group_store::GroupId(0),
                members: vec![pts[0].id],
            }],
            ..GroupingResult::default()
        };
        let near = vec![Record::new(0, 0.0, 0.0), Record::new(1, 0.5, 0.0)];
        assert!(spot_check(&near, &any, &split, 1.0, 0).is_err());
    }
}
