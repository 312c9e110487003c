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

//! Point generators. All are deterministic for a fixed seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{BenchError, BenchSpec, Generator};
use crate::group_store::Record;
use crate::query::Relation;

/// `n` points uniform over the unit square; ids are 0..n.
pub fn uniform(n: usize, seed: u64) -> Vec<Record> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| Record::new(i as u64, rng.random(), rng.random()))
        .collect()
}

/// Minimum per-axis gap between cluster centers, in units of sigma.
const CENTER_SEPARATION: f64 = 10.0;
const CENTER_ATTEMPTS: usize = 10_000;

/// `n` points around `k` centers drawn uniformly from the unit square, each
/// coordinate offset by N(0, sigma). Centers closer than 10 sigma on both
/// axes to an earlier center are redrawn, so blobs stay distinguishable;
/// when that is impossible the last draw is kept.
pub fn gauss_clusters(n: usize, k: usize, sigma: f64, seed: u64) -> Vec<Record> {
    assert!(k > 0, "need at least one cluster");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gap = CENTER_SEPARATION * sigma;
    let mut centers: Vec<(f64, f64)> = Vec::with_capacity(k);
    while centers.len() < k {
        let mut c = (rng.random::<f64>(), rng.random::<f64>());
        for _ in 0..CENTER_ATTEMPTS {
            let clear = centers
                .iter()
                .all(|&(x, y)| (x - c.0).abs() >= gap || (y - c.1).abs() >= gap);
            if clear {
                break;
            }
            c = (rng.random(), rng.random());
        }
        centers.push(c);
    }
    let noise = Normal::new(0.0, sigma).expect("sigma is finite and non-negative");
    (0..n)
        .map(|i| {
            let (cx, cy) = centers[rng.random_range(0..k)];
            Record::new(
                i as u64,
                cx + noise.sample(&mut rng),
                cy + noise.sample(&mut rng),
            )
        })
        .collect()
}

fn from_csv(
    spec: &BenchSpec,
    path: &std::path::Path,
    x: Option<&str>,
    y: Option<&str>,
) -> Result<Vec<Record>, BenchError> {
    let rel = Relation::ingest_csv(path, "bench").map_err(|e| BenchError::Io(e.to_string()))?;
    let pick = |name: Option<&str>, default: usize| -> Result<usize, BenchError> {
        match name {
            Some(n) => rel
                .column_index(n)
                .ok_or_else(|| BenchError::InvalidSpec(format!("no column '{n}'"))),
            None if default < rel.columns().len() => Ok(default),
            None => Err(BenchError::InvalidSpec(
                "CSV input needs two columns".into(),
            )),
        }
    };
    let (xc, yc) = (pick(x, 0)?, pick(y, 1)?);
    let (rows, rejected) = rel.finite_rows(xc, yc);
    if rejected > 0 {
        log::warn!("{rejected} CSV row(s) without finite coordinates skipped");
    }
    let out: Vec<Record> = rows
        .into_iter()
        .take(spec.n)
        .map(|r| {
            let px = rel.number(r, xc).unwrap_or(f64::NAN);
            let py = rel.number(r, yc).unwrap_or(f64::NAN);
            Record::new(r as u64, px, py)
        })
        .collect();
    if out.is_empty() {
        return Err(BenchError::InvalidSpec(format!(
            "{} has no usable rows",
            path.display()
        )));
    }
    Ok(out)
}

/// Produces the input points described by `spec`.
pub fn generate(spec: &BenchSpec) -> Result<Vec<Record>, BenchError> {
    spec.validate()?;
    Ok(match &spec.generator {
        Generator::Uniform => uniform(spec.n, spec.seed),
        Generator::GaussClusters { k, sigma } => gauss_clusters(spec.n, *k, *sigma, spec.seed),
        Generator::Csv { path, x, y } => from_csv(spec, path, x.as_deref(), y.as_deref())?,
    })
}
