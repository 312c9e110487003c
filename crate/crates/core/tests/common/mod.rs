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

//! Fixtures shared by the integration tests and the acceptance suite.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sgb_core::query::{
    AggArg, AggFn, AggregateSpec, GroupingMode, Literal, Predicate, QueryPlan, Threshold,
};
use sgb_core::{Metric, OverlapPolicy, Point, Record, RecordId};

/// The five collinear points of the worked example: a1..a5 at x = 0, 1, 5,
/// 6, 3 in that arrival order.
pub fn example_points() -> Vec<Record> {
    [0.0, 1.0, 5.0, 6.0, 3.0]
        .iter()
        .enumerate()
        .map(|(i, &x)| Record::new(i as u64 + 1, x, 0.0))
        .collect()
}

pub fn uniform(n: usize, side: f64, seed: u64) -> Vec<Record> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            Record::new(
                i as u64,
                rng.random::<f64>() * side,
                rng.random::<f64>() * side,
            )
        })
        .collect()
}

/// `k` tight blobs with a few uniform outliers.
pub fn clustered(n: usize, k: usize, spread: f64, seed: u64) -> Vec<Record> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<(f64, f64)> = (0..k.max(1))
        .map(|_| (rng.random(), rng.random()))
        .collect();
    (0..n)
        .map(|i| {
            if rng.random::<f64>() < 0.05 {
                return Record::new(i as u64, rng.random(), rng.random());
            }
            let (cx, cy) = centers[rng.random_range(0..centers.len())];
            let dx = (rng.random::<f64>() - 0.5) * 2.0 * spread;
            let dy = (rng.random::<f64>() - 0.5) * 2.0 * spread;
            Record::new(i as u64, cx + dx, cy + dy)
        })
        .collect()
}

/// Connected components of the eps-graph by breadth-first search, as sorted
/// member lists in sorted order.
pub fn bfs_components(points: &[Record], metric: Metric, eps: f64) -> Vec<Vec<RecordId>> {
    let n = points.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        let mut comp = Vec::new();
        while let Some(u) = queue.pop_front() {
            comp.push(points[u].id);
            for v in 0..n {
                if !seen[v] && metric.similar(points[u].point, points[v].point, eps) {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        comp.sort();
        out.push(comp);
    }
    out.sort();
    out
}

pub fn partition(groups: &[sgb_core::OutputGroup]) -> Vec<Vec<RecordId>> {
    let mut out: Vec<Vec<RecordId>> = groups
        .iter()
        .map(|g| {
            let mut m = g.members.clone();
            m.sort();
            m
        })
        .collect();
    out.sort();
    out
}

pub fn pt(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

fn plan(
    source: &str,
    projections: Vec<AggregateSpec>,
    cols: [&str; 2],
    mode: GroupingMode,
    metric: Metric,
    eps: Threshold,
) -> QueryPlan {
    QueryPlan {
        source: source.into(),
        projections,
        filter: Vec::new(),
        group_cols: cols.map(String::from),
        mode,
        metric,
        eps,
    }
}

fn cols(func: AggFn, cs: &[&str]) -> AggregateSpec {
    AggregateSpec::new(
        func,
        AggArg::Columns(cs.iter().map(|c| c.to_string()).collect()),
    )
}

/// Query texts from the language description and application examples,
/// with the plans they must parse to.
pub fn query_corpus() -> Vec<(&'static str, QueryPlan)> {
    use GroupingMode::*;
    use OverlapPolicy::*;
    let gps = ["GPSCoor-lat", "GPSCoor-long"];
    let dev = ["Device-lat", "Device-long"];
    let count = || vec![AggregateSpec::count_star()];
    let p = |n: &str| Threshold::Param(n.into());
    let mut out = vec![
        (
            "SELECT count(*) FROM GPSPoints GROUP BY lat, long DISTANCE-TO-ALL LINF WITHIN 3 ON-OVERLAP ELIMINATE",
            plan("GPSPoints", count(), ["lat", "long"], All(Eliminate), Metric::LInf, Threshold::Value(3.0)),
        ),
        (
            "SELECT count(*) FROM GPSPoints GROUP BY lat, long DISTANCE-TO-ANY L2 WITHIN 3",
            plan("GPSPoints", count(), ["lat", "long"], Any, Metric::L2, Threshold::Value(3.0)),
        ),
        (
            "SELECT count(*)\nFROM GPSPoints\nGROUP BY GPSCoor-lat,GPSCoor-long DISTANCE-TO-ALL LINF\nWITHIN 3\nON-OVERLAP JOIN-ANY",
            plan("GPSPoints", count(), gps, All(JoinAny), Metric::LInf, Threshold::Value(3.0)),
        ),
        (
            "SELECT count(*)\nFROM GPSPoints\nGROUP BY GPSCoor-lat,GPSCoor-long DISTANCE-TO-ALL LINF\nWITHIN 3\nON-OVERLAP FORM-NEW-GROUP",
            plan("GPSPoints", count(), gps, All(FormNewGroup), Metric::LInf, Threshold::Value(3.0)),
        ),
        (
            "SELECT count(*)\nFROM GPSPoints\nGROUP BY GPSCoor-lat and GPSCoor-long\nDISTANCE-TO-ANY L2 WITHIN 3",
            plan("GPSPoints", count(), gps, Any, Metric::L2, Threshold::Value(3.0)),
        ),
        (
            "SELECT ST_Polygon(Device-lat, Device-long)\nFROM MobileDevices\nGROUP BY Device-lat, Device-long\nDISTANCE-TO-ANY L2 WITHIN SignalRange",
            plan(
                "MobileDevices",
                vec![cols(AggFn::HullPolygon, &dev)],
                dev,
                Any,
                Metric::L2,
                p("SignalRange"),
            ),
        ),
        (
            "SELECT COUNT(*)\nFROM MobileDevices\nGROUP BY Device-lat , Device-long\nDISTANCE-TO-ALL L2 WITHIN SignalRange\nON-OVERLAP FORM-NEW-GROUP",
            plan("MobileDevices", count(), dev, All(FormNewGroup), Metric::L2, p("SignalRange")),
        ),
    ];
    for (word, policy) in [
        ("JOIN-ANY", JoinAny),
        ("ELIMINATE", Eliminate),
        ("FORM-NEW-GROUP", FormNewGroup),
    ] {
        let text = format!(
            "SELECT List-ID(user-id),\nST_Polygon(User-lat, User-long)\nFROM Users-Frequent-Location\nGROUP BY User-lat , User-long\nDISTANCE-TO-ALL L2 WITHIN Threshold\nON-OVERLAP {word}"
        );
        out.push((
            Box::leak(text.into_boxed_str()),
            plan(
                "Users-Frequent-Location",
                vec![
                    cols(AggFn::Collect, &["user-id"]),
                    cols(AggFn::HullPolygon, &["User-lat", "User-long"]),
                ],
                ["User-lat", "User-long"],
                All(policy),
                Metric::L2,
                p("Threshold"),
            ),
        ));
    }

    // Benchmark-table forms over pre-joined relations.
    let sgb1_aggs = vec![
        cols(AggFn::Max, &["ab"]),
        cols(AggFn::Min, &["tb"]),
        cols(AggFn::Max, &["tb"]),
        cols(AggFn::Avg, &["ab"]),
        cols(AggFn::Collect, &["c_custkey"]),
    ];
    let mut sgb1 = |text: &'static str, mode, metric| {
        let mut pl = plan("R", sgb1_aggs.clone(), ["ab", "tp"], mode, metric, p("eps"));
        pl.filter.push(Predicate {
            column: "ab".into(),
            op: sgb_core::query::CmpOp::Gt,
            value: Literal::Number(100.0),
        });
        out.push((text, pl));
    };
    sgb1(
        "SELECT max(ab), min(tb),max(tb), average(ab), array_agg(c_custkey) FROM R WHERE ab > 100 GROUP BY ab,tp DISTANCE-ALL WITHIN eps USING lone on_overlap join-any",
        All(JoinAny),
        Metric::LInf,
    );
    sgb1(
        "SELECT max(ab), min(tb),max(tb), average(ab), array_agg(c_custkey) FROM R WHERE ab > 100 GROUP BY ab,tp DISTANCE-ALL WITHIN eps USING ltwo on_overlap form-new",
        All(FormNewGroup),
        Metric::L2,
    );
    sgb1(
        "SELECT max(ab), min(tb),max(tb), average(ab), array_agg(c_custkey) FROM R WHERE ab > 100 GROUP BY ab,tp DISTANCE-ALL WITHIN eps USING lone on_overlap eliminate",
        All(Eliminate),
        Metric::LInf,
    );
    sgb1(
        "SELECT max(ab), min(tb),max(tb), average(ab), array_agg(c_custkey) FROM R WHERE ab > 100 GROUP BY ab,tp DISTANCE-ANY WITHIN eps USING ltwo",
        Any,
        Metric::L2,
    );
    let sgb3 = vec![
        AggregateSpec::count_star(),
        cols(AggFn::Sum, &["tprof"]),
        cols(AggFn::Sum, &["stime"]),
    ];
    out.push((
        "SELECT count(*),sum(tprof), sum(stime) FROM profit GROUP BY tprof, stime DISTANCE-ALL WITHIN eps USING lone on_overlap join-any",
        plan("profit", sgb3.clone(), ["tprof", "stime"], All(JoinAny), Metric::LInf, p("eps")),
    ));
    out.push((
        "SELECT count(*),sum(tprof), sum(stime) FROM profit GROUP BY tprof, stime DISTANCE-ANY WITHIN eps USING lone",
        plan("profit", sgb3, ["tprof", "stime"], Any, Metric::LInf, p("eps")),
    ));
    out.push((
        "SELECT array_agg(s_suppkey), sum(trevenue), sum(s_acctbal) FROM r GROUP BY trevenue, s_acctbal DISTANCE-ALL WITHIN 0.5 USING ltwo on_overlap eliminate;",
        plan(
            "r",
            vec![
                cols(AggFn::Collect, &["s_suppkey"]),
                cols(AggFn::Sum, &["trevenue"]),
                cols(AggFn::Sum, &["s_acctbal"]),
            ],
            ["trevenue", "s_acctbal"],
            All(Eliminate),
            Metric::L2,
            Threshold::Value(0.5),
        ),
    ));
    out
}

/// Malformed queries with the (line, column) each error must point at.
pub fn malformed_queries() -> Vec<(&'static str, (usize, usize))> {
    vec![
        ("", (1, 1)),
        (
            "SELEKT count(*) FROM t GROUP BY a, b DISTANCE-TO-ANY L2 WITHIN 1",
            (1, 1),
        ),
        (
            "SELECT FROM t GROUP BY a, b DISTANCE-TO-ANY L2 WITHIN 1",
            (1, 8),
        ),
        (
            "SELECT count(* FROM t GROUP BY a, b DISTANCE-TO-ANY L2 WITHIN 1",
            (1, 16),
        ),
        (
            "SELECT frobnicate(x) FROM t GROUP BY a, b DISTANCE-TO-ANY L2 WITHIN 1",
            (1, 8),
        ),
        (
            "SELECT count(*) t GROUP BY a, b DISTANCE-TO-ANY L2 WITHIN 1",
            (1, 17),
        ),
        (
            "SELECT count(*) FROM GROUP BY a, b DISTANCE-TO-ANY L2 WITHIN 1",
            (1, 22),
        ),
        (
            "SELECT count(*) FROM t GROUP a, b DISTANCE-TO-ANY L2 WITHIN 1",
            (1, 30),
        ),
        (
            "SELECT count(*) FROM t GROUP BY a DISTANCE-TO-ANY L2 WITHIN 1",
            (1, 35),
        ),
        (
            "SELECT count(*) FROM t GROUP BY a, b, c DISTANCE-TO-ANY L2 WITHIN 1",
            (1, 37),
        ),
        (
            "SELECT count(*) FROM t GROUP BY a, b DISTANCE-TO-SOME L2 WITHIN 1",
            (1, 38),
        ),
        (
            "SELECT count(*) FROM t GROUP BY a, b DISTANCE-TO-ANY L3 WITHIN 1",
            (1, 54),
        ),
        (
            "SELECT count(*) FROM t GROUP BY a, b DISTANCE-TO-ANY L2 1",
            (1, 57),
        ),
        (
            "SELECT count(*) FROM t GROUP BY a, b DISTANCE-TO-ANY L2 WITHIN",
            (1, 63),
        ),
        (
            "SELECT count(*) FROM t GROUP BY a, b DISTANCE-TO-ALL L2 WITHIN 1",
            (1, 65),
        ),
        (
            "SELECT count(*) FROM t GROUP BY a, b DISTANCE-TO-ALL L2 WITHIN 1 ON-OVERLAP KEEP",
            (1, 77),
        ),
        (
            "SELECT count(*) FROM t\nWHERE a >> 3\nGROUP BY a, b DISTANCE-TO-ANY L2 WITHIN 1",
            (2, 10),
        ),
        (
            "SELECT count(*) FROM t\nWHERE a > 'unterminated\nGROUP BY a, b",
            (2, 11),
        ),
        (
            "SELECT count(*) FROM t GROUP BY a, b\n  DISTANCE-TO-ANY L2 WITHIN 1x",
            (2, 30),
        ),
        (
            "SELECT count(*) FROM t GROUP BY a, b DISTANCE-TO-ANY L2 WITHIN 1 LIMIT 5",
            (1, 66),
        ),
    ]
}

/// A clique-shaped group under L2 and probe points sampled inside its
/// eps-All rectangle. Probes near the rectangle's corners are mostly
/// outside the eps-disc of some member, which is the case the rectangle
/// filter alone gets wrong.
pub fn adversarial_l2(
    eps: f64,
    members: usize,
    probes: usize,
    seed: u64,
) -> (Vec<Record>, Vec<Point>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (cx, cy) = (rng.random::<f64>() * 10.0, rng.random::<f64>() * 10.0);
    let r = eps * rng.random_range(0.05..0.5);
    let group: Vec<Record> = (0..members.max(1))
        .map(|i| {
            let a = rng.random::<f64>() * std::f64::consts::TAU;
            let d = r * rng.random::<f64>().sqrt();
            Record::new(i as u64, cx + d * a.cos(), cy + d * a.sin())
        })
        .collect();
    let rect = group
        .iter()
        .map(|m| sgb_core::Rect::around(m.point, eps))
        .reduce(|a, b| a.intersection(&b).expect("clique rectangles intersect"))
        .unwrap();
    let pts = (0..probes)
        .map(|i| {
            if i % 2 == 0 {
                // hug a random corner
                let fx = if rng.random::<bool>() {
                    rng.random_range(0.0..0.2)
                } else {
                    rng.random_range(0.8..1.0)
                };
                let fy = if rng.random::<bool>() {
                    rng.random_range(0.0..0.2)
                } else {
                    rng.random_range(0.8..1.0)
                };
                Point::new(
                    rect.lo.x + fx * rect.width(),
                    rect.lo.y + fy * rect.height(),
                )
            } else {
                Point::new(
                    rect.lo.x + rng.random::<f64>() * rect.width(),
                    rect.lo.y + rng.random::<f64>() * rect.height(),
                )
            }
        })
        .collect();
    (group, pts)
}
