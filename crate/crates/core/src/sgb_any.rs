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

//! Distance-to-any grouping: groups are the connected components of the
//! ε-neighborhood graph.
//!
//! Processed points live in an R-tree (or, for the baseline, a flat list) and
//! their group membership in a disjoint-set forest. A new point looks up its
//! ε-neighbors among earlier points, maps them to their groups, and merges
//! every group it touches.

use serde::{Deserialize, Serialize};

use crate::disjoint_set::DisjointSet;
use crate::geometry::{Metric, Rect};
use crate::group_store::{GroupId, Record};
use crate::sgb_all::{GroupingResult, OutputGroup, SgbError};
use crate::spatial_index::RTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnyStrategy {
    AllPairs,
    Indexed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SgbAnyConfig {
    pub metric: Metric,
    pub eps: f64,
    pub strategy: AnyStrategy,
}

impl SgbAnyConfig {
    pub fn new(metric: Metric, eps: f64, strategy: AnyStrategy) -> Self {
        Self {
            metric,
            eps,
            strategy,
        }
    }

    pub fn validate(&self) -> Result<(), SgbError> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(SgbError::InvalidConfig(format!(
                "eps must be a positive finite number, got {}",
                self.eps
            )));
        }
        Ok(())
    }
}

/// Working state of one SGB-Any run. Point `i` of the input is slot `i` in
/// both the index and the forest.
#[derive(Debug)]
pub struct AnyState {
    pub points_ix: RTree<u32>,
    pub dsf: DisjointSet,
    next_group: u32,
    // scratch buffer reused across points
    hits: Vec<u32>,
}

impl AnyState {
    pub fn new(n: usize) -> Self {
        Self {
            points_ix: RTree::with_capacity(n),
            dsf: DisjointSet::with_capacity(n),
            next_group: 0,
            hits: Vec::new(),
        }
    }
}

/// Roots of the groups holding an ε-neighbor of `points[i]` among the points
/// already in the index, then indexes `points[i]`. Roots are returned sorted.
pub fn find_candidate_groups_any(
    i: usize,
    points: &[Record],
    state: &mut AnyState,
    cfg: &SgbAnyConfig,
) -> Vec<usize> {
    let p = points[i].point;
    let window = Rect::around(p, cfg.eps);
    let mut hits = std::mem::take(&mut state.hits);
    hits.clear();
    // point entries carry their coordinates in the key, so the metric check
    // needs no lookup into `points`
    let metric = cfg.metric;
    state.points_ix.for_each_intersecting(&window, |e| {
        // push, then drop it again if the distance check fails; avoids a
        // poorly predicted branch
        hits.push(e.id);
        let keep = metric == Metric::LInf || metric.similar(p, e.key.lo, cfg.eps);
        hits.truncate(hits.len() - usize::from(!keep));
    });
    let mut roots = Vec::new();
    for &j in &hits {
        let r = state.dsf.find(j as usize).expect("indexed point has a set");
        // neighbors mostly share a group; skip the obvious repeats early
        if roots.last() != Some(&r) {
            roots.push(r);
        }
    }
    state.hits = hits;
    roots.sort_unstable();
    roots.dedup();
    state
        .points_ix
        .insert(i as u32, Rect::point(p))
        .expect("each point is indexed once");
    roots
}

/// Baseline candidate lookup: scan every earlier point.
pub fn find_candidate_groups_all_pairs(
    i: usize,
    points: &[Record],
    dsf: &mut DisjointSet,
    cfg: &SgbAnyConfig,
) -> Vec<usize> {
    let p = points[i].point;
    let mut roots = Vec::new();
    for (j, q) in points[..i].iter().enumerate() {
        if cfg.metric.similar(p, q.point, cfg.eps) {
            roots.push(dsf.find(j).expect("earlier point has a set"));
        }
    }
    roots.sort_unstable();
    roots.dedup();
    roots
}

/// Inserts point `i` into a new group, the single candidate group, or the
/// union of all candidate groups.
pub fn process_grouping_any(
    i: usize,
    candidates: &[usize],
    dsf: &mut DisjointSet,
    next_group: &mut u32,
) {
    match candidates {
        [] => {
            dsf.make_set_labeled(i, *next_group).expect("fresh point");
            *next_group += 1;
        }
        [only] => {
            dsf.make_set_labeled(i, u32::MAX).expect("fresh point");
            dsf.union(*only, i).expect("known sets");
        }
        [first, rest @ ..] => {
            for r in rest {
                dsf.union(*first, *r).expect("known sets");
            }
            dsf.make_set_labeled(i, u32::MAX).expect("fresh point");
            dsf.union(*first, i).expect("known sets");
        }
    }
}

/// Runs SGB-Any over `points`. Group ids are the creation ordinal of the
/// oldest group merged into each output group.
pub fn run_sgb_any(points: &[Record], cfg: &SgbAnyConfig) -> Result<GroupingResult, SgbError> {
    cfg.validate()?;
    if let Some(bad) = points.iter().find(|r| !r.point.is_finite()) {
        return Err(SgbError::NonFinite(bad.id));
    }
    assert!(points.len() < u32::MAX as usize, "too many points");

    let mut state = AnyState::new(points.len());
    for i in 0..points.len() {
        let candidates = match cfg.strategy {
            AnyStrategy::Indexed => find_candidate_groups_any(i, points, &mut state, cfg),
            AnyStrategy::AllPairs => {
                find_candidate_groups_all_pairs(i, points, &mut state.dsf, cfg)
            }
        };
        process_grouping_any(i, &candidates, &mut state.dsf, &mut state.next_group);
    }

    let groups = state
        .dsf
        .classes()
        .into_iter()
        .map(|(label, members)| OutputGroup {
            id: GroupId(label),
            members: members.into_iter().map(|j| points[j].id).collect(),
        })
        .collect();
    Ok(GroupingResult {
        groups,
        eliminated: Vec::new(),
        pass_count: 1,
        truncated: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_store::RecordId;

    fn example_points() -> Vec<Record> {
        vec![
            Record::new(1, 0.0, 0.0),
            Record::new(2, 1.0, 0.0),
            Record::new(3, 5.0, 0.0),
            Record::new(4, 6.0, 0.0),
            Record::new(5, 3.0, 0.0),
        ]
    }

    #[test]
    fn example_merges_into_one_group() {
        for metric in [Metric::L2, Metric::LInf] {
            for s in [AnyStrategy::AllPairs, AnyStrategy::Indexed] {
                let r = run_sgb_any(&example_points(), &SgbAnyConfig::new(metric, 3.0, s)).unwrap();
                assert_eq!(r.sizes(), vec![5]);
                assert_eq!(r.groups[0].id, GroupId(0));
            }
        }
    }

    #[test]
    fn chain_forms_one_group() {
        // eight points, each within 3 of the next, ends far apart
        let pts: Vec<Record> = (0..8)
            .map(|i| Record::new(i, 2.5 * i as f64, 0.3 * (i % 2) as f64))
            .collect();
        assert!(Metric::L2.distance(pts[0].point, pts[7].point) > 3.0);
        for s in [AnyStrategy::AllPairs, AnyStrategy::Indexed] {
            let r = run_sgb_any(&pts, &SgbAnyConfig::new(Metric::L2, 3.0, s)).unwrap();
            assert_eq!(r.sizes(), vec![8]);
        }
    }

    #[test]
    fn separated_clusters() {
        let pts = vec![
            Record::new(0, 0.0, 0.0),
            Record::new(1, 0.5, 0.0),
            Record::new(2, 10.0, 0.0),
            Record::new(3, 10.5, 0.0),
        ];
        let r = run_sgb_any(
            &pts,
            &SgbAnyConfig::new(Metric::L2, 1.0, AnyStrategy::Indexed),
        )
        .unwrap();
        assert_eq!(r.groups.len(), 2);
        assert_eq!(r.groups[0].members, vec![RecordId(0), RecordId(1)]);
        assert_eq!(r.groups[1].id, GroupId(1));
    }

    #[test]
    fn candidate_lookup_merges_three_groups() {
        // three groups around x = (0, 0), ε = 4 under L∞
        let pts = vec![
            Record::new(0, -6.0, 0.0), // a1
            Record::new(1, -3.0, 1.0), // a3, within reach of x
            Record::new(2, 3.0, 3.0),  // c1
            Record::new(3, 3.5, 2.0),  // c2
            Record::new(4, 1.0, -3.5), // b1
            Record::new(5, 2.0, -3.0), // b2
            Record::new(6, 0.0, 0.0),  // x
        ];
        let cfg = SgbAnyConfig::new(Metric::LInf, 4.0, AnyStrategy::Indexed);
        let mut state = AnyState::new(pts.len());
        for i in 0..6 {
            let c = find_candidate_groups_any(i, &pts, &mut state, &cfg);
            process_grouping_any(i, &c, &mut state.dsf, &mut state.next_group);
        }
        assert_eq!(state.dsf.class_count(), 3);
        let c = find_candidate_groups_any(6, &pts, &mut state, &cfg);
        assert_eq!(c.len(), 3);
        process_grouping_any(6, &c, &mut state.dsf, &mut state.next_group);
        assert_eq!(state.dsf.class_count(), 1);
        assert_eq!(state.dsf.class_label(6), Ok(0));
    }

    #[test]
    fn first_point_has_no_candidates() {
        let pts = vec![Record::new(0, 0.0, 0.0)];
        let cfg = SgbAnyConfig::new(Metric::L2, 1.0, AnyStrategy::Indexed);
        let mut state = AnyState::new(1);
        assert!(find_candidate_groups_any(0, &pts, &mut state, &cfg).is_empty());
    }

    #[test]
    fn l2_window_corner_is_filtered() {
        let pts = vec![Record::new(0, 0.0, 0.0), Record::new(1, 0.9, 0.9)];
        let cfg = SgbAnyConfig::new(Metric::L2, 1.0, AnyStrategy::Indexed);
        let mut state = AnyState::new(2);
        let c = find_candidate_groups_any(0, &pts, &mut state, &cfg);
        process_grouping_any(0, &c, &mut state.dsf, &mut state.next_group);
        assert!(find_candidate_groups_any(1, &pts, &mut state, &cfg).is_empty());
        let cfg = SgbAnyConfig::new(Metric::LInf, 1.0, AnyStrategy::Indexed);
        let r = run_sgb_any(&pts, &cfg).unwrap();
        assert_eq!(r.groups.len(), 1);
    }

    #[test]
    fn isolated_points_are_singletons() {
        let pts: Vec<Record> = (0..10)
            .map(|i| Record::new(i, 10.0 * i as f64, 0.0))
            .collect();
        let r = run_sgb_any(
            &pts,
            &SgbAnyConfig::new(Metric::L2, 1.0, AnyStrategy::Indexed),
        )
        .unwrap();
        assert_eq!(r.groups.len(), 10);
        assert!(r
            .groups
            .iter()
            .enumerate()
            .all(|(i, g)| g.id == GroupId(i as u32)));
    }

    #[test]
    fn invalid_eps() {
        let r = run_sgb_any(
            &example_points(),
            &SgbAnyConfig::new(Metric::L2, -1.0, AnyStrategy::Indexed),
        );
        assert!(matches!(r, Err(SgbError::InvalidConfig(_))));
    }
}
