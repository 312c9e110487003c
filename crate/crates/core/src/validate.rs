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

//! Output checks shared by tests and the benchmark harness.

use std::collections::HashMap;

use crate::geometry::{Metric, Point};
use crate::group_store::{Record, RecordId};
use crate::sgb_all::GroupingResult;

/// Verifies that every listed group is a clique under the predicate.
/// Returns the first violating pair.
pub fn check_cliques<'a, I>(
    points: &[Record],
    groups: I,
    metric: Metric,
    eps: f64,
) -> Result<(), (RecordId, RecordId)>
where
    I: IntoIterator<Item = &'a [RecordId]>,
{
    let lookup: HashMap<RecordId, usize> =
        points.iter().enumerate().map(|(i, r)| (r.id, i)).collect();
    for members in groups {
        let pts: Vec<_> = members.iter().map(|id| points[lookup[id]].point).collect();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                if !metric.similar(pts[i], pts[j], eps) {
                    return Err((members[i], members[j]));
                }
            }
        }
    }
    Ok(())
}

/// Counts predicate violations over every pair inside every group.
pub fn clique_violations(
    points: &[Record],
    result: &GroupingResult,
    metric: Metric,
    eps: f64,
) -> usize {
    let lookup: HashMap<RecordId, usize> =
        points.iter().enumerate().map(|(i, r)| (r.id, i)).collect();
    let mut bad = 0;
    for g in &result.groups {
        let pts: Vec<_> = g
            .members
            .iter()
            .map(|id| points[lookup[id]].point)
            .collect();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                bad += usize::from(!metric.similar(pts[i], pts[j], eps));
            }
        }
    }
    bad
}

/// Connectivity and maximality checks against the ε-graph of a point set.
///
/// Neighbors come from a uniform grid with cells of side 2ε, so a lookup
/// scans the 3x3 block around a point and checking a group costs time
/// proportional to its neighborhood rather than to the whole input.
pub struct ComponentChecker<'a> {
    points: &'a [Record],
    metric: Metric,
    eps: f64,
    lookup: HashMap<RecordId, usize>,
    grid: HashMap<(i64, i64), Vec<usize>>,
}

impl<'a> ComponentChecker<'a> {
    pub fn new(points: &'a [Record], metric: Metric, eps: f64) -> Self {
        let mut checker = Self {
            points,
            metric,
            eps,
            lookup: points.iter().enumerate().map(|(i, r)| (r.id, i)).collect(),
            grid: HashMap::new(),
        };
        for (i, r) in points.iter().enumerate() {
            let c = checker.cell(r.point);
            checker.grid.entry(c).or_default().push(i);
        }
        checker
    }

    fn cell(&self, p: Point) -> (i64, i64) {
        let side = 2.0 * self.eps;
        ((p.x / side).floor() as i64, (p.y / side).floor() as i64)
    }

    fn for_each_neighbor(&self, i: usize, mut f: impl FnMut(usize)) {
        let p = self.points[i].point;
        let (cx, cy) = self.cell(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                let key = (cx.saturating_add(dx), cy.saturating_add(dy));
                for &j in self.grid.get(&key).into_iter().flatten() {
                    if j != i && self.metric.similar(p, self.points[j].point, self.eps) {
                        f(j);
                    }
                }
            }
        }
    }

    /// Checks that `members` is connected in the ε-graph and that no point
    /// outside it is within ε of a member.
    pub fn check(&self, members: &[RecordId]) -> Result<(), String> {
        let Some(first) = members.first() else {
            return Err("empty group".into());
        };
        let mut inside = HashMap::with_capacity(members.len());
        for id in members {
            let i = *self
                .lookup
                .get(id)
                .ok_or_else(|| format!("{id:?} is not an input record"))?;
            inside.insert(i, false);
        }
        let start = self.lookup[first];
        inside.insert(start, true);
        let mut stack = vec![start];
        let mut reached = 1;
        let mut escaped = None;
        while let Some(a) = stack.pop() {
            self.for_each_neighbor(a, |b| match inside.get_mut(&b) {
                Some(seen) if !*seen => {
                    *seen = true;
                    reached += 1;
                    stack.push(b);
                }
                Some(_) => {}
                None => {
                    escaped.get_or_insert((b, a));
                }
            });
            if let Some((q, m)) = escaped {
                return Err(format!(
                    "{:?} is within eps of member {:?} but outside the group",
                    self.points[q].id, self.points[m].id
                ));
            }
        }
        if reached < inside.len() {
            let (&b, _) = inside
                .iter()
                .find(|(_, seen)| !**seen)
                .expect("unreached member");
            return Err(format!(
                "member {:?} is disconnected from its group",
                self.points[b].id
            ));
        }
        Ok(())
    }
}

/// One-off form of [`ComponentChecker::check`].
pub fn check_component(
    points: &[Record],
    members: &[RecordId],
    metric: Metric,
    eps: f64,
) -> Result<(), String> {
    ComponentChecker::new(points, metric, eps).check(members)
}

/// Checks that the groups plus eliminated points partition the input ids.
pub fn check_partition(points: &[Record], result: &GroupingResult) -> Result<(), String> {
    let mut count: HashMap<RecordId, usize> = points.iter().map(|r| (r.id, 0)).collect();
    let all = result
        .groups
        .iter()
        .flat_map(|g| g.members.iter())
        .chain(result.eliminated.iter());
    for id in all {
        match count.get_mut(id) {
            Some(c) => *c += 1,
            None => return Err(format!("{id:?} is not an input record")),
        }
    }
    if let Some((id, c)) = count.iter().find(|(_, &c)| c != 1) {
        return Err(format!("{id:?} appears {c} times"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ids(v: &[u64]) -> Vec<RecordId> {
        v.iter().map(|&i| RecordId(i)).collect()
    }

    #[test]
    fn chain_is_one_component() {
        let pts: Vec<_> = (0..6)
            .map(|i| Record::new(i, i as f64 * 0.9, 0.0))
            .collect();
        let c = ComponentChecker::new(&pts, Metric::L2, 1.0);
        assert!(c.check(&ids(&[0, 1, 2, 3, 4, 5])).is_ok());
        assert!(c
            .check(&ids(&[0, 1, 2]))
            .unwrap_err()
            .contains("outside the group"));
    }

    #[test]
    fn gap_is_reported_as_disconnected() {
        let pts = vec![Record::new(0, 0.0, 0.0), Record::new(1, 5.0, 0.0)];
        let err = check_component(&pts, &ids(&[0, 1]), Metric::LInf, 1.0).unwrap_err();
        assert!(err.contains("disconnected"));
    }

    #[test]
    fn grid_agrees_with_a_full_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<_> = (0..300)
            .map(|i| {
                Record::new(
                    i,
                    rng.random::<f64>() * 3.0 - 1.5,
                    rng.random::<f64>() * 3.0 - 1.5,
                )
            })
            .collect();
        for metric in [Metric::L2, Metric::LInf] {
            let c = ComponentChecker::new(&pts, metric, 0.1);
            for i in 0..pts.len() {
                let mut got = Vec::new();
                c.for_each_neighbor(i, |j| got.push(j));
                got.sort_unstable();
                let want: Vec<usize> = (0..pts.len())
                    .filter(|&j| j != i && metric.similar(pts[i].point, pts[j].point, 0.1))
                    .collect();
                assert_eq!(got, want);
            }
        }
    }
}
