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

//! Materialized SGB-All groups.
//!
//! Every group keeps its ε-All rectangle in canonical form: the intersection
//! of the `2ε × 2ε` squares centered at its members. Under L∞ a point lies in
//! that rectangle exactly when it is within ε of every member. Under L2 the
//! rectangle is only a filter, and survivors are refined with the convex hull
//! of the group: the member farthest from any query point is a hull vertex.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{convex_hull, Hull, Metric, Point, Rect};
use crate::spatial_index::{IndexError, RTree};

/// Caller-supplied identifier of an input tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RecordId(pub u64);

/// Group identifier; ordinals increase with creation and are never reused
/// within one engine run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupId(pub u32);

impl std::fmt::Display for GroupId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "g{}", self.0)
    }
}

/// A tuple's grouping-attribute projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: RecordId,
    pub point: Point,
}

impl Record {
    pub fn new(id: u64, x: f64, y: f64) -> Self {
        Self {
            id: RecordId(id),
            point: Point::new(x, y),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GroupError {
    #[error("group {0} has an empty ε-All rectangle after adding a member")]
    EmptyRect(GroupId),
    #[error("record {record:?} is not a member of group {group}")]
    NotAMember { group: GroupId, record: RecordId },
    #[error("group {0} does not exist")]
    UnknownGroup(GroupId),
    #[error(transparent)]
    Index(#[from] IndexError),
}

#[derive(Debug, Clone)]
pub struct Group {
    id: GroupId,
    members: Vec<Record>,
    rect: Rect,
    hull: Option<Hull>,
    // points added since `hull` was last built
    pending: Vec<Point>,
}

impl Group {
    pub fn new(id: GroupId, first: Record, eps: f64) -> Self {
        Self {
            id,
            members: vec![first],
            rect: Rect::around(first.point, eps),
            hull: None,
            pending: Vec::new(),
        }
    }

    pub fn id(&self) -> GroupId {
        self.id
    }

    pub fn members(&self) -> &[Record] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    /// Adds a member that already passed the membership test, shrinking the
    /// rectangle to its intersection with the member's square.
    pub fn add_member(&mut self, rec: Record, eps: f64) -> Result<(), GroupError> {
        let shrunk = self
            .rect
            .intersection(&Rect::around(rec.point, eps))
            .ok_or(GroupError::EmptyRect(self.id))?;
        self.rect = shrunk;
        self.members.push(rec);
        if self.hull.is_some() {
            self.pending.push(rec.point);
        }
        Ok(())
    }

    /// Removes the given records and rebuilds the rectangle from the
    /// survivors. An emptied group keeps its last rectangle; the store
    /// destroys it.
    pub fn remove_members(&mut self, ids: &[RecordId], eps: f64) -> Result<(), GroupError> {
        if ids.is_empty() {
            return Ok(());
        }
        if let Some(&missing) = ids
            .iter()
            .find(|id| !self.members.iter().any(|m| m.id == **id))
        {
            return Err(GroupError::NotAMember {
                group: self.id,
                record: missing,
            });
        }
        self.members.retain(|m| !ids.contains(&m.id));
        self.hull = None;
        self.pending.clear();
        if let Some(rect) = canonical_rect(&self.members, eps) {
            self.rect = rect;
        } else if !self.members.is_empty() {
            return Err(GroupError::EmptyRect(self.id));
        }
        Ok(())
    }

    /// Convex hull of the members, rebuilt lazily after membership changes.
    pub fn hull(&mut self) -> &Hull {
        match self.hull.take() {
            None => {
                let pts: Vec<Point> = self.members.iter().map(|m| m.point).collect();
                self.hull = Some(convex_hull(&pts));
            }
            Some(h) if !self.pending.is_empty() => {
                // hull(S ∪ Q) = hull(hull(S) ∪ Q)
                let mut pts = Vec::with_capacity(h.vertices().len() + self.pending.len());
                pts.extend_from_slice(h.vertices());
                pts.append(&mut self.pending);
                self.hull = Some(convex_hull(&pts));
            }
            Some(h) => self.hull = Some(h),
        }
        self.hull.as_ref().unwrap()
    }

    /// L∞ membership test: the rectangle is exact.
    pub fn candidate_linf(&self, p: Point) -> bool {
        self.rect.contains(p)
    }

    /// L2 membership test: rectangle filter, then the hull refinement.
    pub fn candidate_l2(&mut self, p: Point, eps: f64) -> bool {
        if !self.rect.contains(p) {
            return false;
        }
        self.hull_test(p, eps)
    }

    /// Convex hull test on its own (no rectangle filter). Assumes the group is
    /// a valid L2 clique.
    pub fn hull_test(&mut self, p: Point, eps: f64) -> bool {
        let hull = self.hull();
        if hull.contains(p) {
            return true;
        }
        let far = hull.farthest_vertex(p).expect("non-empty group");
        Metric::L2.similar(p, far, eps)
    }

    pub fn farthest_hull_vertex(&mut self, p: Point) -> Point {
        self.hull().farthest_vertex(p).expect("non-empty group")
    }

    /// True if at least one member is within ε of `p`.
    pub fn overlaps(&self, p: Point, metric: Metric, eps: f64) -> bool {
        self.members.iter().any(|m| metric.similar(p, m.point, eps))
    }

    /// Members within ε of `p`, in membership order.
    pub fn members_within(&self, p: Point, metric: Metric, eps: f64) -> Vec<RecordId> {
        self.members
            .iter()
            .filter(|m| metric.similar(p, m.point, eps))
            .map(|m| m.id)
            .collect()
    }

    /// True if every member is within ε of `p`, by direct scan.
    pub fn all_within(&self, p: Point, metric: Metric, eps: f64) -> bool {
        self.members.iter().all(|m| metric.similar(p, m.point, eps))
    }
}

/// Intersection of the `2ε` squares around `members`; `None` if the list is
/// empty or the squares do not share a common point.
pub fn canonical_rect(members: &[Record], eps: f64) -> Option<Rect> {
    let mut it = members.iter();
    let first = Rect::around(it.next()?.point, eps);
    it.try_fold(first, |r, m| r.intersection(&Rect::around(m.point, eps)))
}

/// Live groups of one grouping pass, optionally mirrored into an R-tree over
/// their rectangles.
#[derive(Debug)]
pub struct GroupStore {
    eps: f64,
    first_id: u32,
    slots: Vec<Option<Group>>,
    live: usize,
    index: Option<RTree<GroupId>>,
    // reused by `for_each_in_window`
    scratch: Vec<GroupId>,
}

impl GroupStore {
    pub fn new(eps: f64, first_id: u32, indexed: bool) -> Self {
        Self {
            eps,
            first_id,
            slots: Vec::new(),
            live: 0,
            index: indexed.then(RTree::new),
            scratch: Vec::new(),
        }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Id the next created group will receive.
    pub fn next_id(&self) -> u32 {
        self.first_id + self.slots.len() as u32
    }

    pub fn live_count(&self) -> usize {
        self.live
    }

    pub fn is_indexed(&self) -> bool {
        self.index.is_some()
    }

    pub fn index(&self) -> Option<&RTree<GroupId>> {
        self.index.as_ref()
    }

    fn slot(&self, id: GroupId) -> Option<usize> {
        id.0.checked_sub(self.first_id).map(|s| s as usize)
    }

    pub fn get(&self, id: GroupId) -> Option<&Group> {
        self.slots.get(self.slot(id)?)?.as_ref()
    }

    pub fn get_mut(&mut self, id: GroupId) -> Option<&mut Group> {
        let s = self.slot(id)?;
        self.slots.get_mut(s)?.as_mut()
    }

    /// Live groups in id order.
    pub fn iter(&self) -> impl Iterator<Item = &Group> {
        self.slots.iter().flatten()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut Group> {
        self.slots.iter_mut().flatten()
    }

    pub fn create(&mut self, first: Record) -> Result<GroupId, GroupError> {
        let id = GroupId(self.next_id());
        let g = Group::new(id, first, self.eps);
        if let Some(ix) = &mut self.index {
            ix.insert(id, g.rect())?;
        }
        self.slots.push(Some(g));
        self.live += 1;
        Ok(id)
    }

    pub fn add_member(&mut self, id: GroupId, rec: Record) -> Result<(), GroupError> {
        let eps = self.eps;
        let g = self.get_mut(id).ok_or(GroupError::UnknownGroup(id))?;
        g.add_member(rec, eps)?;
        let rect = g.rect();
        if let Some(ix) = &mut self.index {
            ix.update_key(&id, rect)?;
        }
        Ok(())
    }

    /// Removes records from a group; returns `true` if the group was emptied
    /// and destroyed.
    pub fn remove_members(&mut self, id: GroupId, ids: &[RecordId]) -> Result<bool, GroupError> {
        let eps = self.eps;
        let g = self.get_mut(id).ok_or(GroupError::UnknownGroup(id))?;
        g.remove_members(ids, eps)?;
        if g.is_empty() {
            let s = self.slot(id).unwrap();
            self.slots[s] = None;
            self.live -= 1;
            if let Some(ix) = &mut self.index {
                ix.remove(&id)?;
            }
            return Ok(true);
        }
        let rect = g.rect();
        if let Some(ix) = &mut self.index {
            ix.update_key(&id, rect)?;
        }
        Ok(false)
    }

    /// Groups whose rectangle intersects `window`, in id order.
    ///
    /// # Panics
    /// If the store was created without an index.
    pub fn window_query(&self, window: &Rect) -> Vec<GroupId> {
        self.index
            .as_ref()
            .expect("window query on an unindexed group store")
            .window_query(window)
    }

    /// Calls `f` on every group whose rectangle intersects `window`, in id
    /// order. Same contract as [`GroupStore::window_query`] without the
    /// allocation.
    pub fn for_each_in_window<F>(&mut self, window: &Rect, mut f: F)
    where
        F: FnMut(&mut Group),
    {
        let mut ids = std::mem::take(&mut self.scratch);
        ids.clear();
        self.index
            .as_ref()
            .expect("window query on an unindexed group store")
            .for_each_intersecting(window, |e| ids.push(e.id));
        ids.sort_unstable();
        for &id in &ids {
            f(self.get_mut(id).expect("index references a live group"));
        }
        self.scratch = ids;
    }

    pub fn into_groups(self) -> Vec<Group> {
        self.slots.into_iter().flatten().collect()
    }
}
