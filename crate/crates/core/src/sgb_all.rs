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

//! Distance-to-all grouping.
//!
//! Points are consumed in input order. For each point the configured strategy
//! computes the groups the point can join (every member within ε) and the
//! groups it only partially overlaps. The overlap policy then decides what
//! happens to points that qualify for several groups.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Metric, Rect};
use crate::group_store::{GroupError, GroupId, GroupStore, Record, RecordId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OverlapPolicy {
    JoinAny,
    Eliminate,
    FormNewGroup,
}

impl OverlapPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            OverlapPolicy::JoinAny => "JOIN-ANY",
            OverlapPolicy::Eliminate => "ELIMINATE",
            OverlapPolicy::FormNewGroup => "FORM-NEW-GROUP",
        }
    }
}

keyword_enum!(OverlapPolicy, "overlap policy", {
    JoinAny => ["join-any"],
    Eliminate => ["eliminate"],
    FormNewGroup => ["form-new-group", "form-new"],
});

impl fmt::Display for OverlapPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How candidate and overlap groups are located.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Compare against every member of every group.
    AllPairs,
    /// Linear scan over group rectangles.
    BoundsChecking,
    /// Window query over an R-tree of group rectangles.
    Indexed,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::AllPairs => "all-pairs",
            Strategy::BoundsChecking => "bounds",
            Strategy::Indexed => "indexed",
        }
    }
}

keyword_enum!(Strategy, "strategy", {
    AllPairs => ["all-pairs", "allpairs"],
    BoundsChecking => ["bounds", "bounds-checking"],
    Indexed => ["indexed", "index"],
});

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const DEFAULT_MAX_RECURSION_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgbAllConfig {
    pub metric: Metric,
    pub eps: f64,
    pub policy: OverlapPolicy,
    pub strategy: Strategy,
    /// `None` sends a JOIN-ANY point to the candidate with the smallest id;
    /// `Some(seed)` picks uniformly with a seeded generator.
    pub join_any_seed: Option<u64>,
    pub max_recursion_depth: usize,
}

impl SgbAllConfig {
    pub fn new(metric: Metric, eps: f64, policy: OverlapPolicy, strategy: Strategy) -> Self {
        Self {
            metric,
            eps,
            policy,
            strategy,
            join_any_seed: None,
            max_recursion_depth: DEFAULT_MAX_RECURSION_DEPTH,
        }
    }

    pub fn validate(&self) -> Result<(), SgbError> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(SgbError::InvalidConfig(format!(
                "eps must be a positive finite number, got {}",
                self.eps
            )));
        }
        if self.max_recursion_depth == 0 {
            return Err(SgbError::InvalidConfig(
                "max recursion depth must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SgbError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("record {0:?} has a non-finite coordinate")]
    NonFinite(RecordId),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputGroup {
    pub id: GroupId,
    pub members: Vec<RecordId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GroupingResult {
    /// Output groups ordered by id; members in insertion order.
    pub groups: Vec<OutputGroup>,
    /// Points dropped by ELIMINATE, in the order they were dropped.
    pub eliminated: Vec<RecordId>,
    /// Number of grouping passes (more than one only under FORM-NEW-GROUP).
    pub pass_count: usize,
    /// Set when FORM-NEW-GROUP hit the recursion cap and the leftovers were
    /// emitted as singletons.
    pub truncated: bool,
}

impl GroupingResult {
    /// Group sizes in descending order.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.groups.iter().map(|g| g.members.len()).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }
}

/// Result of a FindCloseGroups call; both lists are in id order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CloseGroups {
    pub candidates: Vec<GroupId>,
    pub overlaps: Vec<GroupId>,
}

/// Naive strategy: inspect every member of every group. Under JOIN-ANY the
/// scan of a group stops at the first member out of range, and overlaps are
/// not collected.
pub fn find_close_groups_all_pairs(
    rec: &Record,
    store: &GroupStore,
    cfg: &SgbAllConfig,
) -> CloseGroups {
    let join_any = cfg.policy == OverlapPolicy::JoinAny;
    let mut out = CloseGroups::default();
    for g in store.iter() {
        let mut candidate = true;
        let mut overlap = false;
        for m in g.members() {
            if cfg.metric.similar(rec.point, m.point, cfg.eps) {
                overlap = true;
            } else {
                candidate = false;
                if join_any {
                    break;
                }
            }
        }
        if candidate {
            out.candidates.push(g.id());
        } else if !join_any && overlap {
            out.overlaps.push(g.id());
        }
    }
    out
}

/// Bounds-checking strategy: rectangle test per group, L2 hull refinement,
/// member scan only for groups whose rectangle meets the point's ε-square.
pub fn find_close_groups_bounds(
    rec: &Record,
    store: &mut GroupStore,
    cfg: &SgbAllConfig,
) -> CloseGroups {
    let join_any = cfg.policy == OverlapPolicy::JoinAny;
    let window = Rect::around(rec.point, cfg.eps);
    let mut out = CloseGroups::default();
    for g in store.iter_mut() {
        classify(g, rec, &window, cfg, join_any, &mut out);
    }
    out
}

/// Index bounds-checking strategy: only groups whose rectangle intersects the
/// point's ε-square can be candidates or overlaps, so classify just those.
pub fn find_close_groups_indexed(
    rec: &Record,
    store: &mut GroupStore,
    cfg: &SgbAllConfig,
) -> CloseGroups {
    let join_any = cfg.policy == OverlapPolicy::JoinAny;
    let window = Rect::around(rec.point, cfg.eps);
    let mut out = CloseGroups::default();
    store.for_each_in_window(&window, |g| {
        classify(g, rec, &window, cfg, join_any, &mut out)
    });
    out
}

fn classify(
    g: &mut crate::group_store::Group,
    rec: &Record,
    window: &Rect,
    cfg: &SgbAllConfig,
    join_any: bool,
    out: &mut CloseGroups,
) {
    let candidate = match cfg.metric {
        Metric::LInf => g.candidate_linf(rec.point),
        Metric::L2 => g.candidate_l2(rec.point, cfg.eps),
    };
    if candidate {
        out.candidates.push(g.id());
    } else if !join_any && g.rect().intersects(window) && g.overlaps(rec.point, cfg.metric, cfg.eps)
    {
        out.overlaps.push(g.id());
    }
}

/// Mutable state of one grouping pass.
#[derive(Debug)]
pub struct PassState {
    pub store: GroupStore,
    pub eliminated: Vec<RecordId>,
    /// Points set aside for the next FORM-NEW-GROUP pass.
    pub deferred: Vec<Record>,
    rng: Option<ChaCha8Rng>,
}

impl PassState {
    pub fn new(cfg: &SgbAllConfig, first_id: u32, rng_seed: Option<u64>) -> Self {
        Self {
            store: GroupStore::new(cfg.eps, first_id, cfg.strategy == Strategy::Indexed),
            eliminated: Vec::new(),
            deferred: Vec::new(),
            rng: rng_seed.map(ChaCha8Rng::seed_from_u64),
        }
    }
}

/// Places `rec` according to its candidate groups.
pub fn process_grouping_all(
    rec: &Record,
    candidates: &[GroupId],
    cfg: &SgbAllConfig,
    state: &mut PassState,
) -> Result<(), SgbError> {
    match candidates {
        [] => {
            state.store.create(*rec)?;
        }
        [only] => state.store.add_member(*only, *rec)?,
        _ => match cfg.policy {
            OverlapPolicy::JoinAny => {
                let pick = match &mut state.rng {
                    Some(rng) => candidates[rng.random_range(0..candidates.len())],
                    None => candidates[0],
                };
                state.store.add_member(pick, *rec)?;
            }
            OverlapPolicy::Eliminate => state.eliminated.push(rec.id),
            OverlapPolicy::FormNewGroup => state.deferred.push(*rec),
        },
    }
    Ok(())
}

/// Pulls the members of each overlap group that are within ε of `rec` out of
/// their group, dropping them (ELIMINATE) or deferring them (FORM-NEW-GROUP).
pub fn process_overlap(
    rec: &Record,
    overlaps: &[GroupId],
    cfg: &SgbAllConfig,
    state: &mut PassState,
) -> Result<(), SgbError> {
    for &gid in overlaps {
        let g = state.store.get(gid).ok_or(GroupError::UnknownGroup(gid))?;
        let hit: Vec<Record> = g
            .members()
            .iter()
            .filter(|m| cfg.metric.similar(rec.point, m.point, cfg.eps))
            .copied()
            .collect();
        debug_assert!(!hit.is_empty(), "overlap group without a close member");
        let ids: Vec<RecordId> = hit.iter().map(|m| m.id).collect();
        state.store.remove_members(gid, &ids)?;
        match cfg.policy {
            OverlapPolicy::Eliminate => state.eliminated.extend(ids),
            OverlapPolicy::FormNewGroup => state.deferred.extend(hit),
            OverlapPolicy::JoinAny => {}
        }
    }
    Ok(())
}

/// One pass of the SGB-All framework over `points`.
pub fn run_pass(
    points: &[Record],
    cfg: &SgbAllConfig,
    state: &mut PassState,
) -> Result<(), SgbError> {
    for rec in points {
        let close = match cfg.strategy {
            Strategy::AllPairs => find_close_groups_all_pairs(rec, &state.store, cfg),
            Strategy::BoundsChecking => find_close_groups_bounds(rec, &mut state.store, cfg),
            Strategy::Indexed => find_close_groups_indexed(rec, &mut state.store, cfg),
        };
        process_grouping_all(rec, &close.candidates, cfg, state)?;
        if cfg.policy != OverlapPolicy::JoinAny && !close.overlaps.is_empty() {
            process_overlap(rec, &close.overlaps, cfg, state)?;
        }
    }
    Ok(())
}

/// Runs SGB-All over `points` in the given order.
///
/// FORM-NEW-GROUP regroups the deferred points in further passes, each with a
/// fresh set of groups, until nothing is deferred or `max_recursion_depth`
/// passes have run. Group ids keep increasing across passes.
pub fn run_sgb_all(points: &[Record], cfg: &SgbAllConfig) -> Result<GroupingResult, SgbError> {
    cfg.validate()?;
    if let Some(bad) = points.iter().find(|r| !r.point.is_finite()) {
        return Err(SgbError::NonFinite(bad.id));
    }

    let mut result = GroupingResult::default();
    let mut next_id = 0u32;
    let mut pending: Vec<Record> = points.to_vec();
    let mut rng_seed = cfg.join_any_seed;

    loop {
        result.pass_count += 1;
        let mut state = PassState::new(cfg, next_id, rng_seed);
        run_pass(&pending, cfg, &mut state)?;
        next_id = state.store.next_id();
        rng_seed = rng_seed.map(|s| s.wrapping_add(1));

        result.eliminated.append(&mut state.eliminated);
        result
            .groups
            .extend(state.store.into_groups().into_iter().map(|g| OutputGroup {
                id: g.id(),
                members: g.members().iter().map(|m| m.id).collect(),
            }));

        if state.deferred.is_empty() {
            break;
        }
        if result.pass_count >= cfg.max_recursion_depth {
            log::warn!(
                "FORM-NEW-GROUP stopped after {} passes; {} points emitted as singletons",
                result.pass_count,
                state.deferred.len()
            );
            for rec in state.deferred {
                result.groups.push(OutputGroup {
                    id: GroupId(next_id),
                    members: vec![rec.id],
                });
                next_id += 1;
            }
            result.truncated = true;
            break;
        }
        pending = state.deferred;
    }
    Ok(result)
}
