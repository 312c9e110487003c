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

//! In-memory R-tree keyed by rectangles.
//!
//! Guttman's original structure with quadratic split. Deletion condenses the
//! tree by reinserting the entries of underfull nodes. Each id appears at most
//! once, and the tree keeps an id -> key map so callers can delete or re-key
//! entries by id alone.

use std::collections::hash_map::Entry;
use std::fmt::Debug;
use std::hash::Hash;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::geometry::Rect;

pub const DEFAULT_MAX_ENTRIES: usize = 16;
pub const DEFAULT_MIN_ENTRIES: usize = 6;
/// Largest supported `max_entries`; node positions fit in a byte.
pub const MAX_FANOUT: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IndexError {
    #[error("id {0} is already present in the index")]
    DuplicateId(String),
    #[error("id {0} is not present in the index")]
    UnknownId(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexEntry<K> {
    pub key: Rect,
    pub id: K,
}

#[derive(Debug, Clone)]
enum Children<K> {
    // Parallel arrays: window scans touch only the dense key array.
    Leaf {
        keys: Vec<Rect>,
        ids: Vec<K>,
    },
    // mbrs[i] mirrors nodes[i].mbr for the same reason.
    Inner {
        mbrs: Vec<Rect>,
        nodes: Vec<Node<K>>,
    },
}

#[derive(Debug, Clone)]
struct Node<K> {
    mbr: Rect,
    children: Children<K>,
}

impl<K: Copy> Node<K> {
    fn empty_leaf(cap: usize) -> Self {
        Node {
            mbr: Rect::point(crate::geometry::Point::new(0.0, 0.0)),
            children: Children::Leaf {
                keys: Vec::with_capacity(cap),
                ids: Vec::with_capacity(cap),
            },
        }
    }

    fn inner(nodes: Vec<Node<K>>, cap: usize) -> Self {
        let mut mbrs = Vec::with_capacity(cap);
        mbrs.extend(nodes.iter().map(|n| n.mbr));
        let mut node = Node {
            mbr: mbrs[0],
            children: Children::Inner { mbrs, nodes },
        };
        node.recompute_mbr();
        node
    }

    fn len(&self) -> usize {
        match &self.children {
            Children::Leaf { keys, .. } => keys.len(),
            Children::Inner { nodes, .. } => nodes.len(),
        }
    }

    fn recompute_mbr(&mut self) {
        let rects = match &self.children {
            Children::Leaf { keys, .. } => keys,
            Children::Inner { mbrs, .. } => mbrs,
        };
        if let Some(mbr) = rects.iter().copied().reduce(|a, b| a.union(&b)) {
            self.mbr = mbr;
        }
    }

    fn collect_entries(self, out: &mut Vec<IndexEntry<K>>) {
        match self.children {
            Children::Leaf { keys, ids } => out.extend(
                keys.into_iter()
                    .zip(ids)
                    .map(|(key, id)| IndexEntry { key, id }),
            ),
            Children::Inner { nodes, .. } => nodes.into_iter().for_each(|n| n.collect_entries(out)),
        }
    }
}

/// R-tree over `(Rect, id)` entries.
#[derive(Debug, Clone)]
pub struct RTree<K> {
    root: Node<K>,
    keys: FxHashMap<K, Rect>,
    min_entries: usize,
    max_entries: usize,
}

impl<K> Default for RTree<K>
where
    K: Copy + Eq + Hash + Ord + Debug,
{
    fn default() -> Self {
        Self::new()
    }
}

impl<K> RTree<K>
where
    K: Copy + Eq + Hash + Ord + Debug,
{
    pub fn new() -> Self {
        Self::with_fanout(DEFAULT_MIN_ENTRIES, DEFAULT_MAX_ENTRIES)
    }

    /// An empty tree with room for `n` entries in its id map.
    pub fn with_capacity(n: usize) -> Self {
        let mut t = Self::new();
        t.keys.reserve(n);
        t
    }

    /// # Panics
    /// If `min_entries < 2`, `max_entries >= MAX_FANOUT`, or
    /// `2 * min_entries > max_entries + 1`.
    pub fn with_fanout(min_entries: usize, max_entries: usize) -> Self {
        assert!(min_entries >= 2, "min_entries must be at least 2");
        assert!(
            max_entries < MAX_FANOUT,
            "max_entries must be below {MAX_FANOUT}"
        );
        assert!(
            2 * min_entries <= max_entries + 1,
            "min_entries too large for max_entries"
        );
        Self {
            root: Node::empty_leaf(max_entries + 1),
            keys: FxHashMap::default(),
            min_entries,
            max_entries,
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn contains_id(&self, id: &K) -> bool {
        self.keys.contains_key(id)
    }

    pub fn key_of(&self, id: &K) -> Option<Rect> {
        self.keys.get(id).copied()
    }

    pub fn insert(&mut self, id: K, key: Rect) -> Result<(), IndexError> {
        match self.keys.entry(id) {
            Entry::Occupied(_) => return Err(IndexError::DuplicateId(format!("{id:?}"))),
            Entry::Vacant(slot) => {
                slot.insert(key);
            }
        }
        self.insert_entry(IndexEntry { key, id });
        Ok(())
    }

    pub fn remove(&mut self, id: &K) -> Result<Rect, IndexError> {
        let key = self
            .keys
            .remove(id)
            .ok_or_else(|| IndexError::UnknownId(format!("{id:?}")))?;
        let mut orphans = Vec::new();
        let found = remove_rec(&mut self.root, key, id, self.min_entries, &mut orphans);
        debug_assert!(found, "id map and tree out of sync");

        loop {
            match &mut self.root.children {
                Children::Inner { nodes, .. } if nodes.len() == 1 => {
                    self.root = nodes.pop().unwrap();
                }
                _ => break,
            }
        }
        for e in orphans {
            self.insert_entry(e);
        }
        Ok(key)
    }

    /// Replaces the key of an existing entry.
    pub fn update_key(&mut self, id: &K, key: Rect) -> Result<(), IndexError> {
        let old = self
            .keys
            .get(id)
            .copied()
            .ok_or_else(|| IndexError::UnknownId(format!("{id:?}")))?;
        if old == key {
            return Ok(());
        }
        if old.contains_rect(&key) {
            // shrinking in place keeps the entry in a valid leaf; only the
            // MBRs on its path need tightening
            let found = shrink_rec(&mut self.root, old, id, key);
            debug_assert!(found, "id map and tree out of sync");
            self.keys.insert(*id, key);
            return Ok(());
        }
        self.remove(id)?;
        self.insert(*id, key)
    }

    /// Ids of every entry whose key intersects `window`, sorted ascending.
    pub fn window_query(&self, window: &Rect) -> Vec<K> {
        let mut out = Vec::new();
        self.for_each_intersecting(window, |e| out.push(e.id));
        out.sort_unstable();
        out
    }

    /// Visits every entry whose key intersects `window`, in tree order.
    pub fn for_each_intersecting<F>(&self, window: &Rect, mut f: F)
    where
        F: FnMut(&IndexEntry<K>),
    {
        if self.is_empty() {
            return;
        }
        visit(&self.root, window, &mut f);
    }

    /// Every entry in the tree, sorted by id.
    pub fn entries(&self) -> Vec<IndexEntry<K>> {
        let mut out: Vec<_> = self
            .keys
            .iter()
            .map(|(&id, &key)| IndexEntry { key, id })
            .collect();
        out.sort_unstable_by_key(|e| e.id);
        out
    }

    /// Number of levels; an empty or single-leaf tree has height 1.
    pub fn height(&self) -> usize {
        let mut h = 1;
        let mut node = &self.root;
        while let Children::Inner { nodes, .. } = &node.children {
            node = &nodes[0];
            h += 1;
        }
        h
    }

    /// Walks the whole tree and checks its structural invariants: tight MBRs
    /// containing every child, uniform leaf depth, fanout bounds outside the
    /// root, and agreement between the tree and the id map.
    pub fn validate(&self) -> Result<(), String> {
        let mut leaf_depth = None;
        let mut seen = 0usize;
        self.validate_node(&self.root, 0, true, &mut leaf_depth, &mut seen)?;
        if seen != self.keys.len() {
            return Err(format!(
                "tree holds {seen} entries but id map holds {}",
                self.keys.len()
            ));
        }
        Ok(())
    }

    fn validate_node(
        &self,
        node: &Node<K>,
        depth: usize,
        is_root: bool,
        leaf_depth: &mut Option<usize>,
        seen: &mut usize,
    ) -> Result<(), String> {
        let n = node.len();
        if n > self.max_entries {
            return Err(format!("node at depth {depth} has {n} > max entries"));
        }
        if !is_root && n < self.min_entries {
            return Err(format!("node at depth {depth} has {n} < min entries"));
        }
        if is_root && matches!(&node.children, Children::Inner { nodes, .. } if nodes.len() < 2) {
            return Err("inner root with fewer than two children".into());
        }
        match &node.children {
            Children::Leaf { keys, ids } => {
                match leaf_depth {
                    Some(d) if *d != depth => {
                        return Err(format!("leaf at depth {depth}, expected {d}"))
                    }
                    None => *leaf_depth = Some(depth),
                    _ => {}
                }
                if keys.len() != ids.len() {
                    return Err(format!("leaf at depth {depth} has ragged arrays"));
                }
                for (key, id) in keys.iter().zip(ids) {
                    if !node.mbr.contains_rect(key) {
                        return Err(format!("entry {id:?} escapes its leaf MBR"));
                    }
                    if self.keys.get(id) != Some(key) {
                        return Err(format!("entry {id:?} disagrees with id map"));
                    }
                }
                *seen += keys.len();
            }
            Children::Inner { mbrs, nodes } => {
                if mbrs.len() != nodes.len() {
                    return Err(format!("inner node at depth {depth} has ragged arrays"));
                }
                for (m, c) in mbrs.iter().zip(nodes) {
                    if *m != c.mbr {
                        return Err(format!("stale child MBR at depth {depth}"));
                    }
                    if !node.mbr.contains_rect(&c.mbr) {
                        return Err(format!("child MBR escapes parent at depth {depth}"));
                    }
                    self.validate_node(c, depth + 1, false, leaf_depth, seen)?;
                }
            }
        }
        let rects = match &node.children {
            Children::Leaf { keys, .. } => keys,
            Children::Inner { mbrs, .. } => mbrs,
        };
        if let Some(u) = rects.iter().copied().reduce(|a, b| a.union(&b)) {
            if u != node.mbr {
                return Err(format!("MBR at depth {depth} is not tight"));
            }
        }
        Ok(())
    }

    fn insert_entry(&mut self, entry: IndexEntry<K>) {
        let (min, max) = (self.min_entries, self.max_entries);
        if let Some(sibling) = insert_rec(&mut self.root, entry, min, max) {
            let old = std::mem::replace(&mut self.root, Node::empty_leaf(0));
            self.root = Node::inner(vec![old, sibling], max + 1);
        }
    }
}

fn visit<K: Copy, F>(node: &Node<K>, window: &Rect, f: &mut F)
where
    F: FnMut(&IndexEntry<K>),
{
    let mut hit = [0u8; MAX_FANOUT];
    match &node.children {
        Children::Leaf { keys, ids } => {
            for &i in filter(keys, window, &mut hit) {
                let i = i as usize;
                f(&IndexEntry {
                    key: keys[i],
                    id: ids[i],
                });
            }
        }
        Children::Inner { mbrs, nodes } => {
            for &i in filter(mbrs, window, &mut hit) {
                visit(&nodes[i as usize], window, f);
            }
        }
    }
}

/// Positions of the rects intersecting `window`. Branch-free: whether
/// neighboring entries intersect is close to random, so a conditional jump
/// per entry mispredicts often.
fn filter<'a>(rects: &[Rect], window: &Rect, hit: &'a mut [u8; MAX_FANOUT]) -> &'a [u8] {
    let mut n = 0;
    for (k, r) in rects.iter().enumerate() {
        hit[n] = k as u8;
        n += usize::from(r.intersects(window));
    }
    &hit[..n]
}

fn choose_subtree(mbrs: &[Rect], key: &Rect) -> usize {
    // least perimeter growth, then least area growth, then smallest area
    let mut best = 0;
    let mut best_cost = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for (i, m) in mbrs.iter().enumerate() {
        let u = m.union(key);
        let growth = margin(&u) - margin(m);
        if growth > best_cost.0 {
            continue;
        }
        let area = m.area();
        let cost = (growth, u.area() - area, area);
        if cost < best_cost {
            best_cost = cost;
            best = i;
        }
    }
    best
}

fn insert_rec<K: Copy>(
    node: &mut Node<K>,
    entry: IndexEntry<K>,
    min: usize,
    max: usize,
) -> Option<Node<K>> {
    let was_empty = node.len() == 0;
    let split = match &mut node.children {
        Children::Leaf { keys, ids } => {
            keys.push(entry.key);
            ids.push(entry.id);
            if keys.len() > max {
                let (ga, gb) = quadratic_split(keys, min);
                let (ka, kb) = distribute(std::mem::take(keys), &ga, &gb, max + 1);
                let (ia, ib) = distribute(std::mem::take(ids), &ga, &gb, max + 1);
                *keys = ka;
                *ids = ia;
                Some(Children::Leaf { keys: kb, ids: ib })
            } else {
                None
            }
        }
        Children::Inner { mbrs, nodes } => {
            let idx = choose_subtree(mbrs, &entry.key);
            let sibling = insert_rec(&mut nodes[idx], entry, min, max);
            mbrs[idx] = nodes[idx].mbr;
            if let Some(s) = sibling {
                mbrs.push(s.mbr);
                nodes.push(s);
            }
            if nodes.len() > max {
                let (ga, gb) = quadratic_split(mbrs, min);
                let (ma, mb) = distribute(std::mem::take(mbrs), &ga, &gb, max + 1);
                let (na, nb) = distribute(std::mem::take(nodes), &ga, &gb, max + 1);
                *mbrs = ma;
                *nodes = na;
                Some(Children::Inner {
                    mbrs: mb,
                    nodes: nb,
                })
            } else {
                None
            }
        }
    };
    if split.is_some() {
        node.recompute_mbr();
    } else if was_empty {
        node.mbr = entry.key;
    } else {
        node.mbr = node.mbr.union(&entry.key);
    }
    split.map(|children| {
        let mut sib = Node {
            mbr: entry.key,
            children,
        };
        sib.recompute_mbr();
        sib
    })
}

fn remove_rec<K: Copy + Eq>(
    node: &mut Node<K>,
    key: Rect,
    id: &K,
    min: usize,
    orphans: &mut Vec<IndexEntry<K>>,
) -> bool {
    match &mut node.children {
        Children::Leaf { keys, ids } => {
            let Some(pos) = ids.iter().position(|e| e == id) else {
                return false;
            };
            keys.remove(pos);
            ids.remove(pos);
            node.recompute_mbr();
            true
        }
        Children::Inner { mbrs, nodes } => {
            for i in 0..nodes.len() {
                if !mbrs[i].contains_rect(&key) {
                    continue;
                }
                if remove_rec(&mut nodes[i], key, id, min, orphans) {
                    if nodes[i].len() < min {
                        mbrs.swap_remove(i);
                        nodes.swap_remove(i).collect_entries(orphans);
                    } else {
                        mbrs[i] = nodes[i].mbr;
                    }
                    node.recompute_mbr();
                    return true;
                }
            }
            false
        }
    }
}

fn shrink_rec<K: Copy + Eq>(node: &mut Node<K>, old: Rect, id: &K, key: Rect) -> bool {
    match &mut node.children {
        Children::Leaf { keys, ids } => {
            let Some(pos) = ids.iter().position(|e| e == id) else {
                return false;
            };
            keys[pos] = key;
        }
        Children::Inner { mbrs, nodes } => {
            let Some(i) = (0..nodes.len())
                .find(|&i| mbrs[i].contains_rect(&old) && shrink_rec(&mut nodes[i], old, id, key))
            else {
                return false;
            };
            mbrs[i] = nodes[i].mbr;
        }
    }
    node.recompute_mbr();
    true
}

/// Moves `items` into two vectors following the index groups of a split.
fn distribute<T>(items: Vec<T>, a: &[usize], b: &[usize], cap: usize) -> (Vec<T>, Vec<T>) {
    let mut slots: Vec<Option<T>> = items.into_iter().map(Some).collect();
    let mut take = |group: &[usize]| {
        let mut out = Vec::with_capacity(cap);
        out.extend(group.iter().map(|&i| slots[i].take().unwrap()));
        out
    };
    let left = take(a);
    let right = take(b);
    (left, right)
}

/// Guttman's quadratic split of `rects` into two index groups, each with at
/// least `min` members.
fn quadratic_split(rects: &[Rect], min: usize) -> (Vec<usize>, Vec<usize>) {
    let n = rects.len();

    // pick seeds: the pair wasting the most area
    let (mut s1, mut s2) = (0, 1);
    // ties on area (degenerate point keys) fall back to the margin
    let mut worst = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let areas: Vec<f64> = rects.iter().map(Rect::area).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let u = rects[i].union(&rects[j]);
            let waste = (u.area() - areas[i] - areas[j], margin(&u));
            if waste > worst {
                worst = waste;
                s1 = i;
                s2 = j;
            }
        }
    }

    let mut group_a = Vec::with_capacity(n);
    let mut group_b = Vec::with_capacity(n);
    group_a.push(s1);
    group_b.push(s2);
    let mut mbr_a = rects[s1];
    let mut mbr_b = rects[s2];
    let mut remaining: Vec<usize> = (0..n).filter(|&i| i != s1 && i != s2).collect();

    while !remaining.is_empty() {
        if group_a.len() + remaining.len() == min {
            group_a.append(&mut remaining);
            break;
        }
        if group_b.len() + remaining.len() == min {
            group_b.append(&mut remaining);
            break;
        }
        // pick next: strongest preference for one group
        let mut pick = 0;
        let mut best_diff = f64::NEG_INFINITY;
        let (area_a, area_b) = (mbr_a.area(), mbr_b.area());
        for (k, &i) in remaining.iter().enumerate() {
            let da = mbr_a.union(&rects[i]).area() - area_a;
            let db = mbr_b.union(&rects[i]).area() - area_b;
            let diff = (da - db).abs();
            if diff > best_diff {
                best_diff = diff;
                pick = k;
            }
        }
        let i = remaining.swap_remove(pick);
        let da = (
            mbr_a.enlargement(&rects[i]),
            margin_growth(&mbr_a, &rects[i]),
        );
        let db = (
            mbr_b.enlargement(&rects[i]),
            margin_growth(&mbr_b, &rects[i]),
        );
        let to_a = match da.partial_cmp(&db) {
            Some(std::cmp::Ordering::Less) => true,
            Some(std::cmp::Ordering::Greater) => false,
            _ => (mbr_a.area(), group_a.len()) <= (mbr_b.area(), group_b.len()),
        };
        if to_a {
            group_a.push(i);
            mbr_a = mbr_a.union(&rects[i]);
        } else {
            group_b.push(i);
            mbr_b = mbr_b.union(&rects[i]);
        }
    }

    (group_a, group_b)
}

fn margin(r: &Rect) -> f64 {
    r.width() + r.height()
}

fn margin_growth(a: &Rect, b: &Rect) -> f64 {
    margin(&a.union(b)) - margin(a)
}
