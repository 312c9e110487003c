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

//! Disjoint-set forest with path compression and union by rank.
//!
//! Ids are dense non-negative integers; the forest grows on demand so callers
//! may create sets for sparse ids. Each root carries the size of its class and
//! a label, which is the smallest label of any set merged into the class.

use thiserror::Error;

const ABSENT: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DisjointSetError {
    #[error("set {0} already exists")]
    Duplicate(usize),
    #[error("set {0} does not exist")]
    Unknown(usize),
}

#[derive(Debug, Clone, Default)]
pub struct DisjointSet {
    parent: Vec<u32>,
    rank: Vec<u8>,
    size: Vec<u32>,
    label: Vec<u32>,
    members: usize,
    classes: usize,
}

impl DisjointSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            parent: Vec::with_capacity(n),
            rank: Vec::with_capacity(n),
            size: Vec::with_capacity(n),
            label: Vec::with_capacity(n),
            ..Self::default()
        }
    }

    /// Creates `{id}` labelled with `id`.
    pub fn make_set(&mut self, id: usize) -> Result<(), DisjointSetError> {
        self.make_set_labeled(id, id as u32)
    }

    pub fn make_set_labeled(&mut self, id: usize, label: u32) -> Result<(), DisjointSetError> {
        assert!(id < ABSENT as usize, "id out of range");
        if self.contains(id) {
            return Err(DisjointSetError::Duplicate(id));
        }
        if id >= self.parent.len() {
            self.parent.resize(id + 1, ABSENT);
            self.rank.resize(id + 1, 0);
            self.size.resize(id + 1, 0);
            self.label.resize(id + 1, 0);
        }
        self.parent[id] = id as u32;
        self.size[id] = 1;
        self.label[id] = label;
        self.members += 1;
        self.classes += 1;
        Ok(())
    }

    pub fn contains(&self, id: usize) -> bool {
        self.parent.get(id).is_some_and(|&p| p != ABSENT)
    }

    /// Number of ids that have been added.
    pub fn len(&self) -> usize {
        self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members == 0
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    pub fn find(&mut self, id: usize) -> Result<usize, DisjointSetError> {
        if !self.contains(id) {
            return Err(DisjointSetError::Unknown(id));
        }
        Ok(self.find_root(id))
    }

    fn find_root(&mut self, id: usize) -> usize {
        let mut root = id;
        while self.parent[root] as usize != root {
            root = self.parent[root] as usize;
        }
        let mut cur = id;
        while cur != root {
            let next = self.parent[cur] as usize;
            self.parent[cur] = root as u32;
            cur = next;
        }
        root
    }

    /// Merges the classes of `a` and `b` and returns the new root.
    pub fn union(&mut self, a: usize, b: usize) -> Result<usize, DisjointSetError> {
        let ra = self.find(a)?;
        let rb = self.find(b)?;
        if ra == rb {
            return Ok(ra);
        }
        let (hi, lo) = if self.rank[ra] >= self.rank[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[lo] = hi as u32;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        self.size[hi] += self.size[lo];
        self.label[hi] = self.label[hi].min(self.label[lo]);
        self.classes -= 1;
        Ok(hi)
    }

    /// Size of the class containing `id`.
    pub fn class_size(&mut self, id: usize) -> Result<usize, DisjointSetError> {
        let r = self.find(id)?;
        Ok(self.size[r] as usize)
    }

    /// Label of the class containing `id`.
    pub fn class_label(&mut self, id: usize) -> Result<u32, DisjointSetError> {
        let r = self.find(id)?;
        Ok(self.label[r])
    }

    /// Every class as a sorted member list, ordered by class label.
    pub fn classes(&mut self) -> Vec<(u32, Vec<usize>)> {
        let mut by_root: std::collections::HashMap<usize, Vec<usize>> = Default::default();
        for id in 0..self.parent.len() {
            if self.parent[id] != ABSENT {
                let r = self.find_root(id);
                by_root.entry(r).or_default().push(id);
            }
        }
        let mut out: Vec<(u32, Vec<usize>)> = by_root
            .into_iter()
            .map(|(r, members)| (self.label[r], members))
            .collect();
        out.sort_unstable_by_key(|(label, members)| (*label, members[0]));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::{BTreeSet, VecDeque};

    fn bfs_partition(n: usize, edges: &[(usize, usize)]) -> BTreeSet<BTreeSet<usize>> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; n];
        let mut out = BTreeSet::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut q = VecDeque::from([s]);
            seen[s] = true;
            while let Some(v) = q.pop_front() {
                comp.insert(v);
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        q.push_back(w);
                    }
                }
            }
            out.insert(comp);
        }
        out
    }

    fn partition(ds: &mut DisjointSet) -> BTreeSet<BTreeSet<usize>> {
        ds.classes()
            .into_iter()
            .map(|(_, m)| m.into_iter().collect())
            .collect()
    }

    #[test]
    fn make_set_and_find() {
        let mut ds = DisjointSet::new();
        ds.make_set(7).unwrap();
        assert_eq!(ds.find(7), Ok(7));
        assert_eq!(ds.make_set(7), Err(DisjointSetError::Duplicate(7)));
        assert_eq!(ds.find(3), Err(DisjointSetError::Unknown(3)));
        assert_eq!(ds.union(7, 3), Err(DisjointSetError::Unknown(3)));
    }

    #[test]
    fn thousand_singletons() {
        let mut ds = DisjointSet::new();
        for i in 0..1000 {
            ds.make_set(i).unwrap();
        }
        let roots: BTreeSet<usize> = (0..1000).map(|i| ds.find(i).unwrap()).collect();
        assert_eq!(roots.len(), 1000);
        assert_eq!(ds.class_count(), 1000);
    }

    #[test]
    fn unions() {
        let mut ds = DisjointSet::new();
        for i in 1..=3 {
            ds.make_set(i).unwrap();
        }
        assert_eq!(ds.union(1, 1).unwrap(), ds.find(1).unwrap());
        ds.union(1, 2).unwrap();
        assert_eq!(ds.find(1), ds.find(2));
        ds.union(2, 3).unwrap();
        assert_eq!(ds.class_count(), 1);
        assert_eq!(ds.class_size(3), Ok(3));
        assert_eq!(ds.class_label(3), Ok(1));
    }

    #[test]
    fn chain_of_unions() {
        let mut ds = DisjointSet::new();
        for i in 0..101 {
            ds.make_set(i).unwrap();
        }
        for i in 0..100 {
            ds.union(i, i + 1).unwrap();
        }
        let r = ds.find(0).unwrap();
        assert!((0..101).all(|i| ds.find(i).unwrap() == r));
    }

    #[test]
    fn random_unions_match_bfs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 2000;
        let mut ds = DisjointSet::with_capacity(n);
        for i in 0..n {
            ds.make_set(i).unwrap();
        }
        let mut edges = Vec::new();
        for _ in 0..5000 {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            let before = ds.class_count();
            let merged = ds.find(a).unwrap() != ds.find(b).unwrap();
            ds.union(a, b).unwrap();
            assert_eq!(ds.class_count(), before - usize::from(merged));
            edges.push((a, b));
        }
        assert_eq!(partition(&mut ds), bfs_partition(n, &edges));
    }

    proptest! {
        #[test]
        fn find_never_changes_partition(
            n in 1usize..200,
            ops in prop::collection::vec((0usize..200, 0usize..200), 0..300),
        ) {
            let mut ds = DisjointSet::new();
            for i in 0..n {
                ds.make_set(i).unwrap();
            }
            for (a, b) in ops {
                let _ = ds.union(a % n, b % n);
            }
            let before = partition(&mut ds);
            for i in 0..n {
                ds.find(i).unwrap();
            }
            prop_assert_eq!(partition(&mut ds), before);
            // sizes at roots agree with materialized classes
            for (_, members) in ds.classes() {
                prop_assert_eq!(ds.class_size(members[0]).unwrap(), members.len());
            }
        }
    }
}
