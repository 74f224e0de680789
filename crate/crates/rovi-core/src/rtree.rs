//! Quadratic-split R-tree over user regions.
//!
//! Classic Guttman construction: insertion descends by least area enlargement,
//! overflowing nodes split with the quadratic seed/next heuristics, and splits
//! propagate upward, growing the root when it overflows. Leaves store
//! `(user id, region)` pairs. Forced reinsertion is deliberately omitted;
//! plain quadratic splitting is enough for read-only query workloads.

use crate::geometry::{area, intersection_area, overlaps_positively};
use crate::model::{Mbr, UserId};

/// Fanout bounds; a node splits when it exceeds `max_fanout` and each half of
/// a split holds at least `min_fanout` entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RectTreeParams {
    pub min_fanout: usize,
    pub max_fanout: usize,
}

impl Default for RectTreeParams {
    fn default() -> Self {
        Self { min_fanout: 8, max_fanout: 32 }
    }
}

impl RectTreeParams {
    fn assert_valid(&self) {
        assert!(self.min_fanout >= 1, "min_fanout must be positive");
        assert!(
            self.max_fanout >= 2 * self.min_fanout,
            "max_fanout must be at least twice min_fanout so splits can respect both bounds"
        );
    }
}

/// A user region stored in a leaf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafEntry {
    pub id: UserId,
    pub region: Mbr,
}

#[derive(Debug, Clone)]
struct Node {
    mbr: Mbr,
    kind: NodeBody,
}

#[derive(Debug, Clone)]
enum NodeBody {
    Internal(Vec<usize>),
    Leaf(Vec<LeafEntry>),
}

/// The tree. Only insertion mutates it.
#[derive(Debug, Clone)]
pub struct RectTree {
    nodes: Vec<Node>,
    root: usize,
    params: RectTreeParams,
    len: usize,
}

/// Tightest rectangle covering both arguments.
fn cover(a: &Mbr, b: &Mbr) -> Mbr {
    Mbr::new(
        a.x_min().min(b.x_min()),
        a.y_min().min(b.y_min()),
        a.x_max().max(b.x_max()),
        a.y_max().max(b.y_max()),
    )
    .expect("cover of unit-space rectangles stays in the unit space")
}

fn contains_rect(outer: &Mbr, inner: &Mbr) -> bool {
    outer.x_min() <= inner.x_min()
        && outer.y_min() <= inner.y_min()
        && outer.x_max() >= inner.x_max()
        && outer.y_max() >= inner.y_max()
}

impl RectTree {
    pub fn new(params: RectTreeParams) -> Self {
        params.assert_valid();
        Self {
            nodes: vec![Node { mbr: Mbr::unit(), kind: NodeBody::Leaf(Vec::new()) }],
            root: 0,
            params,
            len: 0,
        }
    }

    /// Builds a tree from an iterator of `(id, region)` pairs.
    pub fn bulk_insert(
        params: RectTreeParams,
        entries: impl IntoIterator<Item = (UserId, Mbr)>,
    ) -> Self {
        let mut tree = Self::new(params);
        for (id, region) in entries {
            tree.insert(id, region);
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn params(&self) -> RectTreeParams {
        self.params
    }

    pub fn insert(&mut self, id: UserId, region: Mbr) {
        let entry = LeafEntry { id, region };
        if let Some(sibling) = self.insert_rec(self.root, entry) {
            // Root split: grow the tree by one level.
            let old_root = self.root;
            let mbr = cover(&self.nodes[old_root].mbr, &self.nodes[sibling].mbr);
            self.nodes.push(Node { mbr, kind: NodeBody::Internal(vec![old_root, sibling]) });
            self.root = self.nodes.len() - 1;
        }
        self.len += 1;
    }

    /// Inserts into the subtree at `node`; returns a new sibling node id when
    /// the node split.
    fn insert_rec(&mut self, node: usize, entry: LeafEntry) -> Option<usize> {
        let grown = if self.len == 0 && node == self.root {
            entry.region
        } else {
            cover(&self.nodes[node].mbr, &entry.region)
        };
        self.nodes[node].mbr = grown;
        match &mut self.nodes[node].kind {
            NodeBody::Leaf(entries) => {
                entries.push(entry);
                (entries.len() > self.params.max_fanout).then(|| self.split_leaf(node))
            }
            NodeBody::Internal(children) => {
                let children_snapshot = children.clone();
                let chosen = self.choose_child(&children_snapshot, &entry.region);
                let sibling = self.insert_rec(chosen, entry)?;
                let NodeBody::Internal(children) = &mut self.nodes[node].kind else {
                    unreachable!()
                };
                children.push(sibling);
                (children.len() > self.params.max_fanout).then(|| self.split_internal(node))
            }
        }
    }

    /// Least-enlargement child choice; ties fall to the smaller area.
    fn choose_child(&self, children: &[usize], region: &Mbr) -> usize {
        let mut best = children[0];
        let mut best_growth = f64::INFINITY;
        let mut best_area = f64::INFINITY;
        for &c in children {
            let a = area(&self.nodes[c].mbr);
            let growth = area(&cover(&self.nodes[c].mbr, region)) - a;
            if growth < best_growth || (growth == best_growth && a < best_area) {
                best = c;
                best_growth = growth;
                best_area = a;
            }
        }
        best
    }

    fn split_leaf(&mut self, node: usize) -> usize {
        let NodeBody::Leaf(entries) =
            std::mem::replace(&mut self.nodes[node].kind, NodeBody::Leaf(Vec::new()))
        else {
            unreachable!()
        };
        let (left, right) = quadratic_split(entries, |e| e.region, self.params.min_fanout);
        let (lm, rm) = (mbr_of(&left, |e| e.region), mbr_of(&right, |e| e.region));
        self.nodes[node] = Node { mbr: lm, kind: NodeBody::Leaf(left) };
        self.nodes.push(Node { mbr: rm, kind: NodeBody::Leaf(right) });
        self.nodes.len() - 1
    }

    fn split_internal(&mut self, node: usize) -> usize {
        let NodeBody::Internal(children) =
            std::mem::replace(&mut self.nodes[node].kind, NodeBody::Leaf(Vec::new()))
        else {
            unreachable!()
        };
        let mbrs: Vec<Mbr> = children.iter().map(|&c| self.nodes[c].mbr).collect();
        let tagged: Vec<(usize, Mbr)> = children.into_iter().zip(mbrs).collect();
        let (left, right) = quadratic_split(tagged, |t| t.1, self.params.min_fanout);
        let (lm, rm) = (mbr_of(&left, |t| t.1), mbr_of(&right, |t| t.1));
        let left_ids = left.into_iter().map(|t| t.0).collect();
        let right_ids = right.into_iter().map(|t| t.0).collect();
        self.nodes[node] = Node { mbr: lm, kind: NodeBody::Internal(left_ids) };
        self.nodes.push(Node { mbr: rm, kind: NodeBody::Internal(right_ids) });
        self.nodes.len() - 1
    }

    /// Visits every entry whose subtree bound admits a geographic similarity of
    /// at least `gamma` against `query`: a subtree is skipped only when
    /// `intersection(query, mbr) / area(query)` — an upper bound on any
    /// member's similarity — falls below the threshold. With `gamma` zero
    /// nothing is skipped.
    pub fn for_each_with_geo_bound(&self, query: &Mbr, gamma: f64, mut f: impl FnMut(&LeafEntry)) {
        if self.len == 0 {
            return;
        }
        let qa = area(query);
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if gamma > 0.0 && qa > 0.0 && intersection_area(query, &node.mbr) / qa < gamma {
                continue;
            }
            match &node.kind {
                NodeBody::Leaf(entries) => entries.iter().for_each(&mut f),
                NodeBody::Internal(children) => stack.extend(children.iter().copied()),
            }
        }
    }

    /// Visits every entry whose region overlaps `query` with positive area.
    pub fn for_each_overlapping(&self, query: &Mbr, mut f: impl FnMut(&LeafEntry)) {
        if self.len == 0 {
            return;
        }
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if !overlaps_positively(query, &node.mbr) {
                continue;
            }
            match &node.kind {
                NodeBody::Leaf(entries) => {
                    for e in entries {
                        if overlaps_positively(query, &e.region) {
                            f(e);
                        }
                    }
                }
                NodeBody::Internal(children) => stack.extend(children.iter().copied()),
            }
        }
    }

    /// Node ids of all leaves.
    pub fn leaf_ids(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            match &self.nodes[id].kind {
                NodeBody::Leaf(_) => out.push(id),
                NodeBody::Internal(children) => stack.extend(children.iter().copied()),
            }
        }
        out
    }

    pub fn leaf_entries(&self, leaf: usize) -> &[LeafEntry] {
        match &self.nodes[leaf].kind {
            NodeBody::Leaf(entries) => entries,
            NodeBody::Internal(_) => panic!("node {leaf} is not a leaf"),
        }
    }

    pub fn node_mbr(&self, node: usize) -> Mbr {
        self.nodes[node].mbr
    }

    /// Structural checks used by the test suite.
    pub fn check_invariants(&self) {
        if self.len == 0 {
            return;
        }
        let mut seen = 0usize;
        let mut stack = vec![(self.root, true)];
        while let Some((id, is_root)) = stack.pop() {
            let node = &self.nodes[id];
            match &node.kind {
                NodeBody::Leaf(entries) => {
                    seen += entries.len();
                    if !is_root {
                        assert!(entries.len() >= self.params.min_fanout, "leaf underflow");
                    }
                    assert!(entries.len() <= self.params.max_fanout, "leaf overflow");
                    let mut m = entries[0].region;
                    for e in entries {
                        assert!(contains_rect(&node.mbr, &e.region), "entry outside leaf mbr");
                        m = cover(&m, &e.region);
                    }
                    assert_eq!(m, node.mbr, "leaf mbr must be tight");
                }
                NodeBody::Internal(children) => {
                    if !is_root {
                        assert!(children.len() >= self.params.min_fanout, "node underflow");
                    } else {
                        assert!(children.len() >= 2, "internal root needs two children");
                    }
                    assert!(children.len() <= self.params.max_fanout, "node overflow");
                    let mut m = self.nodes[children[0]].mbr;
                    for &c in children {
                        assert!(
                            contains_rect(&node.mbr, &self.nodes[c].mbr),
                            "child mbr outside parent"
                        );
                        m = cover(&m, &self.nodes[c].mbr);
                        stack.push((c, false));
                    }
                    assert_eq!(m, node.mbr, "internal mbr must be tight");
                }
            }
        }
        assert_eq!(seen, self.len, "entry count mismatch");
    }
}

fn mbr_of<T>(items: &[T], region: impl Fn(&T) -> Mbr) -> Mbr {
    let mut m = region(&items[0]);
    for item in &items[1..] {
        m = cover(&m, &region(item));
    }
    m
}

/// Guttman's quadratic split: seed the two groups with the pair wasting the
/// most area, then repeatedly assign the entry with the strongest preference.
fn quadratic_split<T>(
    mut items: Vec<T>,
    region: impl Fn(&T) -> Mbr,
    min_fanout: usize,
) -> (Vec<T>, Vec<T>) {
    debug_assert!(items.len() >= 2 * min_fanout);
    // Pick seeds.
    let (mut seed_a, mut seed_b, mut worst) = (0, 1, f64::NEG_INFINITY);
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            let (ri, rj) = (region(&items[i]), region(&items[j]));
            let waste = area(&cover(&ri, &rj)) - area(&ri) - area(&rj);
            if waste > worst {
                (seed_a, seed_b, worst) = (i, j, waste);
            }
        }
    }
    // Remove the later index first so the earlier one stays valid.
    let item_b = items.swap_remove(seed_b.max(seed_a));
    let item_a = items.swap_remove(seed_b.min(seed_a));
    let (mut mbr_a, mut mbr_b) = (region(&item_a), region(&item_b));
    let (mut group_a, mut group_b) = (vec![item_a], vec![item_b]);

    while let Some(next) = pick_next(&items, &region, &mbr_a, &mbr_b) {
        let item = items.swap_remove(next);
        // If one group must absorb everything left to reach the minimum, it does.
        let remaining = items.len() + 1;
        let to_a = if group_a.len() + remaining <= min_fanout {
            true
        } else if group_b.len() + remaining <= min_fanout {
            false
        } else {
            let r = region(&item);
            let grow_a = area(&cover(&mbr_a, &r)) - area(&mbr_a);
            let grow_b = area(&cover(&mbr_b, &r)) - area(&mbr_b);
            if grow_a != grow_b {
                grow_a < grow_b
            } else if area(&mbr_a) != area(&mbr_b) {
                area(&mbr_a) < area(&mbr_b)
            } else {
                group_a.len() <= group_b.len()
            }
        };
        if to_a {
            mbr_a = cover(&mbr_a, &region(&item));
            group_a.push(item);
        } else {
            mbr_b = cover(&mbr_b, &region(&item));
            group_b.push(item);
        }
    }
    (group_a, group_b)
}

/// Entry whose two possible placements differ the most; `None` when done.
fn pick_next<T>(
    items: &[T],
    region: &impl Fn(&T) -> Mbr,
    mbr_a: &Mbr,
    mbr_b: &Mbr,
) -> Option<usize> {
    let mut best = None;
    let mut best_diff = f64::NEG_INFINITY;
    for (i, item) in items.iter().enumerate() {
        let r = region(item);
        let grow_a = area(&cover(mbr_a, &r)) - area(mbr_a);
        let grow_b = area(&cover(mbr_b, &r)) - area(mbr_b);
        let diff = (grow_a - grow_b).abs();
        if diff > best_diff {
            best = Some(i);
            best_diff = diff;
        }
    }
    best
}
