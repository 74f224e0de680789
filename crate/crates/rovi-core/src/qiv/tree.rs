//! Virtual quadtree over the unit space.
//!
//! Nodes carry no stored rectangles — a node's region is derived from its
//! Morton code. A user is resident in every leaf its region overlaps with
//! positive area, so wide regions appear in several leaves. A leaf splits when
//! its resident count exceeds the capacity and it is above the maximum level;
//! all four children are materialized so the leaves always tile the space.

use crate::geometry::overlaps_positively;
use crate::model::{Mbr, UserId, UserStore};
use crate::morton::{MortonCode, CHILDREN};

/// Index of a node in the tree arena.
pub type NodeId = u32;

/// One quadtree node: a cell address plus either children or residents.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadNode {
    code: MortonCode,
    kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Internal { children: [NodeId; CHILDREN] },
    Leaf { residents: Vec<UserId> },
}

impl QuadNode {
    pub(crate) fn new_leaf(code: MortonCode, residents: Vec<UserId>) -> Self {
        Self { code, kind: NodeKind::Leaf { residents } }
    }

    pub(crate) fn new_internal(code: MortonCode, children: [NodeId; CHILDREN]) -> Self {
        Self { code, kind: NodeKind::Internal { children } }
    }

    pub(crate) fn set_children(&mut self, new_children: [NodeId; CHILDREN]) {
        match &mut self.kind {
            NodeKind::Internal { children } => *children = new_children,
            NodeKind::Leaf { .. } => unreachable!("only internal nodes have children"),
        }
    }

    pub fn code(&self) -> &MortonCode {
        &self.code
    }

    /// The cell rectangle, derived from the code.
    pub fn region(&self) -> Mbr {
        self.code.region()
    }

    pub fn kind(&self) -> &NodeKind {
        &self.kind
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf { .. })
    }
}

/// The tree itself; construction is the only mutation.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadTree {
    pub(crate) nodes: Vec<QuadNode>,
    pub(crate) max_level: u8,
    pub(crate) leaf_capacity: usize,
}

impl QuadTree {
    /// Builds the tree by inserting every user of `store` in ascending id
    /// order, which keeps every resident list sorted.
    pub fn build(store: &UserStore, max_level: u8, leaf_capacity: usize) -> Self {
        let mut tree = Self {
            nodes: vec![QuadNode {
                code: MortonCode::root(),
                kind: NodeKind::Leaf { residents: Vec::new() },
            }],
            max_level,
            leaf_capacity,
        };
        for user in store.iter() {
            tree.insert(0, &user.region, user.user_id, store);
        }
        tree
    }

    fn insert(&mut self, node: NodeId, region: &Mbr, id: UserId, store: &UserStore) {
        match &mut self.nodes[node as usize].kind {
            NodeKind::Leaf { residents } => {
                residents.push(id);
                let over_capacity = residents.len() > self.leaf_capacity;
                if over_capacity && self.nodes[node as usize].code.level() < self.max_level {
                    self.split(node, store);
                }
            }
            NodeKind::Internal { children } => {
                let children = *children;
                for child in children {
                    if overlaps_positively(region, &self.nodes[child as usize].region()) {
                        self.insert(child, region, id, store);
                    }
                }
            }
        }
    }

    /// Turns a leaf into an internal node with four fresh leaves and
    /// redistributes its residents; redistribution can cascade further splits.
    fn split(&mut self, node: NodeId, store: &UserStore) {
        let code = self.nodes[node as usize].code;
        let residents = match &mut self.nodes[node as usize].kind {
            NodeKind::Leaf { residents } => std::mem::take(residents),
            NodeKind::Internal { .. } => unreachable!("split target must be a leaf"),
        };
        let mut children = [0 as NodeId; CHILDREN];
        for (q, slot) in children.iter_mut().enumerate() {
            *slot = self.nodes.len() as NodeId;
            self.nodes.push(QuadNode {
                code: code.child(q as u8),
                kind: NodeKind::Leaf { residents: Vec::new() },
            });
        }
        self.nodes[node as usize].kind = NodeKind::Internal { children };
        for id in residents {
            let region = store.get(id).expect("resident id is in the store").region;
            self.insert(node, &region, id, store);
        }
    }

    pub fn max_level(&self) -> u8 {
        self.max_level
    }

    pub fn leaf_capacity(&self) -> usize {
        self.leaf_capacity
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> &QuadNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &QuadNode {
        &self.nodes[id as usize]
    }

    /// Visits every leaf in Z-curve (preorder) order.
    pub fn for_each_leaf<'a>(&'a self, mut f: impl FnMut(&'a MortonCode, &'a [UserId])) {
        let mut stack = vec![0 as NodeId];
        while let Some(id) = stack.pop() {
            match &self.nodes[id as usize].kind {
                NodeKind::Leaf { residents } => f(&self.nodes[id as usize].code, residents),
                NodeKind::Internal { children } => {
                    // Push in reverse so child 0 pops first.
                    for &c in children.iter().rev() {
                        stack.push(c);
                    }
                }
            }
        }
    }

    /// Codes of all leaves, in curve order.
    pub fn leaf_codes(&self) -> Vec<MortonCode> {
        let mut out = Vec::new();
        self.for_each_leaf(|code, _| out.push(*code));
        out
    }

    /// Codes of the leaves whose cells overlap `region` with positive area,
    /// in curve order.
    pub fn intersect_leaves(&self, region: &Mbr) -> Vec<MortonCode> {
        let mut out = Vec::new();
        let mut stack = vec![0 as NodeId];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id as usize];
            if !overlaps_positively(region, &node.region()) {
                continue;
            }
            match &node.kind {
                NodeKind::Leaf { .. } => out.push(node.code),
                NodeKind::Internal { children } => {
                    for &c in children.iter().rev() {
                        stack.push(c);
                    }
                }
            }
        }
        out
    }

    /// Sorted residents of the leaf with the given code, if it exists.
    pub fn leaf_residents(&self, code: &MortonCode) -> Option<&[UserId]> {
        let mut id = 0 as NodeId;
        loop {
            let node = &self.nodes[id as usize];
            match &node.kind {
                NodeKind::Leaf { residents } => {
                    return (node.code == *code).then_some(residents.as_slice());
                }
                NodeKind::Internal { children } => {
                    if node.code.level() >= code.level() {
                        return None;
                    }
                    // Follow the 2-bit group of `code` for the next level down.
                    let shift = 2 * (code.level() - node.code.level() - 1) as u32;
                    let quadrant = (code.bits() >> shift) & 0b11;
                    id = children[quadrant as usize];
                }
            }
        }
    }

    /// Codes of every leaf the user is resident in (its region list).
    pub fn region_list(&self, id: UserId) -> Vec<MortonCode> {
        let mut out = Vec::new();
        self.for_each_leaf(|code, residents| {
            if residents.binary_search(&id).is_ok() {
                out.push(*code);
            }
        });
        out
    }
}
