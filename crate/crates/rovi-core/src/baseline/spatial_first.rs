//! Spatial-first index: one R-tree whose leaves carry local inverted files.

use std::collections::HashMap;
use std::sync::Arc;

use super::{validate_inputs, verify_candidates};
use crate::geometry::{area, geo_sim, intersection_area};
use crate::model::{ModelError, ResultSet, RoviQuery, UserId, UserStore, VisualVocabulary, WordId};
use crate::rtree::{RectTree, RectTreeParams};

/// How a leaf is judged against the geographic threshold before its inverted
/// file is consulted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PruneRule {
    /// Skip a leaf only when `intersection(query, leaf mbr) / area(query)`
    /// falls below the threshold. That ratio upper-bounds the similarity of
    /// every region inside the leaf, so no answer is ever lost.
    #[default]
    UpperBound,
    /// Skip a leaf when the leaf MBR's own similarity falls below the
    /// threshold. A region inside a leaf can outscore the leafMBR — a small
    /// region well-covered by the query scores high while the sprawling MBR
    /// scores low — so this rule can discard answers. Kept for comparison.
    MbrScore,
}

struct LeafFile {
    node: usize,
    postings: HashMap<WordId, Vec<UserId>>,
}

/// Walks R-tree leaves, prunes whole leaves by the geographic threshold, and
/// collects candidates from the surviving leaves' inverted files.
pub struct SpatialFirstIndex {
    users: Arc<UserStore>,
    vocab: Arc<VisualVocabulary>,
    tree: RectTree,
    leaves: Vec<LeafFile>,
    rule: PruneRule,
}

impl SpatialFirstIndex {
    pub fn build(users: Arc<UserStore>, vocab: Arc<VisualVocabulary>) -> Result<Self, ModelError> {
        Self::build_with_rule(users, vocab, PruneRule::default())
    }

    pub fn build_with_rule(
        users: Arc<UserStore>,
        vocab: Arc<VisualVocabulary>,
        rule: PruneRule,
    ) -> Result<Self, ModelError> {
        Self::build_custom(users, vocab, rule, RectTreeParams::default())
    }

    /// Build with explicit tree fanout; small fanouts make leaf pruning
    /// observable on small datasets.
    pub fn build_custom(
        users: Arc<UserStore>,
        vocab: Arc<VisualVocabulary>,
        rule: PruneRule,
        params: RectTreeParams,
    ) -> Result<Self, ModelError> {
        validate_inputs(&users, &vocab)?;
        let tree = RectTree::bulk_insert(params, users.iter().map(|u| (u.user_id, u.region)));
        let mut leaves = Vec::new();
        for node in tree.leaf_ids() {
            let mut postings: HashMap<WordId, Vec<UserId>> = HashMap::new();
            for entry in tree.leaf_entries(node) {
                let user = users.get(entry.id).expect("tree holds store ids");
                for word in user.words.iter() {
                    postings.entry(word).or_default().push(entry.id);
                }
            }
            leaves.push(LeafFile { node, postings });
        }
        Ok(Self { users, vocab, tree, leaves, rule })
    }

    pub fn rule(&self) -> PruneRule {
        self.rule
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn search(&self, query: &RoviQuery) -> ResultSet {
        let qa = area(&query.region);
        let mut candidates: Vec<UserId> = Vec::new();
        for leaf in &self.leaves {
            let mbr = self.tree.node_mbr(leaf.node);
            let pruned = match self.rule {
                PruneRule::UpperBound => {
                    intersection_area(&query.region, &mbr) / qa < query.gamma_g
                }
                PruneRule::MbrScore => {
                    geo_sim(&query.region, &mbr).expect("leaf mbrs have positive area")
                        < query.gamma_g
                }
            };
            if pruned {
                continue;
            }
            if query.gamma_v == 0.0 {
                // Everybody in the leaf qualifies visually.
                candidates.extend(self.tree.leaf_entries(leaf.node).iter().map(|e| e.id));
            } else {
                for word in query.words.iter() {
                    if let Some(ids) = leaf.postings.get(&word) {
                        candidates.extend_from_slice(ids);
                    }
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        verify_candidates(&candidates, query, &self.users, &self.vocab)
    }
}
