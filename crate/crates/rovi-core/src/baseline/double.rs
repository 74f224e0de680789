//! Double index: one R-tree plus one inverted file, answers intersected.

use std::sync::Arc;

use super::{validate_inputs, InvertedFile};
use crate::geometry::{geo_sim, vis_sim};
use crate::model::{ModelError, ResultSet, RoviQuery, UserId, UserStore, VisualVocabulary};
use crate::rtree::{RectTree, RectTreeParams};

/// Evaluates the spatial and visual predicates independently — an R-tree
/// sweep for one, an inverted-file sweep for the other — and intersects the
/// two id lists.
#[derive(Debug)]
pub struct DoubleIndex {
    users: Arc<UserStore>,
    vocab: Arc<VisualVocabulary>,
    tree: RectTree,
    inverted: InvertedFile,
}

impl DoubleIndex {
    pub fn build(users: Arc<UserStore>, vocab: Arc<VisualVocabulary>) -> Result<Self, ModelError> {
        validate_inputs(&users, &vocab)?;
        let tree = RectTree::bulk_insert(
            RectTreeParams::default(),
            users.iter().map(|u| (u.user_id, u.region)),
        );
        let inverted = InvertedFile::build(&users);
        Ok(Self { users, vocab, tree, inverted })
    }

    pub fn search(&self, query: &RoviQuery) -> ResultSet {
        let spatial = self.spatial_route(query);
        let visual = self.visual_route(query);
        ResultSet::new(intersect_sorted(&spatial, &visual))
    }

    /// Ids passing the geographic threshold, ascending. Subtrees are skipped
    /// with the intersection/query-area upper bound; survivors are checked
    /// exactly.
    fn spatial_route(&self, query: &RoviQuery) -> Vec<UserId> {
        let mut out = Vec::new();
        self.tree.for_each_with_geo_bound(&query.region, query.gamma_g, |entry| {
            let sim =
                geo_sim(&query.region, &entry.region).expect("stored regions have positive area");
            if sim >= query.gamma_g {
                out.push(entry.id);
            }
        });
        out.sort_unstable();
        out
    }

    /// Ids passing the visual threshold, ascending. With a positive threshold
    /// only users sharing at least one query word can qualify, so the posting
    /// lists bound the scan; at threshold zero everybody qualifies.
    fn visual_route(&self, query: &RoviQuery) -> Vec<UserId> {
        if query.gamma_v == 0.0 {
            return self.users.ids().collect();
        }
        self.inverted
            .touched_users(query.words.as_slice())
            .into_iter()
            .filter(|&id| {
                let user = self.users.get(id).expect("posting ids come from the store");
                vis_sim(&query.words, &user.words, &self.vocab) >= query.gamma_v
            })
            .collect()
    }
}

fn intersect_sorted(a: &[UserId], b: &[UserId]) -> Vec<UserId> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}
