//! Visual-first index: one R-tree of holder regions per vocabulary word.

use std::collections::HashMap;
use std::sync::Arc;

use super::validate_inputs;
use crate::geometry::{geo_sim, vis_sim};
use crate::model::{ModelError, ResultSet, RoviQuery, UserId, UserStore, VisualVocabulary, WordId};
use crate::rtree::{RectTree, RectTreeParams};

/// Routes the query through the trees of its words: every user whose region
/// intersects the query region in at least one of those trees becomes a
/// candidate, then the visual and geographic predicates run exactly.
#[derive(Debug)]
pub struct VisualFirstIndex {
    users: Arc<UserStore>,
    vocab: Arc<VisualVocabulary>,
    trees: HashMap<WordId, RectTree>,
}

impl VisualFirstIndex {
    pub fn build(users: Arc<UserStore>, vocab: Arc<VisualVocabulary>) -> Result<Self, ModelError> {
        validate_inputs(&users, &vocab)?;
        let params = RectTreeParams::default();
        let mut trees: HashMap<WordId, RectTree> = HashMap::new();
        for user in users.iter() {
            for word in user.words.iter() {
                trees
                    .entry(word)
                    .or_insert_with(|| RectTree::new(params))
                    .insert(user.user_id, user.region);
            }
        }
        Ok(Self { users, vocab, trees })
    }

    pub fn search(&self, query: &RoviQuery) -> ResultSet {
        let candidates = self.collect_candidates(query);
        let visual: Vec<UserId> = candidates
            .into_iter()
            .filter(|&id| {
                let user = self.users.get(id).expect("candidates come from the store");
                vis_sim(&query.words, &user.words, &self.vocab) >= query.gamma_v
            })
            .collect();
        let spatial: Vec<UserId> = visual
            .into_iter()
            .filter(|&id| {
                let user = self.users.get(id).expect("candidates come from the store");
                geo_sim(&query.region, &user.region).expect("stored regions have positive area")
                    >= query.gamma_g
            })
            .collect();
        ResultSet::new(spatial)
    }

    /// Sorted distinct ids gathered from the query words' trees. Thresholds of
    /// zero widen the sweep: users sharing no query word qualify visually when
    /// the visual threshold is zero, and users disjoint from the query region
    /// qualify geographically when the geographic threshold is zero, so the
    /// per-tree intersection walk would miss them.
    fn collect_candidates(&self, query: &RoviQuery) -> Vec<UserId> {
        if query.gamma_v == 0.0 {
            return self.users.ids().collect();
        }
        let mut out = Vec::new();
        for word in query.words.iter() {
            let Some(tree) = self.trees.get(&word) else { continue };
            if query.gamma_g == 0.0 {
                tree.for_each_with_geo_bound(&query.region, 0.0, |e| out.push(e.id));
            } else {
                tree.for_each_overlapping(&query.region, |e| out.push(e.id));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Words that at least one user holds have a tree.
    pub fn tree_count(&self) -> usize {
        self.trees.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::oracle::oracle_search;

    #[test]
    fn fixture_candidates_and_answer() {
        let fx = fixtures::seven_users();
        let index = VisualFirstIndex::build(fx.users.clone(), fx.vocab.clone()).unwrap();
        assert_eq!(index.tree_count(), 5, "word 6 is held by nobody");
        assert_eq!(index.collect_candidates(&fx.query), vec![1, 2, 3, 4, 7]);
        assert_eq!(index.search(&fx.query).ids(), &[3]);
    }

    #[test]
    fn matches_oracle_on_random_instances() {
        for seed in [2u64, 13, 55] {
            let (users, vocab) = fixtures::random_instance(200, 50, seed);
            let index = VisualFirstIndex::build(users.clone(), vocab.clone()).unwrap();
            for query in fixtures::random_queries(&users, 30, seed ^ 0x5a5a) {
                assert_eq!(index.search(&query), oracle_search(&users, &vocab, &query));
            }
        }
    }

    #[test]
    fn degenerate_thresholds_match_oracle() {
        let (users, vocab) = fixtures::random_instance(150, 40, 77);
        let index = VisualFirstIndex::build(users.clone(), vocab.clone()).unwrap();
        for base in fixtures::random_queries(&users, 10, 3) {
            for (gg, gv) in [(0.0, 0.0), (0.0, 0.3), (0.3, 0.0)] {
                let q = base.with_thresholds(gg, gv).unwrap();
                assert_eq!(index.search(&q), oracle_search(&users, &vocab, &q));
            }
        }
    }
}
