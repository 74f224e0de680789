//! Reference index structures the hybrid index is measured against.
//!
//! Three designs, each combining a spatial and a textual access path
//! differently: [`DoubleIndex`] keeps one R-tree and one inverted file and
//! intersects their answers, [`VisualFirstIndex`] keeps one R-tree per word,
//! and [`SpatialFirstIndex`] hangs per-leaf inverted files off a single
//! R-tree.

mod double;
mod spatial_first;
mod visual_first;

pub use double::DoubleIndex;
pub use spatial_first::{PruneRule, SpatialFirstIndex};
pub use visual_first::VisualFirstIndex;

use std::collections::HashMap;
use std::sync::Arc;

use crate::geometry::matches;
use crate::model::{ResultSet, RoviQuery, UserId, UserStore, VisualVocabulary, WordId};

/// Word to sorted list of holders, over the whole user store.
#[derive(Debug, Clone, Default)]
pub(crate) struct InvertedFile {
    postings: HashMap<WordId, Vec<UserId>>,
}

impl InvertedFile {
    /// Users inserted in ascending id order keep every posting list sorted.
    pub(crate) fn build(store: &UserStore) -> Self {
        let mut postings: HashMap<WordId, Vec<UserId>> = HashMap::new();
        for user in store.iter() {
            for word in user.words.iter() {
                postings.entry(word).or_default().push(user.user_id);
            }
        }
        Self { postings }
    }

    pub(crate) fn posting(&self, word: WordId) -> &[UserId] {
        self.postings.get(&word).map_or(&[], Vec::as_slice)
    }

    /// Sorted union of the posting lists of `words`.
    pub(crate) fn touched_users(&self, words: &[WordId]) -> Vec<UserId> {
        let mut out: Vec<UserId> = words.iter().flat_map(|&w| self.posting(w)).copied().collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Runs the exact predicate over sorted candidate ids.
pub(crate) fn verify_candidates(
    candidates: &[UserId],
    query: &RoviQuery,
    users: &UserStore,
    vocab: &VisualVocabulary,
) -> ResultSet {
    let mut out = Vec::new();
    for &id in candidates {
        let user = users.get(id).expect("candidate ids come from the store");
        if matches(query, user, vocab) {
            out.push(id);
        }
    }
    ResultSet::new(out)
}

/// Shared build-time validation: every index rejects stores whose users
/// reference words missing from the vocabulary.
pub(crate) fn validate_inputs(
    users: &Arc<UserStore>,
    vocab: &Arc<VisualVocabulary>,
) -> Result<(), crate::model::ModelError> {
    users.validate_against(vocab)
}
