//! Deterministic example data shared by the test suites, benches and docs.

use std::sync::Arc;

use crate::model::{Mbr, RoviQuery, RoviUser, UserId, UserStore, VisualVocabulary, WordSet};
use crate::workload::{generate_dataset, generate_workload, WorkloadSpec};

/// The hand-checked walkthrough scenario: seven users, six unit-weight words
/// (word 6 is in the vocabulary but held by nobody), and one query.
pub struct SevenUsers {
    pub users: Arc<UserStore>,
    pub vocab: Arc<VisualVocabulary>,
    /// Asks for `{1, 2, 3}` near the center; only user 3 passes both
    /// thresholds (geographic ~0.461, visual 1.0).
    pub query: RoviQuery,
}

/// Builds the seven-user scenario.
///
/// Worked by hand: users 3 and 4 overlap the query region strongly but only
/// user 3 has the words; users 1, 2 and 7 share words 2-of-3 but barely graze
/// the region; users 5 and 6 are disjoint from it.
pub fn seven_users() -> SevenUsers {
    let user = |id: UserId, c: [f64; 4], words: &[u32]| {
        RoviUser::new(
            id,
            Mbr::new(c[0], c[1], c[2], c[3]).unwrap(),
            WordSet::new(words.iter().copied()),
        )
        .unwrap()
    };
    let users = UserStore::new(vec![
        user(1, [0.05, 0.10, 0.25, 0.50], &[2, 3]),
        user(2, [0.20, 0.20, 0.30, 0.50], &[1, 2]),
        user(3, [0.30, 0.40, 0.55, 0.70], &[1, 2, 3]),
        user(4, [0.30, 0.42, 0.54, 0.68], &[2, 4, 5]),
        user(5, [0.05, 0.60, 0.20, 0.80], &[3, 4, 5]),
        user(6, [0.25, 0.80, 0.40, 0.95], &[5]),
        user(7, [0.50, 0.755, 0.70, 0.95], &[1, 3]),
    ])
    .unwrap();
    let vocab = VisualVocabulary::from_entries((1..=6).map(|w| (w, 1.0))).unwrap();
    let query = RoviQuery::new(
        Mbr::new(0.24, 0.48, 0.52, 0.76).unwrap(),
        WordSet::new([1, 2, 3]),
        0.3,
        0.4,
    )
    .unwrap();
    SevenUsers { users: Arc::new(users), vocab: Arc::new(vocab), query }
}

/// A seeded random instance sized for unit tests: regions up to a fifth of
/// the space wide so overlaps actually happen at small populations.
pub fn random_instance(
    n_users: usize,
    vocab_size: u32,
    seed: u64,
) -> (Arc<UserStore>, Arc<VisualVocabulary>) {
    let spec = WorkloadSpec {
        n_users,
        vocab_size,
        words_per_user: (2, 8),
        region_extent: (0.01, 0.2),
        ..WorkloadSpec::default()
    };
    generate_dataset(&spec, seed).expect("test spec is valid")
}

/// Queries to pair with [`random_instance`]: small word sets, permissive
/// thresholds, regions centered on users so answers are often non-empty.
pub fn random_queries(users: &UserStore, n: usize, seed: u64) -> Vec<RoviQuery> {
    let max_word =
        users.iter().flat_map(|u| u.words.iter()).max().expect("stores in tests are non-empty");
    let spec = WorkloadSpec {
        vocab_size: max_word + 1,
        n_queries: n,
        n_query_words: 3,
        query_region_fraction: 0.05,
        gamma_g: 0.2,
        gamma_v: 0.3,
        ..WorkloadSpec::default()
    };
    generate_workload(&spec, users, seed).expect("test spec is valid")
}
