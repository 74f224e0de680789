//! Shared scenario setup for the criterion benches.

use std::sync::Arc;

use rovi_core::workload::{generate_dataset, generate_workload};
use rovi_core::{RoviQuery, UserStore, VisualVocabulary, WorkloadSpec};

/// A small benchmark scenario: users, vocabulary and queries.
pub struct Scenario {
    pub users: Arc<UserStore>,
    pub vocab: Arc<VisualVocabulary>,
    pub queries: Vec<RoviQuery>,
}

/// Deterministic scenario with `n_users` users and a handful of queries.
pub fn scenario(n_users: usize, seed: u64) -> Scenario {
    let spec = WorkloadSpec {
        n_users,
        vocab_size: 500,
        words_per_user: (5, 20),
        n_queries: 16,
        n_query_words: 10,
        ..WorkloadSpec::default()
    };
    let (users, vocab) = generate_dataset(&spec, seed).expect("bench spec is valid");
    let queries = generate_workload(&spec, &users, seed).expect("bench spec is valid");
    Scenario { users, vocab, queries }
}
