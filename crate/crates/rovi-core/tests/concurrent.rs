//! Indexes are immutable once built, so any number of threads may query one
//! concurrently. Every subject must answer exactly as it does single-threaded,
//! including a snapshot-loaded index that reads posting bytes from disk.

use std::thread;

use rovi_core::fixtures::{random_instance, random_queries};
use rovi_core::{
    DoubleIndex, QivIndex, QivParams, RoviSearcher, SpatialFirstIndex, VisualFirstIndex,
};

#[test]
fn concurrent_readers_match_single_threaded_answers() {
    let (users, vocab) = random_instance(600, 60, 404);
    let queries = random_queries(&users, 24, 405);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("index.qiv");
    let qiv = QivIndex::build(users.clone(), vocab.clone(), QivParams::default()).unwrap();
    qiv.save(&path).unwrap();
    // The loaded copy serves postings straight from the file, so this subject
    // exercises positioned reads from many threads at once.
    let loaded = QivIndex::load(&path).unwrap();

    let subjects: Vec<Box<dyn RoviSearcher>> = vec![
        Box::new(qiv),
        Box::new(loaded),
        Box::new(DoubleIndex::build(users.clone(), vocab.clone()).unwrap()),
        Box::new(VisualFirstIndex::build(users.clone(), vocab.clone()).unwrap()),
        Box::new(SpatialFirstIndex::build(users.clone(), vocab.clone()).unwrap()),
    ];

    let mut total_hits = 0usize;
    for subject in &subjects {
        let expected: Vec<_> = queries.iter().map(|q| subject.search(q)).collect();
        total_hits += expected.iter().map(|r| r.len()).sum::<usize>();
        thread::scope(|scope| {
            for _ in 0..8 {
                scope.spawn(|| {
                    for (query, want) in queries.iter().zip(&expected) {
                        assert_eq!(
                            &subject.search(query),
                            want,
                            "{} diverged under concurrency",
                            subject.name()
                        );
                    }
                });
            }
        });
    }
    assert!(total_hits > 0, "workload produced no matches; the check is vacuous");
}
