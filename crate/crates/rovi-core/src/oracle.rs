//! Exhaustive reference search, and validation of the indexes against it.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::baseline::{DoubleIndex, PruneRule, SpatialFirstIndex, VisualFirstIndex};
use crate::geometry::{geo_sim, vis_sim};
use crate::model::{ModelError, ResultSet, RoviQuery, UserId, UserStore, VisualVocabulary};
use crate::qiv::{QivIndex, QivParams};

/// Scans every user and computes both similarities unconditionally. This is
/// the ground truth all indexes are compared against, so it stays free of
/// shortcuts on purpose.
pub fn oracle_search(users: &UserStore, vocab: &VisualVocabulary, query: &RoviQuery) -> ResultSet {
    let mut out = Vec::new();
    for user in users.iter() {
        let g = geo_sim(&query.region, &user.region).expect("stored regions have positive area");
        let v = vis_sim(&query.words, &user.words, vocab);
        if g >= query.gamma_g && v >= query.gamma_v {
            out.push(user.user_id);
        }
    }
    ResultSet::new(out)
}

/// Anything that can answer a query; the oracle and all four indexes do.
pub trait RoviSearcher: Send + Sync {
    fn name(&self) -> &'static str;
    fn search(&self, query: &RoviQuery) -> ResultSet;
}

/// The linear scan packaged as a searcher, for timing comparisons.
pub struct Oracle {
    users: Arc<UserStore>,
    vocab: Arc<VisualVocabulary>,
}

impl Oracle {
    pub fn new(users: Arc<UserStore>, vocab: Arc<VisualVocabulary>) -> Result<Self, ModelError> {
        users.validate_against(&vocab)?;
        Ok(Self { users, vocab })
    }
}

impl RoviSearcher for Oracle {
    fn name(&self) -> &'static str {
        "oracle"
    }
    fn search(&self, query: &RoviQuery) -> ResultSet {
        oracle_search(&self.users, &self.vocab, query)
    }
}

impl RoviSearcher for QivIndex {
    fn name(&self) -> &'static str {
        "qiv"
    }
    fn search(&self, query: &RoviQuery) -> ResultSet {
        QivIndex::search(self, query)
    }
}

impl RoviSearcher for DoubleIndex {
    fn name(&self) -> &'static str {
        "di"
    }
    fn search(&self, query: &RoviQuery) -> ResultSet {
        DoubleIndex::search(self, query)
    }
}

impl RoviSearcher for VisualFirstIndex {
    fn name(&self) -> &'static str {
        "vfi"
    }
    fn search(&self, query: &RoviQuery) -> ResultSet {
        VisualFirstIndex::search(self, query)
    }
}

impl RoviSearcher for SpatialFirstIndex {
    fn name(&self) -> &'static str {
        match self.rule() {
            PruneRule::UpperBound => "sfi",
            PruneRule::MbrScore => "sfi-mbr",
        }
    }
    fn search(&self, query: &RoviQuery) -> ResultSet {
        SpatialFirstIndex::search(self, query)
    }
}

/// The selectable index structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexKind {
    Qiv,
    Double,
    VisualFirst,
    SpatialFirst,
    /// Spatial-first with the lossy MBR-score prune; excluded from
    /// [`IndexKind::ALL`] because it can return incomplete answers.
    SpatialFirstMbr,
}

impl IndexKind {
    /// The exact indexes, in reporting order.
    pub const ALL: [IndexKind; 4] =
        [IndexKind::Qiv, IndexKind::Double, IndexKind::VisualFirst, IndexKind::SpatialFirst];

    pub fn build(
        self,
        users: Arc<UserStore>,
        vocab: Arc<VisualVocabulary>,
        params: QivParams,
    ) -> Result<Box<dyn RoviSearcher>, ModelError> {
        Ok(match self {
            IndexKind::Qiv => Box::new(QivIndex::build(users, vocab, params)?),
            IndexKind::Double => Box::new(DoubleIndex::build(users, vocab)?),
            IndexKind::VisualFirst => Box::new(VisualFirstIndex::build(users, vocab)?),
            IndexKind::SpatialFirst => Box::new(SpatialFirstIndex::build(users, vocab)?),
            IndexKind::SpatialFirstMbr => {
                Box::new(SpatialFirstIndex::build_with_rule(users, vocab, PruneRule::MbrScore)?)
            }
        })
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IndexKind::Qiv => "qiv",
            IndexKind::Double => "di",
            IndexKind::VisualFirst => "vfi",
            IndexKind::SpatialFirst => "sfi",
            IndexKind::SpatialFirstMbr => "sfi-mbr",
        })
    }
}

impl FromStr for IndexKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "qiv" => Ok(IndexKind::Qiv),
            "di" => Ok(IndexKind::Double),
            "vfi" => Ok(IndexKind::VisualFirst),
            "sfi" => Ok(IndexKind::SpatialFirst),
            "sfi-mbr" => Ok(IndexKind::SpatialFirstMbr),
            other => Err(format!("unknown index {other:?}; expected qiv, di, vfi, sfi or sfi-mbr")),
        }
    }
}

/// Outcome of one index on one query.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndexOutcome {
    pub index: String,
    pub matched: bool,
    pub result_size: usize,
    /// Smallest id present in exactly one of the two answers, when they differ.
    pub first_mismatch: Option<UserId>,
}

/// Outcome of one query across all indexes under test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QueryValidation {
    pub query_index: usize,
    pub oracle_size: usize,
    pub per_index: Vec<IndexOutcome>,
}

/// Full comparison of a set of indexes against the oracle on a workload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub indexes: Vec<String>,
    pub n_users: usize,
    pub n_queries: usize,
    pub all_match: bool,
    pub queries: Vec<QueryValidation>,
}

impl ValidationReport {
    /// Queries with at least one mismatching index.
    pub fn failures(&self) -> impl Iterator<Item = &QueryValidation> {
        self.queries.iter().filter(|q| q.per_index.iter().any(|o| !o.matched))
    }
}

/// Builds the requested indexes and compares each against the oracle on every
/// query.
pub fn validate(
    users: &Arc<UserStore>,
    vocab: &Arc<VisualVocabulary>,
    queries: &[RoviQuery],
    kinds: &[IndexKind],
    params: QivParams,
) -> Result<ValidationReport, ModelError> {
    let searchers = kinds
        .iter()
        .map(|k| k.build(users.clone(), vocab.clone(), params))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(validate_with(users, vocab, queries, &searchers))
}

/// Same comparison over already-built searchers.
pub fn validate_with(
    users: &UserStore,
    vocab: &VisualVocabulary,
    queries: &[RoviQuery],
    searchers: &[Box<dyn RoviSearcher>],
) -> ValidationReport {
    let mut report = ValidationReport {
        indexes: searchers.iter().map(|s| s.name().to_owned()).collect(),
        n_users: users.len(),
        n_queries: queries.len(),
        all_match: true,
        queries: Vec::with_capacity(queries.len()),
    };
    for (qi, query) in queries.iter().enumerate() {
        let expected = oracle_search(users, vocab, query);
        let per_index = searchers
            .iter()
            .map(|s| {
                let got = s.search(query);
                let matched = got == expected;
                report.all_match &= matched;
                IndexOutcome {
                    index: s.name().to_owned(),
                    matched,
                    result_size: got.len(),
                    first_mismatch: expected.first_difference(&got),
                }
            })
            .collect();
        report.queries.push(QueryValidation {
            query_index: qi,
            oracle_size: expected.len(),
            per_index,
        });
    }
    report
}
