//! Region-of-visual-interests search over geo-multimedia users.
//!
//! A user is a rectangular region of interest in the unit space plus the set
//! of visual words seen inside it; a query is a region, a word set and two
//! thresholds. An answer contains every user whose region overlaps the query
//! region enough (intersection-over-union) *and* whose words resemble the
//! query words enough (weighted word overlap).
//!
//! The crate provides:
//! - the data model and the two similarity measures ([`model`], [`geometry`]);
//! - the quadtree-plus-inverted-file index with its binary snapshot
//!   ([`qiv`], built on [`morton`] cell codes);
//! - three reference indexes on R-trees ([`baseline`], [`rtree`]);
//! - an exhaustive oracle and validation harness ([`oracle`]);
//! - synthetic data, serialization and timing utilities ([`workload`],
//!   [`dataset`], [`bench`], [`fixtures`]).

pub mod baseline;
pub mod bench;
pub mod dataset;
pub mod fixtures;
pub mod geometry;
pub mod model;
pub mod morton;
pub mod oracle;
pub mod qiv;
pub mod rtree;
pub mod workload;

pub use baseline::{DoubleIndex, PruneRule, SpatialFirstIndex, VisualFirstIndex};
pub use geometry::{geo_sim, matches, vis_sim};
pub use model::{
    derive_user, GeoImage, Mbr, ModelError, ResultSet, RoviQuery, RoviUser, UserId, UserStore,
    VisualVocabulary, WordId, WordSet,
};
pub use morton::MortonCode;
pub use oracle::{oracle_search, IndexKind, Oracle, RoviSearcher, ValidationReport};
pub use qiv::{QivIndex, QivParams, SnapshotError};
pub use rtree::{RectTree, RectTreeParams};
pub use workload::{generate_dataset, generate_workload, WorkloadError, WorkloadSpec};
