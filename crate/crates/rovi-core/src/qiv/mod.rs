//! The quadtree inverted visual index.
//!
//! Three layers: a vocabulary of weighted words, a virtual quadtree whose
//! leaves list resident users, and per-word posting lists keyed by leaf cell.
//! A query intersects the tree with its region, discards leaves whose listed
//! query-word weight cannot reach the visual threshold, loads the surviving
//! posting lists, and verifies every candidate exactly.

mod snapshot;
mod tree;
pub(crate) mod varint;

pub use snapshot::SnapshotError;
pub use tree::{NodeId, NodeKind, QuadNode, QuadTree};

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use crate::geometry::{matches, total_weight};
use crate::model::{
    Mbr, ModelError, ResultSet, RoviQuery, UserId, UserStore, VisualVocabulary, WordId,
};
use crate::morton::MortonCode;

/// Quadtree shape parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QivParams {
    /// Deepest split level. Level-6 cells have side 1/64, which is comparable
    /// to typical region extents; splitting far below the object size only
    /// multiplies the leaves each region is replicated into.
    pub max_level: u8,
    /// A leaf splits when it holds more residents than this.
    pub leaf_capacity: usize,
}

impl Default for QivParams {
    fn default() -> Self {
        Self { max_level: 6, leaf_capacity: 64 }
    }
}

/// Minimum intersection weight a node or user must reach to stay a candidate:
/// `gamma_v` times the total query-word weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateThreshold(f64);

impl CandidateThreshold {
    pub fn new(query: &RoviQuery, vocab: &VisualVocabulary) -> Self {
        Self(query.gamma_v * total_weight(&query.words, vocab))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// One posting list's location: which leaf it belongs to and where its
/// delta-encoded ids sit in the payload.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PostingEntry {
    pub(crate) code: MortonCode,
    pub(crate) offset: u64,
    pub(crate) byte_len: u32,
}

/// Where posting bytes live: in memory right after a build, or in the
/// snapshot file after a load. File reads use positioned I/O, so concurrent
/// readers never share a seek position.
#[derive(Debug)]
pub(crate) enum PostingSource {
    Memory(Vec<u8>),
    File { file: std::fs::File, base: u64, len: u64 },
}

impl PostingSource {
    fn read(&self, offset: u64, byte_len: u32) -> std::io::Result<Vec<u8>> {
        match self {
            PostingSource::Memory(buf) => {
                let start = offset as usize;
                let end = start + byte_len as usize;
                Ok(buf[start..end].to_vec())
            }
            PostingSource::File { file, base, .. } => {
                use std::os::unix::fs::FileExt;
                let mut buf = vec![0u8; byte_len as usize];
                file.read_exact_at(&mut buf, base + offset)?;
                Ok(buf)
            }
        }
    }

    /// The whole payload, needed when re-saving a loaded index.
    fn read_all(&self) -> std::io::Result<Vec<u8>> {
        match self {
            PostingSource::Memory(buf) => Ok(buf.clone()),
            PostingSource::File { file, base, len } => {
                use std::os::unix::fs::FileExt;
                let mut buf = vec![0u8; *len as usize];
                file.read_exact_at(&mut buf, *base)?;
                Ok(buf)
            }
        }
    }
}

/// The complete index: user data for verification, the quadtree, and the
/// word-to-leaf posting directory.
#[derive(Debug)]
pub struct QivIndex {
    users: Arc<UserStore>,
    vocab: Arc<VisualVocabulary>,
    tree: QuadTree,
    directory: BTreeMap<WordId, Vec<PostingEntry>>,
    payload: PostingSource,
    params: QivParams,
}

impl QivIndex {
    /// Builds the index over `users`. Every user word must resolve in the
    /// vocabulary; duplicate ids are impossible by `UserStore` construction.
    pub fn build(
        users: Arc<UserStore>,
        vocab: Arc<VisualVocabulary>,
        params: QivParams,
    ) -> Result<Self, ModelError> {
        users.validate_against(&vocab)?;
        let tree = QuadTree::build(&users, params.max_level, params.leaf_capacity);

        let mut payload = Vec::new();
        let mut directory: BTreeMap<WordId, Vec<PostingEntry>> = BTreeMap::new();
        tree.for_each_leaf(|code, residents| {
            if residents.is_empty() {
                return;
            }
            // Residents are ascending, so each per-word list comes out sorted.
            let mut per_word: BTreeMap<WordId, Vec<UserId>> = BTreeMap::new();
            for &id in residents {
                let user = users.get(id).expect("resident is in the store");
                for w in user.words.iter() {
                    per_word.entry(w).or_default().push(id);
                }
            }
            for (word, ids) in per_word {
                let offset = payload.len() as u64;
                varint::write_id_list(&mut payload, &ids).expect("writing to a Vec cannot fail");
                let byte_len = (payload.len() as u64 - offset) as u32;
                directory.entry(word).or_default().push(PostingEntry {
                    code: *code,
                    offset,
                    byte_len,
                });
            }
        });

        Ok(Self { users, vocab, tree, directory, payload: PostingSource::Memory(payload), params })
    }

    pub fn params(&self) -> QivParams {
        self.params
    }

    pub fn tree(&self) -> &QuadTree {
        &self.tree
    }

    pub fn users(&self) -> &Arc<UserStore> {
        &self.users
    }

    pub fn vocab(&self) -> &Arc<VisualVocabulary> {
        &self.vocab
    }

    /// Leaves whose cells overlap the query region with positive area.
    pub fn get_intersect_nodes(&self, region: &Mbr) -> Vec<MortonCode> {
        self.tree.intersect_leaves(region)
    }

    /// Leaf cells with at least one user holding `word`, in curve order.
    pub fn get_word_nodes(&self, word: WordId) -> Vec<MortonCode> {
        self.directory
            .get(&word)
            .map(|entries| entries.iter().map(|e| e.code).collect())
            .unwrap_or_default()
    }

    /// Node-level visual filter: can users of this leaf possibly reach the
    /// threshold? Sums the weights of the query words whose node lists contain
    /// the leaf and compares against the candidate threshold.
    pub fn node_visual_filter(
        &self,
        query: &RoviQuery,
        node: &MortonCode,
        threshold: &CandidateThreshold,
    ) -> bool {
        let mut sum = 0.0;
        for w in query.words.iter() {
            if let Some(entries) = self.directory.get(&w) {
                if entries.binary_search_by(|e| e.code.cmp(node)).is_ok() {
                    sum += self.vocab.weight_of(w);
                }
            }
        }
        sum >= threshold.value()
    }

    /// Answers the query exactly: all users meeting both thresholds.
    pub fn search(&self, query: &RoviQuery) -> ResultSet {
        self.search_impl(query, true)
    }

    /// Diagnostic path with the node-level visual filter disabled; must return
    /// the same answer as [`Self::search`], only slower.
    pub fn search_without_filter(&self, query: &RoviQuery) -> ResultSet {
        self.search_impl(query, false)
    }

    fn search_impl(&self, query: &RoviQuery, use_filter: bool) -> ResultSet {
        // With gamma_g at zero every user qualifies geographically, including
        // ones disjoint from the query region, so region pruning must not run.
        let leaves = if query.gamma_g == 0.0 {
            self.tree.leaf_codes()
        } else {
            self.tree.intersect_leaves(&query.region)
        };

        let mut candidates: Vec<UserId>;
        if query.gamma_v == 0.0 {
            // Every user passes the visual test, including ones sharing no
            // query word; posting lists cannot surface those, resident lists can.
            candidates = Vec::new();
            for code in &leaves {
                candidates.extend_from_slice(
                    self.tree.leaf_residents(code).expect("code came from this tree"),
                );
            }
        } else {
            let threshold = CandidateThreshold::new(query, &self.vocab);
            // Per query word, the directory entries of leaves in the intersect
            // set, plus the summed word weight per leaf for the filter.
            let mut hits: Vec<(WordId, PostingEntry)> = Vec::new();
            let mut weight_sums: std::collections::HashMap<MortonCode, f64> =
                std::collections::HashMap::new();
            for w in query.words.iter() {
                let Some(entries) = self.directory.get(&w) else { continue };
                let weight = self.vocab.weight_of(w);
                intersect_codes(&leaves, entries, |entry| {
                    hits.push((w, *entry));
                    *weight_sums.entry(entry.code).or_insert(0.0) += weight;
                });
            }
            candidates = Vec::new();
            for (_, entry) in &hits {
                if use_filter && weight_sums[&entry.code] < threshold.value() {
                    continue;
                }
                let bytes = self
                    .payload
                    .read(entry.offset, entry.byte_len)
                    .expect("posting read failed; snapshot file vanished or is corrupt");
                let ids = decode_posting(&bytes);
                candidates.extend(ids);
            }
        }

        candidates.sort_unstable();
        candidates.dedup();
        candidates
            .into_iter()
            .filter(|&id| {
                let user = self.users.get(id).expect("candidate is in the store");
                matches(query, user, &self.vocab)
            })
            .collect()
    }

    /// Writes the index to `path`; the byte layout is fixed, so saving the
    /// same index twice produces identical files.
    pub fn save(&self, path: &Path) -> Result<(), SnapshotError> {
        snapshot::save(self, path)
    }

    /// Loads a snapshot. Posting lists stay in the file and are read on
    /// demand; everything else is reconstructed in memory.
    pub fn load(path: &Path) -> Result<Self, SnapshotError> {
        snapshot::load(path)
    }

    pub(crate) fn from_parts(
        users: Arc<UserStore>,
        vocab: Arc<VisualVocabulary>,
        tree: QuadTree,
        directory: BTreeMap<WordId, Vec<PostingEntry>>,
        payload: PostingSource,
        params: QivParams,
    ) -> Self {
        Self { users, vocab, tree, directory, payload, params }
    }

    #[cfg(test)]
    pub(crate) fn directory(&self) -> &BTreeMap<WordId, Vec<PostingEntry>> {
        &self.directory
    }

    /// Test hook: removes one user id from one posting list, leaving the rest
    /// of the index untouched. Lets the validation harness prove it detects a
    /// damaged index.
    #[doc(hidden)]
    pub fn corrupt_drop_posting_user(&mut self, word: WordId, user: UserId) -> bool {
        let Some(entries) = self.directory.get_mut(&word) else { return false };
        for entry in entries.iter_mut() {
            let bytes = self.payload.read(entry.offset, entry.byte_len).unwrap();
            let mut ids = decode_posting(&bytes);
            if let Ok(pos) = ids.binary_search(&user) {
                ids.remove(pos);
                let mut encoded = Vec::new();
                varint::write_id_list(&mut encoded, &ids).unwrap();
                let payload = match &mut self.payload {
                    PostingSource::Memory(buf) => buf,
                    PostingSource::File { .. } => {
                        unimplemented!("corruption hook only supports in-memory payloads")
                    }
                };
                entry.offset = payload.len() as u64;
                entry.byte_len = encoded.len() as u32;
                payload.extend_from_slice(&encoded);
                return true;
            }
        }
        false
    }
}

/// Decodes a delta-encoded posting blob into ascending user ids.
fn decode_posting(bytes: &[u8]) -> Vec<UserId> {
    let mut cursor = std::io::Cursor::new(bytes);
    let mut ids = Vec::new();
    let mut prev = 0u64;
    let mut first = true;
    while (cursor.position() as usize) < bytes.len() {
        let delta = varint::read_varint(&mut cursor).expect("posting blob is well formed");
        prev = if first { delta } else { prev + delta };
        first = false;
        ids.push(prev);
    }
    ids
}

/// Calls `visit` for every directory entry whose code appears in `codes`.
/// Both inputs are sorted; iterates the shorter side and binary-searches the
/// longer one.
fn intersect_codes(
    codes: &[MortonCode],
    entries: &[PostingEntry],
    mut visit: impl FnMut(&PostingEntry),
) {
    if codes.len() <= entries.len() {
        for code in codes {
            if let Ok(i) = entries.binary_search_by(|e| e.code.cmp(code)) {
                visit(&entries[i]);
            }
        }
    } else {
        for entry in entries {
            if codes.binary_search(&entry.code).is_ok() {
                visit(entry);
            }
        }
    }
}
