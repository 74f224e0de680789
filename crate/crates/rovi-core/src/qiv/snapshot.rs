//! Binary snapshot format for the index.
//!
//! Layout (all integers little-endian; see `docs/snapshot-format.md` for the
//! byte-level contract): a fixed header, the vocabulary, the user table, the
//! quadtree in preorder, the posting directory, and finally the posting
//! payload. Every section is written in a canonical order, so saving the same
//! index twice yields byte-identical files.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::model::{Mbr, ModelError, RoviUser, UserStore, VisualVocabulary, WordId, WordSet};
use crate::morton::{MortonCode, CHILDREN, MAX_LEVEL};

use super::tree::{NodeId, NodeKind, QuadNode, QuadTree};
use super::varint::{read_id_list, read_varint, write_id_list, write_varint};
use super::{PostingEntry, PostingSource, QivIndex, QivParams};

const MAGIC: &[u8; 4] = b"QIV1";
const TAG_INTERNAL: u8 = 0;
const TAG_LEAF: u8 = 1;

/// Errors while writing or reading a snapshot.
#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not a snapshot file: bad magic {0:?}")]
    BadMagic([u8; 4]),
    #[error("corrupt snapshot: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn corrupt(msg: impl Into<String>) -> SnapshotError {
    SnapshotError::Corrupt(msg.into())
}

pub(super) fn save(index: &QivIndex, path: &Path) -> Result<(), SnapshotError> {
    let mut out = BufWriter::new(File::create(path)?);

    out.write_all(MAGIC)?;
    out.write_all(&[index.params.max_level])?;
    out.write_all(&(index.params.leaf_capacity as u32).to_le_bytes())?;
    out.write_all(&(index.users.len() as u64).to_le_bytes())?;
    out.write_all(&(index.vocab.len() as u64).to_le_bytes())?;
    out.write_all(&(index.tree.node_count() as u64).to_le_bytes())?;
    out.write_all(&(index.directory.len() as u64).to_le_bytes())?;

    // Vocabulary, ascending word id.
    for (word, weight) in index.vocab.sorted_entries() {
        out.write_all(&word.to_le_bytes())?;
        out.write_all(&weight.to_le_bytes())?;
    }

    // Users, ascending id.
    for user in index.users.iter() {
        write_varint(&mut out, user.user_id)?;
        for c in user.region.corners() {
            out.write_all(&c.to_le_bytes())?;
        }
        write_varint(&mut out, user.words.len() as u64)?;
        let words: Vec<u64> = user.words.iter().map(u64::from).collect();
        write_id_list(&mut out, &words)?;
    }

    // Quadtree, preorder; children follow their parent in quadrant order.
    write_node(&mut out, &index.tree, 0)?;

    // Posting directory, ascending word id, entries in curve order.
    for (word, entries) in &index.directory {
        out.write_all(&word.to_le_bytes())?;
        write_varint(&mut out, entries.len() as u64)?;
        for e in entries {
            out.write_all(&[e.code.level()])?;
            out.write_all(&e.code.bits().to_le_bytes())?;
            write_varint(&mut out, e.offset)?;
            write_varint(&mut out, u64::from(e.byte_len))?;
        }
    }

    let payload = index.payload.read_all()?;
    out.write_all(&(payload.len() as u64).to_le_bytes())?;
    out.write_all(&payload)?;
    out.flush()?;
    Ok(())
}

fn write_node(out: &mut impl Write, tree: &QuadTree, id: NodeId) -> Result<(), SnapshotError> {
    let node = tree.node(id);
    out.write_all(&[node.code().level()])?;
    out.write_all(&node.code().bits().to_le_bytes())?;
    match node.kind() {
        NodeKind::Leaf { residents } => {
            out.write_all(&[TAG_LEAF])?;
            write_varint(out, residents.len() as u64)?;
            write_id_list(out, residents)?;
        }
        NodeKind::Internal { children } => {
            out.write_all(&[TAG_INTERNAL])?;
            for &c in children {
                write_node(out, tree, c)?;
            }
        }
    }
    Ok(())
}

pub(super) fn load(path: &Path) -> Result<QivIndex, SnapshotError> {
    let file = File::open(path)?;
    let mut reader = CountingReader { inner: BufReader::new(file), pos: 0 };

    let mut magic = [0u8; 4];
    reader.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(SnapshotError::BadMagic(magic));
    }
    let max_level = read_u8(&mut reader)?;
    if max_level > MAX_LEVEL {
        return Err(corrupt(format!("max_level {max_level} exceeds {MAX_LEVEL}")));
    }
    let leaf_capacity = read_u32(&mut reader)? as usize;
    let n_users = read_u64(&mut reader)?;
    let n_vocab = read_u64(&mut reader)?;
    let n_nodes = read_u64(&mut reader)?;
    let n_dir_words = read_u64(&mut reader)?;

    let mut vocab = VisualVocabulary::new();
    for _ in 0..n_vocab {
        let word = read_u32(&mut reader)?;
        let weight = read_f64(&mut reader)?;
        vocab.insert(word, weight)?;
    }

    let mut users = Vec::with_capacity(n_users as usize);
    for _ in 0..n_users {
        let id = read_varint(&mut reader)?;
        let mut corners = [0f64; 4];
        for c in &mut corners {
            *c = read_f64(&mut reader)?;
        }
        let region = Mbr::new(corners[0], corners[1], corners[2], corners[3])?;
        let n_words = read_varint(&mut reader)? as usize;
        let words = read_id_list(&mut reader, n_words)?;
        let words = WordSet::new(
            words
                .into_iter()
                .map(|w| {
                    u32::try_from(w).map_err(|_| corrupt(format!("word id {w} overflows u32")))
                })
                .collect::<Result<Vec<WordId>, _>>()?,
        );
        users.push(RoviUser::new(id, region, words)?);
    }
    let users = Arc::new(UserStore::new(users)?);
    users.validate_against(&vocab)?;

    let mut nodes = Vec::with_capacity(n_nodes as usize);
    read_node(&mut reader, &mut nodes, MortonCode::root(), max_level)?;
    if nodes.len() as u64 != n_nodes {
        return Err(corrupt(format!(
            "header promised {n_nodes} nodes, preorder walk found {}",
            nodes.len()
        )));
    }
    let tree = QuadTree { nodes, max_level, leaf_capacity };

    let mut directory: BTreeMap<WordId, Vec<PostingEntry>> = BTreeMap::new();
    let mut prev_word = None;
    for _ in 0..n_dir_words {
        let word = read_u32(&mut reader)?;
        if prev_word.is_some_and(|p| p >= word) {
            return Err(corrupt("directory words out of order"));
        }
        prev_word = Some(word);
        let n_entries = read_varint(&mut reader)?;
        let mut entries = Vec::with_capacity(n_entries as usize);
        for _ in 0..n_entries {
            let level = read_u8(&mut reader)?;
            let bits = read_u64(&mut reader)?;
            if level > MAX_LEVEL || bits >> (2 * level as u32) != 0 {
                return Err(corrupt("directory entry carries an invalid cell code"));
            }
            let code = MortonCode::from_parts(level, bits);
            let offset = read_varint(&mut reader)?;
            let byte_len = read_varint(&mut reader)?;
            let byte_len =
                u32::try_from(byte_len).map_err(|_| corrupt("posting length overflows u32"))?;
            entries.push(PostingEntry { code, offset, byte_len });
        }
        directory.insert(word, entries);
    }

    let payload_len = read_u64(&mut reader)?;
    let base = reader.pos;
    // Re-open independently of the buffered reader; positioned reads need a
    // plain file handle.
    let file = File::open(path)?;
    let actual = file.metadata()?.len();
    if actual != base + payload_len {
        return Err(corrupt(format!(
            "file is {actual} bytes but header accounts for {}",
            base + payload_len
        )));
    }

    Ok(QivIndex::from_parts(
        users,
        Arc::new(vocab),
        tree,
        directory,
        PostingSource::File { file, base, len: payload_len },
        QivParams { max_level, leaf_capacity },
    ))
}

/// Reads one preorder node, checking the stored code against the position in
/// the walk; returns the arena id.
fn read_node(
    reader: &mut impl Read,
    nodes: &mut Vec<QuadNode>,
    expected: MortonCode,
    max_level: u8,
) -> Result<NodeId, SnapshotError> {
    let level = read_u8(reader)?;
    let bits = read_u64(reader)?;
    if level != expected.level() || bits != expected.bits() {
        return Err(corrupt(format!(
            "node code mismatch: stored level {level} bits {bits:#x}, expected {expected}"
        )));
    }
    let tag = read_u8(reader)?;
    let id = nodes.len() as NodeId;
    match tag {
        TAG_LEAF => {
            let count = read_varint(reader)? as usize;
            let residents = read_id_list(reader, count)?;
            nodes.push(QuadNode::new_leaf(expected, residents));
        }
        TAG_INTERNAL => {
            if level >= max_level {
                return Err(corrupt("internal node at or below max_level"));
            }
            nodes.push(QuadNode::new_internal(expected, [0; CHILDREN]));
            let mut children = [0 as NodeId; CHILDREN];
            for (q, slot) in children.iter_mut().enumerate() {
                *slot = read_node(reader, nodes, expected.child(q as u8), max_level)?;
            }
            nodes[id as usize].set_children(children);
        }
        other => return Err(corrupt(format!("unknown node tag {other}"))),
    }
    Ok(id)
}

struct CountingReader<R> {
    inner: R,
    pos: u64,
}

impl<R: Read> Read for CountingReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.pos += n as u64;
        Ok(n)
    }
}

fn read_u8(r: &mut impl Read) -> io::Result<u8> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b)?;
    Ok(b[0])
}

fn read_u32(r: &mut impl Read) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
