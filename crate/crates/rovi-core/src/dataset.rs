//! JSON-lines readers and writers for users, vocabularies, images and queries.
//!
//! One object per line; readers validate every record through the model
//! constructors and report the first bad line by number.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::{
    GeoImage, Mbr, ModelError, RoviQuery, RoviUser, UserId, UserStore, VisualVocabulary, WordId,
    WordSet,
};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: {source}")]
    Model {
        line: usize,
        #[source]
        source: ModelError,
    },
    #[error("{0}")]
    Store(ModelError),
}

#[derive(Serialize, Deserialize)]
struct UserRecord {
    id: UserId,
    mbr: [f64; 4],
    words: Vec<WordId>,
}

#[derive(Serialize, Deserialize)]
struct VocabRecord {
    word: WordId,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
struct ImageRecord {
    id: u64,
    loc: [f64; 2],
    words: Vec<WordId>,
}

#[derive(Serialize, Deserialize)]
struct QueryRecord {
    mbr: [f64; 4],
    words: Vec<WordId>,
    gamma_g: f64,
    gamma_v: f64,
}

fn mbr_from(corners: [f64; 4]) -> Result<Mbr, ModelError> {
    Mbr::new(corners[0], corners[1], corners[2], corners[3])
}

/// Applies `parse` to each line of `path`, tracking 1-based line numbers.
fn read_lines<T>(
    path: &Path,
    mut parse: impl FnMut(usize, &str) -> Result<T, DatasetError>,
) -> Result<Vec<T>, DatasetError> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse(i + 1, &line)?);
    }
    Ok(out)
}

fn decode<'a, T: Deserialize<'a>>(line: usize, s: &'a str) -> Result<T, DatasetError> {
    serde_json::from_str(s).map_err(|source| DatasetError::Json { line, source })
}

fn model_err(line: usize) -> impl FnOnce(ModelError) -> DatasetError {
    move |source| DatasetError::Model { line, source }
}

pub fn read_users(path: &Path) -> Result<UserStore, DatasetError> {
    let users = read_lines(path, |line, s| {
        let rec: UserRecord = decode(line, s)?;
        let mbr = mbr_from(rec.mbr).map_err(model_err(line))?;
        RoviUser::new(rec.id, mbr, WordSet::new(rec.words)).map_err(model_err(line))
    })?;
    UserStore::new(users).map_err(DatasetError::Store)
}

pub fn write_users(path: &Path, store: &UserStore) -> Result<(), DatasetError> {
    let mut w = BufWriter::new(File::create(path)?);
    for user in store.iter() {
        let rec = UserRecord {
            id: user.user_id,
            mbr: user.region.corners(),
            words: user.words.as_slice().to_vec(),
        };
        serde_json::to_writer(&mut w, &rec)
            .map_err(|e| DatasetError::Json { line: 0, source: e })?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_vocabulary(path: &Path) -> Result<VisualVocabulary, DatasetError> {
    let mut vocab = VisualVocabulary::new();
    read_lines(path, |line, s| {
        let rec: VocabRecord = decode(line, s)?;
        vocab.insert(rec.word, rec.weight).map_err(model_err(line))
    })?;
    Ok(vocab)
}

pub fn write_vocabulary(path: &Path, vocab: &VisualVocabulary) -> Result<(), DatasetError> {
    let mut w = BufWriter::new(File::create(path)?);
    for (word, weight) in vocab.sorted_entries() {
        let rec = VocabRecord { word, weight };
        serde_json::to_writer(&mut w, &rec)
            .map_err(|e| DatasetError::Json { line: 0, source: e })?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_geo_images(path: &Path) -> Result<Vec<GeoImage>, DatasetError> {
    read_lines(path, |line, s| {
        let rec: ImageRecord = decode(line, s)?;
        let (x, y) = (rec.loc[0], rec.loc[1]);
        if !(x.is_finite() && y.is_finite() && (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y))
        {
            return Err(DatasetError::Model {
                line,
                source: ModelError::DegenerateRegion(format!("image {} location", rec.id)),
            });
        }
        Ok(GeoImage { image_id: rec.id, location: (x, y), words: WordSet::new(rec.words) })
    })
}

pub fn write_geo_images(path: &Path, images: &[GeoImage]) -> Result<(), DatasetError> {
    let mut w = BufWriter::new(File::create(path)?);
    for img in images {
        let rec = ImageRecord {
            id: img.image_id,
            loc: [img.location.0, img.location.1],
            words: img.words.as_slice().to_vec(),
        };
        serde_json::to_writer(&mut w, &rec)
            .map_err(|e| DatasetError::Json { line: 0, source: e })?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Parses one query from a standalone JSON document in the JSONL record shape.
pub fn parse_query(json: &str) -> Result<RoviQuery, DatasetError> {
    let rec: QueryRecord = decode(1, json)?;
    let mbr = mbr_from(rec.mbr).map_err(model_err(1))?;
    RoviQuery::new(mbr, WordSet::new(rec.words), rec.gamma_g, rec.gamma_v).map_err(model_err(1))
}

pub fn read_queries(path: &Path) -> Result<Vec<RoviQuery>, DatasetError> {
    read_lines(path, |line, s| {
        let rec: QueryRecord = decode(line, s)?;
        let mbr = mbr_from(rec.mbr).map_err(model_err(line))?;
        RoviQuery::new(mbr, WordSet::new(rec.words), rec.gamma_g, rec.gamma_v)
            .map_err(model_err(line))
    })
}

pub fn write_queries(path: &Path, queries: &[RoviQuery]) -> Result<(), DatasetError> {
    let mut w = BufWriter::new(File::create(path)?);
    for q in queries {
        let rec = QueryRecord {
            mbr: q.region.corners(),
            words: q.words.as_slice().to_vec(),
            gamma_g: q.gamma_g,
            gamma_v: q.gamma_v,
        };
        serde_json::to_writer(&mut w, &rec)
            .map_err(|e| DatasetError::Json { line: 0, source: e })?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn users_round_trip() {
        let fx = fixtures::seven_users();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("users.jsonl");
        write_users(&path, &fx.users).unwrap();
        let back = read_users(&path).unwrap();
        assert_eq!(back.len(), fx.users.len());
        for user in fx.users.iter() {
            assert_eq!(back.get(user.user_id), Some(user));
        }
    }

    #[test]
    fn vocab_and_queries_round_trip() {
        let fx = fixtures::seven_users();
        let dir = tempfile::tempdir().unwrap();
        let vpath = dir.path().join("vocab.jsonl");
        write_vocabulary(&vpath, &fx.vocab).unwrap();
        assert_eq!(read_vocabulary(&vpath).unwrap(), *fx.vocab);

        let qpath = dir.path().join("queries.jsonl");
        write_queries(&qpath, std::slice::from_ref(&fx.query)).unwrap();
        assert_eq!(read_queries(&qpath).unwrap(), vec![fx.query.clone()]);
    }

    #[test]
    fn images_round_trip_and_validate() {
        let images = vec![
            GeoImage { image_id: 1, location: (0.25, 0.75), words: WordSet::new([1, 2]) },
            GeoImage { image_id: 2, location: (0.0, 1.0), words: WordSet::new([3]) },
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("images.jsonl");
        write_geo_images(&path, &images).unwrap();
        assert_eq!(read_geo_images(&path).unwrap(), images);

        std::fs::write(&path, "{\"id\":3,\"loc\":[1.5,0.2],\"words\":[1]}\n").unwrap();
        assert!(matches!(read_geo_images(&path), Err(DatasetError::Model { line: 1, .. })));
    }

    #[test]
    fn bad_lines_are_reported_by_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("users.jsonl");
        std::fs::write(&path, "{\"id\":1,\"mbr\":[0.1,0.1,0.2,0.2],\"words\":[1]}\nnot json\n")
            .unwrap();
        assert!(matches!(read_users(&path), Err(DatasetError::Json { line: 2, .. })));

        // Degenerate region caught by the model layer, same line accounting.
        std::fs::write(
            &path,
            "{\"id\":1,\"mbr\":[0.1,0.1,0.2,0.2],\"words\":[1]}\n{\"id\":2,\"mbr\":[0.3,0.3,0.3,0.5],\"words\":[1]}\n",
        )
        .unwrap();
        assert!(matches!(read_users(&path), Err(DatasetError::Model { line: 2, .. })));
    }

    #[test]
    fn duplicate_user_ids_are_rejected_at_store_level() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("users.jsonl");
        let line = "{\"id\":1,\"mbr\":[0.1,0.1,0.2,0.2],\"words\":[1]}\n";
        std::fs::write(&path, format!("{line}{line}")).unwrap();
        assert!(matches!(read_users(&path), Err(DatasetError::Store(_))));
    }

    #[test]
    fn empty_lines_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vocab.jsonl");
        std::fs::write(&path, "{\"word\":1,\"weight\":2.0}\n\n{\"word\":2,\"weight\":1.0}\n")
            .unwrap();
        let vocab = read_vocabulary(&path).unwrap();
        assert_eq!(vocab.len(), 2);
        assert_eq!(vocab.weight(1), Some(2.0));
    }
}
