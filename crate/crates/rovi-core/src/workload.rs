//! Deterministic synthetic datasets and query workloads.
//!
//! Regions are uniform rectangles clipped into the unit space by translation
//! (so their area survives clipping), word sets are Zipf-distributed draws
//! from a dense vocabulary, and queries are squares of a fixed area fraction
//! centered on randomly chosen users. Everything is driven by a seeded
//! ChaCha stream: dataset generation uses stream 0, query generation
//! stream 1, so the two can share a seed without sharing randomness.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};

use crate::model::{
    Mbr, ModelError, RoviQuery, RoviUser, UserId, UserStore, VisualVocabulary, WordSet,
};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum WorkloadError {
    #[error("{0} must be positive")]
    ZeroCount(&'static str),
    #[error("{0} is out of range")]
    BadRange(&'static str),
    #[error("need {needed} distinct words but the vocabulary holds {vocab}")]
    VocabTooSmall { needed: usize, vocab: u32 },
    #[error("cannot place queries over an empty user store")]
    EmptyUsers,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Knobs for one generated scenario; serializes so runs can be reproduced
/// from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorkloadSpec {
    pub n_users: usize,
    pub vocab_size: u32,
    /// Inclusive bounds on the distinct-word count per user.
    pub words_per_user: (usize, usize),
    /// Inclusive bounds on region width and height.
    pub region_extent: (f64, f64),
    pub zipf_exponent: f64,
    pub n_queries: usize,
    pub n_query_words: usize,
    /// Query area as a fraction of the unit space; queries are squares.
    pub query_region_fraction: f64,
    pub gamma_g: f64,
    pub gamma_v: f64,
}

impl Default for WorkloadSpec {
    fn default() -> Self {
        Self {
            n_users: 100_000,
            vocab_size: 10_000,
            words_per_user: (5, 50),
            region_extent: (0.005, 0.05),
            zipf_exponent: 1.0,
            n_queries: 100,
            n_query_words: 100,
            query_region_fraction: 0.02,
            gamma_g: 0.3,
            gamma_v: 0.3,
        }
    }
}

impl WorkloadSpec {
    /// Checks every field. The generation entry points check only the fields
    /// they actually use, so a spec can carry, say, an oversized
    /// `words_per_user` range and still generate queries.
    pub fn validate(&self) -> Result<(), WorkloadError> {
        self.validate_dataset_fields()?;
        self.validate_query_fields()
    }

    fn validate_dataset_fields(&self) -> Result<(), WorkloadError> {
        self.validate_shared_fields()?;
        if self.n_users == 0 {
            return Err(WorkloadError::ZeroCount("n_users"));
        }
        let (wmin, wmax) = self.words_per_user;
        if wmin == 0 || wmin > wmax {
            return Err(WorkloadError::BadRange("words_per_user"));
        }
        if wmax > self.vocab_size as usize {
            return Err(WorkloadError::VocabTooSmall { needed: wmax, vocab: self.vocab_size });
        }
        let (emin, emax) = self.region_extent;
        if !(emin.is_finite() && emax.is_finite() && 0.0 < emin && emin <= emax && emax <= 1.0) {
            return Err(WorkloadError::BadRange("region_extent"));
        }
        Ok(())
    }

    fn validate_query_fields(&self) -> Result<(), WorkloadError> {
        self.validate_shared_fields()?;
        if self.n_queries == 0 {
            return Err(WorkloadError::ZeroCount("n_queries"));
        }
        if self.n_query_words == 0 {
            return Err(WorkloadError::ZeroCount("n_query_words"));
        }
        if self.n_query_words > self.vocab_size as usize {
            return Err(WorkloadError::VocabTooSmall {
                needed: self.n_query_words,
                vocab: self.vocab_size,
            });
        }
        if !(self.query_region_fraction.is_finite()
            && 0.0 < self.query_region_fraction
            && self.query_region_fraction <= 1.0)
        {
            return Err(WorkloadError::BadRange("query_region_fraction"));
        }
        for (name, g) in [("gamma_g", self.gamma_g), ("gamma_v", self.gamma_v)] {
            if !(g.is_finite() && (0.0..=1.0).contains(&g)) {
                return Err(WorkloadError::BadRange(name));
            }
        }
        Ok(())
    }

    fn validate_shared_fields(&self) -> Result<(), WorkloadError> {
        if self.vocab_size == 0 {
            return Err(WorkloadError::ZeroCount("vocab_size"));
        }
        if !(self.zipf_exponent.is_finite() && self.zipf_exponent >= 0.0) {
            return Err(WorkloadError::BadRange("zipf_exponent"));
        }
        Ok(())
    }

    fn zipf(&self) -> Zipf<f64> {
        Zipf::new(self.vocab_size as u64, self.zipf_exponent)
            .expect("validated vocabulary size and exponent")
    }
}

/// A `width x height` rectangle centered as close to `(cx, cy)` as the unit
/// space allows: the rectangle is translated inward rather than trimmed, so
/// its area is preserved.
fn clipped_region(cx: f64, cy: f64, width: f64, height: f64) -> Mbr {
    let x_min = (cx - width / 2.0).clamp(0.0, 1.0 - width);
    let y_min = (cy - height / 2.0).clamp(0.0, 1.0 - height);
    // The sums can land an ulp past 1.0; pull them back in.
    let x_max = (x_min + width).min(1.0);
    let y_max = (y_min + height).min(1.0);
    Mbr::new(x_min, y_min, x_max, y_max).expect("clipped region stays inside the unit space")
}

/// `k` distinct Zipf draws, 0-based word ids.
fn distinct_words(rng: &mut ChaCha8Rng, zipf: &Zipf<f64>, k: usize) -> WordSet {
    let mut words = BTreeSet::new();
    while words.len() < k {
        words.insert(zipf.sample(rng) as u32 - 1);
    }
    WordSet::new(words)
}

/// Generates `spec.n_users` users (ids starting at 1) and the dense
/// vocabulary `0..spec.vocab_size` with unit weights.
pub fn generate_dataset(
    spec: &WorkloadSpec,
    seed: u64,
) -> Result<(Arc<UserStore>, Arc<VisualVocabulary>), WorkloadError> {
    spec.validate_dataset_fields()?;
    let vocab = VisualVocabulary::from_entries((0..spec.vocab_size).map(|w| (w, 1.0)))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    let zipf = spec.zipf();
    let (emin, emax) = spec.region_extent;
    let (wmin, wmax) = spec.words_per_user;
    let mut users = Vec::with_capacity(spec.n_users);
    for i in 0..spec.n_users {
        let width = rng.gen_range(emin..=emax);
        let height = rng.gen_range(emin..=emax);
        let cx = rng.gen_range(0.0..=1.0);
        let cy = rng.gen_range(0.0..=1.0);
        let region = clipped_region(cx, cy, width, height);
        let k = rng.gen_range(wmin..=wmax);
        let words = distinct_words(&mut rng, &zipf, k);
        users.push(RoviUser::new(i as UserId + 1, region, words)?);
    }
    Ok((Arc::new(UserStore::new(users)?), Arc::new(vocab)))
}

/// Generates `spec.n_queries` queries: each is a square of area
/// `spec.query_region_fraction` centered on a random user's center, with
/// `spec.n_query_words` distinct Zipf-drawn words and the spec's thresholds.
pub fn generate_workload(
    spec: &WorkloadSpec,
    users: &UserStore,
    seed: u64,
) -> Result<Vec<RoviQuery>, WorkloadError> {
    spec.validate_query_fields()?;
    if users.is_empty() {
        return Err(WorkloadError::EmptyUsers);
    }
    let ids: Vec<UserId> = users.ids().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let zipf = spec.zipf();
    let side = spec.query_region_fraction.sqrt().min(1.0);
    let mut queries = Vec::with_capacity(spec.n_queries);
    for _ in 0..spec.n_queries {
        let anchor = ids[rng.gen_range(0..ids.len())];
        let (cx, cy) = users.get(anchor).expect("id came from the store").region.center();
        let region = clipped_region(cx, cy, side, side);
        let words = distinct_words(&mut rng, &zipf, spec.n_query_words);
        queries.push(RoviQuery::new(region, words, spec.gamma_g, spec.gamma_v)?);
    }
    Ok(queries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> WorkloadSpec {
        WorkloadSpec {
            n_users: 300,
            vocab_size: 50,
            words_per_user: (2, 8),
            n_queries: 20,
            n_query_words: 4,
            ..WorkloadSpec::default()
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let spec = small_spec();
        let (u1, v1) = generate_dataset(&spec, 9).unwrap();
        let (u2, v2) = generate_dataset(&spec, 9).unwrap();
        assert_eq!(v1, v2);
        assert_eq!(u1.len(), u2.len());
        for (a, b) in u1.iter().zip(u2.iter()) {
            assert_eq!(a, b);
        }
        let (u3, _) = generate_dataset(&spec, 10).unwrap();
        assert!(u1.iter().zip(u3.iter()).any(|(a, b)| a != b), "seed must matter");

        let q1 = generate_workload(&spec, &u1, 4).unwrap();
        let q2 = generate_workload(&spec, &u1, 4).unwrap();
        assert_eq!(q1, q2);
        assert_ne!(q1, generate_workload(&spec, &u1, 5).unwrap());
    }

    #[test]
    fn users_respect_the_spec_bounds() {
        let spec = small_spec();
        let (users, vocab) = generate_dataset(&spec, 3).unwrap();
        assert_eq!(users.len(), spec.n_users);
        assert_eq!(vocab.len(), spec.vocab_size as usize);
        let (emin, emax) = spec.region_extent;
        let (wmin, wmax) = spec.words_per_user;
        for user in users.iter() {
            let (w, h) = (user.region.width(), user.region.height());
            assert!(w >= emin * 0.999 && w <= emax * 1.001, "width {w}");
            assert!(h >= emin * 0.999 && h <= emax * 1.001, "height {h}");
            assert!(user.words.len() >= wmin && user.words.len() <= wmax);
            assert!(user.words.iter().all(|w| w < spec.vocab_size));
        }
        users.validate_against(&vocab).unwrap();
    }

    #[test]
    fn queries_are_squares_of_the_requested_area() {
        let spec = small_spec();
        let (users, _) = generate_dataset(&spec, 3).unwrap();
        let queries = generate_workload(&spec, &users, 8).unwrap();
        assert_eq!(queries.len(), spec.n_queries);
        for q in &queries {
            let area = q.region.width() * q.region.height();
            assert!((area - spec.query_region_fraction).abs() < 1e-9, "area {area}");
            assert!((q.region.width() - q.region.height()).abs() < 1e-12);
            assert_eq!(q.words.len(), spec.n_query_words);
            assert_eq!((q.gamma_g, q.gamma_v), (spec.gamma_g, spec.gamma_v));
        }
    }

    #[test]
    fn full_fraction_query_covers_the_unit_space() {
        let spec = WorkloadSpec { query_region_fraction: 1.0, ..small_spec() };
        let (users, _) = generate_dataset(&spec, 1).unwrap();
        for q in generate_workload(&spec, &users, 1).unwrap() {
            assert_eq!(q.region, Mbr::unit());
        }
    }

    #[test]
    fn zipf_skews_toward_low_word_ids() {
        let spec = WorkloadSpec { n_users: 2000, ..small_spec() };
        let (users, _) = generate_dataset(&spec, 6).unwrap();
        let count = |w: u32| users.iter().filter(|u| u.words.contains(w)).count();
        assert!(count(0) > 4 * count(spec.vocab_size - 1), "zipf head must dominate");
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let miss = |f: fn(&mut WorkloadSpec)| {
            let mut s = small_spec();
            f(&mut s);
            s.validate().unwrap_err()
        };
        assert_eq!(miss(|s| s.n_queries = 0), WorkloadError::ZeroCount("n_queries"));
        assert_eq!(miss(|s| s.n_users = 0), WorkloadError::ZeroCount("n_users"));
        assert_eq!(
            miss(|s| s.n_query_words = 51),
            WorkloadError::VocabTooSmall { needed: 51, vocab: 50 }
        );
        assert_eq!(miss(|s| s.words_per_user = (3, 2)), WorkloadError::BadRange("words_per_user"));
        assert_eq!(
            miss(|s| s.region_extent = (0.0, 0.1)),
            WorkloadError::BadRange("region_extent")
        );
        assert_eq!(
            miss(|s| s.query_region_fraction = 1.5),
            WorkloadError::BadRange("query_region_fraction")
        );
        assert_eq!(miss(|s| s.gamma_v = -0.1), WorkloadError::BadRange("gamma_v"));
    }

    #[test]
    fn workload_needs_users() {
        let store = UserStore::new(Vec::new()).unwrap();
        assert_eq!(
            generate_workload(&small_spec(), &store, 1).unwrap_err(),
            WorkloadError::EmptyUsers
        );
    }

    #[test]
    fn spec_serde_round_trips_and_fills_defaults() {
        let spec = small_spec();
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<WorkloadSpec>(&json).unwrap(), spec);
        // Partial configs inherit defaults for the rest.
        let partial: WorkloadSpec = serde_json::from_str("{\"n_users\": 42}").unwrap();
        assert_eq!(partial.n_users, 42);
        assert_eq!(partial.vocab_size, WorkloadSpec::default().vocab_size);
    }
}
