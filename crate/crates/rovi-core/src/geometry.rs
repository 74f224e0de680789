//! Rectangle arithmetic and the two similarity measures.
//!
//! Geographic similarity is intersection-over-union of two rectangles; visual
//! similarity is the weighted Jaccard coefficient of two word sets. Every index
//! in this crate verifies candidates through these exact functions, so they are
//! the single source of truth for what a query matches.

use thiserror::Error;

use crate::model::{Mbr, RoviQuery, RoviUser, VisualVocabulary, WordSet};

/// Errors from similarity evaluation.
#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    /// Both rectangles are degenerate, so intersection-over-union is undefined.
    #[error("union of the two rectangles has zero area; similarity is undefined")]
    DegenerateUnion,
}

/// Area of a rectangle; zero for degenerate ones.
pub fn area(r: &Mbr) -> f64 {
    r.width() * r.height()
}

/// Area of the overlap of two rectangles, zero when they are disjoint or only touch.
pub fn intersection_area(a: &Mbr, b: &Mbr) -> f64 {
    let w = f64::min(a.x_max(), b.x_max()) - f64::max(a.x_min(), b.x_min());
    let h = f64::min(a.y_max(), b.y_max()) - f64::max(a.y_min(), b.y_min());
    if w > 0.0 && h > 0.0 {
        w * h
    } else {
        0.0
    }
}

/// Area covered by at least one of the two rectangles (inclusion-exclusion).
pub fn union_area(a: &Mbr, b: &Mbr) -> f64 {
    area(a) + area(b) - intersection_area(a, b)
}

/// True when the two rectangles overlap with strictly positive area.
pub fn overlaps_positively(a: &Mbr, b: &Mbr) -> bool {
    intersection_area(a, b) > 0.0
}

/// Intersection and union areas of a rectangle pair, computed together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapResult {
    pub intersection_area: f64,
    pub union_area: f64,
}

/// Computes both overlap areas for a pair.
pub fn overlap(a: &Mbr, b: &Mbr) -> OverlapResult {
    let i = intersection_area(a, b);
    OverlapResult { intersection_area: i, union_area: area(a) + area(b) - i }
}

/// Geographic similarity: intersection area over union area, in `[0, 1]`.
///
/// Errors when both rectangles are degenerate (union area zero).
pub fn geo_sim(a: &Mbr, b: &Mbr) -> Result<f64, GeometryError> {
    let ov = overlap(a, b);
    if ov.union_area <= 0.0 {
        return Err(GeometryError::DegenerateUnion);
    }
    Ok(ov.intersection_area / ov.union_area)
}

/// Visual similarity: weighted Jaccard coefficient of the two word sets.
///
/// Intersection and union weights are accumulated in one ascending merge over
/// the sorted sets, so the summation order is fixed and reproducible. Both
/// sets must resolve in `vocab` (enforced by the loaders).
pub fn vis_sim(a: &WordSet, b: &WordSet, vocab: &VisualVocabulary) -> f64 {
    let (xs, ys) = (a.as_slice(), b.as_slice());
    let (mut i, mut j) = (0, 0);
    let mut inter = 0.0f64;
    let mut union = 0.0f64;
    while i < xs.len() && j < ys.len() {
        match xs[i].cmp(&ys[j]) {
            std::cmp::Ordering::Equal => {
                let w = vocab.weight_of(xs[i]);
                inter += w;
                union += w;
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => {
                union += vocab.weight_of(xs[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                union += vocab.weight_of(ys[j]);
                j += 1;
            }
        }
    }
    for &w in &xs[i..] {
        union += vocab.weight_of(w);
    }
    for &w in &ys[j..] {
        union += vocab.weight_of(w);
    }
    if union <= 0.0 {
        // Only reachable with two empty sets, which users and queries forbid.
        return 0.0;
    }
    inter / union
}

/// Total intersection weight of two word sets; the quantity node-level
/// filtering bounds from above.
pub fn intersection_weight(a: &WordSet, b: &WordSet, vocab: &VisualVocabulary) -> f64 {
    let (xs, ys) = (a.as_slice(), b.as_slice());
    let (mut i, mut j) = (0, 0);
    let mut inter = 0.0f64;
    while i < xs.len() && j < ys.len() {
        match xs[i].cmp(&ys[j]) {
            std::cmp::Ordering::Equal => {
                inter += vocab.weight_of(xs[i]);
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
        }
    }
    inter
}

/// Sum of the vocabulary weights of every word in the set.
pub fn total_weight(words: &WordSet, vocab: &VisualVocabulary) -> f64 {
    words.iter().map(|w| vocab.weight_of(w)).sum()
}

/// Exact verification: does `user` satisfy both thresholds of `query`?
///
/// Comparisons use `>=` with no epsilon. The geographic test runs first and
/// short-circuits; query and user regions have positive area, so the union is
/// never degenerate.
pub fn matches(query: &RoviQuery, user: &RoviUser, vocab: &VisualVocabulary) -> bool {
    let g =
        geo_sim(&query.region, &user.region).expect("query and user regions have positive area");
    g >= query.gamma_g && vis_sim(&query.words, &user.words, vocab) >= query.gamma_v
}
