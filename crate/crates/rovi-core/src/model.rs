//! Core domain types: rectangles, visual-word sets, users, queries and result sets.
//!
//! All coordinates live in the unit space `[0,1] x [0,1]`. Intervals are closed,
//! so regions that merely touch a boundary still contain it.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Word identifiers are small non-negative integers into the vocabulary.
pub type WordId = u32;
/// User and image identifiers.
pub type UserId = u64;

/// Errors raised while constructing or validating model values.
#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    /// Rectangle coordinates were not finite, not ordered, or left the unit space.
    #[error("invalid mbr [{0}, {1}, {2}, {3}]: {4}")]
    InvalidMbr(f64, f64, f64, f64, &'static str),
    /// A user or query carried no visual words.
    #[error("word set for {0} is empty")]
    EmptyWords(String),
    /// A user or query region has zero area.
    #[error("region for {0} has zero area")]
    DegenerateRegion(String),
    /// A similarity threshold fell outside `[0, 1]`.
    #[error("threshold {name} = {value} is outside [0, 1]")]
    ThresholdOutOfRange { name: &'static str, value: f64 },
    /// A word id was looked up that the vocabulary does not contain.
    #[error("word {0} is not in the vocabulary")]
    UnknownWord(WordId),
    /// A vocabulary weight must be strictly positive and finite.
    #[error("weight {weight} for word {word} is not a positive finite number")]
    InvalidWeight { word: WordId, weight: f64 },
    /// Two users with the same id were handed to a store or index.
    #[error("duplicate user id {0}")]
    DuplicateUser(UserId),
    /// `derive_user` found no image inside the region.
    #[error("no geo-image falls inside the region; user {0} would be empty")]
    EmptyUser(UserId),
    /// A user id was not present in a store.
    #[error("unknown user id {0}")]
    UnknownUser(UserId),
}

/// Axis-aligned minimum bounding rectangle with closed intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mbr {
    x_min: f64,
    y_min: f64,
    x_max: f64,
    y_max: f64,
}

impl Mbr {
    /// Builds a rectangle, rejecting non-finite, unordered or out-of-unit-space bounds.
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self, ModelError> {
        let err = |why| ModelError::InvalidMbr(x_min, y_min, x_max, y_max, why);
        if ![x_min, y_min, x_max, y_max].iter().all(|v| v.is_finite()) {
            return Err(err("coordinates must be finite"));
        }
        if x_min > x_max || y_min > y_max {
            return Err(err("min corner must not exceed max corner"));
        }
        if x_min < 0.0 || y_min < 0.0 || x_max > 1.0 || y_max > 1.0 {
            return Err(err("rectangle leaves the unit space"));
        }
        Ok(Self { x_min, y_min, x_max, y_max })
    }

    /// The whole unit space.
    pub fn unit() -> Self {
        Self { x_min: 0.0, y_min: 0.0, x_max: 1.0, y_max: 1.0 }
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn y_min(&self) -> f64 {
        self.y_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    /// Center point; for degenerate rectangles this is the point itself.
    pub fn center(&self) -> (f64, f64) {
        ((self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0)
    }

    /// Closed-interval point containment, so boundary points count.
    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        self.x_min <= x && x <= self.x_max && self.y_min <= y && y <= self.y_max
    }

    /// Corners as `[x_min, y_min, x_max, y_max]`.
    pub fn corners(&self) -> [f64; 4] {
        [self.x_min, self.y_min, self.x_max, self.y_max]
    }
}

impl fmt::Display for Mbr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}, {}]", self.x_min, self.y_min, self.x_max, self.y_max)
    }
}

/// A sorted, de-duplicated set of visual-word ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WordSet(Vec<WordId>);

impl WordSet {
    pub fn new(words: impl IntoIterator<Item = WordId>) -> Self {
        let mut v: Vec<WordId> = words.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, word: WordId) -> bool {
        self.0.binary_search(&word).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = WordId> + '_ {
        self.0.iter().copied()
    }

    /// Ascending slice of the member ids.
    pub fn as_slice(&self) -> &[WordId] {
        &self.0
    }
}

impl FromIterator<WordId> for WordSet {
    fn from_iter<T: IntoIterator<Item = WordId>>(iter: T) -> Self {
        Self::new(iter)
    }
}

/// A geo-tagged image: a point location plus the visual words extracted from it.
#[derive(Debug, Clone, PartialEq)]
pub struct GeoImage {
    pub image_id: u64,
    /// `(x, y)` in the unit space.
    pub location: (f64, f64),
    pub words: WordSet,
}

/// Global visual vocabulary mapping each word id to a positive weight.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VisualVocabulary {
    weights: HashMap<WordId, f64>,
}

impl VisualVocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vocabulary from `(word, weight)` pairs, rejecting bad weights.
    pub fn from_entries(
        entries: impl IntoIterator<Item = (WordId, f64)>,
    ) -> Result<Self, ModelError> {
        let mut vocab = Self::new();
        for (word, weight) in entries {
            vocab.insert(word, weight)?;
        }
        Ok(vocab)
    }

    pub fn insert(&mut self, word: WordId, weight: f64) -> Result<(), ModelError> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(ModelError::InvalidWeight { word, weight });
        }
        self.weights.insert(word, weight);
        Ok(())
    }

    pub fn contains(&self, word: WordId) -> bool {
        self.weights.contains_key(&word)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Weight of a word, if present.
    pub fn weight(&self, word: WordId) -> Option<f64> {
        self.weights.get(&word).copied()
    }

    /// Weight of a word that validation has already guaranteed to exist.
    ///
    /// Panics if the word is missing; callers must run [`Self::validate_words`]
    /// (or load through the dataset readers, which do) first.
    pub fn weight_of(&self, word: WordId) -> f64 {
        match self.weights.get(&word) {
            Some(w) => *w,
            None => panic!("word {word} missing from vocabulary; input was not validated"),
        }
    }

    /// Checks that every id in `words` resolves, reporting the first that does not.
    pub fn validate_words<'a>(
        &self,
        words: impl IntoIterator<Item = &'a WordId>,
    ) -> Result<(), ModelError> {
        for &w in words {
            if !self.contains(w) {
                return Err(ModelError::UnknownWord(w));
            }
        }
        Ok(())
    }

    /// Entries sorted by word id; the canonical order for serialization.
    pub fn sorted_entries(&self) -> Vec<(WordId, f64)> {
        let mut v: Vec<(WordId, f64)> = self.weights.iter().map(|(&w, &wt)| (w, wt)).collect();
        v.sort_unstable_by_key(|&(w, _)| w);
        v
    }
}

/// A user: a region of interest plus the union of visual words seen inside it.
#[derive(Debug, Clone, PartialEq)]
pub struct RoviUser {
    pub user_id: UserId,
    pub region: Mbr,
    pub words: WordSet,
}

impl RoviUser {
    /// Builds a user, requiring a non-empty word set and a positive-area region.
    pub fn new(user_id: UserId, region: Mbr, words: WordSet) -> Result<Self, ModelError> {
        if words.is_empty() {
            return Err(ModelError::EmptyWords(format!("user {user_id}")));
        }
        if region.width() <= 0.0 || region.height() <= 0.0 {
            return Err(ModelError::DegenerateRegion(format!("user {user_id}")));
        }
        Ok(Self { user_id, region, words })
    }
}

/// A query: region, word set and the two similarity thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct RoviQuery {
    pub region: Mbr,
    pub words: WordSet,
    pub gamma_g: f64,
    pub gamma_v: f64,
}

impl RoviQuery {
    pub fn new(
        region: Mbr,
        words: WordSet,
        gamma_g: f64,
        gamma_v: f64,
    ) -> Result<Self, ModelError> {
        if words.is_empty() {
            return Err(ModelError::EmptyWords("query".to_owned()));
        }
        if region.width() <= 0.0 || region.height() <= 0.0 {
            return Err(ModelError::DegenerateRegion("query".to_owned()));
        }
        for (name, value) in [("gamma_g", gamma_g), ("gamma_v", gamma_v)] {
            if !(value.is_finite() && (0.0..=1.0).contains(&value)) {
                return Err(ModelError::ThresholdOutOfRange { name, value });
            }
        }
        Ok(Self { region, words, gamma_g, gamma_v })
    }

    /// Same query with different thresholds; used by threshold sweeps.
    pub fn with_thresholds(&self, gamma_g: f64, gamma_v: f64) -> Result<Self, ModelError> {
        Self::new(self.region, self.words.clone(), gamma_g, gamma_v)
    }
}

/// Query answer: ascending user ids without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResultSet(Vec<UserId>);

impl ResultSet {
    pub fn new(ids: impl IntoIterator<Item = UserId>) -> Self {
        let mut v: Vec<UserId> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: UserId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn ids(&self) -> &[UserId] {
        &self.0
    }

    /// True when `self` contains every id of `other`.
    pub fn is_superset_of(&self, other: &ResultSet) -> bool {
        other.0.iter().all(|&id| self.contains(id))
    }

    /// Smallest id present in exactly one of the two sets, if they differ.
    pub fn first_difference(&self, other: &ResultSet) -> Option<UserId> {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Less => return Some(self.0[i]),
                std::cmp::Ordering::Greater => return Some(other.0[j]),
            }
        }
        self.0.get(i).or(other.0.get(j)).copied()
    }
}

impl FromIterator<UserId> for ResultSet {
    fn from_iter<T: IntoIterator<Item = UserId>>(iter: T) -> Self {
        Self::new(iter)
    }
}

/// Immutable user collection indexed by id; construction rejects duplicates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UserStore {
    users: Vec<RoviUser>, // sorted by user_id
}

impl UserStore {
    pub fn new(mut users: Vec<RoviUser>) -> Result<Self, ModelError> {
        users.sort_by_key(|u| u.user_id);
        for pair in users.windows(2) {
            if pair[0].user_id == pair[1].user_id {
                return Err(ModelError::DuplicateUser(pair[0].user_id));
            }
        }
        Ok(Self { users })
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    /// Users in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = &RoviUser> {
        self.users.iter()
    }

    pub fn get(&self, id: UserId) -> Option<&RoviUser> {
        self.users.binary_search_by_key(&id, |u| u.user_id).ok().map(|i| &self.users[i])
    }

    /// All ids, ascending.
    pub fn ids(&self) -> impl Iterator<Item = UserId> + '_ {
        self.users.iter().map(|u| u.user_id)
    }

    /// Checks that every word of every user resolves in `vocab`.
    pub fn validate_against(&self, vocab: &VisualVocabulary) -> Result<(), ModelError> {
        for u in &self.users {
            vocab.validate_words(u.words.as_slice().iter())?;
        }
        Ok(())
    }
}

/// Derives a user from the images whose location falls inside `region`
/// (boundaries included); the word set is the union over those images.
pub fn derive_user(
    images: &[GeoImage],
    region: &Mbr,
    user_id: UserId,
) -> Result<RoviUser, ModelError> {
    let words: WordSet = images
        .iter()
        .filter(|img| region.contains_point(img.location.0, img.location.1))
        .flat_map(|img| img.words.iter())
        .collect();
    if words.is_empty() {
        return Err(ModelError::EmptyUser(user_id));
    }
    RoviUser::new(user_id, *region, words)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mbr(a: f64, b: f64, c: f64, d: f64) -> Mbr {
        Mbr::new(a, b, c, d).unwrap()
    }

    #[test]
    fn mbr_rejects_bad_bounds() {
        assert!(Mbr::new(0.5, 0.0, 0.4, 1.0).is_err(), "unordered x");
        assert!(Mbr::new(0.0, 0.5, 1.0, 0.4).is_err(), "unordered y");
        assert!(Mbr::new(-0.1, 0.0, 0.5, 0.5).is_err(), "negative corner");
        assert!(Mbr::new(0.0, 0.0, 1.1, 0.5).is_err(), "exceeds unit space");
        assert!(Mbr::new(f64::NAN, 0.0, 1.0, 1.0).is_err(), "nan");
        assert!(Mbr::new(0.25, 0.25, 0.25, 0.75).is_ok(), "zero width is a valid mbr");
    }

    #[test]
    fn mbr_contains_boundary_points() {
        let r = mbr(0.25, 0.25, 0.75, 0.75);
        assert!(r.contains_point(0.25, 0.25));
        assert!(r.contains_point(0.75, 0.75));
        assert!(r.contains_point(0.25, 0.5));
        assert!(!r.contains_point(0.2499, 0.5));
    }

    #[test]
    fn word_set_sorts_and_dedups() {
        let s = WordSet::new([5, 1, 3, 1, 5]);
        assert_eq!(s.as_slice(), &[1, 3, 5]);
        assert!(s.contains(3));
        assert!(!s.contains(2));
    }

    #[test]
    fn vocabulary_rejects_non_positive_weights() {
        let mut v = VisualVocabulary::new();
        assert!(v.insert(1, 0.0).is_err());
        assert!(v.insert(1, -2.0).is_err());
        assert!(v.insert(1, f64::INFINITY).is_err());
        v.insert(1, 2.5).unwrap();
        assert_eq!(v.weight(1), Some(2.5));
        assert_eq!(v.weight(9), None);
    }

    #[test]
    fn vocabulary_validate_reports_first_missing_word() {
        let v = VisualVocabulary::from_entries([(1, 1.0), (2, 1.0)]).unwrap();
        assert_eq!(v.validate_words([1, 2].iter()), Ok(()));
        assert_eq!(v.validate_words([2, 7, 9].iter()), Err(ModelError::UnknownWord(7)));
    }

    #[test]
    fn user_requires_words_and_area() {
        let r = mbr(0.1, 0.1, 0.2, 0.2);
        assert!(RoviUser::new(1, r, WordSet::new([4])).is_ok());
        assert!(matches!(RoviUser::new(1, r, WordSet::default()), Err(ModelError::EmptyWords(_))));
        let flat = mbr(0.1, 0.1, 0.1, 0.2);
        assert!(matches!(
            RoviUser::new(1, flat, WordSet::new([4])),
            Err(ModelError::DegenerateRegion(_))
        ));
    }

    #[test]
    fn query_thresholds_must_lie_in_unit_interval() {
        let r = mbr(0.1, 0.1, 0.2, 0.2);
        let w = WordSet::new([1]);
        assert!(RoviQuery::new(r, w.clone(), 0.0, 1.0).is_ok());
        assert!(RoviQuery::new(r, w.clone(), -0.1, 0.5).is_err());
        assert!(RoviQuery::new(r, w, 0.5, 1.5).is_err());
    }

    #[test]
    fn result_set_orders_and_dedups() {
        let r = ResultSet::new([9, 2, 5, 2]);
        assert_eq!(r.ids(), &[2, 5, 9]);
        assert!(r.contains(5));
        assert_eq!(r.first_difference(&ResultSet::new([2, 5, 9])), None);
        assert_eq!(r.first_difference(&ResultSet::new([2, 9])), Some(5));
        assert_eq!(r.first_difference(&ResultSet::new([1, 2, 5, 9])), Some(1));
    }

    #[test]
    fn user_store_rejects_duplicates_and_looks_up_by_id() {
        let r = mbr(0.1, 0.1, 0.2, 0.2);
        let mk = |id| RoviUser::new(id, r, WordSet::new([1])).unwrap();
        let store = UserStore::new(vec![mk(3), mk(1)]).unwrap();
        assert_eq!(store.len(), 2);
        assert_eq!(store.get(3).unwrap().user_id, 3);
        assert!(store.get(2).is_none());
        assert_eq!(UserStore::new(vec![mk(1), mk(1)]).unwrap_err(), ModelError::DuplicateUser(1));
    }

    #[test]
    fn derive_user_unions_words_of_contained_images() {
        let img = |id, x, y, words: &[u32]| GeoImage {
            image_id: id,
            location: (x, y),
            words: WordSet::new(words.iter().copied()),
        };
        let images = vec![
            img(1, 0.30, 0.30, &[1, 2]),
            img(2, 0.40, 0.40, &[2, 3]),
            img(3, 0.90, 0.90, &[9]), // outside
            img(4, 0.25, 0.25, &[4]), // exactly on the corner: included
        ];
        let region = mbr(0.25, 0.25, 0.5, 0.5);
        let user = derive_user(&images, &region, 7).unwrap();
        assert_eq!(user.user_id, 7);
        assert_eq!(user.words.as_slice(), &[1, 2, 3, 4]);

        let empty_region = mbr(0.6, 0.6, 0.7, 0.7);
        assert_eq!(derive_user(&images, &empty_region, 8), Err(ModelError::EmptyUser(8)));
    }

    #[test]
    fn derive_user_is_order_independent() {
        let img = |id, x, y, w: u32| GeoImage {
            image_id: id,
            location: (x, y),
            words: WordSet::new([w]),
        };
        let mut images = vec![img(1, 0.3, 0.3, 5), img(2, 0.35, 0.35, 2), img(3, 0.4, 0.4, 8)];
        let region = mbr(0.2, 0.2, 0.5, 0.5);
        let a = derive_user(&images, &region, 1).unwrap();
        images.reverse();
        let b = derive_user(&images, &region, 1).unwrap();
        assert_eq!(a, b);
    }
}
