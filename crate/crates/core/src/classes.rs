//! Landmark classes and normalized class-score vectors.
//!
//! A score vector holds `k` landmark classes followed by one trailing
//! "unknown" entry, so its length is always `k + 1`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Landmark classes handled by the pipeline. The discriminant is the class id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LandmarkClass {
    Tree = 0,
    Bush = 1,
}

impl LandmarkClass {
    pub const ALL: [LandmarkClass; 2] = [LandmarkClass::Tree, LandmarkClass::Bush];
    /// Number of landmark classes (`k`).
    pub const COUNT: usize = 2;

    pub fn id(self) -> usize {
        self as usize
    }

    pub fn from_id(id: usize) -> Option<Self> {
        Self::ALL.get(id).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            LandmarkClass::Tree => "tree",
            LandmarkClass::Bush => "bush",
        }
    }
}

impl std::fmt::Display for LandmarkClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScoresError {
    #[error("score vector needs at least 2 entries, got {0}")]
    TooShort(usize),
    #[error("score vector has a negative or non-finite entry")]
    InvalidEntry,
    #[error("score vector sums to zero")]
    ZeroMass,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Non-negative scores over `k` classes plus "unknown", summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ClassScores(Vec<f64>);

impl ClassScores {
    /// Normalizes raw non-negative weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self, ScoresError> {
        if weights.len() < 2 {
            return Err(ScoresError::TooShort(weights.len()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(ScoresError::InvalidEntry);
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(ScoresError::ZeroMass);
        }
        Ok(Self(weights.into_iter().map(|w| w / sum).collect()))
    }

    /// Uniform over all `k + 1` entries.
    pub fn uniform(k: usize) -> Self {
        Self(vec![1.0 / (k + 1) as f64; k + 1])
    }

    /// All mass on one entry.
    pub fn one_hot(k: usize, index: usize) -> Self {
        let mut v = vec![0.0; k + 1];
        v[index] = 1.0;
        Self(v)
    }

    /// Number of landmark classes, excluding "unknown".
    pub fn k(&self) -> usize {
        self.0.len() - 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn unknown_index(&self) -> usize {
        self.0.len() - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// Index of the largest entry; ties go to the lower index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.0.iter().enumerate() {
            if *v > self.0[best] {
                best = i;
            }
        }
        best
    }

    /// The winning landmark class, or `None` when "unknown" wins.
    pub fn landmark_class(&self) -> Option<LandmarkClass> {
        let i = self.argmax();
        if i == self.unknown_index() {
            None
        } else {
            LandmarkClass::from_id(i)
        }
    }

    pub fn is_normalized(&self) -> bool {
        (self.0.iter().sum::<f64>() - 1.0).abs() < 1e-9 && self.0.iter().all(|v| *v >= 0.0)
    }

    /// Elementwise product, renormalized. Falls back to `self` if the product
    /// has no mass.
    pub fn multiply(&self, other: &ClassScores) -> Result<ClassScores, ScoresError> {
        if self.len() != other.len() {
            return Err(ScoresError::LengthMismatch(self.len(), other.len()));
        }
        let w: Vec<f64> = self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect();
        match Self::from_weights(w) {
            Err(ScoresError::ZeroMass) => Ok(self.clone()),
            other => other,
        }
    }
}

impl TryFrom<Vec<f64>> for ClassScores {
    type Error = ScoresError;

    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Self::from_weights(v)
    }
}

impl From<ClassScores> for Vec<f64> {
    fn from(s: ClassScores) -> Self {
        s.0
    }
}
