//! User preferences over objectives and distances between them.
//!
//! A preference is a point on the probability simplex: one non-negative
//! weight per objective, summing to one. Distances between preferences drive
//! both the significance gate for policy bootstrapping and steppingstone
//! retrieval, so every supported function is oriented the same way: larger
//! means farther apart.

use serde::{Deserialize, Serialize};

use crate::error::{MorlError, Result};

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// A validated weight vector over `M >= 2` objectives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Preference(Vec<f64>);

impl Preference {
    /// Validate and wrap a weight vector.
    ///
    /// Requirements: at least two weights, each in `[0, 1]`, summing to one
    /// within `1e-9`.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(MorlError::Config(format!(
                "a preference needs at least 2 weights, got {}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0 || *w > 1.0) {
            return Err(MorlError::Config(format!(
                "preference weights must lie in [0, 1]: {weights:?}"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(MorlError::Config(format!(
                "preference weights must sum to 1 (got {sum})"
            )));
        }
        Ok(Preference(weights))
    }

    /// Two-objective convenience: `[w, 1 - w]`.
    pub fn pair(first: f64) -> Result<Self> {
        Preference::new(vec![first, 1.0 - first])
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl TryFrom<Vec<f64>> for Preference {
    type Error = MorlError;

    fn try_from(weights: Vec<f64>) -> Result<Self> {
        Preference::new(weights)
    }
}

impl From<Preference> for Vec<f64> {
    fn from(p: Preference) -> Self {
        p.0
    }
}

/// Distance function used to compare two preferences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceKind {
    Euclidean,
    /// Count of components that differ exactly. Degenerate on real-valued
    /// weights (almost any change flips every component) but kept for
    /// comparison studies.
    Hamming,
    /// `1 - cosine similarity`, so that 0 means parallel and larger means
    /// farther, consistent with the other kinds.
    Cosine,
    Manhattan,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 4] = [
        DistanceKind::Euclidean,
        DistanceKind::Hamming,
        DistanceKind::Cosine,
        DistanceKind::Manhattan,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DistanceKind::Euclidean => "euclidean",
            DistanceKind::Hamming => "hamming",
            DistanceKind::Cosine => "cosine",
            DistanceKind::Manhattan => "manhattan",
        }
    }
}

impl std::str::FromStr for DistanceKind {
    type Err = MorlError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(DistanceKind::Euclidean),
            "hamming" => Ok(DistanceKind::Hamming),
            "cosine" => Ok(DistanceKind::Cosine),
            "manhattan" => Ok(DistanceKind::Manhattan),
            other => Err(MorlError::Config(format!("unknown distance '{other}'"))),
        }
    }
}

/// Distance between two preferences of equal dimension.
pub fn preference_distance(a: &Preference, b: &Preference, kind: DistanceKind) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(MorlError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let (wa, wb) = (a.weights(), b.weights());
    let d = match kind {
        DistanceKind::Euclidean => wa
            .iter()
            .zip(wb)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
        DistanceKind::Hamming => wa.iter().zip(wb).filter(|(x, y)| x != y).count() as f64,
        DistanceKind::Cosine => {
            let dot: f64 = wa.iter().zip(wb).map(|(x, y)| x * y).sum();
            let na: f64 = wa.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb: f64 = wb.iter().map(|x| x * x).sum::<f64>().sqrt();
            // Valid preferences always have positive norm (weights sum to 1).
            1.0 - dot / (na * nb)
        }
        DistanceKind::Manhattan => wa.iter().zip(wb).map(|(x, y)| (x - y).abs()).sum(),
    };
    Ok(d)
}

/// Index of the preference-space cell of width `phi` containing `w`.
///
/// Two objectives only; the unit interval of first weights is cut into
/// `ceil(1 / phi)` cells and the last cell absorbs the boundary at 1.
/// Diagnostic aid — bootstrapping itself gates on raw distances.
pub fn region_index(pref: &Preference, phi: f64) -> Result<usize> {
    if !(phi > 0.0 && phi <= 1.0) {
        return Err(MorlError::Config(format!(
            "region width must lie in (0, 1], got {phi}"
        )));
    }
    if pref.dim() != 2 {
        return Err(MorlError::Contract(format!(
            "region indexing is defined for 2 objectives, got {}",
            pref.dim()
        )));
    }
    let cells = (1.0 / phi).ceil() as usize;
    let idx = (pref.weights()[0] / phi).floor() as usize;
    Ok(idx.min(cells - 1))
}
