//! Vector rewards, linear scalarization, and Pareto dominance.

use serde::{Deserialize, Serialize};

use crate::error::{MorlError, Result};
use crate::preference::Preference;

/// One reward signal per objective, in the environment's declared order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RewardVector(Vec<f64>);

impl RewardVector {
    /// Build a reward vector; every component must be finite.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.iter().any(|c| !c.is_finite()) {
            return Err(MorlError::Contract(
                "reward components must be finite".into(),
            ));
        }
        Ok(RewardVector(components))
    }

    /// Zero reward with the given number of objectives.
    pub fn zeros(dim: usize) -> Self {
        RewardVector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    /// Componentwise accumulation (used for per-episode return sums).
    pub fn add_assign(&mut self, other: &RewardVector) -> Result<()> {
        if self.0.len() != other.0.len() {
            return Err(MorlError::DimensionMismatch {
                left: self.0.len(),
                right: other.0.len(),
            });
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
        Ok(())
    }
}

impl From<RewardVector> for Vec<f64> {
    fn from(r: RewardVector) -> Self {
        r.0
    }
}

/// Project a vector reward onto a preference: the weighted sum `w . r`.
pub fn scalarize(reward: &RewardVector, pref: &Preference) -> Result<f64> {
    dot(reward.components(), pref.weights())
}

/// Weighted sum of an arbitrary value vector under a preference.
pub fn scalarize_components(components: &[f64], pref: &Preference) -> Result<f64> {
    dot(components, pref.weights())
}

fn dot(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(MorlError::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| x * y).sum())
}

/// Pareto dominance: `a` is at least as good everywhere and strictly better
/// somewhere. A vector never dominates itself.
pub fn dominates(a: &RewardVector, b: &RewardVector) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(MorlError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let mut strictly_better = false;
    for (x, y) in a.components().iter().zip(b.components()) {
        if x < y {
            return Ok(false);
        }
        if x > y {
            strictly_better = true;
        }
    }
    Ok(strictly_better)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pref(w: &[f64]) -> Preference {
        Preference::new(w.to_vec()).unwrap()
    }

    fn rv(c: &[f64]) -> RewardVector {
        RewardVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn scalarize_is_the_weighted_sum() {
        // Hand value: 0.5 * -1 + 0.5 * -5 = -3.
        let s = scalarize(&rv(&[-1.0, -5.0]), &pref(&[0.5, 0.5])).unwrap();
        assert_eq!(s, -3.0);
    }

    #[test]
    fn scalarize_rejects_dimension_mismatch() {
        let err = scalarize(&rv(&[-1.0, -5.0, 2.0]), &pref(&[0.5, 0.5])).unwrap_err();
        assert!(matches!(err, MorlError::DimensionMismatch { .. }));
    }

    #[test]
    fn scalarize_is_linear_in_the_reward() {
        // w.(a*x + b*y) == a*(w.x) + b*(w.y) for random inputs.
        let mut rng = crate::seed::rng(11, 0);
        use rand::Rng;
        for _ in 0..200 {
            let w1: f64 = rng.random_range(0.0..=1.0);
            let w = pref(&[w1, 1.0 - w1]);
            let x = rv(&[rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)]);
            let y = rv(&[rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)]);
            let (a, b): (f64, f64) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let combo = rv(&[
                a * x.components()[0] + b * y.components()[0],
                a * x.components()[1] + b * y.components()[1],
            ]);
            let lhs = scalarize(&combo, &w).unwrap();
            let rhs = a * scalarize(&x, &w).unwrap() + b * scalarize(&y, &w).unwrap();
            assert!((lhs - rhs).abs() < 1e-9, "lhs={lhs} rhs={rhs}");
        }
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&rv(&[1.0, 2.0]), &rv(&[1.0, 1.0])).unwrap());
        assert!(!dominates(&rv(&[1.0, 1.0]), &rv(&[1.0, 2.0])).unwrap());
        // Equal vectors: neither direction dominates.
        assert!(!dominates(&rv(&[1.0, 1.0]), &rv(&[1.0, 1.0])).unwrap());
        // Incomparable pair.
        assert!(!dominates(&rv(&[2.0, 0.0]), &rv(&[0.0, 2.0])).unwrap());
        assert!(!dominates(&rv(&[0.0, 2.0]), &rv(&[2.0, 0.0])).unwrap());
    }

    #[test]
    fn dominance_is_a_strict_partial_order() {
        // Irreflexive, asymmetric, transitive over a random sample.
        let mut rng = crate::seed::rng(13, 0);
        use rand::Rng;
        let sample: Vec<RewardVector> = (0..40)
            .map(|_| {
                rv(&[
                    rng.random_range(-5.0..5.0_f64).round(),
                    rng.random_range(-5.0..5.0_f64).round(),
                ])
            })
            .collect();
        for a in &sample {
            assert!(!dominates(a, a).unwrap());
            for b in &sample {
                if dominates(a, b).unwrap() {
                    assert!(!dominates(b, a).unwrap());
                }
                for c in &sample {
                    if dominates(a, b).unwrap() && dominates(b, c).unwrap() {
                        assert!(dominates(a, c).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_non_finite_components() {
        assert!(RewardVector::new(vec![f64::NAN, 0.0]).is_err());
        assert!(RewardVector::new(vec![f64::INFINITY, 0.0]).is_err());
    }
}
