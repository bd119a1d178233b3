use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform distribution of an edge parameter on `[min, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformEdgeDistribution {
    min: f64,
}

impl UniformEdgeDistribution {
    /// Edge probabilities: `0 < min < 1`.
    pub fn new(min: f64) -> Result<Self> {
        if min.is_finite() && min > 0.0 && min < 1.0 {
            Ok(Self { min })
        } else {
            Err(Error::OutOfRange {
                what: "edge distribution minimum",
                value: min,
                min: 0.0,
                max: 1.0,
            })
        }
    }

    /// Edge fidelities additionally require `min >= 0.5`.
    pub fn fidelity(min: f64) -> Result<Self> {
        if min < 0.5 {
            return Err(Error::OutOfRange {
                what: "minimum edge fidelity",
                value: min,
                min: 0.5,
                max: 1.0,
            });
        }
        Self::new(min)
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        1.0
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.min + 1.0)
    }

    pub fn std_dev(&self) -> f64 {
        (1.0 - self.min) / 12f64.sqrt()
    }

    pub fn moments(&self) -> EdgeMoments {
        EdgeMoments {
            mean: self.mean(),
            std_dev: self.std_dev(),
        }
    }
}

/// Mean and standard deviation of an edge parameter, whatever its
/// distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeMoments {
    pub mean: f64,
    pub std_dev: f64,
}

impl EdgeMoments {
    pub fn new(mean: f64, std_dev: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mean) || !(std_dev >= 0.0 && std_dev.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "edge moments need mean in [0, 1] and a finite non-negative std, got ({mean}, {std_dev})"
            )));
        }
        Ok(Self { mean, std_dev })
    }

    /// Moments of the uniform distribution on `[2 * mean - 1, 1]`; a mean of
    /// one gives the degenerate, deterministic edge.
    pub fn uniform_with_mean(mean: f64) -> Result<Self> {
        if !(0.5..=1.0).contains(&mean) {
            return Err(Error::OutOfRange {
                what: "mean edge parameter",
                value: mean,
                min: 0.5,
                max: 1.0,
            });
        }
        Self::new(mean, 2.0 * (1.0 - mean) / 12f64.sqrt())
    }
}

impl From<UniformEdgeDistribution> for EdgeMoments {
    fn from(d: UniformEdgeDistribution) -> Self {
        d.moments()
    }
}

impl From<&UniformEdgeDistribution> for EdgeMoments {
    fn from(d: &UniformEdgeDistribution) -> Self {
        d.moments()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_moments() {
        let d = UniformEdgeDistribution::fidelity(0.9).unwrap();
        assert!((d.mean() - 0.95).abs() < 1e-15);
        assert!((d.std_dev() - 0.1 / 12f64.sqrt()).abs() < 1e-15);
        assert_eq!(EdgeMoments::uniform_with_mean(0.95).unwrap().mean, 0.95);
        assert!((EdgeMoments::uniform_with_mean(0.95).unwrap().std_dev - d.std_dev()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_minimums() {
        assert!(UniformEdgeDistribution::new(0.0).is_err());
        assert!(UniformEdgeDistribution::new(1.0).is_err());
        assert!(UniformEdgeDistribution::fidelity(0.4).is_err());
        assert!(UniformEdgeDistribution::new(0.4).is_ok());
        assert!(EdgeMoments::uniform_with_mean(0.4).is_err());
    }
}
