//! Closed-form moments of path parameters.
//!
//! These only rely on independence of the edges, so they hold for any edge
//! distribution with the given mean and standard deviation.

use serde::{Deserialize, Serialize};

use super::edge::EdgeMoments;
use crate::error::{Error, Result};
use crate::quantum::Fidelity;

fn check_length(l: u32) -> Result<i32> {
    if l == 0 {
        return Err(Error::InvalidParameter("path length must be at least 1".into()));
    }
    i32::try_from(l).map_err(|_| Error::InvalidParameter(format!("path length {l} is too large")))
}

fn werner_mean(edge: &EdgeMoments) -> f64 {
    (4.0 * edge.mean - 1.0) / 3.0
}

/// `(A^l - B^l)^(1/2)` with `A = B + extra`, clamped at zero.
fn spread(base: f64, extra: f64, l: i32) -> f64 {
    ((base + extra).powi(l) - base.powi(l)).max(0.0).sqrt()
}

pub fn mean_path_fidelity(l: u32, edge: impl Into<EdgeMoments>) -> Result<Fidelity> {
    let l = check_length(l)?;
    let edge = edge.into();
    Fidelity::new(0.25 + 0.75 * werner_mean(&edge).powi(l))
}

pub fn std_path_fidelity(l: u32, edge: impl Into<EdgeMoments>) -> Result<f64> {
    let l = check_length(l)?;
    let edge = edge.into();
    let w = werner_mean(&edge);
    Ok(0.75 * spread(w * w, 16.0 / 9.0 * edge.std_dev * edge.std_dev, l))
}

/// `sqrt(l) w^(l-1) sigma`: the narrow-distribution scaling of the path
/// fidelity spread. Validation only; the criteria use the exact form.
pub fn std_path_fidelity_narrow_approx(l: u32, edge: impl Into<EdgeMoments>) -> Result<f64> {
    let l = check_length(l)?;
    let edge = edge.into();
    Ok(f64::from(l).sqrt() * werner_mean(&edge).powi(l - 1) * edge.std_dev)
}

pub fn mean_path_probability(l: u32, edge: impl Into<EdgeMoments>) -> Result<f64> {
    let l = check_length(l)?;
    Ok(edge.into().mean.powi(l))
}

pub fn std_path_probability(l: u32, edge: impl Into<EdgeMoments>) -> Result<f64> {
    let l = check_length(l)?;
    let edge = edge.into();
    Ok(spread(edge.mean * edge.mean, edge.std_dev * edge.std_dev, l))
}

pub fn std_path_probability_narrow_approx(l: u32, edge: impl Into<EdgeMoments>) -> Result<f64> {
    let l = check_length(l)?;
    let edge = edge.into();
    Ok(f64::from(l).sqrt() * edge.mean.powi(l - 1) * edge.std_dev)
}

/// Graph distance up to which paths stay entangled on average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntangledPathLength {
    Finite(u32),
    /// Perfect edges never lose entanglement.
    Unbounded,
}

impl std::fmt::Display for EntangledPathLength {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EntangledPathLength::Finite(l) => write!(f, "{l}"),
            EntangledPathLength::Unbounded => f.write_str("inf"),
        }
    }
}

/// `floor(-ln 3 / ln((4 f_mean - 1) / 3))`, the distance at which the mean
/// path fidelity reaches 1/2.
pub fn average_entangled_path_length(edge: impl Into<EdgeMoments>) -> Result<EntangledPathLength> {
    let edge = edge.into();
    if !(edge.mean > 0.5 && edge.mean <= 1.0) {
        return Err(Error::OutOfRange {
            what: "mean edge fidelity",
            value: edge.mean,
            min: 0.5,
            max: 1.0,
        });
    }
    let w = werner_mean(&edge);
    if w >= 1.0 {
        return Ok(EntangledPathLength::Unbounded);
    }
    let crossing = -(3f64.ln()) / w.ln();
    Ok(EntangledPathLength::Finite(crossing.floor() as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::edge::UniformEdgeDistribution;

    fn uniform_mean(mean: f64) -> EdgeMoments {
        EdgeMoments::uniform_with_mean(mean).unwrap()
    }

    #[test]
    fn single_edge_moments_are_edge_moments() {
        let e = uniform_mean(0.85);
        assert!((mean_path_fidelity(1, e).unwrap().value() - 0.85).abs() < 1e-15);
        assert!((std_path_fidelity(1, e).unwrap() - e.std_dev).abs() < 1e-15);
        assert!((mean_path_probability(1, e).unwrap() - 0.85).abs() < 1e-15);
        assert!((std_path_probability(1, e).unwrap() - e.std_dev).abs() < 1e-15);
    }

    #[test]
    fn deterministic_edges_have_no_spread() {
        let e = EdgeMoments::new(0.93, 0.0).unwrap();
        for l in 1..30 {
            assert_eq!(std_path_fidelity(l, e).unwrap(), 0.0);
            assert_eq!(std_path_probability(l, e).unwrap(), 0.0);
        }
        let perfect = EdgeMoments::new(1.0, 0.0).unwrap();
        assert_eq!(mean_path_probability(7, perfect).unwrap(), 1.0);
        assert_eq!(std_path_probability(7, perfect).unwrap(), 0.0);
        assert_eq!(mean_path_fidelity(7, perfect).unwrap().value(), 1.0);
    }

    #[test]
    fn reference_values() {
        let f15 = mean_path_fidelity(15, uniform_mean(0.95)).unwrap().value();
        assert!((f15 - 0.516_5).abs() < 1e-4, "{f15}");
        assert!(f15 > 0.5);
        let p5 = mean_path_probability(5, uniform_mean(0.85)).unwrap();
        assert!((p5 - 0.443_705_312_5).abs() < 1e-12);
        let far = mean_path_fidelity(400, uniform_mean(0.9)).unwrap().value();
        assert!((far - 0.25).abs() < 1e-12);
    }

    #[test]
    fn fidelity_spread_is_non_monotonic() {
        let e = uniform_mean(0.85);
        let s: Vec<f64> = (1..=6).map(|l| std_path_fidelity(l, e).unwrap()).collect();
        assert!(s[1] > s[0]);
        assert!(s[5] < s[1]);
    }

    #[test]
    fn narrow_approximation_tracks_exact_form() {
        let e = UniformEdgeDistribution::fidelity(0.98).unwrap();
        for l in 1..=10 {
            let exact = std_path_fidelity(l, e).unwrap();
            let approx = std_path_fidelity_narrow_approx(l, e).unwrap();
            assert!((exact - approx).abs() < 0.02 * exact, "l = {l}");
        }
    }

    #[test]
    fn average_entangled_length() {
        assert_eq!(
            average_entangled_path_length(uniform_mean(0.95)).unwrap(),
            EntangledPathLength::Finite(15)
        );
        assert_eq!(
            average_entangled_path_length(uniform_mean(0.8)).unwrap(),
            EntangledPathLength::Finite(3)
        );
        assert_eq!(
            average_entangled_path_length(EdgeMoments::new(1.0, 0.0).unwrap()).unwrap(),
            EntangledPathLength::Unbounded
        );
        assert!(average_entangled_path_length(uniform_mean(0.5)).is_err());
    }

    #[test]
    fn average_length_is_where_mean_crosses_threshold() {
        for i in 1..100 {
            let mean = 0.5 + 0.5 * i as f64 / 100.0;
            let e = uniform_mean(mean);
            let EntangledPathLength::Finite(l_avg) = average_entangled_path_length(e).unwrap() else {
                panic!("finite expected");
            };
            let first_below = (1..10_000)
                .find(|&l| mean_path_fidelity(l, e).unwrap().value() < 0.5)
                .unwrap();
            assert!(first_below - 1 <= l_avg && l_avg <= first_below, "mean {mean}");
        }
    }

    #[test]
    fn means_decrease_with_length() {
        let e = uniform_mean(0.9);
        for l in 1..40 {
            assert!(mean_path_fidelity(l + 1, e).unwrap() < mean_path_fidelity(l, e).unwrap());
            assert!(mean_path_probability(l + 1, e).unwrap() < mean_path_probability(l, e).unwrap());
        }
    }

    #[test]
    fn zero_length_is_rejected() {
        assert!(mean_path_fidelity(0, uniform_mean(0.9)).is_err());
    }
}
