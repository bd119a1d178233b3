//! Scalar algebra of isotropic two-qubit states.
//!
//! An isotropic state is fully described by its fidelity `f` with the Bell
//! state `|phi+>`; it mixes `|phi+>` with the maximally mixed state using the
//! weight `(4f - 1) / 3`. Swapping, purification and the useful-purification
//! window are all closed-form functions of fidelities, so this module never
//! touches density matrices.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};

/// Fidelity of an isotropic state with `|phi+>`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fidelity(f64);

impl Fidelity {
    pub const ONE: Fidelity = Fidelity(1.0);
    /// Fidelity of the maximally mixed state.
    pub const MIXED: Fidelity = Fidelity(0.25);
    /// Entanglement threshold.
    pub const THRESHOLD: Fidelity = Fidelity(0.5);

    pub fn new(value: f64) -> Result<Self> {
        check_range("fidelity", value, 0.0, 1.0).map(Fidelity)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Weight of `|phi+>` in the isotropic decomposition, `(4f - 1) / 3`.
    pub fn werner_parameter(self) -> f64 {
        (4.0 * self.0 - 1.0) / 3.0
    }

    fn from_werner_parameter(w: f64) -> Self {
        Fidelity((0.25 + 0.75 * w).clamp(0.0, 1.0))
    }

    pub(crate) fn checked(self, what: &'static str, min: f64, max: f64) -> Result<f64> {
        check_range(what, self.0, min, max)
    }
}

impl TryFrom<f64> for Fidelity {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Fidelity::new(value)
    }
}

impl From<Fidelity> for f64 {
    fn from(f: Fidelity) -> f64 {
        f.0
    }
}

impl std::fmt::Display for Fidelity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Probability of a heralded success, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Probability(f64);

impl Probability {
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        check_range("probability", value, 0.0, 1.0).map(Probability)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// Outcome of one round of bilateral-CNOT purification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurificationResult {
    pub output_fidelity: Fidelity,
    /// Probability that the two target measurements agree.
    pub success_probability: f64,
}

/// Range of partner fidelities `f2` that purify usefully with a given `f1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurificationWindow {
    pub lower: Fidelity,
    pub upper: Fidelity,
}

impl PurificationWindow {
    pub fn contains(&self, f: Fidelity) -> bool {
        self.lower <= f && f <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper.0 - self.lower.0
    }
}

/// Concurrence of an isotropic state: `2f - 1` above threshold, else zero.
pub fn concurrence(f: Fidelity) -> f64 {
    (2.0 * f.0 - 1.0).max(0.0)
}

/// Fidelity after swapping two isotropic links at their common node.
pub fn swap_pair(f1: Fidelity, f2: Fidelity) -> Result<Fidelity> {
    let w1 = Fidelity(f1.checked("fidelity", 0.25, 1.0)?).werner_parameter();
    let w2 = Fidelity(f2.checked("fidelity", 0.25, 1.0)?).werner_parameter();
    Ok(Fidelity::from_werner_parameter(w1 * w2))
}

/// End-to-end fidelity after swapping at every intermediate node of a chain.
///
/// The Werner parameters are multiplied in sorted order, which makes the
/// result bit-for-bit independent of the order of `links`.
pub fn swap_chain(links: &[Fidelity]) -> Result<Fidelity> {
    match links {
        [] => Err(Error::Empty("link fidelity sequence")),
        [single] => {
            single.checked("fidelity", 0.25, 1.0)?;
            Ok(*single)
        }
        _ => {
            let mut weights = links
                .iter()
                .map(|f| f.checked("fidelity", 0.25, 1.0).map(|v| Fidelity(v).werner_parameter()))
                .collect::<Result<Vec<_>>>()?;
            weights.sort_by(f64::total_cmp);
            Ok(Fidelity::from_werner_parameter(weights.iter().product()))
        }
    }
}

/// Probability that every edge of a path succeeds.
pub fn path_probability(edges: &[Probability]) -> Result<Probability> {
    if edges.is_empty() {
        return Err(Error::Empty("edge probability sequence"));
    }
    let mut product = 1.0;
    for p in edges {
        if p.0 <= 0.0 {
            return Err(Error::OutOfRange {
                what: "edge probability",
                value: p.0,
                min: f64::MIN_POSITIVE,
                max: 1.0,
            });
        }
        product *= p.0;
    }
    Ok(Probability(product))
}

/// Deutsch / bilateral-CNOT purification of two isotropic pairs.
pub fn purify(f1: Fidelity, f2: Fidelity) -> Result<PurificationResult> {
    let a = f1.checked("fidelity", 0.25, 1.0)?;
    let b = f2.checked("fidelity", 0.25, 1.0)?;
    let both_bad = (1.0 - a) * (1.0 - b);
    let numerator = a * b + both_bad / 9.0;
    let denominator = a * b + (a * (1.0 - b) + (1.0 - a) * b) / 3.0 + 5.0 * both_bad / 9.0;
    Ok(PurificationResult {
        output_fidelity: Fidelity((numerator / denominator).min(1.0)),
        success_probability: denominator,
    })
}

/// Largest amount `f1 - f2 >= 0` by which a weaker partner may trail `f1`
/// and still purify usefully.
pub fn window_upper_limit(f1: Fidelity) -> Result<f64> {
    let f = f1.checked("fidelity", 0.5, 1.0)?;
    let denominator = 8.0 * f * f - 12.0 * f + 1.0;
    debug_assert!(denominator < 0.0, "denominator {denominator} at f1 = {f}");
    let numerator = ((8.0 * f - 14.0) * f + 7.0) * f - 1.0;
    Ok((numerator / denominator).max(0.0))
}

/// Most negative `f1 - f2 <= 0`, i.e. how far a stronger partner may exceed
/// `f1` and still gain from purification.
pub fn window_lower_limit(f1: Fidelity) -> Result<f64> {
    let f = f1.checked("fidelity", 0.5, 1.0)?;
    let discriminant = 28.0 * f * f - 26.0 * f + 7.0;
    let numerator = 8.0 * f * f - 8.0 * f + 3.0 - discriminant.sqrt();
    Ok((numerator / (8.0 * f - 2.0)).min(0.0))
}

/// Partner fidelities that make purification with `f1` useful.
pub fn useful_window(f1: Fidelity) -> Result<PurificationWindow> {
    let upper_limit = window_upper_limit(f1)?;
    let lower_limit = window_lower_limit(f1)?;
    Ok(PurificationWindow {
        lower: Fidelity((f1.0 - upper_limit).max(0.0)),
        upper: Fidelity((f1.0 - lower_limit).min(1.0)),
    })
}

/// Whether purifying `f1` with `f2` yields at least `max(f1, f2)`.
///
/// Decided by membership of `f2` in the useful window of `f1`; ties count
/// as useful.
pub fn is_purification_useful(f1: Fidelity, f2: Fidelity) -> Result<bool> {
    f2.checked("fidelity", 0.5, 1.0)?;
    Ok(useful_window(f1)?.contains(f2))
}


#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn swapping_never_improves(a in 0.25f64..=1.0, b in 0.25f64..=1.0) {
            let out = swap_pair(Fidelity(a), Fidelity(b)).unwrap().value();
            prop_assert!(out <= a.min(b) + 1e-15);
            prop_assert!(out >= 0.25 - 1e-15);
        }

        #[test]
        fn chain_is_order_invariant(mut links in proptest::collection::vec(0.5f64..=1.0, 1..12), seed in any::<u64>()) {
            let forward = swap_chain(&links.iter().map(|&v| Fidelity(v)).collect::<Vec<_>>()).unwrap();
            let n = links.len();
            links.rotate_left((seed as usize) % n);
            links.swap(0, (seed as usize / 7) % n);
            let shuffled = swap_chain(&links.iter().map(|&v| Fidelity(v)).collect::<Vec<_>>()).unwrap();
            prop_assert_eq!(forward.value().to_bits(), shuffled.value().to_bits());
        }

        #[test]
        fn window_contains_its_centre(f in 0.5f64..=1.0) {
            let w = useful_window(Fidelity(f)).unwrap();
            prop_assert!(w.lower.value() <= f && f <= w.upper.value());
        }

        #[test]
        fn output_is_perfect_only_for_perfect_inputs(a in 0.25f64..=1.0, b in 0.25f64..=1.0) {
            let r = purify(Fidelity(a), Fidelity(b)).unwrap();
            if a < 1.0 - 1e-9 || b < 1.0 - 1e-9 {
                prop_assert!(r.output_fidelity.value() < 1.0);
            }
            prop_assert!(r.success_probability > 0.0 && r.success_probability <= 1.0);
        }
    }
}
