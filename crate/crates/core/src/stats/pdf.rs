//! Exact densities of path fidelity and path probability for uniform edges.
//!
//! Both path parameters reduce to a product `X = x_1 * ... * x_l` of
//! i.i.d. factors uniform on `[a, 1]`: the path probability directly, the
//! path fidelity through its Werner parameter `(4f - 1) / 3`. With
//! `s = -ln x` and `L = -ln a`, the density of `X` is
//!
//! ```text
//! q(x) = (1 - a)^-l / (l - 1)! * sum_{n < m} (-1)^n C(l, n) (s - n L)^(l - 1)
//! ```
//!
//! on the geometric interval `a^m <= x <= a^(m - 1)`, `m = 1..=l`.

use serde::{Deserialize, Serialize};

use super::quadrature::{integrate, neumaier_sum, QuadratureOptions};
use crate::error::{Error, Result};
use crate::quantum::Fidelity;

/// Above this many factors the alternating sum is evaluated in log-space.
const LOG_SPACE_THRESHOLD: u32 = 10;

/// Absolute tolerance of the single integrals over a density; tighter
/// requests run into the round-off floor of the alternating sums.
const MOMENT_TOLERANCE: f64 = 1e-10;

/// Common interface of the piecewise-analytic path-parameter densities.
pub trait PathParameterPdf {
    fn density(&self, x: f64) -> f64;

    /// Closed support `[lower, upper]`.
    fn support(&self) -> (f64, f64);

    /// Ascending kink locations, including both support endpoints.
    fn breakpoints(&self) -> Vec<f64>;

    /// Breakpoints clipped to `[lower, upper]`, with both ends included.
    fn breakpoints_within(&self, lower: f64, upper: f64) -> Vec<f64> {
        let (lo, hi) = self.support();
        let lower = lower.max(lo);
        let upper = upper.min(hi);
        if lower >= upper {
            return Vec::new();
        }
        let mut points = vec![lower];
        points.extend(self.breakpoints().into_iter().filter(|&b| b > lower && b < upper));
        points.push(upper);
        points
    }

    /// `int g(x) q(x) dx` over `[lower, upper]` intersected with the support.
    fn expectation_over<G: FnMut(f64) -> f64>(
        &self,
        mut g: G,
        lower: f64,
        upper: f64,
        options: QuadratureOptions,
    ) -> Result<f64>
    where
        Self: Sized,
    {
        let points = self.breakpoints_within(lower, upper);
        if points.is_empty() {
            return Ok(0.0);
        }
        Ok(integrate(|x| g(x) * self.density(x), &points, options)?.value)
    }

    fn cdf(&self, x: f64) -> Result<f64>
    where
        Self: Sized,
    {
        let (lo, hi) = self.support();
        if x <= lo {
            return Ok(0.0);
        }
        if x >= hi {
            return Ok(1.0);
        }
        let mass = self.expectation_over(|_| 1.0, lo, x, QuadratureOptions::with_tolerance(MOMENT_TOLERANCE))?;
        Ok(mass.clamp(0.0, 1.0))
    }

    /// Raw moment `E[X^k]` by quadrature.
    fn raw_moment(&self, k: i32) -> Result<f64>
    where
        Self: Sized,
    {
        let (lo, hi) = self.support();
        self.expectation_over(|x| x.powi(k), lo, hi, QuadratureOptions::with_tolerance(MOMENT_TOLERANCE))
    }
}

/// Product of `factors` i.i.d. variables uniform on `[lower, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct UniformProduct {
    factors: u32,
    lower: f64,
}

impl UniformProduct {
    fn support_min(&self) -> f64 {
        self.lower.powi(self.factors as i32)
    }

    /// Index `m` of the geometric interval `a^m <= x <= a^(m - 1)`.
    fn interval_index(&self, x: f64) -> Option<u32> {
        if !(x >= self.support_min() && x <= 1.0) {
            return None;
        }
        let s = -x.ln();
        let step = -self.lower.ln();
        Some(((s / step).ceil() as u32).clamp(1, self.factors))
    }

    fn density(&self, x: f64) -> f64 {
        let Some(m) = self.interval_index(x) else {
            return 0.0;
        };
        let l = self.factors;
        let width = 1.0 - self.lower;
        if l == 1 {
            return 1.0 / width;
        }
        let s = -x.ln();
        let step = -self.lower.ln();
        let power = (l - 1) as i32;

        let value = if l > LOG_SPACE_THRESHOLD {
            let log_prefactor = -(l as f64) * width.ln() - ln_factorial(l - 1);
            neumaier_sum((0..m).map(|n| {
                let base = s - n as f64 * step;
                if base <= 0.0 {
                    return 0.0;
                }
                let magnitude = (log_prefactor + ln_binomial(l, n) + power as f64 * base.ln()).exp();
                if n % 2 == 0 {
                    magnitude
                } else {
                    -magnitude
                }
            }))
        } else {
            let prefactor = width.powi(-(l as i32)) / factorial(l - 1);
            prefactor
                * neumaier_sum((0..m).map(|n| {
                    let base = (s - n as f64 * step).max(0.0);
                    let term = binomial(l, n) * base.powi(power);
                    if n % 2 == 0 {
                        term
                    } else {
                        -term
                    }
                }))
        };
        value.max(0.0)
    }

    /// `a^l, a^(l-1), ..., a, 1`.
    fn breakpoints(&self) -> Vec<f64> {
        (0..=self.factors).rev().map(|m| self.lower.powi(m as i32)).collect()
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|i| f64::from(i).ln()).sum()
}

fn ln_binomial(n: u32, k: u32) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn check_length(length: u32) -> Result<()> {
    if length == 0 {
        Err(Error::InvalidParameter("path length must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Density of the end-to-end fidelity of an `l`-edge path whose edge
/// fidelities are uniform on `[f_min, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathFidelityPdf {
    length: u32,
    f_min: f64,
}

impl PathFidelityPdf {
    pub fn new(length: u32, f_min: f64) -> Result<Self> {
        check_length(length)?;
        if !(f_min >= 0.5 && f_min < 1.0) {
            return Err(Error::OutOfRange {
                what: "minimum edge fidelity",
                value: f_min,
                min: 0.5,
                max: 1.0,
            });
        }
        Ok(Self { length, f_min })
    }

    pub fn length(&self) -> u32 {
        self.length
    }

    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    fn product(&self) -> UniformProduct {
        UniformProduct {
            factors: self.length,
            lower: Fidelity::new(self.f_min).expect("validated").werner_parameter(),
        }
    }

    /// Smallest reachable path fidelity, `1/4 + 3/4 ((4 f_min - 1) / 3)^l`.
    pub fn min_fidelity(&self) -> f64 {
        0.25 + 0.75 * self.product().support_min()
    }

    /// Which of the `l` geometric fidelity intervals contains `f` (1-based,
    /// counted down from `f = 1`).
    pub fn interval_index(&self, f: f64) -> Option<u32> {
        self.product().interval_index((4.0 * f - 1.0) / 3.0)
    }

    /// Probability that the path is entangled, `P(f > 1/2)`.
    pub fn entangled_mass(&self) -> Result<f64> {
        self.expectation_over(|_| 1.0, 0.5, 1.0, QuadratureOptions::with_tolerance(MOMENT_TOLERANCE))
    }
}

impl PathParameterPdf for PathFidelityPdf {
    fn density(&self, f: f64) -> f64 {
        4.0 / 3.0 * self.product().density((4.0 * f - 1.0) / 3.0)
    }

    fn support(&self) -> (f64, f64) {
        (self.min_fidelity(), 1.0)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut points: Vec<f64> = self.product().breakpoints().into_iter().map(|w| 0.25 + 0.75 * w).collect();
        // pin the top end exactly
        if let Some(last) = points.last_mut() {
            *last = 1.0;
        }
        points
    }
}

/// Density of the success probability of an `l`-edge path whose edge
/// probabilities are uniform on `[p_min, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathProbabilityPdf {
    length: u32,
    p_min: f64,
}

impl PathProbabilityPdf {
    pub fn new(length: u32, p_min: f64) -> Result<Self> {
        check_length(length)?;
        if !(p_min > 0.0 && p_min < 1.0) {
            return Err(Error::OutOfRange {
                what: "minimum edge probability",
                value: p_min,
                min: 0.0,
                max: 1.0,
            });
        }
        Ok(Self { length, p_min })
    }

    pub fn length(&self) -> u32 {
        self.length
    }

    pub fn p_min(&self) -> f64 {
        self.p_min
    }

    fn product(&self) -> UniformProduct {
        UniformProduct {
            factors: self.length,
            lower: self.p_min,
        }
    }

    pub fn interval_index(&self, p: f64) -> Option<u32> {
        self.product().interval_index(p)
    }
}

impl PathParameterPdf for PathProbabilityPdf {
    fn density(&self, p: f64) -> f64 {
        self.product().density(p)
    }

    fn support(&self) -> (f64, f64) {
        (self.product().support_min(), 1.0)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.product().breakpoints()
    }
}

/// Density of the path fidelity at `f`; zero outside the support.
pub fn pdf_path_fidelity(pdf: &PathFidelityPdf, f: f64) -> f64 {
    pdf.density(f)
}

/// Density of the path probability at `p`; zero outside the support.
pub fn pdf_path_probability(pdf: &PathProbabilityPdf, p: f64) -> f64 {
    pdf.density(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_is_uniform() {
        let pdf = PathFidelityPdf::new(1, 0.7).unwrap();
        for f in [0.7, 0.8, 0.95, 1.0] {
            assert!((pdf.density(f) - 1.0 / 0.3).abs() < 1e-12);
        }
        assert_eq!(pdf.density(0.69), 0.0);
        let pdf = PathProbabilityPdf::new(1, 0.5).unwrap();
        for p in [0.5, 0.6, 1.0] {
            assert!((pdf.density(p) - 2.0).abs() < 1e-12);
        }
        assert_eq!(pdf.density(0.49), 0.0);
    }

    #[test]
    fn support_and_intervals() {
        let pdf = PathFidelityPdf::new(3, 0.5).unwrap();
        let expected_min = 0.25 + 0.75 * (1.0f64 / 3.0).powi(3);
        assert!((pdf.support().0 - expected_min).abs() < 1e-15);
        assert_eq!(pdf.interval_index(0.99), Some(1));
        // second interval: between 1/4 + 3/4 (1/3)^2 and 1/4 + 3/4 (1/3)
        assert_eq!(pdf.interval_index(0.4), Some(2));
        assert_eq!(pdf.interval_index(0.3), Some(3));
        assert_eq!(pdf.interval_index(0.27), None);
        let points = pdf.breakpoints();
        assert_eq!(points.len(), 4);
        assert_eq!(*points.last().unwrap(), 1.0);
        assert!(points.windows(2).all(|w| w[0] < w[1]));

        let pdf = PathProbabilityPdf::new(4, 0.5).unwrap();
        assert_eq!(pdf.support(), (0.0625, 1.0));
        assert_eq!(pdf.interval_index(0.2), Some(3));
    }

    #[test]
    fn two_edge_density_matches_closed_form() {
        // product of two U(a, 1): q(x) = -ln x / (1 - a)^2 for x >= a,
        // (ln x - 2 ln a) / (1 - a)^2 below
        let a: f64 = 0.6;
        let pdf = PathProbabilityPdf::new(2, a).unwrap();
        let x = 0.8;
        assert!((pdf.density(x) - -x.ln() / (1.0 - a).powi(2)).abs() < 1e-13);
        let x = 0.4;
        assert!((pdf.density(x) - (x.ln() - 2.0 * a.ln()) / (1.0 - a).powi(2)).abs() < 1e-13);
    }

    #[test]
    fn log_space_branch_agrees_with_direct_sum() {
        let direct = UniformProduct { factors: 10, lower: 0.7 };
        // evaluate the same density through the log-space path by hand
        for &x in &[0.05, 0.2, 0.5, 0.9] {
            let m = direct.interval_index(x).unwrap();
            let s = -x.ln();
            let step = -0.7f64.ln();
            let log_prefactor = -10.0 * 0.3f64.ln() - ln_factorial(9);
            let by_logs: f64 = (0..m)
                .map(|n| {
                    let base = s - n as f64 * step;
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    sign * (log_prefactor + ln_binomial(10, n) + 9.0 * base.ln()).exp()
                })
                .sum();
            let value = direct.density(x);
            assert!((value - by_logs).abs() <= 1e-9 * value.max(1.0), "x = {x}");
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(PathFidelityPdf::new(0, 0.7).is_err());
        assert!(PathFidelityPdf::new(2, 0.4).is_err());
        assert!(PathFidelityPdf::new(2, 1.0).is_err());
        assert!(PathProbabilityPdf::new(2, 0.0).is_err());
    }

    #[test]
    fn cdf_is_monotone_and_bounded() {
        let pdf = PathFidelityPdf::new(4, 0.6).unwrap();
        let (lo, _) = pdf.support();
        let mut last = 0.0;
        for i in 0..=20 {
            let f = lo + (1.0 - lo) * i as f64 / 20.0;
            let c = pdf.cdf(f).unwrap();
            assert!(c >= last - 1e-12);
            last = c;
        }
        assert_eq!(pdf.cdf(1.0).unwrap(), 1.0);
        assert_eq!(pdf.cdf(0.0).unwrap(), 0.0);
    }

    #[test]
    fn entangled_mass_decreases_with_length() {
        let masses: Vec<f64> = (1..=6)
            .map(|l| PathFidelityPdf::new(l, 0.5).unwrap().entangled_mass().unwrap())
            .collect();
        assert!((masses[0] - 1.0).abs() < 1e-10);
        assert!(masses.windows(2).all(|w| w[1] < w[0]));
    }
}
