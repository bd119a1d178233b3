//! Path-length criteria deciding whether purifying two paths is worthwhile.
//!
//! For a pair whose shortest path has `l0` edges and whose second
//! edge-disjoint path has `l0 + d` edges:
//!
//! * the fidelity criterion compares the expected purified fidelity of the
//!   two paths with the mean fidelity of the shortest path alone;
//! * the availability criterion asks that the expected waiting times of the
//!   two paths differ by at most the memory coherence time `tau_m`.

use std::cell::RefCell;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::edge::UniformEdgeDistribution;
use super::moments::mean_path_fidelity;
use super::pdf::{PathFidelityPdf, PathParameterPdf};
use super::quadrature::{integrate, QuadratureOptions};
use crate::error::{Error, Result};
use crate::quantum::{purify, Fidelity};

/// Absolute tolerance of the outer fidelity-criterion integral.
pub const CRITERION_TOLERANCE: f64 = 1e-8;
const INNER_TOLERANCE: f64 = 1e-10;

/// How the path-fidelity densities are weighted on `[0.5, 1]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntangledMassMode {
    /// Integrate the raw densities over `[0.5, 1]^2`; mass below the
    /// entanglement threshold simply drops out.
    #[default]
    AsWritten,
    /// Condition both paths on being entangled by dividing by their mass
    /// above `0.5`.
    Renormalized,
}

impl std::str::FromStr for EntangledMassMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as_written" => Ok(EntangledMassMode::AsWritten),
            "renormalized" => Ok(EntangledMassMode::Renormalized),
            other => Err(Error::InvalidParameter(format!("unknown mass mode `{other}`"))),
        }
    }
}

impl std::fmt::Display for EntangledMassMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EntangledMassMode::AsWritten => "as_written",
            EntangledMassMode::Renormalized => "renormalized",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriteriaConfig {
    pub f_min: f64,
    pub p_min: f64,
    pub tau_m: f64,
    #[serde(default)]
    pub mass_mode: EntangledMassMode,
}

impl CriteriaConfig {
    /// `tau_m` defaults to `1 / p_min`, the expected attempts for the worst edge.
    pub fn new(f_min: f64, p_min: f64) -> Result<Self> {
        Self::with_tau(f_min, p_min, 1.0 / p_min)
    }

    pub fn with_tau(f_min: f64, p_min: f64, tau_m: f64) -> Result<Self> {
        UniformEdgeDistribution::fidelity(f_min)?;
        UniformEdgeDistribution::new(p_min)?;
        if !(tau_m > 0.0 && tau_m.is_finite()) {
            return Err(Error::InvalidParameter(format!("tau_m must be positive, got {tau_m}")));
        }
        Ok(Self {
            f_min,
            p_min,
            tau_m,
            mass_mode: EntangledMassMode::AsWritten,
        })
    }

    pub fn with_mass_mode(mut self, mode: EntangledMassMode) -> Self {
        self.mass_mode = mode;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityCriterion {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AvailabilityCriterion {
    pub lhs: f64,
    pub satisfied: bool,
}

fn check_l0(l0: u32) -> Result<()> {
    if l0 == 0 {
        Err(Error::InvalidParameter("l0 must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn path_length(l0: u32, d: u32) -> Result<u32> {
    l0.checked_add(d)
        .ok_or_else(|| Error::InvalidParameter(format!("l0 + d overflows for l0 = {l0}, d = {d}")))
}

pub fn criterion_fidelity(l0: u32, d: u32, f_min: f64) -> Result<FidelityCriterion> {
    criterion_fidelity_with(l0, d, f_min, EntangledMassMode::AsWritten)
}

pub fn criterion_fidelity_with(l0: u32, d: u32, f_min: f64, mode: EntangledMassMode) -> Result<FidelityCriterion> {
    check_l0(l0)?;
    let first = PathFidelityPdf::new(l0, f_min)?;
    let second = PathFidelityPdf::new(path_length(l0, d)?, f_min)?;
    let rhs = mean_path_fidelity(l0, UniformEdgeDistribution::fidelity(f_min)?)?.value();

    let mut lhs = expected_purified_fidelity(&first, &second)?;
    if mode == EntangledMassMode::Renormalized {
        let mass = first.entangled_mass()? * second.entangled_mass()?;
        if mass <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "no path-fidelity mass above 0.5 for l0 = {l0}, d = {d}, f_min = {f_min}"
            )));
        }
        lhs /= mass;
    }
    Ok(FidelityCriterion {
        lhs,
        rhs,
        satisfied: lhs >= rhs,
    })
}

/// `int int q1(f1) q2(f2) f_out(f1, f2) df1 df2` over `[0.5, 1]^2`.
fn expected_purified_fidelity(first: &PathFidelityPdf, second: &PathFidelityPdf) -> Result<f64> {
    let outer_points = first.breakpoints_within(0.5, 1.0);
    let inner_points = second.breakpoints_within(0.5, 1.0);
    if outer_points.is_empty() || inner_points.is_empty() {
        return Ok(0.0);
    }
    let inner_options = QuadratureOptions::with_tolerance(INNER_TOLERANCE);
    let inner_failure = RefCell::new(None);

    let inner = |f1: f64| -> f64 {
        let f1 = Fidelity::new(f1).expect("quadrature node inside [0.5, 1]");
        let integrand = |f2: f64| {
            let f2 = Fidelity::new(f2).expect("quadrature node inside [0.5, 1]");
            second.density(f2.value()) * purify(f1, f2).expect("fidelities in range").output_fidelity.value()
        };
        match integrate(integrand, &inner_points, inner_options) {
            Ok(r) => r.value,
            Err(e) => {
                inner_failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };

    let outer = integrate(
        |f1| first.density(f1) * inner(f1),
        &outer_points,
        QuadratureOptions::with_tolerance(CRITERION_TOLERANCE),
    );
    if let Some(e) = inner_failure.into_inner() {
        return Err(e.into());
    }
    Ok(outer?.value)
}

/// `<1/p^(l)>`, exactly `(ln(1/p_min) / (1 - p_min))^l` since the edges are
/// independent.
pub fn expected_waiting_time(l: u32, p_min: f64) -> Result<f64> {
    UniformEdgeDistribution::new(p_min)?;
    let per_edge = -p_min.ln() / (1.0 - p_min);
    Ok(per_edge.powi(i32::try_from(l).map_err(|_| Error::InvalidParameter(format!("path length {l} is too large")))?))
}

pub fn criterion_availability(l0: u32, d: u32, p_min: f64, tau_m: f64) -> Result<AvailabilityCriterion> {
    check_l0(l0)?;
    if !(tau_m > 0.0) {
        return Err(Error::InvalidParameter(format!("tau_m must be positive, got {tau_m}")));
    }
    let lhs = (expected_waiting_time(l0, p_min)? - expected_waiting_time(path_length(l0, d)?, p_min)?).abs();
    Ok(AvailabilityCriterion {
        lhs,
        satisfied: lhs <= tau_m,
    })
}

/// One criterion evaluated on every `(l0, d)` cell of a rectangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTable {
    pub l0_range: RangeInclusive<u32>,
    pub d_range: RangeInclusive<u32>,
    /// Row-major over `l0`, then `d`.
    pub entries: Vec<bool>,
    /// The criterion's left-hand side for each cell.
    pub values: Vec<f64>,
}

impl DecisionTable {
    fn index(&self, l0: u32, d: u32) -> Option<usize> {
        if !self.l0_range.contains(&l0) || !self.d_range.contains(&d) {
            return None;
        }
        let width = (self.d_range.end() - self.d_range.start() + 1) as usize;
        Some((l0 - self.l0_range.start()) as usize * width + (d - self.d_range.start()) as usize)
    }

    pub fn get(&self, l0: u32, d: u32) -> Option<bool> {
        self.index(l0, d).map(|i| self.entries[i])
    }

    pub fn value(&self, l0: u32, d: u32) -> Option<f64> {
        self.index(l0, d).map(|i| self.values[i])
    }

    /// Cell-wise AND with a table over the same ranges.
    pub fn and(&self, other: &DecisionTable) -> Result<DecisionTable> {
        if self.l0_range != other.l0_range || self.d_range != other.d_range {
            return Err(Error::InvalidParameter("decision tables cover different ranges".into()));
        }
        Ok(DecisionTable {
            l0_range: self.l0_range.clone(),
            d_range: self.d_range.clone(),
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| *a && *b).collect(),
            values: vec![f64::NAN; self.values.len()],
        })
    }

    pub fn rows(&self) -> impl Iterator<Item = (u32, &[bool])> {
        let width = (self.d_range.end() - self.d_range.start() + 1) as usize;
        self.l0_range.clone().zip(self.entries.chunks(width))
    }
}

fn check_range_nonempty(name: &str, range: &RangeInclusive<u32>) -> Result<()> {
    if range.is_empty() {
        Err(Error::InvalidParameter(format!("{name} range is empty")))
    } else {
        Ok(())
    }
}

/// Fidelity and availability tables, computed cell-parallel.
pub fn decision_tables(
    cfg: &CriteriaConfig,
    l0_range: RangeInclusive<u32>,
    d_range: RangeInclusive<u32>,
) -> Result<(DecisionTable, DecisionTable)> {
    check_range_nonempty("l0", &l0_range)?;
    check_range_nonempty("d", &d_range)?;
    check_l0(*l0_range.start())?;
    let cells: Vec<(u32, u32)> = l0_range
        .clone()
        .flat_map(|l0| d_range.clone().map(move |d| (l0, d)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(l0, d)| {
            let c1 = criterion_fidelity_with(l0, d, cfg.f_min, cfg.mass_mode)?;
            let c2 = criterion_availability(l0, d, cfg.p_min, cfg.tau_m)?;
            Ok((c1, c2))
        })
        .collect::<Result<Vec<_>>>()?;

    let table = |entries: Vec<bool>, values: Vec<f64>| DecisionTable {
        l0_range: l0_range.clone(),
        d_range: d_range.clone(),
        entries,
        values,
    };
    let fidelity = table(
        results.iter().map(|(c1, _)| c1.satisfied).collect(),
        results.iter().map(|(c1, _)| c1.lhs).collect(),
    );
    let availability = table(
        results.iter().map(|(_, c2)| c2.satisfied).collect(),
        results.iter().map(|(_, c2)| c2.lhs).collect(),
    );
    Ok((fidelity, availability))
}
