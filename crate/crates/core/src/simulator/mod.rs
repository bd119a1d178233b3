//! Monte Carlo comparison of the basic, purified and criteria-gated
//! distribution protocols on a random network.
//!
//! Every sampled source/destination pair draws its randomness from its own
//! ChaCha stream, so the outcome is independent of how trials are spread
//! over threads.

mod report;

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use report::{format_significant, ReportRow, SimulationReport};

use crate::error::{Error, Result};
use crate::network::{find_mad_paths, generate_random_network, EdgeDistribution, NetworkPath, NodeId, QuantumNetwork};
use crate::quantum::{purify, swap_chain, Fidelity, PurificationResult};
use crate::stats::{criterion_availability, criterion_fidelity_with, CriteriaConfig, EntangledMassMode};

/// How pairs without a second edge-disjoint path enter the MP-EP average.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingPathPolicy {
    /// The pair keeps its shortest-path state, so all three averages run
    /// over the same pairs.
    #[default]
    FallBackToBasic,
    /// The pair is left out of the MP-EP average.
    Exclude,
}

impl std::str::FromStr for MissingPathPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fall_back_to_basic" => Ok(MissingPathPolicy::FallBackToBasic),
            "exclude" => Ok(MissingPathPolicy::Exclude),
            other => Err(Error::InvalidParameter(format!("unknown missing-path policy `{other}`"))),
        }
    }
}

impl std::fmt::Display for MissingPathPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MissingPathPolicy::FallBackToBasic => "fall_back_to_basic",
            MissingPathPolicy::Exclude => "exclude",
        })
    }
}

/// Which criteria take part in the SAT decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriteriaToggle {
    pub fidelity: bool,
    pub availability: bool,
}

impl Default for CriteriaToggle {
    fn default() -> Self {
        Self {
            fidelity: true,
            availability: true,
        }
    }
}

impl std::str::FromStr for CriteriaToggle {
    type Err = Error;

    /// `both`, `fidelity`, `availability` or `none`.
    fn from_str(s: &str) -> Result<Self> {
        let (fidelity, availability) = match s {
            "both" => (true, true),
            "fidelity" => (true, false),
            "availability" => (false, true),
            "none" => (false, false),
            other => return Err(Error::InvalidParameter(format!("unknown criteria selection `{other}`"))),
        };
        Ok(Self { fidelity, availability })
    }
}

impl std::fmt::Display for CriteriaToggle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match (self.fidelity, self.availability) {
            (true, true) => "both",
            (true, false) => "fidelity",
            (false, true) => "availability",
            (false, false) => "none",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationConfig {
    pub nodes: u32,
    pub edges: u64,
    pub seed: u64,
    /// Edge fidelities are uniform on `[fidelity_min, 1]`.
    pub fidelity_min: f64,
    /// Edge probabilities are uniform on `[probability_min, 1]`.
    pub probability_min: f64,
    pub num_sd_samples: usize,
    pub l0_max: u32,
    /// Memory coherence time; `None` means `1 / probability_min`.
    pub tau_m: Option<f64>,
    pub criteria: CriteriaToggle,
    pub mass_mode: EntangledMassMode,
    pub missing_path: MissingPathPolicy,
    /// Draws allowed per pair before giving up on finding a connected one.
    pub max_pair_attempts: u32,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            nodes: 10_000,
            edges: 25_000,
            seed: 1,
            fidelity_min: 0.9,
            probability_min: 0.7,
            num_sd_samples: 10_000,
            l0_max: 10,
            tau_m: None,
            criteria: CriteriaToggle::default(),
            mass_mode: EntangledMassMode::AsWritten,
            missing_path: MissingPathPolicy::FallBackToBasic,
            max_pair_attempts: 1000,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::InvalidParameter("the network needs at least two nodes".into()));
        }
        if self.num_sd_samples == 0 {
            return Err(Error::InvalidParameter("num_sd_samples must be at least 1".into()));
        }
        if self.l0_max == 0 {
            return Err(Error::InvalidParameter("l0_max must be at least 1".into()));
        }
        if self.max_pair_attempts == 0 {
            return Err(Error::InvalidParameter("max_pair_attempts must be at least 1".into()));
        }
        self.fidelity_distribution().validate_fidelity()?;
        self.probability_distribution().validate_probability()?;
        self.criteria_config()?;
        Ok(())
    }

    pub fn fidelity_distribution(&self) -> EdgeDistribution {
        EdgeDistribution::uniform(self.fidelity_min)
    }

    pub fn probability_distribution(&self) -> EdgeDistribution {
        EdgeDistribution::uniform(self.probability_min)
    }

    pub fn resolved_tau_m(&self) -> f64 {
        self.tau_m.unwrap_or(1.0 / self.probability_min)
    }

    pub fn criteria_config(&self) -> Result<CriteriaConfig> {
        Ok(CriteriaConfig::with_tau(self.fidelity_min, self.probability_min, self.resolved_tau_m())?
            .with_mass_mode(self.mass_mode))
    }

    pub fn build_network(&self) -> Result<QuantumNetwork> {
        generate_random_network(
            self.nodes,
            self.edges,
            self.seed,
            self.fidelity_distribution(),
            self.probability_distribution(),
        )
    }
}

/// Outcome for one sampled source/destination pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdTrialRecord {
    pub index: usize,
    pub source: NodeId,
    pub destination: NodeId,
    pub l0: u32,
    /// Extra length of the second path; absent without a second path.
    pub d: Option<u32>,
    pub basic_fidelity: Fidelity,
    pub second_path_fidelity: Option<Fidelity>,
    pub mpep_fidelity: Option<Fidelity>,
    /// Heralding probability of the purification round; it does not weight
    /// the fidelity averages.
    pub mpep_success_probability: Option<f64>,
    pub sat: bool,
    pub chosen_fidelity: Fidelity,
    /// Disconnected draws discarded before this pair was accepted.
    pub rejected_draws: u32,
}

impl SdTrialRecord {
    /// Whether purification beat both inputs in this realization.
    pub fn purification_was_useful(&self) -> Option<bool> {
        let f2 = self.second_path_fidelity?;
        let out = self.mpep_fidelity?;
        Some(out.value() >= self.basic_fidelity.value().max(f2.value()))
    }
}

/// Draws one realization of every edge fidelity along `path` and swaps.
pub fn sample_path_fidelity<R: Rng + ?Sized>(
    path: &NetworkPath,
    fidelity: &EdgeDistribution,
    rng: &mut R,
) -> Result<Fidelity> {
    let links = path
        .edge_indices()
        .iter()
        .map(|_| Fidelity::new(fidelity.sample(rng)))
        .collect::<Result<Vec<_>>>()?;
    swap_chain(&links)
}

/// Basic protocol along the shortest path: `(l0, fidelity)`, or `None` when
/// the nodes are disconnected.
pub fn run_basic_trial<R: Rng + ?Sized>(
    net: &QuantumNetwork,
    s: NodeId,
    dst: NodeId,
    fidelity: &EdgeDistribution,
    rng: &mut R,
) -> Result<Option<(u32, Fidelity)>> {
    let paths = find_mad_paths(net, s, dst, 1)?;
    let Some(path) = paths.paths.first() else {
        return Ok(None);
    };
    Ok(Some((path.len() as u32, sample_path_fidelity(path, fidelity, rng)?)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpepTrial {
    pub l0: u32,
    pub d: u32,
    pub first_path_fidelity: Fidelity,
    pub second_path_fidelity: Fidelity,
    pub purification: PurificationResult,
}

/// Purifies the states of the first two edge-disjoint paths; `None` when
/// there is no second path.
pub fn run_mpep_trial<R: Rng + ?Sized>(
    net: &QuantumNetwork,
    s: NodeId,
    dst: NodeId,
    fidelity: &EdgeDistribution,
    rng: &mut R,
) -> Result<Option<MpepTrial>> {
    let paths = find_mad_paths(net, s, dst, 2)?;
    let [first, second] = paths.paths.as_slice() else {
        return Ok(None);
    };
    let f1 = sample_path_fidelity(first, fidelity, rng)?;
    let f2 = sample_path_fidelity(second, fidelity, rng)?;
    Ok(Some(MpepTrial {
        l0: first.len() as u32,
        d: (second.len() - first.len()) as u32,
        first_path_fidelity: f1,
        second_path_fidelity: f2,
        purification: purify(f1, f2)?,
    }))
}

/// Both criteria evaluated at one `(l0, d)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatCell {
    pub l0: u32,
    pub d: u32,
    pub fidelity_lhs: f64,
    pub fidelity_rhs: f64,
    pub fidelity: bool,
    pub availability_lhs: f64,
    pub availability: bool,
    pub sat: bool,
}

/// SAT: the AND of the enabled criteria at `(l0, d)`.
pub fn evaluate_sat(l0: u32, d: u32, cfg: &CriteriaConfig, toggle: CriteriaToggle) -> Result<SatCell> {
    let c1 = criterion_fidelity_with(l0, d, cfg.f_min, cfg.mass_mode)?;
    let c2 = criterion_availability(l0, d, cfg.p_min, cfg.tau_m)?;
    Ok(SatCell {
        l0,
        d,
        fidelity_lhs: c1.lhs,
        fidelity_rhs: c1.rhs,
        fidelity: c1.satisfied,
        availability_lhs: c2.lhs,
        availability: c2.satisfied,
        sat: (!toggle.fidelity || c1.satisfied) && (!toggle.availability || c2.satisfied),
    })
}

/// SAT values for a set of `(l0, d)` cells, evaluated once and in parallel.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SatTable {
    cells: BTreeMap<(u32, u32), SatCell>,
}

impl SatTable {
    pub fn build(
        cfg: &CriteriaConfig,
        toggle: CriteriaToggle,
        cells: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self> {
        let keys: BTreeSet<(u32, u32)> = cells.into_iter().collect();
        let keys: Vec<(u32, u32)> = keys.into_iter().collect();
        let evaluated = keys
            .par_iter()
            .map(|&(l0, d)| evaluate_sat(l0, d, cfg, toggle))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            cells: keys.into_iter().zip(evaluated).collect(),
        })
    }

    pub fn get(&self, l0: u32, d: u32) -> Option<&SatCell> {
        self.cells.get(&(l0, d))
    }

    pub fn cells(&self) -> impl Iterator<Item = &SatCell> {
        self.cells.values()
    }
}

struct PendingTrial {
    index: usize,
    source: NodeId,
    destination: NodeId,
    l0: u32,
    d: Option<u32>,
    basic: Fidelity,
    second: Option<Fidelity>,
    purification: Option<PurificationResult>,
    rejected_draws: u32,
}

fn pair_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // stream 0 belongs to network generation
    rng.set_stream(index as u64 + 1);
    rng
}

/// Samples pairs until one is connected; the shortest path realization is
/// shared by the basic protocol and as the first input to purification.
fn run_pair(net: &QuantumNetwork, cfg: &SimulationConfig, index: usize) -> Result<Option<PendingTrial>> {
    let mut rng = pair_rng(cfg.seed, index);
    let n = net.node_count();
    let fidelity = cfg.fidelity_distribution();
    for attempt in 0..cfg.max_pair_attempts {
        let source = rng.gen_range(0..n);
        let mut destination = rng.gen_range(0..n - 1);
        if destination >= source {
            destination += 1;
        }
        let paths = find_mad_paths(net, source, destination, 2)?;
        let Some(first) = paths.paths.first() else {
            continue;
        };
        let basic = sample_path_fidelity(first, &fidelity, &mut rng)?;
        let l0 = first.len() as u32;
        let (d, second, purification) = match paths.paths.get(1) {
            Some(path) => {
                let f2 = sample_path_fidelity(path, &fidelity, &mut rng)?;
                (Some((path.len() - first.len()) as u32), Some(f2), Some(purify(basic, f2)?))
            }
            None => (None, None, None),
        };
        return Ok(Some(PendingTrial {
            index,
            source,
            destination,
            l0,
            d,
            basic,
            second,
            purification,
            rejected_draws: attempt,
        }));
    }
    Ok(None)
}

/// Runs every trial and returns the per-pair records next to the report.
pub fn run_campaign_on_network(
    net: &QuantumNetwork,
    cfg: &SimulationConfig,
) -> Result<(SimulationReport, Vec<SdTrialRecord>)> {
    cfg.validate()?;
    if net.node_count() < 2 {
        return Err(Error::InvalidParameter("the network needs at least two nodes".into()));
    }
    let pending = (0..cfg.num_sd_samples)
        .into_par_iter()
        .map(|i| run_pair(net, cfg, i))
        .collect::<Result<Vec<_>>>()?;

    let abandoned = pending.iter().filter(|p| p.is_none()).count() as u64;
    let pending: Vec<PendingTrial> = pending.into_iter().flatten().collect();
    let rejected: u64 = pending.iter().map(|p| u64::from(p.rejected_draws)).sum();

    let sat_table = SatTable::build(
        &cfg.criteria_config()?,
        cfg.criteria,
        pending.iter().filter_map(|p| p.d.map(|d| (p.l0, d))),
    )?;

    let records: Vec<SdTrialRecord> = pending
        .into_iter()
        .map(|p| {
            let sat = p
                .d
                .and_then(|d| sat_table.get(p.l0, d))
                .map(|cell| cell.sat)
                .unwrap_or(false);
            let mpep = p.purification.map(|r| r.output_fidelity);
            SdTrialRecord {
                index: p.index,
                source: p.source,
                destination: p.destination,
                l0: p.l0,
                d: p.d,
                basic_fidelity: p.basic,
                second_path_fidelity: p.second,
                mpep_fidelity: mpep,
                mpep_success_probability: p.purification.map(|r| r.success_probability),
                sat,
                chosen_fidelity: match (sat, mpep) {
                    (true, Some(f)) => f,
                    _ => p.basic,
                },
                rejected_draws: p.rejected_draws,
            }
        })
        .collect();

    let report = SimulationReport::aggregate(cfg.clone(), &records, rejected + abandoned, abandoned, &sat_table);
    Ok((report, records))
}

pub fn run_campaign_with_records(cfg: &SimulationConfig) -> Result<(SimulationReport, Vec<SdTrialRecord>)> {
    cfg.validate()?;
    let net = cfg.build_network()?;
    run_campaign_on_network(&net, cfg)
}

pub fn run_campaign(cfg: &SimulationConfig) -> Result<SimulationReport> {
    run_campaign_with_records(cfg).map(|(report, _)| report)
}
