//! C ABI over `mpep-core`.
//!
//! Every function returns an [`MpepStatus`]; results come back through out
//! pointers. After a non-OK status, `mpep_last_error_message` describes the
//! failure on the calling thread. Networks and reports are opaque handles
//! released with their `_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mpep_core::network::{
    find_mad_paths, generate_random_network, read_edge_list, shortest_graph_path, write_edge_list, EdgeDistribution,
    QuantumNetwork,
};
use mpep_core::quantum::{purify, swap_pair, useful_window, Fidelity};
use mpep_core::simulator::{
    run_campaign, run_campaign_on_network, CriteriaToggle, MissingPathPolicy, SimulationConfig, SimulationReport,
};
use mpep_core::stats::{
    criterion_availability, criterion_fidelity_with, mean_path_fidelity, mean_path_probability, pdf_path_fidelity,
    pdf_path_probability, std_path_fidelity, std_path_probability, EdgeMoments, EntangledMassMode, PathFidelityPdf,
    PathProbabilityPdf,
};
use mpep_core::Error;

/// Outcome of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpepStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    Numerical = 3,
    Io = 4,
    NotFound = 5,
    Panic = 6,
}

/// How the entangled mass enters the fidelity criterion.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpepMassMode {
    AsWritten = 0,
    Renormalized = 1,
}

/// How pairs without a second path enter the purified mean.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpepMissingPath {
    FallBackToBasic = 0,
    Exclude = 1,
}

/// Campaign parameters. Fill with `mpep_simulation_config_default` first.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MpepSimulationConfig {
    pub nodes: u32,
    pub edges: u64,
    pub seed: u64,
    pub fidelity_min: f64,
    pub probability_min: f64,
    pub num_sd_samples: usize,
    pub l0_max: u32,
    /// Memory coherence time; any value `<= 0` means `1 / probability_min`.
    pub tau_m: f64,
    pub use_fidelity_criterion: bool,
    pub use_availability_criterion: bool,
    pub mass_mode: MpepMassMode,
    pub missing_path: MpepMissingPath,
    pub max_pair_attempts: u32,
}

/// One aggregated row; absent statistics are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MpepReportRow {
    pub l0: u32,
    pub n: usize,
    pub basic_mean: f64,
    pub basic_std: f64,
    pub mpep_mean: f64,
    pub mpep_std: f64,
    pub mpep_n: usize,
    pub chosen_mean: f64,
    pub chosen_std: f64,
    pub skipped_pairs: u64,
}

/// Opaque network handle.
pub struct MpepNetwork(QuantumNetwork);

/// Opaque simulation report handle.
pub struct MpepReport(SimulationReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> MpepStatus {
    match err {
        Error::Io(_) => MpepStatus::Io,
        Error::UnknownNode { .. } => MpepStatus::NotFound,
        e if e.is_numerical() => MpepStatus::Numerical,
        _ => MpepStatus::InvalidArgument,
    }
}

struct Failure(MpepStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(MpepStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `body`, converting errors and panics to a status.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> MpepStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MpepStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {message}"));
            MpepStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn path_arg(p: *const c_char) -> Result<String, Failure> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Failure(MpepStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

fn io_failure(path: &str, e: std::io::Error) -> Failure {
    Failure(MpepStatus::Io, format!("{path}: {e}"))
}

/// Copies the last error message of this thread into `buf` (NUL terminated,
/// truncated to `len`). Returns the full message length plus one, or 0 when
/// there is no pending error.
#[no_mangle]
pub unsafe extern "C" fn mpep_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes_with_nul();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len);
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n - 1) = 0;
            }
            bytes.len()
        }
    })
}

/// Fidelity after swapping two isotropic links.
#[no_mangle]
pub unsafe extern "C" fn mpep_swap(f1: f64, f2: f64, out_fidelity: *mut f64) -> MpepStatus {
    guard(|| {
        let o = out(out_fidelity, "out_fidelity")?;
        *o = swap_pair(Fidelity::new(f1)?, Fidelity::new(f2)?)?.value();
        Ok(())
    })
}

/// Output fidelity and success probability of one purification round.
#[no_mangle]
pub unsafe extern "C" fn mpep_purify(
    f1: f64,
    f2: f64,
    out_fidelity: *mut f64,
    out_success_probability: *mut f64,
) -> MpepStatus {
    guard(|| {
        let of = out(out_fidelity, "out_fidelity")?;
        let op = out(out_success_probability, "out_success_probability")?;
        let r = purify(Fidelity::new(f1)?, Fidelity::new(f2)?)?;
        *of = r.output_fidelity.value();
        *op = r.success_probability;
        Ok(())
    })
}

/// Partner fidelities `[lower, upper]` for which purifying with `f1` is useful.
#[no_mangle]
pub unsafe extern "C" fn mpep_useful_window(f1: f64, out_lower: *mut f64, out_upper: *mut f64) -> MpepStatus {
    guard(|| {
        let lo = out(out_lower, "out_lower")?;
        let hi = out(out_upper, "out_upper")?;
        let w = useful_window(Fidelity::new(f1)?)?;
        *lo = w.lower.value();
        *hi = w.upper.value();
        Ok(())
    })
}

/// Density of the path fidelity of `length` uniform `[f_min, 1]` links at `f`.
#[no_mangle]
pub unsafe extern "C" fn mpep_pdf_path_fidelity(length: u32, f_min: f64, f: f64, out_density: *mut f64) -> MpepStatus {
    guard(|| {
        let o = out(out_density, "out_density")?;
        *o = pdf_path_fidelity(&PathFidelityPdf::new(length, f_min)?, f);
        Ok(())
    })
}

/// Density of the path probability of `length` uniform `[p_min, 1]` links at `p`.
#[no_mangle]
pub unsafe extern "C" fn mpep_pdf_path_probability(
    length: u32,
    p_min: f64,
    p: f64,
    out_density: *mut f64,
) -> MpepStatus {
    guard(|| {
        let o = out(out_density, "out_density")?;
        *o = pdf_path_probability(&PathProbabilityPdf::new(length, p_min)?, p);
        Ok(())
    })
}

/// Mean and standard deviation of the path fidelity for edges with the given moments.
#[no_mangle]
pub unsafe extern "C" fn mpep_path_fidelity_moments(
    length: u32,
    edge_mean: f64,
    edge_std: f64,
    out_mean: *mut f64,
    out_std: *mut f64,
) -> MpepStatus {
    guard(|| {
        let om = out(out_mean, "out_mean")?;
        let os = out(out_std, "out_std")?;
        let edge = EdgeMoments::new(edge_mean, edge_std)?;
        *om = mean_path_fidelity(length, edge)?.value();
        *os = std_path_fidelity(length, edge)?;
        Ok(())
    })
}

/// Mean and standard deviation of the path probability for edges with the given moments.
#[no_mangle]
pub unsafe extern "C" fn mpep_path_probability_moments(
    length: u32,
    edge_mean: f64,
    edge_std: f64,
    out_mean: *mut f64,
    out_std: *mut f64,
) -> MpepStatus {
    guard(|| {
        let om = out(out_mean, "out_mean")?;
        let os = out(out_std, "out_std")?;
        let edge = EdgeMoments::new(edge_mean, edge_std)?;
        *om = mean_path_probability(length, edge)?;
        *os = std_path_probability(length, edge)?;
        Ok(())
    })
}

/// Fidelity criterion for shortest length `l0` and extra length `d`.
#[no_mangle]
pub unsafe extern "C" fn mpep_criterion_fidelity(
    l0: u32,
    d: u32,
    f_min: f64,
    mass_mode: MpepMassMode,
    out_lhs: *mut f64,
    out_rhs: *mut f64,
    out_satisfied: *mut bool,
) -> MpepStatus {
    guard(|| {
        let lhs = out(out_lhs, "out_lhs")?;
        let rhs = out(out_rhs, "out_rhs")?;
        let sat = out(out_satisfied, "out_satisfied")?;
        let c = criterion_fidelity_with(l0, d, f_min, mass_mode.into())?;
        *lhs = c.lhs;
        *rhs = c.rhs;
        *sat = c.satisfied;
        Ok(())
    })
}

/// Availability criterion; a `tau_m <= 0` means `1 / p_min`.
#[no_mangle]
pub unsafe extern "C" fn mpep_criterion_availability(
    l0: u32,
    d: u32,
    p_min: f64,
    tau_m: f64,
    out_lhs: *mut f64,
    out_satisfied: *mut bool,
) -> MpepStatus {
    guard(|| {
        let lhs = out(out_lhs, "out_lhs")?;
        let sat = out(out_satisfied, "out_satisfied")?;
        let tau = if tau_m > 0.0 { tau_m } else { 1.0 / p_min };
        let c = criterion_availability(l0, d, p_min, tau)?;
        *lhs = c.lhs;
        *sat = c.satisfied;
        Ok(())
    })
}

impl From<MpepMassMode> for EntangledMassMode {
    fn from(m: MpepMassMode) -> Self {
        match m {
            MpepMassMode::AsWritten => EntangledMassMode::AsWritten,
            MpepMassMode::Renormalized => EntangledMassMode::Renormalized,
        }
    }
}

impl From<EntangledMassMode> for MpepMassMode {
    fn from(m: EntangledMassMode) -> Self {
        match m {
            EntangledMassMode::AsWritten => MpepMassMode::AsWritten,
            EntangledMassMode::Renormalized => MpepMassMode::Renormalized,
        }
    }
}

/// Random G(n, m) network with uniform `[fidelity_min, 1]` and
/// `[probability_min, 1]` edge parameters.
#[no_mangle]
pub unsafe extern "C" fn mpep_network_generate(
    nodes: u32,
    edges: u64,
    seed: u64,
    fidelity_min: f64,
    probability_min: f64,
    out_network: *mut *mut MpepNetwork,
) -> MpepStatus {
    guard(|| {
        let o = out(out_network, "out_network")?;
        let net = generate_random_network(
            nodes,
            edges,
            seed,
            EdgeDistribution::uniform(fidelity_min),
            EdgeDistribution::uniform(probability_min),
        )?;
        *o = Box::into_raw(Box::new(MpepNetwork(net)));
        Ok(())
    })
}

/// Reads a network from an edge-list file.
#[no_mangle]
pub unsafe extern "C" fn mpep_network_read(path: *const c_char, out_network: *mut *mut MpepNetwork) -> MpepStatus {
    guard(|| {
        let o = out(out_network, "out_network")?;
        let path = path_arg(path)?;
        let file = File::open(&path).map_err(|e| io_failure(&path, e))?;
        let net = read_edge_list(BufReader::new(file))?;
        *o = Box::into_raw(Box::new(MpepNetwork(net)));
        Ok(())
    })
}

/// Writes a network as an edge-list file.
#[no_mangle]
pub unsafe extern "C" fn mpep_network_write(network: *const MpepNetwork, path: *const c_char) -> MpepStatus {
    guard(|| {
        let net = network.as_ref().ok_or_else(|| null("network"))?;
        let path = path_arg(path)?;
        let file = File::create(&path).map_err(|e| io_failure(&path, e))?;
        write_edge_list(&net.0, BufWriter::new(file))?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mpep_network_node_count(network: *const MpepNetwork, out_count: *mut u32) -> MpepStatus {
    guard(|| {
        let net = network.as_ref().ok_or_else(|| null("network"))?;
        *out(out_count, "out_count")? = net.0.node_count();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mpep_network_edge_count(network: *const MpepNetwork, out_count: *mut usize) -> MpepStatus {
    guard(|| {
        let net = network.as_ref().ok_or_else(|| null("network"))?;
        *out(out_count, "out_count")? = net.0.edge_count();
        Ok(())
    })
}

/// Hop count of the shortest path; `NOT_FOUND` when the nodes are disconnected.
#[no_mangle]
pub unsafe extern "C" fn mpep_network_shortest_path_length(
    network: *const MpepNetwork,
    source: u32,
    destination: u32,
    out_length: *mut usize,
) -> MpepStatus {
    guard(|| {
        let net = network.as_ref().ok_or_else(|| null("network"))?;
        let o = out(out_length, "out_length")?;
        match shortest_graph_path(&net.0, source, destination)? {
            Some(p) => {
                *o = p.len();
                Ok(())
            }
            None => Err(Failure(
                MpepStatus::NotFound,
                format!("no path between {source} and {destination}"),
            )),
        }
    })
}

/// Lengths of up to `k` edge-disjoint paths, shortest first. Writes at most
/// `capacity` lengths and the number found to `out_count`.
#[no_mangle]
pub unsafe extern "C" fn mpep_network_mad_path_lengths(
    network: *const MpepNetwork,
    source: u32,
    destination: u32,
    k: usize,
    out_lengths: *mut usize,
    capacity: usize,
    out_count: *mut usize,
) -> MpepStatus {
    guard(|| {
        let net = network.as_ref().ok_or_else(|| null("network"))?;
        let count = out(out_count, "out_count")?;
        if out_lengths.is_null() && capacity > 0 {
            return Err(null("out_lengths"));
        }
        let lengths = find_mad_paths(&net.0, source, destination, k)?.lengths();
        for (i, &l) in lengths.iter().take(capacity).enumerate() {
            *out_lengths.add(i) = l;
        }
        *count = lengths.len();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mpep_network_free(network: *mut MpepNetwork) {
    if !network.is_null() {
        drop(Box::from_raw(network));
    }
}

/// Writes the default campaign parameters.
#[no_mangle]
pub unsafe extern "C" fn mpep_simulation_config_default(out_config: *mut MpepSimulationConfig) -> MpepStatus {
    guard(|| {
        let d = SimulationConfig::default();
        *out(out_config, "out_config")? = MpepSimulationConfig {
            nodes: d.nodes,
            edges: d.edges,
            seed: d.seed,
            fidelity_min: d.fidelity_min,
            probability_min: d.probability_min,
            num_sd_samples: d.num_sd_samples,
            l0_max: d.l0_max,
            tau_m: d.tau_m.unwrap_or(0.0),
            use_fidelity_criterion: d.criteria.fidelity,
            use_availability_criterion: d.criteria.availability,
            mass_mode: d.mass_mode.into(),
            missing_path: match d.missing_path {
                MissingPathPolicy::FallBackToBasic => MpepMissingPath::FallBackToBasic,
                MissingPathPolicy::Exclude => MpepMissingPath::Exclude,
            },
            max_pair_attempts: d.max_pair_attempts,
        };
        Ok(())
    })
}

impl From<&MpepSimulationConfig> for SimulationConfig {
    fn from(c: &MpepSimulationConfig) -> Self {
        SimulationConfig {
            nodes: c.nodes,
            edges: c.edges,
            seed: c.seed,
            fidelity_min: c.fidelity_min,
            probability_min: c.probability_min,
            num_sd_samples: c.num_sd_samples,
            l0_max: c.l0_max,
            tau_m: (c.tau_m > 0.0).then_some(c.tau_m),
            criteria: CriteriaToggle {
                fidelity: c.use_fidelity_criterion,
                availability: c.use_availability_criterion,
            },
            mass_mode: c.mass_mode.into(),
            missing_path: match c.missing_path {
                MpepMissingPath::FallBackToBasic => MissingPathPolicy::FallBackToBasic,
                MpepMissingPath::Exclude => MissingPathPolicy::Exclude,
            },
            max_pair_attempts: c.max_pair_attempts,
        }
    }
}

/// Runs a campaign on a freshly generated network.
#[no_mangle]
pub unsafe extern "C" fn mpep_simulate(
    config: *const MpepSimulationConfig,
    out_report: *mut *mut MpepReport,
) -> MpepStatus {
    guard(|| {
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        let o = out(out_report, "out_report")?;
        let report = run_campaign(&cfg.into())?;
        *o = Box::into_raw(Box::new(MpepReport(report)));
        Ok(())
    })
}

/// Runs a campaign on an existing network. Path fidelities are still drawn
/// from the distribution in `config`; its `nodes` and `edges` are unused.
#[no_mangle]
pub unsafe extern "C" fn mpep_simulate_on_network(
    network: *const MpepNetwork,
    config: *const MpepSimulationConfig,
    out_report: *mut *mut MpepReport,
) -> MpepStatus {
    guard(|| {
        let net = network.as_ref().ok_or_else(|| null("network"))?;
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        let o = out(out_report, "out_report")?;
        let (report, _) = run_campaign_on_network(&net.0, &cfg.into())?;
        *o = Box::into_raw(Box::new(MpepReport(report)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mpep_report_row_count(report: *const MpepReport, out_count: *mut usize) -> MpepStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        *out(out_count, "out_count")? = r.0.rows.len();
        Ok(())
    })
}

/// Row `index` in ascending `l0` order.
#[no_mangle]
pub unsafe extern "C" fn mpep_report_row(
    report: *const MpepReport,
    index: usize,
    out_row: *mut MpepReportRow,
) -> MpepStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let o = out(out_row, "out_row")?;
        let row = r.0.rows.get(index).ok_or_else(|| {
            Failure(
                MpepStatus::NotFound,
                format!("row {index} out of {} rows", r.0.rows.len()),
            )
        })?;
        *o = MpepReportRow {
            l0: row.l0,
            n: row.n,
            basic_mean: row.basic_mean,
            basic_std: row.basic_std.unwrap_or(f64::NAN),
            mpep_mean: row.mpep_mean.unwrap_or(f64::NAN),
            mpep_std: row.mpep_std.unwrap_or(f64::NAN),
            mpep_n: row.mpep_n,
            chosen_mean: row.chosen_mean,
            chosen_std: row.chosen_std.unwrap_or(f64::NAN),
            skipped_pairs: row.skipped_pairs,
        };
        Ok(())
    })
}

/// The report as CSV; release the string with `mpep_string_free`.
#[no_mangle]
pub unsafe extern "C" fn mpep_report_to_csv(report: *const MpepReport, out_csv: *mut *mut c_char) -> MpepStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let o = out(out_csv, "out_csv")?;
        *o = CString::new(r.0.to_csv()).expect("csv has no NUL").into_raw();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mpep_report_free(report: *mut MpepReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

#[no_mangle]
pub unsafe extern "C" fn mpep_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
