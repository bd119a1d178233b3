use mpep_core::network::find_mad_paths;
use mpep_core::simulator::{run_campaign, run_campaign_with_records, MissingPathPolicy, SimulationConfig};
use mpep_core::stats::{mean_path_fidelity, UniformEdgeDistribution};

fn moderate() -> SimulationConfig {
    SimulationConfig {
        nodes: 2_000,
        edges: 5_000,
        num_sd_samples: 4_000,
        seed: 7,
        ..SimulationConfig::default()
    }
}

#[test]
fn basic_means_agree_with_the_closed_form() {
    let cfg = moderate();
    let report = run_campaign(&cfg).unwrap();
    let edge = UniformEdgeDistribution::fidelity(cfg.fidelity_min).unwrap();
    let mut checked = 0;
    for row in report.rows.iter().filter(|r| r.n >= 30) {
        let expected = mean_path_fidelity(row.l0, edge).unwrap().value();
        let se = row.basic_std.unwrap() / (row.n as f64).sqrt();
        assert!(
            (row.basic_mean - expected).abs() <= 3.0 * se,
            "l0 = {}: {} vs {expected} (se {se})",
            row.l0,
            row.basic_mean
        );
        checked += 1;
    }
    assert!(checked >= 5);
}

#[test]
fn gated_trials_purify_usefully_more_often() {
    let (_, records) = run_campaign_with_records(&moderate()).unwrap();
    let fraction = |sat: bool| {
        let outcomes: Vec<bool> = records
            .iter()
            .filter(|r| r.sat == sat)
            .filter_map(|r| r.purification_was_useful())
            .collect();
        assert!(!outcomes.is_empty());
        outcomes.iter().filter(|&&u| u).count() as f64 / outcomes.len() as f64
    };
    let (with, without) = (fraction(true), fraction(false));
    assert!(with > without, "sat = 1: {with}, sat = 0: {without}");
}

#[test]
fn recorded_offsets_come_from_the_greedy_second_path() {
    let cfg = SimulationConfig {
        num_sd_samples: 500,
        ..moderate()
    };
    let net = cfg.build_network().unwrap();
    let (_, records) = run_campaign_with_records(&cfg).unwrap();
    for r in &records {
        let set = find_mad_paths(&net, r.source, r.destination, 2).unwrap();
        let lengths = set.lengths();
        assert_eq!(lengths[0] as u32, r.l0);
        match r.d {
            Some(d) => assert_eq!(lengths[1] as u32, r.l0 + d),
            None => assert_eq!(lengths.len(), 1),
        }
        assert_eq!(r.mpep_fidelity.is_some(), r.d.is_some());
        let expected = if r.sat { r.mpep_fidelity.unwrap() } else { r.basic_fidelity };
        assert_eq!(r.chosen_fidelity, expected);
    }
}

#[test]
fn report_counts_cover_the_retained_trials() {
    let cfg = moderate();
    let (report, records) = run_campaign_with_records(&cfg).unwrap();
    let within: usize = records.iter().filter(|r| r.l0 <= cfg.l0_max).count();
    assert_eq!(report.rows.iter().map(|r| r.n).sum::<usize>(), within);
    assert_eq!(report.trials, records.len());
    for row in &report.rows {
        let with_second = records.iter().filter(|r| r.l0 == row.l0 && r.d.is_some()).count();
        assert_eq!(row.mpep_n, with_second);
    }
}

#[test]
fn missing_path_policy_only_changes_the_purified_column() {
    let fall_back = run_campaign(&moderate()).unwrap();
    let exclude = run_campaign(&SimulationConfig {
        missing_path: MissingPathPolicy::Exclude,
        ..moderate()
    })
    .unwrap();
    for (a, b) in fall_back.rows.iter().zip(&exclude.rows) {
        assert_eq!((a.n, a.basic_mean, a.chosen_mean, a.mpep_n), (b.n, b.basic_mean, b.chosen_mean, b.mpep_n));
        if a.mpep_n == a.n {
            assert_eq!(a.mpep_mean, b.mpep_mean);
        }
    }
}

#[test]
fn runs_are_bit_identical_across_thread_counts() {
    let cfg = SimulationConfig {
        num_sd_samples: 1_500,
        ..moderate()
    };
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let a = single.install(|| run_campaign(&cfg)).unwrap();
    let b = run_campaign(&cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn a_single_pair_gives_a_single_row() {
    let report = run_campaign(&SimulationConfig {
        num_sd_samples: 1,
        ..moderate()
    })
    .unwrap();
    assert!(report.rows.len() <= 1);
    assert_eq!(report.trials, 1);
    if let Some(row) = report.rows.first() {
        assert_eq!(row.n, 1);
        assert_eq!(row.basic_std, None);
    }
    assert!(run_campaign(&SimulationConfig {
        num_sd_samples: 0,
        ..moderate()
    })
    .is_err());
}
