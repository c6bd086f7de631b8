//! Acceptance suite. Each test covers one release criterion and prints a
//! PASS line with its measured numbers (run with `--nocapture` to see them).

mod common;

use std::time::Instant;

use chrono::NaiveDate;
use common::*;
use gridarb::campaign::{
    self, CampaignConfig, DeviceConfig, LocationConfig, RegulationConfig, SocPolicy, YoyValue,
};
use gridarb::device::{preset, Technology};
use gridarb::ingest::{self, gen_synthetic, CsvSchema, PriceStore, Suppression, SyntheticConfig};
use gridarb::lp::{solve, verify_certificate, LpStatus, CERT_TOL};
use gridarb::market::{
    solve_horizon, HorizonProblem, Mode, RegulationParams, TerminalPolicy, SCHEDULE_TOL,
};

/// Criterion 1: on 1,000 randomized bounded instances every optimal solve
/// carries a passing certificate with a scaled duality gap within 1e-7, and
/// every instance with at most four variables matches exhaustive vertex
/// enumeration within 1e-8. The batch must finish within 60 seconds.
#[test]
fn criterion_1_lp_correctness() {
    let started = Instant::now();
    let mut rng = seeded(0xacce_0001);
    let (mut optimal, mut infeasible, mut tiny_checked) = (0usize, 0usize, 0usize);
    let mut worst_gap = 0.0f64;
    for i in 0..1000 {
        let p = random_lp(&mut rng, 100);
        let s = solve(&p).unwrap_or_else(|e| panic!("instance {i}: {e}\n{}", p.dump()));
        match s.status {
            LpStatus::Optimal => {
                optimal += 1;
                let report = verify_certificate(&p, &s).unwrap();
                assert!(report.pass, "instance {i}: {report:?}\n{}", p.dump());
                let scaled_gap = report.duality_gap / (1.0 + s.objective_value.abs());
                assert!(
                    scaled_gap <= CERT_TOL,
                    "instance {i}: scaled gap {scaled_gap}"
                );
                worst_gap = worst_gap.max(scaled_gap);
            }
            LpStatus::Infeasible => infeasible += 1,
            LpStatus::Unbounded => panic!("instance {i}: unbounded with finite boxes"),
        }
        if p.num_vars() <= 4 {
            match (s.status, vertex_enumeration_best(&p)) {
                (LpStatus::Optimal, Some(best)) => {
                    assert!(
                        (s.objective_value - best).abs() <= 1e-8,
                        "instance {i}: {} vs oracle {best}",
                        s.objective_value
                    );
                    tiny_checked += 1;
                }
                (LpStatus::Infeasible, None) => {}
                (status, oracle) => {
                    panic!("instance {i}: solver {status:?} but oracle {oracle:?}")
                }
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    assert!(optimal >= 500, "only {optimal} optimal instances");
    assert!(tiny_checked >= 100, "only {tiny_checked} oracle checks");
    println!(
        "criterion 1 (LP correctness): PASS ({optimal} optimal / {infeasible} infeasible, \
         {tiny_checked} oracle-checked, worst scaled gap {worst_gap:.2e}, {elapsed:.2?})"
    );
}

/// Criterion 2: the six reference model values reproduce exactly (within
/// 1e-8), and each one is confirmed by an independent grid-search oracle in
/// increments of one twentieth of the power cap.
#[test]
fn criterion_2_model_fidelity() {
    struct Case {
        name: &'static str,
        hp: HorizonProblem,
        expected: f64,
    }
    let start = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
    let mut cases = Vec::new();

    // Arbitrage: price spread with a lossless unit device.
    let hp = HorizonProblem::new(
        unit_device(),
        hourly_series(start, vec![10.0, 20.0], None),
        Mode::Arbitrage,
    );
    cases.push(Case {
        name: "arbitrage spread",
        hp,
        expected: 10.0,
    });

    // Arbitrage: flat prices, lossy device, idling is optimal.
    let mut device = unit_device();
    device.round_trip_eff = 0.9;
    let hp = HorizonProblem::new(
        device,
        hourly_series(start, vec![15.0, 15.0], None),
        Mode::Arbitrage,
    );
    cases.push(Case {
        name: "arbitrage idle",
        hp,
        expected: 0.0,
    });

    // Arbitrage: lossy single cycle, 0.9 * 20 - 10.
    let mut device = unit_device();
    device.round_trip_eff = 0.9;
    let hp = HorizonProblem::new(
        device,
        hourly_series(start, vec![10.0, 20.0], None),
        Mode::Arbitrage,
    );
    cases.push(Case {
        name: "arbitrage lossy cycle",
        hp,
        expected: 8.0,
    });

    // Joint: symmetric deployment cancels in the store; payoff scales with
    // the penalty-adjusted capacity coefficient 1 - 1.1 (1 - score).
    for (score, expected) in [(1.0, 10.0), (0.5, 4.5), (0.0, 0.0)] {
        let mut device = unit_device();
        device.initial_soc_mwh = 0.5;
        let mut hp = HorizonProblem::new(
            device,
            hourly_series(start, vec![0.0], Some(vec![10.0])),
            Mode::Joint,
        );
        hp.regulation = Some(RegulationParams::uniform(1, 0.2, 0.2, score));
        cases.push(Case {
            name: match score as u32 {
                1 => "joint full score",
                0 => "joint zero score",
                _ => "joint half score",
            },
            hp,
            expected,
        });
    }

    for case in &cases {
        let out = solve_horizon(&case.hp).unwrap();
        assert_eq!(out.solution.status, LpStatus::Optimal, "{}", case.name);
        let obj = out.solution.objective_value;
        assert!(
            (obj - case.expected).abs() <= 1e-8,
            "{}: solver {obj} vs expected {}",
            case.name,
            case.expected
        );
        // Independent confirmation: the optimum lies on the oracle grid, so
        // the exhaustive grid search must find exactly the same value.
        let grid = grid_search_best(&case.hp, 20).unwrap();
        assert!(
            (grid - case.expected).abs() <= 1e-8,
            "{}: grid oracle {grid} vs expected {}",
            case.name,
            case.expected
        );
        assert!(obj >= grid - 1e-9 && obj <= grid + 1e-6, "{}", case.name);
        // Settlement must agree with the solver objective.
        let report = out.report.as_ref().unwrap();
        assert!((report.total_discounted - obj).abs() <= 1e-8 * (1.0 + obj.abs()));
    }
    println!(
        "criterion 2 (model fidelity): PASS ({} reference values solver == oracle)",
        cases.len()
    );
}

/// Criterion 3: across 200 random daily instances with zero discount and
/// non-negative regulation capacity prices, the joint-mode optimum never
/// falls below the arbitrage optimum.
#[test]
fn criterion_3_mode_dominance() {
    let mut rng = seeded(0xacce_0003);
    let mut worst_margin = f64::INFINITY;
    for i in 0..200 {
        let joint = random_daily(&mut rng, Mode::Joint);
        assert!(joint.prices.rcp.as_ref().unwrap().iter().all(|&v| v >= 0.0));
        let mut arb = joint.clone();
        arb.mode = Mode::Arbitrage;
        arb.regulation = None;
        let j = solve_horizon(&joint).unwrap().solution.objective_value;
        let a = solve_horizon(&arb).unwrap().solution.objective_value;
        let slack = 1e-9 * (1.0 + a.abs());
        assert!(j >= a - slack, "instance {i}: joint {j} < arbitrage {a}");
        worst_margin = worst_margin.min(j - a);
    }
    println!(
        "criterion 3 (mode dominance): PASS (200 instances, smallest joint-arbitrage margin \
         {worst_margin:.3e})"
    );
}

fn two_year_store(factor: f64, seed: u64) -> PriceStore {
    let cfg = SyntheticConfig {
        days: 730,
        start_date: NaiveDate::from_ymd_opt(2019, 1, 1).unwrap(),
        dt_hours: 1.0,
        base_price: 45.0,
        daily_amplitude: 20.0,
        noise_sd: 4.0,
        reg_price_ratio: Some(0.4),
        suppression: Some(Suppression {
            from: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
            to: NaiveDate::from_ymd_opt(2020, 12, 31).unwrap(),
            factor,
        }),
        location: "zone-j".into(),
    };
    let (series, warnings) = gen_synthetic(&cfg, seed).unwrap();
    assert!(warnings.is_empty());
    let mut store = PriceStore::default();
    store.insert(series);
    store
}

fn all_preset_campaign() -> CampaignConfig {
    CampaignConfig {
        start: NaiveDate::from_ymd_opt(2019, 1, 1).unwrap(),
        end: NaiveDate::from_ymd_opt(2020, 12, 30).unwrap(),
        devices: Technology::ALL
            .iter()
            .map(|t| DeviceConfig {
                preset: Some(t.label().to_string()),
                spec: None,
                initial_soc_mwh: None,
            })
            .collect(),
        locations: vec![LocationConfig {
            name: "zone-j".into(),
            prices: "in-memory".into(),
            schema: None,
        }],
        modes: vec![Mode::Arbitrage, Mode::Joint],
        soc_policy: SocPolicy::Independent,
        horizon_hours: 24.0,
        dt_hours: 1.0,
        discount_rate: 0.0,
        terminal_policy: TerminalPolicy::Free,
        regulation: RegulationConfig::default(),
        workers: None,
    }
}

/// Criterion 4: a two-year synthetic campaign whose second year is scaled by
/// 0.63 must report a year-over-year delta of -37% within 0.01 percentage
/// points for all five presets and both modes, within five minutes.
#[test]
fn criterion_4_scaling_campaign() {
    let started = Instant::now();
    let store = two_year_store(0.63, 0xacce_0004);
    let config = all_preset_campaign();
    let result = campaign::run(&config, &store).unwrap();
    assert_eq!(result.records.len(), 730 * 5 * 2);
    assert!(result.failures.is_empty(), "{:?}", result.failures);

    let rows = campaign::yoy_delta(&result, 2019, 2020).unwrap();
    assert_eq!(rows.len(), 5 * 2);
    let mut worst = 0.0f64;
    for row in &rows {
        assert!(row.revenue_a > 0.0, "{} {}", row.device, row.mode);
        match row.delta {
            YoyValue::Pct(delta) => {
                assert!(
                    (delta + 37.0).abs() <= 0.01,
                    "{} {}: delta {delta}",
                    row.device,
                    row.mode
                );
                worst = worst.max((delta + 37.0).abs());
            }
            YoyValue::Undefined => panic!("{} {}: undefined delta", row.device, row.mode),
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 300, "took {elapsed:?}");
    println!(
        "criterion 4 (scaling campaign): PASS (10 device-mode pairs at -37% +- {worst:.2e} pp, \
         7300 solves in {elapsed:.2?})"
    );
}

/// Criterion 5: the bundled presets carry the catalog parameters, in code
/// and in the README table.
#[test]
fn criterion_5_preset_catalog() {
    let expected: [(Technology, f64, f64, f64); 5] = [
        (Technology::LiIon, 0.90, 24.0, 36.0),
        (Technology::AdvLeadAcid, 0.95, 7.5, 10.0),
        (Technology::VanadiumRedox, 0.85, 60.0, 15.0),
        (Technology::Lfp, 0.93, 7.8, 19.8),
        (Technology::Flywheel, 0.85, 5.0, 20.0),
    ];
    for (tech, eff, capacity, power) in expected {
        let d = preset(tech);
        assert_eq!(d.round_trip_eff, eff, "{tech}");
        assert_eq!(d.capacity_mwh, capacity, "{tech}");
        assert_eq!(d.power_mw, power, "{tech}");
        assert_eq!(d.self_discharge_eff, 1.0, "{tech}");
    }

    let readme_path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../README.md");
    let readme = std::fs::read_to_string(readme_path).expect("workspace README");
    for token in [
        "li-ion", "adv-lead-acid", "vanadium-redox", "lfp", "flywheel", "0.90", "0.95", "0.85",
        "0.93", "24", "7.5", "60", "7.8", "36", "10", "15", "19.8", "20",
    ] {
        assert!(readme.contains(token), "README is missing {token:?}");
    }
    println!("criterion 5 (preset catalog): PASS (5 presets, code and docs agree)");
}

/// Criterion 6: every emitted schedule satisfies the storage invariants
/// within 1e-9, and no instance, including negative-price ones, ever
/// reports an unbounded status.
#[test]
fn criterion_6_feasibility_suite() {
    let mut rng = seeded(0xacce_0006);
    let mut schedules = 0usize;
    // Random daily instances, half of them with negative price stretches.
    for i in 0..150 {
        let mode = if i % 2 == 0 { Mode::Arbitrage } else { Mode::Joint };
        let mut hp = random_daily(&mut rng, mode);
        if i % 2 == 1 {
            for (t, v) in hp.prices.lmp.iter_mut().enumerate() {
                if t % 4 == 0 {
                    *v = -v.abs() - 10.0;
                }
            }
        }
        let out = solve_horizon(&hp).unwrap();
        assert_ne!(out.solution.status, LpStatus::Unbounded, "instance {i}");
        let schedule = out.schedule.expect("bounded feasible models solve");
        let violations = schedule.check(&hp, SCHEDULE_TOL);
        assert!(violations.is_empty(), "instance {i}: {violations:?}");
        schedules += 1;
    }
    // A slice of the scaling campaign, revalidated schedule by schedule.
    let store = two_year_store(0.63, 0xacce_0004);
    let mut config = all_preset_campaign();
    config.end = NaiveDate::from_ymd_opt(2019, 1, 14).unwrap();
    let series = store.get("zone-j").unwrap();
    for device_cfg in &config.devices {
        let device = device_cfg.resolve().unwrap();
        for mode in [Mode::Arbitrage, Mode::Joint] {
            for day in 0..14usize {
                let mut hp =
                    HorizonProblem::new(device.clone(), series.window(day * 24, 24), mode);
                if mode == Mode::Joint {
                    hp.regulation = Some(RegulationParams::defaults(24));
                }
                let out = solve_horizon(&hp).unwrap();
                assert_ne!(out.solution.status, LpStatus::Unbounded);
                let schedule = out.schedule.unwrap();
                assert!(schedule.check(&hp, SCHEDULE_TOL).is_empty());
                schedules += 1;
            }
        }
    }
    println!(
        "criterion 6 (feasibility suite): PASS ({schedules} schedules validated at 1e-9, \
         zero unbounded statuses)"
    );
}

/// Criterion 7: re-running a campaign from the same manifest reproduces the
/// records CSV byte for byte.
#[test]
fn criterion_7_deterministic_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let prices_path = dir.path().join("prices.csv");
    let store_src = two_year_store(0.9, 0xacce_0007);
    ingest::write_prices_csv(&prices_path, [store_src.get("zone-j").unwrap()]).unwrap();

    let mut config = all_preset_campaign();
    config.devices.truncate(2);
    config.end = NaiveDate::from_ymd_opt(2019, 1, 10).unwrap();
    config.soc_policy = SocPolicy::CarryOver;
    config.locations[0].prices = prices_path.display().to_string();

    let manifest = campaign::Manifest::build(&config).unwrap();
    manifest.write_json(dir.path().join("manifest.json")).unwrap();

    let run_once = |out_name: &str| -> Vec<u8> {
        let loaded = campaign::Manifest::load_json(dir.path().join("manifest.json")).unwrap();
        let store = ingest::load_prices(
            &loaded.config.locations[0].prices,
            &CsvSchema::canonical(),
        )
        .unwrap();
        let result = campaign::run(&loaded.config, &store).unwrap();
        let path = dir.path().join(out_name);
        campaign::write_records_csv(&path, &result).unwrap();
        std::fs::read(path).unwrap()
    };
    let first = run_once("records_a.csv");
    let second = run_once("records_b.csv");
    assert!(!first.is_empty());
    assert_eq!(first, second, "record CSVs differ between reruns");
    println!(
        "criterion 7 (deterministic reruns): PASS ({} byte records identical across reruns)",
        first.len()
    );
}
