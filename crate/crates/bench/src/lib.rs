//! Benchmark instance builders.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gridarb::device::{preset, Technology};
use gridarb::ingest::{gen_synthetic, SyntheticConfig};
use gridarb::lp::LpProblem;
use gridarb::market::{HorizonProblem, Mode, RegulationParams};

/// One synthetic trading day on the li-ion preset.
pub fn daily_problem(mode: Mode) -> HorizonProblem {
    let cfg = SyntheticConfig {
        days: 1,
        start_date: NaiveDate::from_ymd_opt(2020, 6, 1).unwrap(),
        dt_hours: 1.0,
        base_price: 45.0,
        daily_amplitude: 20.0,
        noise_sd: 5.0,
        reg_price_ratio: Some(0.4),
        suppression: None,
        location: "bench".into(),
    };
    let (series, _) = gen_synthetic(&cfg, 42).unwrap();
    let mut hp = HorizonProblem::new(preset(Technology::LiIon), series, mode);
    if mode == Mode::Joint {
        hp.regulation = Some(RegulationParams::defaults(24));
    }
    hp
}

/// Dense-ish random LP with `n` box-bounded variables and `n/2` rows.
pub fn random_lp(n: usize, seed: u64) -> LpProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = LpProblem::new(n);
    for j in 0..n {
        let lower = rng.gen_range(-5.0..0.0);
        p.set_var_bounds(j, lower, lower + rng.gen_range(1.0..10.0));
        p.objective[j] = rng.gen_range(-10.0..10.0);
    }
    let anchor: Vec<f64> = (0..n)
        .map(|j| rng.gen_range(p.var_lower[j]..p.var_upper[j]))
        .collect();
    for _ in 0..n / 2 {
        let entries: Vec<(usize, f64)> = (0..6)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(-10.0..10.0)))
            .collect();
        let act: f64 = entries.iter().map(|&(j, a)| a * anchor[j]).sum();
        p.add_row(act - rng.gen_range(0.0..10.0), act + rng.gen_range(0.0..10.0), &entries);
    }
    p
}
