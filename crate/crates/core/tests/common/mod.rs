//! Shared test oracles and instance generators.
//!
//! Everything here is independent of the library's solve path: the vertex
//! oracle enumerates active-constraint intersections directly and the grid
//! oracle simulates candidate schedules step by step.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gridarb::device::DeviceSpec;
use gridarb::ingest::PriceSeries;
use gridarb::lp::LpProblem;
use gridarb::market::{HorizonProblem, Mode, RegulationParams};

/// Best objective over all vertices of a bounded LP (finite variable
/// bounds required), or `None` when no feasible vertex exists.
///
/// A vertex is the intersection of `n` linearly independent active
/// constraints drawn from row bounds and variable bounds; for `n <= 4`
/// exhaustive enumeration is cheap.
pub fn vertex_enumeration_best(p: &LpProblem) -> Option<f64> {
    let n = p.num_vars();
    assert!(n <= 4, "vertex oracle is for tiny instances");
    let feas_tol = 1e-7;

    // Candidate hyperplanes (normal, rhs).
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        if p.var_lower[j].is_finite() {
            planes.push((e.clone(), p.var_lower[j]));
        }
        if p.var_upper[j].is_finite() && p.var_upper[j] != p.var_lower[j] {
            planes.push((e, p.var_upper[j]));
        }
    }
    for i in 0..p.num_rows() {
        if p.row_lower[i].is_finite() {
            planes.push((p.rows[i].clone(), p.row_lower[i]));
        }
        if p.row_upper[i].is_finite() && p.row_upper[i] != p.row_lower[i] {
            planes.push((p.rows[i].clone(), p.row_upper[i]));
        }
    }

    let feasible = |x: &[f64]| -> bool {
        for j in 0..n {
            if x[j] < p.var_lower[j] - feas_tol * (1.0 + p.var_lower[j].abs()) {
                return false;
            }
            if x[j] > p.var_upper[j] + feas_tol * (1.0 + p.var_upper[j].abs()) {
                return false;
            }
        }
        for (i, row) in p.rows.iter().enumerate() {
            let act: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
            if act < p.row_lower[i] - feas_tol * (1.0 + p.row_lower[i].abs()) {
                return false;
            }
            if act > p.row_upper[i] + feas_tol * (1.0 + p.row_upper[i].abs()) {
                return false;
            }
        }
        true
    };

    let mut best: Option<f64> = None;
    let mut chosen = vec![0usize; n];
    enumerate_subsets(planes.len(), n, &mut chosen, 0, 0, &mut |subset| {
        if let Some(x) = solve_square(&planes, subset, n) {
            if feasible(&x) {
                let obj: f64 = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                best = Some(match best {
                    Some(b) => b.max(obj),
                    None => obj,
                });
            }
        }
    });
    best
}

fn enumerate_subsets(
    total: usize,
    want: usize,
    chosen: &mut Vec<usize>,
    depth: usize,
    start: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if depth == want {
        visit(chosen);
        return;
    }
    for i in start..total {
        chosen[depth] = i;
        enumerate_subsets(total, want, chosen, depth + 1, i + 1, visit);
    }
}

/// Solves the square system formed by the selected hyperplanes; `None` when
/// singular.
fn solve_square(planes: &[(Vec<f64>, f64)], subset: &[usize], n: usize) -> Option<Vec<f64>> {
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    for (r, &pi) in subset.iter().enumerate() {
        for c in 0..n {
            a[r * n + c] = planes[pi].0[c];
        }
        b[r] = planes[pi].1;
    }
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col].abs() < 1e-9 {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r * n + col] / a[col * n + col];
            if f != 0.0 {
                for c in col..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i * n + i]).collect())
}

/// Exhaustive grid search over candidate schedules in increments of
/// `cap / steps` per decision, simulating the state-of-charge recursion
/// directly. Returns the best discounted objective among feasible grid
/// points, or `None` if no grid point is feasible.
pub fn grid_search_best(hp: &HorizonProblem, steps: usize) -> Option<f64> {
    let cap = hp.step_energy_cap();
    let quantum = cap / steps as f64;
    let device = &hp.device;
    let horizon = hp.horizon();
    let joint = hp.mode == Mode::Joint;
    let tol = 1e-9;

    struct Ctx<'a> {
        hp: &'a HorizonProblem,
        quantum: f64,
        steps: usize,
        joint: bool,
        tol: f64,
        best: Option<f64>,
    }

    fn recurse(ctx: &mut Ctx, t: usize, soc: f64, acc: f64) {
        let hp = ctx.hp;
        if t == hp.horizon() {
            ctx.best = Some(match ctx.best {
                Some(b) if b >= acc => b,
                _ => acc,
            });
            return;
        }
        let d = &hp.device;
        let lmp = hp.prices.lmp[t];
        let disc = (-hp.discount_rate * t as f64).exp();
        let reg = hp.regulation.as_ref();
        for i in 0..=ctx.steps {
            for j in 0..=(ctx.steps - i) {
                let kmax = if ctx.joint { ctx.steps - i - j } else { 0 };
                for k in 0..=kmax {
                    let charge = i as f64 * ctx.quantum;
                    let discharge = j as f64 * ctx.quantum;
                    let bid = k as f64 * ctx.quantum;
                    let (up, down, score) = match reg {
                        Some(r) => (
                            r.reg_up_fraction[t],
                            r.reg_down_fraction[t],
                            r.performance_score[t],
                        ),
                        None => (0.0, 0.0, 0.0),
                    };
                    let next = d.self_discharge_eff * soc + d.round_trip_eff * charge
                        - discharge
                        + (d.round_trip_eff * down - up) * bid;
                    if next < -ctx.tol || next > d.capacity_mwh + ctx.tol {
                        continue;
                    }
                    let mut cash = lmp * (discharge - charge + (up - down) * bid);
                    if ctx.joint {
                        let rcp = hp.prices.rcp.as_ref().unwrap()[t];
                        let pf = reg.unwrap().penalty_factor;
                        cash += rcp * bid * (1.0 - pf * (1.0 - score));
                    }
                    recurse(ctx, t + 1, next, acc + cash * disc);
                }
            }
        }
    }

    let mut ctx = Ctx {
        hp,
        quantum,
        steps,
        joint,
        tol,
        best: None,
    };
    let _ = horizon;
    recurse(&mut ctx, 0, device.initial_soc_mwh, 0.0);
    ctx.best
}

/// Random bounded LP: finite variable boxes, mixed row types, mostly
/// feasible by construction (rows are anchored on an interior point), with
/// a deliberate contradiction injected in roughly one instance out of ten.
pub fn random_lp(rng: &mut ChaCha8Rng, max_vars: usize) -> LpProblem {
    let n = if rng.gen_bool(0.3) {
        rng.gen_range(1..=4.min(max_vars))
    } else {
        rng.gen_range(1..=max_vars)
    };
    let mut p = LpProblem::new(n);
    for j in 0..n {
        let lower = rng.gen_range(-10.0..0.0);
        let upper = lower + rng.gen_range(0.5..20.0);
        p.set_var_bounds(j, lower, upper);
        p.objective[j] = rng.gen_range(-10.0..10.0);
    }
    let anchor: Vec<f64> = (0..n)
        .map(|j| rng.gen_range(p.var_lower[j]..p.var_upper[j]))
        .collect();
    let m = rng.gen_range(0..=50.min(2 * n));
    for _ in 0..m {
        let nonzeros = rng.gen_range(1..=n.min(6));
        let mut entries = Vec::with_capacity(nonzeros);
        for _ in 0..nonzeros {
            entries.push((rng.gen_range(0..n), rng.gen_range(-10.0..10.0)));
        }
        let act: f64 = entries.iter().map(|&(j, a)| a * anchor[j]).sum();
        let (lower, upper) = match rng.gen_range(0..10) {
            0 => (act, act), // equality through the anchor
            1 | 2 => (act - rng.gen_range(0.0..20.0), f64::INFINITY),
            3 | 4 => (f64::NEG_INFINITY, act + rng.gen_range(0.0..20.0)),
            _ => (
                act - rng.gen_range(0.0..20.0),
                act + rng.gen_range(0.0..20.0),
            ),
        };
        p.add_row(lower, upper, &entries);
    }
    if rng.gen_bool(0.1) {
        // Disjoint bands on the same left-hand side: certainly infeasible.
        let nonzeros = rng.gen_range(1..=n.min(4));
        let mut entries = Vec::with_capacity(nonzeros);
        for _ in 0..nonzeros {
            entries.push((rng.gen_range(0..n), rng.gen_range(1.0..5.0)));
        }
        let act: f64 = entries.iter().map(|&(j, a)| a * anchor[j]).sum();
        p.add_row(act + 1.0, act + 3.0, &entries);
        p.add_row(act - 3.0, act - 1.0, &entries);
    }
    p
}

pub fn hourly_series(start: NaiveDate, lmp: Vec<f64>, rcp: Option<Vec<f64>>) -> PriceSeries {
    let t0 = start.and_hms_opt(0, 0, 0).unwrap();
    PriceSeries {
        location: "test".into(),
        timestamps: (0..lmp.len())
            .map(|t| t0 + chrono::Duration::hours(t as i64))
            .collect(),
        lmp,
        rcp,
        rmp: None,
        source: None,
    }
}

pub fn unit_device() -> DeviceSpec {
    DeviceSpec {
        name: "unit".into(),
        self_discharge_eff: 1.0,
        round_trip_eff: 1.0,
        capacity_mwh: 1.0,
        power_mw: 1.0,
        initial_soc_mwh: 0.0,
    }
}

pub fn random_device(rng: &mut ChaCha8Rng) -> DeviceSpec {
    let capacity = rng.gen_range(1.0..60.0);
    DeviceSpec {
        name: "random".into(),
        self_discharge_eff: rng.gen_range(0.9..=1.0),
        round_trip_eff: rng.gen_range(0.7..=1.0),
        capacity_mwh: capacity,
        power_mw: rng.gen_range(1.0..40.0),
        initial_soc_mwh: rng.gen_range(0.0..capacity),
    }
}

/// A random daily instance: 24 hourly steps, possibly negative energy
/// prices, non-negative regulation capacity prices.
pub fn random_daily(rng: &mut ChaCha8Rng, mode: Mode) -> HorizonProblem {
    let base = rng.gen_range(10.0..60.0);
    let amplitude = rng.gen_range(0.0..30.0);
    let noise = rng.gen_range(0.0..20.0);
    let lmp: Vec<f64> = (0..24)
        .map(|h| {
            base + amplitude * (2.0 * std::f64::consts::PI * h as f64 / 24.0).sin()
                + rng.gen_range(-2.0..2.0) * noise
        })
        .collect();
    let ratio = rng.gen_range(0.1..0.8);
    let rcp: Vec<f64> = lmp.iter().map(|v| (ratio * v.abs()).max(0.0)).collect();
    let series = hourly_series(
        NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
        lmp,
        Some(rcp),
    );
    let mut hp = HorizonProblem::new(random_device(rng), series, mode);
    if mode == Mode::Joint {
        let mut reg = RegulationParams::uniform(
            24,
            rng.gen_range(0.0..0.3),
            rng.gen_range(0.0..0.3),
            rng.gen_range(0.5..1.0),
        );
        reg.penalty_factor = 1.1;
        hp.regulation = Some(reg);
    }
    hp
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
