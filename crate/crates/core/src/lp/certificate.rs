//! Independent optimality certification.
//!
//! The checks here evaluate only the problem data and the reported solution
//! vectors; they share no state with the solve path.

use super::problem::{LpError, LpProblem};
use super::simplex::{LpSolution, LpStatus};

/// Relative tolerance applied to every certificate check.
pub const CERT_TOL: f64 = 1e-7;

/// Raw residual magnitudes of the optimality conditions. Each check passes
/// when the raw value is below `CERT_TOL` times a `1 + |reference|` scale.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    /// Largest violation of a variable or row bound.
    pub max_primal_violation: f64,
    /// Largest dual-feasibility defect: stationarity residual
    /// `c - A'y - d`, or a multiplier pushing against an infinite bound.
    pub max_dual_violation: f64,
    /// Largest complementary-slackness product `multiplier * slack`.
    pub max_complementarity: f64,
    /// `|c'x - dual bound|` where the bound sums the active-bound payoffs.
    pub duality_gap: f64,
    pub pass: bool,
}

struct Worst {
    raw: f64,
    pass: bool,
}

impl Worst {
    fn new() -> Self {
        Worst { raw: 0.0, pass: true }
    }

    fn record(&mut self, raw: f64, scale: f64) {
        if raw > self.raw {
            self.raw = raw;
        }
        if raw > CERT_TOL * (1.0 + scale.abs()) {
            self.pass = false;
        }
    }
}

/// Verifies KKT conditions and the duality gap for an optimal solution.
pub fn verify_certificate(
    problem: &LpProblem,
    solution: &LpSolution,
) -> Result<CertificateReport, LpError> {
    if solution.status != LpStatus::Optimal {
        return Err(LpError::Contract(
            "certificate verification requires an optimal solution".into(),
        ));
    }
    problem.validate()?;
    let n = problem.num_vars();
    let m = problem.num_rows();
    if solution.primal_values.len() != n
        || solution.reduced_costs.len() != n
        || solution.dual_values.len() != m
    {
        return Err(LpError::Contract(
            "solution vector lengths do not match the problem".into(),
        ));
    }

    let x = &solution.primal_values;
    let y = &solution.dual_values;
    let d = &solution.reduced_costs;
    let activity = problem.row_activity(x);
    let objective: f64 = problem.objective.iter().zip(x).map(|(c, v)| c * v).sum();

    let mut primal = Worst::new();
    for j in 0..n {
        let (l, u) = (problem.var_lower[j], problem.var_upper[j]);
        if l.is_finite() {
            primal.record((l - x[j]).max(0.0), l);
        }
        if u.is_finite() {
            primal.record((x[j] - u).max(0.0), u);
        }
    }
    for i in 0..m {
        let (l, u) = (problem.row_lower[i], problem.row_upper[i]);
        if l.is_finite() {
            primal.record((l - activity[i]).max(0.0), l);
        }
        if u.is_finite() {
            primal.record((activity[i] - u).max(0.0), u);
        }
    }

    let mut dual = Worst::new();
    let mut compl = Worst::new();
    let mut dual_bound = 0.0;
    for j in 0..n {
        // Stationarity: the reported reduced cost must reproduce c - A'y.
        let aty: f64 = (0..m).map(|i| y[i] * problem.rows[i][j]).sum();
        let resid = (problem.objective[j] - aty - d[j]).abs();
        dual.record(resid, problem.objective[j].abs() + aty.abs());

        let (l, u) = (problem.var_lower[j], problem.var_upper[j]);
        let dp = d[j].max(0.0);
        let dn = (-d[j]).max(0.0);
        if dp > 0.0 {
            if u.is_finite() {
                compl.record(dp * (u - x[j]).max(0.0), objective);
                dual_bound += dp * u;
            } else {
                dual.record(dp, objective);
            }
        }
        if dn > 0.0 {
            if l.is_finite() {
                compl.record(dn * (x[j] - l).max(0.0), objective);
                dual_bound -= dn * l;
            } else {
                dual.record(dn, objective);
            }
        }
    }
    for i in 0..m {
        let (l, u) = (problem.row_lower[i], problem.row_upper[i]);
        let yp = y[i].max(0.0);
        let yn = (-y[i]).max(0.0);
        if yp > 0.0 {
            if u.is_finite() {
                compl.record(yp * (u - activity[i]).max(0.0), objective);
                dual_bound += yp * u;
            } else {
                dual.record(yp, objective);
            }
        }
        if yn > 0.0 {
            if l.is_finite() {
                compl.record(yn * (activity[i] - l).max(0.0), objective);
                dual_bound -= yn * l;
            } else {
                dual.record(yn, objective);
            }
        }
    }

    let mut gap = Worst::new();
    gap.record((objective - dual_bound).abs(), objective);

    Ok(CertificateReport {
        max_primal_violation: primal.raw,
        max_dual_violation: dual.raw,
        max_complementarity: compl.raw,
        duality_gap: gap.raw,
        pass: primal.pass && dual.pass && compl.pass && gap.pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::solve;

    fn trivial_problem() -> LpProblem {
        // maximize x, x <= 5, 0 <= x <= 10
        let mut p = LpProblem::new(1);
        p.objective[0] = 1.0;
        p.set_var_bounds(0, 0.0, 10.0);
        p.add_row(f64::NEG_INFINITY, 5.0, &[(0, 1.0)]);
        p
    }

    #[test]
    fn passes_on_solved_problem_with_zero_gap() {
        let p = trivial_problem();
        let s = solve(&p).unwrap();
        let report = verify_certificate(&p, &s).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.duality_gap <= 1e-12);
    }

    #[test]
    fn fails_on_perturbed_primal() {
        let p = trivial_problem();
        let mut s = solve(&p).unwrap();
        s.primal_values[0] += 1.0;
        let report = verify_certificate(&p, &s).unwrap();
        assert!(!report.pass);
        assert!((report.max_primal_violation - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fails_on_perturbed_dual() {
        let p = trivial_problem();
        let mut s = solve(&p).unwrap();
        s.dual_values[0] += 0.5;
        let report = verify_certificate(&p, &s).unwrap();
        assert!(!report.pass);
        assert!(report.max_dual_violation > 0.4);
    }

    #[test]
    fn rejects_non_optimal_status() {
        let p = trivial_problem();
        let mut s = solve(&p).unwrap();
        s.status = LpStatus::Infeasible;
        let err = verify_certificate(&p, &s).unwrap_err();
        assert!(matches!(err, LpError::Contract(_)));
    }

    #[test]
    fn passes_on_two_var_vertex() {
        let mut p = LpProblem::new(2);
        p.objective = vec![3.0, 2.0];
        p.add_row(f64::NEG_INFINITY, 4.0, &[(0, 1.0), (1, 1.0)]);
        p.add_row(f64::NEG_INFINITY, 2.0, &[(0, 1.0)]);
        let s = solve(&p).unwrap();
        let report = verify_certificate(&p, &s).unwrap();
        assert!(report.pass, "{report:?}");
    }
}
