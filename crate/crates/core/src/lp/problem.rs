use thiserror::Error;

/// Errors produced by the LP layer.
#[derive(Debug, Error)]
pub enum LpError {
    /// The problem data is malformed (dimension mismatch, NaN, inverted bounds).
    #[error("structural error: {0}")]
    Structural(String),
    /// The arithmetic broke down (singular basis, non-finite values, iteration cap).
    #[error("numeric error: {0}")]
    Numeric(String),
    /// An operation was called outside its contract.
    #[error("contract error: {0}")]
    Contract(String),
}

/// A bounded-variable linear program in the form
///
/// ```text
/// maximize  c'x
/// s.t.      row_lower <= A x <= row_upper
///           var_lower <=  x  <= var_upper
/// ```
///
/// Row and variable bounds may be infinite on either side; an equal pair
/// makes an equality row (or a fixed variable).
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    /// Dense constraint rows, each of length `num_vars()`.
    pub rows: Vec<Vec<f64>>,
    pub row_lower: Vec<f64>,
    pub row_upper: Vec<f64>,
    pub var_lower: Vec<f64>,
    pub var_upper: Vec<f64>,
    pub col_names: Option<Vec<String>>,
    pub row_names: Option<Vec<String>>,
}

impl LpProblem {
    /// A problem with `num_vars` variables, zero objective and default
    /// bounds `[0, +inf)`, ready to be filled in.
    pub fn new(num_vars: usize) -> Self {
        LpProblem {
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            row_lower: Vec::new(),
            row_upper: Vec::new(),
            var_lower: vec![0.0; num_vars],
            var_upper: vec![f64::INFINITY; num_vars],
            col_names: None,
            row_names: None,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn set_var_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.var_lower[j] = lower;
        self.var_upper[j] = upper;
    }

    /// Appends a row from sparse entries and returns its index.
    pub fn add_row(&mut self, lower: f64, upper: f64, entries: &[(usize, f64)]) -> usize {
        let mut row = vec![0.0; self.num_vars()];
        for &(j, v) in entries {
            row[j] += v;
        }
        self.rows.push(row);
        self.row_lower.push(lower);
        self.row_upper.push(upper);
        self.rows.len() - 1
    }

    pub fn set_col_name(&mut self, j: usize, name: impl Into<String>) {
        let names = self
            .col_names
            .get_or_insert_with(|| vec![String::new(); self.objective.len()]);
        names[j] = name.into();
    }

    pub fn push_row_name(&mut self, name: impl Into<String>) {
        let names = self.row_names.get_or_insert_with(Vec::new);
        names.push(name.into());
    }

    pub fn col_name(&self, j: usize) -> String {
        match &self.col_names {
            Some(names) if !names[j].is_empty() => names[j].clone(),
            _ => format!("x{j}"),
        }
    }

    pub fn row_name(&self, i: usize) -> String {
        match &self.row_names {
            Some(names) if i < names.len() && !names[i].is_empty() => names[i].clone(),
            _ => format!("r{i}"),
        }
    }

    /// Checks the structural invariants: consistent dimensions, no NaN,
    /// finite matrix/objective entries and ordered bounds.
    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        let m = self.num_rows();
        if self.var_lower.len() != n || self.var_upper.len() != n {
            return Err(LpError::Structural(format!(
                "variable bound length {}/{} does not match {n} variables",
                self.var_lower.len(),
                self.var_upper.len()
            )));
        }
        if self.row_lower.len() != m || self.row_upper.len() != m {
            return Err(LpError::Structural(format!(
                "row bound length {}/{} does not match {m} rows",
                self.row_lower.len(),
                self.row_upper.len()
            )));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(LpError::Structural(format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(LpError::Structural(format!(
                        "row {i}, column {j}: coefficient {v} is not finite"
                    )));
                }
            }
        }
        for (j, c) in self.objective.iter().enumerate() {
            if !c.is_finite() {
                return Err(LpError::Structural(format!(
                    "objective coefficient {j} is {c}, not finite"
                )));
            }
        }
        for j in 0..n {
            let (l, u) = (self.var_lower[j], self.var_upper[j]);
            if l.is_nan() || u.is_nan() {
                return Err(LpError::Structural(format!("variable {j} has NaN bound")));
            }
            if l > u {
                return Err(LpError::Structural(format!(
                    "variable {j}: lower bound {l} exceeds upper bound {u}"
                )));
            }
        }
        for i in 0..m {
            let (l, u) = (self.row_lower[i], self.row_upper[i]);
            if l.is_nan() || u.is_nan() {
                return Err(LpError::Structural(format!("row {i} has NaN bound")));
            }
            if l > u {
                return Err(LpError::Structural(format!(
                    "row {i}: lower bound {l} exceeds upper bound {u}"
                )));
            }
        }
        Ok(())
    }

    /// Row activities `A x` for a candidate point.
    pub fn row_activity(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, v)| a * v).sum())
            .collect()
    }

    /// Plain-text fixed-format listing, one constraint per line, for bug
    /// reports and debugging.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let term = |j: usize, v: f64| format!("{:+} {}", v, self.col_name(j));
        out.push_str("maximize:");
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                out.push(' ');
                out.push_str(&term(j, c));
            }
        }
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&format!("{}:", self.row_name(i)));
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    out.push(' ');
                    out.push_str(&term(j, v));
                }
            }
            let (l, u) = (self.row_lower[i], self.row_upper[i]);
            if l == u {
                out.push_str(&format!(" = {l}"));
            } else {
                if l.is_finite() {
                    out.push_str(&format!(" >= {l}"));
                }
                if u.is_finite() {
                    out.push_str(&format!(" <= {u}"));
                }
            }
            out.push('\n');
        }
        for j in 0..self.num_vars() {
            out.push_str(&format!(
                "bound: {} <= {} <= {}\n",
                self.var_lower[j],
                self.col_name(j),
                self.var_upper[j]
            ));
        }
        out
    }
}
