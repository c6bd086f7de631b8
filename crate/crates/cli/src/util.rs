use chrono::NaiveDate;

/// Stable exit-code contract: 1 for usage/config problems, 2 for
/// data/solve failures.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) => f.write_str(msg),
        }
    }
}

pub fn usage(msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

pub fn data(msg: impl std::fmt::Display) -> CliError {
    CliError::Data(msg.to_string())
}

/// `YYYY-MM-DD`, or `YYYY-MM` resolved to the given edge of the month.
pub fn parse_date_or_month(raw: &str, month_end: bool) -> Result<NaiveDate, CliError> {
    if let Ok(d) = raw.parse::<NaiveDate>() {
        return Ok(d);
    }
    let parts: Vec<&str> = raw.split('-').collect();
    if parts.len() == 2 {
        let year: i32 = parts[0]
            .parse()
            .map_err(|_| usage(format!("bad year in {raw:?}")))?;
        let month: u32 = parts[1]
            .parse()
            .map_err(|_| usage(format!("bad month in {raw:?}")))?;
        let first = NaiveDate::from_ymd_opt(year, month, 1)
            .ok_or_else(|| usage(format!("bad month in {raw:?}")))?;
        return Ok(if month_end {
            let next = if month == 12 {
                NaiveDate::from_ymd_opt(year + 1, 1, 1).unwrap()
            } else {
                NaiveDate::from_ymd_opt(year, month + 1, 1).unwrap()
            };
            next.pred_opt().unwrap()
        } else {
            first
        });
    }
    Err(usage(format!(
        "cannot parse date {raw:?}; expected YYYY-MM-DD or YYYY-MM"
    )))
}
