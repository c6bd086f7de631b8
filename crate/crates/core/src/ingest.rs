//! Market price ingestion: CSV loading, resampling with gap fill, and
//! reproducible synthetic scenario generation.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{Duration, NaiveDate, NaiveDateTime, Timelike};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column {0:?}")]
    Schema(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("alignment error: {0}")]
    Alignment(String),
    #[error("gap too large: no data from {from} to {to}")]
    Gap {
        from: NaiveDateTime,
        to: NaiveDateTime,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Time-stamped market signals for one location. `lmp` is the energy price;
/// `rcp`/`rmp` are the regulation capacity and movement prices when the feed
/// carries them (`rmp` is pass-through only). Negative prices are legal.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub location: String,
    pub timestamps: Vec<NaiveDateTime>,
    pub lmp: Vec<f64>,
    pub rcp: Option<Vec<f64>>,
    pub rmp: Option<Vec<f64>>,
    /// Free-text provenance (file path, generator settings, ...).
    pub source: Option<String>,
}

impl PriceSeries {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    /// Core invariants: matching lengths, strictly increasing timestamps,
    /// finite values.
    pub fn validate(&self) -> Result<(), IngestError> {
        if self.is_empty() {
            return Err(IngestError::Invalid(format!(
                "price series for {:?} is empty",
                self.location
            )));
        }
        if self.lmp.len() != self.len() {
            return Err(IngestError::Invalid("lmp length mismatch".into()));
        }
        for (name, opt) in [("rcp", &self.rcp), ("rmp", &self.rmp)] {
            if let Some(v) = opt {
                if v.len() != self.len() {
                    return Err(IngestError::Invalid(format!("{name} length mismatch")));
                }
                if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
                    return Err(IngestError::Invalid(format!("{name} contains {bad}")));
                }
            }
        }
        if let Some(bad) = self.lmp.iter().find(|x| !x.is_finite()) {
            return Err(IngestError::Invalid(format!("lmp contains {bad}")));
        }
        for w in self.timestamps.windows(2) {
            if w[1] <= w[0] {
                return Err(IngestError::Invalid(format!(
                    "timestamps not strictly increasing at {}",
                    w[1]
                )));
            }
        }
        Ok(())
    }

    /// The constant spacing, or an alignment error if the series has holes
    /// or mixed intervals. Models and campaigns require uniform series.
    pub fn uniform_step(&self) -> Result<Duration, IngestError> {
        self.validate()?;
        if self.len() == 1 {
            return Ok(Duration::hours(1));
        }
        let step = self.timestamps[1] - self.timestamps[0];
        for w in self.timestamps.windows(2) {
            if w[1] - w[0] != step {
                return Err(IngestError::Alignment(format!(
                    "spacing changes at {} (expected {step}); resample the series first",
                    w[1]
                )));
            }
        }
        Ok(step)
    }

    /// A clone of steps `[start, start + len)`.
    pub fn window(&self, start: usize, len: usize) -> PriceSeries {
        let slice = |v: &Vec<f64>| v[start..start + len].to_vec();
        PriceSeries {
            location: self.location.clone(),
            timestamps: self.timestamps[start..start + len].to_vec(),
            lmp: slice(&self.lmp),
            rcp: self.rcp.as_ref().map(slice),
            rmp: self.rmp.as_ref().map(slice),
            source: self.source.clone(),
        }
    }

    pub fn index_of(&self, t: NaiveDateTime) -> Option<usize> {
        self.timestamps.binary_search(&t).ok()
    }

    /// Multiplies every price channel by `factor` for timestamps in
    /// `[from, to_exclusive)`.
    pub fn scale_window(&mut self, from: NaiveDateTime, to_exclusive: NaiveDateTime, factor: f64) {
        for (i, ts) in self.timestamps.iter().enumerate() {
            if *ts >= from && *ts < to_exclusive {
                self.lmp[i] *= factor;
                if let Some(rcp) = &mut self.rcp {
                    rcp[i] *= factor;
                }
                if let Some(rmp) = &mut self.rmp {
                    rmp[i] *= factor;
                }
            }
        }
    }
}

/// Per-location collection of price series, keyed by location label.
#[derive(Debug, Clone, Default)]
pub struct PriceStore(pub BTreeMap<String, PriceSeries>);

impl PriceStore {
    pub fn get(&self, location: &str) -> Option<&PriceSeries> {
        self.0.get(location)
    }

    pub fn insert(&mut self, series: PriceSeries) {
        self.0.insert(series.location.clone(), series);
    }

    pub fn locations(&self) -> Vec<&str> {
        self.0.keys().map(|s| s.as_str()).collect()
    }

    /// The sole series in the store; errors when it is ambiguous.
    pub fn single(&self) -> Result<&PriceSeries, IngestError> {
        match self.0.len() {
            1 => Ok(self.0.values().next().unwrap()),
            0 => Err(IngestError::Invalid("price store is empty".into())),
            _ => Err(IngestError::Invalid(format!(
                "multiple locations present ({}); pick one",
                self.locations().join(", ")
            ))),
        }
    }
}

/// Column mapping for a price CSV. Formats changed over the years, so the
/// caller names the columns instead of us hard-coding an export layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSchema {
    pub time: String,
    pub location: String,
    pub lmp: String,
    #[serde(default)]
    pub rcp: Option<String>,
    #[serde(default)]
    pub rmp: Option<String>,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
}

fn default_delimiter() -> char {
    ','
}

impl CsvSchema {
    /// The canonical column layout written by [`write_prices_csv`].
    pub fn canonical() -> Self {
        CsvSchema {
            time: "time".into(),
            location: "location".into(),
            lmp: "lmp".into(),
            rcp: Some("rcp".into()),
            rmp: Some("rmp".into()),
            delimiter: ',',
        }
    }
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema::canonical()
    }
}

fn parse_timestamp(raw: &str) -> Option<NaiveDateTime> {
    let raw = raw.trim();
    for fmt in [
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
        "%m/%d/%Y %H:%M:%S",
        "%m/%d/%Y %H:%M",
    ] {
        if let Ok(t) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Some(t);
        }
    }
    if let Ok(d) = NaiveDate::parse_from_str(raw, "%Y-%m-%d") {
        return Some(d.and_hms_opt(0, 0, 0).unwrap());
    }
    // Epoch seconds.
    if let Ok(secs) = raw.parse::<i64>() {
        return chrono::DateTime::from_timestamp(secs, 0).map(|t| t.naive_utc());
    }
    None
}

/// Loads a price CSV into per-location series: parsed, sorted, duplicate
/// timestamps averaged (daylight-saving repeats collapse this way). Spacings
/// must be integer multiples of the finest interval present; holes are left
/// for [`resample`] to fill.
pub fn load_prices(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<PriceStore, IngestError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter as u8)
        .has_headers(true)
        .flexible(false)
        .from_reader(file);

    let headers = reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let time_idx = find(&schema.time).ok_or_else(|| IngestError::Schema(schema.time.clone()))?;
    let loc_idx = find(&schema.location)
        .ok_or_else(|| IngestError::Schema(schema.location.clone()))?;
    let lmp_idx = find(&schema.lmp).ok_or_else(|| IngestError::Schema(schema.lmp.clone()))?;
    // The regulation channels are optional: a schema may name them, but a
    // file without those columns still loads (as energy-only data).
    let rcp_idx = schema.rcp.as_deref().and_then(find);
    let rmp_idx = schema.rmp.as_deref().and_then(find);

    struct Row {
        ts: NaiveDateTime,
        lmp: f64,
        rcp: Option<f64>,
        rmp: Option<f64>,
    }
    let mut by_location: BTreeMap<String, Vec<Row>> = BTreeMap::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2; // header is line 1
        let record = record?;
        let ts = parse_timestamp(&record[time_idx]).ok_or_else(|| IngestError::Parse {
            line,
            message: format!("cannot parse timestamp {:?}", &record[time_idx]),
        })?;
        let lmp: f64 = record[lmp_idx].trim().parse().map_err(|_| IngestError::Parse {
            line,
            message: format!("cannot parse price {:?}", &record[lmp_idx]),
        })?;
        let optional = |idx: Option<usize>, name: &str| -> Result<Option<f64>, IngestError> {
            match idx {
                Some(idx) => {
                    let raw = record[idx].trim();
                    if raw.is_empty() {
                        Ok(None)
                    } else {
                        raw.parse::<f64>().map(Some).map_err(|_| IngestError::Parse {
                            line,
                            message: format!("cannot parse {name} {raw:?}"),
                        })
                    }
                }
                None => Ok(None),
            }
        };
        let rcp = optional(rcp_idx, "rcp")?;
        let rmp = optional(rmp_idx, "rmp")?;
        by_location
            .entry(record[loc_idx].trim().to_string())
            .or_default()
            .push(Row { ts, lmp, rcp, rmp });
    }

    let mut store = PriceStore::default();
    for (location, mut rows) in by_location {
        rows.sort_by_key(|r| r.ts);
        // Average duplicated timestamps.
        let mut timestamps = Vec::new();
        let mut lmp = Vec::new();
        let mut rcp_vals: Vec<Option<f64>> = Vec::new();
        let mut rmp_vals: Vec<Option<f64>> = Vec::new();
        let mut i = 0;
        while i < rows.len() {
            let mut j = i + 1;
            while j < rows.len() && rows[j].ts == rows[i].ts {
                j += 1;
            }
            let group = &rows[i..j];
            let mean = |f: fn(&Row) -> Option<f64>| -> Option<f64> {
                let vals: Vec<f64> = group.iter().filter_map(f).collect();
                if vals.is_empty() {
                    None
                } else {
                    Some(vals.iter().sum::<f64>() / vals.len() as f64)
                }
            };
            timestamps.push(group[0].ts);
            lmp.push(group.iter().map(|r| r.lmp).sum::<f64>() / group.len() as f64);
            rcp_vals.push(mean(|r| r.rcp));
            rmp_vals.push(mean(|r| r.rmp));
            i = j;
        }
        let collapse = |vals: Vec<Option<f64>>, name: &str| -> Result<Option<Vec<f64>>, IngestError> {
            let present = vals.iter().filter(|v| v.is_some()).count();
            if present == 0 {
                Ok(None)
            } else if present == vals.len() {
                Ok(Some(vals.into_iter().map(|v| v.unwrap()).collect()))
            } else {
                Err(IngestError::Invalid(format!(
                    "{name} present for {present} of {} steps in {location}; must be all or none",
                    vals.len()
                )))
            }
        };
        let series = PriceSeries {
            location: location.clone(),
            timestamps,
            lmp,
            rcp: collapse(rcp_vals, "rcp")?,
            rmp: collapse(rmp_vals, "rmp")?,
            source: Some(path.display().to_string()),
        };
        series.validate()?;
        check_grid_aligned(&series)?;
        store.insert(series);
    }
    if store.0.is_empty() {
        return Err(IngestError::Invalid(format!(
            "no data rows in {}",
            path.display()
        )));
    }
    Ok(store)
}

/// All spacings must be integer multiples of the finest one; otherwise the
/// feed mixes intervals and must be cleaned up externally.
fn check_grid_aligned(series: &PriceSeries) -> Result<(), IngestError> {
    if series.len() < 3 {
        return Ok(());
    }
    let base = series
        .timestamps
        .windows(2)
        .map(|w| w[1] - w[0])
        .min()
        .unwrap();
    let base_s = base.num_seconds();
    for w in series.timestamps.windows(2) {
        let d = (w[1] - w[0]).num_seconds();
        if d % base_s != 0 {
            return Err(IngestError::Alignment(format!(
                "mixed sampling intervals near {} ({d}s vs base {base_s}s); \
                 resample the series to a uniform step",
                w[1]
            )));
        }
    }
    Ok(())
}

/// Writes one or more series in the canonical layout
/// `time,location,lmp,rcp,rmp` (empty cells for absent channels).
pub fn write_prices_csv<'a>(
    path: impl AsRef<Path>,
    series: impl IntoIterator<Item = &'a PriceSeries>,
) -> Result<(), IngestError> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["time", "location", "lmp", "rcp", "rmp"])?;
    for s in series {
        for i in 0..s.len() {
            let cell = |v: &Option<Vec<f64>>| match v {
                Some(v) => v[i].to_string(),
                None => String::new(),
            };
            w.write_record([
                s.timestamps[i].format("%Y-%m-%dT%H:%M:%S").to_string(),
                s.location.clone(),
                s.lmp[i].to_string(),
                cell(&s.rcp),
                cell(&s.rmp),
            ])?;
        }
    }
    w.flush().map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(())
}

/// Longest run of missing steps that linear interpolation may bridge.
pub const MAX_INTERPOLATED_GAP: usize = 3;

/// Resamples onto a uniform `dt_hours` grid: holes of up to
/// [`MAX_INTERPOLATED_GAP`] steps are linearly interpolated, finer data is
/// averaged into buckets. Coarser targets must be an integer multiple of the
/// source step and divide the series length evenly, so the time integral of
/// price is preserved exactly.
pub fn resample(series: &PriceSeries, dt_hours: f64) -> Result<PriceSeries, IngestError> {
    series.validate()?;
    check_grid_aligned(series)?;
    if !(dt_hours.is_finite() && dt_hours > 0.0) {
        return Err(IngestError::Invalid(format!("bad step {dt_hours} h")));
    }
    let target = Duration::seconds((dt_hours * 3600.0).round() as i64);

    let base = if series.len() >= 2 {
        series
            .timestamps
            .windows(2)
            .map(|w| w[1] - w[0])
            .min()
            .unwrap()
    } else {
        target
    };

    // Fill the base grid, interpolating short holes.
    let base_s = base.num_seconds();
    let t0 = series.timestamps[0];
    let total = ((*series.timestamps.last().unwrap() - t0).num_seconds() / base_s) as usize + 1;
    let mut grid: Vec<Option<usize>> = vec![None; total];
    for (i, ts) in series.timestamps.iter().enumerate() {
        let k = ((*ts - t0).num_seconds() / base_s) as usize;
        grid[k] = Some(i);
    }
    let channels: Vec<&Vec<f64>> = [Some(&series.lmp), series.rcp.as_ref(), series.rmp.as_ref()]
        .into_iter()
        .flatten()
        .collect();
    let mut filled: Vec<Vec<f64>> = vec![Vec::with_capacity(total); channels.len()];
    let mut timestamps = Vec::with_capacity(total);
    let mut k = 0;
    while k < total {
        timestamps.push(t0 + base * k as i32);
        match grid[k] {
            Some(i) => {
                for (c, ch) in channels.iter().enumerate() {
                    filled[c].push(ch[i]);
                }
                k += 1;
            }
            None => {
                let run_start = k;
                while k < total && grid[k].is_none() {
                    k += 1;
                }
                let run_len = k - run_start;
                if run_len > MAX_INTERPOLATED_GAP {
                    return Err(IngestError::Gap {
                        from: t0 + base * (run_start as i32 - 1),
                        to: t0 + base * k as i32,
                    });
                }
                let prev = grid[run_start - 1].unwrap();
                let next = grid[k].unwrap();
                for step in 0..run_len {
                    let frac = (step + 1) as f64 / (run_len + 1) as f64;
                    for (c, ch) in channels.iter().enumerate() {
                        filled[c].push(ch[prev] + frac * (ch[next] - ch[prev]));
                    }
                    if step > 0 {
                        timestamps.push(t0 + base * (run_start + step) as i32);
                    }
                }
            }
        }
    }

    // Aggregate into the target step.
    let target_s = target.num_seconds();
    if target_s < base_s {
        return Err(IngestError::Alignment(format!(
            "cannot resample {base_s}s data to a finer {target_s}s step"
        )));
    }
    if target_s % base_s != 0 {
        return Err(IngestError::Alignment(format!(
            "target step {target_s}s is not a multiple of the source step {base_s}s"
        )));
    }
    let k = (target_s / base_s) as usize;
    if total % k != 0 {
        return Err(IngestError::Alignment(format!(
            "{total} steps do not divide evenly into buckets of {k}"
        )));
    }
    let buckets = total / k;
    let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(buckets); channels.len()];
    let mut out_ts = Vec::with_capacity(buckets);
    for b in 0..buckets {
        out_ts.push(timestamps[b * k]);
        for (c, ch) in filled.iter().enumerate() {
            let mean = ch[b * k..(b + 1) * k].iter().sum::<f64>() / k as f64;
            out[c].push(mean);
        }
    }

    let mut it = out.into_iter();
    let lmp = it.next().unwrap();
    let rcp = series.rcp.as_ref().map(|_| it.next().unwrap());
    let rmp = series.rmp.as_ref().map(|_| it.next().unwrap());
    Ok(PriceSeries {
        location: series.location.clone(),
        timestamps: out_ts,
        lmp,
        rcp,
        rmp,
        source: series.source.clone(),
    })
}

/// A price-suppression window (both dates inclusive), the scenario analog of
/// a demand collapse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suppression {
    pub from: NaiveDate,
    pub to: NaiveDate,
    pub factor: f64,
}

/// Parameters for [`gen_synthetic`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    pub days: u32,
    pub start_date: NaiveDate,
    #[serde(default = "default_dt")]
    pub dt_hours: f64,
    pub base_price: f64,
    pub daily_amplitude: f64,
    pub noise_sd: f64,
    /// Regulation capacity price as a ratio of |lmp|; omit to skip the
    /// regulation channel.
    #[serde(default)]
    pub reg_price_ratio: Option<f64>,
    #[serde(default)]
    pub suppression: Option<Suppression>,
    #[serde(default = "default_location")]
    pub location: String,
}

fn default_dt() -> f64 {
    1.0
}

fn default_location() -> String {
    "synthetic".into()
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<(), IngestError> {
        if self.days == 0 {
            return Err(IngestError::Invalid("days must be at least 1".into()));
        }
        if !(self.dt_hours > 0.0 && (24.0 / self.dt_hours).fract().abs() < 1e-9) {
            return Err(IngestError::Invalid(format!(
                "dt {} h must divide the day evenly",
                self.dt_hours
            )));
        }
        if !self.base_price.is_finite() || !self.daily_amplitude.is_finite() {
            return Err(IngestError::Invalid("non-finite price parameters".into()));
        }
        if !(self.noise_sd >= 0.0) {
            return Err(IngestError::Invalid("noise level must be >= 0".into()));
        }
        if let Some(r) = self.reg_price_ratio {
            if !(r >= 0.0) {
                return Err(IngestError::Invalid("regulation ratio must be >= 0".into()));
            }
        }
        if let Some(s) = &self.suppression {
            if !(s.factor > 0.0 && s.factor <= 1.0) {
                return Err(IngestError::Invalid(format!(
                    "suppression factor {} outside (0, 1]",
                    s.factor
                )));
            }
            if s.to < s.from {
                return Err(IngestError::Invalid("suppression range is reversed".into()));
            }
        }
        Ok(())
    }
}

fn normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller.
    let u1: f64 = rng.gen::<f64>().max(1e-12);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Deterministic synthetic scenario: a diurnal sine over a base price plus
/// noise, an optional suppression window, and an optional regulation
/// capacity channel at `ratio * |lmp|` (clamped at zero).
///
/// The noise pattern repeats on a 365-day cycle, so windows one year apart
/// carry identical pre-suppression prices and cross-year revenue deltas
/// isolate the suppression factor exactly.
///
/// Returns the series plus non-fatal warnings (for instance a parameter
/// combination that drives every price negative).
pub fn gen_synthetic(
    config: &SyntheticConfig,
    seed: u64,
) -> Result<(PriceSeries, Vec<String>), IngestError> {
    config.validate()?;
    let steps_per_day = (24.0 / config.dt_hours).round() as usize;
    let step = Duration::seconds((config.dt_hours * 3600.0).round() as i64);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cycle = 365 * steps_per_day;
    let lmp_noise: Vec<f64> = (0..cycle).map(|_| normal(&mut rng) * config.noise_sd).collect();
    let rcp_noise: Vec<f64> = (0..cycle).map(|_| normal(&mut rng) * config.noise_sd).collect();

    let n = config.days as usize * steps_per_day;
    let mut timestamps = Vec::with_capacity(n);
    let mut lmp = Vec::with_capacity(n);
    let mut rcp = config.reg_price_ratio.map(|_| Vec::with_capacity(n));
    let start = config.start_date.and_hms_opt(0, 0, 0).unwrap();
    for day in 0..config.days as usize {
        let date = config.start_date + Duration::days(day as i64);
        let factor = match &config.suppression {
            Some(s) if date >= s.from && date <= s.to => s.factor,
            _ => 1.0,
        };
        for k in 0..steps_per_day {
            let ts = start + step * (day * steps_per_day + k) as i32;
            let hour = ts.hour() as f64 + ts.minute() as f64 / 60.0;
            let idx = (day % 365) * steps_per_day + k;
            let raw = config.base_price
                + config.daily_amplitude * (2.0 * std::f64::consts::PI * hour / 24.0).sin()
                + lmp_noise[idx];
            timestamps.push(ts);
            lmp.push(factor * raw);
            if let Some(rcp) = &mut rcp {
                let ratio = config.reg_price_ratio.unwrap();
                rcp.push(factor * (ratio * raw.abs() + rcp_noise[idx]).max(0.0));
            }
        }
    }

    let mut warnings = Vec::new();
    if lmp.iter().all(|&v| v < 0.0) {
        warnings.push(
            "every generated price is negative; check base price and amplitude".to_string(),
        );
    }
    let series = PriceSeries {
        location: config.location.clone(),
        timestamps,
        lmp,
        rcp,
        rmp: None,
        source: Some(format!("synthetic seed={seed}")),
    };
    series.validate()?;
    Ok((series, warnings))
}

/// Steps per day for a given resolution, erroring when the day does not
/// divide evenly.
pub fn steps_per_day(dt_hours: f64) -> Result<usize, IngestError> {
    if dt_hours <= 0.0 || !dt_hours.is_finite() {
        return Err(IngestError::Invalid(format!("bad step {dt_hours} h")));
    }
    let steps = 24.0 / dt_hours;
    if (steps - steps.round()).abs() > 1e-9 {
        return Err(IngestError::Invalid(format!(
            "step {dt_hours} h does not divide a 24 h day"
        )));
    }
    Ok(steps.round() as usize)
}
