//! Boundary conditions: outdoor weather and internal gain schedules.
//!
//! Time is measured in seconds since January 1 of year 1, 00:00, on a
//! 365-day calendar. Day 0 is a Monday.

use std::path::{Path, PathBuf};
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::thermal::BoundarySample;

pub const SECONDS_PER_HOUR: f64 = 3600.0;
pub const SECONDS_PER_DAY: f64 = 86_400.0;
pub const DAYS_PER_YEAR: f64 = 365.0;
pub const SECONDS_PER_YEAR: f64 = SECONDS_PER_DAY * DAYS_PER_YEAR;

/// Header expected by [`load_weather_csv`] with the default mapping.
pub const WEATHER_CSV_HEADER: &str = "time_s,t_out_c,solar_wm2";

#[derive(Debug, Error)]
pub enum WeatherError {
    #[error("weather file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("weather file {path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },
    #[error("weather file {path}, row {row}: {reason}")]
    Row {
        path: PathBuf,
        row: usize,
        reason: String,
    },
    #[error("weather file {path}: no data rows")]
    Empty { path: PathBuf },
    #[error("invalid synthetic weather: {0}")]
    Synthetic(String),
    #[error("unknown gain preset `{0}` (expected one of: residential, home_office, none)")]
    UnknownPreset(String),
    #[error("gain schedule value {value} at hour {hour} must be finite and non-negative")]
    Gain { hour: usize, value: f64 },
}

/// Day of year in `[1, 366)`, fractional.
pub fn day_of_year(t: f64) -> f64 {
    1.0 + t.rem_euclid(SECONDS_PER_YEAR) / SECONDS_PER_DAY
}

/// Hour of day in `[0, 24)`, fractional.
pub fn hour_of_day(t: f64) -> f64 {
    t.rem_euclid(SECONDS_PER_DAY) / SECONDS_PER_HOUR
}

/// Two-sinusoid outdoor climate with a clear-sky solar bump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticWeather {
    /// Annual mean outdoor temperature, °C.
    pub t_mean: f64,
    /// Seasonal half-swing, K.
    pub t_annual_amp: f64,
    /// Daily half-swing, K.
    pub t_diurnal_amp: f64,
    /// Peak horizontal irradiance at midsummer noon, W/m².
    pub solar_peak: f64,
    /// Day of year with the lowest seasonal temperature.
    pub coldest_day: f64,
}

impl Default for SyntheticWeather {
    fn default() -> Self {
        Self {
            t_mean: 9.0,
            t_annual_amp: 7.0,
            t_diurnal_amp: 3.0,
            solar_peak: 600.0,
            coldest_day: 32.0,
        }
    }
}

impl SyntheticWeather {
    pub fn validate(&self) -> Result<(), WeatherError> {
        let all = [
            self.t_mean,
            self.t_annual_amp,
            self.t_diurnal_amp,
            self.solar_peak,
            self.coldest_day,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(WeatherError::Synthetic("all parameters must be finite".into()));
        }
        if self.solar_peak < 0.0 {
            return Err(WeatherError::Synthetic(format!(
                "solar_peak {} must be non-negative",
                self.solar_peak
            )));
        }
        Ok(())
    }

    pub fn sample(&self, t: f64) -> (f64, f64) {
        let doy = day_of_year(t);
        let hod = hour_of_day(t);
        let season = TAU * (doy - self.coldest_day) / DAYS_PER_YEAR;
        let t_out = self.t_mean - self.t_annual_amp * season.cos()
            + self.t_diurnal_amp * (TAU * (hod - 9.0) / 24.0).sin();
        let solar = if (6.0..=18.0).contains(&hod) {
            let seasonal = 0.2 + 0.8 * (0.5 - 0.5 * season.cos());
            (self.solar_peak * seasonal * (PI * (hod - 6.0) / 12.0).sin()).max(0.0)
        } else {
            0.0
        };
        (t_out, solar)
    }
}

/// Column names used when reading a weather CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ColumnMapping {
    pub time: String,
    pub t_out: String,
    pub solar: String,
    /// Wrap sample times into a single year when the file spans less than one.
    pub repeat_yearly: bool,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        Self {
            time: "time_s".into(),
            t_out: "t_out_c".into(),
            solar: "solar_wm2".into(),
            repeat_yearly: true,
        }
    }
}

/// Tabulated weather sampled with zero-order hold.
#[derive(Debug, Clone, PartialEq)]
pub struct FileWeather {
    pub path: PathBuf,
    pub mapping: ColumnMapping,
    times: Vec<f64>,
    t_out: Vec<f64>,
    solar: Vec<f64>,
    period: Option<f64>,
}

impl FileWeather {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn sample(&self, t: f64) -> (f64, f64) {
        let t = match self.period {
            Some(p) => t.rem_euclid(p),
            None => t,
        };
        // last sample with time <= t; times before the first sample hold the first row
        let idx = self.times.partition_point(|&x| x <= t).saturating_sub(1);
        (self.t_out[idx], self.solar[idx])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeatherModel {
    Synthetic(SyntheticWeather),
    File(FileWeather),
}

impl Default for WeatherModel {
    fn default() -> Self {
        WeatherModel::Synthetic(SyntheticWeather::default())
    }
}

impl WeatherModel {
    pub fn kind(&self) -> &'static str {
        match self {
            WeatherModel::Synthetic(_) => "synthetic",
            WeatherModel::File(_) => "file",
        }
    }
}

/// Outdoor temperature (°C) and horizontal irradiance (W/m²) at time `t`.
pub fn sample_weather(w: &WeatherModel, t: f64) -> (f64, f64) {
    match w {
        WeatherModel::Synthetic(s) => s.sample(t),
        WeatherModel::File(f) => f.sample(t),
    }
}

pub fn load_weather_csv(path: &Path, mapping: &ColumnMapping) -> Result<WeatherModel, WeatherError> {
    let p = path.to_path_buf();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_to_weather(e, &p))?;
    let headers = reader.headers().map_err(|e| csv_to_weather(e, &p))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| WeatherError::MissingColumn {
                path: p.clone(),
                column: name.to_string(),
            })
    };
    let (ti, oi, si) = (
        column(&mapping.time)?,
        column(&mapping.t_out)?,
        column(&mapping.solar)?,
    );

    let mut times = Vec::new();
    let mut t_out = Vec::new();
    let mut solar = Vec::new();
    for (i, record) in reader.records().enumerate() {
        // header is line 1
        let row = i + 2;
        let record = record.map_err(|e| WeatherError::Row {
            path: p.clone(),
            row,
            reason: e.to_string(),
        })?;
        let field = |idx: usize, name: &str| -> Result<f64, WeatherError> {
            let raw = record.get(idx).unwrap_or("");
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| WeatherError::Row {
                    path: p.clone(),
                    row,
                    reason: format!("`{name}` value {raw:?} is not a finite number"),
                })
        };
        let t = field(ti, &mapping.time)?;
        let temp = field(oi, &mapping.t_out)?;
        let sol = field(si, &mapping.solar)?;
        if sol < 0.0 {
            return Err(WeatherError::Row {
                path: p.clone(),
                row,
                reason: format!("negative irradiance {sol}"),
            });
        }
        if let Some(&prev) = times.last() {
            if t <= prev {
                return Err(WeatherError::Row {
                    path: p.clone(),
                    row,
                    reason: format!("timestamp {t} not strictly after {prev}"),
                });
            }
        }
        times.push(t);
        t_out.push(temp);
        solar.push(sol);
    }
    if times.is_empty() {
        return Err(WeatherError::Empty { path: p });
    }
    let period = (mapping.repeat_yearly && *times.last().unwrap() < SECONDS_PER_YEAR)
        .then_some(SECONDS_PER_YEAR);
    Ok(WeatherModel::File(FileWeather {
        path: p,
        mapping: mapping.clone(),
        times,
        t_out,
        solar,
        period,
    }))
}

fn csv_to_weather(e: csv::Error, path: &Path) -> WeatherError {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => WeatherError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => WeatherError::Row {
            path: path.to_path_buf(),
            row: 1,
            reason: format!("{other:?}"),
        },
    }
}

/// Hourly internal gains for weekdays and weekends, W.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainSchedule {
    pub weekday: [f64; 24],
    pub weekend: [f64; 24],
}

impl GainSchedule {
    pub const PRESETS: [&'static str; 3] = ["residential", "home_office", "none"];

    pub fn zero() -> Self {
        Self {
            weekday: [0.0; 24],
            weekend: [0.0; 24],
        }
    }

    /// Family home: low overnight, morning and evening peaks.
    pub fn residential() -> Self {
        let mut weekday = [150.0; 24];
        weekday[6..9].fill(450.0);
        weekday[17..23].fill(500.0);
        weekday[23] = 250.0;
        let mut weekend = [150.0; 24];
        weekend[7..10].fill(400.0);
        weekend[10..17].fill(350.0);
        weekend[17..23].fill(500.0);
        weekend[23] = 250.0;
        Self { weekday, weekend }
    }

    /// Occupied through the working day as well.
    pub fn home_office() -> Self {
        let mut s = Self::residential();
        s.weekday[9..17].fill(380.0);
        s
    }

    pub fn preset(name: &str) -> Result<Self, WeatherError> {
        match name {
            "residential" => Ok(Self::residential()),
            "home_office" => Ok(Self::home_office()),
            "none" => Ok(Self::zero()),
            other => Err(WeatherError::UnknownPreset(other.to_string())),
        }
    }

    pub fn validate(&self) -> Result<(), WeatherError> {
        for (hour, &value) in self.weekday.iter().chain(self.weekend.iter()).enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(WeatherError::Gain {
                    hour: hour % 24,
                    value,
                });
            }
        }
        Ok(())
    }

    /// Total gains over one Monday-to-Sunday week, J.
    pub fn weekly_energy(&self) -> f64 {
        (5.0 * self.weekday.iter().sum::<f64>() + 2.0 * self.weekend.iter().sum::<f64>())
            * SECONDS_PER_HOUR
    }
}

impl Default for GainSchedule {
    fn default() -> Self {
        Self::residential()
    }
}

/// Gains at time `t` with hourly zero-order hold.
pub fn sample_gains(g: &GainSchedule, t: f64) -> f64 {
    let day = (t / SECONDS_PER_DAY).floor() as i64;
    let hour = (hour_of_day(t) as usize).min(23);
    if day.rem_euclid(7) >= 5 {
        g.weekend[hour]
    } else {
        g.weekday[hour]
    }
}

/// Weather and gains combined into a boundary source.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Boundary {
    pub weather: WeatherModel,
    pub gains: GainSchedule,
}

impl Boundary {
    pub fn new(weather: WeatherModel, gains: GainSchedule) -> Self {
        Self { weather, gains }
    }

    pub fn at(&self, t: f64) -> BoundarySample {
        let (t_out, solar) = sample_weather(&self.weather, t);
        BoundarySample::new(t_out, solar, sample_gains(&self.gains, t))
    }
}
