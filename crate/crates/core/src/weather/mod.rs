//! Hourly weather year, outdoor running-mean temperature and solar geometry.

mod epw;
mod solar;
pub mod synthetic;

use serde::{Deserialize, Serialize};

pub use epw::{parse_epw, write_epw, EPW_FIELD_COUNT};
pub use solar::{
    declination, equation_of_time, incidence_cosine, irradiance_on_wall, shading_fraction, solar_time,
    sun_position, surface_solar_azimuth, SunPosition, WallIrradiance,
};

use crate::error::{Error, Result};

pub const HOURS_PER_YEAR: usize = 8760;
pub const DAYS_PER_YEAR: usize = 365;
/// Running-mean weighting of the previous day's value.
pub const DEFAULT_RUNNING_MEAN_ALPHA: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub city: String,
    pub latitude: f64,
    pub longitude: f64,
    /// Hours from UTC of local standard time.
    pub timezone: f64,
    pub altitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HourlyRecord {
    pub month: u32,
    pub day: u32,
    /// 1..=24, the hour ending at this clock time.
    pub hour: u32,
    pub dry_bulb: f64,
    pub direct_normal: f64,
    pub diffuse_horizontal: f64,
    pub wind_speed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeatherYear {
    pub location: Location,
    pub records: Vec<HourlyRecord>,
}

impl WeatherYear {
    pub fn new(location: Location, records: Vec<HourlyRecord>) -> Result<Self> {
        if records.len() != HOURS_PER_YEAR {
            return Err(Error::Epw {
                line: 0,
                message: format!("weather year has {} records, expected {HOURS_PER_YEAR}", records.len()),
            });
        }
        for (i, r) in records.iter().enumerate() {
            let ok = (-60.0..=60.0).contains(&r.dry_bulb)
                && r.direct_normal >= 0.0
                && r.diffuse_horizontal >= 0.0
                && r.wind_speed >= 0.0;
            if !ok {
                return Err(Error::Epw {
                    line: 0,
                    message: format!("record {} out of range: {r:?}", i + 1),
                });
            }
        }
        Ok(WeatherYear { location, records })
    }

    /// A year with identical conditions every hour.
    pub fn constant(location: Location, dry_bulb: f64, direct_normal: f64, diffuse_horizontal: f64) -> Self {
        let records = (0..HOURS_PER_YEAR)
            .map(|i| {
                let (month, day) = month_day(day_of_year(i));
                HourlyRecord {
                    month,
                    day,
                    hour: (i % 24 + 1) as u32,
                    dry_bulb,
                    direct_normal,
                    diffuse_horizontal,
                    wind_speed: 0.0,
                }
            })
            .collect();
        WeatherYear { location, records }
    }

    /// Sun position at the middle of hour index `i` (0-based).
    pub fn sun_at(&self, i: usize) -> SunPosition {
        sun_position(&self.location, day_of_year(i), (i % 24) as f64 + 0.5)
    }

    pub fn sun_positions(&self) -> Vec<SunPosition> {
        (0..self.records.len()).map(|i| self.sun_at(i)).collect()
    }

    /// Mean dry-bulb temperature of each day.
    pub fn daily_means(&self) -> Vec<f64> {
        self.records
            .chunks(24)
            .map(|day| day.iter().map(|r| r.dry_bulb).sum::<f64>() / day.len() as f64)
            .collect()
    }

    pub fn annual_mean(&self) -> f64 {
        self.records.iter().map(|r| r.dry_bulb).sum::<f64>() / self.records.len() as f64
    }
}

/// 1-based day of year of 0-based hour index `i`.
pub fn day_of_year(i: usize) -> u32 {
    (i / 24) as u32 + 1
}

const MONTH_LENGTHS: [u32; 12] = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];

/// Calendar month (1..=12) and day of month for a non-leap day of year.
pub fn month_day(day_of_year: u32) -> (u32, u32) {
    let mut d = day_of_year;
    for (m, len) in MONTH_LENGTHS.iter().enumerate() {
        if d <= *len {
            return (m as u32 + 1, d);
        }
        d -= len;
    }
    (12, 31)
}

/// 0-based day-of-year ranges `[first, last]` of calendar month `month` (1..=12).
pub fn month_days(month: u32) -> std::ops::RangeInclusive<usize> {
    let start: u32 = MONTH_LENGTHS[..(month - 1) as usize].iter().sum();
    start as usize..=(start + MONTH_LENGTHS[(month - 1) as usize] - 1) as usize
}

/// Exponentially weighted running mean of daily outdoor temperatures:
/// `trm[d] = (1 - alpha) * daily[d - 1] + alpha * trm[d - 1]`.
///
/// The first day is warmed up from the end of the series, as if the year
/// repeated, so January sees the preceding December.
pub fn running_mean(daily: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("running-mean alpha {alpha} not in (0, 1)")));
    }
    let n = daily.len();
    if n < 8 {
        return Err(Error::Config(format!("running mean needs at least 8 daily means, got {n}")));
    }
    // Start from the simple average of the last week, then iterate through
    // the last 30 days (or the whole series when shorter).
    let warm = n.min(30);
    let start = n - warm;
    let seed_from = start.saturating_sub(7);
    let seed_days = &daily[seed_from..seed_from + 7];
    let mut trm = seed_days.iter().sum::<f64>() / seed_days.len() as f64;
    for d in start..n {
        trm = (1.0 - alpha) * daily[d] + alpha * trm;
    }
    let mut out = Vec::with_capacity(n);
    for d in 0..n {
        out.push(trm);
        trm = (1.0 - alpha) * daily[d] + alpha * trm;
    }
    Ok(out)
}
