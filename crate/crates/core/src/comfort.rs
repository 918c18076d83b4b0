//! Adaptive comfort band, occupancy schedules and the annual discomfort penalty.
//!
//! Hours map to schedule slots in local standard time: slot 1 covers
//! 00:00-01:00 and slot 24 covers 23:00-24:00, so 0-based hour index `i`
//! falls in slot `i % 24 + 1`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plan::{SpaceFunction, SpaceId};
use crate::thermal::ZoneSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ComfortCategory {
    I,
    #[default]
    II,
    III,
}

impl ComfortCategory {
    /// Half-width of the band around the comfort temperature (K).
    pub fn half_width(self) -> f64 {
        match self {
            ComfortCategory::I => 2.0,
            ComfortCategory::II => 3.0,
            ComfortCategory::III => 4.0,
        }
    }
}

/// What to do with running-mean temperatures below the adaptive validity range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LowTrmPolicy {
    /// Clamp the running mean into `[10, 30]` and keep the adaptive formula.
    #[default]
    Clamp,
    /// Use a fixed 20-25 °C band on days with a running mean below 10 °C.
    StaticBand,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ComfortConfig {
    pub category: ComfortCategory,
    pub low_trm: LowTrmPolicy,
    pub running_mean_alpha: f64,
}

impl Default for ComfortConfig {
    fn default() -> Self {
        ComfortConfig {
            category: ComfortCategory::II,
            low_trm: LowTrmPolicy::Clamp,
            running_mean_alpha: crate::weather::DEFAULT_RUNNING_MEAN_ALPHA,
        }
    }
}

/// Comfort temperature for a daily running-mean outdoor temperature.
pub fn adaptive_comfort_temperature(trm: f64) -> f64 {
    0.33 * trm.clamp(10.0, 30.0) + 18.8
}

/// Daily lower and upper comfort limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComfortBand {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ComfortBand {
    pub fn constant(days: usize, lower: f64, upper: f64) -> Self {
        ComfortBand {
            lower: vec![lower; days],
            upper: vec![upper; days],
        }
    }

    pub fn days(&self) -> usize {
        self.lower.len()
    }
}

pub fn comfort_band(trm: &[f64], config: &ComfortConfig) -> ComfortBand {
    let half = config.category.half_width();
    let (lower, upper) = trm
        .iter()
        .map(|&t| {
            if config.low_trm == LowTrmPolicy::StaticBand && t < 10.0 {
                (20.0, 25.0)
            } else {
                let c = adaptive_comfort_temperature(t);
                (c - half, c + half)
            }
        })
        .unzip();
    ComfortBand { lower, upper }
}

/// Builds the band for a weather year's daily means.
pub fn comfort_band_for(weather: &crate::weather::WeatherYear, config: &ComfortConfig) -> Result<ComfortBand> {
    let trm = crate::weather::running_mean(&weather.daily_means(), config.running_mean_alpha)?;
    Ok(comfort_band(&trm, config))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    /// Weight per degree below the band.
    pub w1: f64,
    /// Weight per degree above the band.
    pub w2: f64,
    /// Factor for occupied hours.
    pub o: f64,
    /// Factor for unoccupied hours.
    pub v: f64,
}

impl Default for PenaltyWeights {
    fn default() -> Self {
        PenaltyWeights {
            w1: 1.0,
            w2: 1.0,
            o: 1.0,
            v: 0.3,
        }
    }
}

impl PenaltyWeights {
    pub fn scaled(&self, k: f64) -> Self {
        PenaltyWeights {
            w1: self.w1 * k,
            w2: self.w2 * k,
            o: self.o * k,
            v: self.v * k,
        }
    }

    pub fn check(&self) -> Result<()> {
        if [self.w1, self.w2, self.o, self.v].iter().all(|w| w.is_finite() && *w >= 0.0) {
            Ok(())
        } else {
            Err(Error::Config(format!("penalty weights must be finite and non-negative: {self:?}")))
        }
    }
}

/// Weighted distance of `t` outside `[t1, t2]`; zero on the edges.
pub fn discomfort(t: f64, t1: f64, t2: f64, weights: &PenaltyWeights) -> f64 {
    if t < t1 {
        weights.w1 * (t1 - t)
    } else if t > t2 {
        weights.w2 * (t - t2)
    } else {
        0.0
    }
}

/// Schedule slot (1..=24) of a 0-based hour index.
pub fn slot_of_hour(hour_index: usize) -> usize {
    hour_index % 24 + 1
}

/// Occupancy and internal gains of one space function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceSchedule {
    pub function: SpaceFunction,
    /// Occupied slots, 1..=24.
    pub occupied_slots: Vec<u8>,
    /// Occupants of the first, second, ... space of this function; the last
    /// entry applies to any further instances.
    pub occupants: Vec<u32>,
    /// Heat gain per occupant (W).
    pub activity_gain: f64,
    /// Lighting and equipment gain while on (W/m²).
    pub lighting_gain: f64,
    pub lighting_slots: Vec<u8>,
}

fn slot_mask(slots: &[u8]) -> [bool; 24] {
    let mut mask = [false; 24];
    for &s in slots {
        if (1..=24).contains(&s) {
            mask[s as usize - 1] = true;
        }
    }
    mask
}

impl SpaceSchedule {
    pub fn occupied_mask(&self) -> [bool; 24] {
        slot_mask(&self.occupied_slots)
    }

    pub fn lighting_mask(&self) -> [bool; 24] {
        slot_mask(&self.lighting_slots)
    }

    pub fn occupants_for(&self, ordinal: usize) -> u32 {
        self.occupants
            .get(ordinal)
            .or(self.occupants.last())
            .copied()
            .unwrap_or(0)
    }

    /// Internal gains (W) for each slot, for a space of `floor_area` m².
    pub fn hourly_gains(&self, ordinal: usize, floor_area: f64) -> [f64; 24] {
        let occ = self.occupied_mask();
        let lit = self.lighting_mask();
        let people = self.occupants_for(ordinal) as f64 * self.activity_gain;
        std::array::from_fn(|k| {
            (if occ[k] { people } else { 0.0 }) + (if lit[k] { self.lighting_gain * floor_area } else { 0.0 })
        })
    }

    pub fn check(&self) -> Result<()> {
        let slots_ok = self
            .occupied_slots
            .iter()
            .chain(&self.lighting_slots)
            .all(|s| (1..=24).contains(s));
        if !slots_ok {
            return Err(Error::Config(format!("{:?}: schedule slots must lie in 1..=24", self.function)));
        }
        if !(self.activity_gain >= 0.0 && self.lighting_gain >= 0.0) {
            return Err(Error::Config(format!("{:?}: gains must be non-negative", self.function)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyModel {
    pub schedules: Vec<SpaceSchedule>,
}

impl OccupancyModel {
    /// Residential schedules of the bundled case study.
    pub fn case_study() -> Self {
        let day: Vec<u8> = vec![8, 13, 14, 15, 19, 20, 21, 23];
        let afternoon: Vec<u8> = vec![13, 14, 15, 19, 20, 21, 23];
        let evening: Vec<u8> = vec![13, 14, 15, 19, 20, 21, 22, 23, 24];
        let all: Vec<u8> = (1..=24).collect();
        let s = |function, occupied: &[u8], occupants: Vec<u32>, activity, lighting, lit: &[u8]| SpaceSchedule {
            function,
            occupied_slots: occupied.to_vec(),
            occupants,
            activity_gain: activity,
            lighting_gain: lighting,
            lighting_slots: lit.to_vec(),
        };
        OccupancyModel {
            schedules: vec![
                s(SpaceFunction::Hall, &day, vec![2], 190.0, 7.0, &day),
                s(SpaceFunction::Kitchen, &day, vec![2], 190.0, 10.0, &day),
                s(SpaceFunction::LivingRoom, &evening, vec![5], 110.0, 10.0, &evening),
                s(SpaceFunction::Bathroom, &day, vec![1], 207.0, 7.0, &day),
                s(SpaceFunction::Corridor, &afternoon, vec![2], 190.0, 7.0, &afternoon),
                s(SpaceFunction::Bedroom, &all, vec![2, 2, 1], 72.0, 7.0, &evening),
            ],
        }
    }

    pub fn schedule(&self, function: SpaceFunction) -> Option<&SpaceSchedule> {
        self.schedules.iter().find(|s| s.function == function)
    }

    pub fn check(&self) -> Result<()> {
        self.schedules.iter().try_for_each(SpaceSchedule::check)
    }
}

/// `o` when a space of `function` is occupied during 1-based `hour` of the year, else `v`.
pub fn occupancy_factor(
    function: SpaceFunction,
    hour: usize,
    model: &OccupancyModel,
    weights: &PenaltyWeights,
) -> Result<f64> {
    let schedule = model.schedule(function).ok_or_else(|| Error::MissingSchedule {
        space: function.label().to_string(),
        function,
    })?;
    let slot = (hour.max(1) - 1) % 24 + 1;
    Ok(if schedule.occupied_mask()[slot - 1] {
        weights.o
    } else {
        weights.v
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacePenalty {
    pub space: SpaceId,
    pub function: SpaceFunction,
    pub penalty: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyReport {
    pub total: f64,
    pub per_space: Vec<SpacePenalty>,
    pub per_day: Vec<f64>,
}

impl PenaltyReport {
    /// Sum of the daily penalties over the given 1-based months.
    pub fn months_total(&self, months: std::ops::RangeInclusive<u32>) -> f64 {
        months
            .flat_map(crate::weather::month_days)
            .filter_map(|d| self.per_day.get(d))
            .sum()
    }

    pub fn per_day_csv(&self) -> String {
        let mut out = String::from("day,penalty\n");
        for (d, p) in self.per_day.iter().enumerate() {
            let _ = writeln!(out, "{},{p:.6}", d + 1);
        }
        out
    }
}

/// Occupancy-weighted discomfort summed over every zone and hour of `series`.
pub fn thermal_penalty(
    series: &ZoneSeries,
    band: &ComfortBand,
    model: &OccupancyModel,
    weights: &PenaltyWeights,
) -> Result<PenaltyReport> {
    let hours = series.hours();
    let days = hours.div_ceil(24);
    if band.days() < days || band.upper.len() != band.lower.len() {
        return Err(Error::SeriesMismatch(format!(
            "comfort band covers {} days, series needs {days}",
            band.days()
        )));
    }
    let mut per_day = vec![0.0; days];
    let mut per_space = Vec::with_capacity(series.zones.len());
    for (zone, temps) in series.zones.iter().zip(&series.temperatures) {
        let schedule = model.schedule(zone.function).ok_or_else(|| Error::MissingSchedule {
            space: zone.space.to_string(),
            function: zone.function,
        })?;
        let occupied = schedule.occupied_mask();
        let mut space_total = 0.0;
        for (d, day) in temps.chunks(24).enumerate() {
            let mut day_total = 0.0;
            for (h, &t) in day.iter().enumerate() {
                let factor = if occupied[h] { weights.o } else { weights.v };
                day_total += discomfort(t, band.lower[d], band.upper[d], weights) * factor;
            }
            per_day[d] += day_total;
            space_total += day_total;
        }
        per_space.push(SpacePenalty {
            space: zone.space,
            function: zone.function,
            penalty: space_total,
        });
    }
    let total = per_space.iter().map(|s| s.penalty).sum();
    Ok(PenaltyReport {
        total,
        per_space,
        per_day,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermal::ZoneInfo;

    #[test]
    fn band_examples() {
        let cfg = ComfortConfig::default();
        let band = comfort_band(&[20.0, 35.0, 0.0], &cfg);
        assert!((band.lower[0] - 22.4).abs() < 1e-12 && (band.upper[0] - 28.4).abs() < 1e-12);
        assert!((band.lower[1] - 25.7).abs() < 1e-12 && (band.upper[1] - 31.7).abs() < 1e-12);
        for d in 0..3 {
            assert!((band.upper[d] - band.lower[d] - 6.0).abs() < 1e-12);
        }
        let stat = comfort_band(&[5.0, 20.0], &ComfortConfig { low_trm: LowTrmPolicy::StaticBand, ..cfg });
        assert_eq!((stat.lower[0], stat.upper[0]), (20.0, 25.0));
        assert!((stat.lower[1] - 22.4).abs() < 1e-12);
    }

    #[test]
    fn discomfort_branches() {
        let w = PenaltyWeights::default();
        assert_eq!(discomfort(18.0, 20.0, 26.0, &w), 2.0);
        assert_eq!(discomfort(28.5, 20.0, 26.0, &w), 2.5);
        assert_eq!(discomfort(23.0, 20.0, 26.0, &w), 0.0);
        assert_eq!(discomfort(20.0, 20.0, 26.0, &w), 0.0);
        assert_eq!(discomfort(26.0, 20.0, 26.0, &w), 0.0);
    }

    #[test]
    fn occupancy_examples() {
        let m = OccupancyModel::case_study();
        let w = PenaltyWeights::default();
        // 20:00 ends slot 20; 03:00 ends slot 3.
        assert_eq!(occupancy_factor(SpaceFunction::LivingRoom, 20, &m, &w).unwrap(), 1.0);
        assert_eq!(occupancy_factor(SpaceFunction::LivingRoom, 21, &m, &w).unwrap(), 1.0);
        assert_eq!(occupancy_factor(SpaceFunction::LivingRoom, 3, &m, &w).unwrap(), 0.3);
        for h in 1..=48 {
            assert_eq!(occupancy_factor(SpaceFunction::Bedroom, h, &m, &w).unwrap(), 1.0);
        }
        let empty = OccupancyModel { schedules: vec![] };
        assert!(matches!(
            occupancy_factor(SpaceFunction::Hall, 1, &empty, &w),
            Err(Error::MissingSchedule { .. })
        ));
    }

    #[test]
    fn bedroom_occupants_follow_instance_order() {
        let m = OccupancyModel::case_study();
        let b = m.schedule(SpaceFunction::Bedroom).unwrap();
        assert_eq!((b.occupants_for(0), b.occupants_for(1), b.occupants_for(2), b.occupants_for(5)), (2, 2, 1, 1));
        let gains = b.hourly_gains(2, 10.0);
        assert_eq!(gains[0], 72.0);
        assert_eq!(gains[19], 72.0 + 70.0);
    }

    fn one_zone(temps: Vec<f64>, function: SpaceFunction) -> ZoneSeries {
        let n = temps.len();
        ZoneSeries {
            zones: vec![ZoneInfo {
                space: SpaceId(1),
                function,
                ordinal: 0,
            }],
            temperatures: vec![temps],
            ach: vec![vec![0.0; n]],
        }
    }

    #[test]
    fn penalty_hand_sums() {
        let m = OccupancyModel::case_study();
        let w = PenaltyWeights::default();
        let band = ComfortBand::constant(1, 20.0, 26.0);
        // Living room slots 19..=21 are occupied: hour indices 18..=20.
        let mut temps = vec![23.0; 24];
        for t in &mut temps[18..21] {
            *t = 28.0;
        }
        let r = thermal_penalty(&one_zone(temps, SpaceFunction::LivingRoom), &band, &m, &w).unwrap();
        assert!((r.total - 6.0).abs() < 1e-12);

        let mut temps = vec![23.0; 24];
        for t in &mut temps[2..5] {
            *t = 28.0;
        }
        let r = thermal_penalty(&one_zone(temps, SpaceFunction::LivingRoom), &band, &m, &w).unwrap();
        assert!((r.total - 1.8).abs() < 1e-12);
        assert_eq!(r.per_day.len(), 1);
    }

    #[test]
    fn in_band_year_is_free() {
        let m = OccupancyModel::case_study();
        let band = ComfortBand::constant(365, 20.0, 26.0);
        let r = thermal_penalty(&one_zone(vec![22.0; 8760], SpaceFunction::Kitchen), &band, &m, &Default::default())
            .unwrap();
        assert_eq!(r.total, 0.0);
        assert_eq!(r.per_day.len(), 365);
    }

    #[test]
    fn short_band_is_rejected() {
        let m = OccupancyModel::case_study();
        let band = ComfortBand::constant(1, 20.0, 26.0);
        let err = thermal_penalty(&one_zone(vec![22.0; 48], SpaceFunction::Kitchen), &band, &m, &Default::default());
        assert!(matches!(err, Err(Error::SeriesMismatch(_))));
    }
}
