//! Seeded synthetic weather year.
//!
//! Produces a plausible hourly year for a mild maritime climate: a seasonal
//! temperature cycle with autocorrelated day-to-day anomalies, a diurnal
//! swing that grows on clear days, daily sky states drawn with a summer
//! bias toward clear skies, and beam/diffuse radiation from a clearness
//! index split with the Erbs correlation. The bundled Porto-like file in
//! `data/` was produced by `cargo run -p ventplan-core --example synth_epw`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{day_of_year, month_day, sun_position, HourlyRecord, Location, WeatherYear, HOURS_PER_YEAR};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticClimate {
    pub location: Location,
    pub annual_mean: f64,
    /// Half the difference between the warmest and coldest seasonal daily mean.
    pub seasonal_amplitude: f64,
    /// Day of year (0-based) of the seasonal minimum.
    pub coldest_day: f64,
    pub anomaly_persistence: f64,
    pub anomaly_sd: f64,
    pub base_diurnal_swing: f64,
    pub clear_sky_diurnal_swing: f64,
    pub mean_wind: f64,
}

impl SyntheticClimate {
    pub fn porto() -> Self {
        SyntheticClimate {
            location: Location {
                city: "Porto-synthetic".into(),
                latitude: 41.23,
                longitude: -8.68,
                timezone: 0.0,
                altitude: 73.0,
            },
            annual_mean: 15.0,
            seasonal_amplitude: 4.8,
            coldest_day: 20.0,
            anomaly_persistence: 0.75,
            anomaly_sd: 1.6,
            base_diurnal_swing: 3.0,
            clear_sky_diurnal_swing: 6.0,
            mean_wind: 2.8,
        }
    }
}

fn erbs_diffuse_fraction(kt: f64) -> f64 {
    if kt <= 0.22 {
        1.0 - 0.09 * kt
    } else if kt <= 0.8 {
        0.9511 - 0.1604 * kt + 4.388 * kt.powi(2) - 16.638 * kt.powi(3) + 12.336 * kt.powi(4)
    } else {
        0.165
    }
}

fn round1(v: f64) -> f64 {
    (v * 10.0).round() / 10.0
}

pub fn generate(climate: &SyntheticClimate, seed: u64) -> WeatherYear {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");

    let days = HOURS_PER_YEAR / 24;
    let mut anomaly = 0.0;
    let mut hourly_noise = 0.0;
    let mut records = Vec::with_capacity(HOURS_PER_YEAR);

    for d in 0..days {
        let phase = 2.0 * PI * (d as f64 - climate.coldest_day) / 365.0;
        let summer = 0.5 * (1.0 - phase.cos());
        let seasonal = climate.annual_mean - climate.seasonal_amplitude * phase.cos();

        let p_clear = 0.3 + 0.4 * summer;
        let u: f64 = rng.random();
        let kt_day: f64 = if u < p_clear {
            rng.random_range(0.66..0.76)
        } else if u < p_clear + 0.35 {
            rng.random_range(0.42..0.62)
        } else {
            rng.random_range(0.12..0.32)
        };
        let clearness = ((kt_day - 0.12) / 0.64).clamp(0.0, 1.0);

        anomaly = climate.anomaly_persistence * anomaly + climate.anomaly_sd * unit.sample(&mut rng);
        let day_mean = seasonal + anomaly + 2.5 * (clearness - 0.5) * summer;
        let swing = climate.base_diurnal_swing + climate.clear_sky_diurnal_swing * clearness * (0.7 + 0.3 * summer);

        let n = d as u32 + 1;
        let (month, day) = month_day(n);
        let extraterrestrial = 1367.0 * (1.0 + 0.033 * (2.0 * PI * n as f64 / 365.0).cos());
        for h in 0..24 {
            let i = d * 24 + h;
            debug_assert_eq!(day_of_year(i), n);
            let clock = h as f64 + 0.5;
            hourly_noise = 0.6 * hourly_noise + 0.25 * unit.sample(&mut rng);
            let dry_bulb = day_mean + 0.5 * swing * (2.0 * PI * (clock - 15.0) / 24.0).cos() + hourly_noise;

            let sun = sun_position(&climate.location, n, clock);
            let (dni, dhi) = if sun.altitude > 0.0 {
                let sin_alt = sun.altitude.to_radians().sin();
                let kt = (kt_day * (1.0 + 0.08 * unit.sample(&mut rng))).clamp(0.05, 0.8);
                let ghi = kt * extraterrestrial * sin_alt;
                let dhi = erbs_diffuse_fraction(kt) * ghi;
                let dni = if sun.altitude < 2.0 {
                    0.0
                } else {
                    ((ghi - dhi) / sin_alt).clamp(0.0, 950.0)
                };
                (dni.round(), dhi.round())
            } else {
                (0.0, 0.0)
            };
            let wind = (climate.mean_wind + 1.2 * unit.sample(&mut rng)).clamp(0.0, 12.0);

            records.push(HourlyRecord {
                month,
                day,
                hour: h as u32 + 1,
                dry_bulb: round1(dry_bulb).clamp(-60.0, 60.0),
                direct_normal: dni,
                diffuse_horizontal: dhi,
                wind_speed: round1(wind),
            });
        }
    }
    WeatherYear::new(climate.location.clone(), records).expect("synthetic year within EPW ranges")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let c = SyntheticClimate::porto();
        assert_eq!(generate(&c, 3).records, generate(&c, 3).records);
        assert_ne!(generate(&c, 3).records, generate(&c, 4).records);
    }

    #[test]
    fn seasonal_cycle_is_plausible() {
        let year = generate(&SyntheticClimate::porto(), 1);
        let daily = year.daily_means();
        let jan: f64 = daily[..31].iter().sum::<f64>() / 31.0;
        let jul: f64 = daily[181..212].iter().sum::<f64>() / 31.0;
        assert!(jan > 6.0 && jan < 14.0, "{jan}");
        assert!(jul > 16.0 && jul < 24.0, "{jul}");
        assert!(year.records.iter().all(|r| r.direct_normal <= 950.0));
        // No beam at night.
        for (i, r) in year.records.iter().enumerate() {
            if year.sun_at(i).altitude <= 0.0 {
                assert_eq!(r.direct_normal + r.diffuse_horizontal, 0.0);
            }
        }
    }
}
