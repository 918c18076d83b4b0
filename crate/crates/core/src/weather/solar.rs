//! Sun position, irradiance on vertical walls, and overhang/fin shading.

use serde::{Deserialize, Serialize};

use super::{HourlyRecord, Location};
use crate::plan::ShadingDevice;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SunPosition {
    /// Degrees above the horizon.
    pub altitude: f64,
    /// Degrees clockwise from North, in `[0, 360)`.
    pub azimuth: f64,
}

impl SunPosition {
    pub fn is_up(&self) -> bool {
        self.altitude > 0.0
    }
}

/// Solar declination in degrees (Cooper).
pub fn declination(day_of_year: u32) -> f64 {
    23.45 * (360.0 * (284.0 + day_of_year as f64) / 365.0).to_radians().sin()
}

/// Equation of time in minutes (Spencer series).
pub fn equation_of_time(day_of_year: u32) -> f64 {
    let b = (360.0 * (day_of_year as f64 - 1.0) / 365.0).to_radians();
    229.18
        * (0.000075 + 0.001868 * b.cos() - 0.032077 * b.sin() - 0.014615 * (2.0 * b).cos()
            - 0.040849 * (2.0 * b).sin())
}

/// Apparent solar time in hours for local standard clock time `hour`.
pub fn solar_time(location: &Location, day_of_year: u32, hour: f64) -> f64 {
    let meridian = 15.0 * location.timezone;
    hour + (4.0 * (location.longitude - meridian) + equation_of_time(day_of_year)) / 60.0
}

/// Sun position at local standard clock time `hour` (fractional hours) on `day_of_year`.
pub fn sun_position(location: &Location, day_of_year: u32, hour: f64) -> SunPosition {
    let lat = location.latitude.to_radians();
    let dec = declination(day_of_year).to_radians();
    let hour_angle = (15.0 * (solar_time(location, day_of_year, hour) - 12.0)).to_radians();

    let sin_alt = lat.sin() * dec.sin() + lat.cos() * dec.cos() * hour_angle.cos();
    let altitude = sin_alt.clamp(-1.0, 1.0).asin().to_degrees();
    // Azimuth from south, positive toward west, then shifted to north-clockwise.
    let from_south = hour_angle
        .sin()
        .atan2(hour_angle.cos() * lat.sin() - dec.tan() * lat.cos());
    let azimuth = crate::plan::normalize_degrees(from_south.to_degrees() + 180.0);
    SunPosition { altitude, azimuth }
}

/// Signed horizontal angle between the sun and a wall normal, in `(-180, 180]`.
pub fn surface_solar_azimuth(sun: &SunPosition, wall_azimuth: f64) -> f64 {
    let d = (sun.azimuth - wall_azimuth).rem_euclid(360.0);
    if d > 180.0 {
        d - 360.0
    } else {
        d
    }
}

/// Cosine of the beam incidence angle on a vertical wall (may be negative).
pub fn incidence_cosine(sun: &SunPosition, wall_azimuth: f64) -> f64 {
    sun.altitude.to_radians().cos() * surface_solar_azimuth(sun, wall_azimuth).to_radians().cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WallIrradiance {
    pub direct: f64,
    pub diffuse: f64,
}

impl WallIrradiance {
    pub fn total(&self) -> f64 {
        self.direct + self.diffuse
    }
}

/// Beam plus isotropic-sky diffuse irradiance on a vertical wall.
pub fn irradiance_on_wall(record: &HourlyRecord, sun: &SunPosition, wall_azimuth: f64) -> WallIrradiance {
    let direct = if sun.is_up() {
        record.direct_normal * incidence_cosine(sun, wall_azimuth).max(0.0)
    } else {
        0.0
    };
    WallIrradiance {
        direct,
        diffuse: 0.5 * record.diffuse_horizontal,
    }
}

/// Fraction of the direct beam on a `width` x `height` window blocked by its
/// overhang and fins. Fin sides are as seen from outside, facing the window.
pub fn shading_fraction(
    device: &ShadingDevice,
    width: f64,
    height: f64,
    sun: &SunPosition,
    wall_azimuth: f64,
) -> f64 {
    let gamma = surface_solar_azimuth(sun, wall_azimuth);
    if !sun.is_up() || gamma.abs() >= 90.0 || width <= 0.0 || height <= 0.0 {
        return 0.0;
    }
    let gamma_r = gamma.to_radians();
    let tan_profile = sun.altitude.to_radians().tan() / gamma_r.cos();

    // Overhang: band across the full width, from the head down.
    let band_h = (device.overhang_depth * tan_profile).clamp(0.0, height);
    // Fin on the side the sun comes from: band over the full height.
    let fin_depth = if gamma > 0.0 {
        device.left_fin_depth
    } else {
        device.right_fin_depth
    };
    let band_w = (fin_depth * gamma_r.tan().abs()).clamp(0.0, width);

    let union = band_h * width + band_w * height - band_h * band_w;
    (union / (width * height)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plan::OpeningId;

    fn loc(latitude: f64, longitude: f64, timezone: f64) -> Location {
        Location {
            city: "test".into(),
            latitude,
            longitude,
            timezone,
            altitude: 0.0,
        }
    }

    /// Clock hour at which apparent solar time is noon.
    fn solar_noon(l: &Location, day: u32) -> f64 {
        12.0 - (solar_time(l, day, 12.0) - 12.0)
    }

    #[test]
    fn equator_equinox_noon_is_overhead() {
        let l = loc(0.0, 0.0, 0.0);
        let day = 81;
        let p = sun_position(&l, day, solar_noon(&l, day));
        assert!((p.altitude - 90.0).abs() < 1.0, "{p:?}");
    }

    #[test]
    fn porto_solstice_noon_altitude() {
        let l = loc(41.23, -8.68, 0.0);
        let p = sun_position(&l, 172, solar_noon(&l, 172));
        assert!((p.altitude - 72.2).abs() < 1.0, "{p:?}");
        assert!((p.azimuth - 180.0).abs() < 0.5, "{p:?}");
    }

    #[test]
    fn midnight_sun_is_down() {
        for (lat, day) in [(41.23, 172), (0.0, 81), (-33.0, 355), (60.0, 10)] {
            let l = loc(lat, 0.0, 0.0);
            let noon = solar_noon(&l, day);
            let p = sun_position(&l, day, noon + 12.0);
            assert!(p.altitude < 0.0, "{lat} {day} {p:?}");
        }
    }

    #[test]
    fn morning_sun_is_east() {
        let l = loc(41.23, -8.68, 0.0);
        let p = sun_position(&l, 172, solar_noon(&l, 172) - 3.0);
        assert!(p.azimuth > 45.0 && p.azimuth < 180.0, "{p:?}");
    }

    fn rec(dni: f64, dhi: f64) -> HourlyRecord {
        HourlyRecord {
            month: 1,
            day: 1,
            hour: 1,
            dry_bulb: 10.0,
            direct_normal: dni,
            diffuse_horizontal: dhi,
            wind_speed: 0.0,
        }
    }

    #[test]
    fn irradiance_examples() {
        let behind = SunPosition { altitude: 30.0, azimuth: 0.0 };
        assert_eq!(irradiance_on_wall(&rec(800.0, 100.0), &behind, 180.0).total(), 50.0);

        let grazing = SunPosition { altitude: 0.0, azimuth: 180.0 };
        let low = SunPosition { altitude: 1e-9, azimuth: 180.0 };
        let i = irradiance_on_wall(&rec(800.0, 100.0), &low, 180.0);
        assert!((i.total() - 850.0).abs() < 1e-6);
        // Exactly on the horizon the beam is not counted.
        assert_eq!(irradiance_on_wall(&rec(800.0, 100.0), &grazing, 180.0).direct, 0.0);

        let night = SunPosition { altitude: -20.0, azimuth: 0.0 };
        assert_eq!(irradiance_on_wall(&rec(0.0, 0.0), &night, 90.0).total(), 0.0);
    }

    fn device(overhang: f64, left: f64, right: f64) -> ShadingDevice {
        ShadingDevice {
            opening: OpeningId(1),
            overhang_depth: overhang,
            left_fin_depth: left,
            right_fin_depth: right,
        }
    }

    #[test]
    fn bare_window_is_unshaded() {
        let sun = SunPosition { altitude: 40.0, azimuth: 200.0 };
        assert_eq!(shading_fraction(&device(0.0, 0.0, 0.0), 1.5, 1.2, &sun, 180.0), 0.0);
    }

    #[test]
    fn overhang_example() {
        // Sun straight in front: profile angle equals altitude.
        let sun = SunPosition { altitude: 60.0, azimuth: 180.0 };
        let f = shading_fraction(&device(0.5, 0.0, 0.0), 1.5, 1.2, &sun, 180.0);
        assert!((f - 0.5 * 3f64.sqrt() / 1.2).abs() < 1e-12, "{f}");
        assert!((f - 0.722).abs() < 5e-4);

        let full = 1.2 / 60f64.to_radians().tan();
        let f = shading_fraction(&device(full, 0.0, 0.0), 1.5, 1.2, &sun, 180.0);
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fins_act_on_the_sunny_side_only() {
        // Sun 30 degrees clockwise of a south wall normal: west of south.
        let sun = SunPosition { altitude: 20.0, azimuth: 210.0 };
        let left = shading_fraction(&device(0.0, 0.6, 0.0), 1.5, 1.2, &sun, 180.0);
        let right = shading_fraction(&device(0.0, 0.0, 0.6), 1.5, 1.2, &sun, 180.0);
        assert!((left - 0.6 * 30f64.to_radians().tan() / 1.5).abs() < 1e-12);
        assert_eq!(right, 0.0);
    }

    #[test]
    fn overhang_and_fin_union_not_double_counted() {
        let sun = SunPosition { altitude: 45.0, azimuth: 225.0 };
        let both = shading_fraction(&device(0.6, 0.6, 0.0), 1.0, 1.0, &sun, 180.0);
        let oh = shading_fraction(&device(0.6, 0.0, 0.0), 1.0, 1.0, &sun, 180.0);
        let fin = shading_fraction(&device(0.0, 0.6, 0.0), 1.0, 1.0, &sun, 180.0);
        assert!((both - (oh + fin - oh * fin)).abs() < 1e-12);
        assert!(both < oh + fin);
    }

    #[test]
    fn sun_behind_wall_gives_zero() {
        let sun = SunPosition { altitude: 30.0, azimuth: 10.0 };
        assert_eq!(shading_fraction(&device(0.9, 0.9, 0.9), 1.5, 1.2, &sun, 180.0), 0.0);
    }
}
