//! EnergyPlus weather (EPW) reading and writing.
//!
//! Only the fields the simulator uses are interpreted. Rows are expected to
//! carry the standard 35 comma-separated fields.

use std::fmt::Write as _;

use super::{HourlyRecord, Location, WeatherYear, HOURS_PER_YEAR};
use crate::error::{Error, Result};

pub const EPW_FIELD_COUNT: usize = 35;

const DRY_BULB: usize = 6;
const DIRECT_NORMAL: usize = 14;
const DIFFUSE_HORIZONTAL: usize = 15;
const WIND_SPEED: usize = 21;

const MISSING_TEMPERATURE: f64 = 99.9;
const MISSING_RADIATION: f64 = 9999.0;
const MISSING_WIND: f64 = 999.0;

fn epw_err(line: usize, message: impl Into<String>) -> Error {
    Error::Epw {
        line,
        message: message.into(),
    }
}

fn parse_field<T: std::str::FromStr>(fields: &[&str], idx: usize, line: usize, what: &str) -> Result<T> {
    fields[idx]
        .trim()
        .parse()
        .map_err(|_| epw_err(line, format!("field {} ({what}) is not a number: {:?}", idx + 1, fields[idx])))
}

fn parse_location(header: &str, line: usize) -> Result<Location> {
    let fields: Vec<&str> = header.split(',').collect();
    if fields.first().map(|f| f.trim()) != Some("LOCATION") {
        return Err(epw_err(line, "expected LOCATION header"));
    }
    if fields.len() < 10 {
        return Err(epw_err(line, format!("LOCATION header has {} fields, expected 10", fields.len())));
    }
    Ok(Location {
        city: fields[1].trim().to_string(),
        latitude: parse_field(&fields, 6, line, "latitude")?,
        longitude: parse_field(&fields, 7, line, "longitude")?,
        timezone: parse_field(&fields, 8, line, "time zone")?,
        altitude: parse_field(&fields, 9, line, "elevation")?,
    })
}

struct RawRow {
    line: usize,
    month: u32,
    day: u32,
    hour: u32,
    dry_bulb: Option<f64>,
    direct_normal: Option<f64>,
    diffuse_horizontal: Option<f64>,
    wind_speed: Option<f64>,
}

fn sentinel(v: f64, missing: f64) -> Option<f64> {
    (v < missing).then_some(v)
}

/// Fills `None`s with the previous value; leading gaps take the first value seen.
fn carry_forward(values: Vec<Option<f64>>, what: &str) -> Result<Vec<f64>> {
    let first = values
        .iter()
        .flatten()
        .next()
        .copied()
        .ok_or_else(|| epw_err(0, format!("every {what} value is missing")))?;
    let mut last = first;
    Ok(values
        .into_iter()
        .map(|v| {
            if let Some(v) = v {
                last = v;
            }
            last
        })
        .collect())
}

/// Parses an EPW document into an hourly weather year.
pub fn parse_epw(text: &str) -> Result<WeatherYear> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| epw_err(1, "empty weather file"))?;
    let location = parse_location(header, 1)?;

    let mut rows = Vec::with_capacity(HOURS_PER_YEAR);
    let mut last_line = 1;
    for (line, content) in lines {
        last_line = line;
        let content = content.trim_end();
        if content.is_empty() {
            continue;
        }
        let starts_numeric = content
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_digit() || c == '-');
        if !starts_numeric {
            if !rows.is_empty() {
                return Err(epw_err(line, "header line inside data section"));
            }
            continue;
        }
        let fields: Vec<&str> = content.split(',').collect();
        if fields.len() != EPW_FIELD_COUNT {
            return Err(epw_err(
                line,
                format!("expected {EPW_FIELD_COUNT} fields, found {}", fields.len()),
            ));
        }
        if rows.len() == HOURS_PER_YEAR {
            return Err(epw_err(line, format!("more than the expected {HOURS_PER_YEAR} hourly records")));
        }
        rows.push(RawRow {
            line,
            month: parse_field(&fields, 1, line, "month")?,
            day: parse_field(&fields, 2, line, "day")?,
            hour: parse_field(&fields, 3, line, "hour")?,
            dry_bulb: sentinel(parse_field(&fields, DRY_BULB, line, "dry bulb")?, MISSING_TEMPERATURE),
            direct_normal: sentinel(
                parse_field(&fields, DIRECT_NORMAL, line, "direct normal")?,
                MISSING_RADIATION,
            ),
            diffuse_horizontal: sentinel(
                parse_field(&fields, DIFFUSE_HORIZONTAL, line, "diffuse horizontal")?,
                MISSING_RADIATION,
            ),
            wind_speed: sentinel(parse_field(&fields, WIND_SPEED, line, "wind speed")?, MISSING_WIND),
        });
    }
    if rows.len() != HOURS_PER_YEAR {
        return Err(epw_err(
            last_line,
            format!("found {} hourly records, expected {HOURS_PER_YEAR}", rows.len()),
        ));
    }

    for r in &rows {
        if let Some(t) = r.dry_bulb {
            if !(-60.0..=60.0).contains(&t) {
                return Err(epw_err(r.line, format!("dry bulb {t} outside [-60, 60]")));
            }
        }
        for v in [r.direct_normal, r.diffuse_horizontal, r.wind_speed].into_iter().flatten() {
            if v < 0.0 {
                return Err(epw_err(r.line, format!("negative value {v}")));
            }
        }
    }

    let dry = carry_forward(rows.iter().map(|r| r.dry_bulb).collect(), "dry bulb")?;
    let dni = carry_forward(rows.iter().map(|r| r.direct_normal).collect(), "direct normal")?;
    let dhi = carry_forward(rows.iter().map(|r| r.diffuse_horizontal).collect(), "diffuse horizontal")?;
    let wind = carry_forward(rows.iter().map(|r| r.wind_speed).collect(), "wind speed")?;

    let records = rows
        .iter()
        .enumerate()
        .map(|(i, r)| HourlyRecord {
            month: r.month,
            day: r.day,
            hour: r.hour,
            dry_bulb: dry[i],
            direct_normal: dni[i],
            diffuse_horizontal: dhi[i],
            wind_speed: wind[i],
        })
        .collect();
    WeatherYear::new(location, records)
}

/// Writes a complete EPW document. Fields the simulator does not use are
/// filled with EPW missing-value codes or neutral constants.
pub fn write_epw(year: &WeatherYear, comment: &str) -> String {
    let loc = &year.location;
    let mut out = String::with_capacity(HOURS_PER_YEAR * 120);
    let _ = writeln!(
        out,
        "LOCATION,{},-,-,synthetic,000000,{},{},{},{}",
        loc.city, loc.latitude, loc.longitude, loc.timezone, loc.altitude
    );
    out.push_str("DESIGN CONDITIONS,0\n");
    out.push_str("TYPICAL/EXTREME PERIODS,0\n");
    out.push_str("GROUND TEMPERATURES,0\n");
    out.push_str("HOLIDAYS/DAYLIGHT SAVINGS,No,0,0,0\n");
    let _ = writeln!(out, "COMMENTS 1,{}", comment.replace(',', ";"));
    out.push_str("COMMENTS 2,\n");
    out.push_str("DATA PERIODS,1,1,Data,Sunday, 1/ 1,12/31\n");
    for (i, r) in year.records.iter().enumerate() {
        let sun = year.sun_at(i);
        let ghi = (r.diffuse_horizontal + r.direct_normal * sun.altitude.to_radians().sin().max(0.0)).round();
        let _ = writeln!(
            out,
            "2005,{},{},{},60,*,{},{:.1},70,101325,9999,9999,9999,{},{},{},999999,999999,999999,9999,0,{},5,5,9999,99999,9,999999999,0,0,0,88,0.2,0,0",
            r.month,
            r.day,
            r.hour,
            r.dry_bulb,
            r.dry_bulb - 5.0,
            ghi,
            r.direct_normal,
            r.diffuse_horizontal,
            r.wind_speed
        );
    }
    out
}
