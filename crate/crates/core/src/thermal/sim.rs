//! Hourly annual simulation.
//!
//! Zones form a linear conduction and air-exchange network whose
//! coefficients are frozen over each hour, or until the ventilation control
//! changes an opening; each step is exact, so a single zone relaxes as
//! `T_eq + (T - T_eq)·exp(-K·dt/C)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::airflow::{LinkEnd, LinkKind, AIR_HEAT_CAPACITY};
use super::model::ThermalModel;
use super::{ZoneInfo, ZoneSeries};
use crate::error::{Error, Result};
use crate::weather::{irradiance_on_wall, shading_fraction, SunPosition, WeatherYear, HOURS_PER_YEAR};

/// Opening signal of one zone's windows and doors for the coming hour.
pub trait VentilationControl: Sync {
    fn signal(&self, occupied: bool, t_in: f64, t_out: f64) -> f64;
}

#[derive(Clone, Copy)]
pub enum VentilationMode<'a> {
    /// Envelope openings closed; interior doors ajar.
    Sealed,
    Controlled(&'a dyn VentilationControl),
}

impl std::fmt::Debug for VentilationMode<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VentilationMode::Sealed => f.write_str("Sealed"),
            VentilationMode::Controlled(_) => f.write_str("Controlled"),
        }
    }
}

/// Default temperature under the floor slab (°C).
pub const DEFAULT_GROUND_TEMPERATURE: f64 = 18.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationOptions {
    pub substeps_per_hour: u32,
    /// Days at the end of the year simulated first to set the initial state.
    pub warmup_days: usize,
    /// Interior door modulation while envelope openings are closed.
    pub interior_door_ajar: f64,
    /// Ground temperature under the floor slab; the annual mean air
    /// temperature when unset.
    pub ground_temperature: Option<f64>,
    /// Re-evaluate ventilation control at every substep instead of once per hour.
    pub redecide_each_substep: bool,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        SimulationOptions {
            substeps_per_hour: 6,
            warmup_days: 14,
            interior_door_ajar: 0.1,
            ground_temperature: Some(DEFAULT_GROUND_TEMPERATURE),
            redecide_each_substep: true,
        }
    }
}

impl SimulationOptions {
    pub fn check(&self) -> Result<()> {
        let ground_ok = self.ground_temperature.is_none_or(f64::is_finite);
        if self.substeps_per_hour == 0 || self.warmup_days > 365 || !(0.0..=1.0).contains(&self.interior_door_ajar) || !ground_ok {
            return Err(Error::Config(format!("invalid simulation options {self:?}")));
        }
        Ok(())
    }
}

/// Boundary conditions for one step.
#[derive(Debug, Clone, Copy)]
pub struct StepInputs<'a> {
    pub t_out: f64,
    pub t_ground: f64,
    /// Heat input per zone (W).
    pub gains: &'a [f64],
    /// Modulation per link, indexed like `ThermalModel::links`.
    pub modulation: &'a [f64],
}

/// Exact propagator of the node network over one step, with coefficients
/// frozen at the temperatures and inputs it was built from.
///
/// The linear network `C dT/dt = b - L T` is integrated through the
/// eigendecomposition of the symmetric matrix `C^-1/2 L C^-1/2`.
#[derive(Debug, Clone)]
pub struct StepOperator {
    root_c: Vec<f64>,
    /// Maps scaled temperatures `C^1/2 T` to their values one step later.
    propagator: DMatrix<f64>,
    /// Scaled response to the constant inputs over one step.
    forced: DVector<f64>,
    /// Outdoor-air exchange flow of each zone (m³/s).
    pub flows: Vec<f64>,
}

impl StepOperator {
    pub fn new(model: &ThermalModel, temps: &[f64], inputs: &StepInputs, dt: f64) -> StepOperator {
        let n = model.zones.len();
        let mut flows = vec![0.0; n];
        for (l, link) in model.links.iter().enumerate() {
            if link.to == LinkEnd::Outdoor {
                flows[link.from] += link.flow(inputs.modulation[l], temps[link.from], inputs.t_out);
            }
        }

        let mut l = DMatrix::<f64>::zeros(n, n);
        let mut b = DVector::<f64>::from_column_slice(inputs.gains);
        for (z, zone) in model.zones.iter().enumerate() {
            let k_out = zone.ua_outdoor + AIR_HEAT_CAPACITY * flows[z];
            l[(z, z)] += k_out + zone.ua_ground;
            b[z] += k_out * inputs.t_out + zone.ua_ground * inputs.t_ground;
        }
        for c in &model.couplings {
            let (ta, tb) = (temps[c.a], temps[c.b]);
            let mut g = c.ua;
            for &d in &c.doors {
                g += AIR_HEAT_CAPACITY * model.links[d].flow(inputs.modulation[d], ta, tb);
            }
            l[(c.a, c.a)] += g;
            l[(c.b, c.b)] += g;
            l[(c.a, c.b)] -= g;
            l[(c.b, c.a)] -= g;
        }

        let root_c: Vec<f64> = model.zones.iter().map(|z| z.capacitance.sqrt()).collect();
        let s = DMatrix::from_fn(n, n, |i, j| l[(i, j)] / (root_c[i] * root_c[j]));
        let eig = s.symmetric_eigen();
        let mut decay = DVector::zeros(n);
        let mut gain = DVector::zeros(n);
        for k in 0..n {
            let lambda = eig.eigenvalues[k].max(0.0);
            let x = lambda * dt;
            decay[k] = (-x).exp();
            // (1 - e^-x) / lambda, continuous at lambda = 0.
            gain[k] = if x > 1e-8 { -(-x).exp_m1() / lambda } else { dt * (1.0 - 0.5 * x) };
        }
        let v = &eig.eigenvectors;
        let propagator = v * DMatrix::from_diagonal(&decay) * v.transpose();
        let f = DVector::from_fn(n, |i, _| b[i] / root_c[i]);
        let forced = v * (v.transpose() * f).component_mul(&gain);
        StepOperator {
            root_c,
            propagator,
            forced,
            flows,
        }
    }

    /// Advances `temps` by one step.
    pub fn apply(&self, temps: &mut [f64]) {
        let y = DVector::from_fn(temps.len(), |i, _| temps[i] * self.root_c[i]);
        let next = &self.propagator * y + &self.forced;
        for (i, t) in temps.iter_mut().enumerate() {
            *t = next[i] / self.root_c[i];
        }
    }
}

/// Advances zone temperatures by `dt` seconds with coefficients frozen at
/// their start-of-step values. Returns the outdoor-air exchange flow of each
/// zone (m³/s).
pub fn step_zone_temperatures(model: &ThermalModel, temps: &mut [f64], inputs: &StepInputs, dt: f64) -> Vec<f64> {
    let op = StepOperator::new(model, temps, inputs, dt);
    op.apply(temps);
    op.flows
}

/// Solar gain (W) of each zone for every hour: sunlight transmitted by
/// windows, plus the conducted share of sunlight absorbed by opaque walls
/// and the roof.
fn solar_gains(model: &ThermalModel, weather: &WeatherYear, suns: &[SunPosition]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; model.zones.len()]; weather.records.len()];
    for (h, (record, sun)) in weather.records.iter().zip(suns).enumerate() {
        for a in &model.apertures {
            let irr = irradiance_on_wall(record, sun, a.azimuth);
            let shaded = if irr.direct > 0.0 {
                shading_fraction(&a.shading, a.width, a.height, sun, a.azimuth)
            } else {
                0.0
            };
            let incident = irr.direct * (1.0 - shaded) + irr.diffuse;
            out[h][a.zone] += incident * a.g_value * a.width * a.height;
        }
        let horizontal = record.diffuse_horizontal
            + if sun.is_up() {
                record.direct_normal * sun.altitude.to_radians().sin()
            } else {
                0.0
            };
        for (z, zone) in model.zones.iter().enumerate() {
            for s in zone.surfaces.iter().filter(|s| s.sol_air_factor > 0.0 && s.neighbor.is_none()) {
                let incident = match s.azimuth {
                    Some(azimuth) => {
                        let irr = irradiance_on_wall(record, sun, azimuth);
                        irr.direct + irr.diffuse
                    }
                    None => horizontal,
                };
                out[h][z] += s.u_value * s.area * s.sol_air_factor * incident;
            }
        }
    }
    out
}

/// Runs the year hour by hour and records end-of-hour temperatures.
///
/// `suns` must hold the sun position of every weather hour.
pub fn simulate_year(
    model: &ThermalModel,
    weather: &WeatherYear,
    suns: &[SunPosition],
    mode: VentilationMode,
    options: &SimulationOptions,
) -> Result<ZoneSeries> {
    options.check()?;
    let hours = weather.records.len();
    if hours != HOURS_PER_YEAR || suns.len() != hours {
        return Err(Error::SeriesMismatch(format!(
            "weather has {hours} hours and {} sun positions",
            suns.len()
        )));
    }
    let nz = model.zones.len();
    let solar = solar_gains(model, weather, suns);
    let dt = 3600.0 / options.substeps_per_hour as f64;

    let warmup_start = hours - options.warmup_days * 24;
    let initial = if options.warmup_days > 0 {
        weather.records[warmup_start..].iter().map(|r| r.dry_bulb).sum::<f64>() / (hours - warmup_start) as f64
    } else {
        weather.records[0].dry_bulb
    };
    let mut temps = vec![initial; nz];
    let mut temperatures = vec![Vec::with_capacity(hours); nz];
    let mut ach = vec![Vec::with_capacity(hours); nz];
    let mut signal = vec![0.0; nz];
    let mut modulation = vec![0.0; model.links.len()];
    let mut gains = vec![0.0; nz];
    let t_ground = options.ground_temperature.unwrap_or_else(|| weather.annual_mean());

    for step in warmup_start..hours + hours {
        let h = step % hours;
        let record = &weather.records[h];
        let t_out = record.dry_bulb;
        let slot = h % 24;

        for (z, zone) in model.zones.iter().enumerate() {
            gains[z] = zone.gains[slot] + solar[h][z];
        }
        let mut exchanged = vec![0.0; nz];
        let mut op: Option<StepOperator> = None;
        for sub in 0..options.substeps_per_hour {
            if sub == 0 || options.redecide_each_substep {
                for (z, zone) in model.zones.iter().enumerate() {
                    signal[z] = match mode {
                        VentilationMode::Sealed => 0.0,
                        VentilationMode::Controlled(ctl) => {
                            let s = ctl.signal(zone.occupied[slot], temps[z], t_out).clamp(0.0, 1.0);
                            assert!(s == 0.0 || t_out < temps[z], "opening signalled with T_out >= T_in");
                            s
                        }
                    };
                }
                let mut changed = false;
                for (l, link) in model.links.iter().enumerate() {
                    let m = match (link.kind, link.to) {
                        (LinkKind::Crack, _) => 1.0,
                        (_, LinkEnd::Outdoor) => signal[link.from],
                        (_, LinkEnd::Zone(b)) => options.interior_door_ajar.max(signal[link.from]).max(signal[b]),
                    };
                    changed |= m != modulation[l];
                    modulation[l] = m;
                }
                if changed {
                    op = None;
                }
            }
            let op = op.get_or_insert_with(|| {
                let inputs = StepInputs {
                    t_out,
                    t_ground,
                    gains: &gains,
                    modulation: &modulation,
                };
                StepOperator::new(model, &temps, &inputs, dt)
            });
            op.apply(&mut temps);
            let flows = op.flows.iter().copied();
            for (e, q) in exchanged.iter_mut().zip(flows) {
                *e += q * dt;
            }
        }
        if step >= hours {
            for z in 0..nz {
                temperatures[z].push(temps[z]);
                ach[z].push(exchanged[z] / model.zones[z].volume);
            }
        }
    }

    Ok(ZoneSeries {
        zones: model
            .zones
            .iter()
            .map(|z| ZoneInfo {
                space: z.space,
                function: z.function,
                ordinal: z.ordinal,
            })
            .collect(),
        temperatures,
        ach,
    })
}
