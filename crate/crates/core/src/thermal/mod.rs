//! Multi-zone lumped thermal simulation with crack, door and window air links.

mod airflow;
mod construction;
mod model;
mod sim;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use airflow::{
    ventilation_flow, AirLink, LinkEnd, LinkKind, AIR_DENSITY, AIR_HEAT_CAPACITY, AIR_SPECIFIC_HEAT, CRACK_ACH,
    DISCHARGE_COEFFICIENT, GRAVITY,
};
pub use construction::{
    u_value, Construction, ConstructionLayer, ConstructionSet, ConstructionSpec, ElementKind, SurfaceResistances,
    STATED_U_TOLERANCE,
};
pub use model::{
    build_thermal_model, Coupling, ModelOptions, SolarAperture, Surface, ThermalModel, Zone,
    DEFAULT_CAPACITANCE_MULTIPLIER,
};
pub use sim::{
    simulate_year, step_zone_temperatures, SimulationOptions, StepInputs, StepOperator, VentilationControl,
    VentilationMode, DEFAULT_GROUND_TEMPERATURE,
};

use crate::plan::{SpaceFunction, SpaceId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZoneInfo {
    pub space: SpaceId,
    pub function: SpaceFunction,
    pub ordinal: usize,
}

/// Hourly air temperature and outdoor-air change rate of every zone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneSeries {
    pub zones: Vec<ZoneInfo>,
    /// °C, `[zone][hour]`.
    pub temperatures: Vec<Vec<f64>>,
    /// Air changes per hour, `[zone][hour]`.
    pub ach: Vec<Vec<f64>>,
}

impl ZoneSeries {
    pub fn hours(&self) -> usize {
        self.temperatures.first().map_or(0, Vec::len)
    }

    /// Columns `zone_id,hour_of_year,air_temp_C,ach`; hours are 1-based.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("zone_id,hour_of_year,air_temp_C,ach\n");
        for (z, info) in self.zones.iter().enumerate() {
            for (h, (t, a)) in self.temperatures[z].iter().zip(&self.ach[z]).enumerate() {
                let _ = writeln!(out, "{},{},{t:.4},{a:.4}", info.space, h + 1);
            }
        }
        out
    }
}
