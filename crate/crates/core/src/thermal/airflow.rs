//! Air links between zones and the outdoors, with a single-sided stack flow model.

use serde::{Deserialize, Serialize};

use crate::plan::OpeningId;

pub const AIR_DENSITY: f64 = 1.2;
pub const AIR_SPECIFIC_HEAT: f64 = 1005.0;
pub const GRAVITY: f64 = 9.81;
pub const DISCHARGE_COEFFICIENT: f64 = 0.6;
pub const CRACK_ACH: f64 = 0.4;

/// Volumetric heat capacity of air, J/(m³·K).
pub const AIR_HEAT_CAPACITY: f64 = AIR_DENSITY * AIR_SPECIFIC_HEAT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkKind {
    Crack,
    Window,
    Door,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkEnd {
    Zone(usize),
    Outdoor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AirLink {
    pub kind: LinkKind,
    pub from: usize,
    pub to: LinkEnd,
    /// Free area when fully open (m²); zero for cracks.
    pub open_area: f64,
    /// Height of the opening (m), the stack driving height.
    pub height: f64,
    /// Fixed flow for cracks (m³/s).
    pub crack_flow: f64,
    pub opening: Option<OpeningId>,
}

impl AirLink {
    pub fn crack(zone: usize, volume: f64) -> Self {
        AirLink {
            kind: LinkKind::Crack,
            from: zone,
            to: LinkEnd::Outdoor,
            open_area: 0.0,
            height: 0.0,
            crack_flow: volume * CRACK_ACH / 3600.0,
            opening: None,
        }
    }

    /// Exchange flow (m³/s) at the given modulation and end temperatures.
    pub fn flow(&self, modulation: f64, t_in: f64, t_out: f64) -> f64 {
        match self.kind {
            LinkKind::Crack => self.crack_flow,
            LinkKind::Window | LinkKind::Door => ventilation_flow(modulation * self.open_area, self.height, t_in, t_out),
        }
    }
}

/// Stack-driven exchange flow through an opening of effective area `area`:
/// `Q = C_d/3 · A · sqrt(g·H·|ΔT| / T_mean)`.
pub fn ventilation_flow(area: f64, height: f64, t_in: f64, t_out: f64) -> f64 {
    let dt = (t_in - t_out).abs();
    if area <= 0.0 || height <= 0.0 || dt == 0.0 {
        return 0.0;
    }
    let t_mean = 0.5 * (t_in + t_out) + 273.15;
    DISCHARGE_COEFFICIENT / 3.0 * area * (GRAVITY * height * dt / t_mean).sqrt()
}
