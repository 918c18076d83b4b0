//! Everything needed to turn a floor plan into an annual thermal penalty.

use crate::comfort::{comfort_band_for, thermal_penalty, ComfortBand, ComfortConfig, OccupancyModel, PenaltyReport, PenaltyWeights};
use crate::error::Result;
use crate::plan::FloorPlan;
use crate::thermal::{
    build_thermal_model, simulate_year, ConstructionSet, ModelOptions, SimulationOptions, ThermalModel, VentilationMode,
    ZoneSeries,
};
use crate::weather::{SunPosition, WeatherYear};

#[derive(Debug, Clone)]
pub struct Evaluator {
    pub weather: WeatherYear,
    pub suns: Vec<SunPosition>,
    pub band: ComfortBand,
    pub constructions: ConstructionSet,
    pub occupancy: OccupancyModel,
    pub weights: PenaltyWeights,
    pub model_options: ModelOptions,
    pub sim_options: SimulationOptions,
}

impl Evaluator {
    pub fn new(
        weather: WeatherYear,
        constructions: ConstructionSet,
        occupancy: OccupancyModel,
        comfort: &ComfortConfig,
        weights: PenaltyWeights,
    ) -> Result<Self> {
        constructions.check()?;
        occupancy.check()?;
        weights.check()?;
        let band = comfort_band_for(&weather, comfort)?;
        let suns = weather.sun_positions();
        Ok(Evaluator {
            weather,
            suns,
            band,
            constructions,
            occupancy,
            weights,
            model_options: ModelOptions::default(),
            sim_options: SimulationOptions::default(),
        })
    }

    pub fn model(&self, plan: &FloorPlan) -> Result<ThermalModel> {
        build_thermal_model(plan, &self.constructions, &self.occupancy, &self.model_options)
    }

    pub fn simulate(&self, plan: &FloorPlan, mode: VentilationMode) -> Result<ZoneSeries> {
        let model = self.model(plan)?;
        simulate_year(&model, &self.weather, &self.suns, mode, &self.sim_options)
    }

    pub fn penalty(&self, plan: &FloorPlan, mode: VentilationMode) -> Result<PenaltyReport> {
        let series = self.simulate(plan, mode)?;
        thermal_penalty(&series, &self.band, &self.occupancy, &self.weights)
    }

    /// Annual penalty with envelope openings closed.
    pub fn sealed_penalty(&self, plan: &FloorPlan) -> Result<f64> {
        Ok(self.penalty(plan, VentilationMode::Sealed)?.total)
    }
}
