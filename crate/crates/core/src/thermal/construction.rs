//! Layered constructions and their steady-state U-values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionLayer {
    pub name: String,
    /// m
    pub thickness: f64,
    /// W/(m·K)
    pub conductivity: f64,
    /// kg/m³
    pub density: f64,
    /// J/(kg·K)
    pub specific_heat: f64,
    pub thermal_absorptance: f64,
    pub solar_absorptance: f64,
    pub visible_absorptance: f64,
}

impl ConstructionLayer {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: &str,
        thickness_cm: f64,
        conductivity: f64,
        density: f64,
        specific_heat: f64,
        thermal_absorptance: f64,
        solar_absorptance: f64,
        visible_absorptance: f64,
    ) -> Self {
        ConstructionLayer {
            name: name.to_string(),
            thickness: thickness_cm / 100.0,
            conductivity,
            density,
            specific_heat,
            thermal_absorptance,
            solar_absorptance,
            visible_absorptance,
        }
    }

    pub fn resistance(&self) -> f64 {
        self.thickness / self.conductivity
    }

    pub fn check(&self) -> Result<()> {
        if !(self.thickness > 0.0) {
            return Err(Error::Construction(format!("layer {:?}: thickness must be positive", self.name)));
        }
        if !(self.conductivity > 0.0) || !self.conductivity.is_finite() {
            return Err(Error::Construction(format!("layer {:?}: conductivity must be positive", self.name)));
        }
        let absorptances = [self.thermal_absorptance, self.solar_absorptance, self.visible_absorptance];
        if absorptances.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::Construction(format!("layer {:?}: absorptance outside [0, 1]", self.name)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    ExteriorWall,
    InteriorWall,
    CeilingSlab,
    Roof,
    ExteriorDoor,
    InteriorDoor,
    Window,
}

/// Inside and outside surface resistances (m²·K/W).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceResistances {
    pub inside: f64,
    pub outside: f64,
}

impl SurfaceResistances {
    pub const WALL: SurfaceResistances = SurfaceResistances {
        inside: 0.13,
        outside: 0.04,
    };
    pub const ROOF: SurfaceResistances = SurfaceResistances {
        inside: 0.10,
        outside: 0.04,
    };

    pub fn for_element(kind: ElementKind) -> Self {
        match kind {
            ElementKind::Roof | ElementKind::CeilingSlab => Self::ROOF,
            _ => Self::WALL,
        }
    }
}

/// `1 / (R_si + Σ d/λ + R_se)`.
pub fn u_value(layers: &[ConstructionLayer], surfaces: SurfaceResistances) -> Result<f64> {
    if layers.is_empty() {
        return Err(Error::Construction("a construction needs at least one layer".into()));
    }
    let mut r = surfaces.inside + surfaces.outside;
    for layer in layers {
        layer.check()?;
        r += layer.resistance();
    }
    Ok(1.0 / r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConstructionSpec {
    Opaque {
        layers: Vec<ConstructionLayer>,
        /// Used instead of the layer-computed value when present.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        u_override: Option<f64>,
    },
    Glazing {
        u_value: f64,
        g_value: f64,
        visible_transmittance: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    pub element_kind: ElementKind,
    #[serde(flatten)]
    pub spec: ConstructionSpec,
}

/// Relative mismatch above which a stated element U-value replaces the layer sum.
pub const STATED_U_TOLERANCE: f64 = 0.15;

impl Construction {
    /// Opaque construction checked against a stated U-value; a computed value
    /// off by more than [`STATED_U_TOLERANCE`] is replaced by the stated one.
    pub fn opaque_with_stated_u(element_kind: ElementKind, layers: Vec<ConstructionLayer>, stated_u: f64) -> Result<Self> {
        let computed = u_value(&layers, SurfaceResistances::for_element(element_kind))?;
        let u_override = ((computed - stated_u).abs() / stated_u > STATED_U_TOLERANCE).then_some(stated_u);
        Ok(Construction {
            element_kind,
            spec: ConstructionSpec::Opaque { layers, u_override },
        })
    }

    pub fn glazing(u_value: f64, g_value: f64, visible_transmittance: f64) -> Self {
        Construction {
            element_kind: ElementKind::Window,
            spec: ConstructionSpec::Glazing {
                u_value,
                g_value,
                visible_transmittance,
            },
        }
    }

    pub fn u_value(&self) -> Result<f64> {
        match &self.spec {
            ConstructionSpec::Opaque {
                u_override: Some(u), ..
            } => Ok(*u),
            ConstructionSpec::Opaque { layers, .. } => {
                u_value(layers, SurfaceResistances::for_element(self.element_kind))
            }
            ConstructionSpec::Glazing { u_value, .. } => Ok(*u_value),
        }
    }

    /// Share of the outside temperature rise from absorbed sunlight that
    /// reaches the construction: outer-face absorptance times the outside
    /// surface resistance (m²·K/W). Zero for glazing.
    pub fn sol_air_factor(&self) -> f64 {
        match &self.spec {
            ConstructionSpec::Opaque { layers, .. } => layers.first().map_or(0.0, |l| l.solar_absorptance)
                * SurfaceResistances::for_element(self.element_kind).outside,
            ConstructionSpec::Glazing { .. } => 0.0,
        }
    }

    /// Solar heat gain coefficient; zero for opaque elements.
    pub fn g_value(&self) -> f64 {
        match &self.spec {
            ConstructionSpec::Glazing { g_value, .. } => *g_value,
            ConstructionSpec::Opaque { .. } => 0.0,
        }
    }

    pub fn check(&self) -> Result<()> {
        match &self.spec {
            ConstructionSpec::Opaque { layers, u_override } => {
                for l in layers {
                    l.check()?;
                }
                if let Some(u) = u_override {
                    if !(*u > 0.0) {
                        return Err(Error::Construction(format!("{:?}: U-value must be positive", self.element_kind)));
                    }
                }
                self.u_value().map(|_| ())
            }
            ConstructionSpec::Glazing {
                u_value,
                g_value,
                visible_transmittance,
            } => {
                if !(*u_value > 0.0)
                    || !(0.0..=1.0).contains(g_value)
                    || !(0.0..=1.0).contains(visible_transmittance)
                {
                    return Err(Error::Construction(format!("invalid glazing {:?}", self.spec)));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionSet {
    pub exterior_wall: Construction,
    pub interior_wall: Construction,
    pub ceiling_slab: Construction,
    pub roof: Construction,
    pub exterior_door: Construction,
    pub interior_door: Construction,
    pub window: Construction,
}

impl ConstructionSet {
    /// Reference residential constructions.
    pub fn reference() -> Self {
        use ConstructionLayer as L;
        let plaster = L::new("Plaster", 2.0, 0.43, 1250.0, 1088.0, 0.9, 0.6, 0.6);
        let dense_brick = L::new("Dense brick", 11.0, 1.25, 2082.4, 920.5, 0.9, 0.93, 0.93);
        let insulation = |cm| L::new("Insulation", cm, 0.04, 32.0, 836.8, 0.9, 0.5, 0.5);
        let concrete_block = |cm| L::new("Concrete block", cm, 1.73, 2242.6, 836.8, 0.9, 0.65, 0.65);
        let gypsum = L::new("Plaster (gypsum)", 2.0, 0.22, 950.0, 840.0, 0.9, 0.6, 0.6);
        let concrete = L::new("High weight concrete", 20.0, 1.73, 2242.6, 836.8, 0.9, 0.65, 0.65);
        let hardwood = |cm| L::new("Hardwood", cm, 0.2, 825.0, 2385.0, 0.9, 0.78, 0.78);
        let door_hardwood = L::new("Hardwood", 0.5, 0.16, 720.8, 1255.2, 0.9, 0.78, 0.78);
        let chipboard = L::new("Chipboard", 3.0, 0.07, 430.0, 1260.0, 0.9, 0.78, 0.78);
        let slag = L::new("Slag", 1.5, 1.44, 881.0, 1673.6, 0.9, 0.55, 0.55);
        let felt = L::new("Felt and membrane", 1.0, 0.19, 1121.3, 1673.6, 0.9, 0.75, 0.75);
        let dense_insulation = L::new("Dense insulation", 10.0, 0.04, 91.3, 836.8, 0.9, 0.5, 0.5);

        let build = |kind, layers, stated| {
            Construction::opaque_with_stated_u(kind, layers, stated).expect("reference layers are valid")
        };
        ConstructionSet {
            exterior_wall: build(
                ElementKind::ExteriorWall,
                vec![plaster, dense_brick, insulation(8.0), concrete_block(15.0), gypsum.clone()],
                0.43,
            ),
            interior_wall: build(
                ElementKind::InteriorWall,
                vec![gypsum.clone(), concrete_block(7.0), gypsum.clone()],
                2.17,
            ),
            ceiling_slab: build(ElementKind::CeilingSlab, vec![concrete.clone(), hardwood(3.0)], 2.60),
            roof: build(
                ElementKind::Roof,
                vec![slag, felt, dense_insulation, concrete, gypsum],
                0.37,
            ),
            exterior_door: build(ElementKind::ExteriorDoor, vec![insulation(1.0), hardwood(1.0)], 2.86),
            interior_door: build(
                ElementKind::InteriorDoor,
                vec![door_hardwood.clone(), chipboard, door_hardwood],
                1.36,
            ),
            window: Construction::glazing(2.6, 0.63, 0.70),
        }
    }

    pub fn for_element(&self, kind: ElementKind) -> &Construction {
        match kind {
            ElementKind::ExteriorWall => &self.exterior_wall,
            ElementKind::InteriorWall => &self.interior_wall,
            ElementKind::CeilingSlab => &self.ceiling_slab,
            ElementKind::Roof => &self.roof,
            ElementKind::ExteriorDoor => &self.exterior_door,
            ElementKind::InteriorDoor => &self.interior_door,
            ElementKind::Window => &self.window,
        }
    }

    pub fn check(&self) -> Result<()> {
        let all = [
            (&self.exterior_wall, ElementKind::ExteriorWall),
            (&self.interior_wall, ElementKind::InteriorWall),
            (&self.ceiling_slab, ElementKind::CeilingSlab),
            (&self.roof, ElementKind::Roof),
            (&self.exterior_door, ElementKind::ExteriorDoor),
            (&self.interior_door, ElementKind::InteriorDoor),
            (&self.window, ElementKind::Window),
        ];
        for (c, kind) in all {
            if c.element_kind != kind {
                return Err(Error::Construction(format!(
                    "{kind:?} slot holds a {:?} construction",
                    c.element_kind
                )));
            }
            c.check()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_layer_series_sum() {
        let l = ConstructionLayer::new("ins", 8.0, 0.04, 32.0, 836.8, 0.9, 0.5, 0.5);
        let u = u_value(&[l], SurfaceResistances::WALL).unwrap();
        assert!((u - 1.0 / 2.17).abs() < 1e-12);
        assert!((u - 0.461).abs() < 5e-4);
    }

    #[test]
    fn reference_exterior_wall() {
        let set = ConstructionSet::reference();
        let u = set.exterior_wall.u_value().unwrap();
        let oracle = 1.0 / (0.13 + 0.02 / 0.43 + 0.11 / 1.25 + 0.08 / 0.04 + 0.15 / 1.73 + 0.02 / 0.22 + 0.04);
        assert!((u - oracle).abs() < 1e-12);
        assert!((u - 0.43).abs() <= 0.05, "{u}");
        set.check().unwrap();
    }

    #[test]
    fn stated_values_override_far_misses_only() {
        let set = ConstructionSet::reference();
        let overridden = |c: &Construction| matches!(c.spec, ConstructionSpec::Opaque { u_override: Some(_), .. });
        assert!(overridden(&set.exterior_door));
        assert!(overridden(&set.interior_wall));
        assert!(!overridden(&set.exterior_wall));
        assert!(!overridden(&set.roof));
        assert!(!overridden(&set.ceiling_slab));
        assert!(!overridden(&set.interior_door));
        assert_eq!(set.exterior_door.u_value().unwrap(), 2.86);
        assert!((set.roof.u_value().unwrap() - 0.37).abs() / 0.37 <= STATED_U_TOLERANCE);
    }

    #[test]
    fn thicker_insulation_lowers_u() {
        let mut layers = ConstructionSet::reference().exterior_wall.spec.clone();
        let ConstructionSpec::Opaque { layers: ref mut ls, .. } = layers else {
            unreachable!()
        };
        let before = u_value(ls, SurfaceResistances::WALL).unwrap();
        ls[2].thickness *= 2.0;
        assert!(u_value(ls, SurfaceResistances::WALL).unwrap() < before);
    }

    #[test]
    fn rejects_bad_layers() {
        let mut l = ConstructionLayer::new("x", 1.0, 0.0, 1.0, 1.0, 0.5, 0.5, 0.5);
        assert!(u_value(&[l.clone()], SurfaceResistances::WALL).is_err());
        l.conductivity = -1.0;
        assert!(u_value(&[l], SurfaceResistances::WALL).is_err());
        assert!(u_value(&[], SurfaceResistances::WALL).is_err());
    }

    #[test]
    fn json_round_trip() {
        let set = ConstructionSet::reference();
        let text = serde_json::to_string(&set).unwrap();
        let back: ConstructionSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, set);
    }
}
