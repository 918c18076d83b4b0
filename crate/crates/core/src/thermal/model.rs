//! Zones, conductances and air links derived from a floor plan.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::airflow::{AirLink, LinkEnd, LinkKind, AIR_HEAT_CAPACITY};
use super::construction::{ConstructionSet, ElementKind};
use crate::comfort::OccupancyModel;
use crate::error::{Error, Result};
use crate::plan::{
    placed_openings, shared_segment, space_envelope, FloorPlan, OpeningId, OpeningKind, ShadingDevice,
    SpaceFunction, SpaceId,
};

/// Effective zone capacitance as a multiple of the air capacitance.
pub const DEFAULT_CAPACITANCE_MULTIPLIER: f64 = 15.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Surface {
    pub element: ElementKind,
    /// Net area (m²).
    pub area: f64,
    pub u_value: f64,
    /// World azimuth of vertical exterior surfaces.
    pub azimuth: Option<f64>,
    pub opening: Option<OpeningId>,
    /// Zone on the other side; `None` for the outdoors.
    pub neighbor: Option<usize>,
    /// Sol-air temperature rise per W/m² of incident sunlight (m²·K/W).
    #[serde(default)]
    pub sol_air_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub space: SpaceId,
    pub function: SpaceFunction,
    /// Index among the plan's spaces of the same function.
    pub ordinal: usize,
    pub floor_area: f64,
    pub volume: f64,
    /// J/K
    pub capacitance: f64,
    /// Conductance to outdoor air through the envelope (W/K).
    pub ua_outdoor: f64,
    /// Conductance to the ground through the floor slab (W/K).
    pub ua_ground: f64,
    pub surfaces: Vec<Surface>,
    /// Internal gains per schedule slot (W).
    pub gains: [f64; 24],
    pub occupied: [bool; 24],
}

/// Conduction between two zones through their shared wall and doors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub a: usize,
    pub b: usize,
    /// W/K
    pub ua: f64,
    /// Indices into `ThermalModel::links` of the doors between `a` and `b`.
    pub doors: Vec<usize>,
}

/// A window admitting solar gain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolarAperture {
    pub zone: usize,
    pub opening: OpeningId,
    pub width: f64,
    pub height: f64,
    pub g_value: f64,
    pub azimuth: f64,
    /// Fin sides in the world frame.
    pub shading: ShadingDevice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalModel {
    pub zones: Vec<Zone>,
    pub links: Vec<AirLink>,
    pub couplings: Vec<Coupling>,
    pub apertures: Vec<SolarAperture>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelOptions {
    /// Air node capacitance as a multiple of the air alone.
    pub capacitance_multiplier: f64,
    /// Sunlight absorbed on exterior walls and the roof heats the zone.
    pub opaque_solar: bool,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            capacitance_multiplier: DEFAULT_CAPACITANCE_MULTIPLIER,
            opaque_solar: true,
        }
    }
}

/// Builds one zone per space. Every opening must sit on a wall that can host it.
pub fn build_thermal_model(
    plan: &FloorPlan,
    constructions: &ConstructionSet,
    occupancy: &OccupancyModel,
    options: &ModelOptions,
) -> Result<ThermalModel> {
    plan.check_structure()?;
    if let Some((o, _)) = plan.openings.iter().zip(placed_openings(plan)).find(|(_, ok)| !ok) {
        return Err(Error::InvalidPlan(format!("opening {} is not on a wall that can host it", o.id)));
    }
    if !(options.capacitance_multiplier >= 1.0) {
        return Err(Error::Config("capacitance multiplier must be at least 1".into()));
    }
    let u_ext = constructions.exterior_wall.u_value()?;
    let u_int = constructions.interior_wall.u_value()?;
    let u_roof = constructions.roof.u_value()?;
    let u_slab = constructions.ceiling_slab.u_value()?;
    let u_ext_door = constructions.exterior_door.u_value()?;
    let u_int_door = constructions.interior_door.u_value()?;
    let u_win = constructions.window.u_value()?;
    let g_win = constructions.window.g_value();
    let sol_air = |c: &super::construction::Construction| if options.opaque_solar { c.sol_air_factor() } else { 0.0 };

    let index: BTreeMap<SpaceId, usize> = plan.spaces.iter().enumerate().map(|(i, s)| (s.id, i)).collect();
    let mut seen: BTreeMap<SpaceFunction, usize> = BTreeMap::new();
    let mut zones = Vec::with_capacity(plan.spaces.len());
    let mut links = Vec::new();
    let mut apertures = Vec::new();

    for (zi, space) in plan.spaces.iter().enumerate() {
        let schedule = occupancy.schedule(space.function).ok_or_else(|| Error::MissingSchedule {
            space: space.id.to_string(),
            function: space.function,
        })?;
        let ordinal = {
            let n = seen.entry(space.function).or_default();
            *n += 1;
            *n - 1
        };
        let volume = space.volume();
        let mut surfaces = Vec::new();

        for seg in space_envelope(plan, space) {
            let gross = seg.length() * space.ceiling_height;
            let mut net = gross;
            for o in plan
                .openings
                .iter()
                .filter(|o| o.host_space == space.id && o.is_envelope() && o.wall_side == seg.side)
                .filter(|o| seg.contains(o.offset, o.width))
            {
                net -= o.area();
                let (element, u) = match o.kind {
                    OpeningKind::Window => (ElementKind::Window, u_win),
                    _ => (ElementKind::ExteriorDoor, u_ext_door),
                };
                surfaces.push(Surface {
                    element,
                    area: o.area(),
                    u_value: u,
                    azimuth: Some(seg.azimuth),
                    opening: Some(o.id),
                    neighbor: None,
                    sol_air_factor: 0.0,
                });
                links.push(AirLink {
                    kind: if o.kind == OpeningKind::Window {
                        LinkKind::Window
                    } else {
                        LinkKind::Door
                    },
                    from: zi,
                    to: LinkEnd::Outdoor,
                    open_area: o.area(),
                    height: o.height,
                    crack_flow: 0.0,
                    opening: Some(o.id),
                });
                if o.kind == OpeningKind::Window {
                    let mut shading = plan.shading_for(o.id).copied().unwrap_or_else(|| ShadingDevice::bare(o.id));
                    if plan.reflected {
                        std::mem::swap(&mut shading.left_fin_depth, &mut shading.right_fin_depth);
                    }
                    apertures.push(SolarAperture {
                        zone: zi,
                        opening: o.id,
                        width: o.width,
                        height: o.height,
                        g_value: g_win,
                        azimuth: seg.azimuth,
                        shading,
                    });
                }
            }
            surfaces.push(Surface {
                element: ElementKind::ExteriorWall,
                area: net.max(0.0),
                u_value: u_ext,
                azimuth: Some(seg.azimuth),
                opening: None,
                neighbor: None,
                sol_air_factor: sol_air(&constructions.exterior_wall),
            });
        }
        surfaces.push(Surface {
            element: ElementKind::Roof,
            area: space.area(),
            u_value: u_roof,
            azimuth: None,
            opening: None,
            neighbor: None,
            sol_air_factor: sol_air(&constructions.roof),
        });
        let ua_outdoor = surfaces.iter().map(|s| s.u_value * s.area).sum();
        surfaces.push(Surface {
            element: ElementKind::CeilingSlab,
            area: space.area(),
            u_value: u_slab,
            azimuth: None,
            opening: None,
            neighbor: None,
            sol_air_factor: 0.0,
        });
        links.push(AirLink::crack(zi, volume));

        zones.push(Zone {
            space: space.id,
            function: space.function,
            ordinal,
            floor_area: space.area(),
            volume,
            capacitance: options.capacitance_multiplier * AIR_HEAT_CAPACITY * volume,
            ua_outdoor,
            ua_ground: u_slab * space.area(),
            surfaces,
            gains: schedule.hourly_gains(ordinal, space.area()),
            occupied: schedule.occupied_mask(),
        });
    }

    let mut couplings = Vec::new();
    for a in 0..plan.spaces.len() {
        for b in a + 1..plan.spaces.len() {
            let (sa, sb) = (&plan.spaces[a], &plan.spaces[b]);
            let Some(seg) = shared_segment(&sa.rect, &sb.rect) else {
                continue;
            };
            let height = sa.ceiling_height.min(sb.ceiling_height);
            let mut wall_area = seg.length() * height;
            let mut ua = 0.0;
            let mut doors = Vec::new();
            for o in plan.openings.iter().filter(|o| o.kind == OpeningKind::InteriorDoor) {
                let ends = (index[&o.host_space], o.links_to.map(|l| index[&l]));
                if ends == (a, Some(b)) || ends == (b, Some(a)) {
                    wall_area -= o.area();
                    ua += u_int_door * o.area();
                    for (zone, other) in [(a, b), (b, a)] {
                        zones[zone].surfaces.push(Surface {
                            element: ElementKind::InteriorDoor,
                            area: o.area(),
                            u_value: u_int_door,
                            azimuth: None,
                            opening: Some(o.id),
                            neighbor: Some(other),
                            sol_air_factor: 0.0,
                        });
                    }
                    doors.push(links.len());
                    links.push(AirLink {
                        kind: LinkKind::Door,
                        from: a,
                        to: LinkEnd::Zone(b),
                        open_area: o.area(),
                        height: o.height,
                        crack_flow: 0.0,
                        opening: Some(o.id),
                    });
                }
            }
            let wall_area = wall_area.max(0.0);
            ua += u_int * wall_area;
            for (zone, other) in [(a, b), (b, a)] {
                zones[zone].surfaces.push(Surface {
                    element: ElementKind::InteriorWall,
                    area: wall_area,
                    u_value: u_int,
                    azimuth: None,
                    opening: None,
                    neighbor: Some(other),
                    sol_air_factor: 0.0,
                });
            }
            couplings.push(Coupling { a, b, ua, doors });
        }
    }

    Ok(ThermalModel {
        zones,
        links,
        couplings,
        apertures,
    })
}
