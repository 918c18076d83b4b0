//! Floor plan vocabulary: rooms as axis-aligned rectangles on a single level,
//! openings hosted on room walls, external shading devices, and the design
//! program a plan is checked against.
//!
//! Plan-local frame: `+y` is the local north, `+x` the local east. The whole
//! plan is mirrored about its y-axis when `reflected` is set and then rotated
//! clockwise by `orientation` degrees to obtain world compass directions.
//! Walls have zero thickness.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used by every coincidence test on plan coordinates (meters).
pub const GEOM_EPS: f64 = 1e-6;
pub const DEFAULT_CEILING_HEIGHT: f64 = 2.7;
pub const PLAN_SCHEMA_VERSION: u32 = 1;
pub const PROGRAM_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self> {
        let r = Rect { x, y, w, h };
        r.check()?;
        Ok(r)
    }

    pub fn check(&self) -> Result<()> {
        let finite = [self.x, self.y, self.w, self.h].iter().all(|v| v.is_finite());
        if !finite || self.w <= 0.0 || self.h <= 0.0 {
            return Err(Error::Geometry(format!("degenerate rect {self:?}")));
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn top(&self) -> f64 {
        self.y + self.h
    }

    /// Length of the wall on `side`.
    pub fn side_length(&self, side: WallSide) -> f64 {
        match side {
            WallSide::N | WallSide::S => self.w,
            WallSide::E | WallSide::W => self.h,
        }
    }

    /// Absolute coordinate where the wall on `side` starts (its west or south end).
    pub fn side_start(&self, side: WallSide) -> f64 {
        match side {
            WallSide::N | WallSide::S => self.x,
            WallSide::E | WallSide::W => self.y,
        }
    }

    /// Smallest gap between the two rectangles (0 when touching or overlapping).
    pub fn distance(&self, other: &Rect) -> f64 {
        let dx = (other.x - self.right()).max(self.x - other.right()).max(0.0);
        let dy = (other.y - self.top()).max(self.y - other.top()).max(0.0);
        dx.hypot(dy)
    }
}

/// Length of the intersection of `[a0, a1]` and `[b0, b1]`.
pub fn interval_overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (a1.min(b1) - a0.max(b0)).max(0.0)
}

pub fn overlap_area(a: &Rect, b: &Rect) -> f64 {
    interval_overlap(a.x, a.right(), b.x, b.right()) * interval_overlap(a.y, a.top(), b.y, b.top())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpaceFunction {
    Hall,
    Corridor,
    Kitchen,
    LivingRoom,
    Bedroom,
    Bathroom,
}

impl SpaceFunction {
    pub const ALL: [SpaceFunction; 6] = [
        SpaceFunction::Hall,
        SpaceFunction::Corridor,
        SpaceFunction::Kitchen,
        SpaceFunction::LivingRoom,
        SpaceFunction::Bedroom,
        SpaceFunction::Bathroom,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SpaceFunction::Hall => "Hall",
            SpaceFunction::Corridor => "Corridor",
            SpaceFunction::Kitchen => "Kitchen",
            SpaceFunction::LivingRoom => "Living room",
            SpaceFunction::Bedroom => "Bedroom",
            SpaceFunction::Bathroom => "Bathroom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpaceId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OpeningId(pub u32);

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.0)
    }
}

impl fmt::Display for OpeningId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "O{}", self.0)
    }
}

/// Wall side in the plan-local frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WallSide {
    N,
    S,
    E,
    W,
}

impl WallSide {
    pub const ALL: [WallSide; 4] = [WallSide::N, WallSide::S, WallSide::E, WallSide::W];

    pub fn opposite(self) -> WallSide {
        match self {
            WallSide::N => WallSide::S,
            WallSide::S => WallSide::N,
            WallSide::E => WallSide::W,
            WallSide::W => WallSide::E,
        }
    }

    /// Outward normal azimuth in the plan-local frame.
    pub fn local_azimuth(self) -> f64 {
        match self {
            WallSide::N => 0.0,
            WallSide::E => 90.0,
            WallSide::S => 180.0,
            WallSide::W => 270.0,
        }
    }
}

/// Normalizes an angle in degrees to `[0, 360)`.
pub fn normalize_degrees(a: f64) -> f64 {
    let r = a.rem_euclid(360.0);
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// World azimuth (degrees clockwise from North) of the outward normal of `side`.
pub fn world_azimuth(side: WallSide, orientation: f64, reflected: bool) -> f64 {
    let local = side.local_azimuth();
    let mirrored = if reflected { 360.0 - local } else { local };
    normalize_degrees(mirrored + orientation)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Space {
    pub id: SpaceId,
    pub function: SpaceFunction,
    pub rect: Rect,
    pub ceiling_height: f64,
}

impl Space {
    pub fn area(&self) -> f64 {
        self.rect.area()
    }

    pub fn volume(&self) -> f64 {
        self.rect.area() * self.ceiling_height
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OpeningKind {
    Window,
    InteriorDoor,
    ExteriorDoor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Opening {
    pub id: OpeningId,
    pub kind: OpeningKind,
    pub host_space: SpaceId,
    pub wall_side: WallSide,
    /// Distance from the wall's west/south end to the opening's near jamb.
    pub offset: f64,
    pub width: f64,
    pub height: f64,
    pub sill: f64,
    pub links_to: Option<SpaceId>,
}

impl Opening {
    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn is_envelope(&self) -> bool {
        matches!(self.kind, OpeningKind::Window | OpeningKind::ExteriorDoor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadingDevice {
    pub opening: OpeningId,
    pub overhang_depth: f64,
    pub left_fin_depth: f64,
    pub right_fin_depth: f64,
}

impl ShadingDevice {
    pub fn bare(opening: OpeningId) -> Self {
        ShadingDevice {
            opening,
            overhang_depth: 0.0,
            left_fin_depth: 0.0,
            right_fin_depth: 0.0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.overhang_depth <= 0.0 && self.left_fin_depth <= 0.0 && self.right_fin_depth <= 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorPlan {
    pub spaces: Vec<Space>,
    pub openings: Vec<Opening>,
    pub shading: Vec<ShadingDevice>,
    pub orientation: f64,
    pub reflected: bool,
}

#[derive(Serialize, Deserialize)]
struct PlanFile<P> {
    schema_version: u32,
    #[serde(flatten)]
    plan: P,
}

impl FloorPlan {
    pub fn space(&self, id: SpaceId) -> Option<&Space> {
        self.spaces.iter().find(|s| s.id == id)
    }

    pub fn space_mut(&mut self, id: SpaceId) -> Option<&mut Space> {
        self.spaces.iter_mut().find(|s| s.id == id)
    }

    pub fn opening(&self, id: OpeningId) -> Option<&Opening> {
        self.openings.iter().find(|o| o.id == id)
    }

    pub fn opening_mut(&mut self, id: OpeningId) -> Option<&mut Opening> {
        self.openings.iter_mut().find(|o| o.id == id)
    }

    pub fn shading_for(&self, id: OpeningId) -> Option<&ShadingDevice> {
        self.shading.iter().find(|s| s.opening == id)
    }

    pub fn shading_for_mut(&mut self, id: OpeningId) -> Option<&mut ShadingDevice> {
        self.shading.iter_mut().find(|s| s.opening == id)
    }

    pub fn total_area(&self) -> f64 {
        self.spaces.iter().map(Space::area).sum()
    }

    pub fn azimuth_of(&self, side: WallSide) -> f64 {
        world_azimuth(side, self.orientation, self.reflected)
    }

    /// Bounding box of all spaces, `None` for an empty plan.
    pub fn bounds(&self) -> Option<Rect> {
        let first = self.spaces.first()?.rect;
        let (mut x0, mut y0, mut x1, mut y1) = (first.x, first.y, first.right(), first.top());
        for s in &self.spaces[1..] {
            x0 = x0.min(s.rect.x);
            y0 = y0.min(s.rect.y);
            x1 = x1.max(s.rect.right());
            y1 = y1.max(s.rect.top());
        }
        Some(Rect {
            x: x0,
            y: y0,
            w: x1 - x0,
            h: y1 - y0,
        })
    }

    /// Structural type invariants that hold independently of any design program.
    pub fn check_structure(&self) -> Result<()> {
        if !(0.0..360.0).contains(&self.orientation) {
            return Err(Error::Geometry(format!(
                "orientation {} outside [0, 360)",
                self.orientation
            )));
        }
        for s in &self.spaces {
            s.rect.check()?;
            if !(s.ceiling_height > 0.0) {
                return Err(Error::Geometry(format!("space {} has ceiling_height <= 0", s.id)));
            }
            if self.spaces.iter().filter(|o| o.id == s.id).count() > 1 {
                return Err(Error::Geometry(format!("duplicate space id {}", s.id)));
            }
        }
        for o in &self.openings {
            if self.space(o.host_space).is_none() {
                return Err(Error::Geometry(format!("opening {} has unknown host {}", o.id, o.host_space)));
            }
            if let Some(l) = o.links_to {
                if self.space(l).is_none() {
                    return Err(Error::Geometry(format!("opening {} links unknown space {l}", o.id)));
                }
            }
            let dims = [o.offset, o.width, o.height, o.sill];
            if dims.iter().any(|v| !v.is_finite()) || o.offset < 0.0 || o.width <= 0.0 || o.height <= 0.0 {
                return Err(Error::Geometry(format!("opening {} has invalid dimensions", o.id)));
            }
            if o.kind == OpeningKind::InteriorDoor && o.links_to.is_none() {
                return Err(Error::Geometry(format!("interior door {} without links_to", o.id)));
            }
        }
        for d in &self.shading {
            if self.opening(d.opening).is_none() {
                return Err(Error::Geometry(format!("shading device for unknown opening {}", d.opening)));
            }
            if d.overhang_depth < 0.0 || d.left_fin_depth < 0.0 || d.right_fin_depth < 0.0 {
                return Err(Error::Geometry(format!("shading device {} has negative depth", d.opening)));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&PlanFile {
            schema_version: PLAN_SCHEMA_VERSION,
            plan: self,
        })?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PlanFile<FloorPlan> = serde_json::from_str(text)?;
        if file.schema_version != PLAN_SCHEMA_VERSION {
            return Err(Error::Geometry(format!(
                "unsupported plan schema_version {}",
                file.schema_version
            )));
        }
        file.plan.check_structure()?;
        Ok(file.plan)
    }
}

/// A boundary segment two spaces have in common.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharedSegment {
    /// Side of the first space the segment lies on.
    pub side: WallSide,
    /// Absolute start/end coordinate along the wall axis.
    pub start: f64,
    pub end: f64,
}

impl SharedSegment {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

/// The coincident boundary of `a` and `b`, if they touch along a segment of
/// positive length.
pub fn shared_segment(a: &Rect, b: &Rect) -> Option<SharedSegment> {
    let candidates = [
        (WallSide::E, a.right(), b.x, a.y, a.top(), b.y, b.top()),
        (WallSide::W, a.x, b.right(), a.y, a.top(), b.y, b.top()),
        (WallSide::N, a.top(), b.y, a.x, a.right(), b.x, b.right()),
        (WallSide::S, a.y, b.top(), a.x, a.right(), b.x, b.right()),
    ];
    for (side, la, lb, a0, a1, b0, b1) in candidates {
        if (la - lb).abs() <= GEOM_EPS {
            let start = a0.max(b0);
            let end = a1.min(b1);
            if end - start > GEOM_EPS {
                return Some(SharedSegment { side, start, end });
            }
        }
    }
    None
}

pub fn shared_wall_length(a: &Space, b: &Space) -> f64 {
    shared_segment(&a.rect, &b.rect).map_or(0.0, |s| s.length())
}

/// An exterior part of a space's wall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeSegment {
    pub space: SpaceId,
    pub side: WallSide,
    /// Offsets along the wall, measured from the wall's west/south end.
    pub from: f64,
    pub to: f64,
    /// World azimuth of the outward normal.
    pub azimuth: f64,
}

impl EnvelopeSegment {
    pub fn length(&self) -> f64 {
        self.to - self.from
    }

    pub fn contains(&self, offset: f64, width: f64) -> bool {
        offset >= self.from - GEOM_EPS && offset + width <= self.to + GEOM_EPS
    }
}

/// Subtracts the sorted-or-not intervals `cuts` from `[from, to]`.
fn subtract_intervals(from: f64, to: f64, cuts: &mut [(f64, f64)]) -> Vec<(f64, f64)> {
    cuts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::new();
    let mut cursor = from;
    for &(c0, c1) in cuts.iter() {
        if c0 - cursor > GEOM_EPS {
            out.push((cursor, c0.min(to)));
        }
        cursor = cursor.max(c1);
        if cursor >= to - GEOM_EPS {
            break;
        }
    }
    if to - cursor > GEOM_EPS {
        out.push((cursor, to));
    }
    out
}

/// Exterior wall segments of one space.
pub fn space_envelope(plan: &FloorPlan, space: &Space) -> Vec<EnvelopeSegment> {
    let mut out = Vec::new();
    for side in WallSide::ALL {
        let start = space.rect.side_start(side);
        let mut cuts: Vec<(f64, f64)> = plan
            .spaces
            .iter()
            .filter(|o| o.id != space.id)
            .filter_map(|o| shared_segment(&space.rect, &o.rect))
            .filter(|seg| seg.side == side)
            .map(|seg| (seg.start - start, seg.end - start))
            .collect();
        let length = space.rect.side_length(side);
        for (from, to) in subtract_intervals(0.0, length, &mut cuts) {
            out.push(EnvelopeSegment {
                space: space.id,
                side,
                from,
                to,
                azimuth: plan.azimuth_of(side),
            });
        }
    }
    out
}

/// Every wall segment not shared with another space, with world azimuths.
pub fn envelope_sides(plan: &FloorPlan) -> Vec<EnvelopeSegment> {
    plan.spaces.iter().flat_map(|s| space_envelope(plan, s)).collect()
}

/// Shortest angular distance between two azimuths in degrees.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

/// A compass direction range: `center ± half_width` degrees, inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompassSector {
    pub center: f64,
    pub half_width: f64,
}

impl CompassSector {
    pub fn contains(&self, azimuth: f64) -> bool {
        angular_distance(azimuth, self.center) <= self.half_width + 1e-9
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequiredSpace {
    pub function: SpaceFunction,
    pub count: u32,
    pub min_floor_area: f64,
    /// Minimum width of the space's widest window; 0 means no window required.
    pub min_window_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignProgram {
    pub required_spaces: Vec<RequiredSpace>,
    /// `(a, b)`: every space of function `b` shares an interior door with a
    /// space of function `a`.
    pub connectivity: Vec<(SpaceFunction, SpaceFunction)>,
    pub opening_orientation_prefs: Vec<(SpaceFunction, CompassSector)>,
    pub max_construction_area: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ceiling_height: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct ProgramFile<P> {
    schema_version: u32,
    #[serde(flatten)]
    program: P,
}

impl DesignProgram {
    pub fn ceiling_height(&self) -> f64 {
        self.ceiling_height.unwrap_or(DEFAULT_CEILING_HEIGHT)
    }

    pub fn requirement(&self, function: SpaceFunction) -> Option<&RequiredSpace> {
        self.required_spaces.iter().find(|r| r.function == function)
    }

    pub fn min_area(&self, function: SpaceFunction) -> f64 {
        self.requirement(function).map_or(0.0, |r| r.min_floor_area)
    }

    pub fn min_window_width(&self, function: SpaceFunction) -> f64 {
        self.requirement(function).map_or(0.0, |r| r.min_window_width)
    }

    pub fn space_count(&self) -> u32 {
        self.required_spaces.iter().map(|r| r.count).sum()
    }

    pub fn min_total_area(&self) -> f64 {
        self.required_spaces
            .iter()
            .map(|r| r.count as f64 * r.min_floor_area)
            .sum()
    }

    pub fn check(&self) -> Result<()> {
        if self.required_spaces.is_empty() {
            return Err(Error::Program("no required spaces".into()));
        }
        for r in &self.required_spaces {
            if r.count < 1 {
                return Err(Error::Program(format!("{:?}: count must be >= 1", r.function)));
            }
            if !(r.min_floor_area > 0.0) {
                return Err(Error::Program(format!("{:?}: min_floor_area must be > 0", r.function)));
            }
            if !(r.min_window_width >= 0.0) {
                return Err(Error::Program(format!("{:?}: negative min_window_width", r.function)));
            }
        }
        if self
            .required_spaces
            .iter()
            .enumerate()
            .any(|(i, r)| self.required_spaces[..i].iter().any(|p| p.function == r.function))
        {
            return Err(Error::Program("function listed twice in required_spaces".into()));
        }
        if !(self.max_construction_area > 0.0) {
            return Err(Error::Program("max_construction_area must be > 0".into()));
        }
        if let Some(h) = self.ceiling_height {
            if !(h > 0.0) {
                return Err(Error::Program("ceiling_height must be > 0".into()));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&ProgramFile {
            schema_version: PROGRAM_SCHEMA_VERSION,
            program: self,
        })?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProgramFile<DesignProgram> = serde_json::from_str(text)?;
        if file.schema_version != PROGRAM_SCHEMA_VERSION {
            return Err(Error::Program(format!(
                "unsupported program schema_version {}",
                file.schema_version
            )));
        }
        file.program.check()?;
        Ok(file.program)
    }
}

/// One unmet requirement, with its magnitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    MissingSpace {
        function: SpaceFunction,
        missing: u32,
        min_floor_area: f64,
    },
    UnexpectedSpace {
        space: SpaceId,
        area: f64,
    },
    Overlap {
        a: SpaceId,
        b: SpaceId,
        area: f64,
    },
    AreaDeficit {
        space: SpaceId,
        deficit: f64,
    },
    WindowWidthDeficit {
        space: SpaceId,
        deficit: f64,
    },
    /// An opening not lying on a wall that can host it.
    MisplacedOpening {
        opening: OpeningId,
        kind: OpeningKind,
        width: f64,
    },
    MissingConnectivity {
        space: SpaceId,
        needs: SpaceFunction,
    },
    Unreachable {
        space: SpaceId,
    },
    OrientationMismatch {
        space: SpaceId,
    },
    OverArea {
        excess: f64,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RequirementReport {
    pub violations: Vec<Violation>,
}

impl RequirementReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn area_deficit(&self, space: SpaceId) -> Option<f64> {
        self.violations.iter().find_map(|v| match v {
            Violation::AreaDeficit { space: s, deficit } if *s == space => Some(*deficit),
            _ => None,
        })
    }
}

/// Placement check for one opening against precomputed envelope segments.
fn opening_placed(plan: &FloorPlan, envelope: &[EnvelopeSegment], o: &Opening) -> bool {
    let Some(host) = plan.space(o.host_space) else {
        return false;
    };
    if o.offset < -GEOM_EPS
        || o.offset + o.width > host.rect.side_length(o.wall_side) + GEOM_EPS
        || o.sill < -GEOM_EPS
        || o.sill + o.height > host.ceiling_height + GEOM_EPS
    {
        return false;
    }
    match o.kind {
        OpeningKind::Window | OpeningKind::ExteriorDoor => envelope
            .iter()
            .any(|seg| seg.space == o.host_space && seg.side == o.wall_side && seg.contains(o.offset, o.width)),
        OpeningKind::InteriorDoor => {
            let Some(other) = o.links_to.and_then(|id| plan.space(id)) else {
                return false;
            };
            match shared_segment(&host.rect, &other.rect) {
                Some(seg) if seg.side == o.wall_side => {
                    let start = host.rect.side_start(o.wall_side) + o.offset;
                    start >= seg.start - GEOM_EPS && start + o.width <= seg.end + GEOM_EPS
                }
                _ => false,
            }
        }
    }
}

/// Which openings are validly placed, by index into `plan.openings`.
pub fn placed_openings(plan: &FloorPlan) -> Vec<bool> {
    let envelope = envelope_sides(plan);
    plan.openings
        .iter()
        .map(|o| opening_placed(plan, &envelope, o))
        .collect()
}

/// Interior-door adjacency (only validly placed doors count).
fn door_graph(plan: &FloorPlan, placed: &[bool]) -> BTreeMap<SpaceId, Vec<SpaceId>> {
    let mut graph: BTreeMap<SpaceId, Vec<SpaceId>> = BTreeMap::new();
    for (o, ok) in plan.openings.iter().zip(placed) {
        if *ok && o.kind == OpeningKind::InteriorDoor {
            if let Some(b) = o.links_to {
                graph.entry(o.host_space).or_default().push(b);
                graph.entry(b).or_default().push(o.host_space);
            }
        }
    }
    graph
}

/// Checks every count, area, window, connectivity, reachability, orientation
/// and total-area requirement of `program` against `plan`.
pub fn validate(plan: &FloorPlan, program: &DesignProgram) -> RequirementReport {
    let mut violations = Vec::new();
    let envelope = envelope_sides(plan);
    let placed: Vec<bool> = plan
        .openings
        .iter()
        .map(|o| opening_placed(plan, &envelope, o))
        .collect();

    for req in &program.required_spaces {
        let found = plan.spaces.iter().filter(|s| s.function == req.function).count() as u32;
        if found < req.count {
            violations.push(Violation::MissingSpace {
                function: req.function,
                missing: req.count - found,
                min_floor_area: req.min_floor_area,
            });
        }
    }
    let mut seen: BTreeMap<SpaceFunction, u32> = BTreeMap::new();
    for s in &plan.spaces {
        let n = seen.entry(s.function).or_default();
        *n += 1;
        let allowed = program.requirement(s.function).map_or(0, |r| r.count);
        if *n > allowed {
            violations.push(Violation::UnexpectedSpace {
                space: s.id,
                area: s.area(),
            });
        }
    }

    for (i, a) in plan.spaces.iter().enumerate() {
        for b in &plan.spaces[i + 1..] {
            let area = overlap_area(&a.rect, &b.rect);
            if area > GEOM_EPS {
                violations.push(Violation::Overlap { a: a.id, b: b.id, area });
            }
        }
    }

    for s in &plan.spaces {
        let deficit = program.min_area(s.function) - s.area();
        if deficit > GEOM_EPS {
            violations.push(Violation::AreaDeficit { space: s.id, deficit });
        }
    }

    for (o, ok) in plan.openings.iter().zip(&placed) {
        if !ok {
            violations.push(Violation::MisplacedOpening {
                opening: o.id,
                kind: o.kind,
                width: o.width,
            });
        }
    }

    for s in &plan.spaces {
        let need = program.min_window_width(s.function);
        if need <= 0.0 {
            continue;
        }
        let widest = plan
            .openings
            .iter()
            .zip(&placed)
            .filter(|(o, ok)| **ok && o.kind == OpeningKind::Window && o.host_space == s.id)
            .map(|(o, _)| o.width)
            .fold(0.0, f64::max);
        if need - widest > GEOM_EPS {
            violations.push(Violation::WindowWidthDeficit {
                space: s.id,
                deficit: need - widest,
            });
        }
    }

    let graph = door_graph(plan, &placed);
    for &(a, b) in &program.connectivity {
        if a == b {
            continue;
        }
        for s in plan.spaces.iter().filter(|s| s.function == b) {
            let linked = graph.get(&s.id).is_some_and(|ns| {
                ns.iter()
                    .any(|n| plan.space(*n).is_some_and(|n| n.function == a))
            });
            if !linked {
                violations.push(Violation::MissingConnectivity { space: s.id, needs: a });
            }
        }
    }

    let root = plan
        .spaces
        .iter()
        .find(|s| s.function == SpaceFunction::Hall)
        .or(plan.spaces.first());
    if let Some(root) = root {
        let mut reached = vec![root.id];
        let mut queue = VecDeque::from([root.id]);
        while let Some(cur) = queue.pop_front() {
            for n in graph.get(&cur).into_iter().flatten() {
                if !reached.contains(n) {
                    reached.push(*n);
                    queue.push_back(*n);
                }
            }
        }
        for s in &plan.spaces {
            if !reached.contains(&s.id) {
                violations.push(Violation::Unreachable { space: s.id });
            }
        }
    }

    for (function, sector) in &program.opening_orientation_prefs {
        for s in plan.spaces.iter().filter(|s| s.function == *function) {
            let facing = plan.openings.iter().zip(&placed).any(|(o, ok)| {
                *ok && o.kind == OpeningKind::Window
                    && o.host_space == s.id
                    && sector.contains(plan.azimuth_of(o.wall_side))
            });
            if !facing {
                violations.push(Violation::OrientationMismatch { space: s.id });
            }
        }
    }

    let excess = plan.total_area() - program.max_construction_area;
    if excess > GEOM_EPS {
        violations.push(Violation::OverArea { excess });
    }

    RequirementReport { violations }
}
