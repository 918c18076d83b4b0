//! Integer-decimeter plan genomes and their expression as floor plans.

use rand::Rng;

use crate::plan::{
    shared_segment, space_envelope, DesignProgram, FloorPlan, Opening, OpeningId, OpeningKind, Rect, Space,
    SpaceFunction, SpaceId, WallSide,
};

/// Grid unit of every genome coordinate (m).
pub const GRID: f64 = 0.1;
/// Shortest room side (dm).
pub const MIN_SIDE: i32 = 10;
pub const DOOR_WIDTH: i32 = 8;
pub const DOOR_HEIGHT: f64 = 2.0;
pub const ENTRANCE_WIDTH: i32 = 9;
pub const ENTRANCE_HEIGHT: f64 = 2.1;
pub const WINDOW_HEIGHT: f64 = 1.2;
pub const WINDOW_SILL: f64 = 0.9;
pub const SMALL_WINDOW_HEIGHT: f64 = 0.8;
pub const SMALL_WINDOW_SILL: f64 = 1.3;
/// Narrowest window the search will produce (dm).
pub const MIN_WINDOW: i32 = 4;

pub(crate) fn to_m(dm: i32) -> f64 {
    dm as f64 * GRID
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Room {
    pub function: SpaceFunction,
    pub x: i32,
    pub y: i32,
    pub w: i32,
    pub h: i32,
}

impl Room {
    pub fn rect(&self) -> Rect {
        Rect {
            x: to_m(self.x),
            y: to_m(self.y),
            w: to_m(self.w),
            h: to_m(self.h),
        }
    }

    pub fn side_length(&self, side: WallSide) -> i32 {
        match side {
            WallSide::N | WallSide::S => self.w,
            WallSide::E | WallSide::W => self.h,
        }
    }

    pub fn center2(&self) -> (i32, i32) {
        (2 * self.x + self.w, 2 * self.y + self.h)
    }
}

/// A window or the entrance door, placed on one wall of a room.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct OpeningGene {
    pub room: usize,
    pub side: WallSide,
    pub offset: i32,
    pub width: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Genome {
    pub rooms: Vec<Room>,
    pub windows: Vec<OpeningGene>,
    pub entrance: Option<OpeningGene>,
    /// Self-adaptive mutation step (dm).
    pub sigma: f64,
}

/// Side length of the square site all rooms stay inside (dm).
pub(crate) fn site_size(program: &DesignProgram) -> i32 {
    ((program.max_construction_area.sqrt() * 1.6) / GRID).ceil() as i32 + 2 * MIN_SIDE
}

fn window_dims(function: SpaceFunction) -> (f64, f64) {
    match function {
        SpaceFunction::Bathroom => (SMALL_WINDOW_HEIGHT, SMALL_WINDOW_SILL),
        _ => (WINDOW_HEIGHT, WINDOW_SILL),
    }
}

/// An exterior wall piece in whole decimeters of a room's side.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Free {
    pub side: WallSide,
    pub from: i32,
    pub to: i32,
}

pub(crate) fn free_segments(plan: &FloorPlan, index: usize) -> Vec<Free> {
    space_envelope(plan, &plan.spaces[index])
        .into_iter()
        .map(|seg| Free {
            side: seg.side,
            from: (seg.from / GRID - 1e-6).ceil() as i32,
            to: (seg.to / GRID + 1e-6).floor() as i32,
        })
        .filter(|f| f.to > f.from)
        .collect()
}

fn fits(free: &[Free], gene: &OpeningGene) -> bool {
    free.iter()
        .any(|f| f.side == gene.side && gene.offset >= f.from && gene.offset + gene.width <= f.to)
}

impl Genome {
    pub fn genome_length(&self) -> usize {
        4 * self.rooms.len() + 2 * self.windows.len()
    }

    pub fn from_plan(plan: &FloorPlan) -> Genome {
        let dm = |v: f64| (v / GRID).round() as i32;
        let index = |id: SpaceId| plan.spaces.iter().position(|s| s.id == id).unwrap_or(0);
        let gene = |o: &Opening| OpeningGene {
            room: index(o.host_space),
            side: o.wall_side,
            offset: dm(o.offset),
            width: dm(o.width).max(1),
        };
        Genome {
            rooms: plan
                .spaces
                .iter()
                .map(|s| Room {
                    function: s.function,
                    x: dm(s.rect.x),
                    y: dm(s.rect.y),
                    w: dm(s.rect.w).max(1),
                    h: dm(s.rect.h).max(1),
                })
                .collect(),
            windows: plan
                .openings
                .iter()
                .filter(|o| o.kind == OpeningKind::Window)
                .map(gene)
                .collect(),
            entrance: plan.openings.iter().find(|o| o.kind == OpeningKind::ExteriorDoor).map(gene),
            sigma: 5.0,
        }
    }

    /// Rooms only, no openings.
    fn bare_plan(&self, program: &DesignProgram) -> FloorPlan {
        FloorPlan {
            spaces: self
                .rooms
                .iter()
                .enumerate()
                .map(|(i, r)| Space {
                    id: SpaceId(i as u32 + 1),
                    function: r.function,
                    rect: r.rect(),
                    ceiling_height: program.ceiling_height(),
                })
                .collect(),
            openings: Vec::new(),
            shading: Vec::new(),
            orientation: 0.0,
            reflected: false,
        }
    }

    /// Moves misplaced windows and the entrance onto an exterior wall of
    /// their room where one is long enough.
    fn repair_openings(&mut self, plan: &FloorPlan, program: &DesignProgram) {
        let mut free_cache: Vec<Option<Vec<Free>>> = vec![None; self.rooms.len()];
        let prefs = &program.opening_orientation_prefs;
        let mut genes: Vec<&mut OpeningGene> = self.windows.iter_mut().chain(self.entrance.as_mut()).collect();
        for gene in genes.iter_mut() {
            let free = free_cache[gene.room].get_or_insert_with(|| free_segments(plan, gene.room));
            if fits(free, gene) {
                continue;
            }
            let function = plan.spaces[gene.room].function;
            let preferred = |side: WallSide| {
                prefs
                    .iter()
                    .filter(|(f, _)| *f == function)
                    .all(|(_, sector)| sector.contains(plan.azimuth_of(side)))
            };
            let best = free
                .iter()
                .filter(|f| f.to - f.from >= gene.width)
                .max_by_key(|f| (f.side == gene.side, preferred(f.side), f.to - f.from, std::cmp::Reverse(f.from)));
            if let Some(f) = best {
                gene.side = f.side;
                gene.offset = (gene.offset).clamp(f.from, f.to - gene.width);
            }
        }
    }

    /// The floor plan this genome encodes. Windows are repaired in place and
    /// interior doors rebuilt from the program's connectivity and the
    /// reachability of every room from the hall.
    pub fn express(&mut self, program: &DesignProgram) -> FloorPlan {
        let mut plan = self.bare_plan(program);
        self.repair_openings(&plan, program);

        let mut next_id = 1;
        for gene in &self.windows {
            let (height, sill) = window_dims(self.rooms[gene.room].function);
            plan.openings.push(Opening {
                id: OpeningId(next_id),
                kind: OpeningKind::Window,
                host_space: SpaceId(gene.room as u32 + 1),
                wall_side: gene.side,
                offset: to_m(gene.offset),
                width: to_m(gene.width),
                height,
                sill,
                links_to: None,
            });
            next_id += 1;
        }
        if let Some(gene) = &self.entrance {
            plan.openings.push(Opening {
                id: OpeningId(next_id),
                kind: OpeningKind::ExteriorDoor,
                host_space: SpaceId(gene.room as u32 + 1),
                wall_side: gene.side,
                offset: to_m(gene.offset),
                width: to_m(gene.width),
                height: ENTRANCE_HEIGHT,
                sill: 0.0,
                links_to: None,
            });
            next_id += 1;
        }
        for (host, other) in door_pairs(&self.rooms, program) {
            let (a, b) = (self.rooms[host].rect(), self.rooms[other].rect());
            let seg = shared_segment(&a, &b).expect("door pairs share a wall");
            let width = to_m(DOOR_WIDTH);
            let mid = 0.5 * (seg.start + seg.end);
            plan.openings.push(Opening {
                id: OpeningId(next_id),
                kind: OpeningKind::InteriorDoor,
                host_space: SpaceId(host as u32 + 1),
                wall_side: seg.side,
                offset: mid - 0.5 * width - a.side_start(seg.side),
                width,
                height: DOOR_HEIGHT,
                sill: 0.0,
                links_to: Some(SpaceId(other as u32 + 1)),
            });
            next_id += 1;
        }
        plan
    }
}

/// Shared wall length in decimeters, zero unless it can take a door.
fn door_wall(a: &Room, b: &Room) -> i32 {
    let (ax1, ay1, bx1, by1) = (a.x + a.w, a.y + a.h, b.x + b.w, b.y + b.h);
    let len = if ax1 == b.x || bx1 == a.x {
        ay1.min(by1) - a.y.max(b.y)
    } else if ay1 == b.y || by1 == a.y {
        ax1.min(bx1) - a.x.max(b.x)
    } else {
        0
    };
    if len >= DOOR_WIDTH {
        len
    } else {
        0
    }
}

/// Rooms to join by interior doors, as `(host, other)` index pairs.
fn door_pairs(rooms: &[Room], program: &DesignProgram) -> Vec<(usize, usize)> {
    let n = rooms.len();
    let mut linked = vec![vec![false; n]; n];
    let mut pairs = Vec::new();
    let add = |pairs: &mut Vec<(usize, usize)>, linked: &mut Vec<Vec<bool>>, a: usize, b: usize| {
        linked[a][b] = true;
        linked[b][a] = true;
        pairs.push((a, b));
    };
    for &(fa, fb) in &program.connectivity {
        if fa == fb {
            continue;
        }
        for s in (0..n).filter(|&s| rooms[s].function == fb) {
            if (0..n).any(|o| linked[s][o] && rooms[o].function == fa) {
                continue;
            }
            let best = (0..n)
                .filter(|&o| rooms[o].function == fa)
                .map(|o| (door_wall(&rooms[s], &rooms[o]), o))
                .filter(|&(len, _)| len > 0)
                .max_by_key(|&(len, o)| (len, std::cmp::Reverse(o)));
            if let Some((_, o)) = best {
                add(&mut pairs, &mut linked, s, o);
            }
        }
    }

    let root = rooms.iter().position(|r| r.function == SpaceFunction::Hall).unwrap_or(0);
    loop {
        let mut reached = vec![false; n];
        let mut stack = vec![root];
        reached[root] = true;
        while let Some(cur) = stack.pop() {
            for o in 0..n {
                if linked[cur][o] && !reached[o] {
                    reached[o] = true;
                    stack.push(o);
                }
            }
        }
        let next = (0..n).filter(|&u| !reached[u]).find_map(|u| {
            (0..n)
                .filter(|&r| reached[r])
                .map(|r| (door_wall(&rooms[u], &rooms[r]), r))
                .filter(|&(len, _)| len > 0)
                .max_by_key(|&(len, r)| (len, std::cmp::Reverse(r)))
                .map(|(_, r)| (u, r))
        });
        match next {
            Some((u, r)) => add(&mut pairs, &mut linked, u, r),
            None => break,
        }
    }
    pairs
}

/// Rooms in the order the seeding places them: breadth first over the
/// connectivity requirements starting at the hall, then the rest.
fn placement_order(rooms: &[Room], program: &DesignProgram) -> Vec<usize> {
    let n = rooms.len();
    let related = |a: SpaceFunction, b: SpaceFunction| {
        program
            .connectivity
            .iter()
            .any(|&(x, y)| (x == a && y == b) || (x == b && y == a))
    };
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let root = rooms.iter().position(|r| r.function == SpaceFunction::Hall).unwrap_or(0);
    order.push(root);
    used[root] = true;
    let mut head = 0;
    while order.len() < n {
        if head < order.len() {
            let cur = order[head];
            head += 1;
            for o in 0..n {
                if !used[o] && related(rooms[cur].function, rooms[o].function) {
                    used[o] = true;
                    order.push(o);
                }
            }
        } else {
            let o = (0..n).find(|&o| !used[o]).expect("unplaced room remains");
            used[o] = true;
            order.push(o);
        }
    }
    order
}

/// Random plan with every required room at or above its minimum area, each
/// room attached to a wall of a room it must connect to.
pub(crate) fn random_genome<R: Rng>(program: &DesignProgram, rng: &mut R) -> Genome {
    let site = site_size(program);
    let dependents = |f: SpaceFunction| {
        program
            .connectivity
            .iter()
            .filter(|&&(a, _)| a == f)
            .map(|&(_, b)| program.requirement(b).map_or(0, |r| r.count))
            .sum::<u32>()
    };
    let mut rooms = Vec::new();
    for req in &program.required_spaces {
        for _ in 0..req.count {
            let area = req.min_floor_area * rng.random_range(1.0..1.25) / (GRID * GRID);
            let hub = dependents(req.function);
            let (w, h) = if hub >= 2 {
                let long = (12 * hub as i32).max((area.sqrt()) as i32);
                let short = ((area / long as f64).ceil() as i32).max(MIN_SIDE);
                (long, short)
            } else {
                let ratio: f64 = rng.random_range(0.7..1.5);
                let w = ((area * ratio).sqrt().round() as i32).max(MIN_SIDE);
                let h = ((area / w as f64).ceil() as i32).max(MIN_SIDE);
                (w, h)
            };
            let (w, h) = if rng.random_bool(0.5) { (w, h) } else { (h, w) };
            rooms.push(Room {
                function: req.function,
                x: 0,
                y: 0,
                w: w.min(site),
                h: h.min(site),
            });
        }
    }

    let order = placement_order(&rooms, program);
    let related = |a: SpaceFunction, b: SpaceFunction| {
        program
            .connectivity
            .iter()
            .any(|&(x, y)| (x == a && y == b) || (x == b && y == a))
    };
    for (k, &i) in order.iter().enumerate() {
        if k == 0 {
            rooms[i].x = (site - rooms[i].w) / 2;
            rooms[i].y = (site - rooms[i].h) / 2;
            continue;
        }
        let placed = &order[..k];
        let partners: Vec<usize> = placed
            .iter()
            .copied()
            .filter(|&p| related(rooms[p].function, rooms[i].function))
            .collect();
        let anchor = if partners.is_empty() {
            placed[rng.random_range(0..placed.len())]
        } else {
            partners[rng.random_range(0..partners.len())]
        };
        let a = rooms[anchor];
        let r = &mut rooms[i];
        let side = WallSide::ALL[rng.random_range(0..4)];
        let slide = |len_a: i32, len_r: i32, rng: &mut R| {
            let lo = -len_r + DOOR_WIDTH.min(len_r);
            let hi = len_a - DOOR_WIDTH.min(len_r);
            if hi > lo {
                rng.random_range(lo..=hi)
            } else {
                0
            }
        };
        match side {
            WallSide::N => {
                r.y = a.y + a.h;
                r.x = a.x + slide(a.w, r.w, rng);
            }
            WallSide::S => {
                r.y = a.y - r.h;
                r.x = a.x + slide(a.w, r.w, rng);
            }
            WallSide::E => {
                r.x = a.x + a.w;
                r.y = a.y + slide(a.h, r.h, rng);
            }
            WallSide::W => {
                r.x = a.x - r.w;
                r.y = a.y + slide(a.h, r.h, rng);
            }
        }
        r.x = r.x.clamp(0, site - r.w);
        r.y = r.y.clamp(0, site - r.h);
    }

    let mut windows = Vec::new();
    for (i, room) in rooms.iter().enumerate() {
        let need = program.min_window_width(room.function);
        if need <= 0.0 {
            continue;
        }
        let sides: Vec<WallSide> = WallSide::ALL
            .into_iter()
            .filter(|&s| {
                program
                    .opening_orientation_prefs
                    .iter()
                    .filter(|(f, _)| *f == room.function)
                    .all(|(_, sector)| sector.contains(s.local_azimuth()))
            })
            .collect();
        let side = if sides.is_empty() {
            WallSide::ALL[rng.random_range(0..4)]
        } else {
            sides[rng.random_range(0..sides.len())]
        };
        let width = ((need / GRID).ceil() as i32 + rng.random_range(0..=6)).max(MIN_WINDOW);
        let width = width.min(room.side_length(side)).max(1);
        windows.push(OpeningGene {
            room: i,
            side,
            offset: (room.side_length(side) - width) / 2,
            width,
        });
    }
    let entrance = rooms.iter().position(|r| r.function == SpaceFunction::Hall).map(|i| {
        let side = WallSide::ALL[rng.random_range(0..4)];
        let width = ENTRANCE_WIDTH.min(rooms[i].side_length(side));
        OpeningGene {
            room: i,
            side,
            offset: (rooms[i].side_length(side) - width) / 2,
            width,
        }
    });
    Genome {
        rooms,
        windows,
        entrance,
        sigma: 5.0,
    }
}
