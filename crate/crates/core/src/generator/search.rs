//! Local search moves and the evolutionary loop.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::genome::{free_segments, random_genome, site_size, Genome, OpeningGene, Room, DOOR_WIDTH, MIN_SIDE, MIN_WINDOW};
use super::{design_penalty_with, fingerprint, layout_signature, stream_rng, DesignPenalty, DesignWeights, Fingerprint, SearchConfig};
use crate::plan::{DesignProgram, FloorPlan, WallSide};

#[derive(Debug, Clone)]
pub(crate) struct Scored {
    pub genome: Genome,
    pub plan: FloorPlan,
    pub penalty: DesignPenalty,
    /// Tie-breaker pulling rooms that must connect towards each other.
    pub guide: f64,
}

impl Scored {
    pub fn new(mut genome: Genome, program: &DesignProgram, weights: &DesignWeights) -> Scored {
        let plan = genome.express(program);
        let penalty = design_penalty_with(&plan, program, weights);
        let guide = guide(&genome.rooms, program);
        Scored {
            genome,
            plan,
            penalty,
            guide,
        }
    }

    pub fn key(&self) -> (f64, f64) {
        (self.penalty.total, self.guide)
    }

    fn better_than(&self, other: &Scored) -> bool {
        let (a, b) = (self.key(), other.key());
        a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
    }
}

/// Contact shortfall (dm) between two rooms for a door.
fn contact_gap(a: &Room, b: &Room) -> i32 {
    let (ax1, ay1, bx1, by1) = (a.x + a.w, a.y + a.h, b.x + b.w, b.y + b.h);
    let dx = (a.x - bx1).max(b.x - ax1);
    let dy = (a.y - by1).max(b.y - ay1);
    if dx > 0 || dy > 0 {
        return dx.max(0) + dy.max(0) + DOOR_WIDTH;
    }
    let ox = ax1.min(bx1) - a.x.max(b.x);
    let oy = ay1.min(by1) - a.y.max(b.y);
    match (ox, oy) {
        (0, o) | (o, 0) => (DOOR_WIDTH - o).max(0),
        _ => 0,
    }
}

fn guide(rooms: &[Room], program: &DesignProgram) -> f64 {
    let mut gap = 0;
    for &(fa, fb) in &program.connectivity {
        for s in rooms.iter().filter(|r| r.function == fb) {
            gap += rooms
                .iter()
                .filter(|r| r.function == fa && *r != s)
                .map(|r| contact_gap(s, r))
                .min()
                .unwrap_or(0);
        }
    }
    let (x0, y0) = rooms.iter().fold((i32::MAX, i32::MAX), |(x, y), r| (x.min(r.x), y.min(r.y)));
    let (x1, y1) = rooms
        .iter()
        .fold((i32::MIN, i32::MIN), |(x, y), r| (x.max(r.x + r.w), y.max(r.y + r.h)));
    gap as f64 * 0.1 + 1e-4 * ((x1 - x0) as f64 * (y1 - y0) as f64) * 0.01
}

fn nonzero<R: Rng>(rng: &mut R, reach: i32) -> i32 {
    let v = rng.random_range(1..=reach.max(1));
    if rng.random_bool(0.5) {
        v
    } else {
        -v
    }
}

fn clamp_room(r: &mut Room, site: i32) {
    r.w = r.w.clamp(MIN_SIDE, site);
    r.h = r.h.clamp(MIN_SIDE, site);
    r.x = r.x.clamp(0, site - r.w);
    r.y = r.y.clamp(0, site - r.h);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Move {
    Translate,
    Resize,
    Swap,
    Align,
    SlideOpening,
    ResizeOpening,
    RelocateOpening,
}

impl Move {
    const WEIGHTED: [(Move, u32); 7] = [
        (Move::Translate, 3),
        (Move::Resize, 3),
        (Move::Swap, 1),
        (Move::Align, 4),
        (Move::SlideOpening, 1),
        (Move::ResizeOpening, 1),
        (Move::RelocateOpening, 1),
    ];

    fn pick<R: Rng>(rng: &mut R) -> Move {
        let total: u32 = Self::WEIGHTED.iter().map(|w| w.1).sum();
        let mut k = rng.random_range(0..total);
        for (m, w) in Self::WEIGHTED {
            if k < w {
                return m;
            }
            k -= w;
        }
        unreachable!()
    }
}

/// A random neighbour of `cur`, or `None` when the move does not apply.
fn propose<R: Rng>(cur: &Scored, mv: Move, site: i32, rng: &mut R) -> Option<Genome> {
    let mut g = cur.genome.clone();
    let n = g.rooms.len();
    let reach = g.sigma.round().max(1.0) as i32;
    match mv {
        Move::Translate => {
            let r = &mut g.rooms[rng.random_range(0..n)];
            if rng.random_bool(0.5) {
                r.x += nonzero(rng, reach);
            } else {
                r.y += nonzero(rng, reach);
            }
            clamp_room(r, site);
        }
        Move::Resize => {
            let r = &mut g.rooms[rng.random_range(0..n)];
            let d = nonzero(rng, reach);
            match WallSide::ALL[rng.random_range(0..4)] {
                WallSide::N => r.h += d,
                WallSide::E => r.w += d,
                WallSide::S => {
                    r.y -= d;
                    r.h += d;
                }
                WallSide::W => {
                    r.x -= d;
                    r.w += d;
                }
            }
            if r.w < MIN_SIDE || r.h < MIN_SIDE {
                return None;
            }
            clamp_room(r, site);
        }
        Move::Swap => {
            if n < 2 {
                return None;
            }
            let i = rng.random_range(0..n);
            let j = (i + rng.random_range(1..n)) % n;
            let (ci, cj) = (g.rooms[i].center2(), g.rooms[j].center2());
            for (k, c) in [(i, cj), (j, ci)] {
                let r = &mut g.rooms[k];
                r.x = (c.0 - r.w) / 2;
                r.y = (c.1 - r.h) / 2;
                clamp_room(r, site);
            }
        }
        Move::Align => {
            if n < 2 {
                return None;
            }
            let i = rng.random_range(0..n);
            let j = (i + rng.random_range(1..n)) % n;
            let b = g.rooms[j];
            let a = &mut g.rooms[i];
            let flush = rng.random_range(0..3);
            match rng.random_range(0..4) {
                0 => a.x = b.x + b.w,
                1 => a.x = b.x - a.w,
                2 => a.y = b.y + b.h,
                _ => a.y = b.y - a.h,
            }
            let horizontal_contact = a.x == b.x + b.w || a.x + a.w == b.x;
            match (flush, horizontal_contact) {
                (1, true) => a.y = b.y,
                (2, true) => a.y = b.y + b.h - a.h,
                (1, false) => a.x = b.x,
                (2, false) => a.x = b.x + b.w - a.w,
                _ => {}
            }
            clamp_room(a, site);
        }
        Move::SlideOpening => {
            let k = pick_gene(&g, rng, true)?;
            let gene = gene_mut(&mut g, k);
            gene.offset = (gene.offset + nonzero(rng, reach)).max(0);
        }
        Move::ResizeOpening => {
            let k = pick_gene(&g, rng, false)?;
            let d = nonzero(rng, 3);
            let gene = gene_mut(&mut g, k);
            if gene.width + d < MIN_WINDOW {
                return None;
            }
            gene.width += d;
            gene.offset = (gene.offset - d / 2).max(0);
        }
        Move::RelocateOpening => {
            let k = pick_gene(&g, rng, true)?;
            let gene = gene_mut(&mut g, k);
            let free = free_segments(&cur.plan, gene.room);
            let options: Vec<_> = free
                .iter()
                .filter(|f| f.to - f.from >= gene.width)
                .filter(|f| !(f.side == gene.side && gene.offset >= f.from && gene.offset + gene.width <= f.to))
                .collect();
            if options.is_empty() {
                return None;
            }
            let f = *options[rng.random_range(0..options.len())];
            gene.side = f.side;
            gene.offset = rng.random_range(f.from..=f.to - gene.width);
        }
    }
    (g != cur.genome).then_some(g)
}

/// Index of a random window, or of the entrance when `with_entrance`
/// (numbered after the windows).
fn pick_gene<R: Rng>(g: &Genome, rng: &mut R, with_entrance: bool) -> Option<usize> {
    let count = g.windows.len() + usize::from(with_entrance && g.entrance.is_some());
    (count > 0).then(|| rng.random_range(0..count))
}

fn gene_mut(g: &mut Genome, k: usize) -> &mut OpeningGene {
    if k < g.windows.len() {
        &mut g.windows[k]
    } else {
        g.entrance.as_mut().expect("entrance index")
    }
}

/// First-improvement descent over the move repertoire. Stops early once the
/// design penalty reaches zero.
pub(crate) fn descend<R: Rng>(
    start: Scored,
    program: &DesignProgram,
    weights: &DesignWeights,
    moves: usize,
    rng: &mut R,
) -> Scored {
    let site = site_size(program);
    let mut cur = start;
    for _ in 0..moves {
        if cur.penalty.total == 0.0 {
            break;
        }
        let mv = Move::pick(rng);
        let Some(g) = propose(&cur, mv, site, rng) else {
            continue;
        };
        let cand = Scored::new(g, program, weights);
        if cand.better_than(&cur) {
            cur = cand;
        }
    }
    cur
}

/// Self-adaptive Gaussian mutation on room and window genes.
fn mutate<R: Rng>(parent: &Genome, site: i32, rng: &mut R) -> Genome {
    let mut g = parent.clone();
    let tau = 1.0 / (2.0 * g.genome_length() as f64).sqrt();
    let z: f64 = rng.sample(StandardNormal);
    g.sigma = (g.sigma * (tau * z).exp()).clamp(1.0, site as f64 / 4.0);
    let len = g.genome_length();
    let rate = 2.0 / len as f64;
    let mut changed = false;
    while !changed {
        for k in 0..len {
            if !rng.random_bool(rate) {
                continue;
            }
            let z: f64 = rng.sample(StandardNormal);
            let step = (g.sigma * z).round() as i32;
            if step == 0 {
                continue;
            }
            changed = true;
            if k < 4 * g.rooms.len() {
                let r = &mut g.rooms[k / 4];
                match k % 4 {
                    0 => r.x += step,
                    1 => r.y += step,
                    2 => r.w += step,
                    _ => r.h += step,
                }
                clamp_room(r, site);
            } else {
                let w = &mut g.windows[(k - 4 * g.rooms.len()) / 2];
                if k % 2 == 0 {
                    w.offset = (w.offset + step).max(0);
                } else {
                    w.width = (w.width + step).max(MIN_WINDOW);
                }
            }
        }
    }
    g
}

pub(crate) struct Archived {
    pub plan: FloorPlan,
    pub signature: Vec<(crate::plan::SpaceFunction, crate::plan::SpaceFunction, WallSide)>,
}

pub(crate) struct Evolution {
    pub archive: BTreeMap<Fingerprint, Archived>,
    pub generations: usize,
    pub best_history: Vec<f64>,
}

/// Layouts already represented in the archive.
fn distinct_layouts(archive: &BTreeMap<Fingerprint, Archived>) -> usize {
    let mut sigs: Vec<_> = archive.values().map(|a| &a.signature).collect();
    sigs.sort();
    sigs.dedup();
    sigs.len()
}

/// Zero-penalty individuals kept per layout in the population.
const LAYOUT_CAP: usize = 2;

fn select(mut pool: Vec<Scored>, mu: usize) -> Vec<Scored> {
    pool.sort_by(|a, b| a.key().0.total_cmp(&b.key().0).then(a.key().1.total_cmp(&b.key().1)));
    let mut chosen = Vec::with_capacity(mu);
    let mut reserve = Vec::new();
    let mut prints = std::collections::BTreeSet::new();
    let mut per_layout: BTreeMap<Vec<_>, usize> = BTreeMap::new();
    for s in pool {
        if chosen.len() == mu {
            break;
        }
        let print = fingerprint(&s.plan);
        if prints.contains(&print) {
            reserve.push(s);
            continue;
        }
        if s.penalty.total == 0.0 {
            let n = per_layout.entry(layout_signature(&s.plan)).or_default();
            if *n >= LAYOUT_CAP {
                reserve.push(s);
                continue;
            }
            *n += 1;
        }
        prints.insert(print);
        chosen.push(s);
    }
    let missing = mu - chosen.len();
    chosen.extend(reserve.into_iter().take(missing));
    chosen
}

pub(crate) fn seed_genomes(program: &DesignProgram, cfg: &SearchConfig) -> Vec<Genome> {
    (0..cfg.population_size)
        .into_par_iter()
        .map(|i| random_genome(program, &mut stream_rng(cfg.seed, u64::MAX, i as u64)))
        .collect()
}

pub(crate) fn evolve(program: &DesignProgram, cfg: &SearchConfig) -> Evolution {
    let site = site_size(program);
    let weights = &cfg.weights;
    let mut population: Vec<Scored> = seed_genomes(program, cfg)
        .into_par_iter()
        .enumerate()
        .map(|(i, g)| {
            let start = Scored::new(g, program, weights);
            let mut rng = stream_rng(cfg.seed, u64::MAX - 1, i as u64);
            descend(start, program, weights, cfg.ls_moves_per_individual, &mut rng)
        })
        .collect();
    population = select(population, cfg.population_size);

    let mut archive = BTreeMap::new();
    let mut best_history = Vec::new();
    let mut generations = 0;
    let archive_zeros = |archive: &mut BTreeMap<Fingerprint, Archived>, pop: &[Scored]| {
        for s in pop.iter().filter(|s| s.penalty.total == 0.0) {
            archive.entry(fingerprint(&s.plan)).or_insert_with(|| Archived {
                plan: s.plan.clone(),
                signature: layout_signature(&s.plan),
            });
        }
    };
    archive_zeros(&mut archive, &population);
    best_history.push(population[0].penalty.total);

    while generations < cfg.generations && distinct_layouts(&archive) < cfg.target_count {
        generations += 1;
        let lambda = cfg.offspring_per_parent;
        let offspring: Vec<Scored> = (0..population.len() * lambda)
            .into_par_iter()
            .map(|k| {
                let mut rng = stream_rng(cfg.seed, generations as u64, k as u64);
                let child = mutate(&population[k / lambda].genome, site, &mut rng);
                let start = Scored::new(child, program, weights);
                descend(start, program, weights, cfg.ls_moves_per_individual, &mut rng)
            })
            .collect();
        archive_zeros(&mut archive, &offspring);
        let prev_best = population[0].penalty.total;
        let mut pool = population;
        pool.extend(offspring);
        population = select(pool, cfg.population_size);
        let best = population[0].penalty.total;
        assert!(best <= prev_best, "elitism violated: {best} > {prev_best}");
        best_history.push(best);
    }

    Evolution {
        archive,
        generations,
        best_history,
    }
}
