//! Sequential geometric optimization of finished floor plans: greedy
//! coordinate sweeps over discrete candidate values, driven by the annual
//! thermal penalty with envelope openings closed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::Evaluator;
use crate::plan::{
    space_envelope, validate, DesignProgram, EnvelopeSegment, FloorPlan, OpeningId, OpeningKind, ShadingDevice,
    SpaceId, WallSide, GEOM_EPS,
};

pub const MAX_PASSES: usize = 3;
pub const ORIENTATIONS: [f64; 8] = [0.0, 45.0, 90.0, 135.0, 180.0, 225.0, 270.0, 315.0];
pub const WINDOW_HEIGHTS: [f64; 4] = [0.9, 1.1, 1.3, 1.5];
pub const WALL_SHIFTS: [f64; 5] = [-0.6, -0.3, 0.0, 0.3, 0.6];
pub const SHADING_DEPTHS: [f64; 4] = [0.0, 0.3, 0.6, 0.9];
/// Number of offset and width candidates per window.
pub const OPENING_STEPS: usize = 5;
/// Narrowest window considered when the program sets no minimum (m).
pub const MIN_WINDOW_WIDTH: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VariableKind {
    Orientation,
    Reflection,
    OpeningOffset,
    OpeningWidth,
    OpeningHeight,
    InteriorWallPosition,
    OverhangDepth,
    FinDepth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FinSide {
    Left,
    Right,
}

/// The plan element a variable changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VariableTarget {
    Plan,
    Opening(OpeningId),
    /// The wall between `low` and `high`, where `high` lies to the local
    /// east (`vertical`) or north of `low`. Its value is the wall's x or y.
    Wall { low: SpaceId, high: SpaceId, vertical: bool },
    Fin(OpeningId, FinSide),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignVariable {
    pub kind: VariableKind,
    pub target: VariableTarget,
    /// Candidate values: degrees, 0/1 for reflection, meters otherwise.
    pub candidates: Vec<f64>,
}

fn round_mm(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

fn spread(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let mut out: Vec<f64> = (0..steps)
        .map(|i| round_mm(lo + (hi - lo) * i as f64 / (steps - 1) as f64))
        .collect();
    out.dedup();
    out
}

/// The exterior wall segment of the host space holding most of the opening.
fn hosting_segment(plan: &FloorPlan, id: OpeningId) -> Option<EnvelopeSegment> {
    let o = plan.opening(id)?;
    let host = plan.space(o.host_space)?;
    space_envelope(plan, host)
        .into_iter()
        .filter(|seg| seg.side == o.wall_side)
        .map(|seg| {
            let cover = (o.offset + o.width).min(seg.to) - o.offset.max(seg.from);
            (cover, seg)
        })
        .filter(|(cover, _)| *cover > GEOM_EPS)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, seg)| seg)
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= GEOM_EPS
}

fn shading_mut(plan: &mut FloorPlan, id: OpeningId) -> &mut ShadingDevice {
    if plan.shading_for(id).is_none() {
        plan.shading.push(ShadingDevice::bare(id));
    }
    plan.shading_for_mut(id).expect("device just attached")
}

/// Moves the origin of space `id` by `d` along one axis, keeping its openings
/// on the perpendicular walls in place.
fn shift_origin(plan: &mut FloorPlan, id: SpaceId, d: f64, vertical: bool) {
    if let Some(s) = plan.space_mut(id) {
        if vertical {
            s.rect.x += d;
            s.rect.w -= d;
        } else {
            s.rect.y += d;
            s.rect.h -= d;
        }
    }
    let along: [WallSide; 2] = if vertical { [WallSide::N, WallSide::S] } else { [WallSide::E, WallSide::W] };
    for o in plan.openings.iter_mut().filter(|o| o.host_space == id && along.contains(&o.wall_side)) {
        o.offset -= d;
    }
}

impl DesignVariable {
    /// Current value of the variable in `plan`, if its target exists.
    pub fn value(&self, plan: &FloorPlan) -> Option<f64> {
        match (self.kind, self.target) {
            (VariableKind::Orientation, _) => Some(plan.orientation),
            (VariableKind::Reflection, _) => Some(if plan.reflected { 1.0 } else { 0.0 }),
            (VariableKind::OpeningOffset, VariableTarget::Opening(id)) => plan.opening(id).map(|o| o.offset),
            (VariableKind::OpeningWidth, VariableTarget::Opening(id)) => plan.opening(id).map(|o| o.width),
            (VariableKind::OpeningHeight, VariableTarget::Opening(id)) => plan.opening(id).map(|o| o.height),
            (VariableKind::InteriorWallPosition, VariableTarget::Wall { low, vertical, .. }) => {
                plan.space(low).map(|s| if vertical { s.rect.right() } else { s.rect.top() })
            }
            (VariableKind::OverhangDepth, VariableTarget::Opening(id)) => {
                plan.opening(id)?;
                Some(plan.shading_for(id).map_or(0.0, |d| d.overhang_depth))
            }
            (VariableKind::FinDepth, VariableTarget::Fin(id, side)) => {
                plan.opening(id)?;
                Some(plan.shading_for(id).map_or(0.0, |d| match side {
                    FinSide::Left => d.left_fin_depth,
                    FinSide::Right => d.right_fin_depth,
                }))
            }
            _ => None,
        }
    }

    /// `plan` with the variable set to `value`, or `None` when the change
    /// cannot be expressed. The result is not validated.
    pub fn apply(&self, plan: &FloorPlan, value: f64) -> Option<FloorPlan> {
        let mut out = plan.clone();
        match (self.kind, self.target) {
            (VariableKind::Orientation, _) => out.orientation = value,
            (VariableKind::Reflection, _) => out.reflected = value >= 0.5,
            (VariableKind::OpeningOffset, VariableTarget::Opening(id)) => out.opening_mut(id)?.offset = value,
            (VariableKind::OpeningWidth, VariableTarget::Opening(id)) => {
                let seg = hosting_segment(plan, id)?;
                if value > seg.length() + GEOM_EPS {
                    return None;
                }
                let o = out.opening_mut(id)?;
                o.width = value;
                o.offset = round_mm(o.offset.min(seg.to - value).max(seg.from));
            }
            (VariableKind::OpeningHeight, VariableTarget::Opening(id)) => out.opening_mut(id)?.height = value,
            (VariableKind::InteriorWallPosition, VariableTarget::Wall { low, high, vertical }) => {
                let d = value - self.value(plan)?;
                let s = out.space_mut(low)?;
                if vertical {
                    s.rect.w += d;
                } else {
                    s.rect.h += d;
                }
                out.space(high)?;
                shift_origin(&mut out, high, d, vertical);
            }
            (VariableKind::OverhangDepth, VariableTarget::Opening(id)) => {
                out.opening(id)?;
                shading_mut(&mut out, id).overhang_depth = value;
            }
            (VariableKind::FinDepth, VariableTarget::Fin(id, side)) => {
                out.opening(id)?;
                let d = shading_mut(&mut out, id);
                match side {
                    FinSide::Left => d.left_fin_depth = value,
                    FinSide::Right => d.right_fin_depth = value,
                }
            }
            _ => return None,
        }
        Some(out)
    }
}

fn acceptable(plan: &FloorPlan, program: &DesignProgram) -> bool {
    plan.check_structure().is_ok() && validate(plan, program).is_empty()
}

/// Attaches a zero-depth shading device to every window lacking one.
pub fn attach_shading(plan: &mut FloorPlan) {
    let windows: Vec<OpeningId> = plan
        .openings
        .iter()
        .filter(|o| o.kind == OpeningKind::Window)
        .map(|o| o.id)
        .collect();
    for id in windows {
        shading_mut(plan, id);
    }
}

/// The optimizable variables of `plan` in sweep order: orientation,
/// reflection, each window by id, interior walls, then shading. Every
/// candidate kept yields, applied alone, a plan meeting `program`.
pub fn extract_variables(plan: &FloorPlan, program: &DesignProgram) -> Vec<DesignVariable> {
    let mut vars = vec![
        DesignVariable {
            kind: VariableKind::Orientation,
            target: VariableTarget::Plan,
            candidates: ORIENTATIONS.to_vec(),
        },
        DesignVariable {
            kind: VariableKind::Reflection,
            target: VariableTarget::Plan,
            candidates: vec![0.0, 1.0],
        },
    ];

    let mut windows: Vec<_> = plan.openings.iter().filter(|o| o.kind == OpeningKind::Window).collect();
    windows.sort_by_key(|o| o.id);
    for o in &windows {
        let Some(seg) = hosting_segment(plan, o.id) else {
            continue;
        };
        let function = plan.space(o.host_space).map(|s| s.function);
        let min_width = function.map_or(0.0, |f| program.min_window_width(f)).max(MIN_WINDOW_WIDTH);
        let target = VariableTarget::Opening(o.id);
        vars.push(DesignVariable {
            kind: VariableKind::OpeningOffset,
            target,
            candidates: spread(seg.from, (seg.to - o.width).max(seg.from), OPENING_STEPS),
        });
        if seg.length() >= min_width {
            vars.push(DesignVariable {
                kind: VariableKind::OpeningWidth,
                target,
                candidates: spread(min_width, seg.length(), OPENING_STEPS),
            });
        }
        vars.push(DesignVariable {
            kind: VariableKind::OpeningHeight,
            target,
            candidates: WINDOW_HEIGHTS.to_vec(),
        });
    }

    for (i, a) in plan.spaces.iter().enumerate() {
        for b in &plan.spaces[i + 1..] {
            let Some(seg) = crate::plan::shared_segment(&a.rect, &b.rect) else {
                continue;
            };
            let (low, high, vertical) = match seg.side {
                WallSide::E => (a.id, b.id, true),
                WallSide::W => (b.id, a.id, true),
                WallSide::N => (a.id, b.id, false),
                WallSide::S => (b.id, a.id, false),
            };
            let var = DesignVariable {
                kind: VariableKind::InteriorWallPosition,
                target: VariableTarget::Wall { low, high, vertical },
                candidates: Vec::new(),
            };
            let Some(at) = var.value(plan) else {
                continue;
            };
            vars.push(DesignVariable {
                candidates: WALL_SHIFTS.iter().map(|d| at + d).collect(),
                ..var
            });
        }
    }

    for o in &windows {
        vars.push(DesignVariable {
            kind: VariableKind::OverhangDepth,
            target: VariableTarget::Opening(o.id),
            candidates: SHADING_DEPTHS.to_vec(),
        });
        for side in [FinSide::Left, FinSide::Right] {
            vars.push(DesignVariable {
                kind: VariableKind::FinDepth,
                target: VariableTarget::Fin(o.id, side),
                candidates: SHADING_DEPTHS.to_vec(),
            });
        }
    }

    for v in &mut vars {
        let keep: Vec<f64> = v
            .candidates
            .iter()
            .copied()
            .filter(|&c| v.apply(plan, c).is_some_and(|p| acceptable(&p, program)))
            .collect();
        v.candidates = keep;
    }
    // A wall that can only stay where it is is not a variable.
    vars.retain(|v| {
        !v.candidates.is_empty()
            && !(v.kind == VariableKind::InteriorWallPosition && v.candidates.len() == 1)
    });
    vars
}

/// Scores a plan; lower is better.
pub trait Objective: Sync {
    fn penalty(&self, plan: &FloorPlan) -> Result<f64>;
}

impl<F> Objective for F
where
    F: Fn(&FloorPlan) -> Result<f64> + Sync,
{
    fn penalty(&self, plan: &FloorPlan) -> Result<f64> {
        self(plan)
    }
}

/// Annual penalty with envelope openings closed.
impl Objective for Evaluator {
    fn penalty(&self, plan: &FloorPlan) -> Result<f64> {
        self.sealed_penalty(plan)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub pass: usize,
    pub kind: VariableKind,
    pub target: VariableTarget,
    pub old_value: f64,
    pub new_value: f64,
    pub penalty_before: f64,
    pub penalty_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub initial_penalty: f64,
    pub final_penalty: f64,
    pub steps: Vec<TraceStep>,
    pub passes: usize,
    /// Objective evaluations, the initial one included.
    pub evaluations: usize,
}

impl OptimizationTrace {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Greedy coordinate descent: every variable in turn is set to its best
/// candidate when that strictly lowers the penalty, for at most
/// [`MAX_PASSES`] passes or until a pass changes nothing. Candidates that
/// break a requirement of `program` in the current plan are skipped.
pub fn sweep(
    plan: &FloorPlan,
    program: &DesignProgram,
    variables: &[DesignVariable],
    objective: &dyn Objective,
) -> Result<(FloorPlan, OptimizationTrace)> {
    let mut current = plan.clone();
    let initial = objective.penalty(&current)?;
    let mut penalty = initial;
    let mut steps = Vec::new();
    let mut evaluations = 1;
    let mut passes = 0;

    while passes < MAX_PASSES {
        passes += 1;
        let mut accepted = false;
        for var in variables {
            let Some(old) = var.value(&current) else {
                continue;
            };
            let trials: Vec<(f64, FloorPlan)> = var
                .candidates
                .iter()
                .filter(|c| !same(**c, old))
                .filter_map(|&c| var.apply(&current, c).map(|p| (c, p)))
                .filter(|(_, p)| acceptable(p, program))
                .collect();
            let scores = trials
                .par_iter()
                .map(|(_, p)| objective.penalty(p))
                .collect::<Result<Vec<f64>>>()?;
            evaluations += scores.len();
            let mut best: Option<usize> = None;
            for (i, s) in scores.iter().enumerate() {
                if !s.is_finite() {
                    return Err(Error::Config(format!("objective returned {s}")));
                }
                if *s < best.map_or(penalty, |b| scores[b]) {
                    best = Some(i);
                }
            }
            if let Some(i) = best {
                let (value, plan) = trials.into_iter().nth(i).expect("index from scores");
                steps.push(TraceStep {
                    pass: passes,
                    kind: var.kind,
                    target: var.target,
                    old_value: old,
                    new_value: value,
                    penalty_before: penalty,
                    penalty_after: scores[i],
                });
                penalty = scores[i];
                current = plan;
                accepted = true;
            }
        }
        if !accepted {
            break;
        }
    }

    Ok((
        current,
        OptimizationTrace {
            initial_penalty: initial,
            final_penalty: penalty,
            steps,
            passes,
            evaluations,
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizedDesign {
    /// 1 for the lowest final penalty.
    pub rank: usize,
    /// Position of the design in the input list.
    pub source: usize,
    pub plan: FloorPlan,
    pub trace: OptimizationTrace,
}

/// Optimizes every plan independently and ranks them by final penalty,
/// ties broken by input position.
pub fn optimize_designs(
    plans: &[FloorPlan],
    program: &DesignProgram,
    objective: &dyn Objective,
) -> Result<Vec<OptimizedDesign>> {
    let mut out = plans
        .par_iter()
        .enumerate()
        .map(|(source, plan)| {
            if !acceptable(plan, program) {
                return Err(Error::InvalidPlan(format!("design {source} does not meet the program")));
            }
            let mut start = plan.clone();
            attach_shading(&mut start);
            let vars = extract_variables(&start, program);
            let (plan, trace) = sweep(&start, program, &vars, objective)?;
            Ok(OptimizedDesign {
                rank: 0,
                source,
                plan,
                trace,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| {
        a.trace
            .final_penalty
            .total_cmp(&b.trace.final_penalty)
            .then(a.source.cmp(&b.source))
    });
    for (i, d) in out.iter_mut().enumerate() {
        d.rank = i + 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plan::{Opening, Rect, RequiredSpace, Space, SpaceFunction};

    fn program() -> DesignProgram {
        DesignProgram {
            required_spaces: vec![
                RequiredSpace {
                    function: SpaceFunction::Hall,
                    count: 1,
                    min_floor_area: 4.0,
                    min_window_width: 0.0,
                },
                RequiredSpace {
                    function: SpaceFunction::Bedroom,
                    count: 1,
                    min_floor_area: 9.0,
                    min_window_width: 1.0,
                },
            ],
            connectivity: vec![(SpaceFunction::Hall, SpaceFunction::Bedroom)],
            opening_orientation_prefs: vec![],
            max_construction_area: 40.0,
            ceiling_height: None,
        }
    }

    fn space(id: u32, function: SpaceFunction, rect: Rect) -> Space {
        Space {
            id: SpaceId(id),
            function,
            rect,
            ceiling_height: 2.7,
        }
    }

    /// A 3 x 3 m hall west of a 4 x 4 m bedroom with a south window.
    fn plan(hall_width: f64) -> FloorPlan {
        FloorPlan {
            spaces: vec![
                space(1, SpaceFunction::Hall, Rect::new(0.0, 0.0, hall_width, 3.0).unwrap()),
                space(2, SpaceFunction::Bedroom, Rect::new(hall_width, 0.0, 4.0, 4.0).unwrap()),
            ],
            openings: vec![
                Opening {
                    id: OpeningId(1),
                    kind: OpeningKind::Window,
                    host_space: SpaceId(2),
                    wall_side: WallSide::S,
                    offset: 1.0,
                    width: 1.2,
                    height: 1.2,
                    sill: 0.9,
                    links_to: None,
                },
                Opening {
                    id: OpeningId(2),
                    kind: OpeningKind::InteriorDoor,
                    host_space: SpaceId(2),
                    wall_side: WallSide::W,
                    offset: 1.0,
                    width: 0.8,
                    height: 2.0,
                    sill: 0.0,
                    links_to: Some(SpaceId(1)),
                },
            ],
            shading: vec![],
            orientation: 0.0,
            reflected: false,
        }
    }

    fn window(plan: &FloorPlan) -> Opening {
        *plan.opening(OpeningId(1)).unwrap()
    }

    #[test]
    fn variables_follow_the_enumeration() {
        let mut p = plan(3.0);
        attach_shading(&mut p);
        let vars = extract_variables(&p, &program());
        let kinds: Vec<VariableKind> = vars.iter().map(|v| v.kind).collect();
        use VariableKind::*;
        assert_eq!(
            kinds,
            vec![
                Orientation,
                Reflection,
                OpeningOffset,
                OpeningWidth,
                OpeningHeight,
                InteriorWallPosition,
                OverhangDepth,
                FinDepth,
                FinDepth
            ]
        );
        let width = &vars[3];
        assert_eq!(width.candidates.first(), Some(&1.0));
        assert_eq!(width.candidates.last(), Some(&4.0));
        assert_eq!(vars[2].candidates, vec![0.0, 0.7, 1.4, 2.1, 2.8]);
        // The hall may shrink to 2.4 m (7.2 m²) or grow; the bedroom needs 9 m².
        assert_eq!(vars[5].candidates, vec![2.4, 2.7, 3.0, 3.3, 3.6]);
    }

    #[test]
    fn every_candidate_alone_meets_the_program() {
        let program = program();
        let mut p = plan(3.0);
        attach_shading(&mut p);
        for v in extract_variables(&p, &program) {
            assert!(!v.candidates.is_empty());
            for c in &v.candidates {
                let q = v.apply(&p, *c).unwrap();
                assert!(validate(&q, &program).is_empty(), "{v:?} = {c}");
                assert!((v.value(&q).unwrap() - c).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn moving_a_wall_keeps_openings_in_place() {
        let p = plan(3.0);
        let var = DesignVariable {
            kind: VariableKind::InteriorWallPosition,
            target: VariableTarget::Wall {
                low: SpaceId(1),
                high: SpaceId(2),
                vertical: true,
            },
            candidates: vec![3.3],
        };
        let q = var.apply(&p, 3.3).unwrap();
        assert!((q.spaces[0].rect.w - 3.3).abs() < 1e-12);
        assert!((q.spaces[1].rect.x - 3.3).abs() < 1e-12);
        assert!((q.spaces[1].rect.w - 3.7).abs() < 1e-12);
        let before = p.spaces[1].rect.x + window(&p).offset;
        let after = q.spaces[1].rect.x + window(&q).offset;
        assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn tight_rooms_have_no_wall_variable() {
        let mut program = program();
        program.required_spaces[0].min_floor_area = 9.0;
        program.required_spaces[1].min_floor_area = 16.0;
        let vars = extract_variables(&plan(3.0), &program);
        assert!(vars.iter().all(|v| v.kind != VariableKind::InteriorWallPosition));
    }

    #[test]
    fn width_change_stays_on_the_wall() {
        let p = plan(3.0);
        let var = DesignVariable {
            kind: VariableKind::OpeningWidth,
            target: VariableTarget::Opening(OpeningId(1)),
            candidates: vec![4.0],
        };
        let q = var.apply(&p, 4.0).unwrap();
        assert_eq!(window(&q).offset, 0.0);
        assert!(var.apply(&p, 4.5).is_none());
    }

    #[test]
    fn constant_objective_changes_nothing() {
        let program = program();
        let mut p = plan(3.0);
        attach_shading(&mut p);
        let vars = extract_variables(&p, &program);
        let (out, trace) = sweep(&p, &program, &vars, &|_: &FloorPlan| Ok(5.0)).unwrap();
        assert_eq!(out, p);
        assert!(trace.steps.is_empty());
        assert_eq!(trace.passes, 1);
        assert_eq!(trace.final_penalty, 5.0);
    }

    #[test]
    fn binary_variable_flips_once() {
        let program = program();
        let p = plan(3.0);
        let vars = vec![DesignVariable {
            kind: VariableKind::Reflection,
            target: VariableTarget::Plan,
            candidates: vec![0.0, 1.0],
        }];
        let objective = |q: &FloorPlan| Ok(if q.reflected { 1.0 } else { 2.0 });
        let (out, trace) = sweep(&p, &program, &vars, &objective).unwrap();
        assert!(out.reflected);
        assert_eq!(trace.steps.len(), 1);
        assert_eq!((trace.initial_penalty, trace.final_penalty), (2.0, 1.0));
        assert_eq!(trace.passes, 2);
    }

    #[test]
    fn ties_keep_the_incumbent() {
        let program = program();
        let p = plan(3.0);
        let vars = vec![DesignVariable {
            kind: VariableKind::Orientation,
            target: VariableTarget::Plan,
            candidates: ORIENTATIONS.to_vec(),
        }];
        // 90 and 270 score the same; the first in candidate order wins.
        let objective = |q: &FloorPlan| Ok(1.0 + ((q.orientation - 180.0).abs() - 90.0).abs());
        let (out, trace) = sweep(&p, &program, &vars, &objective).unwrap();
        assert_eq!(out.orientation, 90.0);
        assert_eq!(trace.steps.len(), 1);
        let (again, trace) = sweep(&out, &program, &vars, &objective).unwrap();
        assert_eq!(again, out);
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn trace_decreases_strictly() {
        let program = program();
        let mut p = plan(3.0);
        attach_shading(&mut p);
        let vars = extract_variables(&p, &program);
        let objective = |q: &FloorPlan| {
            let w = window(q);
            let shade = q.shading_for(w.id).map_or(0.0, |d| d.overhang_depth);
            Ok((q.orientation - 135.0).powi(2) / 1e3 + (w.width - 2.5).powi(2) + (shade - 0.6).powi(2) + w.offset)
        };
        let (out, trace) = sweep(&p, &program, &vars, &objective).unwrap();
        assert!(!trace.steps.is_empty());
        for s in &trace.steps {
            assert!(s.penalty_after < s.penalty_before);
        }
        for pair in trace.steps.windows(2) {
            assert_eq!(pair[0].penalty_after, pair[1].penalty_before);
        }
        assert_eq!(trace.final_penalty, objective(&out).unwrap());
        assert!(validate(&out, &program).is_empty());
        assert_eq!(out.orientation, 135.0);
        assert_eq!(window(&out).offset, 0.0);
    }

    #[test]
    fn designs_come_back_ranked() {
        let program = program();
        let plans = vec![plan(3.0), plan(2.7), plan(3.3)];
        // Larger halls score worse; nothing else matters.
        let objective = |q: &FloorPlan| Ok(q.spaces[0].rect.w.round() + 10.0 * (q.spaces[0].rect.w - 3.0).abs());
        let out = optimize_designs(&plans, &program, &objective).unwrap();
        assert_eq!(out.len(), 3);
        assert_eq!(out.iter().map(|d| d.rank).collect::<Vec<_>>(), vec![1, 2, 3]);
        for pair in out.windows(2) {
            assert!(pair[0].trace.final_penalty <= pair[1].trace.final_penalty);
        }
        for d in &out {
            assert!(d.trace.final_penalty <= d.trace.initial_penalty);
            assert_eq!(d.plan.shading.len(), 1);
        }
        let single = optimize_designs(&plans[..1], &program, &objective).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].source, 0);
    }

    #[test]
    fn invalid_input_is_rejected() {
        let mut p = plan(3.0);
        p.spaces[1].rect.x = 2.0;
        let err = optimize_designs(&[p], &program(), &|_: &FloorPlan| Ok(0.0)).unwrap_err();
        assert!(matches!(err, Error::InvalidPlan(_)));
    }
}
