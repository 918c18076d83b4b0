use proptest::prelude::*;

use ventplan_core::optimizer::{extract_variables, sweep, DesignVariable, VariableKind, VariableTarget};
use ventplan_core::plan::{
    validate, DesignProgram, FloorPlan, Opening, OpeningId, OpeningKind, Rect, RequiredSpace, Space, SpaceFunction,
    SpaceId, WallSide,
};
use ventplan_core::Result;

fn program() -> DesignProgram {
    DesignProgram {
        required_spaces: vec![
            RequiredSpace { function: SpaceFunction::Hall, count: 1, min_floor_area: 4.0, min_window_width: 0.0 },
            RequiredSpace { function: SpaceFunction::Bedroom, count: 1, min_floor_area: 9.0, min_window_width: 1.0 },
        ],
        connectivity: vec![(SpaceFunction::Hall, SpaceFunction::Bedroom)],
        opening_orientation_prefs: vec![],
        max_construction_area: 40.0,
        ceiling_height: None,
    }
}

fn plan() -> FloorPlan {
    let space = |id, function, rect| Space { id: SpaceId(id), function, rect, ceiling_height: 2.7 };
    FloorPlan {
        spaces: vec![
            space(1, SpaceFunction::Hall, Rect { x: 0.0, y: 0.0, w: 3.0, h: 4.0 }),
            space(2, SpaceFunction::Bedroom, Rect { x: 3.0, y: 0.0, w: 4.0, h: 4.0 }),
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

/// A weighted distance of every variable's value from a target.
fn objective(variables: &[DesignVariable], targets: &[f64], weights: &[f64]) -> impl Fn(&FloorPlan) -> Result<f64> + Sync {
    let variables = variables.to_vec();
    let targets = targets.to_vec();
    let weights = weights.to_vec();
    move |p: &FloorPlan| {
        Ok(variables
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let x = v.value(p).unwrap_or(0.0);
                let scale = if v.kind == VariableKind::Orientation { 90.0 } else { 1.0 };
                weights[i % weights.len()] * ((x - targets[i % targets.len()]) / scale).powi(2)
            })
            .sum())
    }
}

fn find<'a>(variables: &'a [DesignVariable], kind: VariableKind, target: VariableTarget) -> &'a DesignVariable {
    variables.iter().find(|v| v.kind == kind && v.target == target).expect("traced variable exists")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sweep_descends_to_a_valid_local_optimum(
        targets in prop::collection::vec(-1.0f64..4.0, 16),
        weights in prop::collection::vec(0.1f64..5.0, 16),
    ) {
        let program = program();
        let start = plan();
        let variables = extract_variables(&start, &program);
        prop_assert!(!variables.is_empty());
        let f = objective(&variables, &targets, &weights);
        let (best, trace) = sweep(&start, &program, &variables, &f).unwrap();

        prop_assert!(trace.final_penalty <= trace.initial_penalty);
        prop_assert_eq!(trace.final_penalty, f(&best).unwrap());
        let mut replay = start.clone();
        let mut level = trace.initial_penalty;
        for s in &trace.steps {
            prop_assert!(s.penalty_after < s.penalty_before);
            prop_assert_eq!(s.penalty_before, level);
            level = s.penalty_after;
            replay = find(&variables, s.kind, s.target).apply(&replay, s.new_value).expect("step applies");
            prop_assert!(validate(&replay, &program).is_empty());
        }
        prop_assert_eq!(&replay, &best);

        let converged = !trace.steps.iter().any(|s| s.pass == trace.passes);
        if converged {
            for v in &variables {
                for &c in &v.candidates {
                    if let Some(p) = v.apply(&best, c).filter(|p| validate(p, &program).is_empty() && p.check_structure().is_ok()) {
                        prop_assert!(f(&p).unwrap() >= trace.final_penalty, "{:?} = {c} improves", v.kind);
                    }
                }
            }
        }

        let (again, trace_again) = sweep(&start, &program, &variables, &f).unwrap();
        prop_assert_eq!(again, best);
        prop_assert_eq!(trace_again, trace);
    }
}
