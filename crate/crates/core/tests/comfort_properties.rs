use proptest::prelude::*;

use ventplan_core::comfort::{discomfort, thermal_penalty, ComfortBand, OccupancyModel, PenaltyWeights};
use ventplan_core::plan::{SpaceFunction, SpaceId};
use ventplan_core::thermal::{ZoneInfo, ZoneSeries};

const DAYS: usize = 3;

fn series(temps: Vec<Vec<f64>>) -> ZoneSeries {
    let functions = [SpaceFunction::Bedroom, SpaceFunction::LivingRoom, SpaceFunction::Kitchen];
    ZoneSeries {
        zones: (0..temps.len())
            .map(|i| ZoneInfo { space: SpaceId(i as u32 + 1), function: functions[i % 3], ordinal: 0 })
            .collect(),
        ach: vec![vec![0.0; DAYS * 24]; temps.len()],
        temperatures: temps,
    }
}

fn temperatures(zones: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(10.0f64..35.0, DAYS * 24), zones)
}

fn band() -> impl Strategy<Value = ComfortBand> {
    prop::collection::vec((18.0f64..24.0, 1.0f64..8.0), DAYS).prop_map(|days| ComfortBand {
        lower: days.iter().map(|d| d.0).collect(),
        upper: days.iter().map(|d| d.0 + d.1).collect(),
    })
}

fn weights() -> impl Strategy<Value = PenaltyWeights> {
    (0.1f64..3.0, 0.1f64..3.0, 0.1f64..3.0, 0.0f64..1.0).prop_map(|(w1, w2, o, v)| PenaltyWeights { w1, w2, o, v })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn penalty_adds_over_spaces_and_days(temps in temperatures(3), band in band(), w in weights(), split in 1usize..DAYS) {
        let occupancy = OccupancyModel::case_study();
        let whole = thermal_penalty(&series(temps.clone()), &band, &occupancy, &w).unwrap();

        let all = series(temps.clone());
        let mut by_space = 0.0;
        for i in 0..temps.len() {
            let single = ZoneSeries {
                zones: vec![all.zones[i].clone()],
                temperatures: vec![all.temperatures[i].clone()],
                ach: vec![all.ach[i].clone()],
            };
            by_space += thermal_penalty(&single, &band, &occupancy, &w).unwrap().total;
        }
        prop_assert!(close(whole.total, by_space));

        let cut = split * 24;
        let head = series(temps.iter().map(|t| t[..cut].to_vec()).collect());
        let tail = series(temps.iter().map(|t| t[cut..].to_vec()).collect());
        let tail_band = ComfortBand { lower: band.lower[split..].to_vec(), upper: band.upper[split..].to_vec() };
        let parts = thermal_penalty(&head, &band, &occupancy, &w).unwrap().total
            + thermal_penalty(&tail, &tail_band, &occupancy, &w).unwrap().total;
        prop_assert!(close(whole.total, parts));

        let per_day: f64 = whole.per_day.iter().sum();
        let per_space: f64 = whole.per_space.iter().map(|s| s.penalty).sum();
        prop_assert!(close(whole.total, per_day) && close(whole.total, per_space));
    }

    #[test]
    fn scaling_weights_scales_the_penalty_and_keeps_the_ranking(
        designs in prop::collection::vec(temperatures(2), 2..6),
        band in band(),
        w in weights(),
        lambda in 0.01f64..100.0,
    ) {
        let occupancy = OccupancyModel::case_study();
        let degrees = PenaltyWeights { w1: w.w1 * lambda, w2: w.w2 * lambda, ..w };
        let hours = PenaltyWeights { o: w.o * lambda, v: w.v * lambda, ..w };
        let all = PenaltyWeights { w1: w.w1 * lambda, w2: w.w2 * lambda, o: w.o * lambda, v: w.v * lambda };
        let mut base = Vec::new();
        let mut scaled = Vec::new();
        for t in &designs {
            let s = series(t.clone());
            let total = |weights: &PenaltyWeights| thermal_penalty(&s, &band, &occupancy, weights).unwrap().total;
            let b = total(&w);
            prop_assert!(close(total(&degrees) / lambda, b));
            prop_assert!(close(total(&hours) / lambda, b));
            let a = total(&all);
            prop_assert!(close(a / (lambda * lambda), b), "{a} vs {b}");
            base.push(b);
            scaled.push(a);
        }
        let argsort = |v: &[f64]| {
            let mut idx: Vec<usize> = (0..v.len()).collect();
            idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
            idx
        };
        prop_assert_eq!(argsort(&base), argsort(&scaled));
    }

    #[test]
    fn discomfort_is_continuous_at_the_edges(t1 in 15.0f64..25.0, width in 0.5f64..8.0, eps in 1e-9f64..1e-3, w in weights()) {
        let t2 = t1 + width;
        prop_assert_eq!(discomfort(t1, t1, t2, &w), 0.0);
        prop_assert_eq!(discomfort(t2, t1, t2, &w), 0.0);
        prop_assert!(discomfort(t1 - eps, t1, t2, &w) <= w.w1 * eps * (1.0 + 1e-6));
        prop_assert!(discomfort(t2 + eps, t1, t2, &w) <= w.w2 * eps * (1.0 + 1e-6));
    }

    #[test]
    fn wider_band_never_costs_more(
        temps in temperatures(2),
        band in band(),
        widen in prop::collection::vec((0.0f64..2.0, 0.0f64..2.0), DAYS),
        w in weights(),
    ) {
        let occupancy = OccupancyModel::case_study();
        let wide = ComfortBand {
            lower: band.lower.iter().zip(&widen).map(|(l, d)| l - d.0).collect(),
            upper: band.upper.iter().zip(&widen).map(|(u, d)| u + d.1).collect(),
        };
        let s = series(temps);
        let narrow = thermal_penalty(&s, &band, &occupancy, &w).unwrap();
        let wider = thermal_penalty(&s, &wide, &occupancy, &w).unwrap();
        for (a, b) in wider.per_day.iter().zip(&narrow.per_day) {
            prop_assert!(*a <= *b + 1e-12);
        }
    }
}
