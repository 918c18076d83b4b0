//! Occupant ventilation behaviour and the scenario comparison matrix.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::comfort::PenaltyReport;
use crate::error::{Error, Result};
use crate::evaluation::Evaluator;
use crate::plan::FloorPlan;
use crate::thermal::{VentilationControl, VentilationMode};

/// Opens windows and doors of an occupied, warm space in proportion to the
/// indoor-outdoor temperature difference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VentilationScenario {
    pub name: String,
    /// ΔT (K) at which openings begin to open.
    pub d1: f64,
    /// ΔT (K) at which openings are fully open.
    pub d2: f64,
    pub indoor_threshold: f64,
    pub requires_occupancy: bool,
}

impl VentilationScenario {
    pub fn new(name: &str, d1: f64, d2: f64) -> Self {
        VentilationScenario {
            name: name.to_string(),
            d1,
            d2,
            indoor_threshold: 22.0,
            requires_occupancy: true,
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.d1 >= 0.0 && self.d1 < self.d2 && self.d2.is_finite() && self.indoor_threshold.is_finite()) {
            return Err(Error::Config(format!(
                "scenario {}: need 0 <= d1 < d2 and a finite threshold",
                self.name
            )));
        }
        Ok(())
    }
}

pub fn opening_modulation(scenario: &VentilationScenario, occupied: bool, t_in: f64, t_out: f64) -> f64 {
    if (scenario.requires_occupancy && !occupied) || t_in < scenario.indoor_threshold || t_out >= t_in {
        return 0.0;
    }
    let dt = t_in - t_out;
    if dt <= scenario.d1 {
        0.0
    } else if dt >= scenario.d2 {
        1.0
    } else {
        (dt - scenario.d1) / (scenario.d2 - scenario.d1)
    }
}

impl VentilationControl for VentilationScenario {
    fn signal(&self, occupied: bool, t_in: f64, t_out: f64) -> f64 {
        opening_modulation(self, occupied, t_in, t_out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Scenario {
    /// Envelope openings closed all year.
    NoVent,
    Vent(VentilationScenario),
}

impl Scenario {
    pub fn name(&self) -> &str {
        match self {
            Scenario::NoVent => "NoVent",
            Scenario::Vent(v) => &v.name,
        }
    }

    pub fn mode(&self) -> VentilationMode<'_> {
        match self {
            Scenario::NoVent => VentilationMode::Sealed,
            Scenario::Vent(v) => VentilationMode::Controlled(v),
        }
    }
}

/// Scenarios A-D followed by the closed reference.
pub fn builtin_scenarios() -> Vec<Scenario> {
    vec![
        Scenario::Vent(VentilationScenario::new("A", 0.0, 6.0)),
        Scenario::Vent(VentilationScenario::new("B", 1.0, 4.0)),
        Scenario::Vent(VentilationScenario::new("C", 2.0, 8.0)),
        Scenario::Vent(VentilationScenario::new("D", 6.0, 12.0)),
        Scenario::NoVent,
    ]
}

/// `(reference - best) / reference · 100`; zero when the reference is zero.
pub fn improvement_percent(reference: f64, best: f64) -> f64 {
    if reference == 0.0 {
        0.0
    } else {
        (reference - best) / reference * 100.0
    }
}

pub fn format_improvement(percent: f64) -> String {
    format!("{percent:.1}%")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignRow {
    pub design: String,
    /// Annual penalty per scenario, in matrix column order.
    pub penalties: Vec<f64>,
    #[serde(skip)]
    pub daily: Vec<Vec<f64>>,
    /// Column of the lowest-penalty ventilation scenario.
    pub best_scenario: Option<usize>,
    pub improvement_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenarios: Vec<String>,
    /// Column of the closed reference.
    pub reference: usize,
    pub rows: Vec<DesignRow>,
    /// Column means over designs.
    pub averages: Vec<f64>,
    pub average_improvement_percent: f64,
    /// Row of the lowest penalty in each column.
    pub best_design_per_scenario: Vec<usize>,
}

fn argmin(values: impl Iterator<Item = (usize, f64)>) -> Option<usize> {
    values
        .fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
            Some((_, b)) if b <= v => best,
            _ => Some((i, v)),
        })
        .map(|(i, _)| i)
}

impl ScenarioResult {
    /// Assembles rows from per-cell reports, `cells[design][scenario]`.
    pub fn from_reports(names: Vec<String>, scenarios: &[Scenario], cells: Vec<Vec<PenaltyReport>>) -> Result<Self> {
        let reference = scenarios
            .iter()
            .position(|s| matches!(s, Scenario::NoVent))
            .ok_or_else(|| Error::Config("scenario list needs the NoVent reference".into()))?;
        let rows: Vec<DesignRow> = names
            .into_iter()
            .zip(cells)
            .map(|(design, reports)| {
                let penalties: Vec<f64> = reports.iter().map(|r| r.total).collect();
                let best_scenario = argmin(penalties.iter().copied().enumerate().filter(|(i, _)| *i != reference));
                let improvement_percent =
                    best_scenario.map_or(0.0, |b| improvement_percent(penalties[reference], penalties[b]));
                DesignRow {
                    design,
                    penalties,
                    daily: reports.into_iter().map(|r| r.per_day).collect(),
                    best_scenario,
                    improvement_percent,
                }
            })
            .collect();
        let n = rows.len().max(1) as f64;
        let averages = (0..scenarios.len())
            .map(|c| rows.iter().map(|r| r.penalties[c]).sum::<f64>() / n)
            .collect();
        let average_improvement_percent = rows.iter().map(|r| r.improvement_percent).sum::<f64>() / n;
        let best_design_per_scenario = (0..scenarios.len())
            .map(|c| argmin(rows.iter().map(|r| r.penalties[c]).enumerate()).unwrap_or(0))
            .collect();
        Ok(ScenarioResult {
            scenarios: scenarios.iter().map(|s| s.name().to_string()).collect(),
            reference,
            rows,
            averages,
            average_improvement_percent,
            best_design_per_scenario,
        })
    }

    pub fn column(&self, scenario: &str) -> Option<usize> {
        self.scenarios.iter().position(|s| s == scenario)
    }

    /// Aligned text table with an average row. `*` marks each row's best
    /// ventilation scenario and `!` the best design of each column.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<10}", "Design");
        for s in &self.scenarios {
            let _ = write!(out, "{s:>13}");
        }
        let _ = writeln!(out, "{:>9}", "Imp");
        for (r, row) in self.rows.iter().enumerate() {
            let _ = write!(out, "{:<10}", row.design);
            for (c, p) in row.penalties.iter().enumerate() {
                let mut mark = String::new();
                if row.best_scenario == Some(c) {
                    mark.push('*');
                }
                if self.best_design_per_scenario[c] == r {
                    mark.push('!');
                }
                let _ = write!(out, "{:>13}", format!("{p:.1}{mark}"));
            }
            let _ = writeln!(out, "{:>9}", format_improvement(row.improvement_percent));
        }
        let _ = write!(out, "{:<10}", "Avg");
        for a in &self.averages {
            let _ = write!(out, "{:>13}", format!("{a:.1}"));
        }
        let _ = writeln!(out, "{:>9}", format_improvement(self.average_improvement_percent));
        out
    }

    /// Columns: design, one per scenario, improvement, best_scenario.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("design");
        for s in &self.scenarios {
            let _ = write!(out, ",{s}");
        }
        out.push_str(",improvement,best_scenario\n");
        for row in &self.rows {
            out.push_str(&row.design);
            for p in &row.penalties {
                let _ = write!(out, ",{p:.3}");
            }
            let best = row.best_scenario.map_or("", |b| self.scenarios[b].as_str());
            let _ = writeln!(out, ",{},{best}", format_improvement(row.improvement_percent));
        }
        out.push_str("Avg");
        for a in &self.averages {
            let _ = write!(out, ",{a:.3}");
        }
        let _ = writeln!(out, ",{},", format_improvement(self.average_improvement_percent));
        out
    }

    /// Columns `design,day,scenario,signed_diff,normalized_diff` for every
    /// ventilation scenario against the reference.
    pub fn daily_csv(&self) -> String {
        let mut out = String::from("design,day,scenario,signed_diff,normalized_diff\n");
        for row in &self.rows {
            let reference_total = row.penalties[self.reference];
            for (c, name) in self.scenarios.iter().enumerate() {
                if c == self.reference {
                    continue;
                }
                let diff = daily_difference_series(&row.daily[c], &row.daily[self.reference]);
                for (d, v) in diff.iter().enumerate() {
                    let norm = if reference_total == 0.0 { 0.0 } else { v / reference_total };
                    let _ = writeln!(out, "{},{},{name},{v:.6},{norm:.9}", row.design, d + 1);
                }
            }
        }
        out
    }
}

/// Simulates every design under every scenario.
pub fn run_experiment(
    designs: &[(String, FloorPlan)],
    scenarios: &[Scenario],
    evaluator: &Evaluator,
) -> Result<ScenarioResult> {
    for s in scenarios {
        if let Scenario::Vent(v) = s {
            v.check()?;
        }
    }
    let cells: Vec<(usize, usize)> = (0..designs.len())
        .flat_map(|d| (0..scenarios.len()).map(move |s| (d, s)))
        .collect();
    let reports: Vec<PenaltyReport> = cells
        .par_iter()
        .map(|&(d, s)| evaluator.penalty(&designs[d].1, scenarios[s].mode()))
        .collect::<Result<_>>()?;
    let mut reports = reports.into_iter();
    let grid = (0..designs.len())
        .map(|_| reports.by_ref().take(scenarios.len()).collect())
        .collect();
    ScenarioResult::from_reports(designs.iter().map(|(n, _)| n.clone()).collect(), scenarios, grid)
}

/// Per-day `scenario - reference`; negative values are a benefit.
pub fn daily_difference_series(scenario: &[f64], reference: &[f64]) -> Vec<f64> {
    scenario.iter().zip(reference).map(|(s, r)| s - r).collect()
}

/// Share of the annual benefit falling in `months` (1-based, inclusive).
/// `None` when there is no benefit at all.
pub fn seasonal_benefit_share(daily_difference: &[f64], months: std::ops::RangeInclusive<u32>) -> Option<f64> {
    let benefit = |d: &f64| (-d).max(0.0);
    let total: f64 = daily_difference.iter().map(benefit).sum();
    if total <= 0.0 {
        return None;
    }
    let in_season: f64 = months
        .flat_map(crate::weather::month_days)
        .filter_map(|d| daily_difference.get(d))
        .map(benefit)
        .sum();
    Some(in_season / total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(name: &str) -> VentilationScenario {
        builtin_scenarios()
            .into_iter()
            .find_map(|s| match s {
                Scenario::Vent(v) if v.name == name => Some(v),
                _ => None,
            })
            .unwrap()
    }

    #[test]
    fn builtin_values() {
        let a = scenario("A");
        assert_eq!((a.d1, a.d2, a.indoor_threshold, a.requires_occupancy), (0.0, 6.0, 22.0, true));
        let d = scenario("D");
        assert_eq!((d.d1, d.d2), (6.0, 12.0));
        assert_eq!((scenario("B").d1, scenario("B").d2), (1.0, 4.0));
        assert_eq!((scenario("C").d1, scenario("C").d2), (2.0, 8.0));
        assert!(builtin_scenarios().contains(&Scenario::NoVent));
    }

    #[test]
    fn modulation_examples() {
        assert_eq!(opening_modulation(&scenario("A"), true, 25.0, 22.0), 0.5);
        assert_eq!(opening_modulation(&scenario("B"), true, 21.9, 15.0), 0.0);
        assert_eq!(opening_modulation(&scenario("C"), false, 30.0, 20.0), 0.0);
        assert_eq!(opening_modulation(&scenario("C"), true, 30.0, 20.0), 1.0);
        assert_eq!(opening_modulation(&scenario("A"), true, 25.0, 25.0), 0.0);
        assert_eq!(opening_modulation(&scenario("A"), true, 22.0, 21.0), 1.0 / 6.0);
    }

    #[test]
    fn improvement_formatting() {
        assert_eq!(format_improvement(improvement_percent(21216.0, 19656.0)), "7.4%");
        assert_eq!(improvement_percent(0.0, 0.0), 0.0);
    }

    #[test]
    fn daily_difference_examples() {
        let reference = [10.0, 8.0];
        assert_eq!(daily_difference_series(&reference, &reference), vec![0.0, 0.0]);
        let diff = daily_difference_series(&[6.0, 8.0], &reference);
        assert_eq!(diff, vec![-4.0, 0.0]);
        assert_eq!(diff.iter().sum::<f64>(), 14.0 - 18.0);
    }

    #[test]
    fn seasonal_share_examples() {
        let mut july = vec![0.0; 365];
        july[190] = -3.0;
        july[20] = 2.0;
        assert_eq!(seasonal_benefit_share(&july, 5..=10), Some(1.0));
        let uniform = vec![-1.0; 365];
        assert!((seasonal_benefit_share(&uniform, 5..=10).unwrap() - 184.0 / 365.0).abs() < 1e-12);
        assert_eq!(seasonal_benefit_share(&[0.0; 365], 5..=10), None);
    }

    fn report(total: f64) -> PenaltyReport {
        PenaltyReport {
            total,
            per_space: vec![],
            per_day: vec![total],
        }
    }

    #[test]
    fn matrix_flags_and_averages() {
        let scenarios = builtin_scenarios();
        let cells = vec![
            vec![report(90.0), report(95.0), report(92.0), report(99.0), report(100.0)],
            vec![report(80.0), report(70.0), report(85.0), report(79.0), report(75.0)],
        ];
        let r = ScenarioResult::from_reports(vec!["1".into(), "2".into()], &scenarios, cells).unwrap();
        assert_eq!(r.reference, 4);
        assert_eq!(r.rows[0].best_scenario, Some(0));
        assert_eq!(r.rows[1].best_scenario, Some(1));
        assert!((r.rows[0].improvement_percent - 10.0).abs() < 1e-12);
        assert_eq!(r.averages, vec![85.0, 82.5, 88.5, 89.0, 87.5]);
        assert_eq!(r.best_design_per_scenario, vec![1, 1, 1, 1, 1]);
        for row in &r.rows {
            let best = row.best_scenario.unwrap();
            for (c, p) in row.penalties.iter().enumerate() {
                if c != r.reference {
                    assert!(row.penalties[best] <= *p);
                }
            }
        }
        assert!(r.to_text().contains("Avg"));
        assert_eq!(r.to_csv().lines().count(), 4);
    }
}
