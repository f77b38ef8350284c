//! Scenario execution. Grid cells run in parallel; rows come back in grid
//! order so output is byte-for-byte reproducible.

use rayon::prelude::*;
use symquat::analysis::{
    analytic_lti_solution, convergence_order, max_error, DampedLtvProfile, ErrorReport, ErrorTracker,
    ReferenceOracle, RunEcho, SpecialLtvProfile,
};
use symquat::{propagate_lti, propagate_ltv, AngularVelocity, OrderParam, PadeCoefficients, PropagationConfig, QuatState};

use crate::error::CliError;
use crate::output::{real, Row};
use crate::spec::{Profile, Scenario, ScenarioSpec};

/// Nominal upper end of the c grid for orders without a finite domain.
const UNBOUNDED_C_RANGE: f64 = 12.0;

#[derive(Debug, Clone, Copy)]
struct Cell {
    order: OrderParam,
    tau: f64,
}

struct CellResult {
    report: ErrorReport,
    steps: usize,
    norm_drift: Option<f64>,
}

pub fn run(spec: &ScenarioSpec) -> Result<Vec<Row>, CliError> {
    match spec.scenario {
        Scenario::BetaTable => beta_table(spec),
        Scenario::CoefficientDump => Ok(coefficient_dump(spec)),
        _ => sweep(spec),
    }
}

fn sweep(spec: &ScenarioSpec) -> Result<Vec<Row>, CliError> {
    let cells: Vec<Cell> = spec
        .orders
        .iter()
        .flat_map(|&order| spec.taus.iter().map(move |&tau| Cell { order, tau }))
        .collect();
    let source = match spec.scenario {
        Scenario::LtiSweep => format!("omega {:?}", spec.omega),
        _ => format!("{} profile", spec.profile.name()),
    };
    eprintln!("{}: {} cells over [{}, {}], {source}", spec.scenario, cells.len(), spec.t0, spec.tf);
    let results: Vec<CellResult> = cells
        .par_iter()
        .map(|cell| {
            let res = run_cell(spec, *cell)?;
            eprintln!(
                "{} ell={} tau={:e}: E_max={:.3e} at t={} over {} steps",
                spec.scenario,
                cell.order.ell(),
                cell.tau,
                res.report.e_max,
                res.report.t_argmax,
                res.steps
            );
            Ok(res)
        })
        .collect::<Result<_, CliError>>()?;

    let mut rows = Vec::with_capacity(cells.len() * 5 + spec.orders.len());
    for (cell, res) in cells.iter().zip(&results) {
        let row = |metric: &str, value: f64| Row {
            scenario: spec.scenario.id(),
            ell: Some(cell.order.ell()),
            tau: Some(cell.tau),
            span: Some((spec.t0, spec.tf)),
            metric: metric.to_string(),
            value,
        };
        rows.push(row("e_max", res.report.e_max));
        rows.push(row("t_at_e_max", res.report.t_argmax));
        rows.push(row("steps", res.steps as f64));
        if let Some(d) = res.norm_drift {
            rows.push(row("max_norm_drift", d));
        }
        rows.push(row("near_antipodal", f64::from(u8::from(res.report.near_antipodal))));
    }
    if spec.taus.len() >= 3 {
        for &order in &spec.orders {
            let samples: Vec<(f64, f64)> = cells
                .iter()
                .zip(&results)
                .filter(|(c, _)| c.order == order)
                .map(|(c, r)| (c.tau, r.report.e_max))
                .collect();
            // Too few samples above the rounding floor is not an error here.
            if let Ok(slope) = convergence_order(&samples) {
                rows.push(Row {
                    scenario: spec.scenario.id(),
                    ell: Some(order.ell()),
                    tau: None,
                    span: Some((spec.t0, spec.tf)),
                    metric: "convergence_order".into(),
                    value: slope,
                });
            }
        }
    }
    Ok(rows)
}

fn run_cell(spec: &ScenarioSpec, cell: Cell) -> Result<CellResult, CliError> {
    let echo = RunEcho {
        ell: Some(cell.order.ell()),
        tau: cell.tau,
        t0: spec.t0,
        tf: spec.tf,
    };
    let (omega0, xi) = match spec.profile {
        Profile::Special { omega0, xi } | Profile::Damped { omega0, xi } => (omega0, xi),
    };
    match spec.scenario {
        Scenario::LtiSweep => {
            let omega = AngularVelocity::from_components(spec.omega)?;
            let q0 = QuatState::identity();
            let cfg = PropagationConfig::new(cell.order, cell.tau, spec.t0, spec.tf, q0)?;
            let mut tracker = ErrorTracker::new();
            let mut drift: f64 = 0.0;
            for s in propagate_lti(&cfg, &omega)? {
                let exact = analytic_lti_solution(s.k as f64 * cell.tau, &omega, &q0);
                tracker.push(s.k, &s.t, &s.q, &exact);
                drift = drift.max((s.q.norm() - 1.0).abs());
            }
            Ok(CellResult {
                report: tracker.finish(echo),
                steps: cfg.steps(),
                norm_drift: Some(drift),
            })
        }
        Scenario::SpecialLtvSweep => {
            let profile = SpecialLtvProfile::new(omega0, xi)?;
            let cfg = PropagationConfig::new(cell.order, cell.tau, spec.t0, spec.tf, profile.state(spec.t0))?;
            let mut tracker = ErrorTracker::new();
            let mut drift: f64 = 0.0;
            for s in propagate_ltv(&cfg, profile)? {
                let s = s?;
                tracker.push(s.k, &s.t, &s.q, &profile.state(s.t));
                drift = drift.max((s.q.norm() - 1.0).abs());
            }
            Ok(CellResult {
                report: tracker.finish(echo),
                steps: cfg.steps(),
                norm_drift: Some(drift),
            })
        }
        Scenario::GeneralLtvOracle => {
            let oracle = ReferenceOracle::new(spec.oracle_substeps)?;
            let report = match spec.profile {
                Profile::Special { .. } => {
                    let p = SpecialLtvProfile::new(omega0, xi)?;
                    oracle_report(cell, spec, p.state(spec.t0), p, &oracle, echo)?
                }
                Profile::Damped { .. } => {
                    let p = DampedLtvProfile::new(omega0, xi)?;
                    oracle_report(cell, spec, p.initial_state(), p, &oracle, echo)?
                }
            };
            let steps = report.samples.saturating_sub(1);
            Ok(CellResult {
                report,
                steps,
                norm_drift: None,
            })
        }
        Scenario::BetaTable | Scenario::CoefficientDump => unreachable!("not a grid scenario"),
    }
}

fn oracle_report<R: symquat::RateSource<f64> + Clone>(
    cell: Cell,
    spec: &ScenarioSpec,
    q0: QuatState<f64>,
    source: R,
    oracle: &ReferenceOracle,
    echo: RunEcho,
) -> Result<ErrorReport, CliError> {
    let cfg = PropagationConfig::new(cell.order, cell.tau, spec.t0, spec.tf, q0)?;
    let ns = propagate_ltv(&cfg, source.clone())?;
    Ok(max_error(ns, oracle.trajectory(&cfg, source), echo)?)
}

fn beta_table(spec: &ScenarioSpec) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    for &order in &spec.orders {
        let coeffs = PadeCoefficients::<f64>::new(order);
        let bound = order.convergence_bound();
        let row = |metric: String, value: f64| Row {
            scenario: spec.scenario.id(),
            ell: Some(order.ell()),
            tau: None,
            span: None,
            metric,
            value,
        };
        rows.push(row("convergence_bound".into(), bound.unwrap_or(f64::INFINITY)));
        let range = bound.unwrap_or(UNBOUNDED_C_RANGE);
        for i in 0..spec.c_points {
            let c = range * i as f64 / spec.c_points as f64;
            rows.push(row(format!("beta@c={}", real(c)), coeffs.beta(&c)?));
        }
    }
    Ok(rows)
}

fn coefficient_dump(spec: &ScenarioSpec) -> Vec<Row> {
    let mut rows = Vec::new();
    for &order in &spec.orders {
        let coeffs = PadeCoefficients::<f64>::new(order);
        let row = |metric: String, value: f64| Row {
            scenario: spec.scenario.id(),
            ell: Some(order.ell()),
            tau: None,
            span: None,
            metric,
            value,
        };
        for (j, a) in coeffs.a.iter().enumerate() {
            rows.push(row(format!("a[{j}]"), *a));
        }
        for (j, b) in coeffs.b.iter().enumerate() {
            rows.push(row(format!("b[{j}]"), *b));
        }
        for (k, p) in coeffs.polynomial_coefficients().iter().enumerate() {
            rows.push(row(format!("p[{k}]"), *p));
        }
    }
    rows
}
