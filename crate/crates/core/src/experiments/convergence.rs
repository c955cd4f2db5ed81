//! Convergence and timing sweeps over schemes and step counts.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ReferencePolicy};
use super::init::PlaneWave;
use super::{build_problem, initial_fields};
use crate::error::{Error, Result};
use crate::integrators::{integrate, Fields, NoObserver, Outcome, Problem, Scheme, SchemeSpec};
use crate::par;
use crate::tensor::ComplexTensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    Diverged,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub scheme: Scheme,
    pub steps: usize,
    pub tau: f64,
    pub seconds: f64,
    pub rel_err: Option<f64>,
    pub observed_order: Option<f64>,
    pub status: RowStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub preset: Option<String>,
    pub t_final: f64,
    pub reference: String,
    pub rows: Vec<ReportRow>,
}

impl ConvergenceReport {
    pub fn rows_for(&self, scheme: Scheme) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(move |r| r.scheme == scheme)
    }

    /// Least-squares slope of `log(error)` against `log(τ)` over the
    /// non-divergent rows of `scheme`.
    pub fn fitted_order(&self, scheme: Scheme) -> Option<f64> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .rows_for(scheme)
            .filter_map(|r| r.rel_err.filter(|e| *e > 0.0).map(|e| (r.tau.ln(), e.ln())))
            .unzip();
        least_squares_slope(&xs, &ys)
    }

    pub fn diverged(&self, scheme: Scheme, steps: usize) -> Option<bool> {
        self.rows_for(scheme)
            .find(|r| r.steps == steps)
            .map(|r| r.status == RowStatus::Diverged)
    }

    pub fn min_error(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.rel_err)
            .filter(|e| e.is_finite())
            .min_by(f64::total_cmp)
    }
}

/// Slope of the least-squares line through `(xs, ys)`; `None` with fewer
/// than two distinct abscissae.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// `max |a − b| / max |b|` over all components.
pub fn relative_max_error(approx: &[ComplexTensor], reference: &[ComplexTensor]) -> f64 {
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for (a, b) in approx.iter().zip(reference) {
        for (x, y) in a.data().iter().zip(b.data()) {
            num = num.max((x - y).norm());
            den = den.max(y.norm());
        }
    }
    if num.is_nan() {
        f64::NAN
    } else {
        num / den
    }
}

/// Integrates one (scheme, step count) pair on a private copy of `problem`.
pub fn run_single(problem: &Problem, initial: &Fields, scheme: Scheme, t_final: f64, steps: usize) -> Result<Outcome> {
    let spec = SchemeSpec::default_for(scheme, problem.nonlinear().kind())?;
    let mut p = problem.clone();
    integrate(&mut p, spec, initial, t_final, steps, &mut NoObserver)
}

/// Solution the rows are measured against.
#[derive(Clone, Debug)]
pub struct Reference {
    pub fields: Fields,
    pub label: String,
    /// Relative gap between the if4 and split4 references, numeric policy only.
    pub cross_gap: Option<f64>,
}

pub fn compute_reference(config: &ExperimentConfig, problem: &Problem, initial: &Fields) -> Result<Reference> {
    match config.reference {
        ReferencePolicy::Exact => {
            let super::config::InitialCondition::PlaneWave { mode } = config.initial else {
                return Err(Error::Config("an exact reference needs plane-wave initial data".into()));
            };
            let (a, b) = config.intervals[0];
            let wave = PlaneWave::new(&config.params, mode, b - a)?;
            Ok(Reference {
                fields: vec![wave.sample(&config.nodes()?, config.t_final)],
                label: "exact plane wave".into(),
                cross_gap: None,
            })
        }
        ReferencePolicy::Numeric { refinement } => {
            let m = refinement * config.max_steps();
            let runs = par::map_collect(&[Scheme::If4, Scheme::Split4], |&s| {
                run_single(problem, initial, s, config.t_final, m)
            });
            let [fine, check] = <[Result<Outcome>; 2]>::try_from(runs).expect("two reference runs");
            let fine = fine?.fields;
            let gap = relative_max_error(&check?.fields, &fine);
            Ok(Reference {
                fields: fine,
                label: format!("if4 m={m}"),
                cross_gap: Some(gap),
            })
        }
    }
}

fn row_from(scheme: Scheme, steps: usize, t_final: f64, run: Result<Outcome>, reference: &Fields) -> Result<ReportRow> {
    let tau = t_final / steps as f64;
    match run {
        Ok(out) => {
            let err = relative_max_error(&out.fields, reference);
            let status = if err.is_finite() { RowStatus::Ok } else { RowStatus::Diverged };
            Ok(ReportRow {
                scheme,
                steps,
                tau,
                seconds: out.elapsed.as_secs_f64(),
                rel_err: err.is_finite().then_some(err),
                observed_order: None,
                status,
            })
        }
        Err(Error::Divergence { .. } | Error::BlowUp) => Ok(ReportRow {
            scheme,
            steps,
            tau,
            seconds: Duration::ZERO.as_secs_f64(),
            rel_err: None,
            observed_order: None,
            status: RowStatus::Diverged,
        }),
        Err(e) => Err(e),
    }
}

fn fill_observed_orders(rows: &mut [ReportRow]) {
    for i in 1..rows.len() {
        let (prev, cur) = (&rows[i - 1], &rows[i]);
        if prev.scheme != cur.scheme {
            continue;
        }
        if let (Some(e0), Some(e1)) = (prev.rel_err, cur.rel_err) {
            if e0 > 0.0 && e1 > 0.0 && cur.steps != prev.steps {
                rows[i].observed_order = Some((e0 / e1).ln() / (cur.steps as f64 / prev.steps as f64).ln());
            }
        }
    }
}

/// Runs every configured (scheme, step count) pair against the configured
/// reference. Divergent runs become `Diverged` rows. With a numeric
/// reference the if4 and split4 references must agree within ten times the
/// smallest row error.
pub fn run_convergence_study(config: &ExperimentConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    let problem = build_problem(config)?;
    let initial = initial_fields(config)?;
    let entries: Vec<(Scheme, usize)> = config
        .schemes
        .iter()
        .flat_map(|&s| config.steps_for(s).iter().map(move |&m| (s, m)))
        .collect();

    let reference = compute_reference(config, &problem, &initial)?;

    let runs: Vec<Result<Outcome>> = if config.timing {
        if let Some(&(s, m)) = entries.first() {
            let _ = run_single(&problem, &initial, s, config.t_final, m);
        }
        entries
            .iter()
            .map(|&(s, m)| run_single(&problem, &initial, s, config.t_final, m))
            .collect()
    } else {
        par::map_collect(&entries, |&(s, m)| run_single(&problem, &initial, s, config.t_final, m))
    };
    let mut rows = entries
        .iter()
        .zip(runs)
        .map(|(&(s, m), run)| row_from(s, m, config.t_final, run, &reference.fields))
        .collect::<Result<Vec<_>>>()?;
    fill_observed_orders(&mut rows);

    let report = ConvergenceReport {
        preset: config.preset.clone(),
        t_final: config.t_final,
        reference: reference.label,
        rows,
    };
    if let (Some(difference), Some(min_err)) = (reference.cross_gap, report.min_error()) {
        let limit = 10.0 * min_err;
        if !(difference <= limit) {
            return Err(Error::ReferenceMismatch { difference, limit });
        }
    }
    Ok(report)
}
