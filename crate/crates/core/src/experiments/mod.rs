//! Experiment presets, initial data, convergence studies and I/O.

pub mod config;
pub mod convergence;
pub mod init;
pub mod io;
pub mod presets;
pub mod rng;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use config::{BoundaryKind, ExperimentConfig, InitialCondition, ReferencePolicy, ReportFormat};
pub use convergence::{run_convergence_study, ConvergenceReport, ReportRow, RowStatus};
pub use presets::Preset;

use crate::error::{Error, Result};
use crate::flows::{NonlinearKind, NonlinearSpec};
use crate::integrators::{integrate, Fields, Observer, Problem, Recorder, Scheme, SchemeSpec};
use crate::operators::{build_fd_operator, build_periodic_operator, BlockOperator};
use crate::spectral::{Advection, FourierGrid};
use crate::tensor::ComplexTensor;

/// Semidiscrete problem described by `config`.
pub fn build_problem(config: &ExperimentConfig) -> Result<Problem> {
    let nonlinear = NonlinearSpec::new(config.nonlinearity, config.params)?;
    let operator = match config.boundary.fd() {
        Some(fd) => BlockOperator::single(build_fd_operator(
            &config.extents,
            &config.intervals,
            &config.params,
            fd,
        )?),
        None => {
            let grid = config.fourier_grid()?;
            match config.nonlinearity {
                NonlinearKind::CoupledCubicQuintic => BlockOperator::new(vec![
                    build_periodic_operator(grid.clone(), &config.params, Advection::Positive)?,
                    build_periodic_operator(grid, &config.params, Advection::Negative)?,
                ])?,
                _ => BlockOperator::single(build_periodic_operator(grid, &config.params, Advection::None)?),
            }
        }
    };
    Problem::new(operator, nonlinear)
}

/// Physical-space initial data described by `config`.
pub fn initial_fields(config: &ExperimentConfig) -> Result<Fields> {
    let nodes = config.nodes()?;
    match config.initial {
        InitialCondition::RandomSmall { divisor } => {
            Ok(vec![init::random_small(&config.extents, config.seed, divisor)?])
        }
        InitialCondition::Necklace(p) => Ok(vec![init::necklace(&nodes, &p)?]),
        InitialCondition::Smooth => Ok(vec![init::smooth_periodic(&nodes, &config.intervals)]),
        InitialCondition::PlaneWave { mode } => {
            let (a, b) = config.intervals[0];
            Ok(vec![init::PlaneWave::new(&config.params, mode, b - a)?.sample(&nodes, 0.0)])
        }
        InitialCondition::SolitonPair { .. } => {
            let pair = prepare_coupled_initial(config)?;
            Ok(vec![pair.u0, pair.v0])
        }
    }
}

/// Initial data of the coupled system together with the settled 1D profile.
#[derive(Clone, Debug)]
pub struct CoupledInitial {
    pub u0: ComplexTensor,
    pub v0: ComplexTensor,
    /// Settled 1D profile `w(T_st)`.
    pub profile: ComplexTensor,
    /// `max | |w(T_st)| − |w(T_st − 1)| |`.
    pub stationarity: f64,
}

/// Settles a Gaussian under the uncoupled 1D cubic-quintic equation with if4
/// and broadcasts the profile along the second direction for `u`, and its
/// reflection `x₁ ↦ a + b − x₁` for `v`.
pub fn prepare_coupled_initial(config: &ExperimentConfig) -> Result<CoupledInitial> {
    let InitialCondition::SolitonPair {
        profile,
        settle_time,
        settle_steps,
    } = config.initial
    else {
        return Err(Error::Config("coupled initial data needs soliton_pair settings".into()));
    };
    if !(settle_time > 1.0) || settle_steps == 0 {
        return Err(Error::Config(format!(
            "settling needs T > 1 and positive steps, got T = {settle_time}, m = {settle_steps}"
        )));
    }
    if config.dims() != 2 {
        return Err(Error::Config("the coupled system is two-dimensional".into()));
    }
    let n1 = config.extents[0];
    let grid = FourierGrid::new(vec![n1], vec![config.intervals[0]])?;
    let x1 = grid.nodes(0);
    let params = crate::params::CglParameters {
        alpha0: 0.0,
        alpha5: 0.0,
        ..config.params
    };
    let mut problem = Problem::new(
        BlockOperator::single(build_periodic_operator(grid, &params, Advection::None)?),
        NonlinearSpec::new(NonlinearKind::CubicQuintic, params)?,
    )?;
    let spec = SchemeSpec::default_for(Scheme::If4, NonlinearKind::CubicQuintic)?;
    let probe_step = ((settle_steps as f64) * (settle_time - 1.0) / settle_time).round() as usize;
    let mut recorder = Recorder::new([probe_step]);
    let w0 = init::gaussian_1d(&x1, &profile);
    let out = integrate(&mut problem, spec, &[w0], settle_time, settle_steps, &mut recorder)?;
    let w = out.fields.into_iter().next().expect("one component");
    let earlier = &recorder.records.first().expect("probe step recorded").2[0];
    let stationarity = w
        .data()
        .iter()
        .zip(earlier.data())
        .map(|(a, b)| (a.norm() - b.norm()).abs())
        .fold(0.0, f64::max);

    let shape = config.extents.clone();
    let u0 = ComplexTensor::from_fn(&shape, |i| w.data()[i[0]]);
    let v0 = ComplexTensor::from_fn(&shape, |i| w.data()[(n1 - i[0]) % n1]);
    Ok(CoupledInitial {
        u0,
        v0,
        profile: w,
        stationarity,
    })
}

/// Command-line style overrides applied on top of a preset or config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub grid: Option<Vec<usize>>,
    pub t_final: Option<f64>,
    pub seed: Option<u64>,
    pub schemes: Option<Vec<Scheme>>,
    pub steps: Option<Vec<usize>>,
    pub snapshots: Option<Vec<usize>>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<ReportFormat>,
    pub timing: Option<bool>,
}

impl Overrides {
    pub fn apply(&self, config: &mut ExperimentConfig) -> Result<()> {
        if let Some(grid) = &self.grid {
            config.set_grid(grid)?;
        }
        if let Some(t) = self.t_final {
            config.t_final = t;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(schemes) = &self.schemes {
            config.schemes = schemes.clone();
        }
        if let Some(steps) = &self.steps {
            config.set_steps(steps.clone());
        }
        if let Some(s) = &self.snapshots {
            config.snapshots = s.clone();
        }
        if let Some(dir) = &self.output_dir {
            config.output_dir = Some(dir.clone());
        }
        if let Some(format) = self.format {
            config.format = format;
        }
        if let Some(timing) = self.timing {
            config.timing = timing;
        }
        config.validate()
    }
}

/// Result of a single integration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub preset: Option<String>,
    pub scheme: Scheme,
    pub steps: usize,
    pub tau: f64,
    pub t_final: f64,
    pub seconds: f64,
    /// Largest modulus over all components of the final state.
    pub max_modulus: f64,
    pub snapshots: Vec<PathBuf>,
    #[serde(skip)]
    pub fields: Fields,
}

/// Writes `snapshot_<step>.cgls` files at the requested step indices.
struct SnapshotWriter<'a> {
    dir: &'a Path,
    steps: &'a [usize],
    written: Vec<PathBuf>,
}

impl Observer for SnapshotWriter<'_> {
    fn wants(&self, step: usize) -> bool {
        self.steps.contains(&step)
    }

    fn observe(&mut self, step: usize, time: f64, fields: &[ComplexTensor]) -> Result<()> {
        let path = self.dir.join(format!("snapshot_{step:06}.cgls"));
        io::write_snapshot(&path, time, fields)?;
        self.written.push(path);
        Ok(())
    }
}

/// Integrates `config` once with the first configured scheme and its first
/// step count. Snapshots and `run.json` go to the output directory, if any.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let scheme = config.schemes[0];
    let steps = config.steps_for(scheme)[0];
    let mut problem = build_problem(config)?;
    let initial = initial_fields(config)?;
    let spec = SchemeSpec::default_for(scheme, config.nonlinearity)?;

    let mut writer = match &config.output_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            if !config.snapshots.is_empty() {
                io::write_grid_sidecar(&dir.join("grid.txt"), &config.nodes()?)?;
            }
            Some(SnapshotWriter {
                dir,
                steps: &config.snapshots,
                written: Vec::new(),
            })
        }
        None => None,
    };
    let outcome = match writer.as_mut() {
        Some(w) => integrate(&mut problem, spec, &initial, config.t_final, steps, w),
        None => integrate(
            &mut problem,
            spec,
            &initial,
            config.t_final,
            steps,
            &mut crate::integrators::NoObserver,
        ),
    }?;
    let summary = RunSummary {
        preset: config.preset.clone(),
        scheme,
        steps,
        tau: config.t_final / steps as f64,
        t_final: config.t_final,
        seconds: outcome.elapsed.as_secs_f64(),
        max_modulus: outcome.fields.iter().map(ComplexTensor::max_abs).fold(0.0, f64::max),
        snapshots: writer.map(|w| w.written).unwrap_or_default(),
        fields: outcome.fields,
    };
    if let Some(dir) = &config.output_dir {
        std::fs::write(dir.join("run.json"), serde_json::to_string_pretty(&summary)?)?;
    }
    Ok(summary)
}

/// Convergence study; the report is written to the output directory in the
/// configured format, if one is set.
pub fn sweep(config: &ExperimentConfig) -> Result<ConvergenceReport> {
    let report = run_convergence_study(config)?;
    if let Some(dir) = &config.output_dir {
        std::fs::create_dir_all(dir)?;
        match config.format {
            ReportFormat::Csv => io::write_report_csv(&dir.join("report.csv"), &report)?,
            ReportFormat::Json => io::write_report_json(&dir.join("report.json"), &report)?,
        }
    }
    Ok(report)
}

/// Preset configuration with overrides applied.
pub fn preset_config(preset: Preset, full_scale: bool, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut config = preset.config(full_scale);
    overrides.apply(&mut config)?;
    Ok(config)
}

/// Runs a preset once with overrides applied.
pub fn run_preset(preset: Preset, full_scale: bool, overrides: &Overrides) -> Result<RunSummary> {
    run(&preset_config(preset, full_scale, overrides)?)
}
