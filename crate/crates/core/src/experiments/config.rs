//! Experiment configuration, loadable from JSON.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::init::{GaussianParams, NecklaceParams};
use crate::error::{Error, Result};
use crate::flows::NonlinearKind;
use crate::integrators::Scheme;
use crate::operators::FdBoundary;
use crate::params::CglParameters;
use crate::spectral::FourierGrid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Dirichlet,
    DirichletNeumann,
    Periodic,
}

impl BoundaryKind {
    pub fn fd(self) -> Option<FdBoundary> {
        match self {
            BoundaryKind::Dirichlet => Some(FdBoundary::Dirichlet),
            BoundaryKind::DirichletNeumann => Some(FdBoundary::DirichletNeumann),
            BoundaryKind::Periodic => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    /// Real normal samples divided by `divisor`.
    RandomSmall { divisor: f64 },
    Necklace(NecklaceParams),
    /// Low-mode smooth periodic datum.
    Smooth,
    /// Exact travelling wave with the given integer mode along direction 1.
    PlaneWave { mode: i64 },
    /// Two counter-propagating solitons obtained by settling a 1D Gaussian.
    SolitonPair {
        profile: GaussianParams,
        settle_time: f64,
        settle_steps: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferencePolicy {
    /// Closed-form solution (plane-wave initial data only).
    Exact,
    /// if4 with `refinement` times the largest step count, cross-checked
    /// against split4.
    Numeric { refinement: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub preset: Option<String>,
    pub extents: Vec<usize>,
    pub intervals: Vec<(f64, f64)>,
    pub boundary: BoundaryKind,
    pub nonlinearity: NonlinearKind,
    pub params: CglParameters,
    pub initial: InitialCondition,
    #[serde(default)]
    pub seed: u64,
    pub t_final: f64,
    pub schemes: Vec<Scheme>,
    /// Step counts used by every scheme without an entry in `scheme_steps`.
    pub steps: Vec<usize>,
    #[serde(default)]
    pub scheme_steps: BTreeMap<Scheme, Vec<usize>>,
    pub reference: ReferencePolicy,
    /// Step indices at which `run` writes snapshots.
    #[serde(default)]
    pub snapshots: Vec<usize>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub format: ReportFormat,
    /// Serial timed sweep with a discarded warm-up run.
    #[serde(default)]
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn dims(&self) -> usize {
        self.extents.len()
    }

    pub fn steps_for(&self, scheme: Scheme) -> &[usize] {
        self.scheme_steps.get(&scheme).unwrap_or(&self.steps)
    }

    /// Largest step count over all configured schemes.
    pub fn max_steps(&self) -> usize {
        self.schemes
            .iter()
            .flat_map(|&s| self.steps_for(s).iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Replaces the step list of every scheme.
    pub fn set_steps(&mut self, steps: Vec<usize>) {
        self.steps = steps;
        self.scheme_steps.clear();
    }

    /// Uses the same extent in every direction, or one extent per direction.
    pub fn set_grid(&mut self, extents: &[usize]) -> Result<()> {
        self.extents = match extents {
            [n] => vec![*n; self.dims()],
            e if e.len() == self.dims() => e.to_vec(),
            e => {
                return Err(Error::Config(format!(
                    "grid {e:?} does not match dimension {}",
                    self.dims()
                )))
            }
        };
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.extents.is_empty() || self.extents.len() != self.intervals.len() {
            return Err(Error::Config(format!(
                "{} extents for {} intervals",
                self.extents.len(),
                self.intervals.len()
            )));
        }
        if let Some(fd) = self.boundary.fd() {
            if let Some(&n) = self.extents.iter().find(|&&n| n < fd.min_points()) {
                return Err(Error::Config(format!("grid extent {n} too small for {fd:?}")));
            }
        } else if self.extents.contains(&0) {
            return Err(Error::Config("zero grid extent".into()));
        }
        if self.intervals.iter().any(|&(a, b)| !(b > a)) {
            return Err(Error::Config(format!("bad intervals {:?}", self.intervals)));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::Config(format!("final time {}", self.t_final)));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("no schemes".into()));
        }
        for &s in &self.schemes {
            if self.steps_for(s).is_empty() || self.steps_for(s).contains(&0) {
                return Err(Error::Config(format!("scheme {s} needs positive step counts")));
            }
        }
        let periodic = self.boundary == BoundaryKind::Periodic;
        match self.nonlinearity {
            NonlinearKind::CoupledCubicQuintic if !periodic => {
                return Err(Error::Config("the coupled system is only set up with periodic boundaries".into()))
            }
            NonlinearKind::CoupledCubicQuintic
                if !matches!(self.initial, InitialCondition::SolitonPair { .. }) =>
            {
                return Err(Error::Config("the coupled system needs soliton_pair initial data".into()))
            }
            _ => {}
        }
        match self.initial {
            InitialCondition::Necklace(_) if self.dims() != 3 => {
                return Err(Error::Config("necklace initial data is three-dimensional".into()))
            }
            InitialCondition::PlaneWave { .. } | InitialCondition::Smooth if !periodic => {
                return Err(Error::Config("plane-wave and smooth data need periodic boundaries".into()))
            }
            InitialCondition::SolitonPair { settle_steps: 0, .. } => {
                return Err(Error::Config("settle_steps must be positive".into()))
            }
            InitialCondition::SolitonPair { .. } if self.nonlinearity != NonlinearKind::CoupledCubicQuintic => {
                return Err(Error::Config("soliton_pair data belongs to the coupled system".into()))
            }
            _ => {}
        }
        match self.reference {
            ReferencePolicy::Exact if !matches!(self.initial, InitialCondition::PlaneWave { .. }) => {
                return Err(Error::Config("an exact reference needs plane-wave initial data".into()))
            }
            ReferencePolicy::Numeric { refinement: 0 } => {
                return Err(Error::Config("reference refinement must be positive".into()))
            }
            _ => {}
        }
        Ok(())
    }

    pub fn fourier_grid(&self) -> Result<FourierGrid> {
        FourierGrid::new(self.extents.clone(), self.intervals.clone())
    }

    /// Grid node coordinates per direction.
    pub fn nodes(&self) -> Result<Vec<Vec<f64>>> {
        match self.boundary.fd() {
            Some(fd) => Ok(self
                .extents
                .iter()
                .zip(&self.intervals)
                .map(|(&n, &iv)| fd.nodes(n, iv))
                .collect()),
            None => {
                let grid = self.fourier_grid()?;
                Ok((0..grid.order()).map(|mu| grid.nodes(mu)).collect())
            }
        }
    }
}
