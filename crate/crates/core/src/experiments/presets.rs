//! The five reference setups, at desk scale (default) or full scale.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::config::{BoundaryKind, ExperimentConfig, InitialCondition, ReferencePolicy, ReportFormat};
use super::init::{GaussianParams, NecklaceParams};
use crate::error::{Error, Result};
use crate::flows::NonlinearKind;
use crate::integrators::Scheme;
use crate::params::CglParameters;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    Cubic2dDirichlet,
    Cubic2dPeriodic,
    Cubic3dDirichletNeumann,
    CubicQuintic3dPeriodic,
    Coupled2dPeriodic,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Cubic2dDirichlet,
        Preset::Cubic2dPeriodic,
        Preset::Cubic3dDirichletNeumann,
        Preset::CubicQuintic3dPeriodic,
        Preset::Coupled2dPeriodic,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Preset::Cubic2dDirichlet => "cubic2d-dirichlet",
            Preset::Cubic2dPeriodic => "cubic2d-periodic",
            Preset::Cubic3dDirichletNeumann => "cubic3d-dirichlet-neumann",
            Preset::CubicQuintic3dPeriodic => "cubic-quintic3d-periodic",
            Preset::Coupled2dPeriodic => "coupled2d-periodic",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Preset::Cubic2dDirichlet => "2D cubic CGL, homogeneous Dirichlet, finite differences, small random data",
            Preset::Cubic2dPeriodic => "2D cubic CGL, periodic, Fourier pseudospectral, small random data",
            Preset::Cubic3dDirichletNeumann => {
                "3D cubic CGL, Dirichlet/Neumann, finite differences, small random data"
            }
            Preset::CubicQuintic3dPeriodic => "3D cubic-quintic CGL, periodic, necklace-ring initial data",
            Preset::Coupled2dPeriodic => "2D coupled cubic-quintic CGL system, periodic, colliding solitons",
        }
    }

    /// Default configuration; `full_scale` selects the full grids and step
    /// lists instead of the desk-scale ones.
    pub fn config(self, full_scale: bool) -> ExperimentConfig {
        let cubic = CglParameters::cubic(1.0, 2.0, 1.0, -1.0, 0.2);
        let random = InitialCondition::RandomSmall { divisor: 5000.0 };
        let reference = ReferencePolicy::Numeric { refinement: 8 };
        let split_and_rk = vec![
            Scheme::Rk2,
            Scheme::Rk4,
            Scheme::Strang,
            Scheme::Split4,
            Scheme::If2,
            Scheme::If4,
        ];
        let base = |extents: Vec<usize>,
                    intervals: Vec<(f64, f64)>,
                    boundary,
                    nonlinearity,
                    params,
                    initial,
                    t_final,
                    schemes: Vec<Scheme>,
                    steps: Vec<(Vec<Scheme>, Vec<usize>)>| {
            let mut scheme_steps = BTreeMap::new();
            for (group, list) in steps {
                for s in group {
                    scheme_steps.insert(s, list.clone());
                }
            }
            ExperimentConfig {
                preset: Some(self.id().to_string()),
                extents,
                intervals,
                boundary,
                nonlinearity,
                params,
                initial,
                seed: 1,
                t_final,
                steps: scheme_steps.values().next().cloned().unwrap_or_default(),
                scheme_steps,
                schemes,
                reference,
                snapshots: Vec::new(),
                output_dir: None,
                format: ReportFormat::Csv,
                timing: false,
            }
        };
        let second = vec![Scheme::Strang, Scheme::If2];
        let fourth = vec![Scheme::Split4, Scheme::If4];

        match (self, full_scale) {
            (Preset::Cubic2dDirichlet, false) => base(
                vec![64, 64],
                vec![(0.0, 100.0); 2],
                BoundaryKind::Dirichlet,
                NonlinearKind::Cubic,
                cubic,
                random,
                6.0,
                split_and_rk,
                vec![
                    (second, vec![10, 25, 50, 100, 200]),
                    (fourth, vec![10, 25, 50, 100, 200]),
                    (vec![Scheme::Rk2], vec![10, 50, 100, 200, 400]),
                    (vec![Scheme::Rk4], vec![10, 50, 100, 200, 400]),
                ],
            ),
            (Preset::Cubic2dDirichlet, true) => base(
                vec![256, 256],
                vec![(0.0, 100.0); 2],
                BoundaryKind::Dirichlet,
                NonlinearKind::Cubic,
                cubic,
                random,
                6.0,
                split_and_rk,
                vec![
                    (second, range(25, 225, 50)),
                    (fourth, range(100, 300, 50)),
                    (vec![Scheme::Rk2], range(355, 755, 100)),
                    (vec![Scheme::Rk4], range(255, 655, 100)),
                ],
            ),
            (Preset::Cubic2dPeriodic, false) => base(
                vec![64, 64],
                vec![(0.0, 100.0); 2],
                BoundaryKind::Periodic,
                NonlinearKind::Cubic,
                cubic,
                random,
                6.0,
                split_and_rk,
                vec![
                    (second, vec![25, 50, 100, 200]),
                    (fourth, vec![25, 50, 100, 200]),
                    (vec![Scheme::Rk2, Scheme::Rk4], vec![50, 100, 200, 400]),
                ],
            ),
            (Preset::Cubic2dPeriodic, true) => base(
                vec![256, 256],
                vec![(0.0, 100.0); 2],
                BoundaryKind::Periodic,
                NonlinearKind::Cubic,
                cubic,
                random,
                6.0,
                split_and_rk,
                vec![
                    (second, range(25, 225, 50)),
                    (fourth, range(200, 400, 50)),
                    (vec![Scheme::Rk2], range(755, 1155, 100)),
                    (vec![Scheme::Rk4], range(555, 955, 100)),
                ],
            ),
            (Preset::Cubic3dDirichletNeumann, false) => base(
                vec![32, 32, 32],
                vec![(0.0, 100.0); 3],
                BoundaryKind::DirichletNeumann,
                NonlinearKind::Cubic,
                cubic,
                random,
                10.0,
                split_and_rk,
                vec![
                    (second, vec![25, 50, 100, 200]),
                    (fourth, vec![25, 50, 100, 200]),
                    (vec![Scheme::Rk2, Scheme::Rk4], vec![50, 100, 200, 400]),
                ],
            ),
            (Preset::Cubic3dDirichletNeumann, true) => base(
                vec![128, 128, 128],
                vec![(0.0, 100.0); 3],
                BoundaryKind::DirichletNeumann,
                NonlinearKind::Cubic,
                cubic,
                random,
                10.0,
                split_and_rk,
                vec![
                    (second, range(25, 225, 50)),
                    (fourth, range(50, 250, 50)),
                    (vec![Scheme::Rk2, Scheme::Rk4], range(115, 515, 100)),
                ],
            ),
            (Preset::CubicQuintic3dPeriodic, scale) => {
                let params = CglParameters {
                    alpha1: 0.5,
                    beta1: 0.5,
                    alpha2: -0.5,
                    alpha3: 2.52,
                    beta3: 1.0,
                    alpha4: -1.0,
                    beta4: -0.11,
                    ..CglParameters::default()
                };
                let n = if scale { 128 } else { 32 };
                let (second_steps, fourth_steps, rk2, rk4) = if scale {
                    (
                        range(1000, 3000, 500),
                        range(300, 900, 150),
                        range(1200, 1600, 100),
                        range(1000, 1400, 100),
                    )
                } else {
                    (
                        vec![100, 200, 400, 800],
                        vec![50, 100, 200, 400],
                        vec![200, 400, 800, 1600],
                        vec![100, 200, 400, 800],
                    )
                };
                base(
                    vec![n; 3],
                    vec![(-12.0, 12.0); 3],
                    BoundaryKind::Periodic,
                    NonlinearKind::CubicQuintic,
                    params,
                    InitialCondition::Necklace(NecklaceParams::default()),
                    5.0,
                    Scheme::ALL.to_vec(),
                    vec![
                        (vec![Scheme::Strang, Scheme::Strang3t, Scheme::If2], second_steps),
                        (vec![Scheme::Split4, Scheme::Split43t, Scheme::If4], fourth_steps),
                        (vec![Scheme::Rk2], rk2),
                        (vec![Scheme::Rk4], rk4),
                    ],
                )
            }
            (Preset::Coupled2dPeriodic, scale) => {
                let params = CglParameters {
                    alpha0: -0.4,
                    alpha1: 0.125,
                    beta1: 0.5,
                    alpha2: -0.9,
                    alpha3: 1.0,
                    beta3: 0.8,
                    alpha4: -0.1,
                    beta4: -0.6,
                    alpha5: 0.5,
                };
                let extents = if scale { vec![700, 350] } else { vec![128, 64] };
                let initial = InitialCondition::SolitonPair {
                    profile: GaussianParams::default(),
                    settle_time: 25.0,
                    settle_steps: if scale { 10_000 } else { 2500 },
                };
                let steps = if scale {
                    vec![
                        (second, range(5000, 13000, 2000)),
                        (fourth, range(500, 2500, 500)),
                        (vec![Scheme::Rk2], range(1062, 3062, 500)),
                        (vec![Scheme::Rk4], range(562, 2562, 500)),
                    ]
                } else {
                    vec![
                        (second, vec![200, 400, 800, 1600]),
                        (fourth, vec![100, 200, 400, 800]),
                        (vec![Scheme::Rk2, Scheme::Rk4], vec![200, 400, 800, 1600]),
                    ]
                };
                base(
                    extents,
                    vec![(0.0, 70.0), (0.0, 35.0)],
                    BoundaryKind::Periodic,
                    NonlinearKind::CoupledCubicQuintic,
                    params,
                    initial,
                    3.0,
                    split_and_rk,
                    steps,
                )
            }
        }
    }
}

/// `start, start + step, …, end`.
fn range(start: usize, end: usize, step: usize) -> Vec<usize> {
    (start..=end).step_by(step).collect()
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.id() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown preset '{s}'")))
    }
}
