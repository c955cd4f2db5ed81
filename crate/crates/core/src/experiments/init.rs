//! Initial-condition generators and the exact plane-wave solution.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::rng::CounterRng;
use crate::error::{Error, Result};
use crate::params::CglParameters;
use crate::tensor::ComplexTensor;
use crate::C64;

/// Real standard-normal samples divided by `divisor`, one per grid point in
/// column-major order.
pub fn random_small(shape: &[usize], seed: u64, divisor: f64) -> Result<ComplexTensor> {
    if !(divisor > 0.0) {
        return Err(Error::InvalidArgument(format!("amplitude divisor {divisor}")));
    }
    let n: usize = shape.iter().product();
    let data = CounterRng::new(seed)
        .normals(n)
        .into_iter()
        .map(|z| C64::new(z / divisor, 0.0))
        .collect();
    ComplexTensor::new(shape.to_vec(), data)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecklaceParams {
    pub delta: f64,
    pub rho0: f64,
    pub omega: f64,
    pub eta: f64,
    pub kappa: f64,
}

impl Default for NecklaceParams {
    fn default() -> Self {
        Self {
            delta: 1.2,
            rho0: 6.0,
            omega: 2.5,
            eta: 5.0,
            kappa: 3.0,
        }
    }
}

/// Necklace ring `δ sech(√((ρ−ρ₀)²+x₃²)/ω) cos(ηθ) e^{iκθ}` with
/// `ρ = √(x₁²+x₂²)` and `θ = atan2(x₂, x₁)`.
pub fn necklace(nodes: &[Vec<f64>], p: &NecklaceParams) -> Result<ComplexTensor> {
    let [x1, x2, x3] = nodes else {
        return Err(Error::Dimension(format!("necklace needs 3 directions, got {}", nodes.len())));
    };
    let shape = [x1.len(), x2.len(), x3.len()];
    Ok(ComplexTensor::from_fn(&shape, |i| {
        necklace_point(x1[i[0]], x2[i[1]], x3[i[2]], p)
    }))
}

pub fn necklace_point(x1: f64, x2: f64, x3: f64, p: &NecklaceParams) -> C64 {
    let rho = x1.hypot(x2);
    let theta = x2.atan2(x1);
    let r = ((rho - p.rho0).powi(2) + x3 * x3).sqrt() / p.omega;
    let amp = p.delta / r.cosh() * (p.eta * theta).cos();
    C64::from_polar(1.0, p.kappa * theta) * amp
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub delta: f64,
    pub center: f64,
    pub sigma: f64,
}

impl Default for GaussianParams {
    fn default() -> Self {
        Self {
            delta: 2.25,
            center: 17.5,
            sigma: 2.5,
        }
    }
}

/// `δ exp(−(x−χ)²/(2σ²))` on a 1D grid.
pub fn gaussian_1d(nodes: &[f64], p: &GaussianParams) -> ComplexTensor {
    ComplexTensor::from_fn(&[nodes.len()], |i| {
        let x = nodes[i[0]] - p.center;
        C64::new(p.delta * (-x * x / (2.0 * p.sigma * p.sigma)).exp(), 0.0)
    })
}

/// Deterministic smooth periodic datum built from the lowest Fourier mode
/// of every direction.
pub fn smooth_periodic(nodes: &[Vec<f64>], intervals: &[(f64, f64)]) -> ComplexTensor {
    let shape: Vec<usize> = nodes.iter().map(Vec::len).collect();
    ComplexTensor::from_fn(&shape, |idx| {
        let mut v = C64::new(0.5, 0.0);
        for (mu, &j) in idx.iter().enumerate() {
            let (a, b) = intervals[mu];
            let phase = 2.0 * PI * (nodes[mu][j] - a) / (b - a);
            v += C64::from_polar(0.2, 0.7 * mu as f64) * phase.cos();
        }
        v
    })
}

/// Modulus and angular frequency of the travelling wave `ρ e^{i(κx−ωt)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneWave {
    pub wavenumber: f64,
    pub amplitude: f64,
    pub frequency: f64,
}

impl PlaneWave {
    /// Integer `mode` along the first direction of an interval of length `length`.
    pub fn new(params: &CglParameters, mode: i64, length: f64) -> Result<Self> {
        if params.has_quintic() || params.alpha3 == 0.0 {
            return Err(Error::Config("plane wave needs a cubic problem with alpha3 != 0".into()));
        }
        let kappa = 2.0 * PI * mode as f64 / length;
        let rho2 = (params.alpha1 * kappa * kappa - params.alpha2) / params.alpha3;
        if !(rho2 >= 0.0) {
            return Err(Error::Config(format!("no real plane-wave amplitude (rho^2 = {rho2})")));
        }
        Ok(Self {
            wavenumber: kappa,
            amplitude: rho2.sqrt(),
            frequency: params.beta1 * kappa * kappa - params.beta3 * rho2,
        })
    }

    pub fn value(&self, x: f64, t: f64) -> C64 {
        C64::from_polar(self.amplitude, self.wavenumber * x - self.frequency * t)
    }

    /// Samples on a tensor grid; the wave travels along the first direction.
    pub fn sample(&self, nodes: &[Vec<f64>], t: f64) -> ComplexTensor {
        let shape: Vec<usize> = nodes.iter().map(Vec::len).collect();
        ComplexTensor::from_fn(&shape, |i| self.value(nodes[0][i[0]], t))
    }
}

/// Exact plane-wave solution of the cubic equation at time `t`.
pub fn plane_wave_reference(
    params: &CglParameters,
    mode: i64,
    nodes: &[Vec<f64>],
    interval: (f64, f64),
    t: f64,
) -> Result<ComplexTensor> {
    Ok(PlaneWave::new(params, mode, interval.1 - interval.0)?.sample(nodes, t))
}
