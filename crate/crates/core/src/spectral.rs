//! Periodic pseudospectral discretization: wavenumbers, the multidimensional
//! DFT, and the diagonal symbol / exponential tensors of the linear operator.
//!
//! Wavenumbers use the usual FFT ordering `0, 1, …, ⌊n/2⌋, -⌈n/2⌉+1, …, -1`
//! scaled by `2π / (b - a)`. The forward transform is unnormalized and the
//! inverse carries the `1/N` factor.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::par;
use crate::params::CglParameters;
use crate::tensor::ComplexTensor;
use crate::C64;

/// Tensor-product periodic grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierGrid {
    extents: Vec<usize>,
    intervals: Vec<(f64, f64)>,
}

impl FourierGrid {
    pub fn new(extents: Vec<usize>, intervals: Vec<(f64, f64)>) -> Result<Self> {
        if extents.is_empty() || extents.len() != intervals.len() {
            return Err(Error::Dimension(format!(
                "{} extents and {} intervals",
                extents.len(),
                intervals.len()
            )));
        }
        if extents.contains(&0) {
            return Err(Error::Dimension("zero grid extent".into()));
        }
        if intervals.iter().any(|&(a, b)| !(a.is_finite() && b.is_finite() && b > a)) {
            return Err(Error::InvalidArgument(format!("bad intervals {intervals:?}")));
        }
        Ok(Self { extents, intervals })
    }

    pub fn shape(&self) -> &[usize] {
        &self.extents
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn order(&self) -> usize {
        self.extents.len()
    }

    pub fn length(&self, mu: usize) -> f64 {
        let (a, b) = self.intervals[mu];
        b - a
    }

    pub fn wavenumbers(&self, mu: usize) -> Vec<f64> {
        fft_wavenumbers(self.extents[mu], self.length(mu))
    }

    /// `x_j = a + j (b - a) / n`, `j = 0..n`; the right endpoint is excluded.
    pub fn nodes(&self, mu: usize) -> Vec<f64> {
        let (a, _) = self.intervals[mu];
        let n = self.extents[mu];
        let h = self.length(mu) / n as f64;
        (0..n).map(|j| a + j as f64 * h).collect()
    }
}

/// Angular wavenumbers for an `n`-point periodic grid of the given length.
pub fn fft_wavenumbers(n: usize, length: f64) -> Vec<f64> {
    let scale = 2.0 * PI / length;
    (0..n)
        .map(|j| {
            let m = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
            m * scale
        })
        .collect()
}

/// Multidimensional DFT over a fixed shape, one planned 1D transform per
/// direction.
#[derive(Clone)]
pub struct Dft {
    shape: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl fmt::Debug for Dft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dft").field("shape", &self.shape).finish()
    }
}

impl Dft {
    pub fn new(shape: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            shape: shape.to_vec(),
            forward: shape.iter().map(|&n| planner.plan_fft_forward(n)).collect(),
            inverse: shape.iter().map(|&n| planner.plan_fft_inverse(n)).collect(),
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn forward(&self, u: &ComplexTensor) -> Result<ComplexTensor> {
        let mut v = u.clone();
        self.forward_inplace(&mut v)?;
        Ok(v)
    }

    pub fn inverse(&self, u: &ComplexTensor) -> Result<ComplexTensor> {
        let mut v = u.clone();
        self.inverse_inplace(&mut v)?;
        Ok(v)
    }

    pub fn forward_inplace(&self, u: &mut ComplexTensor) -> Result<()> {
        self.check(u)?;
        self.transform(u.data_mut(), &self.forward);
        Ok(())
    }

    pub fn inverse_inplace(&self, u: &mut ComplexTensor) -> Result<()> {
        self.check(u)?;
        self.transform(u.data_mut(), &self.inverse);
        let scale = 1.0 / u.len() as f64;
        u.data_mut().iter_mut().for_each(|z| *z *= scale);
        Ok(())
    }

    fn check(&self, u: &ComplexTensor) -> Result<()> {
        if u.shape() != self.shape.as_slice() {
            return Err(Error::Dimension(format!(
                "DFT planned for {:?}, got {:?}",
                self.shape,
                u.shape()
            )));
        }
        Ok(())
    }

    fn transform(&self, data: &mut [C64], plans: &[Arc<dyn Fft<f64>>]) {
        for (mu, plan) in plans.iter().enumerate() {
            let n = self.shape[mu];
            if n == 1 {
                continue;
            }
            let left: usize = self.shape[..mu].iter().product();
            if left == 1 {
                // contiguous fibers; batch several per task
                let per_task = (4096 / n).max(1) * n;
                par::for_each_chunk_mut(data, per_task, |_, chunk| {
                    let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
                    plan.process_with_scratch(chunk, &mut scratch);
                });
            } else {
                // transpose each slab so its fibers become contiguous
                par::for_each_chunk_mut(data, left * n, |_, slab| {
                    let mut t = vec![C64::new(0.0, 0.0); slab.len()];
                    for j in 0..n {
                        for l in 0..left {
                            t[l * n + j] = slab[j * left + l];
                        }
                    }
                    let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
                    plan.process_with_scratch(&mut t, &mut scratch);
                    for j in 0..n {
                        for l in 0..left {
                            slab[j * left + l] = t[l * n + j];
                        }
                    }
                });
            }
        }
    }
}

/// Diagonal operator stored as one complex value per Fourier mode.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolTensor(ComplexTensor);

impl SymbolTensor {
    pub fn new(values: ComplexTensor) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &ComplexTensor {
        &self.0
    }

    pub fn into_inner(self) -> ComplexTensor {
        self.0
    }

    pub fn shape(&self) -> &[usize] {
        self.0.shape()
    }
}

/// Sign of the first-direction advection term `±α₀ ∂_{x₁}` in the symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Advection {
    Negative,
    #[default]
    None,
    Positive,
}

impl Advection {
    pub fn sign(self) -> f64 {
        match self {
            Advection::Negative => -1.0,
            Advection::None => 0.0,
            Advection::Positive => 1.0,
        }
    }
}

/// `(α₁+iβ₁)(-Σ_μ k_μ²) + α₂ + s·α₀·(i k₁)` at every mode.
pub fn build_symbol(grid: &FourierGrid, params: &CglParameters, advection: Advection) -> SymbolTensor {
    let ks: Vec<Vec<f64>> = (0..grid.order()).map(|mu| grid.wavenumbers(mu)).collect();
    let diffusion = C64::new(params.alpha1, params.beta1);
    let drift = advection.sign() * params.alpha0;
    SymbolTensor(ComplexTensor::from_fn(grid.shape(), |idx| {
        let k2: f64 = idx.iter().zip(&ks).map(|(&j, k)| k[j] * k[j]).sum();
        let mut v = diffusion * (-k2) + params.alpha2;
        if drift != 0.0 {
            v += C64::new(0.0, drift * ks[0][idx[0]]);
        }
        v
    }))
}

/// Elementwise `e^{τ s}` of a symbol.
pub fn build_exp_tensor(symbol: &SymbolTensor, tau: f64) -> SymbolTensor {
    let mut e = symbol.0.clone();
    e.data_mut().iter_mut().for_each(|z| *z = (*z * tau).exp());
    SymbolTensor(e)
}

/// Hadamard product `T ⊙ U`.
pub fn pointwise_apply(t: &SymbolTensor, u: &ComplexTensor) -> Result<ComplexTensor> {
    let mut out = u.clone();
    pointwise_apply_into(t, u, &mut out)?;
    Ok(out)
}

pub fn pointwise_apply_into(t: &SymbolTensor, u: &ComplexTensor, out: &mut ComplexTensor) -> Result<()> {
    if t.shape() != u.shape() || u.shape() != out.shape() {
        return Err(Error::Dimension(format!(
            "symbol shape {:?} against tensor shape {:?}",
            t.shape(),
            u.shape()
        )));
    }
    const CHUNK: usize = 4096;
    let (tv, uv) = (t.0.data(), u.data());
    par::for_each_chunk_mut(out.data_mut(), CHUNK, |c, dst| {
        let off = c * CHUNK;
        for (k, d) in dst.iter_mut().enumerate() {
            *d = tv[off + k] * uv[off + k];
        }
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavenumber_ordering() {
        let k = fft_wavenumbers(8, 2.0 * PI);
        assert_eq!(k, vec![0.0, 1.0, 2.0, 3.0, 4.0, -3.0, -2.0, -1.0]);
        let k = fft_wavenumbers(5, 2.0 * PI);
        assert_eq!(k, vec![0.0, 1.0, 2.0, -2.0, -1.0]);
        let k = fft_wavenumbers(4, 10.0);
        assert!((k[1] - 2.0 * PI / 10.0).abs() < 1e-15);
    }

    #[test]
    fn nodes_exclude_right_endpoint() {
        let g = FourierGrid::new(vec![4], vec![(-2.0, 2.0)]).unwrap();
        assert_eq!(g.nodes(0), vec![-2.0, -1.0, 0.0, 1.0]);
    }

    #[test]
    fn grid_validation() {
        assert!(FourierGrid::new(vec![4, 4], vec![(0.0, 1.0)]).is_err());
        assert!(FourierGrid::new(vec![4], vec![(1.0, 1.0)]).is_err());
        assert!(FourierGrid::new(vec![0], vec![(0.0, 1.0)]).is_err());
    }

    #[test]
    fn constant_goes_to_zero_mode() {
        let c = C64::new(0.7, -0.2);
        let u = ComplexTensor::from_fn(&[6, 4], |_| c);
        let f = Dft::new(&[6, 4]).forward(&u).unwrap();
        assert!((f.vec()[0] - c * 24.0).norm() < 1e-13);
        assert!(f.vec()[1..].iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn single_mode_is_concentrated() {
        let g = FourierGrid::new(vec![8], vec![(0.0, 2.0 * PI)]).unwrap();
        let x = g.nodes(0);
        let u = ComplexTensor::from_fn(&[8], |i| C64::new(0.0, x[i[0]]).exp());
        let f = Dft::new(&[8]).forward(&u).unwrap();
        for (j, z) in f.vec().iter().enumerate() {
            let want = if j == 1 { 8.0 } else { 0.0 };
            assert!((z - want).norm() < 1e-13, "mode {j}: {z}");
        }
    }

    #[test]
    fn symbol_values() {
        let params = CglParameters::cubic(1.0, 2.0, 1.0, -1.0, 0.2);
        let g = FourierGrid::new(vec![4], vec![(0.0, 2.0 * PI)]).unwrap();
        let s = build_symbol(&g, &params, Advection::None);
        assert_eq!(s.values().vec()[0], C64::new(1.0, 0.0));
        assert!((s.values().vec()[1] - (C64::new(-1.0, -2.0) + 1.0)).norm() < 1e-15);

        let mut p = params;
        p.alpha0 = 0.5;
        let s = build_symbol(&g, &p, Advection::Negative);
        assert!((s.values().vec()[1] - C64::new(0.0, -2.0 - 0.5)).norm() < 1e-15);
    }

    #[test]
    fn exp_tensor_properties() {
        let params = CglParameters::cubic(1.0, 2.0, 1.0, -1.0, 0.2);
        let g = FourierGrid::new(vec![8, 6], vec![(0.0, 10.0), (0.0, 7.0)]).unwrap();
        let s = build_symbol(&g, &params, Advection::None);
        assert!(build_exp_tensor(&s, 0.0)
            .values()
            .vec()
            .iter()
            .all(|&z| z == C64::new(1.0, 0.0)));

        let e = build_exp_tensor(&s, 0.3);
        for (z, v) in e.values().vec().iter().zip(s.values().vec()) {
            assert_eq!(*z, (v * 0.3).exp());
        }
        let a = build_exp_tensor(&s, 0.1);
        let b = build_exp_tensor(&s, 0.2);
        let prod = pointwise_apply(&a, b.values()).unwrap();
        for (p, q) in prod.vec().iter().zip(e.values().vec()) {
            assert!((p - q).norm() <= 1e-13 * q.norm().max(1e-300));
        }
    }

    #[test]
    fn pointwise_trivial_cases() {
        let u = ComplexTensor::from_fn(&[3, 2], |i| C64::new(i[0] as f64, i[1] as f64 + 1.0));
        let ones = SymbolTensor::new(ComplexTensor::from_fn(&[3, 2], |_| C64::new(1.0, 0.0)));
        assert_eq!(pointwise_apply(&ones, &u).unwrap(), u);
        let zero = SymbolTensor::new(ComplexTensor::zeros(&[3, 2]));
        assert_eq!(pointwise_apply(&zero, &u).unwrap().max_abs(), 0.0);
        let wrong = SymbolTensor::new(ComplexTensor::zeros(&[2, 3]));
        assert!(pointwise_apply(&wrong, &u).is_err());
    }
}
