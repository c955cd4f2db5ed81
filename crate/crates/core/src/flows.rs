//! Pointwise nonlinear right-hand sides and the nonlinear subflows used by
//! the splitting schemes. Everything here acts on physical-space values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::params::CglParameters;
use crate::tensor::ComplexTensor;
use crate::C64;

const CHUNK: usize = 4096;

/// Below this magnitude a cubic or quintic growth rate counts as zero and
/// the exact flow becomes a pure phase rotation.
pub const DEGENERATE_RATE: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearKind {
    Cubic,
    CubicQuintic,
    CoupledCubicQuintic,
}

impl NonlinearKind {
    pub fn components(self) -> usize {
        match self {
            NonlinearKind::CoupledCubicQuintic => 2,
            _ => 1,
        }
    }
}

/// How a splitting scheme advances the nonlinear part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStrategy {
    ExactCubic,
    ExactThreeTerm,
    NumericRk4,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonlinearSpec {
    kind: NonlinearKind,
    params: CglParameters,
}

impl NonlinearSpec {
    pub fn new(kind: NonlinearKind, params: CglParameters) -> Result<Self> {
        params.validate()?;
        if kind == NonlinearKind::Cubic && params.has_quintic() {
            return Err(Error::Config("cubic nonlinearity requires alpha4 = beta4 = 0".into()));
        }
        Ok(Self { kind, params })
    }

    pub fn kind(&self) -> NonlinearKind {
        self.kind
    }

    pub fn params(&self) -> &CglParameters {
        &self.params
    }

    pub fn components(&self) -> usize {
        self.kind.components()
    }

    /// `g` at one point; `partner` is the other component for coupled kinds.
    #[inline]
    pub fn g_point(&self, u: C64, partner: Option<C64>) -> C64 {
        let p = &self.params;
        let r = u.norm_sqr();
        let mut coef = C64::new(p.alpha3, p.beta3) * r;
        if self.kind != NonlinearKind::Cubic {
            coef += C64::new(p.alpha4, p.beta4) * (r * r);
        }
        if let Some(v) = partner {
            coef += p.alpha5 * v.norm_sqr();
        }
        coef * u
    }

    fn check_fields(&self, fields: &[ComplexTensor]) -> Result<()> {
        if fields.len() != self.components() {
            return Err(Error::Dimension(format!(
                "{:?} needs {} field(s), got {}",
                self.kind,
                self.components(),
                fields.len()
            )));
        }
        if fields.iter().any(|f| f.shape() != fields[0].shape()) {
            return Err(Error::Dimension("component shapes differ".into()));
        }
        Ok(())
    }
}

/// Physical-space `g` for every component.
pub fn eval_g(spec: &NonlinearSpec, fields: &[ComplexTensor]) -> Result<Vec<ComplexTensor>> {
    let mut out: Vec<ComplexTensor> = fields.iter().map(|f| ComplexTensor::zeros(f.shape())).collect();
    eval_g_into(spec, fields, &mut out)?;
    Ok(out)
}

pub fn eval_g_into(spec: &NonlinearSpec, fields: &[ComplexTensor], out: &mut [ComplexTensor]) -> Result<()> {
    spec.check_fields(fields)?;
    if out.len() != fields.len() || out.iter().any(|o| o.shape() != fields[0].shape()) {
        return Err(Error::Dimension("output fields".into()));
    }
    match fields {
        [u] => {
            let src = u.data();
            par::for_each_chunk_mut(out[0].data_mut(), CHUNK, |c, dst| {
                let off = c * CHUNK;
                for (k, d) in dst.iter_mut().enumerate() {
                    *d = spec.g_point(src[off + k], None);
                }
            });
        }
        [u, v] => {
            let (su, sv) = (u.data(), v.data());
            let (ou, ov) = out.split_at_mut(1);
            par::for_each_chunk_mut2(ou[0].data_mut(), ov[0].data_mut(), CHUNK, |c, a, b| {
                let off = c * CHUNK;
                for k in 0..a.len() {
                    a[k] = spec.g_point(su[off + k], Some(sv[off + k]));
                    b[k] = spec.g_point(sv[off + k], Some(su[off + k]));
                }
            });
        }
        _ => unreachable!("checked by check_fields"),
    }
    Ok(())
}

/// Overwrites every component with its `g` value.
pub fn eval_g_inplace(spec: &NonlinearSpec, fields: &mut [ComplexTensor]) -> Result<()> {
    spec.check_fields(fields)?;
    match fields {
        [u] => map_inplace(u, |z| spec.g_point(z, None)),
        [u, v] => par::for_each_chunk_mut2(u.data_mut(), v.data_mut(), CHUNK, |_, a, b| {
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                (*x, *y) = (spec.g_point(*x, Some(*y)), spec.g_point(*y, Some(*x)));
            }
        }),
        _ => unreachable!("checked by check_fields"),
    }
    Ok(())
}

/// Exact flow of `u' = (a+ib)|u|^{2p} u` at one point, `p ∈ {1, 2}`.
#[inline]
fn power_flow_point(u: C64, t: f64, rate: C64, power: i32) -> C64 {
    let r = u.norm_sqr().powi(power);
    if rate.re.abs() < DEGENERATE_RATE {
        return u * C64::new(0.0, rate.im * r * t).exp();
    }
    let twice_p = 2.0 * power as f64;
    let s = 1.0 - twice_p * rate.re * r * t;
    if s <= 0.0 {
        return C64::new(f64::NAN, f64::NAN);
    }
    u * (-rate / (twice_p * rate.re) * s.ln()).exp()
}

/// Exact cubic flow at one point; NaN past a finite-time blow-up.
#[inline]
pub fn cubic_flow_point(u: C64, t: f64, params: &CglParameters) -> C64 {
    power_flow_point(u, t, C64::new(params.alpha3, params.beta3), 1)
}

/// Exact quintic flow at one point; NaN past a finite-time blow-up.
#[inline]
pub fn quintic_flow_point(u: C64, t: f64, params: &CglParameters) -> C64 {
    power_flow_point(u, t, C64::new(params.alpha4, params.beta4), 2)
}

fn map_inplace(u: &mut ComplexTensor, f: impl Fn(C64) -> C64 + Send + Sync) {
    par::for_each_chunk_mut(u.data_mut(), CHUNK, |_, c| c.iter_mut().for_each(|z| *z = f(*z)));
}

pub fn phi_cubic_inplace(u: &mut ComplexTensor, t: f64, params: &CglParameters) {
    map_inplace(u, |z| cubic_flow_point(z, t, params));
}

pub fn phi_quintic_inplace(u: &mut ComplexTensor, t: f64, params: &CglParameters) {
    map_inplace(u, |z| quintic_flow_point(z, t, params));
}

fn finite_or_blowup(u: ComplexTensor) -> Result<ComplexTensor> {
    if u.is_finite() {
        Ok(u)
    } else {
        Err(Error::BlowUp)
    }
}

/// Exact flow of `u' = (α₃+iβ₃)|u|²u` over time `t`.
pub fn phi_cubic(u0: &ComplexTensor, t: f64, params: &CglParameters) -> Result<ComplexTensor> {
    let mut u = u0.clone();
    phi_cubic_inplace(&mut u, t, params);
    finite_or_blowup(u)
}

/// Exact flow of `u' = (α₄+iβ₄)|u|⁴u` over time `t`.
pub fn phi_quintic(u0: &ComplexTensor, t: f64, params: &CglParameters) -> Result<ComplexTensor> {
    let mut u = u0.clone();
    phi_quintic_inplace(&mut u, t, params);
    finite_or_blowup(u)
}

/// One classical RK4 step of size `t` on the pointwise system `y' = f(y)`.
#[inline]
fn rk4_point<const M: usize>(y: [C64; M], t: f64, f: impl Fn([C64; M]) -> [C64; M]) -> [C64; M] {
    let shift = |y: [C64; M], k: [C64; M], h: f64| -> [C64; M] { std::array::from_fn(|i| y[i] + k[i] * h) };
    let k1 = f(y);
    let k2 = f(shift(y, k1, t / 2.0));
    let k3 = f(shift(y, k2, t / 2.0));
    let k4 = f(shift(y, k3, t));
    std::array::from_fn(|i| y[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (t / 6.0))
}

/// One RK4 step of `u' = g(u)` applied in place to every component.
pub fn phi_numeric_inplace(spec: &NonlinearSpec, fields: &mut [ComplexTensor], t: f64) -> Result<()> {
    spec.check_fields(fields)?;
    match fields {
        [u] => map_inplace(u, |z| rk4_point([z], t, |[y]| [spec.g_point(y, None)])[0]),
        [u, v] => {
            par::for_each_chunk_mut2(u.data_mut(), v.data_mut(), CHUNK, |_, a, b| {
                for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                    let [nx, ny] = rk4_point([*x, *y], t, |[p, q]| {
                        [spec.g_point(p, Some(q)), spec.g_point(q, Some(p))]
                    });
                    *x = nx;
                    *y = ny;
                }
            });
        }
        _ => unreachable!("checked by check_fields"),
    }
    Ok(())
}

pub fn phi_numeric(spec: &NonlinearSpec, fields: &[ComplexTensor], t: f64) -> Result<Vec<ComplexTensor>> {
    let mut out = fields.to_vec();
    phi_numeric_inplace(spec, &mut out, t)?;
    if out.iter().all(ComplexTensor::is_finite) {
        Ok(out)
    } else {
        Err(Error::BlowUp)
    }
}
