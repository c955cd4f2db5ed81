//! Constant-step integrators for `u' = K u + g(u)` and the stepping driver.
//!
//! Every scheme works on a fixed set of preallocated work tensors (at most
//! five per component, the exponential scratch included). States of
//! spectral problems are kept in coefficient space while stepping; the
//! nonlinear parts are evaluated after an inverse transform.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flows::{
    eval_g_inplace, phi_cubic_inplace, phi_numeric_inplace, phi_quintic_inplace, FlowStrategy,
    NonlinearKind, NonlinearSpec,
};
use crate::operators::{BlockOperator, StepFraction};
use crate::tensor::ComplexTensor;
use crate::C64;

/// One tensor per coupled component.
pub type Fields = Vec<ComplexTensor>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "rk2")]
    Rk2,
    #[serde(rename = "rk4")]
    Rk4,
    #[serde(rename = "strang")]
    Strang,
    #[serde(rename = "split4")]
    Split4,
    #[serde(rename = "strang_3t")]
    Strang3t,
    #[serde(rename = "split4_3t")]
    Split43t,
    #[serde(rename = "if2")]
    If2,
    #[serde(rename = "if4")]
    If4,
}

impl Scheme {
    pub const ALL: [Scheme; 8] = [
        Scheme::Rk2,
        Scheme::Rk4,
        Scheme::Strang,
        Scheme::Split4,
        Scheme::Strang3t,
        Scheme::Split43t,
        Scheme::If2,
        Scheme::If4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Rk2 => "rk2",
            Scheme::Rk4 => "rk4",
            Scheme::Strang => "strang",
            Scheme::Split4 => "split4",
            Scheme::Strang3t => "strang_3t",
            Scheme::Split43t => "split4_3t",
            Scheme::If2 => "if2",
            Scheme::If4 => "if4",
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Scheme::Rk2 | Scheme::Strang | Scheme::Strang3t | Scheme::If2 => 2,
            Scheme::Rk4 | Scheme::Split4 | Scheme::Split43t | Scheme::If4 => 4,
        }
    }

    /// Step fractions whose exponentials the scheme uses.
    pub fn fractions(self) -> &'static [StepFraction] {
        match self {
            Scheme::Rk2 | Scheme::Rk4 => &[],
            Scheme::Strang | Scheme::Strang3t | Scheme::If2 => &[StepFraction::ONE],
            Scheme::Split4 | Scheme::Split43t | Scheme::If4 => &[StepFraction::HALF, StepFraction::ONE],
        }
    }

    pub fn is_splitting(self) -> bool {
        matches!(
            self,
            Scheme::Strang | Scheme::Split4 | Scheme::Strang3t | Scheme::Split43t
        )
    }

    pub fn is_three_term(self) -> bool {
        matches!(self, Scheme::Strang3t | Scheme::Split43t)
    }

    /// Number of work tensors per component.
    fn buffers(self) -> usize {
        match self {
            Scheme::Rk2 => 3,
            Scheme::Rk4 => 4,
            Scheme::Strang | Scheme::Strang3t => 2,
            Scheme::Split4 | Scheme::Split43t => 3,
            Scheme::If2 => 4,
            Scheme::If4 => 5,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown scheme '{s}'")))
    }
}

/// A scheme together with the nonlinear flow used by splittings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchemeSpec {
    scheme: Scheme,
    strategy: FlowStrategy,
}

impl SchemeSpec {
    pub fn new(scheme: Scheme, strategy: FlowStrategy, kind: NonlinearKind) -> Result<Self> {
        let ok = match strategy {
            FlowStrategy::ExactCubic => kind == NonlinearKind::Cubic && !scheme.is_three_term(),
            FlowStrategy::ExactThreeTerm => kind == NonlinearKind::CubicQuintic && scheme.is_three_term(),
            FlowStrategy::NumericRk4 => !scheme.is_three_term(),
        };
        if !ok {
            return Err(Error::Config(format!(
                "scheme {scheme} cannot use {strategy:?} on a {kind:?} problem"
            )));
        }
        Ok(Self { scheme, strategy })
    }

    /// Exact flows where available, one RK4 step otherwise.
    pub fn default_for(scheme: Scheme, kind: NonlinearKind) -> Result<Self> {
        let strategy = if scheme.is_three_term() {
            FlowStrategy::ExactThreeTerm
        } else if kind == NonlinearKind::Cubic {
            FlowStrategy::ExactCubic
        } else {
            FlowStrategy::NumericRk4
        };
        Self::new(scheme, strategy, kind)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn strategy(&self) -> FlowStrategy {
        self.strategy
    }

    pub fn fractions(&self) -> &'static [StepFraction] {
        self.scheme.fractions()
    }
}

/// Linear operator (one block per component) plus nonlinearity.
#[derive(Clone, Debug)]
pub struct Problem {
    operator: BlockOperator,
    nonlinear: NonlinearSpec,
}

impl Problem {
    pub fn new(operator: BlockOperator, nonlinear: NonlinearSpec) -> Result<Self> {
        if operator.components() != nonlinear.components() {
            return Err(Error::Config(format!(
                "{} operator blocks for {} nonlinear components",
                operator.components(),
                nonlinear.components()
            )));
        }
        let shape = operator.block(0).shape();
        if operator.blocks().iter().any(|b| b.shape() != shape) {
            return Err(Error::Dimension("operator blocks act on different shapes".into()));
        }
        Ok(Self { operator, nonlinear })
    }

    pub fn operator(&self) -> &BlockOperator {
        &self.operator
    }

    pub fn nonlinear(&self) -> &NonlinearSpec {
        &self.nonlinear
    }

    pub fn shape(&self) -> &[usize] {
        self.operator.block(0).shape()
    }

    pub fn components(&self) -> usize {
        self.operator.components()
    }

    pub fn is_spectral(&self) -> bool {
        self.operator.is_spectral()
    }

    /// Builds the exponential cache for `spec` at step `tau`.
    pub fn prepare(&mut self, spec: &SchemeSpec, tau: f64) -> Result<()> {
        self.operator.prepare(tau, spec.fractions())
    }

    /// Physical values to storage space, in place.
    pub fn to_storage(&self, fields: &mut [ComplexTensor]) -> Result<()> {
        for (b, u) in self.operator.blocks().iter().zip(fields.iter_mut()) {
            b.from_physical(u)?;
        }
        Ok(())
    }

    /// Storage space to physical values, in place.
    pub fn to_physical(&self, fields: &mut [ComplexTensor]) -> Result<()> {
        for (b, u) in self.operator.blocks().iter().zip(fields.iter_mut()) {
            b.to_physical(u)?;
        }
        Ok(())
    }

    fn check_fields(&self, fields: &[ComplexTensor]) -> Result<()> {
        if fields.len() != self.components() {
            return Err(Error::Dimension(format!(
                "{} fields for {} components",
                fields.len(),
                self.components()
            )));
        }
        if let Some(f) = fields.iter().find(|f| f.shape() != self.shape()) {
            return Err(Error::Dimension(format!(
                "field shape {:?}, problem shape {:?}",
                f.shape(),
                self.shape()
            )));
        }
        Ok(())
    }
}

/// Current state of a constant-step integration. `fields` are in storage
/// space (Fourier coefficients for spectral problems).
#[derive(Clone, Debug)]
pub struct StepperState {
    pub fields: Fields,
    pub time: f64,
    pub tau: f64,
    pub step: usize,
}

/// Which side of the linear flow a nonlinear substep sits on. Only the
/// three-term flow is ordered differently on the two sides.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Before,
    After,
}

/// Advances a [`StepperState`] by one step of a fixed scheme.
pub struct Stepper<'a> {
    problem: &'a Problem,
    spec: SchemeSpec,
    tau: f64,
    work: Vec<Fields>,
}

const HALF: StepFraction = StepFraction::HALF;
const ONE: StepFraction = StepFraction::ONE;

impl<'a> Stepper<'a> {
    /// `problem` must have been prepared for `spec` at step `tau`.
    pub fn new(problem: &'a Problem, spec: SchemeSpec, tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::InvalidArgument(format!("step size {tau}")));
        }
        SchemeSpec::new(spec.scheme(), spec.strategy(), problem.nonlinear().kind())?;
        for block in problem.operator().blocks() {
            for f in spec.fractions() {
                if !block.prepared_fractions().contains(f) {
                    return Err(Error::MissingExponential(*f));
                }
            }
            if !spec.fractions().is_empty() && block.prepared_tau() != Some(tau) {
                return Err(Error::Config(format!(
                    "exponentials prepared for step {:?}, stepping with {tau}",
                    block.prepared_tau()
                )));
            }
        }
        let zeros: Fields = (0..problem.components())
            .map(|_| ComplexTensor::zeros(problem.shape()))
            .collect();
        let work = vec![zeros; spec.scheme().buffers()];
        Ok(Self {
            problem,
            spec,
            tau,
            work,
        })
    }

    pub fn spec(&self) -> &SchemeSpec {
        &self.spec
    }

    pub fn work_tensors(&self) -> usize {
        self.work.len()
    }

    /// One step; the caller checks the result for divergence.
    pub fn step(&mut self, state: &mut StepperState) -> Result<()> {
        self.problem.check_fields(&state.fields)?;
        let u = &mut state.fields;
        match self.spec.scheme() {
            Scheme::Rk2 => self.rk2(u)?,
            Scheme::Rk4 => self.rk4(u)?,
            Scheme::Strang | Scheme::Strang3t => self.strang(u)?,
            Scheme::Split4 | Scheme::Split43t => self.split4(u)?,
            Scheme::If2 => self.if2(u)?,
            Scheme::If4 => self.if4(u)?,
        }
        state.step += 1;
        state.time += self.tau;
        Ok(())
    }

    fn rk2(&mut self, u: &mut Fields) -> Result<()> {
        let (p, tau) = (self.problem, self.tau);
        let [f, stage, g] = &mut self.work[..] else { unreachable!() };
        rhs(p, u, f, g)?;
        lincomb(stage, u, tau, f);
        axpy(u, tau / 2.0, f);
        rhs(p, stage, f, g)?;
        axpy(u, tau / 2.0, f);
        Ok(())
    }

    fn rk4(&mut self, u: &mut Fields) -> Result<()> {
        let (p, tau) = (self.problem, self.tau);
        let [f, stage, acc, g] = &mut self.work[..] else { unreachable!() };
        rhs(p, u, f, g)?;
        copy(acc, f);
        lincomb(stage, u, tau / 2.0, f);
        rhs(p, stage, f, g)?;
        axpy(acc, 2.0, f);
        lincomb(stage, u, tau / 2.0, f);
        rhs(p, stage, f, g)?;
        axpy(acc, 2.0, f);
        lincomb(stage, u, tau, f);
        rhs(p, stage, f, g)?;
        axpy(acc, 1.0, f);
        axpy(u, tau / 6.0, acc);
        Ok(())
    }

    /// Strang step of length `fraction·τ` applied in place.
    fn strang_substep(&self, u: &mut Fields, fraction: StepFraction, tmp: &mut Fields, scratch: &mut Fields) -> Result<()> {
        let h = fraction.value() * self.tau;
        self.flow(u, h / 2.0, Side::Before)?;
        exp_into(self.problem, fraction, u, tmp, scratch)?;
        std::mem::swap(u, tmp);
        self.flow(u, h / 2.0, Side::After)
    }

    fn strang(&mut self, u: &mut Fields) -> Result<()> {
        let mut work = std::mem::take(&mut self.work);
        let [tmp, scratch] = &mut work[..] else { unreachable!() };
        let r = self.strang_substep(u, ONE, tmp, scratch);
        self.work = work;
        r
    }

    fn split4(&mut self, u: &mut Fields) -> Result<()> {
        let mut work = std::mem::take(&mut self.work);
        let r = self.split4_with(u, &mut work);
        self.work = work;
        r
    }

    fn split4_with(&self, u: &mut Fields, work: &mut [Fields]) -> Result<()> {
        let tau = self.tau;
        let [coarse, tmp, scratch] = work else { unreachable!() };
        copy(coarse, u);
        self.strang_substep(coarse, ONE, tmp, scratch)?;
        if self.spec.scheme().is_three_term() {
            self.strang_substep(u, HALF, tmp, scratch)?;
            self.strang_substep(u, HALF, tmp, scratch)?;
        } else {
            // the two inner quarter flows merge into one half flow
            self.flow(u, tau / 4.0, Side::Before)?;
            exp_into(self.problem, HALF, u, tmp, scratch)?;
            std::mem::swap(u, tmp);
            self.flow(u, tau / 2.0, Side::Before)?;
            exp_into(self.problem, HALF, u, tmp, scratch)?;
            std::mem::swap(u, tmp);
            self.flow(u, tau / 4.0, Side::After)?;
        }
        for (x, y) in u.iter_mut().zip(coarse.iter()) {
            x.scale(C64::new(4.0 / 3.0, 0.0));
            x.axpy(C64::new(-1.0 / 3.0, 0.0), y);
        }
        Ok(())
    }

    fn if2(&mut self, u: &mut Fields) -> Result<()> {
        let (p, tau) = (self.problem, self.tau);
        let [g0, a, b, scratch] = &mut self.work[..] else { unreachable!() };
        copy(g0, u);
        g_inplace(p, g0)?;
        lincomb(a, u, tau, g0);
        exp_into(p, ONE, a, b, scratch)?;
        g_inplace(p, b)?;
        lincomb(a, u, tau / 2.0, g0);
        exp_into(p, ONE, a, u, scratch)?;
        axpy(u, tau / 2.0, b);
        Ok(())
    }

    fn if4(&mut self, u: &mut Fields) -> Result<()> {
        let (p, tau) = (self.problem, self.tau);
        let [acc, b, c, x, scratch] = &mut self.work[..] else { unreachable!() };
        // acc <- g(u); c <- u2
        copy(acc, u);
        g_inplace(p, acc)?;
        lincomb(b, u, tau / 2.0, acc);
        exp_into(p, HALF, b, c, scratch)?;
        // acc <- e^{τK}(u + τ/6 g(u))
        lincomb(b, u, tau / 6.0, acc);
        exp_into(p, ONE, b, acc, scratch)?;
        // c <- g(u2); b <- u3 -> g(u3)
        g_inplace(p, c)?;
        exp_into(p, HALF, u, b, scratch)?;
        axpy(b, tau / 2.0, c);
        g_inplace(p, b)?;
        exp_into(p, HALF, b, x, scratch)?;
        axpy(c, 1.0, b);
        // b <- u4 -> g(u4)
        exp_into(p, ONE, u, b, scratch)?;
        axpy(b, tau, x);
        g_inplace(p, b)?;
        exp_into(p, HALF, c, x, scratch)?;
        axpy(acc, tau / 3.0, x);
        axpy(acc, tau / 6.0, b);
        std::mem::swap(u, acc);
        Ok(())
    }

    /// Nonlinear subflow over time `t`, applied in physical space.
    fn flow(&self, u: &mut Fields, t: f64, side: Side) -> Result<()> {
        let p = self.problem;
        let params = *p.nonlinear().params();
        p.to_physical(u)?;
        match self.spec.strategy() {
            FlowStrategy::ExactCubic => u.iter_mut().for_each(|c| phi_cubic_inplace(c, t, &params)),
            FlowStrategy::NumericRk4 => phi_numeric_inplace(p.nonlinear(), u, t)?,
            FlowStrategy::ExactThreeTerm => {
                for c in u.iter_mut() {
                    if side == Side::Before {
                        phi_quintic_inplace(c, t, &params);
                        phi_cubic_inplace(c, t, &params);
                    } else {
                        phi_cubic_inplace(c, t, &params);
                        phi_quintic_inplace(c, t, &params);
                    }
                }
            }
        }
        p.to_storage(u)
    }
}

fn exp_into(p: &Problem, f: StepFraction, src: &Fields, dst: &mut Fields, scratch: &mut Fields) -> Result<()> {
    for (c, block) in p.operator().blocks().iter().enumerate() {
        block.apply_exp_into(f, &src[c], &mut dst[c], &mut scratch[c])?;
    }
    Ok(())
}

/// `buf <- g(buf)` in storage space.
fn g_inplace(p: &Problem, buf: &mut Fields) -> Result<()> {
    if p.is_spectral() {
        p.to_physical(buf)?;
        eval_g_inplace(p.nonlinear(), buf)?;
        p.to_storage(buf)
    } else {
        eval_g_inplace(p.nonlinear(), buf)
    }
}

/// `f <- K u + g(u)`, using `g` as scratch.
fn rhs(p: &Problem, u: &Fields, f: &mut Fields, g: &mut Fields) -> Result<()> {
    for (c, block) in p.operator().blocks().iter().enumerate() {
        block.apply_linear_into(&u[c], &mut f[c])?;
    }
    copy(g, u);
    g_inplace(p, g)?;
    axpy(f, 1.0, g);
    Ok(())
}

fn copy(dst: &mut Fields, src: &Fields) {
    dst.iter_mut().zip(src).for_each(|(d, s)| d.copy_from(s));
}

fn axpy(y: &mut Fields, a: f64, x: &Fields) {
    y.iter_mut().zip(x).for_each(|(y, x)| y.axpy(C64::new(a, 0.0), x));
}

/// `dst <- x + a y`
fn lincomb(dst: &mut Fields, x: &Fields, a: f64, y: &Fields) {
    copy(dst, x);
    axpy(dst, a, y);
}

/// Hook called between steps with physical-space fields.
pub trait Observer {
    /// Whether the state after `step` steps should be passed to [`observe`](Self::observe).
    fn wants(&self, step: usize) -> bool;

    fn observe(&mut self, step: usize, time: f64, fields: &[ComplexTensor]) -> Result<()>;
}

/// Observer that records nothing.
pub struct NoObserver;

impl Observer for NoObserver {
    fn wants(&self, _: usize) -> bool {
        false
    }

    fn observe(&mut self, _: usize, _: f64, _: &[ComplexTensor]) -> Result<()> {
        Ok(())
    }
}

/// Keeps physical-space copies of the state at selected step indices.
#[derive(Debug, Default)]
pub struct Recorder {
    steps: Vec<usize>,
    pub records: Vec<(usize, f64, Fields)>,
}

impl Recorder {
    pub fn new(steps: impl IntoIterator<Item = usize>) -> Self {
        let mut steps: Vec<usize> = steps.into_iter().collect();
        steps.sort_unstable();
        steps.dedup();
        Self {
            steps,
            records: Vec::new(),
        }
    }
}

impl Observer for Recorder {
    fn wants(&self, step: usize) -> bool {
        self.steps.binary_search(&step).is_ok()
    }

    fn observe(&mut self, step: usize, time: f64, fields: &[ComplexTensor]) -> Result<()> {
        self.records.push((step, time, fields.to_vec()));
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    /// Final physical-space fields.
    pub fields: Fields,
    pub time: f64,
    pub steps: usize,
    /// Wall-clock time of the stepping loop alone.
    pub elapsed: Duration,
}

/// Runs `steps` constant steps of size `t_final / steps` from physical
/// initial data. Exponentials are prepared first; preparation and observer
/// calls are excluded from `elapsed`.
pub fn integrate(
    problem: &mut Problem,
    spec: SchemeSpec,
    initial: &[ComplexTensor],
    t_final: f64,
    steps: usize,
    observer: &mut dyn Observer,
) -> Result<Outcome> {
    if steps == 0 {
        return Err(Error::InvalidArgument("step count must be at least 1".into()));
    }
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(Error::InvalidArgument(format!("final time {t_final}")));
    }
    problem.check_fields(initial)?;
    let tau = t_final / steps as f64;
    problem.prepare(&spec, tau)?;
    let problem: &Problem = problem;

    let mut state = StepperState {
        fields: initial.to_vec(),
        time: 0.0,
        tau,
        step: 0,
    };
    problem.to_storage(&mut state.fields)?;
    let mut stepper = Stepper::new(problem, spec, tau)?;

    notify(problem, observer, &state)?;
    let mut elapsed = Duration::ZERO;
    for _ in 0..steps {
        let start = Instant::now();
        stepper.step(&mut state)?;
        let finite = state.fields.iter().all(ComplexTensor::is_finite);
        elapsed += start.elapsed();
        if !finite {
            return Err(Error::Divergence { step: state.step });
        }
        notify(problem, observer, &state)?;
    }
    problem.to_physical(&mut state.fields)?;
    Ok(Outcome {
        fields: state.fields,
        time: state.time,
        steps,
        elapsed,
    })
}

fn notify(problem: &Problem, observer: &mut dyn Observer, state: &StepperState) -> Result<()> {
    if !observer.wants(state.step) {
        return Ok(());
    }
    if problem.is_spectral() {
        let mut phys = state.fields.clone();
        problem.to_physical(&mut phys)?;
        observer.observe(state.step, state.time, &phys)
    } else {
        observer.observe(state.step, state.time, &state.fields)
    }
}
