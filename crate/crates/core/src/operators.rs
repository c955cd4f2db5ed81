//! Semidiscrete linear operators `K` in Kronecker-sum (finite difference) or
//! diagonal Fourier form, with exponentials cached per step fraction.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{expm_pade, DenseMatrix};
use crate::par;
use crate::params::CglParameters;
use crate::spectral::{
    build_exp_tensor, build_symbol, pointwise_apply_into, Advection, Dft, FourierGrid, SymbolTensor,
};
use crate::tensor::{kron_sum_apply_into, tucker_apply_into, ComplexTensor};
use crate::C64;

/// A rational multiple `num/den` of the time step, kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StepFraction {
    num: u32,
    den: u32,
}

impl StepFraction {
    pub const ZERO: Self = Self { num: 0, den: 1 };
    pub const HALF: Self = Self { num: 1, den: 2 };
    pub const ONE: Self = Self { num: 1, den: 1 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidArgument("step fraction with zero denominator".into()));
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numerator(self) -> u32 {
        self.num
    }

    pub fn denominator(self) -> u32 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl Ord for StepFraction {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u64 * other.den as u64).cmp(&(other.num as u64 * self.den as u64))
    }
}

impl PartialOrd for StepFraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for StepFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

// ---------------------------------------------------------------------------
// Finite-difference matrices

const INTERIOR: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];
const DIRICHLET_FIRST: [f64; 5] = [-15.0, -4.0, 14.0, -6.0, 1.0];
const DIRICHLET_LAST: [f64; 5] = [1.0, -6.0, 14.0, -4.0, -15.0];
const NEUMANN_PENULTIMATE: [f64; 6] = [1.0, -6.0, 14.0, -4.0, -15.0, 10.0];
const NEUMANN_LAST: [f64; 5] = [1.0, -8.0 / 3.0, -6.0, 56.0, -145.0 / 3.0];

/// Boundary treatment of a finite-difference direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FdBoundary {
    /// Homogeneous Dirichlet at both ends, internal nodes only.
    Dirichlet,
    /// Dirichlet at the left end, homogeneous Neumann at the right end,
    /// whose node is part of the grid.
    DirichletNeumann,
}

impl FdBoundary {
    pub fn min_points(self) -> usize {
        match self {
            FdBoundary::Dirichlet => 6,
            FdBoundary::DirichletNeumann => 7,
        }
    }

    pub fn spacing(self, n: usize, length: f64) -> f64 {
        match self {
            FdBoundary::Dirichlet => length / (n + 1) as f64,
            FdBoundary::DirichletNeumann => length / n as f64,
        }
    }

    /// Node coordinates `a + i h`, `i = 1..=n`.
    pub fn nodes(self, n: usize, interval: (f64, f64)) -> Vec<f64> {
        let h = self.spacing(n, interval.1 - interval.0);
        (1..=n).map(|i| interval.0 + i as f64 * h).collect()
    }
}

/// Integer (or rational) stencil weights of the second-derivative matrix
/// before division by `12 h²`.
pub fn fd_stencil_weights(n: usize, boundary: FdBoundary) -> Result<DenseMatrix> {
    if n < boundary.min_points() {
        return Err(Error::InvalidArgument(format!(
            "{boundary:?} stencil needs at least {} points, got {n}",
            boundary.min_points()
        )));
    }
    let mut w = DenseMatrix::zeros(n, n);
    let mut put = |row: usize, first_col: usize, coeffs: &[f64]| {
        for (k, &c) in coeffs.iter().enumerate() {
            w[(row, first_col + k)] = C64::new(c, 0.0);
        }
    };
    put(0, 0, &DIRICHLET_FIRST);
    for i in 1..n - 1 {
        // centred band, clipped at the left edge
        if i == 1 {
            put(1, 0, &INTERIOR[1..]);
        } else if i + 2 >= n {
            put(i, i - 2, &INTERIOR[..n - i + 2]);
        } else {
            put(i, i - 2, &INTERIOR);
        }
    }
    match boundary {
        FdBoundary::Dirichlet => put(n - 1, n - 5, &DIRICHLET_LAST),
        FdBoundary::DirichletNeumann => {
            put(n - 2, n - 6, &NEUMANN_PENULTIMATE);
            put(n - 1, n - 5, &NEUMANN_LAST);
        }
    }
    Ok(w)
}

/// Fourth-order second-derivative matrix on `n` nodes of an interval of the
/// given length.
pub fn fd_second_derivative(n: usize, length: f64, boundary: FdBoundary) -> Result<DenseMatrix> {
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::InvalidArgument(format!("domain length {length}")));
    }
    let h = boundary.spacing(n, length);
    let denom = 12.0 * h * h;
    let mut d2 = fd_stencil_weights(n, boundary)?;
    d2.data_mut().iter_mut().for_each(|z| *z /= denom);
    Ok(d2)
}

/// `(α₁+iβ₁) D₂ + (α₂/d) I` for one of `dims` directions.
pub fn build_fd_direction(
    n: usize,
    length: f64,
    params: &CglParameters,
    dims: usize,
    boundary: FdBoundary,
) -> Result<DenseMatrix> {
    if dims == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let mut a = fd_second_derivative(n, length, boundary)?.scaled(C64::new(params.alpha1, params.beta1));
    let shift = params.alpha2 / dims as f64;
    for i in 0..n {
        a[(i, i)] += shift;
    }
    Ok(a)
}

pub fn build_fd_dirichlet(n: usize, length: f64, params: &CglParameters, dims: usize) -> Result<DenseMatrix> {
    build_fd_direction(n, length, params, dims, FdBoundary::Dirichlet)
}

pub fn build_fd_dirichlet_neumann(
    n: usize,
    length: f64,
    params: &CglParameters,
    dims: usize,
) -> Result<DenseMatrix> {
    build_fd_direction(n, length, params, dims, FdBoundary::DirichletNeumann)
}

// ---------------------------------------------------------------------------
// Linear operators

#[derive(Clone, Debug)]
pub enum Representation {
    KroneckerSum(Vec<DenseMatrix>),
    Fourier {
        grid: FourierGrid,
        symbol: SymbolTensor,
        dft: Arc<Dft>,
    },
}

#[derive(Clone, Debug)]
enum Exponential {
    Factors(Vec<DenseMatrix>),
    Diagonal(SymbolTensor),
}

#[derive(Clone, Debug)]
pub struct LinearOperator {
    repr: Representation,
    shape: Vec<usize>,
    tau: Option<f64>,
    cache: BTreeMap<StepFraction, Exponential>,
}

impl LinearOperator {
    pub fn kronecker_sum(mats: Vec<DenseMatrix>) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::Dimension("no direction matrices".into()));
        }
        for a in &mats {
            if !a.is_square() {
                return Err(Error::NotSquare {
                    rows: a.rows(),
                    cols: a.cols(),
                });
            }
            if !a.is_finite() {
                return Err(Error::NonFinite("direction matrix".into()));
            }
        }
        let shape = mats.iter().map(DenseMatrix::rows).collect();
        Ok(Self {
            repr: Representation::KroneckerSum(mats),
            shape,
            tau: None,
            cache: BTreeMap::new(),
        })
    }

    pub fn fourier(grid: FourierGrid, symbol: SymbolTensor) -> Result<Self> {
        if symbol.shape() != grid.shape() {
            return Err(Error::Dimension(format!(
                "symbol {:?} on grid {:?}",
                symbol.shape(),
                grid.shape()
            )));
        }
        let dft = Arc::new(Dft::new(grid.shape()));
        Ok(Self {
            shape: grid.shape().to_vec(),
            repr: Representation::Fourier { grid, symbol, dft },
            tau: None,
            cache: BTreeMap::new(),
        })
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn is_spectral(&self) -> bool {
        matches!(self.repr, Representation::Fourier { .. })
    }

    /// Step size the cache was built for.
    pub fn prepared_tau(&self) -> Option<f64> {
        self.tau
    }

    pub fn prepared_fractions(&self) -> Vec<StepFraction> {
        self.cache.keys().copied().collect()
    }

    /// Replaces the cache with `e^{f τ K}` for each listed fraction `f`.
    pub fn prepare(&mut self, tau: f64, fractions: &[StepFraction]) -> Result<()> {
        if !tau.is_finite() {
            return Err(Error::NonFinite(format!("step size {tau}")));
        }
        let wanted: Vec<StepFraction> = {
            let mut f: Vec<_> = fractions.iter().copied().filter(|f| !f.is_zero()).collect();
            f.sort();
            f.dedup();
            f
        };
        self.cache.clear();
        match &self.repr {
            Representation::KroneckerSum(mats) => {
                // identical direction matrices share one exponential
                let mut jobs: Vec<(StepFraction, usize)> = Vec::new();
                let mut owner = vec![0usize; mats.len()];
                for (mu, a) in mats.iter().enumerate() {
                    owner[mu] = (0..mu).find(|&nu| mats[nu] == *a).unwrap_or(mu);
                }
                for &f in &wanted {
                    for (mu, &o) in owner.iter().enumerate() {
                        if o == mu {
                            jobs.push((f, mu));
                        }
                    }
                }
                let results = par::map_collect(&jobs, |&(f, mu)| expm_pade(&mats[mu], f.value() * tau));
                let mut computed = BTreeMap::new();
                for (job, r) in jobs.iter().zip(results) {
                    computed.insert(*job, r?);
                }
                for &f in &wanted {
                    let factors = owner.iter().map(|&o| computed[&(f, o)].clone()).collect();
                    self.cache.insert(f, Exponential::Factors(factors));
                }
            }
            Representation::Fourier { symbol, .. } => {
                for &f in &wanted {
                    self.cache
                        .insert(f, Exponential::Diagonal(build_exp_tensor(symbol, f.value() * tau)));
                }
            }
        }
        self.tau = Some(tau);
        Ok(())
    }

    pub fn apply_linear(&self, u: &ComplexTensor) -> Result<ComplexTensor> {
        let mut out = ComplexTensor::zeros(u.shape());
        self.apply_linear_into(u, &mut out)?;
        Ok(out)
    }

    /// `out = K u`. For the Fourier form `u` holds coefficients.
    pub fn apply_linear_into(&self, u: &ComplexTensor, out: &mut ComplexTensor) -> Result<()> {
        self.check_shape(u)?;
        match &self.repr {
            Representation::KroneckerSum(mats) => kron_sum_apply_into(u, mats, out),
            Representation::Fourier { symbol, .. } => pointwise_apply_into(symbol, u, out),
        }
    }

    pub fn apply_exp(&self, fraction: StepFraction, u: &ComplexTensor) -> Result<ComplexTensor> {
        let mut out = ComplexTensor::zeros(u.shape());
        let mut scratch = ComplexTensor::zeros(u.shape());
        self.apply_exp_into(fraction, u, &mut out, &mut scratch)?;
        Ok(out)
    }

    /// `out = e^{f τ K} u` from the cache. `scratch` must match `u` in shape.
    pub fn apply_exp_into(
        &self,
        fraction: StepFraction,
        u: &ComplexTensor,
        out: &mut ComplexTensor,
        scratch: &mut ComplexTensor,
    ) -> Result<()> {
        self.check_shape(u)?;
        if fraction.is_zero() {
            if out.shape() != u.shape() {
                return Err(Error::Dimension("output shape".into()));
            }
            out.copy_from(u);
            return Ok(());
        }
        match self.cache.get(&fraction) {
            Some(Exponential::Factors(f)) => tucker_apply_into(u, f, out, scratch),
            Some(Exponential::Diagonal(e)) => pointwise_apply_into(e, u, out),
            None => Err(Error::MissingExponential(fraction)),
        }
    }

    /// Maps a state from physical values to the representation's storage
    /// space (Fourier coefficients for the spectral form).
    pub fn from_physical(&self, u: &mut ComplexTensor) -> Result<()> {
        match &self.repr {
            Representation::KroneckerSum(_) => self.check_shape(u),
            Representation::Fourier { dft, .. } => dft.forward_inplace(u),
        }
    }

    pub fn to_physical(&self, u: &mut ComplexTensor) -> Result<()> {
        match &self.repr {
            Representation::KroneckerSum(_) => self.check_shape(u),
            Representation::Fourier { dft, .. } => dft.inverse_inplace(u),
        }
    }

    fn check_shape(&self, u: &ComplexTensor) -> Result<()> {
        if u.shape() != self.shape.as_slice() {
            return Err(Error::Dimension(format!(
                "operator on {:?} applied to {:?}",
                self.shape,
                u.shape()
            )));
        }
        Ok(())
    }
}

/// Periodic pseudospectral operator with an optional first-direction
/// advection term.
pub fn build_periodic_operator(
    grid: FourierGrid,
    params: &CglParameters,
    advection: Advection,
) -> Result<LinearOperator> {
    params.validate()?;
    let symbol = build_symbol(&grid, params, advection);
    LinearOperator::fourier(grid, symbol)
}

/// Finite-difference Kronecker-sum operator with the same boundary kind in
/// every direction.
pub fn build_fd_operator(
    extents: &[usize],
    intervals: &[(f64, f64)],
    params: &CglParameters,
    boundary: FdBoundary,
) -> Result<LinearOperator> {
    params.validate()?;
    if extents.is_empty() || extents.len() != intervals.len() {
        return Err(Error::Dimension(format!(
            "{} extents and {} intervals",
            extents.len(),
            intervals.len()
        )));
    }
    let d = extents.len();
    let mats = extents
        .iter()
        .zip(intervals)
        .map(|(&n, &(a, b))| build_fd_direction(n, b - a, params, d, boundary))
        .collect::<Result<Vec<_>>>()?;
    LinearOperator::kronecker_sum(mats)
}

/// Block-diagonal operator acting independently on each component.
#[derive(Clone, Debug)]
pub struct BlockOperator {
    blocks: Vec<LinearOperator>,
}

impl BlockOperator {
    pub fn new(blocks: Vec<LinearOperator>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Dimension("block operator without blocks".into()));
        }
        Ok(Self { blocks })
    }

    pub fn single(op: LinearOperator) -> Self {
        Self { blocks: vec![op] }
    }

    pub fn blocks(&self) -> &[LinearOperator] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &LinearOperator {
        &self.blocks[i]
    }

    pub fn components(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_spectral(&self) -> bool {
        self.blocks[0].is_spectral()
    }

    pub fn prepare(&mut self, tau: f64, fractions: &[StepFraction]) -> Result<()> {
        self.blocks.iter_mut().try_for_each(|b| b.prepare(tau, fractions))
    }

    pub fn apply_exp(&self, fraction: StepFraction, fields: &[ComplexTensor]) -> Result<Vec<ComplexTensor>> {
        self.check_count(fields)?;
        self.blocks
            .iter()
            .zip(fields)
            .map(|(b, u)| b.apply_exp(fraction, u))
            .collect()
    }

    pub fn apply_linear(&self, fields: &[ComplexTensor]) -> Result<Vec<ComplexTensor>> {
        self.check_count(fields)?;
        self.blocks.iter().zip(fields).map(|(b, u)| b.apply_linear(u)).collect()
    }

    fn check_count(&self, fields: &[ComplexTensor]) -> Result<()> {
        if fields.len() != self.blocks.len() {
            return Err(Error::Dimension(format!(
                "{} fields for {} blocks",
                fields.len(),
                self.blocks.len()
            )));
        }
        Ok(())
    }
}
