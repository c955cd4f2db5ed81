//! Order-d complex tensors in column-major (first index fastest) layout and
//! the μ-mode machinery built on top of them.
//!
//! Directions are numbered from 0. For direction `mu` the data splits into
//! `right` contiguous slabs of `n_mu` columns, each column holding `left`
//! consecutive entries, where `left` and `right` are the products of the
//! extents before and after `mu`.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::par;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Largest `N` for which the explicit Kronecker oracles will assemble a
/// dense `N x N` matrix.
pub const DEFAULT_ORACLE_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexTensor {
    shape: Vec<usize>,
    data: Vec<C64>,
}

impl ComplexTensor {
    pub fn new(shape: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        check_shape(&shape)?;
        let len: usize = shape.iter().product();
        if data.len() != len {
            return Err(Error::Dimension(format!(
                "{} entries for shape {shape:?}",
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        check_shape(shape).expect("invalid tensor shape");
        Self {
            shape: shape.to_vec(),
            data: vec![ZERO; shape.iter().product()],
        }
    }

    /// Fills the tensor from a function of the multi-index.
    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> C64) -> Self {
        let mut t = Self::zeros(shape);
        let mut idx = vec![0; shape.len()];
        for z in t.data.iter_mut() {
            *z = f(&idx);
            for (i, &n) in idx.iter_mut().zip(shape) {
                *i += 1;
                if *i < n {
                    break;
                }
                *i = 0;
            }
        }
        t
    }

    /// Reshapes a stacked vector into a tensor (inverse of [`Self::vec`]).
    pub fn unvec(shape: &[usize], v: Vec<C64>) -> Result<Self> {
        Self::new(shape.to_vec(), v)
    }

    /// Stacked-column view of the tensor.
    pub fn vec(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn linear_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        let mut lin = 0;
        let mut stride = 1;
        for (&i, &n) in idx.iter().zip(&self.shape) {
            debug_assert!(i < n);
            lin += i * stride;
            stride *= n;
        }
        lin
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        self.data[self.linear_index(idx)]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn fill(&mut self, value: C64) {
        self.data.fill(value);
    }

    pub fn copy_from(&mut self, other: &ComplexTensor) {
        assert_eq!(self.shape, other.shape, "copy between different shapes");
        self.data.copy_from_slice(&other.data);
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: C64, x: &ComplexTensor) {
        assert_eq!(self.shape, x.shape, "axpy between different shapes");
        par::for_each_chunk_mut(&mut self.data, CHUNK, |c, y| {
            let x = &x.data[c * CHUNK..c * CHUNK + y.len()];
            crate::linalg::axpy(a, x, y);
        });
    }

    pub fn scale(&mut self, a: C64) {
        self.data.iter_mut().for_each(|z| *z *= a);
    }

    /// `(left, n_mu, right)` for direction `mu`.
    pub fn mode_layout(&self, mu: usize) -> (usize, usize, usize) {
        let left = self.shape[..mu].iter().product();
        let right = self.shape[mu + 1..].iter().product();
        (left, self.shape[mu], right)
    }
}

const CHUNK: usize = 4096;

fn check_shape(shape: &[usize]) -> Result<()> {
    if shape.is_empty() || shape.contains(&0) {
        return Err(Error::Dimension(format!(
            "tensor shape must have positive extents, got {shape:?}"
        )));
    }
    Ok(())
}

fn check_mode(u: &ComplexTensor, a: &DenseMatrix, mu: usize) -> Result<()> {
    if mu >= u.order() {
        return Err(Error::Dimension(format!(
            "direction {mu} for a tensor of order {}",
            u.order()
        )));
    }
    if !a.is_square() || a.rows() != u.shape[mu] {
        return Err(Error::Dimension(format!(
            "{}x{} matrix in direction {mu} of extent {}",
            a.rows(),
            a.cols(),
            u.shape[mu]
        )));
    }
    Ok(())
}

fn check_mats(u: &ComplexTensor, mats: &[DenseMatrix]) -> Result<()> {
    if mats.len() != u.order() {
        return Err(Error::Dimension(format!(
            "{} matrices for a tensor of order {}",
            mats.len(),
            u.order()
        )));
    }
    for (mu, a) in mats.iter().enumerate() {
        check_mode(u, a, mu)?;
    }
    Ok(())
}

/// Multiplies `a` onto every mode-`mu` fiber of `u`, writing (or adding,
/// with `accumulate`) into `out`.
fn mode_product_kernel(
    u: &[C64],
    shape: &[usize],
    a: &DenseMatrix,
    mu: usize,
    out: &mut [C64],
    accumulate: bool,
) {
    let left: usize = shape[..mu].iter().product();
    let n = shape[mu];
    if left == 1 {
        // fibers are the contiguous columns of an n x right matrix
        par::for_each_chunk_mut(out, n, |r, col| {
            if !accumulate {
                col.fill(ZERO);
            }
            let src = &u[r * n..(r + 1) * n];
            for (j, &x) in src.iter().enumerate() {
                if x == ZERO {
                    continue;
                }
                for (c, &aij) in col.iter_mut().zip(a.column(j)) {
                    *c += aij * x;
                }
            }
        });
    } else {
        // output column i of slab r is Σ_j a[i, j] * (input column j of slab r)
        par::for_each_chunk_mut(out, left, |c, dst| {
            let (r, i) = (c / n, c % n);
            if !accumulate {
                dst.fill(ZERO);
            }
            let base = r * left * n;
            for j in 0..n {
                let aij = a[(i, j)];
                if aij == ZERO {
                    continue;
                }
                let src = &u[base + j * left..base + (j + 1) * left];
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d += aij * s;
                }
            }
        });
    }
}

/// `U ×_mu A`: replaces each mode-`mu` fiber `f` of `u` by `A f`.
pub fn mu_mode_product(u: &ComplexTensor, a: &DenseMatrix, mu: usize) -> Result<ComplexTensor> {
    let mut out = ComplexTensor::zeros(&u.shape);
    mu_mode_product_into(u, a, mu, &mut out)?;
    Ok(out)
}

pub fn mu_mode_product_into(
    u: &ComplexTensor,
    a: &DenseMatrix,
    mu: usize,
    out: &mut ComplexTensor,
) -> Result<()> {
    check_mode(u, a, mu)?;
    check_same_shape(u, out)?;
    mode_product_kernel(&u.data, &u.shape, a, mu, &mut out.data, false);
    Ok(())
}

fn check_same_shape(a: &ComplexTensor, b: &ComplexTensor) -> Result<()> {
    if a.shape != b.shape {
        return Err(Error::Dimension(format!(
            "shapes {:?} and {:?} differ",
            a.shape, b.shape
        )));
    }
    Ok(())
}

/// Tucker operator `U ×_1 M_1 ×_2 ⋯ ×_d M_d`.
pub fn tucker_apply(u: &ComplexTensor, mats: &[DenseMatrix]) -> Result<ComplexTensor> {
    let mut out = ComplexTensor::zeros(&u.shape);
    let mut scratch = ComplexTensor::zeros(&u.shape);
    tucker_apply_into(u, mats, &mut out, &mut scratch)?;
    Ok(out)
}

/// Allocation-free Tucker operator; `scratch` must have the shape of `u`.
/// Identity factors are skipped.
pub fn tucker_apply_into(
    u: &ComplexTensor,
    mats: &[DenseMatrix],
    out: &mut ComplexTensor,
    scratch: &mut ComplexTensor,
) -> Result<()> {
    check_mats(u, mats)?;
    check_same_shape(u, out)?;
    check_same_shape(u, scratch)?;
    let active: Vec<usize> = (0..mats.len()).filter(|&mu| !mats[mu].is_identity()).collect();
    let Some((&first, rest)) = active.split_first() else {
        out.data.copy_from_slice(&u.data);
        return Ok(());
    };
    // ping-pong between the buffers so the last product lands in `out`
    let (mut cur, mut next) = if active.len() % 2 == 1 {
        (out, scratch)
    } else {
        (scratch, out)
    };
    mode_product_kernel(&u.data, &u.shape, &mats[first], first, &mut cur.data, false);
    for &mu in rest {
        mode_product_kernel(&cur.data, &u.shape, &mats[mu], mu, &mut next.data, false);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(())
}

/// Action of the Kronecker sum `A_d ⊕ ⋯ ⊕ A_1` on `vec(U)`, computed as
/// `Σ_μ U ×_μ A_μ`.
pub fn kron_sum_apply(u: &ComplexTensor, mats: &[DenseMatrix]) -> Result<ComplexTensor> {
    let mut out = ComplexTensor::zeros(&u.shape);
    kron_sum_apply_into(u, mats, &mut out)?;
    Ok(out)
}

pub fn kron_sum_apply_into(
    u: &ComplexTensor,
    mats: &[DenseMatrix],
    out: &mut ComplexTensor,
) -> Result<()> {
    check_mats(u, mats)?;
    check_same_shape(u, out)?;
    out.fill(ZERO);
    for (mu, a) in mats.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        mode_product_kernel(&u.data, &u.shape, a, mu, &mut out.data, true);
    }
    Ok(())
}

fn oracle_size(mats: &[DenseMatrix], cap: usize) -> Result<usize> {
    if mats.is_empty() {
        return Err(Error::Dimension("no direction matrices".into()));
    }
    let mut size = 1usize;
    for a in mats {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        size = size.saturating_mul(a.rows());
    }
    if size > cap {
        return Err(Error::OracleCap { size, cap });
    }
    Ok(size)
}

/// Explicit `M_d ⊗ ⋯ ⊗ M_1`. Only meant for checking the tensor kernels on
/// small grids.
pub fn assemble_kron_product(mats: &[DenseMatrix], cap: usize) -> Result<DenseMatrix> {
    oracle_size(mats, cap)?;
    let mut acc = mats[0].clone();
    for m in &mats[1..] {
        acc = m.kron(&acc);
    }
    Ok(acc)
}

/// Explicit Kronecker sum `A_d ⊕ ⋯ ⊕ A_1 = Σ_μ I ⊗ ⋯ ⊗ A_μ ⊗ ⋯ ⊗ I`.
/// Only meant for checking the tensor kernels on small grids.
pub fn assemble_kron_sum(mats: &[DenseMatrix], cap: usize) -> Result<DenseMatrix> {
    let size = oracle_size(mats, cap)?;
    let mut sum = DenseMatrix::zeros(size, size);
    for mu in 0..mats.len() {
        let factors: Vec<DenseMatrix> = mats
            .iter()
            .enumerate()
            .map(|(nu, a)| {
                if nu == mu {
                    a.clone()
                } else {
                    DenseMatrix::identity(a.rows())
                }
            })
            .collect();
        sum.axpy(C64::new(1.0, 0.0), &assemble_kron_product(&factors, cap)?)?;
    }
    Ok(sum)
}
