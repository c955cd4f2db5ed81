//! Small dense complex matrices and the matrix exponential.
//!
//! Storage is column-major. The per-direction matrices handled here are at
//! most a few hundred rows, so the kernels are straightforward loops ordered
//! for contiguous inner access.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::par;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a real matrix from row slices; handy for hand-written cases.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0)))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn column(&self, j: usize) -> &[C64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.cols).all(|j| {
                self.column(j)
                    .iter()
                    .enumerate()
                    .all(|(i, &z)| z == if i == j { ONE } else { ZERO })
            })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&z| z == ZERO)
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| self.column(j).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: C64, x: &DenseMatrix) -> Result<()> {
        if (self.rows, self.cols) != (x.rows, x.cols) {
            return Err(Error::Dimension(format!(
                "axpy of {}x{} into {}x{}",
                x.rows, x.cols, self.rows, self.cols
            )));
        }
        axpy(a, &x.data, &mut self.data);
        Ok(())
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        if self.rows == 0 {
            return Ok(out);
        }
        let rows = self.rows;
        par::for_each_chunk_mut(&mut out.data, rows, |j, col| {
            for (k, &b) in other.column(j).iter().enumerate() {
                if b == ZERO {
                    continue;
                }
                for (c, &a) in col.iter_mut().zip(self.column(k)) {
                    *c += a * b;
                }
            }
        });
        Ok(out)
    }

    pub fn matvec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if self.cols != x.len() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let mut y = vec![ZERO; self.rows];
        for (j, &xj) in x.iter().enumerate() {
            for (yi, &a) in y.iter_mut().zip(self.column(j)) {
                *yi += a * xj;
            }
        }
        Ok(y)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &DenseMatrix) -> DenseMatrix {
        let (p, q) = (other.rows, other.cols);
        Self::from_fn(self.rows * p, self.cols * q, |i, j| {
            self[(i / p, j / q)] * other[(i % p, j % q)]
        })
    }

    /// Solves `self * X = rhs` by LU factorization with partial pivoting.
    pub fn solve(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if rhs.rows != self.rows {
            return Err(Error::Dimension(format!(
                "right-hand side has {} rows, expected {}",
                rhs.rows, self.rows
            )));
        }
        let n = self.rows;
        let mut lu = self.clone();
        let mut x = rhs.clone();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            if pmax == 0.0 {
                return Err(Error::InvalidArgument("singular matrix".into()));
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(j * n + k, j * n + p);
                }
                for j in 0..x.cols {
                    x.data.swap(j * n + k, j * n + p);
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                lu[(i, k)] /= pivot;
            }
            for j in k + 1..n {
                let ukj = lu[(k, j)];
                if ukj == ZERO {
                    continue;
                }
                for i in k + 1..n {
                    let lik = lu[(i, k)];
                    lu[(i, j)] -= lik * ukj;
                }
            }
        }
        let rows = n;
        par::for_each_chunk_mut(&mut x.data, rows, |_, col| {
            for k in 0..n {
                let v = col[k];
                if v == ZERO {
                    continue;
                }
                for i in k + 1..n {
                    col[i] -= lu[(i, k)] * v;
                }
            }
            for k in (0..n).rev() {
                col[k] /= lu[(k, k)];
                let v = col[k];
                for i in 0..k {
                    col[i] -= lu[(i, k)] * v;
                }
            }
        });
        Ok(x)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

/// `y += a * x` on raw slices of equal length.
pub fn axpy(a: C64, x: &[C64], y: &mut [C64]) {
    assert_eq!(x.len(), y.len(), "axpy length mismatch");
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn check_expm_input(a: &DenseMatrix, tau: f64) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    if !tau.is_finite() {
        return Err(Error::NonFinite(format!("scale factor {tau}")));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix entries".into()));
    }
    Ok(())
}

// Padé degree thresholds on the 1-norm and coefficient tables for degrees
// 3, 5, 7, 9 and 13 (scaling-and-squaring, Higham 2005).
#[allow(clippy::excessive_precision)]
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152e0;

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE_9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Computes `e^{τA}` by Padé approximation with scaling and squaring.
pub fn expm_pade(a: &DenseMatrix, tau: f64) -> Result<DenseMatrix> {
    check_expm_input(a, tau)?;
    let n = a.rows;
    let x = a.scaled(real(tau));
    let norm = x.norm1();
    if norm == 0.0 {
        return Ok(DenseMatrix::identity(n));
    }
    for &(degree, theta) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match degree {
                3 => &PADE_3,
                5 => &PADE_5,
                7 => &PADE_7,
                _ => &PADE_9,
            };
            return pade_low(&x, coeffs);
        }
    }
    let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
    let scaled = x.scaled(real(0.5f64.powi(s)));
    let mut r = pade_13(&scaled)?;
    for _ in 0..s {
        r = r.matmul(&r)?;
    }
    Ok(r)
}

/// Degree 3–9 Padé: `U = A Σ b_{2k+1} A^{2k}`, `V = Σ b_{2k} A^{2k}`.
fn pade_low(a: &DenseMatrix, b: &[f64]) -> Result<DenseMatrix> {
    let n = a.rows;
    let a2 = a.matmul(a)?;
    let mut u = DenseMatrix::identity(n).scaled(real(b[1]));
    let mut v = DenseMatrix::identity(n).scaled(real(b[0]));
    let mut power = DenseMatrix::identity(n);
    for k in 1..b.len() / 2 {
        power = power.matmul(&a2)?;
        u.axpy(real(b[2 * k + 1]), &power)?;
        v.axpy(real(b[2 * k]), &power)?;
    }
    let u = a.matmul(&u)?;
    pade_solve(&u, &v)
}

fn pade_13(a: &DenseMatrix) -> Result<DenseMatrix> {
    let b = &PADE_13;
    let n = a.rows;
    let id = DenseMatrix::identity(n);
    let a2 = a.matmul(a)?;
    let a4 = a2.matmul(&a2)?;
    let a6 = a4.matmul(&a2)?;

    let mut inner = a6.scaled(real(b[13]));
    inner.axpy(real(b[11]), &a4)?;
    inner.axpy(real(b[9]), &a2)?;
    let mut u = a6.matmul(&inner)?;
    u.axpy(real(b[7]), &a6)?;
    u.axpy(real(b[5]), &a4)?;
    u.axpy(real(b[3]), &a2)?;
    u.axpy(real(b[1]), &id)?;
    let u = a.matmul(&u)?;

    let mut inner = a6.scaled(real(b[12]));
    inner.axpy(real(b[10]), &a4)?;
    inner.axpy(real(b[8]), &a2)?;
    let mut v = a6.matmul(&inner)?;
    v.axpy(real(b[6]), &a6)?;
    v.axpy(real(b[4]), &a4)?;
    v.axpy(real(b[2]), &a2)?;
    v.axpy(real(b[0]), &id)?;

    pade_solve(&u, &v)
}

/// Solves `(V - U) R = V + U`.
fn pade_solve(u: &DenseMatrix, v: &DenseMatrix) -> Result<DenseMatrix> {
    let mut p = v.clone();
    p.axpy(ONE, u)?;
    let mut q = v.clone();
    q.axpy(-ONE, u)?;
    q.solve(&p)
}

/// Truncated Taylor series for `e^{τA}` with scaling and squaring.
///
/// Slower than [`expm_pade`]; kept as an independent reference.
pub fn expm_taylor(a: &DenseMatrix, tau: f64) -> Result<DenseMatrix> {
    check_expm_input(a, tau)?;
    let n = a.rows;
    let x = a.scaled(real(tau));
    let norm = x.norm1();
    let s = if norm > 1.0 {
        norm.log2().ceil() as i32
    } else {
        0
    };
    let x = x.scaled(real(0.5f64.powi(s)));
    let mut sum = DenseMatrix::identity(n);
    let mut term = DenseMatrix::identity(n);
    for k in 1..60 {
        term = term.matmul(&x)?.scaled(real(1.0 / k as f64));
        if term.is_zero() {
            break;
        }
        sum.axpy(ONE, &term)?;
        // ‖x‖ ≤ 1 bounds the tail by e·‖term‖
        if term.norm1() < 1e-20 * sum.norm1() {
            break;
        }
    }
    for _ in 0..s {
        sum = sum.matmul(&sum)?;
    }
    Ok(sum)
}
