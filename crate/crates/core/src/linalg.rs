//! Shared numeric kernels: a row-major 2-D grid, frequency-domain circular
//! convolution, the forward-difference gradient with its divergence, and a
//! dense SVD wrapper.
//!
//! Gradient fields are stored as two stacked planes of the image's shape:
//! horizontal differences first, then vertical differences. Both planes use
//! replicate-edge boundaries, so the last column of the horizontal plane and
//! the last row of the vertical plane are always zero.

use std::sync::Arc;

use nalgebra::DMatrix;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_len, Error, Result};

/// Row-major 2-D array of reals, used for both images and matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Grid {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!(
                "grid shape {rows}x{cols} is empty"
            )));
        }
        check_len(rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        assert!(rows > 0 && cols > 0, "grid shape must be non-empty");
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(rows > 0 && cols > 0, "grid shape must be non-empty");
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Square matrix with `diag` on the diagonal.
    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |r, c| if r == c { diag[r] } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// A grid of the same shape holding `data`.
    pub fn with_data(&self, data: Vec<f64>) -> Result<Self> {
        Self::new(self.rows, self.cols, data)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Population variance (1/n normalisation).
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.data.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.data.len() as f64
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

/// A linear map between flat vectors together with its adjoint.
pub trait LinearOperator: Send + Sync {
    fn input_len(&self) -> usize;
    fn output_len(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
    fn apply_adjoint(&self, y: &[f64]) -> Vec<f64>;
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Circular 2-D convolution `x ↦ k ⊛ x` applied through its transfer function.
///
/// The kernel's centre tap is `(kh / 2, kw / 2)`; a delta kernel at the centre
/// is the identity.
#[derive(Clone)]
pub struct CircularConvolution {
    rows: usize,
    cols: usize,
    transfer: Vec<Complex<f64>>,
    row_fft: Arc<dyn Fft<f64>>,
    row_ifft: Arc<dyn Fft<f64>>,
    col_fft: Arc<dyn Fft<f64>>,
    col_ifft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CircularConvolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CircularConvolution")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .finish()
    }
}

impl CircularConvolution {
    pub fn new(kernel: &Grid, rows: usize, cols: usize) -> Result<Self> {
        if kernel.rows() > rows || kernel.cols() > cols {
            return Err(Error::InvalidParameter(format!(
                "kernel {}x{} does not fit in image {rows}x{cols}",
                kernel.rows(),
                kernel.cols()
            )));
        }
        let mut planner = FftPlanner::new();
        let row_fft = planner.plan_fft_forward(cols);
        let row_ifft = planner.plan_fft_inverse(cols);
        let col_fft = planner.plan_fft_forward(rows);
        let col_ifft = planner.plan_fft_inverse(rows);

        let (cr, cc) = (kernel.rows() / 2, kernel.cols() / 2);
        let mut embedded = vec![Complex::new(0.0, 0.0); rows * cols];
        for i in 0..kernel.rows() {
            for j in 0..kernel.cols() {
                let r = (i + rows - cr) % rows;
                let c = (j + cols - cc) % cols;
                embedded[r * cols + c].re += kernel.get(i, j);
            }
        }
        let mut op = Self {
            rows,
            cols,
            transfer: Vec::new(),
            row_fft,
            row_ifft,
            col_fft,
            col_ifft,
        };
        op.fft2(&mut embedded, false);
        op.transfer = embedded;
        Ok(op)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    fn fft2(&self, buf: &mut [Complex<f64>], inverse: bool) {
        let (rows, cols) = (self.rows, self.cols);
        let (rf, cf) = if inverse {
            (&self.row_ifft, &self.col_ifft)
        } else {
            (&self.row_fft, &self.col_fft)
        };
        rf.process(buf);
        let mut t = vec![Complex::new(0.0, 0.0); rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                t[c * rows + r] = buf[r * cols + c];
            }
        }
        cf.process(&mut t);
        for r in 0..rows {
            for c in 0..cols {
                buf[r * cols + c] = t[c * rows + r];
            }
        }
    }

    fn filter(&self, x: &[f64], conjugate: bool) -> Vec<f64> {
        assert_eq!(
            x.len(),
            self.rows * self.cols,
            "convolution input has wrong length"
        );
        let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.fft2(&mut buf, false);
        for (b, k) in buf.iter_mut().zip(&self.transfer) {
            *b *= if conjugate { k.conj() } else { *k };
        }
        self.fft2(&mut buf, true);
        let scale = 1.0 / (self.rows * self.cols) as f64;
        buf.iter().map(|b| b.re * scale).collect()
    }
}

impl LinearOperator for CircularConvolution {
    fn input_len(&self) -> usize {
        self.rows * self.cols
    }

    fn output_len(&self) -> usize {
        self.rows * self.cols
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.filter(x, false)
    }

    fn apply_adjoint(&self, y: &[f64]) -> Vec<f64> {
        self.filter(y, true)
    }
}

/// Uniform (box) blur kernel of odd or even size, summing to one.
pub fn uniform_kernel(size: usize) -> Grid {
    Grid::filled(size, size, 1.0 / (size * size) as f64)
}

/// Forward-difference gradient on a fixed image shape.
#[derive(Clone, Copy, Debug)]
pub struct DiscreteGradient {
    rows: usize,
    cols: usize,
}

impl DiscreteGradient {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(Error::InvalidParameter(format!(
                "gradient needs an image of at least 2x2, got {rows}x{cols}"
            )));
        }
        Ok(Self { rows, cols })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Horizontal plane followed by vertical plane, `2 * rows * cols` values.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; 2 * x.len()];
        self.gradient_into(x, &mut out);
        out
    }

    pub fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        let (rows, cols) = (self.rows, self.cols);
        let n = rows * cols;
        debug_assert_eq!(x.len(), n);
        let (h, v) = out.split_at_mut(n);
        for r in 0..rows {
            let row = r * cols;
            for c in 0..cols - 1 {
                h[row + c] = x[row + c + 1] - x[row + c];
            }
            h[row + cols - 1] = 0.0;
        }
        for r in 0..rows - 1 {
            let row = r * cols;
            for c in 0..cols {
                v[row + c] = x[row + cols + c] - x[row + c];
            }
        }
        v[(rows - 1) * cols..].fill(0.0);
    }

    /// Divergence, the negative adjoint of [`Self::gradient`].
    pub fn divergence(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; p.len() / 2];
        self.divergence_into(p, &mut out);
        out
    }

    pub fn divergence_into(&self, p: &[f64], out: &mut [f64]) {
        let (rows, cols) = (self.rows, self.cols);
        let n = rows * cols;
        debug_assert_eq!(p.len(), 2 * n);
        let (h, v) = p.split_at(n);
        for r in 0..rows {
            let row = r * cols;
            out[row] = h[row];
            for c in 1..cols - 1 {
                out[row + c] = h[row + c] - h[row + c - 1];
            }
            out[row + cols - 1] = -h[row + cols - 2];
        }
        for c in 0..cols {
            out[c] += v[c];
        }
        for r in 1..rows - 1 {
            let row = r * cols;
            for c in 0..cols {
                out[row + c] += v[row + c] - v[row - cols + c];
            }
        }
        let last = (rows - 1) * cols;
        for c in 0..cols {
            out[last + c] -= v[last - cols + c];
        }
    }

    /// Anisotropic total variation `‖∇x‖₁`.
    pub fn total_variation(&self, x: &[f64]) -> f64 {
        let (rows, cols) = (self.rows, self.cols);
        let mut tv = 0.0;
        for r in 0..rows {
            let row = r * cols;
            for c in 0..cols {
                if c + 1 < cols {
                    tv += (x[row + c + 1] - x[row + c]).abs();
                }
                if r + 1 < rows {
                    tv += (x[row + cols + c] - x[row + c]).abs();
                }
            }
        }
        tv
    }
}

impl LinearOperator for DiscreteGradient {
    fn input_len(&self) -> usize {
        self.rows * self.cols
    }

    fn output_len(&self) -> usize {
        2 * self.rows * self.cols
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.gradient(x)
    }

    fn apply_adjoint(&self, y: &[f64]) -> Vec<f64> {
        self.divergence(y).into_iter().map(|v| -v).collect()
    }
}

/// Thin singular value decomposition `x = U diag(s) Vᵀ` with `s` sorted in
/// non-increasing order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<f64>,
}

impl Svd {
    /// `U diag(s') Vᵀ` for a replacement spectrum `s'`.
    pub fn recompose(&self, spectrum: &[f64]) -> Grid {
        let mut us = self.u.clone();
        for (j, &s) in spectrum.iter().enumerate() {
            us.column_mut(j).scale_mut(s);
        }
        Grid::from_dmatrix(&(us * self.v.transpose()))
    }
}

const SVD_MAX_ITERS: usize = 10_000;

pub fn svd(x: &Grid) -> Result<Svd> {
    check_finite(x)?;
    let m = x.to_dmatrix();
    let dec = nalgebra::SVD::try_new(m, true, true, f64::EPSILON, SVD_MAX_ITERS)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let (Some(u), Some(vt)) = (dec.u, dec.v_t) else {
        return Err(Error::Numerical("SVD returned no singular vectors".into()));
    };
    let s = dec.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let k = order.len();
    let mut us = DMatrix::zeros(u.nrows(), k);
    let mut vs = DMatrix::zeros(vt.ncols(), k);
    let mut sv = Vec::with_capacity(k);
    for (j, &i) in order.iter().enumerate() {
        us.set_column(j, &u.column(i));
        vs.set_column(j, &vt.row(i).transpose());
        sv.push(s[i]);
    }
    Ok(Svd {
        u: us,
        singular_values: sv,
        v: vs,
    })
}

/// Singular values only, non-increasing.
pub fn singular_values(x: &Grid) -> Result<Vec<f64>> {
    check_finite(x)?;
    let dec = nalgebra::SVD::try_new(x.to_dmatrix(), false, false, f64::EPSILON, SVD_MAX_ITERS)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let mut s: Vec<f64> = dec.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

pub fn nuclear_norm(x: &Grid) -> Result<f64> {
    Ok(singular_values(x)?.iter().sum())
}

fn check_finite(x: &Grid) -> Result<()> {
    if x.as_slice().iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numerical("matrix has non-finite entries".into()))
    }
}
