//! Periodic cubic grid, complex fields, spectral calculus and norms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GpeError, Result};
use crate::fft;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Coordinate axis of the cubic grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// Axis numbered 1, 2, 3.
    pub fn from_number(k: usize) -> Option<Axis> {
        match k {
            1 => Some(Axis::X),
            2 => Some(Axis::Y),
            3 => Some(Axis::Z),
            _ => None,
        }
    }
}

/// Uniform periodic grid on `[-L, L)^3` with `n` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    extent: f64,
}

impl GridSpec {
    pub fn new(n: usize, extent: f64) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(GpeError::InvalidGrid(format!(
                "points per axis must be a positive even integer, got {n}"
            )));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(GpeError::InvalidGrid(format!(
                "half-width must be positive and finite, got {extent}"
            )));
        }
        Ok(GridSpec { n, extent })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Half-width `L` of the box.
    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, j: usize) -> f64 {
        -self.extent + j as f64 * self.spacing()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.coord(j)).collect()
    }

    /// Wavenumber of FFT bin `m` (standard FFT ordering).
    pub fn wavenumber(&self, m: usize) -> f64 {
        let m = if m < self.n / 2 {
            m as f64
        } else {
            m as f64 - self.n as f64
        };
        PI * m / self.extent
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|m| self.wavenumber(m)).collect()
    }

    pub fn is_nyquist(&self, m: usize) -> bool {
        m == self.n / 2
    }

    /// Largest resolved wavenumber `pi / h`.
    pub fn nyquist(&self) -> f64 {
        PI / self.spacing()
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let n = self.n;
        [
            self.coord(idx / (n * n)),
            self.coord((idx / n) % n),
            self.coord(idx % n),
        ]
    }
}

/// Trap frequency and interaction strength of the dimensionless equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicsParams {
    omega: f64,
    beta: f64,
}

impl PhysicsParams {
    pub fn new(omega: f64, beta: f64) -> Result<Self> {
        if !(omega.is_finite() && omega >= 1.0) {
            return Err(GpeError::InvalidParams(format!(
                "omega must be >= 1, got {omega}"
            )));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(GpeError::InvalidParams(format!(
                "beta must be >= 0, got {beta}"
            )));
        }
        Ok(PhysicsParams { omega, beta })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Length `pi / (4 omega)` of the interval on which the closed-form kernel holds.
    pub fn window(&self) -> f64 {
        PI / (4.0 * self.omega)
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        PhysicsParams::new(self.omega, beta)
    }
}

/// All norms used by the diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l2: f64,
    pub l4: f64,
    pub h1: f64,
    pub weight_x: f64,
    pub sigma: f64,
}

/// Complex amplitudes on a [`GridSpec`], index `(ix*n + iy)*n + iz`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: GridSpec,
    data: Vec<Complex64>,
}

impl ComplexField {
    pub fn zeros(grid: GridSpec) -> Self {
        ComplexField {
            grid,
            data: vec![ZERO; grid.len()],
        }
    }

    pub fn from_vec(grid: GridSpec, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(GpeError::GridMismatch(format!(
                "expected {} amplitudes, got {}",
                grid.len(),
                data.len()
            )));
        }
        Ok(ComplexField { grid, data })
    }

    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn([f64; 3]) -> Complex64 + Sync,
    {
        let data = (0..grid.len())
            .into_par_iter()
            .map(|idx| f(grid.point(idx)))
            .collect();
        ComplexField { grid, data }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    fn check_same_grid(&self, other: &ComplexField) {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
    }

    pub fn map<F>(&self, f: F) -> ComplexField
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        ComplexField {
            grid: self.grid,
            data: self.data.par_iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise `f(x, u(x))`.
    pub fn map_with_coords<F>(&self, f: F) -> ComplexField
    where
        F: Fn([f64; 3], Complex64) -> Complex64 + Sync,
    {
        let grid = self.grid;
        ComplexField {
            grid,
            data: self
                .data
                .par_iter()
                .enumerate()
                .map(|(idx, &v)| f(grid.point(idx), v))
                .collect(),
        }
    }

    pub fn zip_map<F>(&self, other: &ComplexField, f: F) -> ComplexField
    where
        F: Fn(Complex64, Complex64) -> Complex64 + Sync,
    {
        self.check_same_grid(other);
        ComplexField {
            grid: self.grid,
            data: self
                .data
                .par_iter()
                .zip(other.data.par_iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> ComplexField {
        self.map(|v| v * c)
    }

    pub fn add(&self, other: &ComplexField) -> ComplexField {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexField) -> ComplexField {
        self.zip_map(other, |a, b| a - b)
    }

    /// `a*self + b*other`.
    pub fn combine(&self, a: Complex64, other: &ComplexField, b: Complex64) -> ComplexField {
        self.zip_map(other, |u, v| a * u + b * v)
    }

    pub fn conj(&self) -> ComplexField {
        self.map(|v| v.conj())
    }

    /// Point reflection `u(-x)`. On the grid `-x_j = x_{n-j}`, with the
    /// `j = 0` plane mapped onto itself (periodic image).
    pub fn reflect(&self) -> ComplexField {
        let n = self.grid.n;
        let r = |j: usize| (n - j) % n;
        let mut out = vec![ZERO; self.grid.len()];
        for ix in 0..n {
            for iy in 0..n {
                for iz in 0..n {
                    out[fft::flat(n, ix, iy, iz)] = self.data[fft::flat(n, r(ix), r(iy), r(iz))];
                }
            }
        }
        ComplexField {
            grid: self.grid,
            data: out,
        }
    }

    /// Rectangle-rule sum `sum_x g(u(x)) h^3`, accumulated sequentially.
    fn quadrature<F: Fn(Complex64) -> f64>(&self, g: F) -> f64 {
        self.data.iter().map(|&v| g(v)).sum::<f64>() * self.grid.cell_volume()
    }

    /// `int u dx`.
    pub fn integral(&self) -> Complex64 {
        self.data.iter().copied().sum::<Complex64>() * self.grid.cell_volume()
    }

    /// Hermitian product `int conj(self) other dx`.
    pub fn inner(&self, other: &ComplexField) -> Complex64 {
        self.check_same_grid(other);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.cell_volume()
    }

    /// Unconjugated pairing `int self other dx`.
    pub fn bilinear(&self, other: &ComplexField) -> Complex64 {
        self.check_same_grid(other);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .sum::<Complex64>()
            * self.grid.cell_volume()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.quadrature(|v| v.norm_sqr())
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.quadrature(|v| v.norm())
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        self.quadrature(|v| v.norm().powf(p)).powf(1.0 / p)
    }

    pub fn l4_norm_pow4(&self) -> f64 {
        self.quadrature(|v| v.norm_sqr() * v.norm_sqr())
    }

    pub fn linf_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `||self - reference|| / ||reference||` in L2 (absolute if the reference vanishes).
    pub fn rel_l2_diff(&self, reference: &ComplexField) -> f64 {
        let diff = self.sub(reference).l2_norm();
        let r = reference.l2_norm();
        if r > 0.0 {
            diff / r
        } else {
            diff
        }
    }

    pub fn fft_forward(&self) -> ComplexField {
        let mut data = self.data.clone();
        fft::fft3(&mut data, self.grid.n, false);
        ComplexField {
            grid: self.grid,
            data,
        }
    }

    pub fn fft_inverse(&self) -> ComplexField {
        let mut data = self.data.clone();
        fft::fft3(&mut data, self.grid.n, true);
        ComplexField {
            grid: self.grid,
            data,
        }
    }

    /// Multiplies the spectrum by `symbol(k)` and transforms back.
    pub fn fourier_multiply<F>(&self, symbol: F) -> ComplexField
    where
        F: Fn([f64; 3], [bool; 3]) -> Complex64 + Sync,
    {
        let grid = self.grid;
        let n = grid.n;
        let ks = grid.wavenumbers();
        let mut spec = self.fft_forward();
        spec.data.par_iter_mut().enumerate().for_each(|(idx, v)| {
            let m = [idx / (n * n), (idx / n) % n, idx % n];
            let k = [ks[m[0]], ks[m[1]], ks[m[2]]];
            let nyq = [grid.is_nyquist(m[0]), grid.is_nyquist(m[1]), grid.is_nyquist(m[2])];
            *v *= symbol(k, nyq);
        });
        spec.fft_inverse()
    }

    /// Spectral `d/dx_axis` (Nyquist mode zeroed).
    pub fn spectral_gradient(&self, axis: Axis) -> ComplexField {
        let a = axis.index();
        self.fourier_multiply(|k, nyq| if nyq[a] { ZERO } else { I * k[a] })
    }

    pub fn gradient(&self) -> [ComplexField; 3] {
        Axis::ALL.map(|a| self.spectral_gradient(a))
    }

    /// Spectral Laplacian with symbol `-|k|^2` (Nyquist retained, the symbol is even).
    pub fn laplacian(&self) -> ComplexField {
        self.fourier_multiply(|k, _| Complex64::new(-(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]), 0.0))
    }

    pub fn coord_multiply(&self, axis: Axis) -> ComplexField {
        let a = axis.index();
        self.map_with_coords(|x, v| v * x[a])
    }

    pub fn radial2_multiply(&self) -> ComplexField {
        self.map_with_coords(|x, v| v * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]))
    }

    pub fn norms(&self) -> Norms {
        let l2sq = self.l2_norm_sq();
        let grad_sq: f64 = self.gradient().iter().map(|g| g.l2_norm_sq()).sum();
        let h1 = (l2sq + grad_sq).sqrt();
        let weight_x = self.radial2_multiply().inner(self).re.max(0.0).sqrt();
        Norms {
            l2: l2sq.sqrt(),
            l4: self.l4_norm_pow4().powf(0.25),
            h1,
            weight_x,
            sigma: h1 + weight_x,
        }
    }
}

/// Sum of squared L2 norms of the components of a vector field.
pub fn vector_norm_sq(v: &[ComplexField; 3]) -> f64 {
    v.iter().map(|c| c.l2_norm_sq()).sum()
}

/// Pointwise Euclidean modulus `|v(x)|` of a vector field.
pub fn vector_modulus(v: &[ComplexField; 3]) -> ComplexField {
    let grid = *v[0].grid();
    let data = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let s = v[0].data[i].norm_sqr() + v[1].data[i].norm_sqr() + v[2].data[i].norm_sqr();
            Complex64::new(s.sqrt(), 0.0)
        })
        .collect();
    ComplexField { grid, data }
}
