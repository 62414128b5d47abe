//! Periodic grids, Fourier-diagonal operators, and stage solves.
//!
//! Fields live on uniform periodic grids in one or two dimensions with a
//! power-of-two point count, so every operator built from the Laplacian is
//! diagonal in Fourier space and each implicit stage of an IMEX step is a
//! pointwise division over modes. The transform is an in-crate radix-2
//! Cooley-Tukey; plans are cheap value types that can be cached per worker.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

pub use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{cast, Real};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("field contains a non-finite value")]
    NonFinite,
    #[error("stage denominator vanished at mode {mode} (value {value})")]
    DenominatorVanished { mode: usize, value: f64 },
    #[error("snapshot i/o failed: {0}")]
    Io(#[from] io::Error),
    #[error("snapshot header invalid: {0}")]
    BadSnapshot(String),
}

/// Spatial dimension of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridDim {
    One,
    Two,
}

impl GridDim {
    pub fn as_usize(self) -> usize {
        match self {
            GridDim::One => 1,
            GridDim::Two => 2,
        }
    }
}

impl TryFrom<usize> for GridDim {
    type Error = SpectralError;
    fn try_from(d: usize) -> Result<Self, SpectralError> {
        match d {
            1 => Ok(GridDim::One),
            2 => Ok(GridDim::Two),
            other => Err(SpectralError::InvalidGrid(format!("dimension {other} not supported"))),
        }
    }
}

/// Uniform periodic grid: `n` points per dimension on a box of the given
/// side length (the same in both dimensions).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid<T> {
    dim: GridDim,
    n: usize,
    length: T,
}

impl<T: Real> PeriodicGrid<T> {
    pub fn new(dim: GridDim, n: usize, length: T) -> Result<Self, SpectralError> {
        if n < 8 || !n.is_power_of_two() {
            return Err(SpectralError::InvalidGrid(format!(
                "point count {n} must be a power of two and at least 8"
            )));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(SpectralError::InvalidGrid("box length must be positive".into()));
        }
        Ok(Self { dim, n, length })
    }

    /// Grid on the default `[0, 2 pi)` box.
    pub fn with_default_length(dim: GridDim, n: usize) -> Result<Self, SpectralError> {
        Self::new(dim, n, cast::<T>(2.0) * T::PI())
    }

    pub fn dim(&self) -> GridDim {
        self.dim
    }

    pub fn points_per_dim(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> T {
        self.length
    }

    /// Total number of grid points.
    pub fn points(&self) -> usize {
        match self.dim {
            GridDim::One => self.n,
            GridDim::Two => self.n * self.n,
        }
    }

    pub fn spacing(&self) -> T {
        self.length / T::from_usize(self.n).expect("grid size fits scalar")
    }

    /// Quadrature weight `h^dim` of one grid point.
    pub fn cell_measure(&self) -> T {
        let h = self.spacing();
        match self.dim {
            GridDim::One => h,
            GridDim::Two => h * h,
        }
    }

    /// Signed integer mode for FFT bin `i` (the Nyquist bin maps to `-n/2`).
    fn signed_mode(&self, i: usize) -> i64 {
        if i <= self.n / 2 - 1 || self.n == 1 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Physical wavenumber of FFT bin `i` along one dimension.
    fn wavenumber(&self, i: usize) -> T {
        let two_pi = cast::<T>(2.0) * T::PI();
        two_pi / self.length * T::from_i64(self.signed_mode(i)).expect("mode fits scalar")
    }

    /// `|k|^2` for every mode, in FFT layout (row-major for 2-D).
    pub fn k_squared(&self) -> Vec<T> {
        match self.dim {
            GridDim::One => (0..self.n)
                .map(|i| {
                    let k = self.wavenumber(i);
                    k * k
                })
                .collect(),
            GridDim::Two => {
                let k: Vec<T> = (0..self.n).map(|i| self.wavenumber(i)).collect();
                let mut out = Vec::with_capacity(self.n * self.n);
                for kx in &k {
                    for ky in &k {
                        out.push(*kx * *kx + *ky * *ky);
                    }
                }
                out
            }
        }
    }
}

/// Real-valued state on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField<T> {
    grid: PeriodicGrid<T>,
    values: Vec<T>,
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(grid: PeriodicGrid<T>) -> Self {
        Self { values: vec![T::zero(); grid.points()], grid }
    }

    pub fn constant(grid: PeriodicGrid<T>, value: T) -> Self {
        Self { values: vec![value; grid.points()], grid }
    }

    pub fn from_values(grid: PeriodicGrid<T>, values: Vec<T>) -> Result<Self, SpectralError> {
        if values.len() != grid.points() {
            return Err(SpectralError::InvalidGrid(format!(
                "value count {} does not match grid with {} points",
                values.len(),
                grid.points()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SpectralError::NonFinite);
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x)` on a 1-D grid.
    pub fn from_fn_1d(
        grid: PeriodicGrid<T>,
        f: impl Fn(T) -> T,
    ) -> Result<Self, SpectralError> {
        if grid.dim() != GridDim::One {
            return Err(SpectralError::InvalidGrid("from_fn_1d needs a 1-D grid".into()));
        }
        let h = grid.spacing();
        let values = (0..grid.points())
            .map(|i| f(h * T::from_usize(i).expect("index fits scalar")))
            .collect();
        Self::from_values(grid, values)
    }

    /// Samples `f(x, y)` on a 2-D grid (row-major, `x` outer).
    pub fn from_fn_2d(
        grid: PeriodicGrid<T>,
        f: impl Fn(T, T) -> T,
    ) -> Result<Self, SpectralError> {
        if grid.dim() != GridDim::Two {
            return Err(SpectralError::InvalidGrid("from_fn_2d needs a 2-D grid".into()));
        }
        let h = grid.spacing();
        let n = grid.points_per_dim();
        let coord = |i: usize| h * T::from_usize(i).expect("index fits scalar");
        let mut values = Vec::with_capacity(grid.points());
        for ix in 0..n {
            for iy in 0..n {
                values.push(f(coord(ix), coord(iy)));
            }
        }
        Self::from_values(grid, values)
    }

    pub fn grid(&self) -> &PeriodicGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn mean(&self) -> T {
        let sum = self.values.iter().fold(T::zero(), |acc, &v| acc + v);
        sum / T::from_usize(self.values.len()).expect("point count fits scalar")
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SpectralError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SpectralError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self, SpectralError> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { grid: self.grid, values })
    }
}

/// Radix-2 complex FFT plan for one transform length.
#[derive(Debug, Clone)]
pub struct Fft<T> {
    n: usize,
    /// `exp(-2 pi i k / n)` for `k < n/2`.
    twiddles: Vec<Complex<T>>,
}

impl<T: Real> Fft<T> {
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two() && n >= 2, "FFT length must be a power of two");
        let two_pi = cast::<T>(2.0) * T::PI();
        let nt = T::from_usize(n).expect("length fits scalar");
        let twiddles = (0..n / 2)
            .map(|k| {
                let angle = -two_pi * T::from_usize(k).expect("index fits scalar") / nt;
                Complex::new(angle.cos(), angle.sin())
            })
            .collect();
        Self { n, twiddles }
    }

    /// Transform length.
    pub fn len(&self) -> usize {
        self.n
    }

    /// In-place forward DFT (unnormalized).
    pub fn forward(&self, data: &mut [Complex<T>]) {
        assert_eq!(data.len(), self.n, "buffer length mismatch");
        let n = self.n;
        // bit-reversal permutation
        let mut j = 0usize;
        for i in 0..n {
            if i < j {
                data.swap(i, j);
            }
            let mut mask = n >> 1;
            while mask > 0 && j & mask != 0 {
                j &= !mask;
                mask >>= 1;
            }
            j |= mask;
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let step = n / size;
            let mut start = 0;
            while start < n {
                for k in 0..half {
                    let w = self.twiddles[k * step];
                    let u = data[start + k];
                    let v = data[start + k + half] * w;
                    data[start + k] = u + v;
                    data[start + k + half] = u - v;
                }
                start += size;
            }
            size *= 2;
        }
    }

    /// In-place inverse DFT with the `1/n` normalization.
    pub fn inverse(&self, data: &mut [Complex<T>]) {
        for z in data.iter_mut() {
            *z = z.conj();
        }
        self.forward(data);
        let scale = T::one() / T::from_usize(self.n).expect("length fits scalar");
        for z in data.iter_mut() {
            *z = Complex::new(z.re * scale, -z.im * scale);
        }
    }
}

/// Fourier coefficients of a field, FFT layout, unnormalized forward
/// convention.
#[derive(Debug, Clone)]
pub struct FieldSpectrum<T> {
    grid: PeriodicGrid<T>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> FieldSpectrum<T> {
    pub fn grid(&self) -> &PeriodicGrid<T> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    /// Multiplies by a per-mode real symbol.
    pub fn apply_symbol(&mut self, sym: &OperatorSymbol<T>) -> Result<(), SpectralError> {
        if sym.grid != self.grid {
            return Err(SpectralError::GridMismatch);
        }
        for (c, &m) in self.coeffs.iter_mut().zip(&sym.multipliers) {
            *c = Complex::new(c.re * m, c.im * m);
        }
        Ok(())
    }

    /// Zeroes every mode whose signed index exceeds `n/3` in any dimension
    /// (the 2/3 dealiasing rule).
    pub fn dealias_two_thirds(&mut self) {
        let n = self.grid.points_per_dim();
        let cutoff = (n / 3) as i64;
        let keep = |i: usize| self.grid.signed_mode(i).abs() <= cutoff;
        match self.grid.dim() {
            GridDim::One => {
                for i in 0..n {
                    if !keep(i) {
                        self.coeffs[i] = Complex::new(T::zero(), T::zero());
                    }
                }
            }
            GridDim::Two => {
                for ix in 0..n {
                    for iy in 0..n {
                        if !keep(ix) || !keep(iy) {
                            self.coeffs[ix * n + iy] = Complex::new(T::zero(), T::zero());
                        }
                    }
                }
            }
        }
    }
}

/// Shared plan pair for a grid; a convenience over rebuilding twiddles.
#[derive(Debug, Clone)]
pub struct TransformPlan<T> {
    grid: PeriodicGrid<T>,
    fft: Fft<T>,
}

impl<T: Real> TransformPlan<T> {
    pub fn new(grid: PeriodicGrid<T>) -> Self {
        Self { fft: Fft::new(grid.points_per_dim()), grid }
    }

    pub fn grid(&self) -> &PeriodicGrid<T> {
        &self.grid
    }

    /// Forward transform of a real field.
    pub fn transform(&self, field: &SpectralField<T>) -> Result<FieldSpectrum<T>, SpectralError> {
        if field.grid != self.grid {
            return Err(SpectralError::GridMismatch);
        }
        let mut coeffs: Vec<Complex<T>> =
            field.values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        match self.grid.dim() {
            GridDim::One => self.fft.forward(&mut coeffs),
            GridDim::Two => self.transform_2d(&mut coeffs, false),
        }
        Ok(FieldSpectrum { grid: self.grid, coeffs })
    }

    /// Inverse transform back to a real field. The imaginary residue of a
    /// spectrum reached from real data through real even symbols is pure
    /// round-off; it is checked in debug builds and discarded.
    pub fn inverse_transform(
        &self,
        spectrum: &FieldSpectrum<T>,
    ) -> Result<SpectralField<T>, SpectralError> {
        if spectrum.grid != self.grid {
            return Err(SpectralError::GridMismatch);
        }
        let mut coeffs = spectrum.coeffs.clone();
        match self.grid.dim() {
            GridDim::One => self.fft.inverse(&mut coeffs),
            GridDim::Two => self.transform_2d(&mut coeffs, true),
        }
        #[cfg(debug_assertions)]
        {
            let scale = coeffs
                .iter()
                .fold(T::one(), |acc, z| acc.max(z.re.abs()));
            let worst_imag = coeffs.iter().fold(T::zero(), |acc, z| acc.max(z.im.abs()));
            let tol = (T::epsilon() * cast::<T>(1024.0)).max(cast::<T>(1e-10));
            debug_assert!(
                worst_imag <= tol * scale,
                "imaginary residue {worst_imag:e} exceeds round-off for scale {scale:e}"
            );
        }
        let values = coeffs.iter().map(|z| z.re).collect();
        Ok(SpectralField { grid: self.grid, values })
    }

    fn transform_2d(&self, coeffs: &mut [Complex<T>], inverse: bool) {
        let n = self.grid.points_per_dim();
        let run = |row: &mut [Complex<T>]| {
            if inverse {
                self.fft.inverse(row);
            } else {
                self.fft.forward(row);
            }
        };
        for row in coeffs.chunks_mut(n) {
            run(row);
        }
        transpose_square(coeffs, n);
        for row in coeffs.chunks_mut(n) {
            run(row);
        }
        transpose_square(coeffs, n);
    }
}

fn transpose_square<T: Copy>(data: &mut [T], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Per-mode real multiplier realizing a constant-coefficient operator.
///
/// The builders derive the multiplier from `|k|^2`, which keeps the symbol
/// even in `k`, so the realized operator maps real fields to real fields.
#[derive(Debug, Clone)]
pub struct OperatorSymbol<T> {
    grid: PeriodicGrid<T>,
    multipliers: Vec<T>,
}

impl<T: Real> OperatorSymbol<T> {
    /// Symbol `f(|k|^2)` per mode.
    pub fn from_k_squared(grid: PeriodicGrid<T>, f: impl Fn(T) -> T) -> Self {
        let multipliers = grid.k_squared().into_iter().map(f).collect();
        Self { grid, multipliers }
    }

    /// The Laplacian: `-|k|^2`.
    pub fn laplacian(grid: PeriodicGrid<T>) -> Self {
        Self::from_k_squared(grid, |k2| -k2)
    }

    pub fn identity(grid: PeriodicGrid<T>) -> Self {
        Self::from_k_squared(grid, |_| T::one())
    }

    pub fn grid(&self) -> &PeriodicGrid<T> {
        &self.grid
    }

    pub fn multipliers(&self) -> &[T] {
        &self.multipliers
    }

    /// Value at the zero mode, which governs the mass behavior.
    pub fn at_zero(&self) -> T {
        self.multipliers[0]
    }

    /// Applies the operator to a field through the transform pair.
    pub fn apply(&self, u: &SpectralField<T>) -> Result<SpectralField<T>, SpectralError> {
        let plan = TransformPlan::new(self.grid);
        let mut spectrum = plan.transform(u)?;
        spectrum.apply_symbol(self)?;
        plan.inverse_transform(&spectrum)
    }
}

/// Solves `(I - tau a_ii S) v = rhs` mode-by-mode for a symbol `S`; with
/// `S <= 0` and `a_ii >= 0` every denominator is at least one.
pub fn stage_solve<T: Real>(
    gds: &OperatorSymbol<T>,
    a_ii: T,
    tau: T,
    rhs: &SpectralField<T>,
) -> Result<SpectralField<T>, SpectralError> {
    let plan = TransformPlan::new(gds.grid);
    let mut spectrum = plan.transform(rhs)?;
    stage_solve_spectrum(gds, a_ii, tau, &mut spectrum)?;
    plan.inverse_transform(&spectrum)
}

/// In-place modal form of [`stage_solve`].
pub fn stage_solve_spectrum<T: Real>(
    gds: &OperatorSymbol<T>,
    a_ii: T,
    tau: T,
    spectrum: &mut FieldSpectrum<T>,
) -> Result<(), SpectralError> {
    if gds.grid != spectrum.grid {
        return Err(SpectralError::GridMismatch);
    }
    assert!(tau > T::zero(), "step size must be positive");
    let floor = cast::<T>(1e-14);
    for (mode, (c, &sigma)) in spectrum.coeffs.iter_mut().zip(&gds.multipliers).enumerate() {
        let denom = T::one() - tau * a_ii * sigma;
        if denom <= floor {
            return Err(SpectralError::DenominatorVanished {
                mode,
                value: denom.to_f64().unwrap_or(f64::NAN),
            });
        }
        *c = Complex::new(c.re / denom, c.im / denom);
    }
    Ok(())
}

/// Spatial inner product `h^dim sum u v` (exact rectangle rule on the
/// periodic grid).
pub fn inner<T: Real>(u: &SpectralField<T>, v: &SpectralField<T>) -> Result<T, SpectralError> {
    if u.grid != v.grid {
        return Err(SpectralError::GridMismatch);
    }
    let sum = u
        .values
        .iter()
        .zip(&v.values)
        .fold(T::zero(), |acc, (&a, &b)| acc + a * b);
    Ok(sum * u.grid.cell_measure())
}

pub fn norm_l2<T: Real>(u: &SpectralField<T>) -> T {
    inner(u, u).expect("same grid").sqrt()
}

/// Modal `L^2` norm of the spectral gradient, `(sum |k|^2 |u_k|^2)^(1/2)`
/// with the quadrature normalization.
pub fn seminorm_h1<T: Real>(u: &SpectralField<T>) -> T {
    let plan = TransformPlan::new(u.grid);
    let spectrum = plan.transform(u).expect("owned grid");
    let k2 = u.grid.k_squared();
    let sum = spectrum
        .coeffs
        .iter()
        .zip(&k2)
        .fold(T::zero(), |acc, (c, &k2)| acc + k2 * c.norm_sqr());
    (sum * modal_measure(&u.grid)).sqrt()
}

/// Full `H^1` norm `(|u|_2^2 + |grad u|_2^2)^(1/2)`.
pub fn norm_h1<T: Real>(u: &SpectralField<T>) -> T {
    let l2 = norm_l2(u);
    let h1 = seminorm_h1(u);
    (l2 * l2 + h1 * h1).sqrt()
}

/// Quadrature factor turning `sum_k |u_k|^2` into the spatial integral:
/// `L^dim / n^(2 dim)`.
pub(crate) fn modal_measure<T: Real>(grid: &PeriodicGrid<T>) -> T {
    let n = T::from_usize(grid.points()).expect("point count fits scalar");
    let vol = match grid.dim() {
        GridDim::One => grid.length(),
        GridDim::Two => grid.length() * grid.length(),
    };
    vol / (n * n)
}

/// Spectral gradient, one field per dimension; the Nyquist mode is zeroed
/// as usual for odd derivatives of real data.
pub fn gradient<T: Real>(u: &SpectralField<T>) -> Result<Vec<SpectralField<T>>, SpectralError> {
    let plan = TransformPlan::new(u.grid);
    let base = plan.transform(u)?;
    let n = u.grid.points_per_dim();
    let nyquist = n / 2;
    let deriv_k = |i: usize| -> T {
        if i == nyquist {
            T::zero()
        } else {
            u.grid.wavenumber(i)
        }
    };
    let mut out = Vec::new();
    match u.grid.dim() {
        GridDim::One => {
            let mut spec = base.clone();
            for (i, c) in spec.coeffs.iter_mut().enumerate() {
                let k = deriv_k(i);
                *c = Complex::new(-c.im * k, c.re * k); // multiply by i k
            }
            out.push(plan.inverse_transform(&spec)?);
        }
        GridDim::Two => {
            for axis in 0..2 {
                let mut spec = base.clone();
                for ix in 0..n {
                    for iy in 0..n {
                        let k = if axis == 0 { deriv_k(ix) } else { deriv_k(iy) };
                        let c = &mut spec.coeffs[ix * n + iy];
                        *c = Complex::new(-c.im * k, c.re * k);
                    }
                }
                out.push(plan.inverse_transform(&spec)?);
            }
        }
    }
    Ok(out)
}

/// Spectral divergence of a per-dimension vector field (adjoint layout to
/// [`gradient`], Nyquist zeroed the same way).
pub fn divergence<T: Real>(
    components: &[SpectralField<T>],
) -> Result<SpectralField<T>, SpectralError> {
    let grid = components
        .first()
        .ok_or_else(|| SpectralError::InvalidGrid("no components".into()))?
        .grid;
    if components.len() != grid.dim().as_usize() {
        return Err(SpectralError::InvalidGrid(
            "component count does not match grid dimension".into(),
        ));
    }
    let plan = TransformPlan::new(grid);
    let n = grid.points_per_dim();
    let nyquist = n / 2;
    let deriv_k = |i: usize| -> T {
        if i == nyquist {
            T::zero()
        } else {
            grid.wavenumber(i)
        }
    };
    let mut acc: Vec<Complex<T>> = vec![Complex::new(T::zero(), T::zero()); grid.points()];
    for (axis, comp) in components.iter().enumerate() {
        if comp.grid != grid {
            return Err(SpectralError::GridMismatch);
        }
        let spec = plan.transform(comp)?;
        match grid.dim() {
            GridDim::One => {
                for (i, (a, c)) in acc.iter_mut().zip(&spec.coeffs).enumerate() {
                    let k = deriv_k(i);
                    *a = *a + Complex::new(-c.im * k, c.re * k);
                }
            }
            GridDim::Two => {
                for ix in 0..n {
                    for iy in 0..n {
                        let k = if axis == 0 { deriv_k(ix) } else { deriv_k(iy) };
                        let c = spec.coeffs[ix * n + iy];
                        acc[ix * n + iy] = acc[ix * n + iy] + Complex::new(-c.im * k, c.re * k);
                    }
                }
            }
        }
    }
    plan.inverse_transform(&FieldSpectrum { grid, coeffs: acc })
}

pub(crate) fn spectrum_from_parts<T: Real>(
    grid: PeriodicGrid<T>,
    coeffs: Vec<Complex<T>>,
) -> FieldSpectrum<T> {
    debug_assert_eq!(coeffs.len(), grid.points());
    FieldSpectrum { grid, coeffs }
}

/// Writes the flat binary snapshot format: `dim`, `n` as little-endian
/// `u64`, the box length as little-endian `f64`, then the row-major values
/// as little-endian `f64`.
pub fn write_snapshot<T: Real>(path: &Path, field: &SpectralField<T>) -> Result<(), SpectralError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&(field.grid.dim().as_usize() as u64).to_le_bytes())?;
    w.write_all(&(field.grid.points_per_dim() as u64).to_le_bytes())?;
    w.write_all(&field.grid.length().to_f64().unwrap_or(f64::NAN).to_le_bytes())?;
    for v in &field.values {
        w.write_all(&v.to_f64().unwrap_or(f64::NAN).to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a snapshot written by [`write_snapshot`].
pub fn read_snapshot<T: Real>(path: &Path) -> Result<SpectralField<T>, SpectralError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut buf8 = [0u8; 8];
    let mut read_u64 = |r: &mut BufReader<File>| -> Result<u64, SpectralError> {
        r.read_exact(&mut buf8)?;
        Ok(u64::from_le_bytes(buf8))
    };
    let dim = read_u64(&mut r)? as usize;
    let n = read_u64(&mut r)? as usize;
    let mut lenbuf = [0u8; 8];
    r.read_exact(&mut lenbuf)?;
    let length = f64::from_le_bytes(lenbuf);
    let grid = PeriodicGrid::new(GridDim::try_from(dim)?, n, cast::<T>(length))
        .map_err(|e| SpectralError::BadSnapshot(e.to_string()))?;
    let mut values = Vec::with_capacity(grid.points());
    let mut vbuf = [0u8; 8];
    for _ in 0..grid.points() {
        r.read_exact(&mut vbuf)?;
        values.push(cast::<T>(f64::from_le_bytes(vbuf)));
    }
    SpectralField::from_values(grid, values)
}

/// Plain-text export: `x,value` rows in 1-D, `x,y,value` rows in 2-D.
pub fn write_field_csv<T: Real, W: Write>(
    mut w: W,
    field: &SpectralField<T>,
) -> Result<(), SpectralError> {
    let h = field.grid.spacing();
    let coord = |i: usize| h * T::from_usize(i).expect("index fits scalar");
    match field.grid.dim() {
        GridDim::One => {
            writeln!(w, "x,value")?;
            for (i, v) in field.values.iter().enumerate() {
                writeln!(w, "{:e},{v:e}", coord(i))?;
            }
        }
        GridDim::Two => {
            writeln!(w, "x,y,value")?;
            let n = field.grid.points_per_dim();
            for ix in 0..n {
                for iy in 0..n {
                    writeln!(w, "{:e},{:e},{:e}", coord(ix), coord(iy), field.values[ix * n + iy])?;
                }
            }
        }
    }
    Ok(())
}
