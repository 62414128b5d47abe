//! Seeded initial data.

use phaserk::spectral::{Complex, GridDim, PeriodicGrid, SpectralField, TransformPlan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Highest retained integer mode of the random initial data.
pub const INIT_MODE_CUTOFF: f64 = 8.0;

/// Low-pass-filtered uniform noise in `[-0.9, 0.9]`: i.i.d. uniform values
/// per grid point, modes above `|k| = 8` removed, rescaled back under 0.9
/// if the filter overshoots. Identical seeds give identical fields.
pub fn random_initial_field(grid: PeriodicGrid<f64>, seed: u64) -> SpectralField<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..grid.points()).map(|_| rng.gen_range(-0.9..0.9)).collect();
    let noise = SpectralField::from_values(grid, values).expect("finite noise");
    let plan = TransformPlan::new(grid);
    let mut spectrum = plan.transform(&noise).expect("own grid");
    let n = grid.points_per_dim();
    let signed = |i: usize| -> f64 {
        if i <= n / 2 - 1 {
            i as f64
        } else {
            i as f64 - n as f64
        }
    };
    match grid.dim() {
        GridDim::One => {
            for (i, c) in spectrum.coeffs_mut().iter_mut().enumerate() {
                if signed(i).abs() > INIT_MODE_CUTOFF {
                    *c = Complex::new(0.0, 0.0);
                }
            }
        }
        GridDim::Two => {
            for ix in 0..n {
                for iy in 0..n {
                    let k = (signed(ix).powi(2) + signed(iy).powi(2)).sqrt();
                    if k > INIT_MODE_CUTOFF {
                        spectrum.coeffs_mut()[ix * n + iy] = Complex::new(0.0, 0.0);
                    }
                }
            }
        }
    }
    let mut field = plan.inverse_transform(&spectrum).expect("own grid");
    let peak = field.max_abs();
    if peak > 0.9 {
        let scale = 0.9 / peak;
        for v in field.values_mut() {
            *v *= scale;
        }
    }
    field
}

/// Smooth deterministic initial data for convergence studies:
/// `0.1 cos(x)` in 1-D, `0.1 cos(x) cos(y)` in 2-D.
pub fn cosine_initial_field(grid: PeriodicGrid<f64>) -> SpectralField<f64> {
    match grid.dim() {
        GridDim::One => SpectralField::from_fn_1d(grid, |x| 0.1 * x.cos()),
        GridDim::Two => SpectralField::from_fn_2d(grid, |x, y| 0.1 * x.cos() * y.cos()),
    }
    .expect("matching constructor")
}
