//! End-to-end checks of the analysis/synthesis pipeline on a realistic
//! multi-octave grid: reconstruction of a band-limited pulse, the
//! reproducing-kernel projector's fixed-point/idempotency/contraction
//! properties, and shift/dilation covariance of the analysis.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scalewave::grid::{rel_weighted_distance, TimeScaleField, TimeScaleGrid};
use scalewave::signal::{rel_l2_error, TimeAxis, TimeSeries};
use scalewave::transform::{covariance_check, cwt, icwt, kernel_project};
use scalewave::wavelet::MotherWavelet;

/// Six octaves above four sample periods, eight voices per octave,
/// translations at half the bottom scale — the flat-response layout used by
/// the bundled scenarios, here in natural units (dt = 1).
fn analysis_grid(n_samples: usize) -> TimeScaleGrid {
    let translations = TimeAxis::new(0.0, 2.0, n_samples / 2).unwrap();
    TimeScaleGrid::new(4.0, 6, 8, translations).unwrap()
}

/// Gaussian-envelope tone centered in the window, tuned to the flat band of
/// the analysis grid (s_min * omega0 ~ 0.27) and six radians of envelope
/// per carrier cycle.
fn band_pulse(axis: TimeAxis) -> TimeSeries {
    let omega0 = 0.267 / 4.0;
    let sigma_t = 6.0 / omega0;
    let center = axis.start() + 0.5 * (axis.end() - axis.start());
    TimeSeries::from_fn(axis, |t| {
        let u = (t - center) / sigma_t;
        Complex64::new((-0.5 * u * u).exp() * (omega0 * (t - center)).cos(), 0.0)
    })
    .unwrap()
}

fn random_field(grid: &TimeScaleGrid, seed: u64) -> TimeScaleField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.n_cells())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    TimeScaleField::from_values(*grid, values).unwrap()
}

#[test]
fn round_trip_reconstructs_a_band_limited_pulse() {
    let axis = TimeAxis::new(0.0, 1.0, 2048).unwrap();
    let grid = analysis_grid(axis.len());
    let wavelet = MotherWavelet::new(3).unwrap();
    let x = band_pulse(axis);
    let field = cwt(&x, &wavelet, &grid).unwrap();
    let back = icwt(&field, &wavelet, &axis).unwrap();
    let err = rel_l2_error(&back, &x).unwrap();
    assert!(err < 1e-2, "round-trip error {err:.3e}");
    // The reconstruction must be exactly real.
    assert!(back.samples.iter().all(|z| z.im == 0.0));
}

#[test]
fn projector_fixes_analysis_fields() {
    let axis = TimeAxis::new(0.0, 1.0, 2048).unwrap();
    let grid = analysis_grid(axis.len());
    let wavelet = MotherWavelet::new(3).unwrap();
    let field = cwt(&band_pulse(axis), &wavelet, &grid).unwrap();
    let projected = kernel_project(&field, &wavelet).unwrap();
    let residual = rel_weighted_distance(&projected, &field).unwrap();
    assert!(residual < 2e-2, "analysis field moved by {residual:.3e}");
}

#[test]
fn projector_is_idempotent_on_consistent_fields() {
    // Exact idempotency needs the full scale half-line; on a truncated
    // ladder the projector is only reliable where an analysis field can
    // actually live. So feed it one: the image of an analysis field must be
    // (a) close to its input and (b) essentially fixed by a second pass.
    let axis = TimeAxis::new(0.0, 1.0, 2048).unwrap();
    let grid = analysis_grid(axis.len());
    let wavelet = MotherWavelet::new(3).unwrap();
    let field = cwt(&band_pulse(axis), &wavelet, &grid).unwrap();
    let once = kernel_project(&field, &wavelet).unwrap();
    let twice = kernel_project(&once, &wavelet).unwrap();
    let drift = rel_weighted_distance(&twice, &once).unwrap();
    assert!(drift < 1e-2, "second application moved the field by {drift:.3e}");
}

#[test]
fn projector_rejects_an_isolated_spike() {
    // A single nonzero cell is maximally inconsistent with being the
    // analysis of any signal: projection must displace it almost entirely.
    let grid = analysis_grid(2048);
    let wavelet = MotherWavelet::new(3).unwrap();
    let mut field = TimeScaleField::zeros(grid);
    field.set(24, 512, Complex64::new(1.0, 0.0));
    let projected = kernel_project(&field, &wavelet).unwrap();
    let moved = rel_weighted_distance(&projected, &field).unwrap();
    assert!(moved > 0.9, "spike only moved by {moved:.3e}");
}

#[test]
fn projector_is_non_expansive() {
    let grid = analysis_grid(2048);
    let wavelet = MotherWavelet::new(3).unwrap();
    for seed in [1u64, 7, 19] {
        let field = random_field(&grid, seed);
        let projected = kernel_project(&field, &wavelet).unwrap();
        let ratio = projected.weighted_norm() / field.weighted_norm();
        assert!(ratio < 1.0, "seed {seed}: projection expanded the norm ({ratio:.4})");
    }
}

#[test]
fn analysis_commutes_with_shift_and_dilation() {
    let axis = TimeAxis::new(0.0, 1.0, 2048).unwrap();
    let translations = TimeAxis::new(0.0, 2.0, 1024).unwrap();
    let grid = TimeScaleGrid::new(4.0, 4, 4, translations).unwrap();
    let wavelet = MotherWavelet::new(3).unwrap();
    // Pulse in the first quarter so both the shifted and the 2x-dilated
    // copies stay inside the window.
    let omega0 = 0.0667;
    let sigma_t = 40.0;
    let x = TimeSeries::from_fn(axis, |t| {
        let u = (t - 400.0) / sigma_t;
        Complex64::new((-0.5 * u * u).exp() * (omega0 * (t - 400.0)).cos(), 0.0)
    })
    .unwrap();
    let report = covariance_check(&x, &wavelet, &grid, 64.0, 2.0).unwrap();
    assert!(report.shift_cells > 0 && report.dilation_cells > 0);
    assert!(report.shift_dev < 1e-6, "shift covariance broke: {:.3e}", report.shift_dev);
    assert!(report.dilation_dev < 1e-3, "dilation covariance broke: {:.3e}", report.dilation_dev);
}
