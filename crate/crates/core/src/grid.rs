//! Discretization of the time-scale half-plane and fields sampled on it.
//!
//! Scales are geometric — `voices` steps per octave starting at `s_min` —
//! because the wavelet family is self-similar: a constant-`Q` ladder gives
//! every row the same fractional bandwidth. Translations are uniform.
//! Together with the quadrature weights below, sums over the grid approximate
//! the continuous time-scale integrals:
//!
//! ```text
//! integral integral F(s, tau) ds/s^2 dtau
//!   ~= sum_j sum_k  scale_weight(j) * translation_weight(k) * F[j, k]
//! ```
//!
//! with `scale_weight(j) = ln(2)/voices / s_j` (the log-uniform measure
//! `ds/s^2` integrated over one scale step) and trapezoid weights on the
//! translation axis.
//!
//! # Grid adequacy rules
//!
//! Two empirical rules, enforced or warned about by [`TimeScaleGrid`] users:
//!
//! * **Sampling**: the smallest scale must hold at least a couple of samples,
//!   `s_min >= 2 * dt` (hard error in the transform), and `s_min >= 4 * dt`
//!   for clean peak readouts (logged warning otherwise).
//! * **Translation spacing vs smallest scale**: synthesis from the grid images
//!   the field at frequency multiples of `2 pi / dtau`; those images are
//!   suppressed only when the smallest-scale atoms do not pass them, i.e.
//!   `dtau <= s_min / 2` for order-3 analysis. Violating this silently
//!   degrades reconstruction (it is a design rule, not a runtime check,
//!   because analysis-only uses are unaffected).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::TimeAxis;
use crate::wavelet::MotherWavelet;

/// A log-scale by uniform-translation grid with quadrature weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeScaleGrid {
    s_min: f64,
    octaves: u32,
    voices: u32,
    translations: TimeAxis,
}

impl TimeScaleGrid {
    /// Creates a grid spanning `octaves` octaves upward from `s_min` with
    /// `voices` scales per octave (so `octaves * voices + 1` scale rows), and
    /// the given translation axis.
    pub fn new(s_min: f64, octaves: u32, voices: u32, translations: TimeAxis) -> Result<Self> {
        if !(s_min.is_finite() && s_min > 0.0) {
            return Err(Error::InvalidScale(s_min));
        }
        if octaves == 0 {
            return Err(Error::InvalidGrid("octave count must be >= 1".into()));
        }
        if voices == 0 {
            return Err(Error::InvalidGrid("voices per octave must be >= 1".into()));
        }
        let j_max = octaves as u64 * voices as u64;
        if j_max > 4096 {
            return Err(Error::InvalidGrid(format!(
                "grid would hold {} scale rows; the supported maximum is 4097",
                j_max + 1
            )));
        }
        Ok(Self { s_min, octaves, voices, translations })
    }

    /// Reconstructs a grid from an explicit list of scales (e.g. parsed from
    /// a file), validating that they form a geometric ladder with an integer
    /// number of voices per octave.
    pub fn from_scales(scales: &[f64], translations: TimeAxis) -> Result<Self> {
        if scales.len() < 2 {
            return Err(Error::InvalidGrid("need at least two scales".into()));
        }
        if let Some(&s) = scales.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::InvalidScale(s));
        }
        let total_log2 = (scales[scales.len() - 1] / scales[0]).log2();
        let steps = scales.len() - 1;
        let octaves = total_log2.round();
        if octaves < 1.0 || (total_log2 - octaves).abs() > 1e-6 {
            return Err(Error::InvalidGrid(format!(
                "scales span {total_log2:.6} octaves; expected an integer count"
            )));
        }
        let octaves = octaves as u32;
        if !steps.is_multiple_of(octaves as usize) {
            return Err(Error::InvalidGrid(format!(
                "{} scale steps do not divide evenly into {octaves} octaves",
                steps
            )));
        }
        let voices = (steps / octaves as usize) as u32;
        let grid = Self::new(scales[0], octaves, voices, translations)?;
        for (j, &s) in scales.iter().enumerate() {
            let want = grid.scale(j);
            if ((s - want) / want).abs() > 1e-6 {
                return Err(Error::InvalidGrid(format!(
                    "scale row {j} is {s:.9e}, expected {want:.9e} on a geometric ladder"
                )));
            }
        }
        Ok(grid)
    }

    /// Smallest scale `s_min` in seconds.
    pub fn s_min(&self) -> f64 {
        self.s_min
    }

    /// Number of octaves spanned.
    pub fn octaves(&self) -> u32 {
        self.octaves
    }

    /// Scales per octave (the grid's `Q`).
    pub fn voices(&self) -> u32 {
        self.voices
    }

    /// Number of scale rows, `octaves * voices + 1`.
    pub fn n_scales(&self) -> usize {
        (self.octaves * self.voices) as usize + 1
    }

    /// Scale of row `j`: `s_min * 2^(j / voices)`.
    pub fn scale(&self, j: usize) -> f64 {
        self.s_min * 2.0f64.powf(j as f64 / self.voices as f64)
    }

    /// All scales, smallest first.
    pub fn scales(&self) -> Vec<f64> {
        (0..self.n_scales()).map(|j| self.scale(j)).collect()
    }

    /// Largest scale on the grid.
    pub fn max_scale(&self) -> f64 {
        self.scale(self.n_scales() - 1)
    }

    /// Log2 spacing between adjacent scales, `1 / voices`.
    pub fn log2_spacing(&self) -> f64 {
        1.0 / self.voices as f64
    }

    /// Quadrature weight of scale row `j` for the measure `ds / s^2`:
    /// `ln(2)/voices / s_j`.
    pub fn scale_weight(&self, j: usize) -> f64 {
        std::f64::consts::LN_2 / self.voices as f64 / self.scale(j)
    }

    /// The translation axis.
    pub fn translations(&self) -> &TimeAxis {
        &self.translations
    }

    /// Translation of column `k`, in seconds.
    pub fn tau(&self, k: usize) -> f64 {
        self.translations.at(k)
    }

    /// Number of translation columns.
    pub fn n_translations(&self) -> usize {
        self.translations.len()
    }

    /// Trapezoid quadrature weight of translation column `k` (`dtau/2` at the
    /// two ends, `dtau` inside; a single column gets weight `dtau`).
    pub fn translation_weight(&self, k: usize) -> f64 {
        let dtau = self.translations.step();
        if self.translations.len() > 1 && (k == 0 || k == self.translations.len() - 1) {
            0.5 * dtau
        } else {
            dtau
        }
    }

    /// Total number of grid cells.
    pub fn n_cells(&self) -> usize {
        self.n_scales() * self.n_translations()
    }

    /// Checks that a signal sampled with spacing `dt` can resolve the grid's
    /// smallest scale: errors when `s_min < 2 dt` (atoms of that scale fall
    /// beyond Nyquist), and logs a warning when `s_min < 4 dt` (usable but
    /// the finest rows carry visible discretization bias).
    pub fn check_sampling(&self, dt: f64) -> Result<()> {
        if self.s_min < 2.0 * dt {
            return Err(Error::InvalidGrid(format!(
                "smallest scale {:.6e} s needs a sample spacing of at most {:.6e} s, got {:.6e} s",
                self.s_min,
                self.s_min / 2.0,
                dt
            )));
        }
        if self.s_min < 4.0 * dt {
            log::warn!(
                "smallest scale {:.3e} s holds under 4 samples (dt {:.3e} s); \
                 finest rows will carry discretization bias",
                self.s_min,
                dt
            );
        }
        Ok(())
    }

    /// Interval the analyzed signal should cover so that every grid atom has
    /// its 5%-envelope support inside the data: `[tau_min - g, tau_max + g]`
    /// with `g = max_scale * effective_half_width(0.05)`.
    pub fn guard_interval(&self, wavelet: &MotherWavelet) -> (f64, f64) {
        let g = self.max_scale()
            * wavelet.effective_half_width(0.05).expect("0.05 is a valid envelope threshold");
        (self.translations.start() - g, self.translations.end() + g)
    }
}

/// A complex field sampled on a [`TimeScaleGrid`] (row-major, scales outer).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeScaleField {
    grid: TimeScaleGrid,
    values: Vec<Complex64>,
}

impl TimeScaleField {
    /// The zero field on `grid`.
    pub fn zeros(grid: TimeScaleGrid) -> Self {
        let n = grid.n_cells();
        Self { grid, values: vec![Complex64::new(0.0, 0.0); n] }
    }

    /// Wraps raw values (row-major, `n_scales x n_translations`).
    pub fn from_values(grid: TimeScaleGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::ShapeMismatch(format!(
                "grid has {} cells but {} values were supplied",
                grid.n_cells(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// The grid the field is sampled on.
    pub fn grid(&self) -> &TimeScaleGrid {
        &self.grid
    }

    /// All values, row-major.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Mutable access to all values, row-major.
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Value at scale row `j`, translation column `k`.
    pub fn at(&self, j: usize, k: usize) -> Complex64 {
        self.values[j * self.grid.n_translations() + k]
    }

    /// Sets the value at scale row `j`, translation column `k`.
    pub fn set(&mut self, j: usize, k: usize, v: Complex64) {
        let k_n = self.grid.n_translations();
        self.values[j * k_n + k] = v;
    }

    /// One scale row as a slice.
    pub fn row(&self, j: usize) -> &[Complex64] {
        let k_n = self.grid.n_translations();
        &self.values[j * k_n..(j + 1) * k_n]
    }

    /// Weighted L2 norm under the grid quadrature,
    /// `sqrt(sum_jk scale_weight(j) translation_weight(k) |F[j,k]|^2)`.
    pub fn weighted_norm(&self) -> f64 {
        let k_n = self.grid.n_translations();
        let mut acc = 0.0;
        for j in 0..self.grid.n_scales() {
            let wj = self.grid.scale_weight(j);
            for k in 0..k_n {
                acc += wj * self.grid.translation_weight(k) * self.values[j * k_n + k].norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Largest magnitude on the field and its cell, `(|F|, j, k)`.
    /// Ties resolve to the first cell in row-major order.
    pub fn max_abs(&self) -> (f64, usize, usize) {
        let k_n = self.grid.n_translations();
        let mut best = (0.0f64, 0usize, 0usize);
        for (i, v) in self.values.iter().enumerate() {
            let m = v.norm();
            if m > best.0 {
                best = (m, i / k_n, i % k_n);
            }
        }
        best
    }

    /// The field scaled by a complex constant.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * c).collect() }
    }
}

/// Relative weighted-L2 distance `||a - b||_w / ||b||_w` of two fields on the
/// same grid. Returns 0 when both are zero.
pub fn rel_weighted_distance(a: &TimeScaleField, b: &TimeScaleField) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::ShapeMismatch("fields live on different grids".into()));
    }
    let diff_values: Vec<Complex64> = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
    let diff = TimeScaleField { grid: a.grid, values: diff_values };
    let den = b.weighted_norm();
    if den == 0.0 {
        return Ok(if diff.weighted_norm() == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(diff.weighted_norm() / den)
}
