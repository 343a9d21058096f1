//! Channel sounding and wavelet-domain reflectivity estimation.
//!
//! The measurement model: transmit the real part of a single analytic atom
//! `psi_{sigma,0}` ("the probe"), receive the multipath response, and analyze
//! it on a time-scale grid. A ray with dilation `s0`, delay `tau0`, and
//! reflectivity `pr` maps the probe to `pr * Re psi_{sigma s0, tau0}` — each
//! echo is again a single atom, so the admissibility-normalized analysis
//! field
//!
//! ```text
//! D[j, k] = cwt(y)[j, k] / C_psi
//! ```
//!
//! peaks at the cell `(sigma * s0, tau0)` with magnitude
//! `|pr| * ||psi||^2 / (2 C_psi)` (the factor 1/2 because the probe is the
//! real part of the analytic atom). Echo resolution is therefore peak
//! picking plus a per-axis quadratic refinement, and reflectivity estimates
//! come from dividing by that known self-response — no per-scenario
//! calibration constant.
//!
//! From the same field a linear input/output map can be rebuilt: the
//! synthesized response `F(t) = S[D](t)` reproduces the received waveform as
//! `y(t) = 2 Re F(t)`, and since everything was measured against one probe,
//! the kernel factorizes as the probe-referred rank-one form
//!
//! ```text
//! M[p, q] = (4 / ||psi||^2) * F(t_p) * conj(psi_{sigma,0}(t_q)),
//! ```
//!
//! which maps the probe itself (and any amplitude-scaled copy) back to the
//! measured response: the inner sum against the probe yields `||psi||^2 / 2`,
//! leaving `2 F(t_p)`. A symmetric, conjugate-free variant is kept as
//! [`build_channel_kernel_symmetric`] for diagnostics; it is *not* a faithful
//! system map for delayed responses (see its documenting test) because
//! dropping the conjugation turns the analysis side into a time-reversed
//! correlation.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::grid::{rel_weighted_distance, TimeScaleField, TimeScaleGrid};
use crate::signal::{TimeAxis, TimeSeries};
use crate::transform;
use crate::wavelet::MotherWavelet;

/// Half-width of the probe window in units of the probe scale. The mother
/// envelope decays like `(1 + t^2)^(-(n+1)/2)`, so at 32 scales the truncated
/// tail is below 1e-6 of the peak for every admissible order.
const PROBE_HALF_WIDTH_SCALES: f64 = 32.0;

/// Sampling axis for a probe of the given scale at sample rate `fs`:
/// symmetric about zero, `ceil(32 * scale * fs)` samples per side.
pub fn probe_axis(probe_scale: f64, fs: f64) -> Result<TimeAxis> {
    if !(probe_scale.is_finite() && probe_scale > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "probe scale must be positive and finite, got {probe_scale}"
        )));
    }
    if !(fs.is_finite() && fs > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sample rate must be positive and finite, got {fs}"
        )));
    }
    let dt = 1.0 / fs;
    if probe_scale < 2.0 * dt {
        return Err(Error::InvalidParameter(format!(
            "probe scale {probe_scale:.3e} s is below two sample periods ({:.3e} s); \
             the transmitted pulse would be aliased",
            2.0 * dt
        )));
    }
    let n_pad = (PROBE_HALF_WIDTH_SCALES * probe_scale * fs).ceil() as usize;
    TimeAxis::new(-(n_pad as f64) * dt, dt, 2 * n_pad + 1)
}

/// The transmitted probe: `Re psi_{scale,0}` sampled on [`probe_axis`].
pub fn probe_series(wavelet: &MotherWavelet, probe_scale: f64, fs: f64) -> Result<TimeSeries> {
    let axis = probe_axis(probe_scale, fs)?;
    let atom = wavelet.atom(probe_scale, 0.0)?;
    TimeSeries::from_fn(axis, |t| Complex64::new(atom.eval(t).re, 0.0))
}

/// A sounded channel: the admissibility-normalized analysis field of the
/// received probe response, plus everything needed to interpret it.
#[derive(Debug, Clone)]
pub struct ReflectivityEstimate {
    /// `cwt(received) / C_psi` on the sounding grid.
    pub field: TimeScaleField,
    /// Analyzing (and probing) wavelet family.
    pub wavelet: MotherWavelet,
    /// Scale of the transmitted probe atom, seconds.
    pub probe_scale: f64,
    /// Axis the probe was sampled on.
    pub probe_axis: TimeAxis,
    /// Axis the response was received on.
    pub received_axis: TimeAxis,
}

impl ReflectivityEstimate {
    /// Resolves echoes from the field; see [`resolve_echoes`].
    pub fn resolve(&self, rel_threshold: f64) -> Result<Vec<RayEstimate>> {
        resolve_echoes(&self.field, &self.wavelet, self.probe_scale, rel_threshold)
    }
}

/// Sounds `channel` with the probe `Re psi_{probe_scale,0}` at sample rate
/// `fs` and analyzes the (possibly noisy) response on `grid`.
///
/// The receive window is the hull of the channel's mapped support and the
/// grid's guard interval, so no echo is truncated and every grid atom sees
/// its full 5% envelope.
pub fn sound_channel(
    channel: &Channel,
    wavelet: &MotherWavelet,
    grid: &TimeScaleGrid,
    probe_scale: f64,
    fs: f64,
) -> Result<ReflectivityEstimate> {
    let probe = probe_series(wavelet, probe_scale, fs)?;
    let (g_lo, g_hi) = grid.guard_interval(wavelet);
    let (lo, hi) = match channel.required_interval(&probe.axis) {
        Some((r_lo, r_hi)) => (r_lo.min(g_lo), r_hi.max(g_hi)),
        None => (g_lo, g_hi),
    };
    let out = probe.axis.enclosing(lo, hi)?;
    let received = channel.apply(&probe, &out)?;
    let c_psi = wavelet.admissibility();
    let field = transform::cwt(&received, wavelet, grid)?.scaled(Complex64::new(1.0 / c_psi, 0.0));
    Ok(ReflectivityEstimate {
        field,
        wavelet: *wavelet,
        probe_scale,
        probe_axis: probe.axis,
        received_axis: out,
    })
}

/// Direct swept-cell sounding: transmits `Re psi_{s_j, tau_k}` for every
/// grid cell and records the matched filter output
/// `H[j, k] = <psi_{j,k}, response>` on the receive window.
///
/// This is the brute-force counterpart of [`sound_channel`] — one
/// transmission per cell instead of one per sounding — useful as an
/// independent cross-check of the single-probe estimate. Noise is not
/// applied (a shared seed would correlate the cells); cost is
/// O(cells x window), so keep the grid small.
pub fn swept_matched_field(
    channel: &Channel,
    wavelet: &MotherWavelet,
    grid: &TimeScaleGrid,
    fs: f64,
) -> Result<TimeScaleField> {
    if !(fs.is_finite() && fs > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sample rate must be positive and finite, got {fs}"
        )));
    }
    let dt = 1.0 / fs;
    grid.check_sampling(dt)?;
    if channel.rays().is_empty() {
        return Ok(TimeScaleField::zeros(*grid));
    }
    let n_s = grid.n_scales();
    let n_t = grid.n_translations();
    let values = (0..n_s * n_t)
        .into_par_iter()
        .map(|idx| -> Result<Complex64> {
            let (j, k) = (idx / n_t, idx % n_t);
            let (s, tau) = (grid.scale(j), grid.tau(k));
            let atom = wavelet.atom(s, tau)?;
            let n_pad = (PROBE_HALF_WIDTH_SCALES * s * fs).ceil() as usize;
            let axis = TimeAxis::new(tau - n_pad as f64 * dt, dt, 2 * n_pad + 1)?;
            let x = TimeSeries::from_fn(axis, |t| Complex64::new(atom.eval(t).re, 0.0))?;
            let out = channel.required_axis(&axis)?;
            let y = channel.apply_noiseless(&x, &out)?;
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, v) in out.times().zip(&y.samples) {
                acc += atom.eval(t).conj() * v;
            }
            Ok(acc * dt)
        })
        .collect::<Result<Vec<_>>>()?;
    TimeScaleField::from_values(*grid, values)
}

/// One resolved echo, expressed as channel-level ray parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayEstimate {
    /// Estimated dilation factor `s0` (peak scale over probe scale).
    pub scale: f64,
    /// Estimated delay `tau0`, seconds.
    pub delay: f64,
    /// Estimated reflectivity magnitude `|pr|` (the field's phase is not
    /// used, so the bounce sign is not recovered).
    pub amplitude: f64,
}

/// Per-axis quadratic peak refinement from three magnitude samples: returns
/// the sub-cell offset in `[-1/2, 1/2]` and the value gain at the vertex.
fn refine_parabola(lo: f64, mid: f64, hi: f64) -> (f64, f64) {
    let curv = lo - 2.0 * mid + hi;
    if curv >= 0.0 {
        // Not a strict interior maximum of the parabola; keep the sample.
        return (0.0, 0.0);
    }
    let delta = 0.5 * (lo - hi) / curv;
    let gain = (lo - hi) * (lo - hi) / (8.0 * (-curv));
    (delta.clamp(-0.5, 0.5), gain)
}

/// Picks echoes out of an admissibility-normalized analysis field.
///
/// A cell qualifies when it is a strict 8-neighbor interior maximum of the
/// field magnitude and at least `rel_threshold` times the global maximum
/// (`rel_threshold` in `(0, 1]`). Each peak is refined independently along
/// the scale and translation axes with a three-point parabola, converted to
/// ray parameters against the probe scale, and calibrated by the known
/// self-response `||psi||^2 / (2 C_psi)`. Estimates are sorted by descending
/// amplitude (ties by delay, then scale). Boundary cells are never reported:
/// an echo on the grid edge is not localized, it is clipped.
pub fn resolve_echoes(
    field: &TimeScaleField,
    wavelet: &MotherWavelet,
    probe_scale: f64,
    rel_threshold: f64,
) -> Result<Vec<RayEstimate>> {
    if !(rel_threshold.is_finite() && rel_threshold > 0.0 && rel_threshold <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "relative threshold must lie in (0, 1], got {rel_threshold}"
        )));
    }
    if !(probe_scale.is_finite() && probe_scale > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "probe scale must be positive and finite, got {probe_scale}"
        )));
    }
    let grid = field.grid();
    let (n_s, n_t) = (grid.n_scales(), grid.n_translations());
    let mag: Vec<f64> = field.values().iter().map(|z| z.norm()).collect();
    let peak = mag.iter().cloned().fold(0.0f64, f64::max);
    if peak == 0.0 || n_s < 3 || n_t < 3 {
        return Ok(Vec::new());
    }
    let floor = rel_threshold * peak;
    let self_response = wavelet.norm_sq() / (2.0 * wavelet.admissibility());

    let mut found = Vec::new();
    for j in 1..n_s - 1 {
        for k in 1..n_t - 1 {
            let m0 = mag[j * n_t + k];
            if m0 < floor {
                continue;
            }
            let strict_max = (-1i64..=1)
                .flat_map(|dj| (-1i64..=1).map(move |dk| (dj, dk)))
                .filter(|&(dj, dk)| (dj, dk) != (0, 0))
                .all(|(dj, dk)| {
                    mag[(j as i64 + dj) as usize * n_t + (k as i64 + dk) as usize] < m0
                });
            if !strict_max {
                continue;
            }
            let (dj, gain_s) = refine_parabola(mag[(j - 1) * n_t + k], m0, mag[(j + 1) * n_t + k]);
            let (dk, gain_t) = refine_parabola(mag[j * n_t + k - 1], m0, mag[j * n_t + k + 1]);
            let value = m0 + gain_s + gain_t;
            let s_peak = grid.s_min() * ((j as f64 + dj) * grid.log2_spacing()).exp2();
            let tau_peak = grid.tau(k) + dk * grid.translations().step();
            found.push(RayEstimate {
                scale: s_peak / probe_scale,
                delay: tau_peak,
                amplitude: value / self_response,
            });
        }
    }
    found.sort_by(|a, b| {
        b.amplitude
            .partial_cmp(&a.amplitude)
            .expect("magnitudes are finite")
            .then(a.delay.partial_cmp(&b.delay).expect("delays are finite"))
            .then(a.scale.partial_cmp(&b.scale).expect("scales are finite"))
    });
    Ok(found)
}

/// A dense linear input/output map between two sampling axes.
#[derive(Debug, Clone)]
pub struct ChannelKernel {
    /// Row-major `out_axis.len() x in_axis.len()` matrix.
    pub matrix: Vec<Complex64>,
    /// Output sampling axis.
    pub out_axis: TimeAxis,
    /// Input sampling axis.
    pub in_axis: TimeAxis,
    /// When true, [`linear_apply`] returns only the real part: the map
    /// models a physical (real-in, real-out) system whose imaginary residue
    /// is analytic bookkeeping.
    pub real_system: bool,
}

/// Builds the probe-referred channel map from a sounding.
///
/// `M[p, q] = (4 / ||psi||^2) * F(t_p) * conj(psi_{sigma,0}(t_q))` with
/// `F = S[D]` the synthesized field. The map is exact on the span of the
/// probe (any `a * Re psi_{sigma,0}` is sent to `a * response`), which is
/// precisely what one sounding can know about the channel.
pub fn build_channel_kernel(
    est: &ReflectivityEstimate,
    out_axis: &TimeAxis,
    in_axis: &TimeAxis,
) -> Result<ChannelKernel> {
    let response = transform::synthesize(&est.field, &est.wavelet, out_axis)?;
    let probe_atom = est.wavelet.atom(est.probe_scale, 0.0)?;
    let gain = 4.0 / est.wavelet.norm_sq();
    let probe_conj: Vec<Complex64> =
        in_axis.times().map(|t| probe_atom.eval(t).conj() * gain).collect();
    let mut matrix = Vec::with_capacity(out_axis.len() * in_axis.len());
    for p in 0..out_axis.len() {
        let f = response.samples[p];
        matrix.extend(probe_conj.iter().map(|&g| f * g));
    }
    Ok(ChannelKernel { matrix, out_axis: *out_axis, in_axis: *in_axis, real_system: true })
}

/// Builds the symmetric, conjugate-free field expansion
/// `M[p, q] = sum_{j,k} w_j lambda_k D[j,k] psi_{j,k}(t_p) psi_{j,k}(t_q)`.
///
/// Kept as a diagnostic: the form is appealingly symmetric in `(t_p, t_q)`
/// but the missing conjugation makes the input side a time-reversed
/// correlation, so it does not reproduce delayed responses (see the
/// documenting test in this module). Cost is O(cells x out x in).
pub fn build_channel_kernel_symmetric(
    est: &ReflectivityEstimate,
    out_axis: &TimeAxis,
    in_axis: &TimeAxis,
) -> Result<ChannelKernel> {
    let grid = est.field.grid();
    let (p_len, q_len) = (out_axis.len(), in_axis.len());
    let mut matrix = vec![Complex64::new(0.0, 0.0); p_len * q_len];
    for j in 0..grid.n_scales() {
        let w_j = grid.scale_weight(j);
        for k in 0..grid.n_translations() {
            let coeff = est.field.at(j, k) * (w_j * grid.translation_weight(k));
            if coeff.norm_sqr() == 0.0 {
                continue;
            }
            let atom = est.wavelet.atom(grid.scale(j), grid.tau(k))?;
            let at_out: Vec<Complex64> = out_axis.times().map(|t| atom.eval(t)).collect();
            let at_in: Vec<Complex64> = in_axis.times().map(|t| atom.eval(t)).collect();
            for (p, &row_val) in at_out.iter().enumerate() {
                let f = coeff * row_val;
                let row = &mut matrix[p * q_len..(p + 1) * q_len];
                for (dst, &col_val) in row.iter_mut().zip(&at_in) {
                    *dst += f * col_val;
                }
            }
        }
    }
    Ok(ChannelKernel { matrix, out_axis: *out_axis, in_axis: *in_axis, real_system: true })
}

/// Applies a [`ChannelKernel`] to an input sampled on its input axis:
/// `y_p = dt_in * sum_q M[p, q] x_q`, real part only for real systems.
pub fn linear_apply(kernel: &ChannelKernel, x: &TimeSeries) -> Result<TimeSeries> {
    if x.axis != kernel.in_axis {
        return Err(Error::InvalidAxis("input is not sampled on the kernel's input axis".into()));
    }
    let q_len = kernel.in_axis.len();
    let dt = kernel.in_axis.step();
    let samples: Vec<Complex64> = (0..kernel.out_axis.len())
        .map(|p| {
            let row = &kernel.matrix[p * q_len..(p + 1) * q_len];
            let acc: Complex64 = row.iter().zip(&x.samples).map(|(m, v)| m * v).sum();
            let y = acc * dt;
            if kernel.real_system {
                Complex64::new(y.re, 0.0)
            } else {
                y
            }
        })
        .collect();
    TimeSeries::new(kernel.out_axis, samples)
}

/// Relative weighted distance between the field and its image under the
/// reproducing-kernel projector — near zero iff the field is consistent
/// with being the analysis of *some* signal, i.e. iff the sounding is
/// self-consistent.
pub fn kernel_consistency(est: &ReflectivityEstimate) -> Result<f64> {
    let projected = transform::kernel_project(&est.field, &est.wavelet)?;
    rel_weighted_distance(&projected, &est.field)
}
