//! Time-scale analysis of wideband multipath channels.
//!
//! This crate models propagation channels whose echoes both **delay** and
//! **dilate** a transmitted waveform (moving reflectors seen by a wideband
//! signal), and provides the numerical machinery to characterize such channels
//! in the joint time-scale plane:
//!
//! * [`wavelet`] — an analytic (progressive) mother wavelet family with
//!   closed-form admissibility, norms, and atom inner products;
//! * [`transform`] — the continuous wavelet transform (CWT) on log-scale /
//!   uniform-translation grids, the dual synthesis and real-signal inversion,
//!   the reproducing kernel of the family, and the associated projector onto
//!   the range of the CWT;
//! * [`channel`] — wideband ray channels: each ray maps a waveform
//!   `x(t) -> pr * s0^{-1/2} * x((t - tau0)/s0)`, with the pair `(s0, tau0)`
//!   derived from reflector ranges and radial velocities;
//! * [`sounding`] — estimation of a channel's time-scale reflectivity from a
//!   single probe atom, echo extraction with sub-cell refinement, and
//!   construction of a linear kernel that replays the sounded channel;
//! * [`modem`] — a dyadic multiscale (fractal) modem that repeats each bit
//!   across several scales of an orthonormal Haar family, with diversity
//!   combining and Monte-Carlo BER measurement.
//!
//! # Conventions
//!
//! Inner products are linear in the **second** argument,
//! `<f, g> = integral conj(f(t)) g(t) dt`, and the Fourier transform is
//! `F(w) = integral f(t) exp(-i w t) dt`. A time-scale atom at scale `s > 0`
//! and translation `tau` is `psi_{s,tau}(t) = s^{-1/2} psi((t - tau)/s)`, so
//! the CWT of `f` is `F(s, tau) = <psi_{s,tau}, f>`.
//!
//! All quantities carry SI units (seconds, meters, hertz); scales `s` are
//! dimensionless dilation factors when attached to rays and have units of
//! seconds when they denote atom durations on a grid.
//!
//! # Determinism
//!
//! Every randomized routine takes an explicit seed and uses a counter-based
//! generator (ChaCha, with per-block streams), and every parallel loop
//! combines its partial results in a fixed order, so identical inputs produce
//! bit-identical outputs regardless of thread count.

pub mod channel;
pub mod error;
pub mod grid;
pub mod modem;
pub mod signal;
pub mod sounding;
pub mod transform;
pub mod wavelet;

pub use error::{Error, Result};
