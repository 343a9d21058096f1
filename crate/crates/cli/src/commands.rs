//! Subcommand definitions and their implementations.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use scalewave::sounding::{self, kernel_consistency, probe_series, resolve_echoes, sound_channel};
use scalewave::transform;
use scalewave::wavelet::MotherWavelet;

use crate::formats;
use crate::scenario::Scenario;

/// A numeric check ran to completion but exceeded its tolerance. Mapped to
/// exit code 2 (distinct from configuration errors, which exit 1).
#[derive(Debug)]
pub struct ToleranceBreach(pub String);

impl fmt::Display for ToleranceBreach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ToleranceBreach {}

/// Wavelet-domain characterization of wideband multipath channels:
/// simulate, sound, resolve echoes, rebuild kernels, and sweep modem error
/// rates — all driven by JSON scenario files.
#[derive(Debug, Parser)]
#[command(name = "scalewave", version, about, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print closed-form constants of an analyzing wavelet family.
    WaveletInfo(WaveletInfoArgs),
    /// Probe a channel and write the time-scale field of the response.
    Sound(SoundArgs),
    /// Pick echoes out of a stored field and write ray estimates.
    Resolve(ResolveArgs),
    /// Sound a channel and check the field's self-consistency under the
    /// reproducing-kernel projector.
    KernelCheck(KernelCheckArgs),
    /// Synthesize a signal back from a stored field, optionally comparing
    /// it against a reference recording.
    Reconstruct(ReconstructArgs),
    /// Sweep the multi-scale modem's bit error rate over Eb/N0.
    Modem(ModemArgs),
}

#[derive(Debug, Args)]
pub struct WaveletInfoArgs {
    /// Wavelet order (vanishing-moment count of the spectral window).
    #[arg(long, default_value_t = 3)]
    pub order: u32,
}

#[derive(Debug, Args)]
pub struct SoundArgs {
    /// Scenario file (must declare a probe).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output directory (default: the scenario's `outputs.dir`, else `.`).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Transmit one atom per grid cell instead of a single probe (slow;
    /// writes swept.csv/swept.pgm instead of field.csv/field.pgm).
    #[arg(long)]
    pub swept: bool,
}

#[derive(Debug, Args)]
pub struct ResolveArgs {
    /// Field CSV produced by `sound`.
    #[arg(long)]
    pub field: PathBuf,
    /// Scenario file supplying the wavelet order and probe scale.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Wavelet order (overrides the scenario).
    #[arg(long)]
    pub order: Option<u32>,
    /// Probe scale in seconds (overrides the scenario).
    #[arg(long)]
    pub probe_scale: Option<f64>,
    /// Report peaks down to this fraction of the strongest one.
    #[arg(long, default_value_t = 0.1)]
    pub threshold: f64,
    /// Where to write the ray estimates.
    #[arg(long, default_value = "rays.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct KernelCheckArgs {
    /// Scenario file (must declare a probe).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Largest acceptable relative consistency residual.
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Field CSV produced by `sound`.
    #[arg(long)]
    pub field: PathBuf,
    /// Scenario file supplying the wavelet order.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Wavelet order (overrides the scenario).
    #[arg(long)]
    pub order: Option<u32>,
    /// Reference signal CSV to compare against (the reconstruction is then
    /// synthesized on the reference's own axis).
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Largest acceptable relative L2 error against the reference.
    #[arg(long, default_value_t = 1e-2)]
    pub tolerance: f64,
    /// Edge exclusion for the comparison, in units of the largest analyzed
    /// scale's RMS width.
    #[arg(long, default_value_t = 5.0)]
    pub pad_widths: f64,
    /// Where to write the reconstructed signal.
    #[arg(long, default_value = "reconstruction.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ModemArgs {
    /// Scenario file (must declare a modem and at least one ray).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Eb/N0 operating points in dB.
    #[arg(long, value_delimiter = ',', default_value = "0,5,10,15,20")]
    pub snr_db: Vec<f64>,
    /// Bits per operating point.
    #[arg(long, default_value_t = 10_000)]
    pub bits: usize,
    /// Seed of the bit and noise generators.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Where to write the sweep.
    #[arg(long, default_value = "ber.csv")]
    pub out: PathBuf,
}

/// Dispatches a parsed command line.
pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::WaveletInfo(args) => wavelet_info(&args),
        Command::Sound(args) => sound(&args),
        Command::Resolve(args) => resolve(&args),
        Command::KernelCheck(args) => kernel_check(&args),
        Command::Reconstruct(args) => reconstruct(&args),
        Command::Modem(args) => modem(&args),
    }
}

fn wavelet_info(args: &WaveletInfoArgs) -> anyhow::Result<()> {
    let w = MotherWavelet::new(args.order)?;
    println!("order: {}", w.order());
    println!("admissibility (closed form): {:.16e}", w.admissibility());
    println!("admissibility (quadrature):  {:.16e}", w.admissibility_quadrature());
    println!("norm^2: {:.16e}", w.norm_sq());
    println!("rms width (unit scale): {:.16e}", w.rms_width());
    println!("effective half width at 5%: {:.16e}", w.effective_half_width(0.05)?);
    println!("effective half width at 1%: {:.16e}", w.effective_half_width(0.01)?);
    println!("spectral peak (rad/s at unit scale): {:.16e}", w.peak_frequency());
    Ok(())
}

/// Output directory resolution: flag, then scenario, then the working dir.
fn out_dir(flag: &Option<PathBuf>, scenario: &Scenario) -> anyhow::Result<PathBuf> {
    let dir = flag
        .clone()
        .or_else(|| scenario.outputs.as_ref().map(|o| PathBuf::from(&o.dir)))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    Ok(dir)
}

fn require_probe(scenario: &Scenario, path: &Path) -> anyhow::Result<f64> {
    scenario.probe_scale().with_context(|| {
        format!("scenario {} declares no probe (a `probe.scale` entry is required)", path.display())
    })
}

fn sound(args: &SoundArgs) -> anyhow::Result<()> {
    let scenario = Scenario::load(&args.scenario)?;
    let channel = scenario.channel()?;
    let wavelet = scenario.wavelet()?;
    let grid = scenario.grid()?;
    let dir = out_dir(&args.out_dir, &scenario)?;

    if args.swept {
        let field = sounding::swept_matched_field(&channel, &wavelet, &grid, scenario.fs())?;
        let csv = dir.join("swept.csv");
        formats::write_field(&csv, &field)?;
        formats::write_field_pgm(&dir.join("swept.pgm"), &field)?;
        let (peak, j, k) = field.max_abs();
        println!("swept matched field: {} cells", field.values().len());
        println!(
            "peak |H| = {peak:.6e} at scale {:.6e} s, delay {:.6e} s",
            grid.scale(j),
            grid.tau(k)
        );
        println!("wrote {}", csv.display());
        return Ok(());
    }

    let probe_scale = require_probe(&scenario, &args.scenario)?;
    let est = sound_channel(&channel, &wavelet, &grid, probe_scale, scenario.fs())?;

    // Re-apply the channel to store the received waveform alongside the
    // field (the sounding itself is seeded, so this reproduces it exactly).
    let probe = probe_series(&wavelet, probe_scale, scenario.fs())?;
    let received = channel.apply(&probe, &est.received_axis)?;

    let csv = dir.join("field.csv");
    formats::write_field(&csv, &est.field)?;
    formats::write_field_pgm(&dir.join("field.pgm"), &est.field)?;
    formats::write_signal(&dir.join("received.csv"), &received)?;

    let (peak, j, k) = est.field.max_abs();
    println!("sounded {} rays at probe scale {probe_scale:.6e} s", channel.rays().len());
    println!(
        "field: {} scales x {} delays, peak |D| = {peak:.6e} at scale {:.6e} s, delay {:.6e} s",
        grid.n_scales(),
        grid.n_translations(),
        grid.scale(j),
        grid.tau(k)
    );
    println!("wrote {}", csv.display());
    Ok(())
}

fn resolve(args: &ResolveArgs) -> anyhow::Result<()> {
    let scenario = match &args.scenario {
        Some(path) => Some(Scenario::load(path)?),
        None => None,
    };
    let order = args
        .order
        .or_else(|| scenario.as_ref().map(|s| s.wavelet.order))
        .context("no wavelet order: pass --order or --scenario")?;
    let probe_scale = args
        .probe_scale
        .or_else(|| scenario.as_ref().and_then(|s| s.probe_scale()))
        .context("no probe scale: pass --probe-scale or a scenario with a probe")?;
    let wavelet = MotherWavelet::new(order)?;
    let field = formats::read_field(&args.field)?;
    let estimates = resolve_echoes(&field, &wavelet, probe_scale, args.threshold)?;
    formats::write_rays(&args.out, &estimates)?;
    println!("resolved {} echo(es) above {:.3} of the peak", estimates.len(), args.threshold);
    for (i, e) in estimates.iter().enumerate() {
        println!(
            "echo {i}: s0 = {:.6e}, tau0 = {:.6e} s, amplitude = {:.6e}",
            e.scale, e.delay, e.amplitude
        );
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn kernel_check(args: &KernelCheckArgs) -> anyhow::Result<()> {
    let scenario = Scenario::load(&args.scenario)?;
    let probe_scale = require_probe(&scenario, &args.scenario)?;
    let est = sound_channel(
        &scenario.channel()?,
        &scenario.wavelet()?,
        &scenario.grid()?,
        probe_scale,
        scenario.fs(),
    )?;
    let residual = kernel_consistency(&est)?;
    println!("kernel consistency residual: {residual:.6e} (tolerance {:.3e})", args.tolerance);
    if residual.is_nan() || residual > args.tolerance {
        return Err(ToleranceBreach(format!(
            "consistency residual {residual:.6e} exceeds tolerance {:.3e}",
            args.tolerance
        ))
        .into());
    }
    println!("PASS");
    Ok(())
}

fn reconstruct(args: &ReconstructArgs) -> anyhow::Result<()> {
    let scenario = match &args.scenario {
        Some(path) => Some(Scenario::load(path)?),
        None => None,
    };
    let order = args
        .order
        .or_else(|| scenario.as_ref().map(|s| s.wavelet.order))
        .context("no wavelet order: pass --order or --scenario")?;
    let wavelet = MotherWavelet::new(order)?;
    let field = formats::read_field(&args.field)?;

    let reference = match &args.reference {
        Some(path) => Some(formats::read_signal(path)?),
        None => None,
    };
    let out_axis = match &reference {
        Some(r) => r.axis,
        None => *field.grid().translations(),
    };
    // Fields on disk are admissibility-normalized (`sound` stores cwt/C),
    // so the inversion factor 2/C reduces to a plain 2 Re of the synthesis.
    let synth = transform::synthesize(&field, &wavelet, &out_axis)?;
    let rebuilt = scalewave::signal::TimeSeries::new(
        out_axis,
        synth.samples.iter().map(|z| num_complex::Complex64::new(2.0 * z.re, 0.0)).collect(),
    )?;
    formats::write_signal(&args.out, &rebuilt)?;
    println!(
        "reconstructed {} samples onto [{:.6e}, {:.6e}] s",
        out_axis.len(),
        out_axis.start(),
        out_axis.end()
    );
    println!("wrote {}", args.out.display());

    if let Some(reference) = reference {
        // Exclude the edges, where the translation grid necessarily
        // truncates the largest atoms.
        let trim = args.pad_widths * field.grid().max_scale() * wavelet.rms_width();
        let (lo, hi) = (out_axis.start() + trim, out_axis.end() - trim);
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        let mut used = 0usize;
        for (i, t) in out_axis.times().enumerate() {
            if t < lo || t > hi {
                continue;
            }
            num += (rebuilt.samples[i] - reference.samples[i]).norm_sqr();
            den += reference.samples[i].norm_sqr();
            used += 1;
        }
        if used == 0 || den == 0.0 {
            bail!(
                "comparison window is empty after trimming {trim:.3e} s per edge; \
                 reduce --pad-widths"
            );
        }
        let err = (num / den).sqrt();
        println!(
            "relative L2 error vs reference: {err:.6e} over {used} samples (tolerance {:.3e})",
            args.tolerance
        );
        if err.is_nan() || err > args.tolerance {
            return Err(ToleranceBreach(format!(
                "reconstruction error {err:.6e} exceeds tolerance {:.3e}",
                args.tolerance
            ))
            .into());
        }
        println!("PASS");
    }
    Ok(())
}

fn modem(args: &ModemArgs) -> anyhow::Result<()> {
    let scenario = Scenario::load(&args.scenario)?;
    let modem = scenario
        .modem()?
        .with_context(|| format!("scenario {} declares no modem", args.scenario.display()))?;
    let channel = scenario.channel()?;
    if args.snr_db.is_empty() {
        bail!("--snr-db needs at least one operating point");
    }
    let mut reports = Vec::with_capacity(args.snr_db.len());
    println!("Eb/N0 sweep: {} bits per point, seed {}", args.bits, args.seed);
    for &ebn0 in &args.snr_db {
        let report = modem.ber_run(&channel, ebn0, args.bits, args.seed)?;
        println!(
            "{ebn0:>6.2} dB: {:>6} errors / {} bits, BER = {:.6e} (antipodal reference {:.6e})",
            report.n_errors,
            report.n_bits,
            report.ber,
            scalewave::modem::antipodal_ber(ebn0)
        );
        reports.push(report);
    }
    formats::write_ber(&args.out, &reports)?;
    println!("wrote {}", args.out.display());
    Ok(())
}
