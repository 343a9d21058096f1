//! On-disk artifact formats.
//!
//! Everything numeric is written as `{:.16e}` (17 significant digits), which
//! round-trips `f64` exactly: reading a file back and re-writing it
//! reproduces the bytes, and repeated runs of a deterministic computation
//! produce identical files.
//!
//! * **Field CSV** — a time-scale field as a matrix. Corner cell
//!   `scale_s\delay_s`, first row the translation axis, first column the
//!   scale ladder, body cells complex values as `re+imi` / `re-imi`.
//! * **Signal CSV** — `t_s,re,im` rows.
//! * **Rays CSV** — `s0_hat,tau0_hat_s,amp_hat` rows, one per resolved echo.
//! * **BER CSV** — `snr_db,n_bits,n_errors,ber` plus one `scale_snr_db_<i>`
//!   column per modem branch.
//! * **Field PGM** — binary (P5) grayscale of the field magnitude, one image
//!   row per scale row, normalized to the field's peak.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{bail, Context};
use num_complex::Complex64;

use scalewave::grid::{TimeScaleField, TimeScaleGrid};
use scalewave::modem::BerReport;
use scalewave::signal::{TimeAxis, TimeSeries};
use scalewave::sounding::RayEstimate;

/// Corner cell of a field CSV: row labels are scales, column labels delays.
const FIELD_CORNER: &str = "scale_s\\delay_s";

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_complex(z: Complex64) -> String {
    let sign = if z.im >= 0.0 { '+' } else { '-' };
    format!("{:.16e}{sign}{:.16e}i", z.re, z.im.abs())
}

fn parse_f64(cell: &str) -> anyhow::Result<f64> {
    cell.trim().parse::<f64>().with_context(|| format!("cannot parse number from {cell:?}"))
}

/// Parses `re+imi` / `re-imi`. The split sign is the one sign that does not
/// directly follow an exponent mark.
fn parse_complex(cell: &str) -> anyhow::Result<Complex64> {
    let cell = cell.trim();
    let Some(body) = cell.strip_suffix('i') else {
        bail!("complex cell {cell:?} does not end in 'i'");
    };
    let bytes = body.as_bytes();
    let mut split = None;
    for (i, &b) in bytes.iter().enumerate().skip(1) {
        if (b == b'+' || b == b'-') && bytes[i - 1] != b'e' && bytes[i - 1] != b'E' {
            if split.is_some() {
                bail!("complex cell {cell:?} has more than one separating sign");
            }
            split = Some(i);
        }
    }
    let Some(at) = split else {
        bail!("complex cell {cell:?} has no separating sign");
    };
    let re = parse_f64(&body[..at])?;
    let im_mag = parse_f64(&body[at + 1..])?;
    let im = if bytes[at] == b'+' { im_mag } else { -im_mag };
    Ok(Complex64::new(re, im))
}

/// Writes a time-scale field as a labeled CSV matrix.
pub fn write_field(path: &Path, field: &TimeScaleField) -> anyhow::Result<()> {
    let grid = field.grid();
    let mut out = String::new();
    out.push_str(FIELD_CORNER);
    for k in 0..grid.n_translations() {
        out.push(',');
        out.push_str(&fmt_f64(grid.tau(k)));
    }
    out.push('\n');
    for j in 0..grid.n_scales() {
        out.push_str(&fmt_f64(grid.scale(j)));
        for v in field.row(j) {
            out.push(',');
            out.push_str(&fmt_complex(*v));
        }
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// Reads a field CSV back, reconstructing and validating the grid.
pub fn read_field(path: &Path) -> anyhow::Result<TimeScaleField> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().context("field file is empty")?;
    let mut cells = header.split(',');
    let corner = cells.next().unwrap_or_default();
    if corner != FIELD_CORNER {
        bail!("not a field file: header starts with {corner:?}, expected {FIELD_CORNER:?}");
    }
    let taus: Vec<f64> = cells.map(parse_f64).collect::<Result<_, _>>()?;
    if taus.len() < 2 {
        bail!("field file has fewer than two translation columns");
    }
    let step = taus[1] - taus[0];
    let translations = TimeAxis::new(taus[0], step, taus.len())?;
    for (k, &tau) in taus.iter().enumerate() {
        if (tau - translations.at(k)).abs() > 1e-9 * step.abs() {
            bail!("translation column {k} is off the uniform lattice");
        }
    }

    let mut scales = Vec::new();
    let mut values = Vec::new();
    for (row, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut cells = line.split(',');
        scales.push(parse_f64(cells.next().context("missing scale label")?)?);
        let mut n = 0usize;
        for cell in cells {
            values.push(parse_complex(cell)?);
            n += 1;
        }
        if n != taus.len() {
            bail!("field row {row} has {n} cells, expected {}", taus.len());
        }
    }
    let grid = TimeScaleGrid::from_scales(&scales, translations)?;
    Ok(TimeScaleField::from_values(grid, values)?)
}

/// Writes the field magnitude as a binary PGM image (one row per scale,
/// darkest = zero, brightest = the field's peak magnitude).
pub fn write_field_pgm(path: &Path, field: &TimeScaleField) -> anyhow::Result<()> {
    let grid = field.grid();
    let (w, h) = (grid.n_translations(), grid.n_scales());
    let peak = field.max_abs().0;
    let mut bytes = Vec::with_capacity(32 + w * h);
    write!(&mut bytes, "P5\n{w} {h}\n255\n")?;
    for v in field.values() {
        let level = if peak > 0.0 { (v.norm() / peak * 255.0).round() as u8 } else { 0 };
        bytes.push(level);
    }
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

/// Writes a sampled signal as `t_s,re,im` rows.
pub fn write_signal(path: &Path, x: &TimeSeries) -> anyhow::Result<()> {
    let mut out = String::from("t_s,re,im\n");
    for (t, v) in x.axis.times().zip(&x.samples) {
        out.push_str(&fmt_f64(t));
        out.push(',');
        out.push_str(&fmt_f64(v.re));
        out.push(',');
        out.push_str(&fmt_f64(v.im));
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// Reads a signal CSV, validating the uniform time lattice.
pub fn read_signal(path: &Path) -> anyhow::Result<TimeSeries> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().context("signal file is empty")?;
    if header.trim() != "t_s,re,im" {
        bail!("not a signal file: header is {header:?}");
    }
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 3 {
            bail!("signal row has {} cells, expected 3", cells.len());
        }
        times.push(parse_f64(cells[0])?);
        samples.push(Complex64::new(parse_f64(cells[1])?, parse_f64(cells[2])?));
    }
    if times.len() < 2 {
        bail!("signal file has fewer than two samples");
    }
    let step = times[1] - times[0];
    let axis = TimeAxis::new(times[0], step, times.len())?;
    for (i, &t) in times.iter().enumerate() {
        if (t - axis.at(i)).abs() > 1e-6 * step.abs() {
            bail!("time column row {i} is off the uniform lattice");
        }
    }
    Ok(TimeSeries::new(axis, samples)?)
}

/// Writes resolved echoes as `s0_hat,tau0_hat_s,amp_hat` rows.
pub fn write_rays(path: &Path, rays: &[RayEstimate]) -> anyhow::Result<()> {
    let mut out = String::from("s0_hat,tau0_hat_s,amp_hat\n");
    for r in rays {
        out.push_str(&fmt_f64(r.scale));
        out.push(',');
        out.push_str(&fmt_f64(r.delay));
        out.push(',');
        out.push_str(&fmt_f64(r.amplitude));
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// Writes a BER sweep, one row per operating point.
pub fn write_ber(path: &Path, reports: &[BerReport]) -> anyhow::Result<()> {
    let n_branches = reports.first().map_or(0, |r| r.branch_snr_db.len());
    let mut out = String::from("snr_db,n_bits,n_errors,ber");
    for i in 0..n_branches {
        out.push_str(&format!(",scale_snr_db_{i}"));
    }
    out.push('\n');
    for r in reports {
        out.push_str(&fmt_f64(r.ebn0_db));
        out.push_str(&format!(",{},{},", r.n_bits, r.n_errors));
        out.push_str(&fmt_f64(r.ber));
        for snr in &r.branch_snr_db {
            out.push(',');
            out.push_str(&fmt_f64(*snr));
        }
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_cells_round_trip() {
        for z in [
            Complex64::new(1.25e-3, -4.5e-2),
            Complex64::new(-1.0, 2.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-3.5e-300, -7.1e300),
        ] {
            let cell = fmt_complex(z);
            let back = parse_complex(&cell).unwrap();
            assert_eq!(z.re.to_bits(), back.re.to_bits(), "{cell}");
            assert!(z.im == back.im || (z.im == 0.0 && back.im == 0.0), "{cell}");
        }
        assert!(parse_complex("1.0").is_err());
        assert!(parse_complex("1.0+2.0").is_err());
        assert!(parse_complex("1.0+2.0+3.0i").is_err());
    }

    #[test]
    fn field_csv_round_trips_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let translations = TimeAxis::new(0.0, 2.5e-10, 17).unwrap();
        let grid = TimeScaleGrid::new(1.0e-9, 2, 4, translations).unwrap();
        let values: Vec<Complex64> = (0..grid.n_cells())
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.7).cos()))
            .collect();
        let field = TimeScaleField::from_values(grid, values).unwrap();

        let p1 = dir.path().join("field.csv");
        let p2 = dir.path().join("field2.csv");
        write_field(&p1, &field).unwrap();
        let back = read_field(&p1).unwrap();
        write_field(&p2, &back).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
        assert_eq!(field.values(), back.values());
        assert_eq!(field.grid(), back.grid());
    }

    #[test]
    fn corrupted_scale_ladder_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let translations = TimeAxis::new(0.0, 2.5e-10, 9).unwrap();
        let grid = TimeScaleGrid::new(1.0e-9, 2, 2, translations).unwrap();
        let field = TimeScaleField::zeros(grid);
        let path = dir.path().join("field.csv");
        write_field(&path, &field).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        // Break one scale label off the geometric ladder.
        let corrupted = text.replacen(&fmt_f64(grid.scale(1)), &fmt_f64(1.7e-9), 1);
        assert_ne!(text, corrupted, "corruption should change the file");
        fs::write(&path, corrupted).unwrap();
        assert!(read_field(&path).is_err());
    }

    #[test]
    fn signal_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let axis = TimeAxis::new(-1.0e-9, 6.25e-11, 33).unwrap();
        let x = TimeSeries::from_fn(axis, |t| Complex64::new(t * 1e9, -t * 2e9)).unwrap();
        let path = dir.path().join("signal.csv");
        write_signal(&path, &x).unwrap();
        let back = read_signal(&path).unwrap();
        assert_eq!(back.samples, x.samples);
        assert!((back.axis.start() - axis.start()).abs() < 1e-24);
        assert_eq!(back.axis.len(), axis.len());
    }

    #[test]
    fn pgm_has_correct_header_and_size() {
        let dir = tempfile::tempdir().unwrap();
        let translations = TimeAxis::new(0.0, 1.0e-10, 7).unwrap();
        let grid = TimeScaleGrid::new(1.0e-9, 1, 3, translations).unwrap();
        let mut field = TimeScaleField::zeros(grid);
        field.set(1, 3, Complex64::new(2.0, 0.0));
        let path = dir.path().join("field.pgm");
        write_field_pgm(&path, &field).unwrap();
        let bytes = fs::read(&path).unwrap();
        let header = b"P5\n7 4\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(bytes.len(), header.len() + 7 * 4);
        assert_eq!(bytes[header.len() + 7 + 3], 255, "peak pixel must be white");
    }
}
