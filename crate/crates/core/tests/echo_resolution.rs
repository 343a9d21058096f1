//! End-to-end sounding at the bundled two-ray reference geometry: probe a
//! two-path channel, analyze the response, and recover both rays' delay,
//! dilation, and reflectivity from the time-scale field.

use scalewave::channel::{Channel, NoiseSpec, Ray};
use scalewave::grid::TimeScaleGrid;
use scalewave::signal::TimeAxis;
use scalewave::sounding::sound_channel;
use scalewave::wavelet::MotherWavelet;

const C: f64 = 3.0e8;
const FS: f64 = 1.6e10;
const DT: f64 = 1.0 / FS;
const PROBE_SCALE: f64 = 1.0e-9;

fn two_ray_channel() -> Channel {
    let rays = vec![
        Ray::new(1.5, 1.5, 0.0, 0.0, 1.0).unwrap(), // 10 ns, full strength
        Ray::new(3.0, 3.0, 0.0, 0.0, 0.7).unwrap(), // 20 ns, 0.7
    ];
    Channel::new(rays, C).unwrap()
}

/// Six octaves, eight voices, translations at the sample period over
/// [0, 32 ns] — the grid of the bundled two-ray scenario.
fn reference_grid() -> TimeScaleGrid {
    let translations = TimeAxis::new(0.0, DT, 513).unwrap();
    TimeScaleGrid::new(1.25e-10, 6, 8, translations).unwrap()
}

#[test]
fn both_echoes_are_recovered_with_calibrated_parameters() {
    let wavelet = MotherWavelet::new(3).unwrap();
    let est =
        sound_channel(&two_ray_channel(), &wavelet, &reference_grid(), PROBE_SCALE, FS).unwrap();
    let hits = est.resolve(0.1).unwrap();
    assert!(hits.len() >= 2, "expected two echoes, got {hits:?}");

    let first = hits[0];
    assert!((first.delay - 1.0e-8).abs() <= DT, "first delay {} s", first.delay);
    assert!(first.scale.log2().abs() <= 0.125, "first dilation {}", first.scale);
    assert!((first.amplitude - 1.0).abs() <= 0.05, "first amplitude {}", first.amplitude);

    let second = hits[1];
    assert!((second.delay - 2.0e-8).abs() <= DT, "second delay {} s", second.delay);
    assert!(second.scale.log2().abs() <= 0.125, "second dilation {}", second.scale);
    assert!((second.amplitude - 0.7).abs() <= 0.05 * 0.7, "second amplitude {}", second.amplitude);

    // Nothing else above a tenth of the peak should masquerade as a path.
    for extra in &hits[2..] {
        assert!(
            extra.amplitude < 0.2,
            "spurious echo at {} s with amplitude {}",
            extra.delay,
            extra.amplitude
        );
    }
}

#[test]
fn noisy_soundings_are_bit_reproducible() {
    let wavelet = MotherWavelet::new(3).unwrap();
    let channel = two_ray_channel().with_noise(NoiseSpec { snr_db: 25.0, seed: 5 });
    let grid = reference_grid();
    let a = sound_channel(&channel, &wavelet, &grid, PROBE_SCALE, FS).unwrap();
    let b = sound_channel(&channel, &wavelet, &grid, PROBE_SCALE, FS).unwrap();
    assert_eq!(a.field.values(), b.field.values(), "same seed must reproduce the field");

    let other = two_ray_channel().with_noise(NoiseSpec { snr_db: 25.0, seed: 6 });
    let c = sound_channel(&other, &wavelet, &grid, PROBE_SCALE, FS).unwrap();
    assert_ne!(a.field.values(), c.field.values(), "different seeds must differ");
}
