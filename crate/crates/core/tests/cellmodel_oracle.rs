use std::f64::consts::PI;

use ripplemod_core::cellmodel::{
    randles_impedance, rc_ladder_oracle, spectral_loss, ImpedanceModel, RandlesParams, SpectralLine,
};

fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let n = ((hi / lo).log10() * per_decade as f64).round() as usize;
    (0..=n).map(|k| lo * 10f64.powf(k as f64 / per_decade as f64)).collect()
}

fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

#[test]
fn magnitude_never_rises_with_frequency() {
    let p = RandlesParams::default();
    let mut prev = f64::INFINITY;
    for f in log_grid(1e-3, 1e6, 40) {
        let m = randles_impedance(&p, f).unwrap().norm();
        assert!(m <= prev, "|Z| rises at {f} Hz");
        prev = m;
    }
}

#[test]
fn plateau_is_the_electrolyte_resistance() {
    let p = RandlesParams::default();
    let z = randles_impedance(&p, 1e6).unwrap();
    assert!((z.norm() - p.r_el).abs() <= 0.01 * p.r_el);
}

#[test]
fn transition_band_falls_between_diffusion_and_capacitor() {
    // Above the double-layer corner the capacitor takes over from charge
    // transfer and diffusion; the excess over the plateau falls off there.
    for p in [
        RandlesParams::default(),
        RandlesParams { c_dl: 0.5, ..Default::default() },
        RandlesParams { sigma_w: 0.02, ..Default::default() },
    ] {
        let corner = p.double_layer_corner();
        let pts: Vec<(f64, f64)> = log_grid(corner, 10.0 * corner, 20)
            .into_iter()
            .map(|f| (f, (randles_impedance(&p, f).unwrap() - p.r_el).norm()))
            .collect();
        let s = loglog_slope(&pts);
        assert!((-1.0..=-0.5).contains(&s), "{p:?}: slope {s}");
    }
}

/// A cosine tone with whole periods at `fs`; cosine keeps the integral of
/// the current free of an offset.
fn tone(f: f64, amplitude: f64, fs: f64) -> Vec<f64> {
    let per_period = (fs / f).round() as usize;
    let periods = ((0.02 * f).ceil() as usize).max(1);
    (0..per_period * periods)
        .map(|k| amplitude * (2.0 * PI * f * k as f64 / fs).cos())
        .collect()
}

#[test]
fn spectral_loss_matches_ladder_per_tone() {
    let p = RandlesParams::default();
    let fs = 200_000.0;
    for f in [10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0, 2000.0, 5000.0] {
        let amplitude = 4.0;
        let current = tone(f, amplitude, fs);
        let line = SpectralLine {
            frequency: f,
            mean_square: amplitude * amplitude / 2.0,
        };
        let spectral = spectral_loss(&p, 1.0, [line]).unwrap();
        let ladder = rc_ladder_oracle(&current, &p, fs, 64).unwrap();
        let err = (spectral - ladder).abs() / ladder;
        assert!(err < 0.05, "{f} Hz: spectral {spectral} ladder {ladder} ({err})");
    }
}

#[test]
fn spectral_loss_matches_ladder_for_a_tone_mix() {
    let p = RandlesParams::default();
    let fs = 200_000.0;
    let n = 20_000;
    let tones = [(50.0, 3.0), (100.0, 6.0), (1000.0, 2.0), (5000.0, 1.0)];
    let current: Vec<f64> = (0..n)
        .map(|k| {
            let t = k as f64 / fs;
            tones.iter().map(|(f, a)| a * (2.0 * PI * f * t).cos()).sum()
        })
        .collect();
    let lines = tones.iter().map(|&(f, a)| SpectralLine {
        frequency: f,
        mean_square: a * a / 2.0,
    });
    let spectral = spectral_loss(&p, 10.0, lines).unwrap();
    let ladder = rc_ladder_oracle(&current, &p, fs, 64).unwrap();
    assert!((spectral - ladder).abs() / ladder < 0.05, "{spectral} vs {ladder}");
}

#[test]
fn loss_weight_falls_toward_electrolyte() {
    let p = RandlesParams::default();
    let low = p.impedance(1.0).unwrap().re;
    let high = p.impedance(5000.0).unwrap().re;
    assert!(low > 1.5 * high);
    assert!(high >= p.r_el);
}
