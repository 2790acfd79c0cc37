//! Spectral helpers for uniformly sampled real time series.

/// Magnitudes of the discrete Fourier transform at bins 0..=N/2.
///
/// Plain O(N^2) evaluation; series in this crate are a few thousand samples
/// at most.
pub fn dft_magnitudes(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut out = Vec::with_capacity(n / 2 + 1);
    for k in 0..=n / 2 {
        let (mut re, mut im) = (0.0, 0.0);
        for (j, &v) in values.iter().enumerate() {
            let phase = -std::f64::consts::TAU * (k * j) as f64 / n as f64;
            re += v * phase.cos();
            im += v * phase.sin();
        }
        out.push((re * re + im * im).sqrt());
    }
    out
}

/// Dominant angular frequency of a uniformly sampled series, rad per time
/// unit of `dt`.
///
/// Mean-subtracted, Hann-windowed DFT with log-parabolic interpolation of
/// the peak bin. Returns `None` when no oscillatory component stands out
/// (peak on the DC shoulder or at Nyquist, or a flat series).
pub fn dominant_angular_frequency(values: &[f64], dt: f64) -> Option<f64> {
    let n = values.len();
    if n < 8 || !(dt > 0.0) {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let scale = values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    if scale < 1e-12 {
        return None;
    }
    let windowed: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let w = 0.5 - 0.5 * (std::f64::consts::TAU * j as f64 / (n - 1) as f64).cos();
            (v - mean) * w
        })
        .collect();
    let mags = dft_magnitudes(&windowed);
    let (mut k_peak, mut best) = (0, 0.0);
    for (k, &m) in mags.iter().enumerate().skip(1) {
        if m > best {
            best = m;
            k_peak = k;
        }
    }
    if k_peak < 2 || k_peak + 1 >= mags.len() {
        return None;
    }
    // log-parabolic refinement around the peak bin
    let (lm, l0, lp) = (
        mags[k_peak - 1].max(1e-300).ln(),
        mags[k_peak].max(1e-300).ln(),
        mags[k_peak + 1].max(1e-300).ln(),
    );
    let denom = lm - 2.0 * l0 + lp;
    let delta = if denom.abs() > 1e-12 { 0.5 * (lm - lp) / denom } else { 0.0 };
    let delta = delta.clamp(-0.5, 0.5);
    Some(std::f64::consts::TAU * (k_peak as f64 + delta) / (n as f64 * dt))
}

/// Least-squares slope of ln|values - floor| over the leading samples where
/// the deviation is resolvable. Used as a decay-rate estimate for
/// over-damped series.
pub fn log_decay_rate(times: &[f64], values: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter_map(|(&t, &v)| {
            let d = (v - floor).abs();
            (d > 1e-10).then(|| (t, d.ln()))
        })
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return None;
    }
    Some(-(n * sxy - sx * sy) / denom)
}
