//! Wall-clock scaling of the detectors against the amoeba radius.

use std::time::Instant;

use serde::Serialize;

use crate::detector::{run_detector, DetectorKind, DetectorParams};
use crate::error::{Error, Result};
use crate::img::Image;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub detector: String,
    /// Amoeba radius, or the square SE radius for classic detectors.
    pub r: f64,
    pub median_ms: f64,
    pub runs: usize,
    /// Fitted `a * r^2 * ln r`; empty for classic detectors.
    pub fit_ms: Option<f64>,
    /// `|measured - fit| / measured`.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub detector: DetectorKind,
    /// Coefficient `a` in milliseconds.
    pub a: f64,
    pub max_residual: f64,
    /// `a` and `b` of the affine fit `a * r^2 * ln r + b`, and its worst
    /// relative residual.
    pub affine: (f64, f64),
    pub affine_max_residual: f64,
    pub strictly_increasing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub fits: Vec<ScalingFit>,
}

impl BenchReport {
    /// Median time of `detector` at radius `r`.
    pub fn median_ms(&self, detector: DetectorKind, r: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|row| row.detector == detector.as_str() && row.r == r)
            .map(|row| row.median_ms)
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn time_detector(kind: DetectorKind, image: &Image<f64>, params: &DetectorParams, runs: usize) -> Result<f64> {
    let mut times = Vec::with_capacity(runs);
    for _ in 0..runs {
        let start = Instant::now();
        let out = run_detector(kind, image, params)?;
        times.push(start.elapsed().as_secs_f64() * 1e3);
        std::hint::black_box(out);
    }
    Ok(median(times))
}

/// Least-squares `a` for `t ~ a * g` and the per-point relative residuals.
pub fn fit_r2_log_r(radii: &[f64], times: &[f64]) -> (f64, Vec<f64>) {
    let g: Vec<f64> = radii.iter().map(|&r| r * r * r.ln()).collect();
    let a = g.iter().zip(times).map(|(g, t)| g * t).sum::<f64>() / g.iter().map(|g| g * g).sum::<f64>();
    let residuals = g.iter().zip(times).map(|(g, t)| (t - a * g).abs() / t).collect();
    (a, residuals)
}

/// Least-squares `(a, b)` for `t ~ a * g + b` and the relative residuals.
pub fn fit_affine_r2_log_r(radii: &[f64], times: &[f64]) -> ((f64, f64), Vec<f64>) {
    let g: Vec<f64> = radii.iter().map(|&r| r * r * r.ln()).collect();
    let n = g.len() as f64;
    let mg = g.iter().sum::<f64>() / n;
    let mt = times.iter().sum::<f64>() / n;
    let sgg: f64 = g.iter().map(|g| (g - mg) * (g - mg)).sum();
    let sgt: f64 = g.iter().zip(times).map(|(g, t)| (g - mg) * (t - mt)).sum();
    let a = if sgg > 0.0 { sgt / sgg } else { 0.0 };
    let b = mt - a * mg;
    let residuals = g.iter().zip(times).map(|(g, t)| (t - a * g - b).abs() / t).collect();
    ((a, b), residuals)
}

/// Times every amoeba detector at each radius (median of `runs`), fits
/// `a * r^2 * ln r` per detector and times the classic detectors once at
/// `base.se_radius` as a reference.
pub fn run_bench(image: &Image<f64>, radii: &[f64], runs: usize, base: &DetectorParams) -> Result<BenchReport> {
    if runs == 0 {
        return Err(Error::InvalidParameter("bench needs at least one run".into()));
    }
    if radii.iter().any(|&r| r <= 1.0) {
        return Err(Error::InvalidParameter("bench radii must exceed 1".into()));
    }
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for kind in [DetectorKind::Mg, DetectorKind::Bm, DetectorKind::Atm, DetectorKind::Rnm] {
        rows.push(BenchRow {
            detector: kind.to_string(),
            r: base.se_radius as f64,
            median_ms: time_detector(kind, image, base, runs)?,
            runs,
            fit_ms: None,
            residual: None,
        });
    }
    for kind in [DetectorKind::Amg, DetectorKind::Abm, DetectorKind::Aatm, DetectorKind::Arnm] {
        let times = radii
            .iter()
            .map(|&r| time_detector(kind, image, &DetectorParams { r, ..*base }, runs))
            .collect::<Result<Vec<_>>>()?;
        let (a, residuals) = fit_r2_log_r(radii, &times);
        let (affine, affine_res) = fit_affine_r2_log_r(radii, &times);
        for ((&r, &t), &res) in radii.iter().zip(&times).zip(&residuals) {
            rows.push(BenchRow {
                detector: kind.to_string(),
                r,
                median_ms: t,
                runs,
                fit_ms: Some(a * r * r * r.ln()),
                residual: Some(res),
            });
        }
        fits.push(ScalingFit {
            detector: kind,
            a,
            max_residual: residuals.iter().copied().fold(0.0, f64::max),
            affine,
            affine_max_residual: affine_res.iter().copied().fold(0.0, f64::max),
            strictly_increasing: times.windows(2).all(|w| w[1] > w[0]),
        });
    }
    Ok(BenchReport { rows, fits })
}

pub fn bench_csv(report: &BenchReport) -> Result<Vec<u8>> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for row in &report.rows {
        wtr.serialize(row)?;
    }
    wtr.into_inner()
        .map_err(|e| Error::InvalidParameter(format!("CSV buffer: {e}")))
}
