//! Reproducible experiment cells: run one detector on one noisy benchmark
//! image and score it. Sweeps and the CSV log are built from these.

use std::collections::HashSet;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::detector::{run_detector, DetectorKind, DetectorParams};
use crate::edge_map::GroundTruth;
use crate::error::{Error, Result};
use crate::eval::{evaluate, EvalReport, ThresholdSampling, DEFAULT_FOM_ALPHA};
use crate::img::Image;
use crate::io_util::atomic_write;
use crate::noise::{NoiseKind, NoiseSpec};
use crate::VERSION;

/// One row of the results CSV. Column order is fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub detector: String,
    pub noise_kind: String,
    pub noise_level: f64,
    pub r: f64,
    pub lambda: f64,
    pub beta: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub se_radius: usize,
    pub window_n: usize,
    pub trim_alpha: f64,
    pub pilot_sigma: f64,
    pub threshold: f64,
    pub fom: f64,
    pub auc: f64,
    pub wall_ms: f64,
    pub seed: u64,
    pub version: String,
}

pub const CSV_COLUMNS: [&str; 18] = [
    "detector",
    "noise_kind",
    "noise_level",
    "r",
    "lambda",
    "beta",
    "beta1",
    "beta2",
    "se_radius",
    "window_n",
    "trim_alpha",
    "pilot_sigma",
    "threshold",
    "fom",
    "auc",
    "wall_ms",
    "seed",
    "version",
];

impl ResultRow {
    /// Identity of the cell: every column except the metrics, timing and
    /// version.
    pub fn key(&self) -> String {
        format!(
            "{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}",
            self.detector,
            self.noise_kind,
            self.noise_level,
            self.r,
            self.lambda,
            self.beta,
            self.beta1,
            self.beta2,
            self.se_radius,
            self.window_n,
            self.trim_alpha,
            self.pilot_sigma,
            self.seed
        )
    }
}

/// Noise seed for one `(kind, level, replicate)` cell. All detectors in a
/// sweep see the same noisy image for a given cell.
pub fn derive_seed(global_seed: u64, kind: NoiseKind, level: f64, replicate: u32) -> u64 {
    let mut h = Sha256::new();
    h.update(global_seed.to_le_bytes());
    h.update(kind.as_str().as_bytes());
    h.update(level.to_bits().to_le_bytes());
    h.update(replicate.to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().unwrap())
}

/// A fully specified experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub detector: DetectorKind,
    pub noise: NoiseSpec,
    pub params: DetectorParams,
}

#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub row: ResultRow,
    pub report: EvalReport,
}

/// Corrupts `clean`, runs the detector and scores it against `truth`.
pub fn run_cell(
    cell: &Cell,
    clean: &Image<f64>,
    truth: &GroundTruth,
    sampling: &ThresholdSampling,
) -> Result<CellOutcome> {
    let noisy = cell.noise.apply(clean)?;
    let start = Instant::now();
    let edges = run_detector(cell.detector, &noisy, &cell.params)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let report = evaluate(&edges, truth, DEFAULT_FOM_ALPHA, sampling)?;
    let p = &cell.params;
    let row = ResultRow {
        detector: cell.detector.to_string(),
        noise_kind: cell.noise.kind.as_str().to_string(),
        noise_level: cell.noise.level,
        r: p.r,
        lambda: p.lambda,
        beta: p.beta,
        beta1: p.beta1,
        beta2: p.beta2,
        se_radius: p.se_radius,
        window_n: p.window_n,
        trim_alpha: p.trim_alpha,
        pilot_sigma: p.pilot_sigma,
        threshold: report.fom_threshold,
        fom: report.fom,
        auc: report.auc(),
        wall_ms,
        seed: cell.noise.seed,
        version: VERSION.to_string(),
    };
    Ok(CellOutcome { row, report })
}

/// Cartesian grid of a sweep.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub detectors: Vec<DetectorKind>,
    pub noise_kind: NoiseKind,
    pub levels: Vec<f64>,
    pub radii: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub betas: Vec<f64>,
    pub replicates: u32,
    pub global_seed: u64,
    pub base: DetectorParams,
}

impl SweepGrid {
    /// Cells in grid order: detector, level, r, lambda, beta, replicate.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &detector in &self.detectors {
            for &level in &self.levels {
                for &r in &self.radii {
                    for &lambda in &self.lambdas {
                        for &beta in &self.betas {
                            for rep in 0..self.replicates {
                                let seed = derive_seed(self.global_seed, self.noise_kind, level, rep);
                                out.push(Cell {
                                    detector,
                                    noise: NoiseSpec {
                                        kind: self.noise_kind,
                                        level,
                                        seed,
                                    },
                                    params: DetectorParams {
                                        r,
                                        lambda,
                                        beta,
                                        ..self.base
                                    },
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

fn cell_key(cell: &Cell) -> String {
    let p = &cell.params;
    ResultRow {
        detector: cell.detector.to_string(),
        noise_kind: cell.noise.kind.as_str().to_string(),
        noise_level: cell.noise.level,
        r: p.r,
        lambda: p.lambda,
        beta: p.beta,
        beta1: p.beta1,
        beta2: p.beta2,
        se_radius: p.se_radius,
        window_n: p.window_n,
        trim_alpha: p.trim_alpha,
        pilot_sigma: p.pilot_sigma,
        threshold: 0.0,
        fom: 0.0,
        auc: 0.0,
        wall_ms: 0.0,
        seed: cell.noise.seed,
        version: String::new(),
    }
    .key()
}

pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn rows_to_csv(rows: &[ResultRow]) -> Result<Vec<u8>> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        wtr.write_record(CSV_COLUMNS)?;
    }
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.into_inner()
        .map_err(|e| Error::InvalidParameter(format!("CSV buffer: {e}")))
}

/// Runs every cell of `grid` not already present in `out` (matched by
/// key), then rewrites `out` in grid order. Returns the number of cells
/// computed.
pub fn run_sweep(
    grid: &SweepGrid,
    clean: &Image<f64>,
    truth: &GroundTruth,
    sampling: &ThresholdSampling,
    out: &Path,
) -> Result<usize> {
    let existing = if out.exists() { read_rows(out)? } else { Vec::new() };
    let done: HashSet<String> = existing.iter().map(ResultRow::key).collect();
    let cells = grid.cells();
    let todo: Vec<&Cell> = cells.iter().filter(|c| !done.contains(&cell_key(c))).collect();
    let fresh: Vec<ResultRow> = todo
        .par_iter()
        .map(|c| run_cell(c, clean, truth, sampling).map(|o| o.row))
        .collect::<Result<_>>()?;

    let mut by_key: std::collections::HashMap<String, ResultRow> = existing
        .into_iter()
        .chain(fresh)
        .map(|r| (r.key(), r))
        .collect();
    let mut rows = Vec::with_capacity(cells.len());
    for c in &cells {
        if let Some(r) = by_key.remove(&cell_key(c)) {
            rows.push(r);
        }
    }
    // rows from earlier sweeps with other grids are kept after this grid's
    let mut rest: Vec<ResultRow> = by_key.into_values().collect();
    rest.sort_by_key(ResultRow::key);
    rows.extend(rest);
    atomic_write(out, &rows_to_csv(&rows)?)?;
    Ok(todo.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_stable_and_distinct() {
        let a = derive_seed(1, NoiseKind::Gaussian, 25.0, 0);
        assert_eq!(a, derive_seed(1, NoiseKind::Gaussian, 25.0, 0));
        assert_ne!(a, derive_seed(1, NoiseKind::Gaussian, 25.0, 1));
        assert_ne!(a, derive_seed(1, NoiseKind::Impulse, 25.0, 0));
        assert_ne!(a, derive_seed(2, NoiseKind::Gaussian, 25.0, 0));
    }

    #[test]
    fn grid_size() {
        let grid = SweepGrid {
            detectors: vec![DetectorKind::Aatm],
            noise_kind: NoiseKind::Gaussian,
            levels: (1..=10).map(|i| 5.0 * i as f64).collect(),
            radii: vec![3.0, 5.0, 7.0, 9.0],
            lambdas: vec![0.5],
            betas: vec![0.1],
            replicates: 1,
            global_seed: 0,
            base: DetectorParams::default(),
        };
        assert_eq!(grid.cells().len(), 40);
    }

    #[test]
    fn empty_csv_has_header() {
        let bytes = rows_to_csv(&[]).unwrap();
        assert_eq!(
            String::from_utf8(bytes).unwrap().trim_end(),
            CSV_COLUMNS.join(",")
        );
    }
}
