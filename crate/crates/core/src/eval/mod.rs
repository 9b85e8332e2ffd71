//! Thresholding, Pratt's figure of merit, ROC curves.

mod dt;

pub use dt::{distance_transform, squared_distance_transform};

use crate::edge_map::{BinaryEdgeMap, EdgeMap, GroundTruth};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Pratt's scaling constant.
pub const DEFAULT_FOM_ALPHA: f64 = 1.0 / 9.0;
pub const DEFAULT_QUANTILES: usize = 256;

/// `mask(z) = strength(z) >= t`.
pub fn threshold<T: Scalar>(edge_map: &EdgeMap<T>, t: T) -> BinaryEdgeMap {
    let (w, h) = edge_map.dims();
    BinaryEdgeMap::new(w, h, edge_map.data().iter().map(|&v| v >= t).collect())
        .expect("dimensions come from an edge map")
}

fn check_dims(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: b,
            actual: a,
        })
    }
}

/// Per-pixel FOM weight `1 / (1 + alpha d^2)`, `d` being the distance to
/// the nearest ideal edge pixel. Evaluated as `(1/alpha) / (1/alpha + d^2)`
/// so that `alpha = 1/9, d = 1` rounds to exactly 0.9.
fn fom_weights(ideal: &GroundTruth, alpha: f64) -> Result<Vec<f64>> {
    if ideal.count() == 0 {
        return Err(Error::DegenerateGroundTruth("no ideal edge pixels".into()));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("FOM alpha {alpha} must be finite and >= 0")));
    }
    Ok(squared_distance_transform(&ideal.edge_mask)
        .into_iter()
        .map(|d2| {
            if alpha == 0.0 {
                1.0
            } else {
                let inv = 1.0 / alpha;
                inv / (inv + d2)
            }
        })
        .collect())
}

/// Pratt's figure of merit. Zero for an empty detection.
pub fn pratt_fom(detected: &BinaryEdgeMap, ideal: &GroundTruth, alpha: f64) -> Result<f64> {
    check_dims(detected.dims(), ideal.dims())?;
    let weights = fom_weights(ideal, alpha)?;
    let detected_count = detected.count();
    if detected_count == 0 {
        return Ok(0.0);
    }
    let sum: f64 = detected
        .mask()
        .iter()
        .zip(&weights)
        .filter(|(&d, _)| d)
        .map(|(_, &w)| w)
        .sum();
    Ok(sum / ideal.count().max(detected_count) as f64)
}

/// Which thresholds a sweep visits.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ThresholdSampling {
    /// Every distinct strength when there are at most 256, otherwise 256
    /// quantiles.
    #[default]
    Auto,
    /// `n` evenly spaced order statistics of all strengths.
    Quantiles(usize),
    /// Every distinct strength.
    Exhaustive,
    Fixed(Vec<f64>),
}

impl std::str::FromStr for ThresholdSampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "auto" => Ok(Self::Auto),
            "exhaustive" | "all" => Ok(Self::Exhaustive),
            _ => {
                if let Some(n) = s.strip_prefix("quantiles:") {
                    let n: usize = n.parse().map_err(|_| {
                        Error::InvalidParameter(format!("bad quantile count {n:?}"))
                    })?;
                    if n < 2 {
                        return Err(Error::InvalidParameter("need at least 2 quantiles".into()));
                    }
                    Ok(Self::Quantiles(n))
                } else if let Some(list) = s.strip_prefix("fixed:") {
                    list.split(',')
                        .map(|t| {
                            t.trim().parse::<f64>().map_err(|_| {
                                Error::InvalidParameter(format!("bad threshold {t:?}"))
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                        .map(Self::Fixed)
                } else {
                    Err(Error::InvalidParameter(format!(
                        "unknown threshold sampling {s:?}"
                    )))
                }
            }
        }
    }
}

/// Candidate thresholds in descending order, deduplicated.
pub fn candidate_thresholds<T: Scalar>(edge_map: &EdgeMap<T>, sampling: &ThresholdSampling) -> Vec<T> {
    let mut sorted: Vec<T> = edge_map.data().to_vec();
    sorted.sort_unstable_by(Scalar::total_cmp_finite);
    let quantiles = |n: usize| -> Vec<T> {
        let last = sorted.len() - 1;
        (0..n)
            .map(|i| sorted[((i * last) as f64 / (n - 1) as f64).round() as usize])
            .collect()
    };
    let mut out = match sampling {
        ThresholdSampling::Exhaustive => sorted.clone(),
        ThresholdSampling::Quantiles(n) => quantiles((*n).max(2)),
        ThresholdSampling::Auto => {
            let mut distinct = sorted.clone();
            distinct.dedup();
            if distinct.len() <= DEFAULT_QUANTILES {
                distinct
            } else {
                quantiles(DEFAULT_QUANTILES)
            }
        }
        ThresholdSampling::Fixed(ts) => ts.iter().map(|&t| T::lit(t)).collect(),
    };
    out.sort_unstable_by(|a, b| b.total_cmp_finite(a));
    out.dedup();
    out
}

/// Strengths sorted descending, each paired with a payload.
fn ranked<T: Scalar, P: Copy>(edge_map: &EdgeMap<T>, payload: impl Fn(usize) -> P) -> Vec<(T, P)> {
    let mut v: Vec<(T, P)> = edge_map
        .data()
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, payload(i)))
        .collect();
    v.sort_by(|a, b| b.0.total_cmp_finite(&a.0));
    v
}

/// FOM at each positive candidate threshold, as `(threshold, fom)` pairs in
/// descending threshold order. A zero threshold would flag pixels with no
/// response at all, so it is never a FOM candidate.
pub fn fom_sweep<T: Scalar>(
    edge_map: &EdgeMap<T>,
    ideal: &GroundTruth,
    alpha: f64,
    sampling: &ThresholdSampling,
) -> Result<Vec<(T, f64)>> {
    check_dims(edge_map.dims(), ideal.dims())?;
    let weights = fom_weights(ideal, alpha)?;
    let ideal_count = ideal.count();
    let order = ranked(edge_map, |i| weights[i]);
    let mut out = Vec::new();
    let (mut pos, mut count, mut sum) = (0usize, 0usize, 0.0f64);
    for t in candidate_thresholds(edge_map, sampling) {
        if t <= T::zero() {
            break;
        }
        while pos < order.len() && order[pos].0 >= t {
            sum += order[pos].1;
            count += 1;
            pos += 1;
        }
        let fom = if count == 0 {
            0.0
        } else {
            sum / ideal_count.max(count) as f64
        };
        out.push((t, fom));
    }
    Ok(out)
}

/// Best FOM over the sweep and the threshold achieving it; ties go to the
/// lower threshold. A map without any positive strength scores 0 at an
/// infinite threshold.
pub fn best_fom<T: Scalar>(
    edge_map: &EdgeMap<T>,
    ideal: &GroundTruth,
    alpha: f64,
    sampling: &ThresholdSampling,
) -> Result<(f64, T)> {
    let sweep = fom_sweep(edge_map, ideal, alpha, sampling)?;
    let mut best = (0.0, T::infinity());
    for (t, fom) in sweep {
        if fom >= best.0 {
            best = (fom, t);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    /// `None` for the forced `(0, 0)` and `(1, 1)` endpoints.
    pub threshold: Option<f64>,
    pub p_f: f64,
    pub p_d: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// Detection / false-alarm probabilities at each candidate threshold, plus
/// the `(0, 0)` and `(1, 1)` endpoints; area by the trapezoid rule.
pub fn roc_curve<T: Scalar>(
    edge_map: &EdgeMap<T>,
    ideal: &GroundTruth,
    sampling: &ThresholdSampling,
) -> Result<RocCurve> {
    check_dims(edge_map.dims(), ideal.dims())?;
    let positives = ideal.count();
    let negatives = ideal.edge_mask.mask().len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::DegenerateGroundTruth(format!(
            "ROC needs both edge and non-edge pixels, got {positives} and {negatives}"
        )));
    }
    let truth = ideal.edge_mask.mask();
    let order = ranked(edge_map, |i| truth[i]);
    let mut points = vec![RocPoint {
        threshold: None,
        p_f: 0.0,
        p_d: 0.0,
    }];
    let (mut pos, mut hits, mut false_alarms) = (0usize, 0usize, 0usize);
    for t in candidate_thresholds(edge_map, sampling) {
        while pos < order.len() && order[pos].0 >= t {
            if order[pos].1 {
                hits += 1;
            } else {
                false_alarms += 1;
            }
            pos += 1;
        }
        points.push(RocPoint {
            threshold: Some(t.as_f64()),
            p_f: false_alarms as f64 / negatives as f64,
            p_d: hits as f64 / positives as f64,
        });
    }
    points.push(RocPoint {
        threshold: None,
        p_f: 1.0,
        p_d: 1.0,
    });
    // thresholds were visited in descending order, so both coordinates are
    // already nondecreasing; the sort only orders the endpoints
    points.sort_by(|a, b| {
        a.p_f
            .total_cmp(&b.p_f)
            .then_with(|| a.p_d.total_cmp(&b.p_d))
    });
    let auc = points
        .windows(2)
        .map(|w| (w[1].p_f - w[0].p_f) * (w[1].p_d + w[0].p_d) / 2.0)
        .sum::<f64>()
        .clamp(0.0, 1.0);
    Ok(RocCurve { points, auc })
}

/// FOM at the best threshold plus the ROC curve.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub fom: f64,
    pub fom_threshold: f64,
    pub roc: RocCurve,
}

impl EvalReport {
    pub fn auc(&self) -> f64 {
        self.roc.auc
    }
}

pub fn evaluate<T: Scalar>(
    edge_map: &EdgeMap<T>,
    ideal: &GroundTruth,
    alpha: f64,
    sampling: &ThresholdSampling,
) -> Result<EvalReport> {
    let (fom, t) = best_fom(edge_map, ideal, alpha, sampling)?;
    let roc = roc_curve(edge_map, ideal, sampling)?;
    Ok(EvalReport {
        fom,
        fom_threshold: t.as_f64(),
        roc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::img::Image;

    fn gt(w: usize, h: usize, pts: &[(usize, usize)]) -> GroundTruth {
        GroundTruth::new(BinaryEdgeMap::from_fn(w, h, |x, y| pts.contains(&(x, y))))
    }

    fn emap(w: usize, h: usize, f: impl FnMut(usize, usize) -> f64) -> EdgeMap<f64> {
        EdgeMap::new(Image::from_fn(w, h, f)).unwrap()
    }

    #[test]
    fn threshold_rules() {
        let e = emap(3, 1, |x, _| x as f64);
        assert_eq!(threshold(&e, 0.0).count(), 3);
        assert_eq!(threshold(&e, 1.0).count(), 2);
        assert_eq!(threshold(&e, 2.5).count(), 0);
    }

    #[test]
    fn fom_perfect_and_single_offset() {
        let ideal = gt(5, 5, &[(2, 2)]);
        assert_eq!(pratt_fom(&ideal.edge_mask, &ideal, DEFAULT_FOM_ALPHA).unwrap(), 1.0);
        let det = BinaryEdgeMap::from_fn(5, 5, |x, y| (x, y) == (3, 2));
        let fom = pratt_fom(&det, &ideal, DEFAULT_FOM_ALPHA).unwrap();
        assert_eq!(fom, 0.9);
    }

    #[test]
    fn fom_three_point_case() {
        let ideal = gt(7, 1, &[(0, 0), (1, 0), (2, 0)]);
        // detections at distance 0 and 2 from the ideal set
        let det = BinaryEdgeMap::from_fn(7, 1, |x, _| x == 1 || x == 4);
        let fom = pratt_fom(&det, &ideal, 1.0 / 9.0).unwrap();
        let want = (1.0 / 3.0) * (1.0 + 9.0 / 13.0);
        assert!((fom - want).abs() < 1e-12);
    }

    #[test]
    fn fom_errors_and_empty() {
        let ideal = gt(4, 4, &[(1, 1)]);
        assert_eq!(pratt_fom(&BinaryEdgeMap::empty(4, 4), &ideal, 0.1).unwrap(), 0.0);
        assert!(matches!(
            pratt_fom(&BinaryEdgeMap::empty(3, 4), &ideal, 0.1),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            pratt_fom(&BinaryEdgeMap::empty(4, 4), &gt(4, 4, &[]), 0.1),
            Err(Error::DegenerateGroundTruth(_))
        ));
    }

    #[test]
    fn best_fom_on_scaled_truth() {
        let ideal = gt(6, 6, &[(1, 1), (2, 3), (4, 4)]);
        let e = emap(6, 6, |x, y| if ideal.edge_mask.get(x, y) { 7.0 } else { 0.0 });
        let (fom, t) = best_fom(&e, &ideal, DEFAULT_FOM_ALPHA, &ThresholdSampling::Auto).unwrap();
        assert_eq!((fom, t), (1.0, 7.0));
        let zero = emap(6, 6, |_, _| 0.0);
        let sweep = fom_sweep(&zero, &ideal, DEFAULT_FOM_ALPHA, &ThresholdSampling::Auto).unwrap();
        assert!(sweep.iter().all(|&(_, f)| f == 0.0));
        let (fom, t) = best_fom(&zero, &ideal, DEFAULT_FOM_ALPHA, &ThresholdSampling::Auto).unwrap();
        assert_eq!(fom, 0.0);
        assert!(t.is_infinite());
    }

    #[test]
    fn sweep_matches_direct_fom() {
        let ideal = gt(8, 8, &[(1, 1), (2, 2), (3, 3), (4, 4)]);
        let e = emap(8, 8, |x, y| ((x * 7 + y * 3) % 11) as f64);
        for (t, fom) in fom_sweep(&e, &ideal, 0.25, &ThresholdSampling::Exhaustive).unwrap() {
            let direct = pratt_fom(&threshold(&e, t), &ideal, 0.25).unwrap();
            assert!((fom - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn quantile_thresholds() {
        let e = emap(1000, 1, |x, _| x as f64);
        let q = candidate_thresholds(&e, &ThresholdSampling::Auto);
        assert_eq!(q.len(), 256);
        assert_eq!(q[0], 999.0);
        assert_eq!(*q.last().unwrap(), 0.0);
        assert_eq!(candidate_thresholds(&e, &ThresholdSampling::Exhaustive).len(), 1000);
        assert_eq!(candidate_thresholds(&e, &ThresholdSampling::Quantiles(3)), vec![999.0, 500.0, 0.0]);
        let s: ThresholdSampling = "fixed:1,2".parse().unwrap();
        assert_eq!(s, ThresholdSampling::Fixed(vec![1.0, 2.0]));
        assert_eq!("quantiles:16".parse::<ThresholdSampling>().unwrap(), ThresholdSampling::Quantiles(16));
        assert!("bogus".parse::<ThresholdSampling>().is_err());
    }

    #[test]
    fn roc_perfect_detector() {
        let ideal = gt(5, 5, &[(0, 0), (4, 4)]);
        let e = emap(5, 5, |x, y| if ideal.edge_mask.get(x, y) { 1.0 } else { 0.0 });
        let roc = roc_curve(&e, &ideal, &ThresholdSampling::Auto).unwrap();
        assert!(roc.points.iter().any(|p| p.p_f == 0.0 && p.p_d == 1.0));
        assert_eq!(roc.auc, 1.0);
        let first = roc.points.first().unwrap();
        let last = roc.points.last().unwrap();
        assert_eq!((first.p_f, first.p_d), (0.0, 0.0));
        assert_eq!((last.p_f, last.p_d), (1.0, 1.0));
    }

    #[test]
    fn roc_endpoint_thresholds() {
        let ideal = gt(4, 4, &[(1, 1)]);
        let e = emap(4, 4, |x, y| (x + y) as f64 + 1.0);
        let roc = roc_curve(&e, &ideal, &ThresholdSampling::Fixed(vec![100.0, 0.0])).unwrap();
        let at = |t: f64| roc.points.iter().find(|p| p.threshold == Some(t)).unwrap();
        assert_eq!((at(100.0).p_f, at(100.0).p_d), (0.0, 0.0));
        assert_eq!((at(0.0).p_f, at(0.0).p_d), (1.0, 1.0));
        assert!(roc_curve(&e, &gt(4, 4, &[]), &ThresholdSampling::Auto).is_err());
        let full = GroundTruth::new(BinaryEdgeMap::from_fn(4, 4, |_, _| true));
        assert!(roc_curve(&e, &full, &ThresholdSampling::Auto).is_err());
    }
}
