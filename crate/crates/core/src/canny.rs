//! Canny edge detector: Gaussian blur, Sobel gradients, non-maximum
//! suppression along four quantized directions, hysteresis.
//!
//! Besides the binary map, [`detect_canny`] returns a hysteresis strength
//! map: the largest high threshold at which each pixel would still be kept
//! (with `low = low_ratio * high`). Thresholding that map at `t` reproduces
//! the hysteresis output for `high = t` exactly, which is what lets the
//! evaluation code sweep Canny thresholds like any other detector.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use crate::edge_map::{BinaryEdgeMap, EdgeMap};
use crate::error::{Error, Result};
use crate::filters::gaussian_blur;
use crate::img::Image;
use crate::noise::neighbours8;
use crate::scalar::Scalar;

pub const DEFAULT_BLUR_SIGMA: f64 = 1.0;
pub const DEFAULT_LOW_RATIO: f64 = 0.4;
pub const DEFAULT_HIGH_PERCENTILE: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HighThreshold {
    /// Nearest-rank percentile (in `(0, 1]`) of the nonzero suppressed
    /// magnitudes.
    Percentile(f64),
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CannyConfig {
    pub blur_sigma: f64,
    pub low_ratio: f64,
    pub high: HighThreshold,
}

impl Default for CannyConfig {
    fn default() -> Self {
        Self {
            blur_sigma: DEFAULT_BLUR_SIGMA,
            low_ratio: DEFAULT_LOW_RATIO,
            high: HighThreshold::Percentile(DEFAULT_HIGH_PERCENTILE),
        }
    }
}

impl CannyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.low_ratio > 0.0 && self.low_ratio < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "low ratio {} outside (0, 1)",
                self.low_ratio
            )));
        }
        match self.high {
            HighThreshold::Percentile(p) if !(p > 0.0 && p <= 1.0) => Err(
                Error::InvalidParameter(format!("percentile {p} outside (0, 1]")),
            ),
            HighThreshold::Fixed(t) if !(t > 0.0 && t.is_finite()) => Err(
                Error::InvalidParameter(format!("high threshold {t} must be positive")),
            ),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CannyOutput<T> {
    pub edges: BinaryEdgeMap,
    /// Gradient magnitude before suppression.
    pub magnitude: Image<T>,
    /// Magnitude at suppression survivors, zero elsewhere.
    pub suppressed: Image<T>,
    /// Hysteresis strength; `strength >= t` equals hysteresis at `high = t`.
    pub strength: EdgeMap<T>,
    pub high: T,
}

/// Sobel derivatives with replicated borders.
pub fn sobel<T: Scalar>(image: &Image<T>) -> (Image<T>, Image<T>) {
    let (w, h) = image.dims();
    let at = |x: isize, y: isize| {
        let x = x.clamp(0, w as isize - 1) as usize;
        let y = y.clamp(0, h as isize - 1) as usize;
        image.get(x, y)
    };
    let two = T::lit(2.0);
    let gx = Image::from_fn(w, h, |x, y| {
        let (x, y) = (x as isize, y as isize);
        (at(x + 1, y - 1) + two * at(x + 1, y) + at(x + 1, y + 1))
            - (at(x - 1, y - 1) + two * at(x - 1, y) + at(x - 1, y + 1))
    });
    let gy = Image::from_fn(w, h, |x, y| {
        let (x, y) = (x as isize, y as isize);
        (at(x - 1, y + 1) + two * at(x, y + 1) + at(x + 1, y + 1))
            - (at(x - 1, y - 1) + two * at(x, y - 1) + at(x + 1, y - 1))
    });
    (gx, gy)
}

/// Step toward the neighbour along the gradient, quantized to 0, 45, 90
/// or 135 degrees.
fn quantized_step<T: Scalar>(gx: T, gy: T) -> (isize, isize) {
    let mut deg = gy.as_f64().atan2(gx.as_f64()).to_degrees();
    if deg < 0.0 {
        deg += 180.0;
    }
    if !(22.5..157.5).contains(&deg) {
        (1, 0)
    } else if deg < 67.5 {
        (1, 1)
    } else if deg < 112.5 {
        (0, 1)
    } else {
        (-1, 1)
    }
}

/// Keeps pixels whose magnitude beats the neighbour behind them and ties or
/// beats the one ahead along the gradient; the asymmetry keeps plateaus one
/// pixel wide. Magnitudes within `tol` of each other count as ties, and
/// magnitudes at or below `tol` are dropped.
pub fn non_maximum_suppression<T: Scalar>(
    magnitude: &Image<T>,
    gx: &Image<T>,
    gy: &Image<T>,
    tol: T,
) -> Image<T> {
    let (w, h) = magnitude.dims();
    let mag_at = |x: isize, y: isize| {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            T::zero()
        } else {
            magnitude.get(x as usize, y as usize)
        }
    };
    Image::from_fn(w, h, |x, y| {
        let m = magnitude.get(x, y);
        if m <= tol {
            return T::zero();
        }
        let (dx, dy) = quantized_step(gx.get(x, y), gy.get(x, y));
        let (xi, yi) = (x as isize, y as isize);
        let behind = mag_at(xi - dx, yi - dy);
        let ahead = mag_at(xi + dx, yi + dy);
        if m > behind + tol && m + tol >= ahead {
            m
        } else {
            T::zero()
        }
    })
}

#[inline]
fn passes_low<T: Scalar>(m: T, high: T, low_ratio: T) -> bool {
    m / low_ratio >= high
}

/// Classic hysteresis over suppression survivors: seeds at `>= high`,
/// grown through 8-connected survivors with `m / low_ratio >= high`.
pub fn hysteresis<T: Scalar>(suppressed: &Image<T>, high: T, low_ratio: T) -> BinaryEdgeMap {
    let (w, h) = suppressed.dims();
    let data = suppressed.data();
    let mut keep = vec![false; w * h];
    let mut queue = VecDeque::new();
    for (i, &m) in data.iter().enumerate() {
        if m > T::zero() && m >= high {
            keep[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        for (nx, ny) in neighbours8(i % w, i / w, w, h) {
            let j = ny * w + nx;
            let m = data[j];
            if !keep[j] && m > T::zero() && passes_low(m, high, low_ratio) {
                keep[j] = true;
                queue.push_back(j);
            }
        }
    }
    BinaryEdgeMap::new(w, h, keep).expect("dimensions come from an image")
}

#[derive(Clone, Copy)]
struct Widest<T> {
    key: T,
    idx: usize,
}

impl<T: Scalar> PartialEq for Widest<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for Widest<T> {}
impl<T: Scalar> PartialOrd for Widest<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Widest<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .total_cmp_finite(&other.key)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

/// Largest `high` for which each pixel survives hysteresis: a widest-path
/// search where a seed contributes its own magnitude and every further
/// pixel caps the path at `m / low_ratio`.
pub fn hysteresis_strength<T: Scalar>(suppressed: &Image<T>, low_ratio: T) -> Image<T> {
    let (w, h) = suppressed.dims();
    let data = suppressed.data();
    let mut key: Vec<T> = data.iter().map(|&m| m.max(T::zero())).collect();
    let mut done = vec![false; w * h];
    let mut heap: BinaryHeap<Widest<T>> = key
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > T::zero())
        .map(|(idx, &k)| Widest { key: k, idx })
        .collect();
    while let Some(Widest { key: k, idx }) = heap.pop() {
        if done[idx] {
            continue;
        }
        done[idx] = true;
        for (nx, ny) in neighbours8(idx % w, idx / w, w, h) {
            let j = ny * w + nx;
            let m = data[j];
            if done[j] || m <= T::zero() {
                continue;
            }
            let cand = k.min(m / low_ratio);
            if cand > key[j] {
                key[j] = cand;
                heap.push(Widest { key: cand, idx: j });
            }
        }
    }
    Image::from_raw(w, h, key)
}

fn percentile<T: Scalar>(suppressed: &Image<T>, p: f64) -> Option<T> {
    let mut vals: Vec<T> = suppressed
        .data()
        .iter()
        .copied()
        .filter(|&v| v > T::zero())
        .collect();
    if vals.is_empty() {
        return None;
    }
    vals.sort_unstable_by(Scalar::total_cmp_finite);
    let rank = ((p * vals.len() as f64).ceil() as usize).clamp(1, vals.len());
    Some(vals[rank - 1])
}

pub fn detect_canny<T: Scalar>(image: &Image<T>, config: &CannyConfig) -> Result<CannyOutput<T>> {
    config.validate()?;
    let blurred = gaussian_blur(image, config.blur_sigma)?;
    let (gx, gy) = sobel(&blurred);
    let magnitude = gx.zip_map(&gy, |a, b| a.hypot(b));
    // rounding in the blur leaves gradients of order eps * intensity on
    // flat regions and breaks exact ties between mirror-image pixels
    let scale = blurred.data().iter().fold(T::zero(), |a, &v| a.max(v.abs()));
    let tol = T::epsilon() * T::lit(64.0) * scale;
    let suppressed = non_maximum_suppression(&magnitude, &gx, &gy, tol);
    let low_ratio = T::lit(config.low_ratio);
    let high = match config.high {
        HighThreshold::Fixed(t) => Some(T::lit(t)),
        HighThreshold::Percentile(p) => percentile(&suppressed, p),
    };
    let (w, h) = image.dims();
    let (edges, high) = match high {
        Some(t) => (hysteresis(&suppressed, t, low_ratio), t),
        None => (BinaryEdgeMap::empty(w, h), T::infinity()),
    };
    let strength = EdgeMap::from_response(hysteresis_strength(&suppressed, low_ratio));
    Ok(CannyOutput {
        edges,
        magnitude,
        suppressed,
        strength,
        high,
    })
}
