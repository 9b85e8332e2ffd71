//! Blur filters used as detector preprocessing and as pilot-image
//! generators.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::img::Image;
use crate::scalar::Scalar;

pub const DEFAULT_WINDOW_HALF_WIDTH: usize = 1;
pub const DEFAULT_TRIM_ALPHA: f64 = 0.25;
pub const DEFAULT_PILOT_SIGMA: f64 = 1.0;

/// Square window of side `2 * half_width + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub half_width: usize,
}

impl WindowSpec {
    pub const fn new(half_width: usize) -> Self {
        Self { half_width }
    }
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self::new(DEFAULT_WINDOW_HALF_WIDTH)
    }
}

/// Fraction trimmed from each end of the sorted window, in `[0, 0.5)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrimSpec {
    alpha: f64,
}

impl TrimSpec {
    pub fn new(alpha: f64) -> Result<Self> {
        if (0.0..0.5).contains(&alpha) {
            Ok(Self { alpha })
        } else {
            Err(Error::InvalidParameter(format!(
                "trim fraction {alpha} outside [0, 0.5)"
            )))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Samples dropped from each end of a window of `m` values. Falls back
    /// to zero when trimming would leave nothing.
    pub fn trim_count(&self, m: usize) -> usize {
        let t = (self.alpha * m as f64).floor() as usize;
        if 2 * t >= m {
            0
        } else {
            t
        }
    }
}

impl Default for TrimSpec {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_TRIM_ALPHA,
        }
    }
}

/// Applies `f` to the clipped window values around every pixel. Values are
/// gathered row-major.
fn window_filter<T: Scalar>(
    image: &Image<T>,
    window: WindowSpec,
    f: impl Fn(&mut Vec<T>) -> T + Sync,
) -> Image<T> {
    let (w, h) = image.dims();
    let n = window.half_width;
    let src = image.data();
    let mut out = vec![T::zero(); w * h];
    out.par_chunks_mut(w).enumerate().for_each_init(
        || Vec::with_capacity((2 * n + 1) * (2 * n + 1)),
        |buf, (y, row)| {
            let y0 = y.saturating_sub(n);
            let y1 = (y + n).min(h - 1);
            for (x, o) in row.iter_mut().enumerate() {
                let x0 = x.saturating_sub(n);
                let x1 = (x + n).min(w - 1);
                buf.clear();
                for yy in y0..=y1 {
                    buf.extend_from_slice(&src[yy * w + x0..=yy * w + x1]);
                }
                *o = f(buf);
            }
        },
    );
    Image::from_raw(w, h, out)
}

fn mean_of<T: Scalar>(values: &[T]) -> T {
    values.iter().copied().sum::<T>() / T::from_usize(values.len()).unwrap()
}

/// Running mean over the clipped square window.
pub fn mean_filter<T: Scalar>(image: &Image<T>, window: WindowSpec) -> Image<T> {
    window_filter(image, window, |buf| mean_of(buf))
}

/// Mean of the window after dropping the `floor(alpha * m)` smallest and
/// largest samples.
pub fn alpha_trimmed_mean_filter<T: Scalar>(
    image: &Image<T>,
    window: WindowSpec,
    trim: TrimSpec,
) -> Image<T> {
    window_filter(image, window, |buf| {
        let t = trim.trim_count(buf.len());
        if t == 0 {
            return mean_of(buf);
        }
        buf.sort_unstable_by(Scalar::total_cmp_finite);
        mean_of(&buf[t..buf.len() - t])
    })
}

/// Normalized 1-D Gaussian taps for offsets `-radius..=radius`, with
/// `radius = ceil(3 * sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / sum).collect()
}

/// Separable Gaussian blur. Taps falling outside the image are dropped and
/// the remaining weights renormalized, so constants are preserved exactly
/// up to rounding.
pub fn gaussian_blur<T: Scalar>(image: &Image<T>, sigma: f64) -> Result<Image<T>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "blur sigma must be positive, got {sigma}"
        )));
    }
    let kernel: Vec<T> = gaussian_kernel(sigma).into_iter().map(T::lit).collect();
    let radius = (kernel.len() / 2) as isize;
    let (w, h) = image.dims();

    let pass = |src: &[T], horizontal: bool| -> Vec<T> {
        let mut out = vec![T::zero(); w * h];
        out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
            for (x, o) in row.iter_mut().enumerate() {
                let (pos, len) = if horizontal { (x, w) } else { (y, h) };
                let mut acc = T::zero();
                let mut wsum = T::zero();
                for (k, &kw) in kernel.iter().enumerate() {
                    let p = pos as isize + k as isize - radius;
                    if p < 0 || p >= len as isize {
                        continue;
                    }
                    let p = p as usize;
                    let v = if horizontal { src[y * w + p] } else { src[p * w + x] };
                    acc = acc + kw * v;
                    wsum = wsum + kw;
                }
                *o = acc / wsum;
            }
        });
        out
    };

    let tmp = pass(image.data(), true);
    let out = pass(&tmp, false);
    Ok(Image::from_raw(w, h, out))
}
