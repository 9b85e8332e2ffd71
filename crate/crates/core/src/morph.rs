//! Flat, spatially-invariant morphology and the classic morphological edge
//! detectors (morphological gradient, blur-minimization, alpha-trimmed
//! morphological, reduced-noise morphological).

use rayon::prelude::*;

use crate::edge_map::EdgeMap;
use crate::filters::{alpha_trimmed_mean_filter, mean_filter, TrimSpec, WindowSpec};
use crate::img::{Image, StructuringElement};
use crate::scalar::Scalar;

fn reduce_over_se<T: Scalar>(
    image: &Image<T>,
    se: &StructuringElement,
    init: T,
    pick: impl Fn(T, T) -> T + Sync,
) -> Image<T> {
    let (w, h) = image.dims();
    let src = image.data();
    let offsets = se.offsets();
    let mut out = vec![T::zero(); w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, o) in row.iter_mut().enumerate() {
            let mut acc = init;
            for &(dx, dy) in offsets {
                let sx = x as isize + dx;
                let sy = y as isize + dy;
                if sx < 0 || sy < 0 || sx >= w as isize || sy >= h as isize {
                    continue;
                }
                acc = pick(acc, src[sy as usize * w + sx as usize]);
            }
            *o = acc;
        }
    });
    Image::from_raw(w, h, out)
}

/// `out(x) = max { f(x + b) : b in se, x + b inside the image }`.
pub fn dilate<T: Scalar>(image: &Image<T>, se: &StructuringElement) -> Image<T> {
    reduce_over_se(image, se, T::neg_infinity(), T::max)
}

/// `out(x) = min { f(x + b) : b in se, x + b inside the image }`.
pub fn erode<T: Scalar>(image: &Image<T>, se: &StructuringElement) -> Image<T> {
    reduce_over_se(image, se, T::infinity(), T::min)
}

pub fn open<T: Scalar>(image: &Image<T>, se: &StructuringElement) -> Image<T> {
    dilate(&erode(image, se), se)
}

pub fn close<T: Scalar>(image: &Image<T>, se: &StructuringElement) -> Image<T> {
    erode(&dilate(image, se), se)
}

fn sub<T: Scalar>(a: &Image<T>, b: &Image<T>) -> Image<T> {
    a.zip_map(b, |x, y| x - y)
}

fn pointwise_min<T: Scalar>(a: &Image<T>, b: &Image<T>) -> Image<T> {
    a.zip_map(b, T::min)
}

/// Dilation minus erosion.
pub fn detect_mg<T: Scalar>(image: &Image<T>, se: &StructuringElement) -> EdgeMap<T> {
    EdgeMap::from_response(sub(&dilate(image, se), &erode(image, se)))
}

/// Smaller of the erosion and dilation residues of the mean-blurred image.
pub fn detect_bm<T: Scalar>(
    image: &Image<T>,
    se: &StructuringElement,
    window: WindowSpec,
) -> EdgeMap<T> {
    let fav = mean_filter(image, window);
    let erosion_residue = sub(&fav, &erode(&fav, se));
    let dilation_residue = sub(&dilate(&fav, se), &fav);
    EdgeMap::from_response(pointwise_min(&erosion_residue, &dilation_residue))
}

/// `min(open - erode, dilate - close)` of the alpha-trimmed-mean-blurred
/// image.
pub fn detect_atm<T: Scalar>(
    image: &Image<T>,
    se: &StructuringElement,
    window: WindowSpec,
    trim: TrimSpec,
) -> EdgeMap<T> {
    let fa = alpha_trimmed_mean_filter(image, window, trim);
    let eroded = erode(&fa, se);
    let dilated = dilate(&fa, se);
    let opened = dilate(&eroded, se);
    let closed = erode(&dilated, se);
    EdgeMap::from_response(pointwise_min(&sub(&opened, &eroded), &sub(&dilated, &closed)))
}

/// Close-open denoising to `M`, then the dilation residue of `M` closed.
pub fn detect_rnm<T: Scalar>(image: &Image<T>, se: &StructuringElement) -> EdgeMap<T> {
    let m = open(&close(image, se), se);
    let mc = close(&m, se);
    EdgeMap::from_response(sub(&dilate(&mc, se), &mc))
}
