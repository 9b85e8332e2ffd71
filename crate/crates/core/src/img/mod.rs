//! Raster types, structuring elements and PGM I/O.
//!
//! Images are row-major grids of real intensities on the nominal 0..=255
//! scale. Every window or structuring-element operation in this crate clips
//! to the image domain: samples that fall outside are skipped, never padded.

mod pgm;
mod se;

pub use pgm::{decode_pgm, encode_pgm, read_image, write_image};
pub use se::{make_diamond_se, make_square_se, StructuringElement};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Column/row position of a pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PixelCoord {
    pub x: usize,
    pub y: usize,
}

impl PixelCoord {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

/// Dense grayscale raster.
#[derive(Debug, Clone, PartialEq)]
pub struct Image<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Scalar> Image<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "{} samples do not fill a {width}x{height} image",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite intensity".into()));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Constant image.
    ///
    /// # Panics
    /// If either dimension is zero.
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    /// # Panics
    /// If either dimension is zero.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    /// Internal constructor for buffers produced by pixel-wise operations.
    pub(crate) fn from_raw(width: usize, height: usize, data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn at(&self, p: PixelCoord) -> T {
        self.get(p.x, p.y)
    }

    pub fn set(&mut self, x: usize, y: usize, v: T) {
        self.data[y * self.width + x] = v;
    }

    pub fn contains(&self, p: PixelCoord) -> bool {
        p.x < self.width && p.y < self.height
    }

    pub(crate) fn check_coord(&self, p: PixelCoord) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                x: p.x,
                y: p.y,
                width: self.width,
                height: self.height,
            })
        }
    }

    pub(crate) fn check_same_dims(&self, dims: (usize, usize)) -> Result<()> {
        if self.dims() == dims {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: dims,
                actual: self.dims(),
            })
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::from_raw(
            self.width,
            self.height,
            self.data.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Pixel-wise combination of two equally sized images.
    ///
    /// # Panics
    /// If the dimensions differ.
    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.dims(), other.dims(), "zip_map on mismatched images");
        Self::from_raw(
            self.width,
            self.height,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn min_value(&self) -> T {
        self.data.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_value(&self) -> T {
        self.data.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Converts between scalar types.
    pub fn cast<U: Scalar>(&self) -> Image<U> {
        Image::from_raw(
            self.width,
            self.height,
            self.data.iter().map(|v| U::lit(v.as_f64())).collect(),
        )
    }

    /// Builds an image from 8-bit samples.
    pub fn from_u8(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        Self::new(
            width,
            height,
            bytes.iter().map(|&b| T::lit(f64::from(b))).collect(),
        )
    }

    /// Quantized 8-bit samples (see [`clamp_quantize`]).
    pub fn to_u8(&self) -> Vec<u8> {
        self.data.iter().map(|&v| quantize_one(v)).collect()
    }
}

#[inline]
fn quantize_one<T: Scalar>(v: T) -> u8 {
    let v = v.as_f64().clamp(0.0, 255.0);
    (v + 0.5).floor() as u8
}

/// Clamps to `[0, 255]` and rounds half-up to integer intensities.
pub fn clamp_quantize<T: Scalar>(image: &Image<T>) -> Image<T> {
    image.map(|v| T::lit(f64::from(quantize_one(v))))
}
