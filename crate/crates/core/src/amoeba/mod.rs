//! Morphological amoebas: spatially-variant structuring elements grown per
//! pixel on a pilot image.
//!
//! The amoeba distance between two pixels is the cheapest 8-connected path
//! where each step costs `1 + lambda * |pilot(a) - pilot(b)|`. The original
//! amoeba of radius `r` at `x` is the ball `{ y : d(x, y) <= r }`. Because
//! every step costs at least 1, that ball lies inside the Chebyshev window
//! of radius `floor(r)`, which bounds the Dijkstra search.
//!
//! The modified amoeba used for edge detection is the original one dilated
//! by the 5-point diamond and then capped by a radius test around the
//! center, which lets it reach one pixel across a contour.

mod field;
mod grow;

pub use field::{compute_amoeba_field, AmoebaField};
pub use grow::AmoebaGrower;

use crate::error::{Error, Result};
use crate::img::{Image, PixelCoord};
use crate::scalar::Scalar;

pub const DEFAULT_LAMBDA: f64 = 0.5;
pub const DEFAULT_RADIUS: f64 = 7.0;

/// Norm used for the radius cap of the modified amoeba.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadiusNorm {
    /// `max(|dx|, |dy|) <= ceil(r)`.
    #[default]
    Chebyshev,
    /// `sqrt(dx^2 + dy^2) <= r`.
    Euclidean,
}

impl std::str::FromStr for RadiusNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "chebyshev" | "linf" => Ok(RadiusNorm::Chebyshev),
            "euclidean" | "l2" => Ok(RadiusNorm::Euclidean),
            other => Err(Error::InvalidParameter(format!("unknown norm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmoebaParams<T> {
    lambda: T,
    radius: T,
    norm: RadiusNorm,
}

impl<T: Scalar> AmoebaParams<T> {
    pub fn new(lambda: T, radius: T) -> Result<Self> {
        if !(lambda >= T::zero() && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be a finite non-negative number, got {lambda}"
            )));
        }
        if !(radius > T::zero() && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "amoeba radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            lambda,
            radius,
            norm: RadiusNorm::default(),
        })
    }

    pub fn with_norm(mut self, norm: RadiusNorm) -> Self {
        self.norm = norm;
        self
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn norm(&self) -> RadiusNorm {
        self.norm
    }

    /// Chebyshev half-width of the Dijkstra search window.
    pub fn search_half_width(&self) -> usize {
        self.radius.floor().to_usize().unwrap_or(0)
    }

    /// Whether offset `(dx, dy)` passes the modified-amoeba radius cap.
    pub fn within_cap(&self, dx: isize, dy: isize) -> bool {
        match self.norm {
            RadiusNorm::Chebyshev => {
                let cap = self.radius.ceil().to_usize().unwrap_or(0);
                dx.unsigned_abs().max(dy.unsigned_abs()) <= cap
            }
            RadiusNorm::Euclidean => {
                let d2 = (dx * dx + dy * dy) as f64;
                d2.sqrt() <= self.radius.as_f64()
            }
        }
    }
}

/// A spatially-variant structuring element: its center and member pixels,
/// listed row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amoeba {
    pub center: PixelCoord,
    pub members: Vec<PixelCoord>,
}

impl Amoeba {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: PixelCoord) -> bool {
        self.members.binary_search_by_key(&(p.y, p.x), |m| (m.y, m.x)).is_ok()
    }
}

/// Absolute intensity difference on the pilot image.
pub fn pixel_distance<T: Scalar>(pilot: &Image<T>, a: PixelCoord, b: PixelCoord) -> Result<T> {
    pilot.check_coord(a)?;
    pilot.check_coord(b)?;
    Ok((pilot.at(a) - pilot.at(b)).abs())
}

/// Original amoeba `{ y : d_lambda(center, y) <= r }`.
pub fn compute_amoeba<T: Scalar>(
    pilot: &Image<T>,
    center: PixelCoord,
    params: AmoebaParams<T>,
) -> Result<Amoeba> {
    pilot.check_coord(center)?;
    let mut grower = AmoebaGrower::new(pilot, params);
    let mut out = Vec::new();
    grower.original(center.x, center.y, &mut out);
    Ok(to_amoeba(pilot.width(), center, &out))
}

/// Modified amoeba: original amoeba dilated by the 5-point diamond, capped
/// by the radius test and clipped to the image.
pub fn compute_modified_amoeba<T: Scalar>(
    pilot: &Image<T>,
    center: PixelCoord,
    params: AmoebaParams<T>,
) -> Result<Amoeba> {
    pilot.check_coord(center)?;
    let mut grower = AmoebaGrower::new(pilot, params);
    let mut out = Vec::new();
    grower.modified(center.x, center.y, &mut out);
    Ok(to_amoeba(pilot.width(), center, &out))
}

fn to_amoeba(width: usize, center: PixelCoord, indices: &[u32]) -> Amoeba {
    Amoeba {
        center,
        members: indices
            .iter()
            .map(|&i| PixelCoord::new(i as usize % width, i as usize / width))
            .collect(),
    }
}
