//! Synthetic benchmark image and seeded noise models.
//!
//! Every pixel draws from its own ChaCha stream (stream id = linear pixel
//! index), so the output depends only on `(image, parameters, seed)` and
//! never on evaluation order or worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::edge_map::{BinaryEdgeMap, GroundTruth};
use crate::error::{Error, Result};
use crate::img::Image;
use crate::scalar::Scalar;

pub const DEFAULT_CIRCLE_SIZE: usize = 256;
pub const DEFAULT_CIRCLE_RADIUS: f64 = 64.0;
pub const DEFAULT_OUTER_LEVEL: f64 = 100.0;
pub const DEFAULT_INNER_LEVEL: f64 = 150.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    None,
    Gaussian,
    Impulse,
}

impl NoiseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::None => "none",
            NoiseKind::Gaussian => "gaussian",
            NoiseKind::Impulse => "impulse",
        }
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(NoiseKind::None),
            "gaussian" | "gauss" => Ok(NoiseKind::Gaussian),
            "impulse" | "salt-and-pepper" | "sp" => Ok(NoiseKind::Impulse),
            other => Err(Error::InvalidParameter(format!("unknown noise kind {other:?}"))),
        }
    }
}

/// Noise model plus its seed. `level` is sigma for Gaussian noise and the
/// corruption probability for impulse noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub level: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            level: 0.0,
            seed: 0,
        }
    }

    pub fn gaussian(sigma: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::Gaussian,
            level: sigma,
            seed,
        }
    }

    pub fn impulse(prob: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::Impulse,
            level: prob,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            NoiseKind::None => Ok(()),
            NoiseKind::Gaussian if self.level >= 0.0 && self.level.is_finite() => Ok(()),
            NoiseKind::Impulse if (0.0..=1.0).contains(&self.level) => Ok(()),
            _ => Err(Error::InvalidParameter(format!(
                "{} noise level {} out of range",
                self.kind.as_str(),
                self.level
            ))),
        }
    }

    pub fn apply<T: Scalar>(&self, image: &Image<T>) -> Result<Image<T>> {
        self.validate()?;
        Ok(match self.kind {
            NoiseKind::None => image.clone(),
            NoiseKind::Gaussian => add_gaussian_noise(image, self.level, self.seed),
            NoiseKind::Impulse => add_impulse_noise(image, self.level, self.seed),
        })
    }
}

/// The circle benchmark: `inner_level` strictly inside `radius` of the
/// image center, `outer_level` elsewhere. The ground truth marks inner
/// pixels with at least one 8-neighbour in the outer region.
pub fn make_circle_image<T: Scalar>(
    size: usize,
    outer_level: f64,
    inner_level: f64,
    radius: f64,
) -> Result<(Image<T>, GroundTruth)> {
    if size == 0 || !(radius > 0.0 && radius < size as f64 / 2.0) {
        return Err(Error::InvalidParameter(format!(
            "circle radius {radius} must lie in (0, {})",
            size as f64 / 2.0
        )));
    }
    let c = (size as f64 - 1.0) / 2.0;
    let inside = |x: usize, y: usize| {
        let dx = x as f64 - c;
        let dy = y as f64 - c;
        (dx * dx + dy * dy).sqrt() < radius
    };
    let image = Image::from_fn(size, size, |x, y| {
        T::lit(if inside(x, y) { inner_level } else { outer_level })
    });
    let contrast = inner_level != outer_level;
    let mask = BinaryEdgeMap::from_fn(size, size, |x, y| {
        if !contrast || !inside(x, y) {
            return false;
        }
        neighbours8(x, y, size, size).any(|(nx, ny)| !inside(nx, ny))
    });
    Ok((image, GroundTruth::new(mask)))
}

/// In-bounds 8-neighbours of `(x, y)`.
pub(crate) fn neighbours8(
    x: usize,
    y: usize,
    width: usize,
    height: usize,
) -> impl Iterator<Item = (usize, usize)> {
    const STEPS: [(isize, isize); 8] = [
        (-1, -1),
        (0, -1),
        (1, -1),
        (-1, 0),
        (1, 0),
        (-1, 1),
        (0, 1),
        (1, 1),
    ];
    STEPS.iter().filter_map(move |&(dx, dy)| {
        let nx = x as isize + dx;
        let ny = y as isize + dy;
        (nx >= 0 && ny >= 0 && (nx as usize) < width && (ny as usize) < height)
            .then_some((nx as usize, ny as usize))
    })
}

fn pixel_rng(base: &ChaCha8Rng, index: usize) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(index as u64);
    rng
}

fn clamp_255<T: Scalar>(v: T) -> T {
    v.max(T::zero()).min(T::lit(255.0))
}

/// Adds i.i.d. `N(0, sigma^2)` noise and clamps to `[0, 255]`.
pub fn add_gaussian_noise<T: Scalar>(image: &Image<T>, sigma: f64, seed: u64) -> Image<T> {
    let base = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<T> = image
        .data()
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            let z: f64 = pixel_rng(&base, i).sample(StandardNormal);
            clamp_255(v + T::lit(sigma * z))
        })
        .collect();
    Image::from_raw(image.width(), image.height(), data)
}

/// Replaces each pixel with probability `prob` by 0 or 255 (equally likely).
pub fn add_impulse_noise<T: Scalar>(image: &Image<T>, prob: f64, seed: u64) -> Image<T> {
    let (data, _) = impulse_with_mask(image, prob, seed);
    Image::from_raw(image.width(), image.height(), data)
}

/// Impulse noise plus the mask of corrupted pixels.
pub fn impulse_with_mask<T: Scalar>(image: &Image<T>, prob: f64, seed: u64) -> (Vec<T>, Vec<bool>) {
    let base = ChaCha8Rng::seed_from_u64(seed);
    image
        .data()
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut rng = pixel_rng(&base, i);
            let u: f64 = rng.gen();
            if u < prob {
                let salt: bool = rng.gen();
                (if salt { T::lit(255.0) } else { T::zero() }, true)
            } else {
                (v, false)
            }
        })
        .unzip()
}
