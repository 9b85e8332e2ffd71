use crate::error::{Error, Result};
use crate::img::Image;
use crate::scalar::Scalar;

/// Real-valued edge strengths; every value is finite and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMap<T> {
    strengths: Image<T>,
}

impl<T: Scalar> EdgeMap<T> {
    pub fn new(strengths: Image<T>) -> Result<Self> {
        if strengths.data().iter().any(|&v| !(v >= T::zero())) {
            return Err(Error::InvalidParameter(
                "edge strengths must be non-negative".into(),
            ));
        }
        Ok(Self { strengths })
    }

    /// Detector output; negative values are clamped to zero.
    pub(crate) fn from_response(response: Image<T>) -> Self {
        Self {
            strengths: response.map(|v| v.max(T::zero())),
        }
    }

    pub fn strengths(&self) -> &Image<T> {
        &self.strengths
    }

    pub fn into_image(self) -> Image<T> {
        self.strengths
    }

    pub fn data(&self) -> &[T] {
        self.strengths.data()
    }

    pub fn width(&self) -> usize {
        self.strengths.width()
    }

    pub fn height(&self) -> usize {
        self.strengths.height()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.strengths.dims()
    }

    /// Linear rescale so the maximum maps to 255; all-zero maps stay zero.
    pub fn normalized_for_display(&self) -> Image<T> {
        let max = self.strengths.max_value();
        if max > T::zero() {
            let scale = T::lit(255.0) / max;
            self.strengths.map(|v| v * scale)
        } else {
            self.strengths.clone()
        }
    }
}

/// Boolean raster of edge / non-edge pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryEdgeMap {
    width: usize,
    height: usize,
    mask: Vec<bool>,
}

impl BinaryEdgeMap {
    pub fn new(width: usize, height: usize, mask: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || mask.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "mask of {} entries does not fit {width}x{height}",
                mask.len()
            )));
        }
        Ok(Self {
            width,
            height,
            mask,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            mask: vec![false; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut mask = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                mask.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            mask,
        }
    }

    /// Nonzero pixels are edges.
    pub fn from_image<T: Scalar>(image: &Image<T>) -> Self {
        Self {
            width: image.width(),
            height: image.height(),
            mask: image.data().iter().map(|&v| v != T::zero()).collect(),
        }
    }

    /// Edges as 255, background as 0.
    pub fn to_image<T: Scalar>(&self) -> Image<T> {
        let on = T::lit(255.0);
        Image::from_raw(
            self.width,
            self.height,
            self.mask
                .iter()
                .map(|&b| if b { on } else { T::zero() })
                .collect(),
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.mask[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn iter_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| (i % self.width, i / self.width))
    }
}

/// Ideal edge set paired with a benchmark image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    pub edge_mask: BinaryEdgeMap,
}

impl GroundTruth {
    pub fn new(edge_mask: BinaryEdgeMap) -> Self {
        Self { edge_mask }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.edge_mask.dims()
    }

    pub fn count(&self) -> usize {
        self.edge_mask.count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_strengths() {
        let img = Image::<f64>::new(2, 1, vec![1.0, -0.5]).unwrap();
        assert!(EdgeMap::new(img.clone()).is_err());
        let clamped = EdgeMap::from_response(img);
        assert_eq!(clamped.data(), &[1.0, 0.0]);
    }

    #[test]
    fn display_normalization() {
        let img = Image::<f64>::new(2, 1, vec![2.0, 4.0]).unwrap();
        let e = EdgeMap::new(img).unwrap();
        assert_eq!(e.normalized_for_display().data(), &[127.5, 255.0]);
        let zero = EdgeMap::new(Image::<f64>::filled(2, 2, 0.0)).unwrap();
        assert_eq!(zero.normalized_for_display().max_value(), 0.0);
    }

    #[test]
    fn mask_round_trip() {
        let m = BinaryEdgeMap::from_fn(3, 2, |x, y| x == y);
        assert_eq!(m.count(), 2);
        assert_eq!(BinaryEdgeMap::from_image(&m.to_image::<f32>()), m);
        assert_eq!(m.iter_edges().collect::<Vec<_>>(), vec![(0, 0), (1, 1)]);
    }
}
