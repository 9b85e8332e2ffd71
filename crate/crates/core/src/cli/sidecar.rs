//! Lossless-enough text raster for edge maps: a `width height` header line,
//! then one value per line in row-major order with six significant digits.

use std::path::Path;

use crate::edge_map::EdgeMap;
use crate::error::{Error, Result};
use crate::img::Image;
use crate::io_util::atomic_write;
use crate::scalar::Scalar;

pub fn encode<T: Scalar>(map: &EdgeMap<T>) -> String {
    let mut s = format!("{} {}\n", map.width(), map.height());
    for v in map.data() {
        s.push_str(&format!("{:.5e}\n", v.as_f64()));
    }
    s
}

pub fn decode<T: Scalar>(text: &str) -> Result<EdgeMap<T>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::MalformedImage("empty edge map file".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::MalformedImage(format!("bad edge map header {header:?}")))?;
    let [w, h] = dims[..] else {
        return Err(Error::MalformedImage(format!(
            "bad edge map header {header:?}"
        )));
    };
    let values: Vec<T> = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse::<f64>()
                .map(T::lit)
                .map_err(|_| Error::MalformedImage(format!("bad edge value {l:?}")))
        })
        .collect::<Result<_>>()?;
    if values.len() != w * h {
        return Err(Error::MalformedImage(format!(
            "expected {} edge values, found {}",
            w * h,
            values.len()
        )));
    }
    EdgeMap::new(Image::new(w, h, values)?)
}

pub fn write<T: Scalar>(map: &EdgeMap<T>, path: &Path) -> Result<()> {
    atomic_write(path, encode(map).as_bytes())
}

pub fn read<T: Scalar>(path: &Path) -> Result<EdgeMap<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    decode(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout() {
        let m = EdgeMap::new(Image::<f64>::new(2, 1, vec![0.0, 123.456789]).unwrap()).unwrap();
        assert_eq!(encode(&m), "2 1\n0.00000e0\n1.23457e2\n");
        assert!(decode::<f64>("2 1\n1\n").is_err());
        assert!(decode::<f64>("2\n1\n").is_err());
    }

    proptest! {
        #[test]
        fn six_significant_digits(vals in proptest::collection::vec(0.0f64..1e4, 12)) {
            let m = EdgeMap::new(Image::new(4, 3, vals.clone()).unwrap()).unwrap();
            let back: EdgeMap<f64> = decode(&encode(&m)).unwrap();
            for (a, b) in vals.iter().zip(back.data()) {
                prop_assert!((a - b).abs() <= 5e-6 * a.abs().max(1e-300));
            }
        }
    }
}
