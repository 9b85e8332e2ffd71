//! Binary (P5) and ASCII (P2) PGM codec.
//!
//! Writing always produces P5 with maxval 255. Reading accepts P5 and P2
//! with maxval up to 255; smaller maxvals are rescaled to the 0..=255 range.

use std::path::Path;

use crate::error::{Error, Result};
use crate::img::Image;
use crate::scalar::Scalar;

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_ws_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::MalformedImage(format!("missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedImage(format!("{what} out of range")))
    }
}

/// Decodes a PGM byte stream.
pub fn decode_pgm<T: Scalar>(bytes: &[u8]) -> Result<Image<T>> {
    if bytes.len() < 2 {
        return Err(Error::MalformedImage("file too short for a header".into()));
    }
    let binary = match &bytes[..2] {
        b"P5" => true,
        b"P2" => false,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "magic {:?} is not a grayscale PGM",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedImage(format!(
            "zero dimension {width}x{height}"
        )));
    }
    if maxval == 0 {
        return Err(Error::MalformedImage("maxval of zero".into()));
    }
    if maxval > 255 {
        return Err(Error::UnsupportedFormat(format!(
            "maxval {maxval} needs more than 8 bits"
        )));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::MalformedImage("dimensions overflow".into()))?;

    let raw: Vec<usize> = if binary {
        // exactly one whitespace byte separates the header from the raster
        if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
            return Err(Error::MalformedImage("truncated header".into()));
        }
        let start = cur.pos + 1;
        let end = start + count;
        if bytes.len() < end {
            return Err(Error::MalformedImage(format!(
                "expected {count} raster bytes, found {}",
                bytes.len().saturating_sub(start)
            )));
        }
        bytes[start..end].iter().map(|&b| usize::from(b)).collect()
    } else {
        let mut v = Vec::with_capacity(count);
        for _ in 0..count {
            v.push(cur.number("sample")?);
        }
        v
    };

    let mut data = Vec::with_capacity(count);
    for v in raw {
        if v > maxval {
            return Err(Error::MalformedImage(format!(
                "sample {v} exceeds maxval {maxval}"
            )));
        }
        let scaled = if maxval == 255 {
            v as f64
        } else {
            (v as f64 * 255.0 / maxval as f64).round()
        };
        data.push(T::lit(scaled));
    }
    Image::new(width, height, data)
}

/// Encodes as binary P5, maxval 255, after clamping and half-up rounding.
pub fn encode_pgm<T: Scalar>(image: &Image<T>) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend(image.to_u8());
    out
}

pub fn read_image<T: Scalar>(path: impl AsRef<Path>) -> Result<Image<T>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pgm(&bytes)
}

/// Writes a P5 file. The bytes go to a temporary sibling first and are
/// renamed into place, so a failed write never leaves a truncated file.
pub fn write_image<T: Scalar>(image: &Image<T>, path: impl AsRef<Path>) -> Result<()> {
    crate::io_util::atomic_write(path.as_ref(), &encode_pgm(image))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_pixel_round_trip() {
        let img = Image::<f64>::filled(1, 1, 100.0);
        let back: Image<f64> = decode_pgm(&encode_pgm(&img)).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn header_layout() {
        let img = Image::<f64>::filled(3, 2, 7.0);
        let bytes = encode_pgm(&img);
        assert_eq!(&bytes[..11], b"P5\n3 2\n255\n");
        assert_eq!(&bytes[11..], &[7u8; 6]);
    }

    #[test]
    fn truncated_is_malformed() {
        let img = Image::<f64>::filled(4, 4, 1.0);
        let bytes = encode_pgm(&img);
        let err = decode_pgm::<f64>(&bytes[..bytes.len() - 1]).unwrap_err();
        assert!(matches!(err, Error::MalformedImage(_)), "{err}");
        assert!(matches!(
            decode_pgm::<f64>(b"P5\n4"),
            Err(Error::MalformedImage(_))
        ));
    }

    #[test]
    fn wrong_magic_is_unsupported() {
        assert!(matches!(
            decode_pgm::<f64>(b"P6\n1 1\n255\n\0\0\0"),
            Err(Error::UnsupportedFormat(_))
        ));
        assert!(matches!(
            decode_pgm::<f64>(b"P5\n1 1\n65535\n\0\0"),
            Err(Error::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn ascii_and_comments() {
        let img: Image<f64> = decode_pgm(b"P2\n# a comment\n2 2\n# more\n255\n0 10\n200 255\n").unwrap();
        assert_eq!(img.data(), &[0.0, 10.0, 200.0, 255.0]);
        let small: Image<f64> = decode_pgm(b"P2 1 2 15 15 0").unwrap();
        assert_eq!(small.data(), &[255.0, 0.0]);
    }

    #[test]
    fn file_round_trip_256() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.pgm");
        let img = Image::<f32>::from_fn(256, 256, |x, y| ((x * 7 + y * 13) % 256) as f32);
        write_image(&img, &path).unwrap();
        let back: Image<f32> = read_image(&path).unwrap();
        assert_eq!(back, img);
        assert!(matches!(
            read_image::<f32>(dir.path().join("missing.pgm")),
            Err(Error::Io { .. })
        ));
    }

    proptest! {
        #[test]
        fn u8_round_trip_is_bit_exact(w in 1usize..20, h in 1usize..20, seed in any::<u64>()) {
            let bytes: Vec<u8> = (0..w * h)
                .map(|i| (seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64).wrapping_mul(1442695040888963407) >> 56) as u8)
                .collect();
            let img = Image::<f64>::from_u8(w, h, &bytes).unwrap();
            let encoded = encode_pgm(&img);
            let back: Image<f64> = decode_pgm(&encoded).unwrap();
            prop_assert_eq!(back.to_u8(), bytes);
        }
    }
}
