use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::amoeba::{to_amoeba, Amoeba, AmoebaGrower, AmoebaParams};
use crate::img::{Image, PixelCoord};
use crate::scalar::Scalar;

/// One amoeba per pixel, stored in compressed-row form: the members of
/// pixel `i` are `members[starts[i]..starts[i + 1]]`, as row-major linear
/// indices.
#[derive(Debug, Clone, PartialEq)]
pub struct AmoebaField<T> {
    width: usize,
    height: usize,
    starts: Vec<usize>,
    members: Vec<u32>,
    params: AmoebaParams<T>,
    modified: bool,
    pilot_digest: [u8; 32],
}

impl<T: Scalar> AmoebaField<T> {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn params(&self) -> AmoebaParams<T> {
        self.params
    }

    pub fn is_modified(&self) -> bool {
        self.modified
    }

    /// SHA-256 of the pilot image the shapes were grown on.
    pub fn pilot_digest(&self) -> &[u8; 32] {
        &self.pilot_digest
    }

    /// Linear indices of the members at linear pixel index `i`.
    #[inline]
    pub fn members_at(&self, i: usize) -> &[u32] {
        &self.members[self.starts[i]..self.starts[i + 1]]
    }

    pub fn amoeba(&self, p: PixelCoord) -> Amoeba {
        to_amoeba(self.width, p, self.members_at(p.y * self.width + p.x))
    }

    pub fn total_members(&self) -> usize {
        self.members.len()
    }
}

pub(crate) fn digest_image<T: Scalar>(image: &Image<T>) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update((image.width() as u64).to_le_bytes());
    h.update((image.height() as u64).to_le_bytes());
    for v in image.data() {
        h.update(v.as_f64().to_bits().to_le_bytes());
    }
    h.finalize().into()
}

/// Grows the (original or modified) amoeba of every pixel of `pilot`.
/// Rows are processed in parallel; the result is identical to a
/// sequential sweep.
pub fn compute_amoeba_field<T: Scalar>(
    pilot: &Image<T>,
    params: AmoebaParams<T>,
    modified: bool,
) -> AmoebaField<T> {
    let (w, h) = pilot.dims();
    let rows: Vec<(Vec<usize>, Vec<u32>)> = (0..h)
        .into_par_iter()
        .map_init(
            || (AmoebaGrower::new(pilot, params), Vec::new()),
            |(grower, buf), y| {
                let mut lens = Vec::with_capacity(w);
                let mut members = Vec::new();
                for x in 0..w {
                    if modified {
                        grower.modified(x, y, buf);
                    } else {
                        grower.original(x, y, buf);
                    }
                    lens.push(buf.len());
                    members.extend_from_slice(buf);
                }
                (lens, members)
            },
        )
        .collect();

    let total: usize = rows.iter().map(|(_, m)| m.len()).sum();
    let mut starts = Vec::with_capacity(w * h + 1);
    let mut members = Vec::with_capacity(total);
    starts.push(0);
    for (lens, row_members) in rows {
        for len in lens {
            starts.push(starts.last().unwrap() + len);
        }
        members.extend(row_members);
    }

    AmoebaField {
        width: w,
        height: h,
        starts,
        members,
        params,
        modified,
        pilot_digest: digest_image(pilot),
    }
}
