use crate::error::{Error, Result};

/// Flat structuring element: a set of integer `(dx, dy)` offsets that
/// always contains the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    offsets: Vec<(isize, isize)>,
}

impl StructuringElement {
    /// Offsets are deduplicated and sorted row-major.
    pub fn new(offsets: impl IntoIterator<Item = (isize, isize)>) -> Result<Self> {
        let mut offsets: Vec<_> = offsets.into_iter().collect();
        offsets.sort_by_key(|&(dx, dy)| (dy, dx));
        offsets.dedup();
        if !offsets.contains(&(0, 0)) {
            return Err(Error::InvalidParameter(
                "structuring element must contain the origin".into(),
            ));
        }
        Ok(Self { offsets })
    }

    pub fn offsets(&self) -> &[(isize, isize)] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Largest Chebyshev extent of any offset.
    pub fn radius(&self) -> usize {
        self.offsets
            .iter()
            .map(|&(dx, dy)| dx.unsigned_abs().max(dy.unsigned_abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.offsets
            .iter()
            .all(|&(dx, dy)| self.offsets.binary_search_by_key(&(-dy, -dx), |&(a, b)| (b, a)).is_ok())
    }
}

fn ball(radius: usize, inside: impl Fn(isize, isize) -> bool) -> StructuringElement {
    let r = radius as isize;
    let mut offsets = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if inside(dx, dy) {
                offsets.push((dx, dy));
            }
        }
    }
    StructuringElement { offsets }
}

/// All offsets with `max(|dx|, |dy|) <= radius`.
pub fn make_square_se(radius: usize) -> StructuringElement {
    ball(radius, |_, _| true)
}

/// All offsets with `|dx| + |dy| <= radius`.
pub fn make_diamond_se(radius: usize) -> StructuringElement {
    let r = radius as isize;
    ball(radius, |dx, dy| dx.abs() + dy.abs() <= r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_sizes() {
        assert_eq!(make_square_se(0).offsets(), &[(0, 0)]);
        assert_eq!(make_square_se(1).len(), 9);
        assert_eq!(make_square_se(2).len(), 25);
        for r in 0..8 {
            assert_eq!(make_square_se(r).len(), (2 * r + 1).pow(2));
            assert_eq!(make_square_se(r).radius(), r);
        }
    }

    #[test]
    fn diamond_sizes() {
        assert_eq!(make_diamond_se(0).offsets(), &[(0, 0)]);
        let h = make_diamond_se(1);
        assert_eq!(h.offsets(), &[(0, -1), (-1, 0), (0, 0), (1, 0), (0, 1)]);
        assert_eq!(make_diamond_se(2).len(), 13);
        for r in 0..8 {
            assert_eq!(make_diamond_se(r).len(), 2 * r * r + 2 * r + 1);
        }
    }

    #[test]
    fn origin_always_present() {
        for r in 0..5 {
            assert!(make_square_se(r).offsets().contains(&(0, 0)));
            assert!(make_diamond_se(r).offsets().contains(&(0, 0)));
            assert!(make_square_se(r).is_symmetric());
        }
        assert!(StructuringElement::new([(1, 0)]).is_err());
        let se = StructuringElement::new([(1, 0), (0, 0), (1, 0)]).unwrap();
        assert_eq!(se.len(), 2);
        assert!(!se.is_symmetric());
    }
}
