use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::amoeba::AmoebaParams;
use crate::img::Image;
use crate::scalar::Scalar;

#[derive(Clone, Copy)]
struct Frontier<T> {
    dist: T,
    // window-local row-major index; ordering by it breaks ties on (y, x)
    local: u32,
}

impl<T: Scalar> PartialEq for Frontier<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Frontier<T> {}

impl<T: Scalar> PartialOrd for Frontier<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Frontier<T> {
    // reversed: BinaryHeap is a max-heap and we want the smallest distance
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp_finite(&self.dist)
            .then_with(|| other.local.cmp(&self.local))
    }
}

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

const DIAMOND: [(isize, isize); 5] = [(0, -1), (-1, 0), (0, 0), (1, 0), (0, 1)];

/// Reusable Dijkstra workspace for growing amoebas around successive
/// centers on one pilot image.
///
/// Scratch buffers cover the Chebyshev window of half-width `floor(r) + 1`
/// around the current center and are reset incrementally, so growing one
/// amoeba costs `O(m log m)` for `m` reached pixels.
pub struct AmoebaGrower<'a, T> {
    pilot: &'a Image<T>,
    params: AmoebaParams<T>,
    half: usize,
    side: usize,
    dist: Vec<T>,
    settled: Vec<bool>,
    touched: Vec<u32>,
    mark: Vec<bool>,
    heap: BinaryHeap<Frontier<T>>,
    scratch: Vec<u32>,
}

impl<'a, T: Scalar> AmoebaGrower<'a, T> {
    pub fn new(pilot: &'a Image<T>, params: AmoebaParams<T>) -> Self {
        let half = params.search_half_width() + 1;
        let side = 2 * half + 1;
        Self {
            pilot,
            params,
            half,
            side,
            dist: vec![T::infinity(); side * side],
            settled: vec![false; side * side],
            touched: Vec::new(),
            mark: vec![false; side * side],
            heap: BinaryHeap::new(),
            scratch: Vec::new(),
        }
    }

    #[inline]
    fn local(&self, dx: isize, dy: isize) -> usize {
        (dy + self.half as isize) as usize * self.side + (dx + self.half as isize) as usize
    }

    /// Linear pixel indices of the original amoeba at `(cx, cy)`, row-major,
    /// written into `out` (which is cleared first).
    pub fn original(&mut self, cx: usize, cy: usize, out: &mut Vec<u32>) {
        out.clear();
        let (w, h) = self.pilot.dims();
        let px = self.pilot.data();
        let radius = self.params.radius();
        let lambda = self.params.lambda();
        let reach = self.params.search_half_width() as isize;

        let start = self.local(0, 0);
        self.dist[start] = T::zero();
        self.touched.push(start as u32);
        self.heap.push(Frontier {
            dist: T::zero(),
            local: start as u32,
        });

        while let Some(Frontier { dist, local }) = self.heap.pop() {
            let li = local as usize;
            if self.settled[li] {
                continue;
            }
            self.settled[li] = true;
            let dx = (li % self.side) as isize - self.half as isize;
            let dy = (li / self.side) as isize - self.half as isize;
            let x = cx as isize + dx;
            let y = cy as isize + dy;
            let here = px[y as usize * w + x as usize];
            out.push((y as usize * w + x as usize) as u32);

            for &(sx, sy) in &STEPS {
                let ndx = dx + sx;
                let ndy = dy + sy;
                if ndx.abs() > reach || ndy.abs() > reach {
                    continue;
                }
                let nx = x + sx;
                let ny = y + sy;
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let nl = self.local(ndx, ndy);
                if self.settled[nl] {
                    continue;
                }
                let there = px[ny as usize * w + nx as usize];
                let nd = dist + (T::one() + lambda * (here - there).abs());
                if nd <= radius && nd < self.dist[nl] {
                    if self.dist[nl].is_infinite() {
                        self.touched.push(nl as u32);
                    }
                    self.dist[nl] = nd;
                    self.heap.push(Frontier {
                        dist: nd,
                        local: nl as u32,
                    });
                }
            }
        }

        for &t in &self.touched {
            self.dist[t as usize] = T::infinity();
            self.settled[t as usize] = false;
        }
        self.touched.clear();
        out.sort_unstable();
    }

    /// Linear pixel indices of the modified amoeba at `(cx, cy)`, row-major.
    pub fn modified(&mut self, cx: usize, cy: usize, out: &mut Vec<u32>) {
        let mut base = std::mem::take(&mut self.scratch);
        self.original(cx, cy, &mut base);
        out.clear();
        let (w, h) = self.pilot.dims();
        let half = self.half as isize;
        let mut marked: Vec<u32> = Vec::with_capacity(base.len() * 2);
        for &m in &base {
            let mx = (m as usize % w) as isize;
            let my = (m as usize / w) as isize;
            for &(sx, sy) in &DIAMOND {
                let x = mx + sx;
                let y = my + sy;
                if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
                    continue;
                }
                let dx = x - cx as isize;
                let dy = y - cy as isize;
                if dx.abs() > half || dy.abs() > half || !self.params.within_cap(dx, dy) {
                    continue;
                }
                let l = self.local(dx, dy);
                if !self.mark[l] {
                    self.mark[l] = true;
                    marked.push(l as u32);
                    out.push((y as usize * w + x as usize) as u32);
                }
            }
        }
        for &l in &marked {
            self.mark[l as usize] = false;
        }
        out.sort_unstable();
        self.scratch = base;
    }
}
