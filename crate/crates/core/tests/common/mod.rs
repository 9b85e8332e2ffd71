#![allow(dead_code)]

use morphamoeba::img::Image;

/// Deterministic integer-valued test images in `0..levels`.
pub fn lcg_image(w: usize, h: usize, levels: u64, seed: u64) -> Image<f64> {
    let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(11);
    Image::from_fn(w, h, |_, _| {
        s = s
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((s >> 33) % levels) as f64
    })
}

/// All-pairs amoeba distances on the 8-connected pixel graph.
pub fn floyd_warshall(pilot: &Image<f64>, lambda: f64) -> Vec<Vec<f64>> {
    let (w, h) = pilot.dims();
    let n = w * h;
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for i in 0..n {
        d[i][i] = 0.0;
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for dy in -1..=1isize {
            for dx in -1..=1isize {
                let (nx, ny) = (x + dx, y + dy);
                if (dx, dy) == (0, 0) || nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                d[i][j] = 1.0 + lambda * (pilot.data()[i] - pilot.data()[j]).abs();
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i][k];
            if dik.is_infinite() {
                continue;
            }
            for j in 0..n {
                let c = dik + d[k][j];
                if c < d[i][j] {
                    d[i][j] = c;
                }
            }
        }
    }
    d
}

/// Original amoeba of pixel `i` from an all-pairs table, as sorted indices.
pub fn oracle_original(d: &[Vec<f64>], i: usize, r: f64) -> Vec<u32> {
    (0..d.len()).filter(|&j| d[i][j] <= r).map(|j| j as u32).collect()
}

/// Original amoeba dilated by the 5-point diamond, kept within Chebyshev
/// distance `ceil(r)` of the center, clipped to the image.
pub fn oracle_modified(d: &[Vec<f64>], w: usize, h: usize, i: usize, r: f64) -> Vec<u32> {
    let cap = r.ceil() as isize;
    let (cx, cy) = ((i % w) as isize, (i / w) as isize);
    let orig = oracle_original(d, i, r);
    let mut out = Vec::new();
    for j in 0..w * h {
        let (x, y) = ((j % w) as isize, (j / w) as isize);
        if (x - cx).abs().max((y - cy).abs()) > cap {
            continue;
        }
        let near = orig.iter().any(|&m| {
            let (mx, my) = ((m as usize % w) as isize, (m as usize / w) as isize);
            (mx - x).abs() + (my - y).abs() <= 1
        });
        if near {
            out.push(j as u32);
        }
    }
    out
}

pub fn assert_same_image(a: &Image<f64>, b: &Image<f64>, what: &str) {
    assert_eq!(a.dims(), b.dims(), "{what}: dims");
    for (i, (x, y)) in a.data().iter().zip(b.data()).enumerate() {
        assert!(x.to_bits() == y.to_bits(), "{what}: pixel {i}: {x} vs {y}");
    }
}
