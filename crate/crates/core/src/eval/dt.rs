//! Exact Euclidean distance transform (lower envelope of parabolas, run
//! once per column and once per row).

use crate::edge_map::BinaryEdgeMap;

fn envelope_1d(f: &[f64], out: &mut [f64], v: &mut Vec<usize>, z: &mut Vec<f64>) {
    let n = f.len();
    v.clear();
    z.clear();
    let first = match (0..n).find(|&i| f[i].is_finite()) {
        Some(i) => i,
        None => {
            out.iter_mut().for_each(|o| *o = f64::INFINITY);
            return;
        }
    };
    v.push(first);
    z.push(f64::NEG_INFINITY);
    for q in first + 1..n {
        if !f[q].is_finite() {
            continue;
        }
        // z[0] is -inf, so the envelope never empties
        loop {
            let p = *v.last().unwrap();
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q - p) as f64);
            if s <= *z.last().unwrap() {
                v.pop();
                z.pop();
            } else {
                v.push(q);
                z.push(s);
                break;
            }
        }
    }
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while k + 1 < z.len() && z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let d = q as f64 - p as f64;
        *o = d * d + f[p];
    }
}

/// Squared Euclidean distance from every pixel to the nearest set pixel;
/// infinity when the mask is empty.
pub fn squared_distance_transform(mask: &BinaryEdgeMap) -> Vec<f64> {
    let (w, h) = mask.dims();
    let mut grid: Vec<f64> = mask
        .mask()
        .iter()
        .map(|&b| if b { 0.0 } else { f64::INFINITY })
        .collect();
    let (mut v, mut z) = (Vec::new(), Vec::new());
    let mut col = vec![0.0; h];
    let mut col_out = vec![0.0; h];
    for x in 0..w {
        for y in 0..h {
            col[y] = grid[y * w + x];
        }
        envelope_1d(&col, &mut col_out, &mut v, &mut z);
        for y in 0..h {
            grid[y * w + x] = col_out[y];
        }
    }
    let mut row_out = vec![0.0; w];
    for y in 0..h {
        envelope_1d(&grid[y * w..(y + 1) * w], &mut row_out, &mut v, &mut z);
        grid[y * w..(y + 1) * w].copy_from_slice(&row_out);
    }
    grid
}

/// Euclidean distance to the nearest set pixel.
pub fn distance_transform(mask: &BinaryEdgeMap) -> Vec<f64> {
    squared_distance_transform(mask)
        .into_iter()
        .map(f64::sqrt)
        .collect()
}
