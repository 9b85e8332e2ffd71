mod common;

use common::{assert_same_image, lcg_image};
use morphamoeba::edge_map::BinaryEdgeMap;
use morphamoeba::eval::{best_fom, pratt_fom, ThresholdSampling, DEFAULT_FOM_ALPHA};
use morphamoeba::filters::{TrimSpec, WindowSpec};
use morphamoeba::img::{make_diamond_se, make_square_se, Image, StructuringElement};
use morphamoeba::morph::{close, detect_atm, detect_bm, detect_mg, detect_rnm, dilate, erode, open};
use morphamoeba::noise::{add_impulse_noise, make_circle_image};

fn brute(image: &Image<f64>, se: &StructuringElement, largest: bool) -> Image<f64> {
    let (w, h) = image.dims();
    Image::from_fn(w, h, |x, y| {
        let mut best = if largest { f64::NEG_INFINITY } else { f64::INFINITY };
        for yy in 0..h {
            for xx in 0..w {
                let (dx, dy) = (xx as isize - x as isize, yy as isize - y as isize);
                if se.offsets().iter().any(|&(ox, oy)| (ox, oy) == (dx, dy)) {
                    let v = image.get(xx, yy);
                    best = if largest { best.max(v) } else { best.min(v) };
                }
            }
        }
        best
    })
}

#[test]
fn dilate_erode_match_whole_image_scan() {
    let ses = [make_square_se(1), make_square_se(2), make_diamond_se(1)];
    for seed in 0..100 {
        let img = lcg_image(9, 7, 256, seed);
        let se = &ses[seed as usize % 3];
        assert_same_image(&dilate(&img, se), &brute(&img, se, true), "dilate");
        assert_same_image(&erode(&img, se), &brute(&img, se, false), "erode");
    }
}

#[test]
fn order_and_idempotence() {
    let se = make_square_se(1);
    for seed in 0..100 {
        let f = lcg_image(16, 16, 256, seed);
        let (e, d, o, c) = (erode(&f, &se), dilate(&f, &se), open(&f, &se), close(&f, &se));
        for i in 0..f.len() {
            let v = f.data()[i];
            assert!(e.data()[i] <= v && v <= d.data()[i]);
            assert!(o.data()[i] <= v && v <= c.data()[i]);
        }
        assert_same_image(&open(&o, &se), &o, "open idempotent");
        assert_same_image(&close(&c, &se), &c, "close idempotent");
    }
}

#[test]
fn detectors_nonnegative_on_many_images() {
    let se = make_square_se(1);
    let (win, trim) = (WindowSpec::new(1), TrimSpec::new(0.25).unwrap());
    for seed in 0..1000 {
        let f = lcg_image(8, 8, 256, seed);
        for e in [
            detect_mg(&f, &se),
            detect_bm(&f, &se, win),
            detect_atm(&f, &se, win, trim),
            detect_rnm(&f, &se),
        ] {
            assert!(e.data().iter().all(|&v| v >= 0.0));
        }
    }
}

#[test]
fn impulse_is_removed_by_opening() {
    let mut f = Image::<f64>::filled(7, 7, 0.0);
    f.set(3, 3, 255.0);
    assert!(open(&f, &make_square_se(1)).data().iter().all(|&v| v == 0.0));
}

#[test]
fn rnm_energy_is_far_below_mg_on_impulse_noise() {
    let f = add_impulse_noise(&Image::<f64>::filled(64, 64, 128.0), 0.2, 9);
    let se = make_square_se(1);
    let mg: f64 = detect_mg(&f, &se).data().iter().sum();
    let rnm: f64 = detect_rnm(&f, &se).data().iter().sum();
    assert!(rnm < 0.25 * mg, "rnm {rnm} vs mg {mg}");
}

#[test]
fn noiseless_circle_mg_hugs_the_ring() {
    let (img, truth) = make_circle_image::<f64>(256, 100.0, 150.0, 64.0).unwrap();
    let edges = detect_mg(&img, &make_square_se(1));
    let ring = dilate(&truth.edge_mask.to_image::<f64>(), &make_square_se(1));
    for i in 0..img.len() {
        let v = edges.data()[i];
        if v > 0.0 {
            assert!(ring.data()[i] > 0.0, "response off the ring at {i}");
        }
        if truth.edge_mask.mask()[i] {
            assert!(v > 0.0, "ring pixel {i} without response");
        }
    }
    // every response is the full step of 50, so each threshold sees the same
    // two-pixel band: the ring plus its outer neighbours
    assert!(edges.data().iter().all(|&v| v == 0.0 || v == 50.0));
    let band = BinaryEdgeMap::from_image(edges.strengths());
    let expected = pratt_fom(&band, &truth, DEFAULT_FOM_ALPHA).unwrap();
    let (fom, t) = best_fom(&edges, &truth, DEFAULT_FOM_ALPHA, &ThresholdSampling::Auto).unwrap();
    assert_eq!((fom, t), (expected, 50.0));
    assert!(fom > 0.93, "fom {fom}");
}
