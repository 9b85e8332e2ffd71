//! Rank-order morphology over modified amoebas and the amoeba edge
//! detectors.
//!
//! Amoeba dilation at `x` is the `k`-th largest image value over the
//! modified amoeba at `x`, erosion the `k`-th smallest, with
//! `k = ceil(beta * |amoeba|)` counted over the member multiset. Shapes are
//! always grown on a Gaussian-blurred pilot; values are always read from
//! the operand image itself.

use rayon::prelude::*;

use crate::amoeba::{compute_amoeba_field, AmoebaField, AmoebaParams, DEFAULT_LAMBDA, DEFAULT_RADIUS};
use crate::edge_map::EdgeMap;
use crate::error::{Error, Result};
use crate::filters::{
    alpha_trimmed_mean_filter, gaussian_blur, mean_filter, TrimSpec, WindowSpec, DEFAULT_PILOT_SIGMA,
};
use crate::img::Image;
use crate::scalar::Scalar;

pub const DEFAULT_BETA: f64 = 0.1;
pub const DEFAULT_BETA1: f64 = 0.3;
pub const DEFAULT_BETA2: f64 = 0.1;

/// Rank fraction `beta` in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankParams {
    beta: f64,
}

impl RankParams {
    pub fn new(beta: f64) -> Result<Self> {
        if beta > 0.0 && beta <= 1.0 {
            Ok(Self { beta })
        } else {
            Err(Error::InvalidParameter(format!("beta {beta} outside (0, 1]")))
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `ceil(beta * m)`, kept within `1..=m`.
    pub fn rank(&self, m: usize) -> usize {
        ((self.beta * m as f64).ceil() as usize).clamp(1, m.max(1))
    }
}

impl Default for RankParams {
    fn default() -> Self {
        Self { beta: DEFAULT_BETA }
    }
}

/// When amoeba shapes are regrown inside the reduced-noise detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PilotGranularity {
    /// One field per composite operation (closing, opening, closing,
    /// dilation); both stages of an opening or closing share it.
    #[default]
    Composite,
    /// A fresh field before every elementary dilation or erosion.
    Elementary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmoebaDetectorConfig<T> {
    pub amoeba: AmoebaParams<T>,
    pub rank: RankParams,
    pub rank1: RankParams,
    pub rank2: RankParams,
    pub window: WindowSpec,
    pub trim: TrimSpec,
    pub pilot_sigma: f64,
    pub granularity: PilotGranularity,
}

impl<T: Scalar> AmoebaDetectorConfig<T> {
    pub fn new(amoeba: AmoebaParams<T>) -> Self {
        Self {
            amoeba,
            rank: RankParams::default(),
            rank1: RankParams { beta: DEFAULT_BETA1 },
            rank2: RankParams { beta: DEFAULT_BETA2 },
            window: WindowSpec::default(),
            trim: TrimSpec::default(),
            pilot_sigma: DEFAULT_PILOT_SIGMA,
            granularity: PilotGranularity::default(),
        }
    }

    /// Uses `rank` for every stage, including both reduced-noise ranks.
    pub fn with_uniform_rank(mut self, rank: RankParams) -> Self {
        self.rank = rank;
        self.rank1 = rank;
        self.rank2 = rank;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pilot_sigma > 0.0 && self.pilot_sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "pilot sigma must be positive, got {}",
                self.pilot_sigma
            )));
        }
        Ok(())
    }
}

impl<T: Scalar> Default for AmoebaDetectorConfig<T> {
    fn default() -> Self {
        Self::new(AmoebaParams::new(T::lit(DEFAULT_LAMBDA), T::lit(DEFAULT_RADIUS)).unwrap())
    }
}

fn rank_filter<T: Scalar>(
    image: &Image<T>,
    field: &AmoebaField<T>,
    rank: RankParams,
    largest: bool,
) -> Image<T> {
    let (w, h) = image.dims();
    let src = image.data();
    let mut out = vec![T::zero(); w * h];
    out.par_chunks_mut(w).enumerate().for_each_init(Vec::new, |buf, (y, row)| {
        for (x, o) in row.iter_mut().enumerate() {
            let members = field.members_at(y * w + x);
            buf.clear();
            buf.extend(members.iter().map(|&m| src[m as usize]));
            let k = rank.rank(buf.len());
            let (_, v, _) = if largest {
                buf.select_nth_unstable_by(k - 1, |a: &T, b: &T| b.total_cmp_finite(a))
            } else {
                buf.select_nth_unstable_by(k - 1, Scalar::total_cmp_finite)
            };
            *o = *v;
        }
    });
    Image::from_raw(w, h, out)
}

/// k-th largest value over each pixel's amoeba.
pub fn amoeba_dilate<T: Scalar>(
    image: &Image<T>,
    field: &AmoebaField<T>,
    rank: RankParams,
) -> Result<Image<T>> {
    image.check_same_dims(field.dims())?;
    Ok(rank_filter(image, field, rank, true))
}

/// k-th smallest value over each pixel's amoeba.
pub fn amoeba_erode<T: Scalar>(
    image: &Image<T>,
    field: &AmoebaField<T>,
    rank: RankParams,
) -> Result<Image<T>> {
    image.check_same_dims(field.dims())?;
    Ok(rank_filter(image, field, rank, false))
}

/// Erosion then dilation, both over `field`.
pub fn amoeba_open_with_field<T: Scalar>(
    image: &Image<T>,
    field: &AmoebaField<T>,
    rank: RankParams,
) -> Result<Image<T>> {
    image.check_same_dims(field.dims())?;
    let e = rank_filter(image, field, rank, false);
    Ok(rank_filter(&e, field, rank, true))
}

/// Dilation then erosion, both over `field`.
pub fn amoeba_close_with_field<T: Scalar>(
    image: &Image<T>,
    field: &AmoebaField<T>,
    rank: RankParams,
) -> Result<Image<T>> {
    image.check_same_dims(field.dims())?;
    let d = rank_filter(image, field, rank, true);
    Ok(rank_filter(&d, field, rank, false))
}

/// Modified-amoeba field grown on `gaussian_blur(image, pilot_sigma)`.
pub fn pilot_field<T: Scalar>(
    image: &Image<T>,
    params: AmoebaParams<T>,
    pilot_sigma: f64,
) -> Result<AmoebaField<T>> {
    let pilot = gaussian_blur(image, pilot_sigma)?;
    Ok(compute_amoeba_field(&pilot, params, true))
}

/// Amoeba opening; both stages share the field grown on the blurred input.
pub fn amoeba_open<T: Scalar>(
    image: &Image<T>,
    params: AmoebaParams<T>,
    rank: RankParams,
    pilot_sigma: f64,
) -> Result<Image<T>> {
    let field = pilot_field(image, params, pilot_sigma)?;
    amoeba_open_with_field(image, &field, rank)
}

/// Amoeba closing; both stages share the field grown on the blurred input.
pub fn amoeba_close<T: Scalar>(
    image: &Image<T>,
    params: AmoebaParams<T>,
    rank: RankParams,
    pilot_sigma: f64,
) -> Result<Image<T>> {
    let field = pilot_field(image, params, pilot_sigma)?;
    amoeba_close_with_field(image, &field, rank)
}

fn sub<T: Scalar>(a: &Image<T>, b: &Image<T>) -> Image<T> {
    a.zip_map(b, |x, y| x - y)
}

/// Amoeba morphological gradient; shapes from the blurred input.
pub fn detect_amoeba_mg<T: Scalar>(
    image: &Image<T>,
    config: &AmoebaDetectorConfig<T>,
) -> Result<EdgeMap<T>> {
    config.validate()?;
    let field = pilot_field(image, config.amoeba, config.pilot_sigma)?;
    let d = rank_filter(image, &field, config.rank, true);
    let e = rank_filter(image, &field, config.rank, false);
    Ok(EdgeMap::from_response(sub(&d, &e)))
}

/// Amoeba blur-minimization on the mean-filtered image.
pub fn detect_amoeba_bm<T: Scalar>(
    image: &Image<T>,
    config: &AmoebaDetectorConfig<T>,
) -> Result<EdgeMap<T>> {
    config.validate()?;
    let fav = mean_filter(image, config.window);
    let field = pilot_field(&fav, config.amoeba, config.pilot_sigma)?;
    let d = rank_filter(&fav, &field, config.rank, true);
    let e = rank_filter(&fav, &field, config.rank, false);
    let response = sub(&fav, &e).zip_map(&sub(&d, &fav), T::min);
    Ok(EdgeMap::from_response(response))
}

/// Amoeba alpha-trimmed morphological detector; one field shared by the
/// erosion, dilation, opening and closing.
pub fn detect_amoeba_atm<T: Scalar>(
    image: &Image<T>,
    config: &AmoebaDetectorConfig<T>,
) -> Result<EdgeMap<T>> {
    config.validate()?;
    let fa = alpha_trimmed_mean_filter(image, config.window, config.trim);
    let field = pilot_field(&fa, config.amoeba, config.pilot_sigma)?;
    let rank = config.rank;
    let eroded = rank_filter(&fa, &field, rank, false);
    let dilated = rank_filter(&fa, &field, rank, true);
    let opened = rank_filter(&eroded, &field, rank, true);
    let closed = rank_filter(&dilated, &field, rank, false);
    let response = sub(&opened, &eroded).zip_map(&sub(&dilated, &closed), T::min);
    Ok(EdgeMap::from_response(response))
}

struct StagedOps<'c, T> {
    config: &'c AmoebaDetectorConfig<T>,
}

impl<T: Scalar> StagedOps<'_, T> {
    fn field(&self, image: &Image<T>) -> Result<AmoebaField<T>> {
        pilot_field(image, self.config.amoeba, self.config.pilot_sigma)
    }

    fn elementary(&self, image: &Image<T>, rank: RankParams, largest: bool) -> Result<Image<T>> {
        let field = self.field(image)?;
        Ok(rank_filter(image, &field, rank, largest))
    }

    fn close(&self, image: &Image<T>, rank: RankParams) -> Result<Image<T>> {
        match self.config.granularity {
            PilotGranularity::Composite => {
                amoeba_close_with_field(image, &self.field(image)?, rank)
            }
            PilotGranularity::Elementary => {
                let d = self.elementary(image, rank, true)?;
                self.elementary(&d, rank, false)
            }
        }
    }

    fn open(&self, image: &Image<T>, rank: RankParams) -> Result<Image<T>> {
        match self.config.granularity {
            PilotGranularity::Composite => {
                amoeba_open_with_field(image, &self.field(image)?, rank)
            }
            PilotGranularity::Elementary => {
                let e = self.elementary(image, rank, false)?;
                self.elementary(&e, rank, true)
            }
        }
    }
}

/// Amoeba reduced-noise morphological detector. Every amoeba operation
/// regrows its shapes on the blur of its own operand.
pub fn detect_amoeba_rnm<T: Scalar>(
    image: &Image<T>,
    config: &AmoebaDetectorConfig<T>,
) -> Result<EdgeMap<T>> {
    config.validate()?;
    let ops = StagedOps { config };
    let m = ops.open(&ops.close(image, config.rank1)?, config.rank1)?;
    let mc = ops.close(&m, config.rank2)?;
    let dilated = ops.elementary(&mc, config.rank2, true)?;
    Ok(EdgeMap::from_response(sub(&dilated, &mc)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::img::make_square_se;
    use crate::morph;

    fn lcg_image(w: usize, h: usize, seed: u64) -> Image<f64> {
        let mut s = seed.wrapping_add(11);
        Image::from_fn(w, h, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 33) % 256) as f64
        })
    }

    #[test]
    fn rank_formula() {
        let r = RankParams::new(0.1).unwrap();
        assert_eq!(r.rank(25), 3);
        assert_eq!(r.rank(10), 1);
        assert_eq!(r.rank(1), 1);
        assert_eq!(RankParams::new(1.0).unwrap().rank(9), 9);
        assert!(RankParams::new(0.0).is_err());
        assert!(RankParams::new(1.01).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let field = compute_amoeba_field(
            &Image::<f64>::filled(4, 4, 0.0),
            AmoebaParams::new(0.5, 1.0).unwrap(),
            true,
        );
        let other = Image::<f64>::filled(5, 4, 0.0);
        assert!(matches!(
            amoeba_dilate(&other, &field, RankParams::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn third_largest_on_square() {
        // lambda = 0: interior amoebas are 5x5 squares (25 members), k = 3
        let img = lcg_image(9, 9, 3);
        let field = compute_amoeba_field(&img, AmoebaParams::new(0.0, 2.0).unwrap(), true);
        let out = amoeba_dilate(&img, &field, RankParams::default()).unwrap();
        let mut vals: Vec<f64> = (2..=6)
            .flat_map(|y| (2..=6).map(move |x| (x, y)))
            .map(|(x, y)| img.get(x, y))
            .collect();
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert_eq!(out.get(4, 4), vals[2]);
    }

    #[test]
    fn small_beta_collapses_to_classic() {
        let img = lcg_image(12, 10, 1);
        let tiny = RankParams::new(1e-3).unwrap();
        for r in 1..=3usize {
            let params = AmoebaParams::new(0.0, r as f64).unwrap();
            let se = make_square_se(r);
            let field = compute_amoeba_field(&img, params, true);
            assert_eq!(amoeba_dilate(&img, &field, tiny).unwrap(), morph::dilate(&img, &se));
            assert_eq!(amoeba_erode(&img, &field, tiny).unwrap(), morph::erode(&img, &se));
            assert_eq!(amoeba_open(&img, params, tiny, 1.0).unwrap(), morph::open(&img, &se));
            assert_eq!(amoeba_close(&img, params, tiny, 1.0).unwrap(), morph::close(&img, &se));
        }
    }

    #[test]
    fn constants_stay_constant() {
        let img = Image::<f64>::filled(10, 10, 90.0);
        let params = AmoebaParams::new(0.5, 3.0).unwrap();
        let rank = RankParams::default();
        assert_eq!(amoeba_open(&img, params, rank, 1.0).unwrap(), img);
        assert_eq!(amoeba_close(&img, params, rank, 1.0).unwrap(), img);
        let cfg = AmoebaDetectorConfig::new(params);
        for det in [detect_amoeba_mg, detect_amoeba_bm, detect_amoeba_atm, detect_amoeba_rnm] {
            assert!(det(&img, &cfg).unwrap().data().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn bad_pilot_sigma() {
        let img = Image::<f64>::filled(4, 4, 1.0);
        let mut cfg = AmoebaDetectorConfig::<f64>::default();
        cfg.pilot_sigma = 0.0;
        assert!(detect_amoeba_mg(&img, &cfg).is_err());
    }

    #[test]
    fn elementary_granularity_runs() {
        let img = lcg_image(12, 12, 8);
        let mut cfg = AmoebaDetectorConfig::new(AmoebaParams::new(0.0, 2.0).unwrap())
            .with_uniform_rank(RankParams::new(1e-3).unwrap());
        cfg.granularity = PilotGranularity::Elementary;
        // lambda = 0 makes every field a square, so granularity cannot matter
        let a = detect_amoeba_rnm(&img, &cfg).unwrap();
        cfg.granularity = PilotGranularity::Composite;
        assert_eq!(a, detect_amoeba_rnm(&img, &cfg).unwrap());
    }
}
