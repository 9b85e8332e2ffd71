//! Uniform entry point over the nine edge detectors.

use std::fmt;
use std::str::FromStr;

use crate::amoeba::{AmoebaParams, RadiusNorm, DEFAULT_LAMBDA, DEFAULT_RADIUS};
use crate::amoeba_morph::{
    detect_amoeba_atm, detect_amoeba_bm, detect_amoeba_mg, detect_amoeba_rnm, AmoebaDetectorConfig,
    PilotGranularity, RankParams, DEFAULT_BETA, DEFAULT_BETA1, DEFAULT_BETA2,
};
use crate::canny::{detect_canny, CannyConfig, HighThreshold, DEFAULT_HIGH_PERCENTILE, DEFAULT_LOW_RATIO};
use crate::edge_map::EdgeMap;
use crate::error::{Error, Result};
use crate::filters::{TrimSpec, WindowSpec, DEFAULT_PILOT_SIGMA, DEFAULT_TRIM_ALPHA, DEFAULT_WINDOW_HALF_WIDTH};
use crate::img::{make_square_se, Image};
use crate::morph::{detect_atm, detect_bm, detect_mg, detect_rnm};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DetectorKind {
    Mg,
    Bm,
    Atm,
    Rnm,
    Amg,
    Abm,
    Aatm,
    Arnm,
    Canny,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 9] = [
        DetectorKind::Mg,
        DetectorKind::Bm,
        DetectorKind::Atm,
        DetectorKind::Rnm,
        DetectorKind::Amg,
        DetectorKind::Abm,
        DetectorKind::Aatm,
        DetectorKind::Arnm,
        DetectorKind::Canny,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DetectorKind::Mg => "mg",
            DetectorKind::Bm => "bm",
            DetectorKind::Atm => "atm",
            DetectorKind::Rnm => "rnm",
            DetectorKind::Amg => "amg",
            DetectorKind::Abm => "abm",
            DetectorKind::Aatm => "aatm",
            DetectorKind::Arnm => "arnm",
            DetectorKind::Canny => "canny",
        }
    }

    pub fn is_amoeba(self) -> bool {
        matches!(
            self,
            DetectorKind::Amg | DetectorKind::Abm | DetectorKind::Aatm | DetectorKind::Arnm
        )
    }

    /// Classic detector an amoeba detector generalizes.
    pub fn classic_counterpart(self) -> Option<DetectorKind> {
        match self {
            DetectorKind::Amg => Some(DetectorKind::Mg),
            DetectorKind::Abm => Some(DetectorKind::Bm),
            DetectorKind::Aatm => Some(DetectorKind::Atm),
            DetectorKind::Arnm => Some(DetectorKind::Rnm),
            _ => None,
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        DetectorKind::ALL
            .into_iter()
            .find(|d| d.as_str() == lower)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown detector {s:?}")))
    }
}

/// Every tunable of every detector; each detector reads the fields it
/// needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorParams {
    pub r: f64,
    pub lambda: f64,
    pub beta: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub se_radius: usize,
    pub window_n: usize,
    pub trim_alpha: f64,
    pub pilot_sigma: f64,
    pub norm: RadiusNorm,
    pub granularity: PilotGranularity,
    pub canny_sigma: f64,
    pub canny_low_ratio: f64,
    pub canny_high: HighThreshold,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self {
            r: DEFAULT_RADIUS,
            lambda: DEFAULT_LAMBDA,
            beta: DEFAULT_BETA,
            beta1: DEFAULT_BETA1,
            beta2: DEFAULT_BETA2,
            se_radius: 1,
            window_n: DEFAULT_WINDOW_HALF_WIDTH,
            trim_alpha: DEFAULT_TRIM_ALPHA,
            pilot_sigma: DEFAULT_PILOT_SIGMA,
            norm: RadiusNorm::Chebyshev,
            granularity: PilotGranularity::Composite,
            canny_sigma: crate::canny::DEFAULT_BLUR_SIGMA,
            canny_low_ratio: DEFAULT_LOW_RATIO,
            canny_high: HighThreshold::Percentile(DEFAULT_HIGH_PERCENTILE),
        }
    }
}

impl DetectorParams {
    pub fn amoeba_config<T: Scalar>(&self) -> Result<AmoebaDetectorConfig<T>> {
        let amoeba = AmoebaParams::new(T::lit(self.lambda), T::lit(self.r))?.with_norm(self.norm);
        let mut cfg = AmoebaDetectorConfig::new(amoeba);
        cfg.rank = RankParams::new(self.beta)?;
        cfg.rank1 = RankParams::new(self.beta1)?;
        cfg.rank2 = RankParams::new(self.beta2)?;
        cfg.window = WindowSpec::new(self.window_n);
        cfg.trim = TrimSpec::new(self.trim_alpha)?;
        cfg.pilot_sigma = self.pilot_sigma;
        cfg.granularity = self.granularity;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn canny_config(&self) -> CannyConfig {
        CannyConfig {
            blur_sigma: self.canny_sigma,
            low_ratio: self.canny_low_ratio,
            high: self.canny_high,
        }
    }

    pub fn validate_for(&self, kind: DetectorKind) -> Result<()> {
        match kind {
            DetectorKind::Canny => self.canny_config().validate(),
            k if k.is_amoeba() => self.amoeba_config::<f64>().map(|_| ()),
            _ => TrimSpec::new(self.trim_alpha).map(|_| ()),
        }
    }
}

/// Runs `kind` on `image`. For Canny the result is the hysteresis
/// strength map, so thresholding it at `t` equals Canny with `high = t`.
pub fn run_detector<T: Scalar>(
    kind: DetectorKind,
    image: &Image<T>,
    params: &DetectorParams,
) -> Result<EdgeMap<T>> {
    let se = make_square_se(params.se_radius);
    let window = WindowSpec::new(params.window_n);
    match kind {
        DetectorKind::Mg => Ok(detect_mg(image, &se)),
        DetectorKind::Bm => Ok(detect_bm(image, &se, window)),
        DetectorKind::Atm => Ok(detect_atm(image, &se, window, TrimSpec::new(params.trim_alpha)?)),
        DetectorKind::Rnm => Ok(detect_rnm(image, &se)),
        DetectorKind::Amg => detect_amoeba_mg(image, &params.amoeba_config()?),
        DetectorKind::Abm => detect_amoeba_bm(image, &params.amoeba_config()?),
        DetectorKind::Aatm => detect_amoeba_atm(image, &params.amoeba_config()?),
        DetectorKind::Arnm => detect_amoeba_rnm(image, &params.amoeba_config()?),
        DetectorKind::Canny => Ok(detect_canny(image, &params.canny_config())?.strength),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for d in DetectorKind::ALL {
            assert_eq!(d.as_str().parse::<DetectorKind>().unwrap(), d);
        }
        assert!("sobel".parse::<DetectorKind>().is_err());
        assert_eq!(DetectorKind::Aatm.classic_counterpart(), Some(DetectorKind::Atm));
        assert_eq!(DetectorKind::Canny.classic_counterpart(), None);
    }

    #[test]
    fn defaults() {
        let p = DetectorParams::default();
        assert_eq!((p.r, p.lambda, p.beta, p.beta1, p.beta2), (7.0, 0.5, 0.1, 0.3, 0.1));
        assert!(p.validate_for(DetectorKind::Arnm).is_ok());
        let bad = DetectorParams { beta: 0.0, ..p };
        assert!(bad.validate_for(DetectorKind::Amg).is_err());
        assert!(bad.validate_for(DetectorKind::Mg).is_ok());
    }

    #[test]
    fn all_detectors_zero_on_constant() {
        let img = Image::<f32>::filled(12, 12, 33.0);
        let p = DetectorParams {
            r: 3.0,
            ..DetectorParams::default()
        };
        for d in DetectorKind::ALL {
            let e = run_detector(d, &img, &p).unwrap();
            assert!(e.data().iter().all(|&v| v == 0.0), "{d}");
        }
    }
}
