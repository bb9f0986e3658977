//! TOML run configuration.
//!
//! ```toml
//! schema_version = 1
//! periods = [200.0, 600.0, 2000.0]   # verify only
//! samples = 16                        # sample count for per-sample modes
//!
//! [loop]
//! kind = "canonical"
//! period = 1.0
//! rp = 1.0
//! sp = { mean = 1.0, cos = [0.2] }
//! tp = 1.0
//! theta = { winding = 1 }
//! ```
//!
//! Complex numbers are `[re, im]` pairs and angles are in radians. A point
//! is given under `[point]` with keys `r, s, t, xi, zeta, kappa`.

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use wzphase::degeneracy::Sign;
use wzphase::hamiltonian::{multipole_params, MultipoleTensor, Params};
use wzphase::holonomy::{AngleSeries, CanonicalLoop, Fourier, Loop, ParamsLoop, SampledLoop};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: u32,
    pub tolerance: Option<f64>,
    pub steps: Option<usize>,
    pub periods: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub point: Option<PointSpec>,
    #[serde(rename = "loop")]
    pub loop_spec: Option<LoopSpec>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    #[serde(default)]
    pub r: f64,
    #[serde(default)]
    pub s: f64,
    #[serde(default)]
    pub t: f64,
    #[serde(default)]
    pub xi: [f64; 2],
    #[serde(default)]
    pub zeta: [f64; 2],
    #[serde(default)]
    pub kappa: [f64; 2],
}

impl PointSpec {
    pub fn params(&self) -> Params {
        let z = |v: [f64; 2]| Complex64::new(v[0], v[1]);
        Params::new(
            self.r,
            self.s,
            self.t,
            z(self.xi),
            z(self.zeta),
            z(self.kappa),
        )
    }
}

/// A real coefficient: a constant or a truncated Fourier series in `t/T`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SeriesSpec {
    Constant(f64),
    Series {
        #[serde(default)]
        mean: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
}

impl SeriesSpec {
    pub fn fourier(&self) -> Fourier {
        match self {
            SeriesSpec::Constant(x) => Fourier::constant(*x),
            SeriesSpec::Series { mean, cos, sin } => Fourier {
                mean: *mean,
                cos: cos.clone(),
                sin: sin.clone(),
            },
        }
    }
}

impl Default for SeriesSpec {
    fn default() -> Self {
        SeriesSpec::Constant(0.0)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleSpec {
    #[serde(default)]
    pub winding: i64,
    #[serde(default)]
    pub mean: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl AngleSpec {
    fn series(&self) -> AngleSeries {
        AngleSeries {
            winding: self.winding,
            series: Fourier {
                mean: self.mean,
                cos: self.cos.clone(),
                sin: self.sin.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub order: usize,
    /// `3^order` components in row-major index order.
    pub components: Vec<SeriesSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum LoopSpec {
    Canonical {
        period: f64,
        #[serde(default)]
        rp: SeriesSpec,
        #[serde(default)]
        sp: SeriesSpec,
        #[serde(default)]
        tp: SeriesSpec,
        #[serde(default)]
        gamma: AngleSpec,
        #[serde(default)]
        theta: AngleSpec,
        /// `"+"` or `"-"`.
        #[serde(default)]
        sign: Option<String>,
        #[serde(default)]
        offset: SeriesSpec,
    },
    Multipole {
        period: f64,
        terms: Vec<TermSpec>,
    },
    Samples {
        period: f64,
        points: Vec<PointSpec>,
    },
}

pub fn parse_config(text: &str) -> Result<ConfigFile, CliError> {
    let cfg: ConfigFile = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(CliError::Validation(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            cfg.schema_version
        )));
    }
    match (&cfg.point, &cfg.loop_spec) {
        (Some(_), Some(_)) => Err(CliError::Validation(
            "give either [point] or [loop], not both".into(),
        )),
        (None, None) => Err(CliError::Validation(
            "config needs a [point] or [loop] section".into(),
        )),
        _ => Ok(cfg),
    }
}

pub fn read_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "{name} must be positive, got {x}"
        )))
    }
}

type ParamsFn = Box<dyn Fn(f64) -> Params + Send + Sync>;

/// Builds the multipole tensor of one term from per-coefficient slices so
/// that symmetry is checked for every Fourier mode, not just at samples.
fn multipole_loop(
    period: f64,
    terms: &[TermSpec],
    tol: f64,
) -> Result<ParamsLoop<ParamsFn>, CliError> {
    let mut series: Vec<(usize, Vec<Fourier>)> = Vec::new();
    for term in terms {
        let comps: Vec<Fourier> = term.components.iter().map(SeriesSpec::fourier).collect();
        let modes = comps
            .iter()
            .map(|f| f.cos.len().max(f.sin.len()))
            .max()
            .unwrap_or(0);
        let coeff = |pick: &dyn Fn(&Fourier) -> f64| comps.iter().map(pick).collect::<Vec<f64>>();
        let check = |c: Vec<f64>| -> Result<(), CliError> {
            let t = MultipoleTensor::new(term.order, c)?;
            if !t.is_symmetric(1e-12) {
                return Err(CliError::Validation(format!(
                    "order-{} tensor is not symmetric (deviation {:.3e})",
                    term.order,
                    t.asymmetry()
                )));
            }
            Ok(())
        };
        check(coeff(&|f| f.mean))?;
        for k in 0..modes {
            let at = |v: &Vec<f64>| v.get(k).copied().unwrap_or(0.0);
            check(coeff(&|f| at(&f.cos)))?;
            check(coeff(&|f| at(&f.sin)))?;
        }
        series.push((term.order, comps));
    }
    if series.is_empty() {
        return Err(CliError::Validation("multipole loop has no terms".into()));
    }
    let f: ParamsFn = Box::new(move |tau| {
        let tensors: Vec<MultipoleTensor> = series
            .iter()
            .map(|(order, comps)| {
                MultipoleTensor::new(*order, comps.iter().map(|c| c.value(tau)).collect())
                    .expect("validated symmetric tensor")
            })
            .collect();
        multipole_params(&tensors).expect("validated tensors")
    });
    Ok(ParamsLoop::new(period, f).with_tol(tol))
}

fn parse_sign(s: &Option<String>) -> Result<Sign, CliError> {
    match s.as_deref() {
        None | Some("+") | Some("plus") => Ok(Sign::Plus),
        Some("-") | Some("minus") => Ok(Sign::Minus),
        Some(other) => Err(CliError::Validation(format!(
            "sign must be \"+\" or \"-\", got {other:?}"
        ))),
    }
}

pub fn build_loop(spec: &LoopSpec, tol: f64) -> Result<Box<dyn Loop>, CliError> {
    match spec {
        LoopSpec::Canonical {
            period,
            rp,
            sp,
            tp,
            gamma,
            theta,
            sign,
            offset,
        } => {
            positive("period", *period)?;
            Ok(Box::new(CanonicalLoop {
                period: *period,
                rp: rp.fourier(),
                sp: sp.fourier(),
                tp: tp.fourier(),
                gamma: gamma.series(),
                theta: theta.series(),
                sign: parse_sign(sign)?,
                offset: offset.fourier(),
            }))
        }
        LoopSpec::Multipole { period, terms } => {
            positive("period", *period)?;
            Ok(Box::new(multipole_loop(*period, terms, tol)?))
        }
        LoopSpec::Samples { period, points } => {
            positive("period", *period)?;
            let ps: Vec<Params> = points.iter().map(PointSpec::params).collect();
            Ok(Box::new(SampledLoop::new(*period, &ps, tol)?))
        }
    }
}
