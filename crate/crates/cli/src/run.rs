//! Mode dispatch.

use clap::ValueEnum;
use num_complex::Complex64;
use wzphase::connection::{connection_forms, pullback};
use wzphase::degeneracy::{canonicalize, classify_detailed, degenerate_spectrum, CaseLabel};
use wzphase::hamiltonian::Params;
use wzphase::holonomy::{path_ordered_exp, verify_adiabatic, Loop};
use wzphase::linalg::CMat2;
use wzphase::spectral::{eig3_oracle, frame, Frame, ORACLE_TOL};

use crate::config::{build_loop, ConfigFile};
use crate::output::{Document, Field};
use crate::CliError;

pub const DEFAULT_STEPS: usize = 4096;
pub const DEFAULT_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Classify,
    Spectrum,
    Connection,
    Holonomy,
    Verify,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Classify => "classify",
            Mode::Spectrum => "spectrum",
            Mode::Connection => "connection",
            Mode::Holonomy => "holonomy",
            Mode::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Fully resolved run: command-line flags take precedence over the
/// config file.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub config: ConfigFile,
    pub tolerance: f64,
    pub steps: usize,
    pub samples: usize,
    pub periods: Vec<f64>,
}

impl RunConfig {
    pub fn new(
        mode: Mode,
        config: ConfigFile,
        tol: Option<f64>,
        steps: Option<usize>,
    ) -> Result<Self, CliError> {
        let tolerance = tol
            .or(config.tolerance)
            .unwrap_or(wzphase::degeneracy::DEFAULT_TOL);
        let steps = steps.or(config.steps).unwrap_or(DEFAULT_STEPS);
        let samples = config.samples.unwrap_or(DEFAULT_SAMPLES);
        let periods = config.periods.clone().unwrap_or_default();
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(CliError::Validation(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        if steps < 2 || samples < 1 {
            return Err(CliError::Validation(
                "steps must be at least 2 and samples at least 1".into(),
            ));
        }
        if matches!(mode, Mode::Holonomy | Mode::Verify) && config.loop_spec.is_none() {
            return Err(CliError::Validation(format!(
                "{} needs a [loop] section",
                mode.name()
            )));
        }
        if mode == Mode::Verify {
            if periods.is_empty() {
                return Err(CliError::Validation(
                    "verify needs a non-empty `periods` list".into(),
                ));
            }
            if let Some(t) = periods.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
                return Err(CliError::Validation(format!(
                    "periods must be positive, got {t}"
                )));
            }
        }
        Ok(RunConfig {
            mode,
            config,
            tolerance,
            steps,
            samples,
            periods,
        })
    }
}

const PROVENANCE: [&str; 3] = ["tolerance", "steps", "version"];

fn columns(head: &[&'static str]) -> Vec<&'static str> {
    head.iter().chain(PROVENANCE.iter()).copied().collect()
}

fn provenance(rc: &RunConfig, mut rec: Vec<Field>) -> Vec<Field> {
    rec.push(rc.tolerance.into());
    rec.push(rc.steps.into());
    rec.push(wzphase::VERSION.into());
    rec
}

/// The points a per-sample mode looks at: `(index, tau, params)`.
fn sample_points(rc: &RunConfig) -> Result<Vec<(usize, Option<f64>, Params)>, CliError> {
    if let Some(p) = &rc.config.point {
        return Ok(vec![(0, None, p.params())]);
    }
    let spec = rc.config.loop_spec.as_ref().expect("validated");
    if let crate::config::LoopSpec::Samples { points, .. } = spec {
        // raw samples are reported as given, even if they do not form a loop
        let n = points.len().saturating_sub(1).max(1) as f64;
        return Ok(points
            .iter()
            .enumerate()
            .map(|(k, p)| (k, Some(k as f64 / n), p.params()))
            .collect());
    }
    let lp = build_loop(spec, rc.tolerance)?;
    (0..rc.samples)
        .map(|k| {
            let tau = k as f64 / rc.samples as f64;
            Ok((k, Some(tau), lp.params_at(tau)?))
        })
        .collect()
}

fn classify_mode(rc: &RunConfig) -> Result<Document, CliError> {
    let mut doc = Document::new(
        "classify",
        &columns(&["index", "tau", "case", "residual", "e1", "e2"]),
    );
    for (k, tau, p) in sample_points(rc)? {
        let cls = classify_detailed(&p, rc.tolerance);
        let spec = degenerate_spectrum(&p, cls.label, rc.tolerance).ok();
        doc.push(provenance(
            rc,
            vec![
                k.into(),
                tau.into(),
                cls.label.name().into(),
                cls.residual.into(),
                spec.map(|s| s.e1).into(),
                spec.map(|s| s.e2).into(),
            ],
        ));
    }
    Ok(doc)
}

const FRAME_COLUMNS: [&str; 18] = [
    "v1_0_re", "v1_0_im", "v1_1_re", "v1_1_im", "v1_2_re", "v1_2_im", "w1_0_re", "w1_0_im",
    "w1_1_re", "w1_1_im", "w1_2_re", "w1_2_im", "w2_0_re", "w2_0_im", "w2_1_re", "w2_1_im",
    "w2_2_re", "w2_2_im",
];

fn frame_fields(f: Option<&Frame>) -> Vec<Field> {
    match f {
        None => vec![Field::Null; FRAME_COLUMNS.len()],
        Some(f) => [f.v1, f.w1, f.w2]
            .iter()
            .flat_map(|v| {
                v.iter()
                    .flat_map(|z| [Field::from(z.re), Field::from(z.im)])
                    .collect::<Vec<_>>()
            })
            .collect(),
    }
}

fn spectrum_mode(rc: &RunConfig) -> Result<Document, CliError> {
    let mut head = vec![
        "index", "tau", "case", "e1", "e2", "eig0", "eig1", "eig2", "frame",
    ];
    head.extend(FRAME_COLUMNS);
    let mut doc = Document::new("spectrum", &columns(&head));
    for (k, tau, p) in sample_points(rc)? {
        let label = classify_detailed(&p, rc.tolerance).label;
        let eig = eig3_oracle(&p.matrix(), ORACLE_TOL)?;
        let spec = degenerate_spectrum(&p, label, rc.tolerance).ok();
        let closed = if label.is_regular() {
            Some(frame(&canonicalize(&p, label, rc.tolerance)?, label)?)
        } else {
            None
        };
        let mut rec: Vec<Field> = vec![
            k.into(),
            tau.into(),
            label.name().into(),
            spec.map(|s| s.e1).into(),
            spec.map(|s| s.e2).into(),
        ];
        rec.extend(eig.values.iter().map(|x| Field::from(*x)));
        rec.push(
            if closed.is_some() {
                "closed_form"
            } else {
                "none"
            }
            .into(),
        );
        rec.extend(frame_fields(closed.as_ref()));
        doc.push(provenance(rc, rec));
    }
    Ok(doc)
}

fn a2_fields(a: &CMat2) -> [Field; 4] {
    [
        a[(0, 0)].re.into(),
        a[(0, 1)].re.into(),
        a[(0, 1)].im.into(),
        a[(1, 1)].re.into(),
    ]
}

fn connection_mode(rc: &RunConfig) -> Result<Document, CliError> {
    let head = [
        "index", "tau", "case", "basis", "a1", "a2_00", "a2_01_re", "a2_01_im", "a2_11",
    ];
    let mut doc = Document::new("connection", &columns(&head));
    if let Some(p) = &rc.config.point {
        let p = p.params();
        let label = classify_detailed(&p, rc.tolerance).label;
        let k = connection_forms(&canonicalize(&p, label, rc.tolerance)?, label)?;
        let rows = [
            ("gamma", k.a1_gamma, k.a2_gamma),
            ("theta", k.a1_theta, k.a2_theta),
            ("ratio", k.a1_ratio, k.a2_ratio),
        ];
        for (j, (basis, a1, a2)) in rows.into_iter().enumerate() {
            let mut rec = vec![
                j.into(),
                Field::Null,
                label.name().into(),
                basis.into(),
                a1.into(),
            ];
            rec.extend(a2_fields(&a2));
            doc.push(provenance(rc, rec));
        }
        return Ok(doc);
    }
    let lp = build_loop(
        rc.config.loop_spec.as_ref().expect("validated"),
        rc.tolerance,
    )?;
    for k in 0..rc.samples {
        let tau = k as f64 / rc.samples as f64;
        let label = lp.sample_at(tau)?.label;
        let (a1, a2) = pullback(lp.as_ref(), tau * lp.period())?;
        let mut rec = vec![
            k.into(),
            tau.into(),
            label.name().into(),
            "dt".into(),
            a1.into(),
        ];
        rec.extend(a2_fields(&a2));
        doc.push(provenance(rc, rec));
    }
    Ok(doc)
}

fn loop_of(rc: &RunConfig) -> Result<Box<dyn Loop>, CliError> {
    build_loop(
        rc.config.loop_spec.as_ref().expect("validated"),
        rc.tolerance,
    )
}

fn complex_fields(z: Complex64) -> [Field; 2] {
    [z.re.into(), z.im.into()]
}

fn holonomy_mode(rc: &RunConfig) -> Result<Document, CliError> {
    let head = [
        "case",
        "gamma1_re",
        "gamma1_im",
        "gamma2_00_re",
        "gamma2_00_im",
        "gamma2_01_re",
        "gamma2_01_im",
        "gamma2_10_re",
        "gamma2_10_im",
        "gamma2_11_re",
        "gamma2_11_im",
        "dyn1_re",
        "dyn1_im",
        "dyn2_re",
        "dyn2_im",
    ];
    let mut doc = Document::new("holonomy", &columns(&head));
    let lp = loop_of(rc)?;
    let label: CaseLabel = lp.sample_at(0.0)?.label;
    let h = path_ordered_exp(lp.as_ref(), rc.steps)?;
    let mut rec: Vec<Field> = vec![label.name().into()];
    rec.extend(complex_fields(h.gamma1));
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        rec.extend(complex_fields(h.gamma2[(i, j)]));
    }
    rec.extend(complex_fields(h.dyn1));
    rec.extend(complex_fields(h.dyn2));
    doc.push(provenance(rc, rec));
    Ok(doc)
}

fn verify_mode(rc: &RunConfig) -> Result<Document, CliError> {
    let head = [
        "index",
        "period",
        "case",
        "unitary_distance",
        "subspace_leakage",
    ];
    let mut doc = Document::new("verify", &columns(&head));
    let lp = loop_of(rc)?;
    let label = lp.sample_at(0.0)?.label;
    for (k, r) in verify_adiabatic(lp.as_ref(), &rc.periods, rc.steps)?
        .iter()
        .enumerate()
    {
        doc.push(provenance(
            rc,
            vec![
                k.into(),
                r.period.into(),
                label.name().into(),
                r.unitary_distance.into(),
                r.subspace_leakage.into(),
            ],
        ));
    }
    Ok(doc)
}

pub fn run(rc: &RunConfig) -> Result<Document, CliError> {
    match rc.mode {
        Mode::Classify => classify_mode(rc),
        Mode::Spectrum => spectrum_mode(rc),
        Mode::Connection => connection_mode(rc),
        Mode::Holonomy => holonomy_mode(rc),
        Mode::Verify => verify_mode(rc),
    }
}
