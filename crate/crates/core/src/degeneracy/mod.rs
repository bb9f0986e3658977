//! Degeneracy conditions, case classification and canonical coordinates.
//!
//! A Hermitian `H` has a doubly degenerate eigenvalue `E2` exactly when the
//! shifted matrix `H' = H - E2` has rank one, `H' = sign * u u^dagger` with
//!
//! ```text
//! u = ( sqrt(r') e^{-i gamma}, sqrt(s'), sqrt(t') e^{i theta} ).
//! ```
//!
//! The non-negative `(r', s', t')`, the angles and the overall sign are the
//! canonical coordinates. Which of `xi, zeta, kappa` vanish decides the
//! case: all nonzero is Case 1, `xi = zeta = 0` is Case 2 (`r' = 0`),
//! `xi = kappa = 0` is Case 3 (`s' = 0`) and `zeta = kappa = 0` is Case 4
//! (`t' = 0`). With exactly one of them zero the spectrum is never doubly
//! degenerate.

mod chart;

pub use chart::{chart_coords, Chart, ChartPoint};

use crate::error::{Error, Result};
use crate::hamiltonian::Params;
use crate::linalg::{angle_diff, cis, wrap_angle, C64};

/// Default relative tolerance of the degeneracy tests.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    /// `xi = zeta = kappa = 0`
    TrivialDiagonal,
    Case1,
    Case2,
    Case3,
    Case4,
    /// Exactly one off-diagonal entry vanishes.
    Case5,
    /// The zero pattern admits a degeneracy but the condition fails.
    NonDegenerate,
}

impl CaseLabel {
    pub fn name(&self) -> &'static str {
        match self {
            CaseLabel::TrivialDiagonal => "TrivialDiagonal",
            CaseLabel::Case1 => "Case1",
            CaseLabel::Case2 => "Case2",
            CaseLabel::Case3 => "Case3",
            CaseLabel::Case4 => "Case4",
            CaseLabel::Case5 => "Case5",
            CaseLabel::NonDegenerate => "NonDegenerate",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            CaseLabel::TrivialDiagonal,
            CaseLabel::Case1,
            CaseLabel::Case2,
            CaseLabel::Case3,
            CaseLabel::Case4,
            CaseLabel::Case5,
            CaseLabel::NonDegenerate,
        ]
        .into_iter()
        .find(|l| l.name() == name)
    }

    /// One of the four cases that carry a nontrivial frame.
    pub fn is_regular(&self) -> bool {
        matches!(
            self,
            CaseLabel::Case1 | CaseLabel::Case2 | CaseLabel::Case3 | CaseLabel::Case4
        )
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Sign of the simple shifted eigenvalue `E1' = E1 - E2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn factor(&self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Canonical coordinates of a doubly degenerate Hamiltonian.
///
/// The phase of `zeta` is not stored: it equals `gamma + theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Canonical {
    pub rp: f64,
    pub sp: f64,
    pub tp: f64,
    /// In `[0, 2pi)`.
    pub gamma: f64,
    /// In `[0, 2pi)`.
    pub theta: f64,
    pub sign: Sign,
    /// The degenerate eigenvalue of the unshifted Hamiltonian.
    pub e2: f64,
}

impl Canonical {
    pub fn new(rp: f64, sp: f64, tp: f64, gamma: f64, theta: f64, sign: Sign) -> Result<Self> {
        let all = [rp, sp, tp, gamma, theta];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(
                "non-finite canonical parameter".into(),
            ));
        }
        if rp < 0.0 || sp < 0.0 || tp < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "r', s', t' must be non-negative, got ({rp}, {sp}, {tp})"
            )));
        }
        if rp == 0.0 && sp == 0.0 && tp == 0.0 {
            return Err(Error::InvalidArgument(
                "r', s', t' all vanish (E1' = 0)".into(),
            ));
        }
        Ok(Canonical {
            rp,
            sp,
            tp,
            gamma: wrap_angle(gamma),
            theta: wrap_angle(theta),
            sign,
            e2: 0.0,
        })
    }

    pub fn with_e2(mut self, e2: f64) -> Self {
        self.e2 = e2;
        self
    }

    /// `E1' = sign * (r' + s' + t')`
    pub fn e1p(&self) -> f64 {
        self.sign.factor() * (self.rp + self.sp + self.tp)
    }

    pub fn e1(&self) -> f64 {
        self.e2 + self.e1p()
    }

    /// Phase of `zeta`.
    pub fn eta(&self) -> f64 {
        wrap_angle(self.gamma + self.theta)
    }

    /// Case implied by which of `r', s', t'` vanish exactly.
    pub fn case_label(&self) -> CaseLabel {
        match (self.rp == 0.0, self.sp == 0.0, self.tp == 0.0) {
            (false, false, false) => CaseLabel::Case1,
            (true, false, false) => CaseLabel::Case2,
            (false, true, false) => CaseLabel::Case3,
            (false, false, true) => CaseLabel::Case4,
            _ => CaseLabel::TrivialDiagonal,
        }
    }

    /// Rescales `(r', s', t')` by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Canonical {
            rp: self.rp * lambda,
            sp: self.sp * lambda,
            tp: self.tp * lambda,
            ..*self
        }
    }

    /// The representative used by `canonicalize`: angles that the
    /// Hamiltonian does not depend on in Cases 2-4 are folded away.
    /// Case 2 keeps only `theta`, Case 4 only `gamma`, and Case 3 only
    /// `eta`, stored as `theta` with `gamma = 0`.
    pub fn normalized(&self) -> Self {
        let mut c = *self;
        match self.case_label() {
            CaseLabel::Case2 => c.gamma = 0.0,
            CaseLabel::Case3 => {
                c.theta = self.eta();
                c.gamma = 0.0;
            }
            CaseLabel::Case4 => c.theta = 0.0,
            _ => {}
        }
        c
    }
}

/// Outcome of `classify_detailed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub label: CaseLabel,
    /// Residual of the case's degeneracy condition relative to `scale`
    /// (`scale^2` for the quadratic conditions of Cases 2-4); zero when no
    /// condition applies.
    pub residual: f64,
    /// `max(max |entry|, 1)`
    pub scale: f64,
}

pub fn scale_of(p: &Params) -> f64 {
    p.max_entry().max(1.0)
}

/// Case-1 branch data derived from the cofactor conditions:
/// `s' = xi kappa / zeta` must be real, `r'` and `t'` share its sign.
struct Case1Branch {
    sign: Sign,
    rp: f64,
    sp: f64,
    tp: f64,
    /// `|Im(xi kappa / zeta)|`
    phase_defect: f64,
    /// Spread of the three estimates `r - r'`, `s - s'`, `t - t'` of `E2`.
    spread: f64,
    e2: f64,
}

fn case1_branch(p: &Params) -> Case1Branch {
    let ratio = p.xi * p.kappa / p.zeta;
    let sign = Sign::of(ratio.re);
    let f = sign.factor();
    let rp = (p.xi * p.zeta / p.kappa).norm();
    let sp = ratio.norm();
    let tp = (p.zeta * p.kappa / p.xi).norm();
    let e = [p.r - f * rp, p.s - f * sp, p.t - f * tp];
    let hi = e.iter().copied().fold(f64::MIN, f64::max);
    let lo = e.iter().copied().fold(f64::MAX, f64::min);
    Case1Branch {
        sign,
        rp,
        sp,
        tp,
        phase_defect: ratio.im.abs(),
        spread: hi - lo,
        e2: (e[0] + e[1] + e[2]) / 3.0,
    }
}

/// `(label, E2, s', t')` for Cases 2-4 in a common frame: `pivot` is the
/// diagonal entry that becomes `E2`, `a` and `b` the two others and `z` the
/// surviving off-diagonal entry.
fn single_coupling(p: &Params, label: CaseLabel) -> (f64, f64, f64, C64) {
    match label {
        CaseLabel::Case2 => (p.r, p.s, p.t, p.kappa),
        CaseLabel::Case3 => (p.s, p.r, p.t, p.zeta),
        CaseLabel::Case4 => (p.t, p.r, p.s, p.xi),
        _ => unreachable!(),
    }
}

pub fn classify(p: &Params, tol: f64) -> CaseLabel {
    classify_detailed(p, tol).label
}

pub fn classify_detailed(p: &Params, tol: f64) -> Classification {
    let scale = scale_of(p);
    let zero = |z: C64| z.norm() <= tol * scale;
    let pattern = (zero(p.xi), zero(p.zeta), zero(p.kappa));
    let done = |label, residual| Classification {
        label,
        residual,
        scale,
    };
    match pattern {
        (true, true, true) => done(CaseLabel::TrivialDiagonal, 0.0),
        (false, false, false) => {
            let b = case1_branch(p);
            let residual = b.phase_defect.max(b.spread) / scale;
            if residual <= tol {
                done(CaseLabel::Case1, residual)
            } else {
                done(CaseLabel::NonDegenerate, residual)
            }
        }
        (true, true, false) | (true, false, true) | (false, true, true) => {
            let label = match pattern {
                (true, true, false) => CaseLabel::Case2,
                (true, false, true) => CaseLabel::Case3,
                _ => CaseLabel::Case4,
            };
            let (pivot, a, b, z) = single_coupling(p, label);
            let residual = (z.norm_sqr() - (a - pivot) * (b - pivot)).abs() / (scale * scale);
            if residual <= tol {
                done(label, residual)
            } else {
                done(CaseLabel::NonDegenerate, residual)
            }
        }
        _ => done(CaseLabel::Case5, 0.0),
    }
}

/// Simple and degenerate eigenvalues of a doubly degenerate Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateSpectrum {
    pub e1: f64,
    pub e2: f64,
    pub sign: Sign,
}

pub fn degenerate_spectrum(p: &Params, label: CaseLabel, tol: f64) -> Result<DegenerateSpectrum> {
    let scale = scale_of(p);
    match label {
        CaseLabel::Case1 => {
            // The two printed sign branches r' = +-|xi zeta/kappa|, ... only
            // differ in which one reproduces s' = xi kappa/zeta; the branch
            // helper picks it from the sign of that ratio.
            let b = case1_branch(p);
            if b.phase_defect > tol * scale || b.spread > tol * scale {
                return Err(Error::NotDegenerate(format!(
                    "Case1 conditions fail: Im(xi kappa/zeta) = {:.3e}, E2 spread = {:.3e}",
                    b.phase_defect, b.spread
                )));
            }
            let e1p = b.sign.factor() * (b.rp + b.sp + b.tp);
            Ok(DegenerateSpectrum {
                e1: b.e2 + e1p,
                e2: b.e2,
                sign: b.sign,
            })
        }
        CaseLabel::Case2 | CaseLabel::Case3 | CaseLabel::Case4 => {
            let (pivot, a, b, z) = single_coupling(p, label);
            let defect = (z.norm_sqr() - (a - pivot) * (b - pivot)).abs();
            if defect > tol * scale * scale {
                return Err(Error::NotDegenerate(format!(
                    "{label}: |coupling|^2 - product of gaps = {defect:.3e}"
                )));
            }
            Ok(DegenerateSpectrum {
                e1: a + b - pivot,
                e2: pivot,
                sign: Sign::of(a - pivot),
            })
        }
        CaseLabel::TrivialDiagonal => {
            let d = [p.r, p.s, p.t];
            let close = |x: f64, y: f64| (x - y).abs() <= tol * scale;
            let (e1, e2) = if close(d[0], d[1]) && close(d[1], d[2]) {
                let m = (d[0] + d[1] + d[2]) / 3.0;
                (m, m)
            } else if close(d[0], d[1]) {
                (d[2], 0.5 * (d[0] + d[1]))
            } else if close(d[0], d[2]) {
                (d[1], 0.5 * (d[0] + d[2]))
            } else if close(d[1], d[2]) {
                (d[0], 0.5 * (d[1] + d[2]))
            } else {
                return Err(Error::NotDegenerate("diagonal entries are distinct".into()));
            };
            Ok(DegenerateSpectrum {
                e1,
                e2,
                sign: Sign::of(e1 - e2),
            })
        }
        other => Err(Error::UnsupportedCase(other)),
    }
}

pub fn canonicalize(p: &Params, label: CaseLabel, tol: f64) -> Result<Canonical> {
    let scale = scale_of(p);
    match label {
        CaseLabel::Case1 => {
            let spec = degenerate_spectrum(p, label, tol)?;
            let b = case1_branch(p);
            let f = b.sign.factor();
            let gamma = (p.xi * f).arg();
            let theta = (p.kappa * f).arg();
            let expected = cis(gamma + theta) * p.zeta.norm();
            let defect = (p.zeta * f - expected).norm();
            if defect > tol * scale {
                return Err(Error::PhaseInconsistent(angle_diff(
                    (p.zeta * f).arg(),
                    gamma + theta,
                )));
            }
            Ok(Canonical::new(b.rp, b.sp, b.tp, gamma, theta, b.sign)?.with_e2(spec.e2))
        }
        CaseLabel::Case2 | CaseLabel::Case3 | CaseLabel::Case4 => {
            let spec = degenerate_spectrum(p, label, tol)?;
            let (pivot, a, b, z) = single_coupling(p, label);
            let f = spec.sign.factor();
            let (ga, gb) = ((a - pivot).abs(), (b - pivot).abs());
            let phase = (z * f).arg();
            let c = match label {
                CaseLabel::Case2 => Canonical::new(0.0, ga, gb, 0.0, phase, spec.sign)?,
                CaseLabel::Case3 => Canonical::new(ga, 0.0, gb, 0.0, phase, spec.sign)?,
                _ => Canonical::new(ga, gb, 0.0, phase, 0.0, spec.sign)?,
            };
            Ok(c.with_e2(spec.e2))
        }
        other => Err(Error::UnsupportedCase(other)),
    }
}

/// Degenerate Hamiltonian with canonical coordinates `c` whose degenerate
/// eigenvalue is `offset`: `H = offset + sign * u u^dagger`.
pub fn synthesize(c: &Canonical, offset: f64) -> Params {
    let f = c.sign.factor();
    Params {
        r: f * c.rp + offset,
        s: f * c.sp + offset,
        t: f * c.tp + offset,
        xi: cis(c.gamma) * (f * (c.rp * c.sp).sqrt()),
        zeta: cis(c.gamma + c.theta) * (f * (c.rp * c.tp).sqrt()),
        kappa: cis(c.theta) * (f * (c.sp * c.tp).sqrt()),
    }
}

/// `P(E) = det(H - E) = c3 E^3 + c2 E^2 + c1 E + c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoeffs {
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl CubicCoeffs {
    pub fn eval(&self, e: f64) -> f64 {
        ((self.c3 * e + self.c2) * e + self.c1) * e + self.c0
    }
}

/// Characteristic polynomial coefficients from the raw entries.
pub fn characteristic_coeffs(p: &Params) -> CubicCoeffs {
    let (r, s, t) = (p.r, p.s, p.t);
    let (x2, z2, k2) = (p.xi.norm_sqr(), p.zeta.norm_sqr(), p.kappa.norm_sqr());
    let triple = p.kappa * p.xi * p.zeta.conj();
    CubicCoeffs {
        c3: -1.0,
        c2: r + s + t,
        c1: -r * s - s * t - t * r + x2 + z2 + k2,
        c0: r * s * t + 2.0 * triple.re - r * k2 - s * z2 - t * x2,
    }
}
