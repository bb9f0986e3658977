//! Connection one-forms `A^{ab} = i <a|d|b>` of the closed-form frames.
//!
//! Coefficients are expressed in the cotangent basis
//! `(d gamma, d theta, d(s'/r'))`. `A1` is the real one-form of the simple
//! level and `A2` the Hermitian 2x2 one-form of the degenerate level. All
//! coefficients depend on `r', s', t'` only through their ratios.

use crate::degeneracy::{synthesize, Canonical, CaseLabel};
use crate::error::{Error, Result};
use crate::holonomy::{Loop, LoopSample};
use crate::linalg::{hermitian_part2, real, CMat2, I};
use crate::spectral::{align_frames, gauge_fix, oracle_frame, Frame, ORACLE_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionCoeffs {
    pub a1_gamma: f64,
    pub a1_theta: f64,
    pub a1_ratio: f64,
    pub a2_gamma: CMat2,
    pub a2_theta: CMat2,
    pub a2_ratio: CMat2,
}

impl ConnectionCoeffs {
    fn zero() -> Self {
        ConnectionCoeffs {
            a1_gamma: 0.0,
            a1_theta: 0.0,
            a1_ratio: 0.0,
            a2_gamma: CMat2::zeros(),
            a2_theta: CMat2::zeros(),
            a2_ratio: CMat2::zeros(),
        }
    }

    /// Contracts the one-forms with a tangent vector.
    pub fn contract(&self, v: &TangentSample) -> (f64, CMat2) {
        let a1 = self.a1_gamma * v.dgamma + self.a1_theta * v.dtheta + self.a1_ratio * v.dratio;
        let a2 = self.a2_gamma * real(v.dgamma)
            + self.a2_theta * real(v.dtheta)
            + self.a2_ratio * real(v.dratio);
        (a1, a2)
    }
}

/// Velocity of a path in canonical coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TangentSample {
    pub dgamma: f64,
    pub dtheta: f64,
    /// `d(s'/r')`; zero when `r' = 0`.
    pub dratio: f64,
    pub drp: f64,
    pub dsp: f64,
    pub dtp: f64,
}

impl TangentSample {
    /// Tangent at `c` with the given angle and gap velocities; the ratio
    /// velocity is derived from them.
    pub fn new(c: &Canonical, dgamma: f64, dtheta: f64, dgaps: [f64; 3]) -> Self {
        let [drp, dsp, dtp] = dgaps;
        let dratio = if c.rp > 0.0 {
            (dsp * c.rp - c.sp * drp) / (c.rp * c.rp)
        } else {
            0.0
        };
        TangentSample {
            dgamma,
            dtheta,
            dratio,
            drp,
            dsp,
            dtp,
        }
    }

    pub fn is_finite(&self) -> bool {
        [
            self.dgamma,
            self.dtheta,
            self.dratio,
            self.drp,
            self.dsp,
            self.dtp,
        ]
        .iter()
        .all(|x| x.is_finite())
    }

    pub fn scaled(&self, k: f64) -> Self {
        TangentSample {
            dgamma: self.dgamma * k,
            dtheta: self.dtheta * k,
            dratio: self.dratio * k,
            drp: self.drp * k,
            dsp: self.dsp * k,
            dtp: self.dtp * k,
        }
    }
}

/// `A1 = k1 d phi`, `A2 = diag(0, k2) d phi` for the Case-2 frame with gaps
/// `(s, t)` and coupling phase `phi`.
fn case2_coeffs(s: f64, t: f64) -> (f64, f64) {
    (-t / (s + t), -s / (s + t))
}

fn diag2(a: f64, b: f64) -> CMat2 {
    CMat2::new(real(a), real(0.0), real(0.0), real(b))
}

/// Closed-form connection coefficients of `frame(c, label)`.
pub fn connection_forms(c: &Canonical, label: CaseLabel) -> Result<ConnectionCoeffs> {
    if !label.is_regular() {
        return Err(Error::UnsupportedCase(label));
    }
    if c.case_label() != label {
        return Err(Error::ZeroDenominator(label));
    }
    let (r, s, t) = (c.rp, c.sp, c.tp);
    let mut k = ConnectionCoeffs::zero();
    match label {
        CaseLabel::Case1 => {
            let sum = r + s + t;
            let rs = r + s;
            // 1 / sqrt((r+s)^2 (r+s+t) / (r s t))
            let mix = (r * s * t / (rs * rs * sum)).sqrt();
            k.a1_gamma = r / sum;
            k.a1_theta = -t / sum;
            k.a2_gamma = CMat2::new(
                real(s / rs),
                real(-mix),
                real(-mix),
                real(r * t / (rs * sum)),
            );
            k.a2_theta = diag2(0.0, -rs / sum);
            let q = mix * r / (2.0 * s);
            k.a2_ratio = CMat2::new(real(0.0), I * q, -I * q, real(0.0));
        }
        CaseLabel::Case2 => {
            let (k1, k2) = case2_coeffs(s, t);
            k.a1_theta = k1;
            k.a2_theta = diag2(0.0, k2);
        }
        CaseLabel::Case3 => {
            // coupling phase gamma + theta
            let (k1, k2) = case2_coeffs(r, t);
            k.a1_gamma = k1;
            k.a1_theta = k1;
            k.a2_gamma = diag2(0.0, k2);
            k.a2_theta = diag2(0.0, k2);
        }
        CaseLabel::Case4 => {
            // coupling phase -gamma
            let (k1, k2) = case2_coeffs(s, r);
            k.a1_gamma = -k1;
            k.a2_gamma = diag2(0.0, -k2);
        }
        _ => unreachable!(),
    }
    Ok(k)
}

/// Closed-form `(a1, a2)` of a loop sample: the one-forms contracted with
/// the sample's velocity.
pub fn pullback_sample(sample: &LoopSample) -> Result<(f64, CMat2)> {
    let k = connection_forms(&sample.canonical, sample.label)?;
    Ok(k.contract(&sample.tangent))
}

pub fn pullback<L: Loop + ?Sized>(lp: &L, t: f64) -> Result<(f64, CMat2)> {
    pullback_sample(&lp.sample(t)?)
}

fn displaced(c: &Canonical, v: &TangentSample, eps: f64, label: CaseLabel) -> Result<Canonical> {
    let moved = Canonical::new(
        c.rp + eps * v.drp,
        c.sp + eps * v.dsp,
        c.tp + eps * v.dtp,
        c.gamma + eps * v.dgamma,
        c.theta + eps * v.dtheta,
        c.sign,
    )
    .map_err(|_| Error::CaseTransition {
        t: eps,
        from: label,
        to: CaseLabel::NonDegenerate,
    })?
    .with_e2(c.e2);
    let to = moved.case_label();
    if to != label {
        return Err(Error::CaseTransition {
            t: eps,
            from: label,
            to,
        });
    }
    Ok(moved)
}

/// Default finite-difference step `1e-4 (1 + |point|)`, with `|point|` the
/// Euclidean norm of `(r', s', t')`.
pub fn default_fd_step(c: &Canonical) -> f64 {
    1e-4 * (1.0 + (c.rp * c.rp + c.sp * c.sp + c.tp * c.tp).sqrt())
}

/// Eigensolver frame of the synthesized Hamiltonian, put into the gauge of
/// the closed-form frames.
fn reference_frame(c: &Canonical, label: CaseLabel) -> Result<Frame> {
    let h = synthesize(c, c.e2).matrix();
    gauge_fix(&oracle_frame(&h, ORACLE_TOL)?.frame, label)
}

/// Definitional finite-difference estimate of `A . direction` at `c`.
///
/// Frames come from the Jacobi eigensolver at `c +- (h/2) direction`, gauge
/// fixed independently at each point; `i F^dagger dF` is formed by central
/// differences and the degenerate block is Hermitized.
pub fn fd_connection_oracle(
    c: &Canonical,
    label: CaseLabel,
    direction: &TangentSample,
    h: f64,
) -> Result<(f64, CMat2)> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {h}"
        )));
    }
    if !label.is_regular() {
        return Err(Error::UnsupportedCase(label));
    }
    let center = reference_frame(c, label)?;
    let plus = reference_frame(&displaced(c, direction, 0.5 * h, label)?, label)?;
    let minus = reference_frame(&displaced(c, direction, -0.5 * h, label)?, label)?;
    align_frames(&center, &plus)?;
    align_frames(&center, &minus)?;
    let df = (plus.matrix() - minus.matrix()) / real(h);
    let m = center.matrix().adjoint() * df * I;
    let a1 = m[(0, 0)].re;
    let block = CMat2::new(m[(1, 1)], m[(1, 2)], m[(2, 1)], m[(2, 2)]);
    Ok((a1, hermitian_part2(&block)))
}
