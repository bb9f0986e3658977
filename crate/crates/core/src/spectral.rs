//! Eigenframes of doubly degenerate Hamiltonians.
//!
//! `frame` evaluates the closed-form frames case by case. Everything else
//! in this module is independent machinery used to check them: a cyclic
//! Jacobi eigensolver for Hermitian 3x3 matrices, a gauge-fixing rule that
//! puts arbitrary eigenvectors into the closed-form gauge, and polar
//! alignment of neighbouring frames.

use nalgebra::{Matrix3x2, Vector3};

use crate::degeneracy::{Canonical, CaseLabel};
use crate::error::{Error, Result};
use crate::linalg::{cis, max_abs3, polar_unitary2, real, CMat2, CMat3, CVec3, C64};

/// Ordered orthonormal eigenbasis: the simple eigenvector `v1` and the
/// degenerate pair `w1, w2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub v1: CVec3,
    pub w1: CVec3,
    pub w2: CVec3,
}

impl Frame {
    /// Columns `(v1, w1, w2)`.
    pub fn matrix(&self) -> CMat3 {
        CMat3::from_columns(&[self.v1, self.w1, self.w2])
    }

    /// Columns `(w1, w2)`.
    pub fn block(&self) -> Matrix3x2<C64> {
        Matrix3x2::from_columns(&[self.w1, self.w2])
    }

    pub fn with_block(&self, block: &Matrix3x2<C64>) -> Frame {
        Frame {
            v1: self.v1,
            w1: block.column(0).into_owned(),
            w2: block.column(1).into_owned(),
        }
    }

    /// Largest entry of `F^dagger F - 1`.
    pub fn orthonormality_defect(&self) -> f64 {
        let f = self.matrix();
        (f.adjoint() * f - CMat3::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest of `|H' v1 - E1' v1|`, `|H' w1|`, `|H' w2|` for the shifted
    /// Hamiltonian `H'` (degenerate eigenvalue 0).
    pub fn residual(&self, shifted: &CMat3, e1p: f64) -> f64 {
        let r1 = (shifted * self.v1 - self.v1 * real(e1p)).norm();
        let r2 = (shifted * self.w1).norm();
        let r3 = (shifted * self.w2).norm();
        r1.max(r2).max(r3)
    }

    /// Projector onto the degenerate subspace.
    pub fn degenerate_projector(&self) -> CMat3 {
        let b = self.block();
        b * b.adjoint()
    }
}

/// Component permutations relating Cases 3 and 4 to Case 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTransform {
    /// Swaps components 1 and 2 (Case 3).
    T1,
    /// Swaps components 1 and 3 (Case 4).
    T2,
}

impl CaseTransform {
    pub fn matrix(&self) -> CMat3 {
        let (o, l) = (real(0.0), real(1.0));
        match self {
            CaseTransform::T1 => CMat3::new(o, l, o, l, o, o, o, o, l),
            CaseTransform::T2 => CMat3::new(o, o, l, o, l, o, l, o, o),
        }
    }

    pub fn apply(&self, v: &CVec3) -> CVec3 {
        let mut out = *v;
        match self {
            CaseTransform::T1 => out.swap_rows(0, 1),
            CaseTransform::T2 => out.swap_rows(0, 2),
        }
        out
    }

    fn apply_frame(&self, f: &Frame) -> Frame {
        Frame {
            v1: self.apply(&f.v1),
            w1: self.apply(&f.w1),
            w2: self.apply(&f.w2),
        }
    }
}

/// Case-2 frame for `r' = 0`, gaps `s, t > 0` and coupling phase `theta`.
fn case2_frame(s: f64, t: f64, theta: f64) -> Frame {
    let n3 = 1.0 / (s * (s + t)).sqrt();
    let e = cis(theta);
    let st = (s * t).sqrt();
    Frame {
        v1: Vector3::new(real(0.0), real(n3 * s), e * (n3 * st)),
        w1: Vector3::new(real(1.0), real(0.0), real(0.0)),
        w2: Vector3::new(real(0.0), real(n3 * st), e * (-n3 * s)),
    }
}

/// Closed-form eigenframe in the canonical gauge.
///
/// Cases 3 and 4 are the Case-2 frame permuted by `T1` / `T2` with the
/// gaps relabelled and the coupling phase set to `gamma + theta` (the
/// phase of `zeta`) and `-gamma` (minus the phase of `xi`) respectively.
pub fn frame(c: &Canonical, label: CaseLabel) -> Result<Frame> {
    if !label.is_regular() {
        return Err(Error::UnsupportedCase(label));
    }
    if c.case_label() != label {
        return Err(Error::ZeroDenominator(label));
    }
    let (r, s, t) = (c.rp, c.sp, c.tp);
    Ok(match label {
        CaseLabel::Case1 => {
            let n1 = 1.0 / (r + s + t).sqrt();
            let n2 = 1.0 / (r + s).sqrt();
            let (eg, et) = (cis(-c.gamma), cis(c.theta));
            Frame {
                v1: Vector3::new(
                    eg * (n1 * r.sqrt()),
                    real(n1 * s.sqrt()),
                    et * (n1 * t.sqrt()),
                ),
                w1: Vector3::new(eg * (-n2 * s.sqrt()), real(n2 * r.sqrt()), real(0.0)),
                w2: Vector3::new(
                    eg * (n1 * n2 * (r * t).sqrt()),
                    real(n1 * n2 * (s * t).sqrt()),
                    et * (-n1 * n2 * (r + s)),
                ),
            }
        }
        CaseLabel::Case2 => case2_frame(s, t, c.theta),
        CaseLabel::Case3 => CaseTransform::T1.apply_frame(&case2_frame(r, t, c.gamma + c.theta)),
        CaseLabel::Case4 => CaseTransform::T2.apply_frame(&case2_frame(s, r, -c.gamma)),
        _ => unreachable!(),
    })
}

/// Ascending eigenvalues with orthonormal eigenvectors as columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen3 {
    pub values: [f64; 3],
    pub vectors: CMat3,
}

impl Eigen3 {
    pub fn vector(&self, k: usize) -> CVec3 {
        self.vectors.column(k).into_owned()
    }
}

/// Default relative tolerance of `eig3_oracle`.
pub const ORACLE_TOL: f64 = 1e-13;

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi diagonalisation of a Hermitian 3x3 matrix.
///
/// Each rotation first removes the phase of the pivot `a_pq` and then
/// applies the real symmetric Jacobi rotation. Sweeps stop once the
/// off-diagonal Frobenius norm is at most `tol * max|entry|`.
pub fn eig3_oracle(h: &CMat3, tol: f64) -> Result<Eigen3> {
    let mut a = *h;
    let mut v = CMat3::identity();
    let scale = max_abs3(h);
    let off = |a: &CMat3| {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if !(off(&a) > tol * scale) {
            converged = true;
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[(p, q)];
            let g = apq.norm();
            if g == 0.0 {
                continue;
            }
            let phase = apq / g;
            let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
            let tn = if tau >= 0.0 {
                1.0 / (tau + (1.0 + tau * tau).sqrt())
            } else {
                -1.0 / (-tau + (1.0 + tau * tau).sqrt())
            };
            let cs = 1.0 / (1.0 + tn * tn).sqrt();
            let sn = tn * cs;
            let mut j = CMat3::identity();
            j[(p, p)] = real(cs);
            j[(p, q)] = real(sn);
            j[(q, p)] = phase.conj() * (-sn);
            j[(q, q)] = phase.conj() * cs;
            a = j.adjoint() * a * j;
            v *= j;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            off_diagonal: off(&a),
        });
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let values = order.map(|k| a[(k, k)].re);
    let vectors = CMat3::from_columns(&order.map(|k| v.column(k).into_owned()));
    Ok(Eigen3 { values, vectors })
}

/// Eigensolver frame of a Hamiltonian with a (near) doubly degenerate
/// level: the degenerate pair is the closer pair of sorted eigenvalues.
/// The degenerate block comes in whatever gauge the solver produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleFrame {
    pub frame: Frame,
    pub e1: f64,
    pub e2: f64,
}

pub fn oracle_frame(h: &CMat3, tol: f64) -> Result<OracleFrame> {
    let eig = eig3_oracle(h, tol)?;
    let [l0, l1, l2] = eig.values;
    let (simple, pair) = if l1 - l0 <= l2 - l1 {
        (2, (0, 1))
    } else {
        (0, (1, 2))
    };
    Ok(OracleFrame {
        frame: Frame {
            v1: eig.vector(simple),
            w1: eig.vector(pair.0),
            w2: eig.vector(pair.1),
        },
        e1: eig.values[simple],
        e2: 0.5 * (eig.values[pair.0] + eig.values[pair.1]),
    })
}

/// Gauge conventions of the closed-form frames, stated without reference
/// to their formulas: which component of `v1` is real positive, which
/// component of `w1` vanishes, and which components of `w1`, `w2` are real
/// positive (zero-based).
struct GaugeRule {
    v1_positive: usize,
    w1_zero: usize,
    w1_positive: usize,
    w2_positive: usize,
}

fn gauge_rule(label: CaseLabel) -> Result<GaugeRule> {
    let rule = |a, b, c, d| GaugeRule {
        v1_positive: a,
        w1_zero: b,
        w1_positive: c,
        w2_positive: d,
    };
    match label {
        CaseLabel::Case1 => Ok(rule(1, 2, 1, 1)),
        CaseLabel::Case2 => Ok(rule(1, 2, 0, 1)),
        CaseLabel::Case3 => Ok(rule(0, 2, 1, 0)),
        CaseLabel::Case4 => Ok(rule(1, 0, 2, 1)),
        other => Err(Error::UnsupportedCase(other)),
    }
}

fn make_positive(v: &CVec3, k: usize) -> Result<CVec3> {
    let z = v[k];
    if z.norm() < 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "gauge component {k} vanishes ({:.3e})",
            z.norm()
        )));
    }
    Ok(v * (z.conj() / z.norm()))
}

/// Re-expresses an arbitrary eigenframe in the gauge of `frame(.., label)`.
/// Only the spans of `v1` and of `(w1, w2)` are used.
pub fn gauge_fix(f: &Frame, label: CaseLabel) -> Result<Frame> {
    let rule = gauge_rule(label)?;
    let v1 = make_positive(&f.v1, rule.v1_positive)?;
    let m = rule.w1_zero;
    let w1 = f.w1 * f.w2[m] - f.w2 * f.w1[m];
    let n = w1.norm();
    if n < 1e-8 {
        return Err(Error::InvalidArgument(
            "degenerate block has no vector with the required zero".into(),
        ));
    }
    let w1 = make_positive(&(w1 / real(n)), rule.w1_positive)?;
    let rest = |g: &CVec3| g - w1 * w1.dotc(g);
    let (a, b) = (rest(&f.w1), rest(&f.w2));
    let w2 = if a.norm() >= b.norm() { a } else { b };
    let w2 = make_positive(&w2.normalize(), rule.w2_positive)?;
    Ok(Frame { v1, w1, w2 })
}

/// Rotates `next` so that it is as close as possible to `prev` without
/// changing its spans: `v1` is rephased to make `<prev.v1|next.v1>` real
/// positive and the degenerate block is multiplied by the inverse unitary
/// polar factor of the overlap `prev.W^dagger next.W`.
pub fn align_frames(prev: &Frame, next: &Frame) -> Result<Frame> {
    let z = prev.v1.dotc(&next.v1);
    let overlap: CMat2 = prev.block().adjoint() * next.block();
    let det = overlap.determinant().norm();
    if z.norm() < 0.5 || det < 0.5 {
        return Err(Error::AlignmentFailed(det.min(z.norm())));
    }
    let u = polar_unitary2(&overlap);
    let block = next.block() * u.adjoint();
    let mut out = next.with_block(&block);
    out.v1 = next.v1 * (z.conj() / z.norm());
    Ok(out)
}
