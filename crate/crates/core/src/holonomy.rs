//! Closed loops, path-ordered exponentials and the Schrödinger oracle.
//!
//! Loops are parameterized by the normalized time `tau = t / T` in `[0, 1]`;
//! the period only enters through dynamical phases and the Schrödinger
//! propagator. Products are time ordered with later factors on the left.

use rayon::prelude::*;

use crate::connection::{connection_forms, TangentSample};
use crate::degeneracy::{
    canonicalize, classify, synthesize, Canonical, CaseLabel, Sign, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::hamiltonian::Params;
use crate::linalg::{angle_diff, cis, expi_hermitian2, spectral_norm2, CMat2, CMat3, C64};
use crate::spectral::{
    align_frames, eig3_oracle, frame, gauge_fix, oracle_frame, Frame, ORACLE_TOL,
};

/// Relative tolerance for `params(0) == params(T)`.
pub const CLOSED_TOL: f64 = 1e-12;

/// Products are split into this many contiguous chunks regardless of the
/// thread count, so results do not depend on the machine.
const CHUNKS: usize = 64;

/// Point of a loop together with its velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopSample {
    pub canonical: Canonical,
    pub label: CaseLabel,
    pub tangent: TangentSample,
}

pub trait Loop: Sync {
    fn period(&self) -> f64;

    /// Sample at normalized time; the tangent is `d/dtau`.
    fn sample_at(&self, tau: f64) -> Result<LoopSample>;

    /// Raw Hamiltonian at normalized time.
    fn params_at(&self, tau: f64) -> Result<Params>;

    /// Sample at physical time; the tangent is `d/dt`.
    fn sample(&self, t: f64) -> Result<LoopSample> {
        let big_t = self.period();
        let mut s = self.sample_at(t / big_t)?;
        s.tangent = s.tangent.scaled(1.0 / big_t);
        Ok(s)
    }

    fn params(&self, t: f64) -> Result<Params> {
        self.params_at(t / self.period())
    }
}

/// Fails with `OpenLoop` unless the endpoints agree to `CLOSED_TOL`.
pub fn check_closed<L: Loop + ?Sized>(lp: &L) -> Result<()> {
    let (a, b) = (lp.params_at(0.0)?, lp.params_at(1.0)?);
    let scale = a.max_entry().max(b.max_entry()).max(1.0);
    let gap = a.distance(&b) / scale;
    if gap > CLOSED_TOL {
        return Err(Error::OpenLoop(gap));
    }
    Ok(())
}

fn check_period(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "period must be positive, got {t}"
        )));
    }
    Ok(())
}

/// Truncated real Fourier series in `tau`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Fourier {
    pub mean: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl Fourier {
    pub fn constant(x: f64) -> Self {
        Fourier {
            mean: x,
            ..Default::default()
        }
    }

    pub fn value(&self, tau: f64) -> f64 {
        let w = std::f64::consts::TAU * tau;
        let mut v = self.mean;
        for (k, a) in self.cos.iter().enumerate() {
            v += a * ((k + 1) as f64 * w).cos();
        }
        for (k, b) in self.sin.iter().enumerate() {
            v += b * ((k + 1) as f64 * w).sin();
        }
        v
    }

    pub fn derivative(&self, tau: f64) -> f64 {
        let w = std::f64::consts::TAU * tau;
        let mut v = 0.0;
        for (k, a) in self.cos.iter().enumerate() {
            let n = (k + 1) as f64;
            v -= a * n * std::f64::consts::TAU * (n * w).sin();
        }
        for (k, b) in self.sin.iter().enumerate() {
            let n = (k + 1) as f64;
            v += b * n * std::f64::consts::TAU * (n * w).cos();
        }
        v
    }

    pub fn is_finite(&self) -> bool {
        self.mean.is_finite() && self.cos.iter().chain(&self.sin).all(|x| x.is_finite())
    }
}

/// Angle `2 pi winding tau + series(tau)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AngleSeries {
    pub winding: i64,
    pub series: Fourier,
}

impl AngleSeries {
    pub fn winding(n: i64) -> Self {
        AngleSeries {
            winding: n,
            series: Fourier::default(),
        }
    }

    pub fn value(&self, tau: f64) -> f64 {
        std::f64::consts::TAU * self.winding as f64 * tau + self.series.value(tau)
    }

    pub fn derivative(&self, tau: f64) -> f64 {
        std::f64::consts::TAU * self.winding as f64 + self.series.derivative(tau)
    }
}

/// Loop given directly in canonical coordinates. Closed by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalLoop {
    pub period: f64,
    pub rp: Fourier,
    pub sp: Fourier,
    pub tp: Fourier,
    pub gamma: AngleSeries,
    pub theta: AngleSeries,
    pub sign: Sign,
    /// Degenerate eigenvalue `E2(tau)`.
    pub offset: Fourier,
}

impl CanonicalLoop {
    /// Constant gaps, `theta` winding once, everything else fixed.
    pub fn theta_loop(period: f64, rp: f64, sp: f64, tp: f64) -> Self {
        CanonicalLoop {
            period,
            rp: Fourier::constant(rp),
            sp: Fourier::constant(sp),
            tp: Fourier::constant(tp),
            gamma: AngleSeries::default(),
            theta: AngleSeries::winding(1),
            sign: Sign::Plus,
            offset: Fourier::default(),
        }
    }

    fn canonical_at(&self, tau: f64) -> Result<Canonical> {
        let c = Canonical::new(
            self.rp.value(tau),
            self.sp.value(tau),
            self.tp.value(tau),
            self.gamma.value(tau),
            self.theta.value(tau),
            self.sign,
        )?;
        Ok(c.with_e2(self.offset.value(tau)))
    }
}

impl Loop for CanonicalLoop {
    fn period(&self) -> f64 {
        self.period
    }

    fn sample_at(&self, tau: f64) -> Result<LoopSample> {
        let c = self.canonical_at(tau)?;
        let tangent = TangentSample::new(
            &c,
            self.gamma.derivative(tau),
            self.theta.derivative(tau),
            [
                self.rp.derivative(tau),
                self.sp.derivative(tau),
                self.tp.derivative(tau),
            ],
        );
        Ok(LoopSample {
            canonical: c,
            label: c.case_label(),
            tangent,
        })
    }

    fn params_at(&self, tau: f64) -> Result<Params> {
        let c = self.canonical_at(tau)?;
        Ok(synthesize(&c, c.e2))
    }
}

/// Finite-difference step in `tau` for loops given as raw Hamiltonians.
const PARAMS_FD_STEP: f64 = 1e-5;

fn canonical_tangent(lo: &Canonical, c: &Canonical, hi: &Canonical, step: f64) -> TangentSample {
    let d = |a: f64, b: f64| (b - a) / step;
    TangentSample::new(
        c,
        angle_diff(hi.gamma, lo.gamma) / step,
        angle_diff(hi.theta, lo.theta) / step,
        [d(lo.rp, hi.rp), d(lo.sp, hi.sp), d(lo.tp, hi.tp)],
    )
}

/// Loop given as a 1-periodic map from `tau` to Hamiltonian parameters.
/// Every sample is classified and canonicalized; velocities come from
/// central differences of the canonical coordinates.
pub struct ParamsLoop<F> {
    pub period: f64,
    pub tol: f64,
    pub f: F,
}

impl<F: Fn(f64) -> Params + Sync> ParamsLoop<F> {
    pub fn new(period: f64, f: F) -> Self {
        ParamsLoop {
            period,
            tol: DEFAULT_TOL,
            f,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn classify_at(&self, tau: f64) -> Result<(Canonical, CaseLabel)> {
        let p = (self.f)(tau);
        if !p.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "non-finite Hamiltonian at tau = {tau}"
            )));
        }
        let label = classify(&p, self.tol);
        Ok((canonicalize(&p, label, self.tol)?, label))
    }
}

impl<F: Fn(f64) -> Params + Sync> Loop for ParamsLoop<F> {
    fn period(&self) -> f64 {
        self.period
    }

    fn sample_at(&self, tau: f64) -> Result<LoopSample> {
        let h = PARAMS_FD_STEP;
        let (c, label) = self.classify_at(tau)?;
        for x in [tau - 0.5 * h, tau + 0.5 * h] {
            let to = classify(&(self.f)(x), self.tol);
            if to != label {
                return Err(Error::CaseTransition {
                    t: tau * self.period,
                    from: label,
                    to,
                });
            }
        }
        let (lo, _) = self.classify_at(tau - 0.5 * h)?;
        let (hi, _) = self.classify_at(tau + 0.5 * h)?;
        Ok(LoopSample {
            canonical: c,
            label,
            tangent: canonical_tangent(&lo, &c, &hi, h),
        })
    }

    fn params_at(&self, tau: f64) -> Result<Params> {
        Ok((self.f)(tau))
    }
}

/// Loop through an explicit list of Hamiltonians, interpolated linearly in
/// canonical coordinates. The last sample must repeat the first.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledLoop {
    period: f64,
    label: CaseLabel,
    sign: Sign,
    /// `[rp, sp, tp, gamma, theta, e2]` with unwrapped angles.
    nodes: Vec<[f64; 6]>,
}

impl SampledLoop {
    pub fn new(period: f64, samples: &[Params], tol: f64) -> Result<Self> {
        check_period(period)?;
        if samples.len() < 3 {
            return Err(Error::InvalidArgument(
                "a sampled loop needs at least 3 samples".into(),
            ));
        }
        let (first, last) = (samples[0], samples[samples.len() - 1]);
        let scale = first.max_entry().max(last.max_entry()).max(1.0);
        let gap = first.distance(&last) / scale;
        if gap > CLOSED_TOL {
            return Err(Error::OpenLoop(gap));
        }
        let label = classify(&first, tol);
        let mut nodes: Vec<[f64; 6]> = Vec::with_capacity(samples.len());
        let mut sign = Sign::Plus;
        for (k, p) in samples.iter().enumerate() {
            let to = classify(p, tol);
            if to != label {
                let t = period * k as f64 / (samples.len() - 1) as f64;
                return Err(Error::CaseTransition { t, from: label, to });
            }
            let c = canonicalize(p, label, tol)?;
            sign = c.sign;
            let (mut g, mut th) = (c.gamma, c.theta);
            if let Some(prev) = nodes.last() {
                g = prev[3] + angle_diff(g, prev[3]);
                th = prev[4] + angle_diff(th, prev[4]);
            }
            nodes.push([c.rp, c.sp, c.tp, g, th, c.e2]);
        }
        Ok(SampledLoop {
            period,
            label,
            sign,
            nodes,
        })
    }

    pub fn label(&self) -> CaseLabel {
        self.label
    }

    fn segment(&self, tau: f64) -> (usize, f64) {
        let n = self.nodes.len() - 1;
        let x = tau.clamp(0.0, 1.0) * n as f64;
        let k = (x.floor() as usize).min(n - 1);
        (k, x - k as f64)
    }

    fn canonical_at(&self, tau: f64) -> Result<(Canonical, [f64; 6])> {
        let (k, u) = self.segment(tau);
        let (a, b) = (self.nodes[k], self.nodes[k + 1]);
        let n = (self.nodes.len() - 1) as f64;
        let x: [f64; 6] = std::array::from_fn(|i| a[i] + u * (b[i] - a[i]));
        let dx: [f64; 6] = std::array::from_fn(|i| (b[i] - a[i]) * n);
        let c = Canonical::new(x[0], x[1], x[2], x[3], x[4], self.sign)?.with_e2(x[5]);
        Ok((c, dx))
    }
}

impl Loop for SampledLoop {
    fn period(&self) -> f64 {
        self.period
    }

    fn sample_at(&self, tau: f64) -> Result<LoopSample> {
        let (c, dx) = self.canonical_at(tau)?;
        let tangent = TangentSample::new(&c, dx[3], dx[4], [dx[0], dx[1], dx[2]]);
        Ok(LoopSample {
            canonical: c,
            label: self.label,
            tangent,
        })
    }

    fn params_at(&self, tau: f64) -> Result<Params> {
        let (c, _) = self.canonical_at(tau)?;
        Ok(synthesize(&c, c.e2))
    }
}

/// The same loop traversed with the monotone time warp
/// `tau -> tau + a sin(2 pi tau) / (2 pi)`, `|a| < 1`.
pub struct Reparameterized<'a, L: ?Sized> {
    pub inner: &'a L,
    pub a: f64,
}

impl<'a, L: Loop + ?Sized> Reparameterized<'a, L> {
    pub fn new(inner: &'a L, a: f64) -> Result<Self> {
        if !(a.abs() < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "warp amplitude must be below 1, got {a}"
            )));
        }
        Ok(Reparameterized { inner, a })
    }

    fn warp(&self, tau: f64) -> (f64, f64) {
        let w = std::f64::consts::TAU * tau;
        (
            tau + self.a * w.sin() / std::f64::consts::TAU,
            1.0 + self.a * w.cos(),
        )
    }
}

impl<L: Loop + ?Sized> Loop for Reparameterized<'_, L> {
    fn period(&self) -> f64 {
        self.inner.period()
    }

    fn sample_at(&self, tau: f64) -> Result<LoopSample> {
        let (x, speed) = self.warp(tau);
        let mut s = self.inner.sample_at(x)?;
        s.tangent = s.tangent.scaled(speed);
        Ok(s)
    }

    fn params_at(&self, tau: f64) -> Result<Params> {
        self.inner.params_at(self.warp(tau).0)
    }
}

/// Time-ordered product `prod_k exp(i a(tau_k) dtau)` over `n` midpoint
/// steps of `[0, 1]`, later factors on the left.
pub fn product_integral<F>(n: usize, a: F) -> Result<CMat2>
where
    F: Fn(f64) -> Result<CMat2> + Sync,
{
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 steps, got {n}"
        )));
    }
    let dtau = 1.0 / n as f64;
    let parts: Vec<CMat2> = chunk_bounds(n)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut u = CMat2::identity();
            for k in lo..hi {
                u = expi_hermitian2(&a((k as f64 + 0.5) * dtau)?, dtau) * u;
            }
            Ok(u)
        })
        .collect::<Result<_>>()?;
    Ok(parts.iter().fold(CMat2::identity(), |acc, p| p * acc))
}

fn chunk_bounds(n: usize) -> Vec<(usize, usize)> {
    let m = CHUNKS.min(n);
    (0..m).map(|j| (j * n / m, (j + 1) * n / m)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolonomyResult {
    /// `exp(i oint A1)`.
    pub gamma1: C64,
    /// `P exp(i oint A2)`.
    pub gamma2: CMat2,
    /// `exp(-i int E1 dt)`.
    pub dyn1: C64,
    /// `exp(-i int E2 dt)`.
    pub dyn2: C64,
    pub steps: usize,
}

struct ChunkResult {
    u: CMat2,
    phase1: f64,
    e1: f64,
    e2: f64,
}

/// Second-order product integral of the closed-form connection around a
/// closed loop, together with the dynamical phases.
pub fn path_ordered_exp<L: Loop + ?Sized>(lp: &L, n_steps: usize) -> Result<HolonomyResult> {
    if n_steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 steps, got {n_steps}"
        )));
    }
    check_period(lp.period())?;
    check_closed(lp)?;
    let from = lp.sample_at(0.0)?.label;
    if !from.is_regular() {
        return Err(Error::UnsupportedCase(from));
    }
    let big_t = lp.period();
    let dtau = 1.0 / n_steps as f64;
    let parts: Vec<ChunkResult> = chunk_bounds(n_steps)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut acc = ChunkResult {
                u: CMat2::identity(),
                phase1: 0.0,
                e1: 0.0,
                e2: 0.0,
            };
            for k in lo..hi {
                let tau = (k as f64 + 0.5) * dtau;
                let s = lp.sample_at(tau)?;
                if s.label != from {
                    return Err(Error::CaseTransition {
                        t: tau * big_t,
                        from,
                        to: s.label,
                    });
                }
                let (a1, a2) = connection_forms(&s.canonical, s.label)?.contract(&s.tangent);
                acc.u = expi_hermitian2(&a2, dtau) * acc.u;
                acc.phase1 += a1 * dtau;
                acc.e1 += s.canonical.e1() * dtau;
                acc.e2 += s.canonical.e2 * dtau;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut out = ChunkResult {
        u: CMat2::identity(),
        phase1: 0.0,
        e1: 0.0,
        e2: 0.0,
    };
    for p in &parts {
        out.u = p.u * out.u;
        out.phase1 += p.phase1;
        out.e1 += p.e1;
        out.e2 += p.e2;
    }
    Ok(HolonomyResult {
        gamma1: cis(out.phase1),
        gamma2: out.u,
        dyn1: cis(-out.e1 * big_t),
        dyn2: cis(-out.e2 * big_t),
        steps: n_steps,
    })
}

/// Which level a dynamical phase refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Simple,
    Degenerate,
}

/// `int_0^1 E dtau` by the midpoint rule.
fn level_mean<L: Loop + ?Sized>(lp: &L, level: Level, n_steps: usize) -> Result<f64> {
    if n_steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 steps, got {n_steps}"
        )));
    }
    let dtau = 1.0 / n_steps as f64;
    let mut acc = 0.0;
    for k in 0..n_steps {
        let c = lp.sample_at((k as f64 + 0.5) * dtau)?.canonical;
        acc += match level {
            Level::Simple => c.e1(),
            Level::Degenerate => c.e2,
        } * dtau;
    }
    Ok(acc)
}

/// `exp(-i int_0^T E dt)` by the midpoint rule.
pub fn dynamical_phase<L: Loop + ?Sized>(lp: &L, level: Level, n_steps: usize) -> Result<C64> {
    check_period(lp.period())?;
    Ok(cis(-level_mean(lp, level, n_steps)? * lp.period()))
}

/// Largest allowed `||H|| dt` per propagator step.
pub const MAX_PHASE_STEP: f64 = 0.1;

/// `exp(-i H dt)` through the eigensolver; also returns `||H|| dt`.
fn step_exponential(h: &CMat3, dt: f64) -> Result<(CMat3, f64)> {
    let eig = eig3_oracle(h, ORACLE_TOL)?;
    let norm = eig.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let d = CMat3::from_diagonal(&nalgebra::Vector3::from(eig.values.map(|e| cis(-e * dt))));
    Ok((eig.vectors * d * eig.vectors.adjoint(), norm * dt))
}

fn propagator_over<L: Loop + ?Sized>(lp: &L, period: f64, n_steps: usize) -> Result<CMat3> {
    if n_steps < 1 {
        return Err(Error::InvalidArgument("need at least 1 step".into()));
    }
    check_period(period)?;
    let dtau = 1.0 / n_steps as f64;
    let dt = period * dtau;
    let parts: Vec<CMat3> = chunk_bounds(n_steps)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut u = CMat3::identity();
            for k in lo..hi {
                let h = lp.params_at((k as f64 + 0.5) * dtau)?.matrix();
                let (step, phase) = step_exponential(&h, dt)?;
                if phase >= MAX_PHASE_STEP {
                    return Err(Error::StepTooLarge(phase));
                }
                u = step * u;
            }
            Ok(u)
        })
        .collect::<Result<_>>()?;
    Ok(parts.iter().fold(CMat3::identity(), |acc, p| p * acc))
}

/// Time-ordered propagator of `i dpsi/dt = H(t) psi` over one period.
pub fn schrodinger_propagator<L: Loop + ?Sized>(lp: &L, n_steps: usize) -> Result<CMat3> {
    propagator_over(lp, lp.period(), n_steps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub period: f64,
    /// `|| F^dagger U F - dyn2 gamma2 ||` on the degenerate block.
    pub unitary_distance: f64,
    /// `|| P_simple U P_degenerate ||`.
    pub subspace_leakage: f64,
}

/// Compares the adiabatic prediction `dyn2 * gamma2` with direct Schrödinger
/// evolution of the same loop traversed in each period `T`.
pub fn verify_adiabatic<L: Loop + ?Sized>(
    lp: &L,
    periods: &[f64],
    n_steps: usize,
) -> Result<Vec<ErrorReport>> {
    let hol = path_ordered_exp(lp, n_steps)?;
    let start = lp.sample_at(0.0)?;
    let f = frame(&start.canonical, start.label)?;
    let block = f.block();
    let e2_mean = level_mean(lp, Level::Degenerate, n_steps)?;
    periods
        .iter()
        .map(|&big_t| {
            let u = propagator_over(lp, big_t, n_steps)?;
            let w: CMat2 = block.adjoint() * u * block;
            let predicted = hol.gamma2 * cis(-e2_mean * big_t);
            let leak = f.v1.adjoint() * u * block;
            Ok(ErrorReport {
                period: big_t,
                unitary_distance: spectral_norm2(&(w - predicted)),
                subspace_leakage: leak.norm(),
            })
        })
        .collect()
}

/// Holonomy by discrete parallel transport of eigensolver frames: each
/// frame is aligned to its predecessor and the transported frame is read
/// off against the closed-form frame at the base point. Independent of the
/// connection formulas.
pub fn transport_holonomy<L: Loop + ?Sized>(lp: &L, n: usize) -> Result<(C64, CMat2)> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 steps, got {n}"
        )));
    }
    check_closed(lp)?;
    let label = lp.sample_at(0.0)?.label;
    let eig_frame = |tau: f64| -> Result<Frame> {
        Ok(oracle_frame(&lp.params_at(tau)?.matrix(), ORACLE_TOL)?.frame)
    };
    let base = gauge_fix(&eig_frame(0.0)?, label)?;
    let mut cur = base;
    for k in 1..=n {
        cur = align_frames(&cur, &eig_frame(k as f64 / n as f64)?)?;
    }
    let g1 = base.v1.dotc(&cur.v1);
    let g2: CMat2 = base.block().adjoint() * cur.block();
    Ok((g1, g2))
}
