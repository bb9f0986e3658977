use std::f64::consts::{PI, TAU};

use wzphase::degeneracy::Sign;
use wzphase::hamiltonian::{multipole_params, MultipoleTensor, Params};
use wzphase::holonomy::{
    path_ordered_exp, product_integral, AngleSeries, CanonicalLoop, Fourier, Loop, ParamsLoop,
    Reparameterized,
};
use wzphase::linalg::{expi_hermitian2, real, unitarity_defect2, CMat2, C64, I};

fn sigma_x() -> CMat2 {
    CMat2::new(real(0.0), real(1.0), real(1.0), real(0.0))
}

fn sigma_y() -> CMat2 {
    CMat2::new(real(0.0), -I, I, real(0.0))
}

fn sigma_z() -> CMat2 {
    CMat2::new(real(1.0), real(0.0), real(0.0), real(-1.0))
}

/// A loop in which every canonical coordinate moves.
fn busy_loop() -> CanonicalLoop {
    CanonicalLoop {
        period: 1.0,
        rp: Fourier {
            mean: 1.0,
            cos: vec![0.3],
            sin: vec![0.2],
        },
        sp: Fourier {
            mean: 2.0,
            cos: vec![],
            sin: vec![0.5, 0.1],
        },
        tp: Fourier {
            mean: 1.5,
            cos: vec![-0.4],
            sin: vec![],
        },
        gamma: AngleSeries {
            winding: 1,
            series: Fourier {
                mean: 0.1,
                cos: vec![0.2],
                sin: vec![],
            },
        },
        theta: AngleSeries {
            winding: -1,
            series: Fourier {
                mean: 0.0,
                cos: vec![],
                sin: vec![0.4],
            },
        },
        sign: Sign::Minus,
        offset: Fourier {
            mean: 0.3,
            cos: vec![0.1],
            sin: vec![],
        },
    }
}

fn sorted_phases(u: &CMat2) -> [f64; 2] {
    // eigenphases of a 2x2 unitary from its trace and determinant
    let tr = u.trace();
    let det = u.determinant();
    let disc = (tr * tr - det * 4.0).sqrt();
    let mut p = [((tr + disc) / 2.0).arg(), ((tr - disc) / 2.0).arg()];
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    p
}

#[test]
fn unitarity() {
    for n in [64, 256, 2048] {
        let h = path_ordered_exp(&busy_loop(), n).unwrap();
        assert!(unitarity_defect2(&h.gamma2) <= 1e-10);
        assert!((h.gamma1.norm() - 1.0).abs() <= 1e-12);
        assert!((h.dyn1.norm() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn reparameterization_invariance() {
    let lp = busy_loop();
    let base = path_ordered_exp(&lp, 8192).unwrap();
    for a in [-0.4, 0.3, 0.6] {
        let w = Reparameterized::new(&lp, a).unwrap();
        let h = path_ordered_exp(&w, 8192).unwrap();
        let d = (h.gamma2 - base.gamma2).norm();
        assert!(d <= 1e-8, "a = {a}: {d:e}");
        assert!((h.gamma1 - base.gamma1).norm() <= 1e-8);
    }
}

#[test]
fn holonomy_is_non_abelian_on_busy_loop() {
    let h = path_ordered_exp(&busy_loop(), 4096).unwrap();
    let g = h.gamma2;
    let off = g[(0, 1)].norm() + g[(1, 0)].norm();
    assert!(off > 1e-3, "{g}");
}

/// Gauge-transformed connection `g^dagger a g + i g^dagger g'` for the
/// single-valued gauge `g(tau) = exp(i phi(tau) n.sigma) exp(i chi(tau))`.
fn gauge(tau: f64) -> (CMat2, CMat2) {
    let phi = 0.7 * (TAU * tau).sin() + 0.2 * (2.0 * TAU * tau).cos();
    let dphi = 0.7 * TAU * (TAU * tau).cos() - 0.4 * TAU * (2.0 * TAU * tau).sin();
    let chi = 0.5 * (TAU * tau).cos();
    let dchi = -0.5 * TAU * (TAU * tau).sin();
    let n = (sigma_x() * real(0.6) + sigma_y() * real(0.8)) * real(1.0);
    let g = expi_hermitian2(&n, phi) * C64::from_polar(1.0, chi);
    let dg = (n * I * real(dphi) + CMat2::identity() * I * real(dchi)) * g;
    (g, dg)
}

#[test]
fn gauge_covariance() {
    let lp = busy_loop();
    // the transformed connection varies faster, so both products need a
    // fine grid before their discretization errors drop below 1e-8
    let n = 1 << 16;
    let a = |tau: f64| -> wzphase::Result<CMat2> {
        let s = lp.sample_at(tau)?;
        let k = wzphase::connection::connection_forms(&s.canonical, s.label)?;
        Ok(k.contract(&s.tangent).1)
    };
    let plain = product_integral(n, a).unwrap();
    let transformed = product_integral(n, |tau| {
        let (g, dg) = gauge(tau);
        Ok(g.adjoint() * a(tau)? * g + g.adjoint() * dg * I)
    })
    .unwrap();
    let (g0, _) = gauge(0.0);
    let want = g0.adjoint() * plain * g0;
    assert!((transformed - want).norm() <= 1e-6);
    let (p, q) = (sorted_phases(&plain), sorted_phases(&transformed));
    assert!(
        (p[0] - q[0]).abs() <= 1e-8 && (p[1] - q[1]).abs() <= 1e-8,
        "{p:?} {q:?}"
    );
}

/// `a(tau) = e^{iB tau} M e^{-iB tau}` has the exact time-ordered
/// exponential `e^{iB} e^{i(M - B)}`.
fn rotating_exact(m: &CMat2, b: &CMat2) -> CMat2 {
    expi_hermitian2(b, 1.0) * expi_hermitian2(&(m - b), 1.0)
}

#[test]
fn second_order_convergence() {
    let m = sigma_x() * real(1.3) + sigma_z() * real(0.4);
    let b = sigma_z() * real(2.1) + sigma_y() * real(0.5);
    let exact = rotating_exact(&m, &b);
    let rot = |tau: f64| Ok(expi_hermitian2(&b, tau) * m * expi_hermitian2(&b, -tau));
    let mut errs = vec![];
    for n in [64, 128, 256, 512] {
        errs.push((product_integral(n, rot).unwrap() - exact).norm());
    }
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..=4.5).contains(&ratio), "{errs:?}");
    }
}

#[test]
fn abelian_consistency() {
    // diagonal a2 for Case 2 loops with moving gaps: the ordered product
    // equals the exponential of the integral
    let lp = CanonicalLoop {
        period: 2.0,
        rp: Fourier::constant(0.0),
        sp: Fourier {
            mean: 2.0,
            cos: vec![0.5],
            sin: vec![],
        },
        tp: Fourier {
            mean: 1.0,
            cos: vec![],
            sin: vec![0.3],
        },
        gamma: AngleSeries::default(),
        theta: AngleSeries {
            winding: 2,
            series: Fourier {
                mean: 0.0,
                cos: vec![],
                sin: vec![0.9],
            },
        },
        sign: Sign::Plus,
        offset: Fourier::default(),
    };
    let n = 4096;
    let h = path_ordered_exp(&lp, n).unwrap();
    let mut sum = CMat2::zeros();
    for k in 0..n {
        let s = lp.sample_at((k as f64 + 0.5) / n as f64).unwrap();
        let k = wzphase::connection::connection_forms(&s.canonical, s.label).unwrap();
        sum += k.contract(&s.tangent).1 / real(n as f64);
    }
    let want = CMat2::new(
        C64::from_polar(1.0, sum[(0, 0)].re),
        real(0.0),
        real(0.0),
        C64::from_polar(1.0, sum[(1, 1)].re),
    );
    assert!((h.gamma2 - want).norm() <= 1e-12);
}

#[test]
fn rotor_loops_are_trivial() {
    // diagonal Q(t) with Q22 = Q33 keeps a degenerate pair
    let rotor = |tau: f64| -> Params {
        let w = TAU * tau;
        let q11 = 3.0 + 0.8 * w.cos();
        let q22 = 1.0 + 0.3 * w.sin();
        let q = [[q11, 0.0, 0.0], [0.0, q22, 0.0], [0.0, 0.0, q22]];
        multipole_params(&[MultipoleTensor::quadrupole(q)]).unwrap()
    };
    let lp = ParamsLoop::new(1.0, rotor);
    let h = path_ordered_exp(&lp, 2048).unwrap();
    assert!((h.gamma1 - real(1.0)).norm() <= 1e-8);
    assert!((h.gamma2 - CMat2::identity()).norm() <= 1e-8);
}

#[test]
fn gell_mann_identity_component_is_inert() {
    // adding a multiple of the identity only moves E2
    let mut a = busy_loop();
    let h0 = path_ordered_exp(&a, 1024).unwrap();
    a.offset = Fourier {
        mean: 5.0,
        cos: vec![1.0],
        sin: vec![2.0],
    };
    let h1 = path_ordered_exp(&a, 1024).unwrap();
    assert_eq!(h0.gamma2, h1.gamma2);
    assert_eq!(h0.gamma1, h1.gamma1);
    assert!((h1.dyn2 * h0.dyn2.conj() - C64::from_polar(1.0, -(5.0 - 0.3))).norm() < 1e-10);
}

#[test]
fn case1_theta_loop_value() {
    let lp = CanonicalLoop::theta_loop(1.0, 1.0, 1.0, 1.0);
    let h = path_ordered_exp(&lp, 4096).unwrap();
    assert!((h.gamma1 - C64::from_polar(1.0, 4.0 * PI / 3.0)).norm() <= 1e-12);
}
