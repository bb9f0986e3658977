//! Small dense complex linear algebra shared by the other modules.

use std::f64::consts::TAU;

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CVec3 = Vector3<C64>;
pub type CMat2 = Matrix2<C64>;
pub type CMat3 = Matrix3<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `e^{i phi}`
#[inline]
pub fn cis(phi: f64) -> C64 {
    C64::from_polar(1.0, phi)
}

/// Maps an angle into `[0, 2pi)`.
pub fn wrap_angle(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Returns the representative of `phi` (mod 2pi) nearest to `reference`.
pub fn unwrap_near(phi: f64, reference: f64) -> f64 {
    phi + TAU * ((reference - phi) / TAU).round()
}

/// Signed difference `a - b` reduced to `(-pi, pi]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > std::f64::consts::PI {
        d - TAU
    } else {
        d
    }
}

pub fn max_abs3(m: &CMat3) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_part2(m: &CMat2) -> CMat2 {
    (m + m.adjoint()) * real(0.5)
}

/// Largest singular value.
pub fn spectral_norm2(m: &CMat2) -> f64 {
    m.singular_values().max()
}

/// Largest singular value.
pub fn spectral_norm3(m: &CMat3) -> f64 {
    m.singular_values().max()
}

/// `exp(i a dt)` for Hermitian 2x2 `a`, evaluated exactly through the
/// Pauli decomposition `a = a0 + b.sigma` (eigenvalues `a0 +- |b|`).
pub fn expi_hermitian2(a: &CMat2, dt: f64) -> CMat2 {
    let a0 = 0.5 * (a[(0, 0)].re + a[(1, 1)].re);
    let bz = 0.5 * (a[(0, 0)].re - a[(1, 1)].re);
    let off = 0.5 * (a[(0, 1)] + a[(1, 0)].conj());
    let (bx, by) = (off.re, -off.im);
    let b = (bx * bx + by * by + bz * bz).sqrt();
    let phase = cis(a0 * dt);
    let (cs, sn) = ((b * dt).cos(), (b * dt).sin());
    // sin(b dt)/b, finite at b = 0
    let sinc = if b * dt.abs() < 1e-8 {
        dt * (1.0 - (b * dt).powi(2) / 6.0)
    } else {
        sn / b
    };
    let isn = I * sinc;
    let m = CMat2::new(
        real(cs) + isn * bz,
        isn * c(bx, -by),
        isn * c(bx, by),
        real(cs) - isn * bz,
    );
    m * phase
}

/// `|| M^dagger M - 1 ||_F`
pub fn unitarity_defect2(m: &CMat2) -> f64 {
    (m.adjoint() * m - CMat2::identity()).norm()
}

pub fn unitarity_defect3(m: &CMat3) -> f64 {
    (m.adjoint() * m - CMat3::identity()).norm()
}

/// Unitary factor `U` of the polar decomposition `m = U P`.
pub fn polar_unitary2(m: &CMat2) -> CMat2 {
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^dagger");
    u * v_t
}

/// Eigen-decomposition of a Hermitian 2x2 matrix: ascending eigenvalues
/// and the matching orthonormal eigenvectors as columns.
pub fn eigh2(a: &CMat2) -> ([f64; 2], CMat2) {
    let a0 = 0.5 * (a[(0, 0)].re + a[(1, 1)].re);
    let bz = 0.5 * (a[(0, 0)].re - a[(1, 1)].re);
    let off = a[(1, 0)];
    let b = (off.norm_sqr() + bz * bz).sqrt();
    if off.norm() <= 1e-300 {
        return if bz <= 0.0 {
            ([a0 + bz, a0 - bz], CMat2::identity())
        } else {
            (
                [a0 - bz, a0 + bz],
                CMat2::new(real(0.0), real(1.0), real(1.0), real(0.0)),
            )
        };
    }
    // pick the cancellation-free pair of row-derived eigenvectors
    let (up, dn) = if bz >= 0.0 {
        (
            nalgebra::Vector2::new(real(b + bz), off),
            nalgebra::Vector2::new(-off.conj(), real(b + bz)),
        )
    } else {
        (
            nalgebra::Vector2::new(off.conj(), real(b - bz)),
            nalgebra::Vector2::new(real(b - bz), -off),
        )
    };
    let (up, dn) = (up.normalize(), dn.normalize());
    let mut v = CMat2::zeros();
    v.set_column(0, &dn);
    v.set_column(1, &up);
    ([a0 - b, a0 + b], v)
}
