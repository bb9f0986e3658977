//! Three-level Hamiltonians: the Gell-Mann expansion, the entry-wise
//! `(r, s, t, xi, zeta, kappa)` layout and the multipole builders.
//!
//! The matrix layout is
//!
//! ```text
//!     | r    xi*   zeta*  |
//! H = | xi   s     kappa* |
//!     | zeta kappa t      |
//! ```
//!
//! with `r, s, t` real. Energies are in units where the coupling `b` and
//! `hbar` are both 1.

mod multipole;

pub use multipole::{
    dipole_quadrupole_from_params, multipole_params, spin1_operators, MultipoleTensor,
};

use crate::error::{Error, Result};
use crate::linalg::{c, max_abs3, real, CMat3, C64};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Coefficients `R^0 .. R^8` of `H = sum_i R^i lambda_i`, where `lambda_0`
/// is the identity and `lambda_1 .. lambda_8` are the Gell-Mann matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GellMannVector(pub [f64; 9]);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub r: f64,
    pub s: f64,
    pub t: f64,
    pub xi: C64,
    pub zeta: C64,
    pub kappa: C64,
}

/// A 3x3 Hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian3(CMat3);

impl GellMannVector {
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl Params {
    pub fn new(r: f64, s: f64, t: f64, xi: C64, zeta: C64, kappa: C64) -> Self {
        Params {
            r,
            s,
            t,
            xi,
            zeta,
            kappa,
        }
    }

    pub fn diagonal(r: f64, s: f64, t: f64) -> Self {
        let z = C64::new(0.0, 0.0);
        Params::new(r, s, t, z, z, z)
    }

    pub fn is_finite(&self) -> bool {
        [self.r, self.s, self.t].iter().all(|x| x.is_finite())
            && [self.xi, self.zeta, self.kappa]
                .iter()
                .all(|z| z.is_finite())
    }

    /// Largest absolute matrix entry.
    pub fn max_entry(&self) -> f64 {
        [
            self.r.abs(),
            self.s.abs(),
            self.t.abs(),
            self.xi.norm(),
            self.zeta.norm(),
            self.kappa.norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn matrix(&self) -> CMat3 {
        *matrix_from_params(self).matrix()
    }

    /// Componentwise maximum difference.
    pub fn distance(&self, other: &Params) -> f64 {
        [
            (self.r - other.r).abs(),
            (self.s - other.s).abs(),
            (self.t - other.t).abs(),
            (self.xi - other.xi).norm(),
            (self.zeta - other.zeta).norm(),
            (self.kappa - other.kappa).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl Hamiltonian3 {
    /// Accepts an externally produced matrix whose Hermiticity defect is at
    /// most `1e-12 * max|entry|`; the result is exactly Hermitian.
    pub fn from_matrix(m: CMat3) -> Result<Self> {
        let p = params_from_matrix(&m)?;
        Ok(matrix_from_params(&p))
    }

    pub fn matrix(&self) -> &CMat3 {
        &self.0
    }

    pub fn params(&self) -> Params {
        read_params(&self.0)
    }
}

pub fn params_from_gellmann(g: &GellMannVector) -> Params {
    let r = &g.0;
    Params {
        r: r[0] + r[3] + r[8] / SQRT3,
        s: r[0] - r[3] + r[8] / SQRT3,
        t: r[0] - 2.0 * r[8] / SQRT3,
        xi: c(r[1], r[2]),
        zeta: c(r[4], r[5]),
        kappa: c(r[6], r[7]),
    }
}

pub fn gellmann_from_params(p: &Params) -> GellMannVector {
    GellMannVector([
        (p.r + p.s + p.t) / 3.0,
        p.xi.re,
        p.xi.im,
        (p.r - p.s) / 2.0,
        p.zeta.re,
        p.zeta.im,
        p.kappa.re,
        p.kappa.im,
        (p.r + p.s - 2.0 * p.t) / (2.0 * SQRT3),
    ])
}

/// The identity followed by the eight Gell-Mann matrices.
pub fn gellmann_matrices() -> [CMat3; 9] {
    let o = real(0.0);
    let l = real(1.0);
    let i = c(0.0, 1.0);
    let k = real(1.0 / SQRT3);
    [
        CMat3::identity(),
        CMat3::new(o, l, o, l, o, o, o, o, o),
        CMat3::new(o, -i, o, i, o, o, o, o, o),
        CMat3::new(l, o, o, o, -l, o, o, o, o),
        CMat3::new(o, o, l, o, o, o, l, o, o),
        CMat3::new(o, o, -i, o, o, o, i, o, o),
        CMat3::new(o, o, o, o, o, l, o, l, o),
        CMat3::new(o, o, o, o, o, -i, o, i, o),
        CMat3::new(k, o, o, o, k, o, o, o, k * -2.0),
    ]
}

pub fn matrix_from_params(p: &Params) -> Hamiltonian3 {
    Hamiltonian3(CMat3::new(
        real(p.r),
        p.xi.conj(),
        p.zeta.conj(),
        p.xi,
        real(p.s),
        p.kappa.conj(),
        p.zeta,
        p.kappa,
        real(p.t),
    ))
}

/// Reads `(r, s, t, xi, zeta, kappa)` back from a Hermitian matrix. The
/// Hermiticity defect may be at most `1e-12 * max|entry|`; off-diagonal
/// entries are averaged with their mirror images.
pub fn params_from_matrix(m: &CMat3) -> Result<Params> {
    let allowed = 1e-12 * max_abs3(m);
    let deviation = (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if !(deviation <= allowed) {
        return Err(Error::NotHermitian { deviation, allowed });
    }
    Ok(read_params(m))
}

fn read_params(m: &CMat3) -> Params {
    let avg = |lo: C64, hi: C64| (lo + hi.conj()) * 0.5;
    Params {
        r: m[(0, 0)].re,
        s: m[(1, 1)].re,
        t: m[(2, 2)].re,
        xi: avg(m[(1, 0)], m[(0, 1)]),
        zeta: avg(m[(2, 0)], m[(0, 2)]),
        kappa: avg(m[(2, 1)], m[(1, 2)]),
    }
}

/// Subtracts `e` times the identity; eigenvectors are unchanged.
pub fn shift_params(p: &Params, e: f64) -> Params {
    Params {
        r: p.r - e,
        s: p.s - e,
        t: p.t - e,
        ..*p
    }
}
