//! Spin-1 multipole interactions `H = Q^{i1..in} J_{i1} ... J_{in}`.

use std::f64::consts::FRAC_1_SQRT_2;

use super::{params_from_matrix, Params};
use crate::error::{Error, Result};
use crate::linalg::{c, real, CMat3};

/// Angular momentum matrices for `j = 1` in the `m = 1, 0, -1` basis
/// (`hbar = 1`).
pub fn spin1_operators() -> [CMat3; 3] {
    let o = real(0.0);
    let a = real(FRAC_1_SQRT_2);
    let ia = c(0.0, FRAC_1_SQRT_2);
    [
        CMat3::new(o, a, o, a, o, a, o, a, o),
        CMat3::new(o, -ia, o, ia, o, -ia, o, ia, o),
        CMat3::new(real(1.0), o, o, o, o, o, o, o, real(-1.0)),
    ]
}

/// `(sqrt 2 J_1, sqrt 2 J_2, J_3)`, all with exact integer entries.
fn scaled_spin1() -> [CMat3; 3] {
    let o = real(0.0);
    let a = real(1.0);
    let i = c(0.0, 1.0);
    [
        CMat3::new(o, a, o, a, o, a, o, a, o),
        CMat3::new(o, -i, o, i, o, -i, o, i, o),
        CMat3::new(real(1.0), o, o, o, o, o, o, o, real(-1.0)),
    ]
}

/// A real tensor of rank `order` over the indices `1..=3`, stored row-major
/// (the last index varies fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct MultipoleTensor {
    order: usize,
    components: Vec<f64>,
}

impl MultipoleTensor {
    pub fn new(order: usize, components: Vec<f64>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidTensor("order must be at least 1".into()));
        }
        let len = 3usize
            .checked_pow(order as u32)
            .ok_or_else(|| Error::InvalidTensor(format!("order {order} is too large")))?;
        if components.len() != len {
            return Err(Error::InvalidTensor(format!(
                "order {order} needs {len} components, got {}",
                components.len()
            )));
        }
        if components.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidTensor("non-finite component".into()));
        }
        Ok(MultipoleTensor { order, components })
    }

    /// Magnetic dipole `R^i J_i`.
    pub fn dipole(r: [f64; 3]) -> Self {
        MultipoleTensor {
            order: 1,
            components: r.to_vec(),
        }
    }

    /// Quadrupole `Q^{ij} J_i J_j`.
    pub fn quadrupole(q: [[f64; 3]; 3]) -> Self {
        MultipoleTensor {
            order: 2,
            components: q.iter().flatten().copied().collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// Component at a zero-based multi-index.
    pub fn get(&self, index: &[usize]) -> f64 {
        assert_eq!(index.len(), self.order);
        self.components[index.iter().fold(0, |acc, &i| 3 * acc + i)]
    }

    /// Largest deviation under swaps of neighbouring indices, which generate
    /// every permutation.
    pub fn asymmetry(&self) -> f64 {
        let n = self.order;
        let mut worst: f64 = 0.0;
        let mut idx = vec![0usize; n];
        for flat in 0..self.components.len() {
            let mut rest = flat;
            for slot in (0..n).rev() {
                idx[slot] = rest % 3;
                rest /= 3;
            }
            for k in 0..n.saturating_sub(1) {
                let mut swapped = idx.clone();
                swapped.swap(k, k + 1);
                worst = worst.max((self.components[flat] - self.get(&swapped)).abs());
            }
        }
        worst
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let scale = self.components.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        self.asymmetry() <= rel_tol * scale
    }

    /// `sum Q^{i1..in} J_{i1} ... J_{in}` by nested contraction from the
    /// left. `J_1, J_2` carry a factor `1/sqrt 2` in front of an integer
    /// matrix; those factors are collected as powers of two plus at most one
    /// `1/sqrt 2`, so integer-valued results such as `J.J = 2` come out exact.
    fn contract(&self) -> CMat3 {
        let k = scaled_spin1();
        // [even, odd] number of J_1, J_2 factors, each already multiplied by
        // 2^(-floor(m/2))
        fn go(block: &[f64], k: &[CMat3; 3]) -> [CMat3; 2] {
            if block.len() == 1 {
                return [CMat3::identity() * real(block[0]), CMat3::zeros()];
            }
            let third = block.len() / 3;
            let mut out = [CMat3::zeros(), CMat3::zeros()];
            for i in 0..3 {
                let [even, odd] = go(&block[i * third..(i + 1) * third], k);
                if i == 2 {
                    out[0] += k[i] * even;
                    out[1] += k[i] * odd;
                } else {
                    out[1] += k[i] * even;
                    out[0] += k[i] * odd * real(0.5);
                }
            }
            out
        }
        let [even, odd] = go(&self.components, &k);
        even + odd * real(FRAC_1_SQRT_2)
    }
}

/// Builds `H = sum_terms Q^{i1..in} J_{i1} ... J_{in}` for a spin-1 system.
pub fn multipole_params(terms: &[MultipoleTensor]) -> Result<Params> {
    let mut h = CMat3::zeros();
    for term in terms {
        if term.order == 0 {
            return Err(Error::InvalidTensor("order must be at least 1".into()));
        }
        if !term.is_symmetric(1e-12) {
            return Err(Error::InvalidTensor(format!(
                "order-{} tensor is not symmetric (deviation {:.3e})",
                term.order,
                term.asymmetry()
            )));
        }
        h += term.contract();
    }
    params_from_matrix(&h)
}

/// Inverse of the dipole-plus-quadrupole map: every Hermitian 3x3 matrix is
/// `R^i J_i + Q^{jk} J_j J_k` for exactly one vector `R` and symmetric `Q`.
pub fn dipole_quadrupole_from_params(p: &Params) -> (MultipoleTensor, MultipoleTensor) {
    let q11 = 0.5 * p.s + p.zeta.re;
    let q22 = 0.5 * p.s - p.zeta.re;
    let q12 = p.zeta.im;
    let q33 = 0.5 * (p.r + p.t - p.s);
    let plus = (p.xi + p.kappa) * FRAC_1_SQRT_2;
    let minus = (p.xi - p.kappa) * FRAC_1_SQRT_2;
    let (q13, q23) = (minus.re, minus.im);
    let dipole = MultipoleTensor::dipole([plus.re, plus.im, 0.5 * (p.r - p.t)]);
    let quad = MultipoleTensor::quadrupole([[q11, q12, q13], [q12, q22, q23], [q13, q23, q33]]);
    (dipole, quad)
}
