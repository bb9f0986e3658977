//! Inhomogeneous coordinates on CP^2.
//!
//! The homogeneous coordinates of a degenerate Hamiltonian are
//! `(z1, z2, z3) = (xi, zeta, kappa)`; chart `O_mu` covers `z_mu != 0` and
//! uses the two ratios `z_nu / z_mu` in polar form.

use super::{synthesize, Canonical};
use crate::error::{Error, Result};
use crate::linalg::{wrap_angle, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// `xi != 0`
    O1,
    /// `zeta != 0`
    O2,
    /// `kappa != 0`
    O3,
}

impl Chart {
    fn pivot(&self) -> usize {
        match self {
            Chart::O1 => 0,
            Chart::O2 => 1,
            Chart::O3 => 2,
        }
    }

    /// Indices of the two coordinates divided by the pivot.
    fn others(&self) -> (usize, usize) {
        match self {
            Chart::O1 => (1, 2),
            Chart::O2 => (0, 2),
            Chart::O3 => (0, 1),
        }
    }
}

/// `z_a / z_mu = rho_a e^{i phi_a}` and `z_b / z_mu = rho_b e^{i phi_b}` with
/// `a < b` the two indices other than the chart's.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub chart: Chart,
    pub rho_a: f64,
    pub rho_b: f64,
    pub phi_a: f64,
    pub phi_b: f64,
}

impl ChartPoint {
    /// Homogeneous coordinates with the chart's own entry set to 1.
    pub fn homogeneous(&self) -> [C64; 3] {
        let mut z = [C64::new(1.0, 0.0); 3];
        let (a, b) = self.chart.others();
        z[a] = C64::from_polar(self.rho_a, self.phi_a);
        z[b] = C64::from_polar(self.rho_b, self.phi_b);
        z
    }

    /// Same point in another chart, or `None` when it lies outside it.
    pub fn to_chart(&self, target: Chart) -> Option<ChartPoint> {
        let z = self.homogeneous();
        from_homogeneous(&z, target)
    }
}

fn from_homogeneous(z: &[C64; 3], chart: Chart) -> Option<ChartPoint> {
    let pivot = z[chart.pivot()];
    if pivot.norm() == 0.0 {
        return None;
    }
    let (a, b) = chart.others();
    let (wa, wb) = (z[a] / pivot, z[b] / pivot);
    Some(ChartPoint {
        chart,
        rho_a: wa.norm(),
        rho_b: wb.norm(),
        phi_a: wrap_angle(wa.arg()),
        phi_b: wrap_angle(wb.arg()),
    })
}

/// Chart coordinates of a canonical point, choosing the first of
/// `O1, O2, O3` that contains it. The phases are read off the actual
/// coordinate ratios.
pub fn chart_coords(c: &Canonical) -> Result<ChartPoint> {
    let nonzero = [c.rp, c.sp, c.tp].iter().filter(|x| **x != 0.0).count();
    if nonzero < 2 {
        return Err(Error::ChartUndefined(format!(
            "at most one of r', s', t' is nonzero ({}, {}, {}); the frame is constant",
            c.rp, c.sp, c.tp
        )));
    }
    let p = synthesize(c, 0.0);
    let z = [p.xi, p.zeta, p.kappa];
    [Chart::O1, Chart::O2, Chart::O3]
        .into_iter()
        .find_map(|chart| from_homogeneous(&z, chart))
        .ok_or_else(|| Error::ChartUndefined("all homogeneous coordinates vanish".into()))
}
