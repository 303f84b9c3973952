//! Qubit states: density matrices, Bloch vectors and the linearly polarized
//! probe states used by the interferometer runs.
//!
//! Basis convention: `|1⟩ = |H⟩` is index 0 and `|2⟩ = |V⟩` is index 1, so
//! `σ_z |H⟩ = |H⟩`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{c, herm_eigvals, CMat, CMat2, C64};

pub const STATE_TOL: f64 = 1e-10;
pub const BALL_TOL: f64 = 1e-9;

/// A validated 2×2 density matrix.
///
/// Construction symmetrizes the input, so the stored matrix is exactly
/// Hermitian and differences of two density matrices are too.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMat2,
}

impl DensityMatrix {
    pub fn new(m: CMat2) -> Result<Self> {
        let spectrum = herm_eigvals(&m)?;
        let tr = m.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        if spectrum.min() < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {}",
                spectrum.min()
            )));
        }
        Ok(Self {
            mat: m.hermitian_part(),
        })
    }

    /// Skips validation; callers guarantee a trace-preserving, positive map
    /// produced the matrix.
    pub(crate) fn from_channel_output(m: CMat2) -> Self {
        Self {
            mat: m.hermitian_part(),
        }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized, nonzero) ket.
    pub fn pure(ket: [C64; 2]) -> Result<Self> {
        let n = (ket[0].norm_sqr() + ket[1].norm_sqr()).sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidState("zero or non-finite ket".into()));
        }
        let k = [ket[0] / n, ket[1] / n];
        Ok(Self::from_channel_output(CMat2::outer(&k, &k)))
    }

    pub fn maximally_mixed() -> Self {
        Self {
            mat: CMat2::identity().scale_re(0.5),
        }
    }

    pub fn horizontal() -> Self {
        Self {
            mat: CMat2::unit(0, 0),
        }
    }

    pub fn vertical() -> Self {
        Self {
            mat: CMat2::unit(1, 1),
        }
    }

    pub fn mat(&self) -> &CMat2 {
        &self.mat
    }

    pub fn purity(&self) -> f64 {
        (self.mat * self.mat).trace().re
    }

    pub fn bloch(&self) -> BlochVector {
        density_to_bloch(self)
    }

    /// Convex combination `w·self + (1 − w)·other`.
    pub fn mix(&self, other: &Self, w: f64) -> Self {
        Self::from_channel_output(self.mat.scale_re(w) + other.mat.scale_re(1.0 - w))
    }
}

/// Bloch vector `(x, y, z)` with `ρ = ½(𝟙 + xσ_x + yσ_y + zσ_z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Point on the unit sphere at polar angle `theta` and azimuth `phi` (radians).
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self::new(st * cp, st * sp, ct)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

pub fn bloch_to_density(b: BlochVector) -> Result<DensityMatrix> {
    let norm = b.norm();
    if !(norm <= 1.0 + BALL_TOL) {
        return Err(Error::OutsideBall { norm });
    }
    // Inside the tolerance band, pull back onto the sphere.
    let b = if norm > 1.0 {
        BlochVector::new(b.x / norm, b.y / norm, b.z / norm)
    } else {
        b
    };
    let m = CMat([
        [c(0.5 * (1.0 + b.z), 0.0), c(0.5 * b.x, -0.5 * b.y)],
        [c(0.5 * b.x, 0.5 * b.y), c(0.5 * (1.0 - b.z), 0.0)],
    ]);
    Ok(DensityMatrix::from_channel_output(m))
}

pub fn density_to_bloch(rho: &DensityMatrix) -> BlochVector {
    let m = rho.mat();
    BlochVector::new(
        2.0 * m[(0, 1)].re,
        -2.0 * m[(0, 1)].im,
        (m[(0, 0)] - m[(1, 1)]).re,
    )
}

/// Angle of the linear polarization `cos(θ/2)|H⟩ + sin(θ/2)|V⟩`, in degrees.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearPolarizationAngle(pub f64);

impl LinearPolarizationAngle {
    pub fn degrees(self) -> f64 {
        self.0
    }

    pub fn radians(self) -> f64 {
        self.0.to_radians()
    }
}

/// Pure linearly polarized state; its Bloch vector is `(sin θ, 0, cos θ)`.
pub fn linear_pol_state(theta: LinearPolarizationAngle) -> DensityMatrix {
    let half = 0.5 * theta.radians();
    let ket = [c(half.cos(), 0.0), c(half.sin(), 0.0)];
    DensityMatrix::from_channel_output(CMat2::outer(&ket, &ket))
}

/// The sixteen probe angles prepared for every instrument in the interferometer runs.
pub fn sm7_state_list() -> Vec<LinearPolarizationAngle> {
    [
        -20.0, -10.0, 0.0, 10.0, 20.0, 70.0, 80.0, 90.0, 100.0, 110.0, 160.0, 170.0, 180.0,
        190.0, 200.0, 270.0,
    ]
    .into_iter()
    .map(LinearPolarizationAngle)
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn bloch_examples() {
        let h = bloch_to_density(BlochVector::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(h, DensityMatrix::horizontal());
        let mixed = bloch_to_density(BlochVector::new(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(mixed, DensityMatrix::maximally_mixed());
        let plus = bloch_to_density(BlochVector::new(1.0, 0.0, 0.0)).unwrap();
        assert!(plus.mat().max_abs_diff(&CMat([[c(0.5, 0.0); 2]; 2])) < 1e-16);

        assert_eq!(density_to_bloch(&DensityMatrix::maximally_mixed()), BlochVector::new(0.0, 0.0, 0.0));
        assert_eq!(density_to_bloch(&DensityMatrix::vertical()), BlochVector::new(0.0, 0.0, -1.0));
        let b = density_to_bloch(&bloch_to_density(BlochVector::new(0.6, 0.0, 0.8)).unwrap());
        assert_abs_diff_eq!(b.x, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(b.y, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.z, 0.8, epsilon = 1e-15);
    }

    #[test]
    fn outside_ball_rejected() {
        assert!(matches!(
            bloch_to_density(BlochVector::new(1.0, 1.0, 0.0)),
            Err(Error::OutsideBall { .. })
        ));
        // Inside the tolerance band is accepted and lands on the sphere.
        let rho = bloch_to_density(BlochVector::new(0.0, 0.0, 1.0 + 5e-10)).unwrap();
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(CMat2::identity()).is_err());
        assert!(DensityMatrix::new(CMat2::from_real_diag([1.5, -0.5])).is_err());
        assert!(DensityMatrix::new(CMat2::unit(0, 1)).is_err());
        assert!(DensityMatrix::new(CMat2::from_real_diag([0.25, 0.75])).is_ok());
    }

    #[test]
    fn linear_polarization_examples() {
        let h = linear_pol_state(LinearPolarizationAngle(0.0));
        assert!(h.mat().max_abs_diff(DensityMatrix::horizontal().mat()) < 1e-16);
        let v = linear_pol_state(LinearPolarizationAngle(180.0));
        assert!(v.mat().max_abs_diff(DensityMatrix::vertical().mat()) < 1e-15);
        let d = linear_pol_state(LinearPolarizationAngle(90.0)).bloch();
        assert_abs_diff_eq!(d.x, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.z, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn probe_angle_list() {
        let list = sm7_state_list();
        assert_eq!(list.len(), 16);
        assert!(list.contains(&LinearPolarizationAngle(90.0)));
        assert!(!list.contains(&LinearPolarizationAngle(45.0)));
    }

    proptest! {
        #[test]
        fn ball_points_are_states(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
            let b = BlochVector::new(x, y, z);
            prop_assume!(b.norm() <= 1.0);
            let rho = bloch_to_density(b).unwrap();
            prop_assert!(DensityMatrix::new(*rho.mat()).is_ok());
            let back = density_to_bloch(&rho);
            prop_assert!((back.x - x).abs() < 1e-12 && (back.y - y).abs() < 1e-12 && (back.z - z).abs() < 1e-12);
        }

        #[test]
        fn purity_iff_unit_bloch(theta in 0.0f64..std::f64::consts::PI, phi in 0.0f64..6.3, r in 0.0f64..1.0) {
            let rho = bloch_to_density(BlochVector::from_angles(theta, phi)).unwrap();
            prop_assert!((rho.purity() - 1.0).abs() < 1e-9);
            prop_assert!((rho.bloch().norm() - 1.0).abs() < 1e-9);
            let b = BlochVector::from_angles(theta, phi);
            let mixed = bloch_to_density(BlochVector::new(r * b.x, r * b.y, r * b.z)).unwrap();
            // purity = (1 + r²)/2
            prop_assert!((mixed.purity() - 0.5 * (1.0 + r * r)).abs() < 1e-12);
        }
    }
}
