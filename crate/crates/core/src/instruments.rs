//! Two-outcome qubit instruments with one Kraus operator per outcome.
//!
//! An [`Instrument`] `(K₁, K₂)` induces the POVM `E′_j = K_j†K_j` and the
//! channel `T_s(ρ) = Σ_j K_j ρ K_j†`. Outcome `j` is labelled so that its POVM
//! element has its larger weight on `|j⟩` (`|1⟩ = |H⟩`, `|2⟩ = |V⟩`).

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::qmath::{c, herm_eigvals, CMat, CMat2, C64};
use crate::states::DensityMatrix;

pub const NORMALIZATION_TOL: f64 = 1e-10;
pub const POVM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Instrument {
    k1: CMat2,
    k2: CMat2,
}

impl Instrument {
    pub fn k1(&self) -> &CMat2 {
        &self.k1
    }

    pub fn k2(&self) -> &CMat2 {
        &self.k2
    }

    pub fn kraus(&self) -> [&CMat2; 2] {
        [&self.k1, &self.k2]
    }

    /// Exchanges the two outcome labels.
    pub fn swap_outcomes(&self) -> Self {
        Self {
            k1: self.k2,
            k2: self.k1,
        }
    }

    /// `‖K₁†K₁ + K₂†K₂ − 𝟙‖_F`
    pub fn normalization_defect(&self) -> f64 {
        normalization_defect(&self.k1, &self.k2)
    }
}

impl Channel for Instrument {
    fn apply_op(&self, m: &CMat2) -> CMat2 {
        self.k1 * *m * self.k1.adjoint() + self.k2 * *m * self.k2.adjoint()
    }
}

fn normalization_defect(k1: &CMat2, k2: &CMat2) -> f64 {
    (k1.adjoint() * *k1 + k2.adjoint() * *k2 - CMat2::identity()).frobenius_norm()
}

/// The only constructor for arbitrary Kraus pairs.
pub fn validate_instrument(k1: CMat2, k2: CMat2) -> Result<Instrument> {
    if !k1.is_finite() || !k2.is_finite() {
        return Err(Error::InvalidArgument("Kraus operators must be finite".into()));
    }
    let deviation = normalization_defect(&k1, &k2);
    if deviation > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { deviation });
    }
    Ok(Instrument { k1, k2 })
}

/// A two-outcome POVM `{E₁, E₂}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Povm {
    e1: CMat2,
    e2: CMat2,
}

impl Povm {
    pub fn new(e1: CMat2, e2: CMat2) -> Result<Self> {
        for e in [&e1, &e2] {
            let s = herm_eigvals(e)?;
            if s.min() < -POVM_TOL || s.max() > 1.0 + POVM_TOL {
                return Err(Error::InvalidArgument(format!(
                    "POVM element eigenvalues {:?} leave [0, 1]",
                    s.eigenvalues
                )));
            }
        }
        let defect = (e1 + e2 - CMat2::identity()).frobenius_norm();
        if defect > POVM_TOL {
            return Err(Error::InvalidArgument(format!(
                "POVM elements sum to 𝟙 only up to {defect:e}"
            )));
        }
        Ok(Self {
            e1: e1.hermitian_part(),
            e2: e2.hermitian_part(),
        })
    }

    /// `{E₁, 𝟙 − E₁}`
    pub fn from_first(e1: CMat2) -> Result<Self> {
        Self::new(e1, CMat2::identity() - e1)
    }

    /// The target measurement `{|1⟩⟨1|, |2⟩⟨2|}`.
    pub fn computational() -> Self {
        Self {
            e1: CMat2::unit(0, 0),
            e2: CMat2::unit(1, 1),
        }
    }

    pub fn e1(&self) -> &CMat2 {
        &self.e1
    }

    pub fn e2(&self) -> &CMat2 {
        &self.e2
    }

    pub fn probabilities(&self, rho: &DensityMatrix) -> (f64, f64) {
        (
            (self.e1 * *rho.mat()).trace().re,
            (self.e2 * *rho.mat()).trace().re,
        )
    }

    /// `λ·self + (1 − λ)·other`
    pub fn mix(&self, other: &Self, lambda: f64) -> Self {
        Self {
            e1: self.e1.scale_re(lambda) + other.e1.scale_re(1.0 - lambda),
            e2: self.e2.scale_re(lambda) + other.e2.scale_re(1.0 - lambda),
        }
    }

    /// `{U† E_i U}`
    pub fn conjugated(&self, u: &CMat2) -> Self {
        Self {
            e1: (u.adjoint() * self.e1 * *u).hermitian_part(),
            e2: (u.adjoint() * self.e2 * *u).hermitian_part(),
        }
    }

    /// `{U_π† E_{π(i)} U_π}` for the transposition `π = (1 2)`.
    pub fn permuted(&self) -> Self {
        let x = CMat2::pauli_x();
        Self {
            e1: x * self.e2 * x,
            e2: x * self.e1 * x,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.e1[(0, 1)].norm() < POVM_TOL && self.e1[(1, 0)].norm() < POVM_TOL
    }
}

pub fn povm_of(ins: &Instrument) -> Povm {
    Povm {
        e1: (ins.k1.adjoint() * ins.k1).hermitian_part(),
        e2: (ins.k2.adjoint() * ins.k2).hermitian_part(),
    }
}

pub fn apply_channel(ins: &Instrument, rho: &DensityMatrix) -> DensityMatrix {
    ins.apply(rho)
}

pub fn outcome_probabilities(ins: &Instrument, rho: &DensityMatrix) -> (f64, f64) {
    povm_of(ins).probabilities(rho)
}

/// Parameters of the general diagonal single-Kraus family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalFamilyParams {
    pub b1: f64,
    pub b2: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl DiagonalFamilyParams {
    pub fn new(b1: f64, b2: f64, beta1: f64, beta2: f64) -> Result<Self> {
        let p = Self {
            b1,
            b2,
            beta1,
            beta2,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("b1", self.b1), ("b2", self.b2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::ParamOutOfRange {
                    name,
                    value: v,
                    expected: "0 ≤ b ≤ 1",
                });
            }
        }
        for (name, v) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !v.is_finite() {
                return Err(Error::ParamOutOfRange {
                    name,
                    value: v,
                    expected: "finite phase",
                });
            }
        }
        Ok(())
    }
}

/// `K₁ = √(1−b₂²)|1⟩⟨1| + e^{iβ₁} b₁|2⟩⟨2|`, `K₂ = b₂|1⟩⟨1| + e^{iβ₂}√(1−b₁²)|2⟩⟨2|`.
pub fn make_diagonal_instrument(p: DiagonalFamilyParams) -> Result<Instrument> {
    p.validate()?;
    let k1 = CMat::from_diag([
        c((1.0 - p.b2 * p.b2).sqrt(), 0.0),
        Complex64::from_polar(p.b1, p.beta1),
    ]);
    let k2 = CMat::from_diag([
        c(p.b2, 0.0),
        Complex64::from_polar((1.0 - p.b1 * p.b1).sqrt(), p.beta2),
    ]);
    Ok(Instrument { k1, k2 })
}

/// Parameters of the optimal family; `beta = 0` gives the frontier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalFamilyParams {
    pub gamma: f64,
    #[serde(default)]
    pub beta: f64,
}

impl OptimalFamilyParams {
    pub fn new(gamma: f64, beta: f64) -> Result<Self> {
        let p = Self { gamma, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn with_gamma(gamma: f64) -> Result<Self> {
        Self::new(gamma, 0.0)
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::ParamOutOfRange {
                name: "gamma",
                value: self.gamma,
                expected: "0 ≤ γ ≤ 1",
            });
        }
        if !self.beta.is_finite() {
            return Err(Error::ParamOutOfRange {
                name: "beta",
                value: self.beta,
                expected: "finite phase",
            });
        }
        Ok(())
    }
}

/// `K₁ = (√(1+γ)|H⟩⟨H| + e^{iβ}√(1−γ)|V⟩⟨V|)/√2`,
/// `K₂ = (e^{iβ}√(1−γ)|H⟩⟨H| + √(1+γ)|V⟩⟨V|)/√2`.
///
/// The phase sits on the minor component of each Kraus operator, which is the
/// form the interferometer produces (up to a global phase per operator). The
/// induced channel scales coherences by `√(1−γ²)·cos β`.
pub fn make_optimal_instrument(p: OptimalFamilyParams) -> Result<Instrument> {
    p.validate()?;
    let major = FRAC_1_SQRT_2 * (1.0 + p.gamma).sqrt();
    let minor = FRAC_1_SQRT_2 * (1.0 - p.gamma).sqrt();
    let phased_minor = Complex64::from_polar(minor, p.beta);
    let k1 = CMat::from_diag([c(major, 0.0), phased_minor]);
    let k2 = CMat::from_diag([phased_minor, c(major, 0.0)]);
    Ok(Instrument { k1, k2 })
}

/// JSON description of an instrument, tagged by `family`.
///
/// Raw Kraus entries are `[re, im]` pairs in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum InstrumentDescriptor {
    Optimal(OptimalDescriptor),
    Diagonal(DiagonalDescriptor),
    Raw(RawDescriptor),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimalDescriptor {
    pub gamma: f64,
    #[serde(default)]
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagonalDescriptor {
    pub b1: f64,
    pub b2: f64,
    #[serde(default)]
    pub beta1: f64,
    #[serde(default)]
    pub beta2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDescriptor {
    pub k1: [[[f64; 2]; 2]; 2],
    pub k2: [[[f64; 2]; 2]; 2],
}

fn raw_to_mat(raw: &[[[f64; 2]; 2]; 2]) -> CMat2 {
    CMat(raw.map(|row| row.map(|[re, im]| C64::new(re, im))))
}

impl InstrumentDescriptor {
    pub fn build(&self) -> Result<Instrument> {
        match self {
            Self::Optimal(d) => make_optimal_instrument(OptimalFamilyParams::new(d.gamma, d.beta)?),
            Self::Diagonal(d) => {
                make_diagonal_instrument(DiagonalFamilyParams::new(d.b1, d.b2, d.beta1, d.beta2)?)
            }
            Self::Raw(d) => validate_instrument(raw_to_mat(&d.k1), raw_to_mat(&d.k2)),
        }
    }
}
