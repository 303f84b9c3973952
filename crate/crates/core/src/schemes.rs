//! Reference schemes: the optimal universal asymmetric 1→2 cloner and the
//! coherent partial swap, each followed by the ideal measurement on the
//! second output.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::instruments::Povm;
use crate::measures::TradeoffPoint;
use crate::qmath::{c, partial_trace, tensor, CMat2, CMat4, Subsystem};
use crate::states::DensityMatrix;

pub const CLONER_CONSTRAINT_TOL: f64 = 1e-10;

/// Cloner amplitudes with `a₁² + a₂² + a₁a₂ = 1`, both non-negative.
///
/// `a₁` controls the noise on the kept copy, `a₂` the noise on the measured one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClonerParams {
    a1: f64,
    a2: f64,
}

impl ClonerParams {
    pub fn new(a1: f64, a2: f64) -> Result<Self> {
        for (name, v) in [("a1", a1), ("a2", a2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::ParamOutOfRange {
                    name,
                    value: v,
                    expected: "0 ≤ a ≤ 1",
                });
            }
        }
        let defect = a1 * a1 + a2 * a2 + a1 * a2 - 1.0;
        if defect.abs() > CLONER_CONSTRAINT_TOL {
            return Err(Error::ParamOutOfRange {
                name: "a1",
                value: a1,
                expected: "a₁² + a₂² + a₁a₂ = 1",
            });
        }
        Ok(Self { a1, a2 })
    }

    /// Solves the constraint for the non-negative `a₁`.
    pub fn from_a2(a2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a2) {
            return Err(Error::ParamOutOfRange {
                name: "a2",
                value: a2,
                expected: "0 ≤ a₂ ≤ 1",
            });
        }
        // Roots of a₁² + a₂a₁ + (a₂² − 1) = 0; the other root is ≤ 0.
        let a1 = 0.5 * (-a2 + (4.0 - 3.0 * a2 * a2).sqrt());
        Ok(Self { a1: a1.max(0.0), a2 })
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }
}

/// Partial swap `e^{itF}` with `a₁ = sin t`, `a₂ = cos t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwapParams {
    t: f64,
}

impl SwapParams {
    pub fn new(t: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&t) {
            return Err(Error::ParamOutOfRange {
                name: "t",
                value: t,
                expected: "0 ≤ t ≤ π/2",
            });
        }
        Ok(Self { t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn a1(&self) -> f64 {
        self.t.sin()
    }

    pub fn a2(&self) -> f64 {
        self.t.cos()
    }
}

/// `T(ρ) = w·σ·tr ρ + (1 − w)·ρ`: partial replacement by a fixed state `σ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarginalChannelSpec {
    weight: f64,
    replacement: DensityMatrix,
}

impl MarginalChannelSpec {
    pub fn new(weight: f64, replacement: DensityMatrix) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::ParamOutOfRange {
                name: "weight",
                value: weight,
                expected: "0 ≤ w ≤ 1",
            });
        }
        Ok(Self {
            weight,
            replacement,
        })
    }

    pub fn depolarizing(weight: f64) -> Result<Self> {
        Self::new(weight, DensityMatrix::maximally_mixed())
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn replacement(&self) -> &DensityMatrix {
        &self.replacement
    }
}

impl Channel for MarginalChannelSpec {
    fn apply_op(&self, m: &CMat2) -> CMat2 {
        self.replacement.mat().scale(m.trace() * self.weight) + m.scale_re(1.0 - self.weight)
    }
}

/// `(a₂𝟙 + a₁F)(ρ ⊗ 𝟙/2)(a₂𝟙 + a₁F)`; the first factor is the kept copy.
pub fn cloner_channel(p: ClonerParams, rho: &DensityMatrix) -> CMat4 {
    let k = CMat4::identity().scale_re(p.a2) + CMat4::flip().scale_re(p.a1);
    let input = tensor(rho.mat(), DensityMatrix::maximally_mixed().mat());
    k * input * k
}

/// The kept-copy channel `T_s` (weight `a₁²`) and measured-copy channel `T_s′` (weight `a₂²`).
pub fn cloner_marginal_channels(p: ClonerParams) -> (MarginalChannelSpec, MarginalChannelSpec) {
    let mixed = DensityMatrix::maximally_mixed();
    (
        MarginalChannelSpec {
            weight: p.a1 * p.a1,
            replacement: mixed,
        },
        MarginalChannelSpec {
            weight: p.a2 * p.a2,
            replacement: mixed,
        },
    )
}

/// `(T_s(ρ), T_s′(ρ))`
pub fn cloner_marginals(p: ClonerParams, rho: &DensityMatrix) -> (DensityMatrix, DensityMatrix) {
    let (ts, tm) = cloner_marginal_channels(p);
    (ts.apply(rho), tm.apply(rho))
}

/// Closed form: `δ = a₂²/2`, `Δ = a₁²/2`.
pub fn cloner_tradeoff_point(p: ClonerParams) -> TradeoffPoint {
    TradeoffPoint::new(
        0.5 * p.a2 * p.a2,
        0.5 * p.a1 * p.a1,
        "cloner",
        BTreeMap::from([("a1".to_string(), p.a1), ("a2".to_string(), p.a2)]),
    )
}

/// `e^{itF} = cos t·𝟙 + i sin t·F`
pub fn swap_unitary(p: SwapParams) -> CMat4 {
    CMat4::identity().scale_re(p.a2()) + CMat4::flip().scale(c(0.0, p.a1()))
}

/// Two-qubit output of the partial swap on `ρ ⊗ ρ̃`.
pub fn swap_channel(p: SwapParams, ancilla: &DensityMatrix, rho: &DensityMatrix) -> CMat4 {
    let u = swap_unitary(p);
    u * tensor(rho.mat(), ancilla.mat()) * u.adjoint()
}

/// `(T_s(ρ), T_s′(ρ))` from exact partial traces of the swap output.
///
/// For `ρ̃ = 𝟙/2` these are `a₁²ρ̃ + a₂²ρ` and `a₂²ρ̃ + a₁²ρ`; other ancillas
/// add the coherent term `±i·a₁a₂[ρ̃, ρ]`.
pub fn swap_marginals(
    p: SwapParams,
    ancilla: &DensityMatrix,
    rho: &DensityMatrix,
) -> (DensityMatrix, DensityMatrix) {
    let out = swap_channel(p, ancilla, rho);
    (
        DensityMatrix::from_channel_output(partial_trace(&out, Subsystem::Second)),
        DensityMatrix::from_channel_output(partial_trace(&out, Subsystem::First)),
    )
}

/// Swap marginals with the maximally mixed ancilla, as channels.
pub fn swap_marginal_channels(p: SwapParams) -> (MarginalChannelSpec, MarginalChannelSpec) {
    let mixed = DensityMatrix::maximally_mixed();
    let a1sq = p.a1() * p.a1();
    (
        MarginalChannelSpec {
            weight: a1sq,
            replacement: mixed,
        },
        MarginalChannelSpec {
            weight: 1.0 - a1sq,
            replacement: mixed,
        },
    )
}

/// Closed form with ancilla `𝟙/2`: `δ = (1 − a₁²)/2`, `Δ = a₁²/2`.
pub fn swap_tradeoff_point(p: SwapParams) -> TradeoffPoint {
    let a1sq = p.a1() * p.a1();
    TradeoffPoint::new(
        0.5 * (1.0 - a1sq),
        0.5 * a1sq,
        "swap",
        BTreeMap::from([("t".to_string(), p.t)]),
    )
}

/// POVM seen through a channel: `E′_j = T*(|j⟩⟨j|)`, built entrywise from
/// `(E′)_{ik} = tr(|j⟩⟨j| T(|k⟩⟨i|))`.
pub fn induced_povm<C: Channel + ?Sized>(channel: &C) -> Result<Povm> {
    let mut e1 = CMat2::zero();
    for i in 0..2 {
        for k in 0..2 {
            e1[(i, k)] = channel.apply_op(&CMat2::unit(k, i))[(0, 0)];
        }
    }
    Povm::from_first(e1.hermitian_part())
}

/// Lower boundary `½(√(1−δ) − √δ)²` for `δ ≤ ½`, zero beyond.
pub fn optimal_frontier(delta: f64) -> f64 {
    if delta >= 0.5 {
        return 0.0;
    }
    let d = delta.max(0.0);
    0.5 * ((1.0 - d).sqrt() - d.sqrt()).powi(2)
}

/// Cloner curve `¼(√(2−3δ) − √δ)²` for `δ ≤ ½`, zero beyond.
pub fn cloner_curve(delta: f64) -> f64 {
    if delta >= 0.5 {
        return 0.0;
    }
    let d = delta.max(0.0);
    0.25 * ((2.0 - 3.0 * d).sqrt() - d.sqrt()).powi(2)
}

/// Swap line `½ − δ` for `δ ≤ ½`, zero beyond.
pub fn swap_line(delta: f64) -> f64 {
    (0.5 - delta).max(0.0)
}
