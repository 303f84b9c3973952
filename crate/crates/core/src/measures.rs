//! Measurement error δ and the disturbance measures.
//!
//! The target measurement is always the computational projective measurement
//! `{|1⟩⟨1|, |2⟩⟨2|}`. All worst-case quantities are suprema of convex
//! functions of the input, so they are searched over pure states only.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{apply_on_first, Channel, Conjugated, Mixture};
use crate::error::{Error, Result};
use crate::instruments::{
    make_diagonal_instrument, povm_of, DiagonalFamilyParams, Instrument, Povm,
};
use crate::qmath::{c, operator_norm, trace_norm, CMat2, CMat4};
use crate::random::{haar_unitary, random_instrument, random_povm};
use crate::states::{bloch_to_density, BlochVector};
use crate::supopt::{
    maximize_over_bipartite_pure_states, maximize_over_pure_states,
    ExtremumEstimate, SupremumStrategy,
};

/// One point of a tradeoff diagram.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    #[serde(rename = "delta")]
    pub measurement_error: f64,
    #[serde(rename = "Delta")]
    pub disturbance: f64,
    pub tag: PointTag,
}

/// Which family or scheme produced a point, and with which parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointTag {
    pub scheme: String,
    pub params: BTreeMap<String, f64>,
}

impl TradeoffPoint {
    pub fn new(
        measurement_error: f64,
        disturbance: f64,
        scheme: &str,
        params: BTreeMap<String, f64>,
    ) -> Self {
        Self {
            measurement_error,
            disturbance,
            tag: PointTag {
                scheme: scheme.to_string(),
                params,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    /// `½ sup_ρ ‖T(ρ) − ρ‖₁`
    WorstCaseTraceNorm,
    /// `½ sup_ξ ‖((T − id) ⊗ id)(ξ)‖₁`
    Diamond,
    /// `(1/√2) sup_ρ ‖T(ρ) − ρ‖₂`; the scale makes it agree with the trace
    /// norm measure on qubits.
    WorstCaseHilbertSchmidt,
    /// `sup_ρ (1 − F(ρ, T(ρ))²)` with the root fidelity `F`.
    WorstCaseInfidelity,
    /// `½ ∫ ‖T(ρ) − ρ‖₁ dρ` over uniformly distributed pure states.
    StateAveragedTraceNorm,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 5] = [
        Self::WorstCaseTraceNorm,
        Self::Diamond,
        Self::WorstCaseHilbertSchmidt,
        Self::WorstCaseInfidelity,
        Self::StateAveragedTraceNorm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::WorstCaseTraceNorm => "worst-case-trace-norm",
            Self::Diamond => "diamond",
            Self::WorstCaseHilbertSchmidt => "worst-case-hilbert-schmidt",
            Self::WorstCaseInfidelity => "worst-case-infidelity",
            Self::StateAveragedTraceNorm => "state-averaged-trace-norm",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    /// Accepts the kebab-case names and the short forms `trace`, `hs`,
    /// `infidelity` and `averaged`.
    fn from_str(s: &str) -> Result<Self> {
        let kind = match s.trim().to_ascii_lowercase().as_str() {
            "worst-case-trace-norm" | "trace-norm" | "trace" => Self::WorstCaseTraceNorm,
            "diamond" => Self::Diamond,
            "worst-case-hilbert-schmidt" | "hilbert-schmidt" | "hs" => Self::WorstCaseHilbertSchmidt,
            "worst-case-infidelity" | "infidelity" => Self::WorstCaseInfidelity,
            "state-averaged-trace-norm" | "averaged" => Self::StateAveragedTraceNorm,
            _ => return Err(Error::UnknownKind(s.to_string())),
        };
        Ok(kind)
    }
}

/// Distribution over states used by the averaged measure.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AveragingMeasure {
    /// Uniform on the Bloch sphere (pure states).
    #[default]
    Surface,
    /// Uniform in the Bloch ball.
    Volume,
}

/// Nodes per angle of the averaging quadrature.
pub const AVERAGING_NODES: usize = 128;

fn delta_objective(povm: &Povm) -> CMat2 {
    *povm.e1() - CMat2::unit(0, 0)
}

/// Worst-case total variation distance to the target, by numeric supremum.
/// `argmax` holds the Bloch angles of a worst-case input.
pub fn measurement_error_estimate(povm: &Povm, s: &SupremumStrategy) -> ExtremumEstimate {
    // Outcome probabilities sum to one, so both terms of the variation are equal.
    let d = delta_objective(povm);
    maximize_over_pure_states(|rho| (d * *rho.mat()).trace().re.abs(), s)
}

pub fn measurement_error(povm: &Povm, s: &SupremumStrategy) -> f64 {
    measurement_error_estimate(povm, s).value
}

/// Exact δ: the operator norm `‖E′₁ − |1⟩⟨1|‖`. For a diagonal POVM
/// `E′₁ = diag(1 − b₂², b₁²)` this is `max(b₁², b₂²)`.
pub fn measurement_error_closed_form(povm: &Povm) -> f64 {
    operator_norm(&delta_objective(povm)).expect("POVM elements are Hermitian")
}

fn half_trace_distance(a: &CMat2, b: &CMat2) -> f64 {
    0.5 * trace_norm(&(*a - *b).hermitian_part()).expect("Hermitian by construction")
}

/// Numeric disturbance of a channel, with the maximizer where one exists.
///
/// For the single-qubit kinds `argmax` holds Bloch angles `[θ, φ]`; for the
/// diamond kind the six angles of [`crate::supopt::bipartite_vector`]; the averaged kind
/// returns an empty `argmax`.
pub fn disturbance_estimate<C: Channel + ?Sized>(
    channel: &C,
    kind: MeasureKind,
    s: &SupremumStrategy,
) -> ExtremumEstimate {
    match kind {
        MeasureKind::WorstCaseTraceNorm => maximize_over_pure_states(
            |rho| half_trace_distance(channel.apply(rho).mat(), rho.mat()),
            s,
        ),
        MeasureKind::WorstCaseHilbertSchmidt => maximize_over_pure_states(
            |rho| FRAC_1_SQRT_2 * (*channel.apply(rho).mat() - *rho.mat()).frobenius_norm(),
            s,
        ),
        MeasureKind::WorstCaseInfidelity => maximize_over_pure_states(
            // For pure ρ, F(ρ, σ)² = tr(ρσ).
            |rho| 1.0 - (*rho.mat() * *channel.apply(rho).mat()).trace().re,
            s,
        ),
        MeasureKind::Diamond => maximize_over_bipartite_pure_states(
            |v| {
                let xi = CMat4::outer(v, v);
                let diff = apply_on_first(channel, &xi) - xi;
                0.5 * trace_norm(&diff.hermitian_part()).expect("Hermitian by construction")
            },
            s,
        ),
        MeasureKind::StateAveragedTraceNorm => ExtremumEstimate {
            argmax: Vec::new(),
            value: state_averaged_trace_norm(channel, AveragingMeasure::Surface, AVERAGING_NODES),
            certified_gap: 0.0,
        },
    }
}

pub fn disturbance<C: Channel + ?Sized>(channel: &C, kind: MeasureKind, s: &SupremumStrategy) -> f64 {
    disturbance_estimate(channel, kind, s).value
}

/// `½ ∫ ‖T(ρ) − ρ‖₁` under the chosen state distribution, by midpoint
/// quadrature with `nodes` points per coordinate.
pub fn state_averaged_trace_norm<C: Channel + ?Sized>(
    channel: &C,
    measure: AveragingMeasure,
    nodes: usize,
) -> f64 {
    let nodes = nodes.max(2);
    let radial: Vec<(f64, f64)> = match measure {
        AveragingMeasure::Surface => vec![(1.0, 1.0)],
        // Density 3r² dr on [0, 1].
        AveragingMeasure::Volume => (0..nodes)
            .map(|k| {
                let r = (k as f64 + 0.5) / nodes as f64;
                (r, 3.0 * r * r / nodes as f64)
            })
            .collect(),
    };
    let dtheta = PI / nodes as f64;
    let dphi = TAU / nodes as f64;
    let mut total = 0.0;
    for &(r, wr) in &radial {
        for i in 0..nodes {
            let theta = (i as f64 + 0.5) * dtheta;
            // Surface element sin θ dθ dφ / 4π.
            let wt = theta.sin() * dtheta * dphi / (4.0 * PI);
            for j in 0..nodes {
                let n = BlochVector::from_angles(theta, (j as f64 + 0.5) * dphi);
                let rho = bloch_to_density(BlochVector::new(r * n.x, r * n.y, r * n.z))
                    .expect("inside the ball");
                total += wr * wt * half_trace_distance(channel.apply(&rho).mat(), rho.mat());
            }
        }
    }
    total
}

/// `½|1 − e^{iβ₁}b₁√(1−b₂²) − e^{iβ₂}b₂√(1−b₁²)|`
pub fn diagonal_disturbance_closed_form(p: DiagonalFamilyParams) -> f64 {
    let coherence = c(p.b1 * (1.0 - p.b2 * p.b2).sqrt(), 0.0) * c(0.0, p.beta1).exp()
        + c(p.b2 * (1.0 - p.b1 * p.b1).sqrt(), 0.0) * c(0.0, p.beta2).exp();
    0.5 * (c(1.0, 0.0) - coherence).norm()
}

/// Numeric `(δ, Δ)` of an instrument.
pub fn tradeoff_of(ins: &Instrument, kind: MeasureKind, s: &SupremumStrategy) -> Result<TradeoffPoint> {
    s.validate()?;
    Ok(TradeoffPoint::new(
        measurement_error(&povm_of(ins), s),
        disturbance(ins, kind, s),
        "instrument",
        BTreeMap::new(),
    ))
}

/// Closed-form `(δ, Δ)` of a diagonal-family instrument.
pub fn diagonal_tradeoff_closed_form(p: DiagonalFamilyParams) -> Result<TradeoffPoint> {
    let ins = make_diagonal_instrument(p)?;
    Ok(TradeoffPoint::new(
        measurement_error_closed_form(&povm_of(&ins)),
        diagonal_disturbance_closed_form(p),
        "diagonal",
        BTreeMap::from([
            ("b1".to_string(), p.b1),
            ("b2".to_string(), p.b2),
            ("beta1".to_string(), p.beta1),
            ("beta2".to_string(), p.beta2),
        ]),
    ))
}

/// Outcome of one axiom spot-check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub name: String,
    pub trials: usize,
    /// Largest amount by which the axiom failed; zero if it never did.
    pub worst_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn worst_violation(&self) -> f64 {
        self.checks.iter().map(|c| c.worst_violation).fold(0.0, f64::max)
    }
}

/// Tolerance applied to every axiom check.
pub const AXIOM_TOL: f64 = 1e-6;

/// Spot-checks convexity, permutation and diagonal-unitary invariance of δ,
/// and convexity and basis independence of Δ (worst-case trace norm), with
/// `samples` random trials per axiom. All suprema are numeric.
pub fn check_measure_axioms<R: Rng + ?Sized>(
    samples: usize,
    rng: &mut R,
    s: &SupremumStrategy,
) -> Result<AxiomReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("axiom check needs at least one sample".into()));
    }
    s.validate()?;
    let delta = |p: &Povm| measurement_error(p, s);
    let big_delta = |ch: &dyn Channel| disturbance(ch, MeasureKind::WorstCaseTraceNorm, s);

    let mut worst = [0.0f64; 5];
    for _ in 0..samples {
        let (m, m2) = (random_povm(rng), random_povm(rng));
        let lambda: f64 = rng.random();
        let mixed = delta(&m.mix(&m2, lambda));
        worst[0] = worst[0].max(mixed - lambda * delta(&m) - (1.0 - lambda) * delta(&m2));

        let dm = delta(&m);
        worst[1] = worst[1].max((delta(&m.permuted()) - dm).abs());

        let diag = CMat2::from_diag([
            c(0.0, rng.random_range(0.0..TAU)).exp(),
            c(0.0, rng.random_range(0.0..TAU)).exp(),
        ]);
        worst[2] = worst[2].max((delta(&m.conjugated(&diag)) - dm).abs());

        let (a, b) = (random_instrument(rng), random_instrument(rng));
        let lambda: f64 = rng.random();
        let mix = Mixture {
            first: a,
            second: b,
            weight: lambda,
        };
        let da = big_delta(&a);
        worst[3] = worst[3].max(big_delta(&mix) - lambda * da - (1.0 - lambda) * big_delta(&b));

        let rotated = Conjugated {
            inner: a,
            unitary: haar_unitary(rng),
        };
        worst[4] = worst[4].max((big_delta(&rotated) - da).abs());
    }

    let names = [
        "delta convexity",
        "delta permutation invariance",
        "delta diagonal-unitary invariance",
        "Delta convexity",
        "Delta basis independence",
    ];
    Ok(AxiomReport {
        checks: names
            .iter()
            .zip(worst)
            .map(|(name, w)| AxiomCheck {
                name: name.to_string(),
                trials: samples,
                worst_violation: w.max(0.0),
                tolerance: AXIOM_TOL,
                passed: w < AXIOM_TOL,
            })
            .collect(),
    })
}
