//! Simulated interferometer realization of the optimal family.
//!
//! The polarization qubit picks up `iσ_z` in arm `A` and nothing in arm `B`;
//! the path qubit starts in `cos α|A⟩ + e^{iφ} sin α|B⟩` and is read out in
//! the ports `⟨C| = (⟨A| + ⟨B|)/√2` and `⟨D| = (⟨A| − ⟨B|)/√2`. Port `C` is
//! outcome 1. Only port `C` is ever simulated: port `D` data at phase `φ` is
//! port `C` data at `φ + π`, as in a single-detector setup. Each `(θ, phase)`
//! pair draws from its own seeded random stream, so relabelling ports and
//! shifting the phase by `π` reproduces a dataset exactly.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::instruments::{povm_of, validate_instrument, Instrument};
use crate::measures::{measurement_error_closed_form, TradeoffPoint};
use crate::qmath::{c, trace_norm, CMat, CMat2};
use crate::states::{
    bloch_to_density, linear_pol_state, sm7_state_list, BlochVector, DensityMatrix,
    LinearPolarizationAngle,
};
use crate::supopt::{parabolic_refine, ExtremumEstimate};

/// Phase convention of the output beam splitter.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BeamSplitterConvention {
    /// Real symmetric second splitter; the `i` lives in the arm-`A` unitary.
    #[default]
    SymmetricReal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterferometerSetting {
    /// Path amplitude angle in radians, `0 ≤ α ≤ π/2`.
    pub alpha: f64,
    /// Relative path phase in radians.
    pub phi: f64,
    #[serde(default)]
    pub convention: BeamSplitterConvention,
}

impl InterferometerSetting {
    pub fn new(alpha: f64, phi: f64) -> Result<Self> {
        let s = Self {
            alpha,
            phi,
            convention: BeamSplitterConvention::SymmetricReal,
        };
        s.validate()?;
        Ok(s)
    }

    /// The `β = 0` setting with the given `γ ∈ [0, 1]`: `φ = π/2`,
    /// `α = (π − arcsin γ)/2`.
    pub fn for_gamma(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::ParamOutOfRange {
                name: "gamma",
                value: gamma,
                expected: "0 ≤ γ ≤ 1",
            });
        }
        Self::new(0.5 * (std::f64::consts::PI - gamma.asin()), std::f64::consts::FRAC_PI_2)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&self.alpha) {
            return Err(Error::ParamOutOfRange {
                name: "alpha",
                value: self.alpha,
                expected: "0 ≤ α ≤ π/2",
            });
        }
        if !self.phi.is_finite() {
            return Err(Error::ParamOutOfRange {
                name: "phi",
                value: self.phi,
                expected: "finite phase",
            });
        }
        Ok(())
    }

    fn shifted(&self, by: f64) -> Self {
        Self {
            phi: self.phi + by,
            ..*self
        }
    }
}

/// `γ = sin 2α sin φ` and `β = atan2(−sin 2α cos φ, −cos 2α)`, the relative
/// phase between the minor and major Kraus amplitudes.
pub fn gamma_beta_from_setting(s: &InterferometerSetting) -> (f64, f64) {
    let (s2a, c2a) = (2.0 * s.alpha).sin_cos();
    let (sp, cp) = s.phi.sin_cos();
    (s2a * sp, (-s2a * cp).atan2(-c2a))
}

/// Port-`C` Kraus operator `(i cos α σ_z + e^{iφ} sin α 𝟙)/√2`.
fn port_c_kraus(s: &InterferometerSetting) -> CMat2 {
    let arm_a = c(0.0, s.alpha.cos());
    let arm_b = Complex64::from_polar(s.alpha.sin(), s.phi);
    CMat::from_diag([
        (arm_a + arm_b) * FRAC_1_SQRT_2,
        (-arm_a + arm_b) * FRAC_1_SQRT_2,
    ])
}

/// `K_C = ⟨C|U|φ₀⟩`, `K_D = ⟨D|U|φ₀⟩`.
pub fn instrument_from_setting(s: &InterferometerSetting) -> Result<Instrument> {
    s.validate()?;
    let arm_a = c(0.0, s.alpha.cos());
    let arm_b = Complex64::from_polar(s.alpha.sin(), s.phi);
    let kd = CMat::from_diag([
        (arm_a - arm_b) * FRAC_1_SQRT_2,
        (-arm_a - arm_b) * FRAC_1_SQRT_2,
    ]);
    validate_instrument(port_c_kraus(s), kd)
}

/// Exact `(δ, Δ)` of the instrument a setting realizes.
pub fn analytic_tradeoff(s: &InterferometerSetting) -> Result<TradeoffPoint> {
    let ins = instrument_from_setting(s)?;
    // Diagonal Kraus operators scale the coherence by Σ_j K_j[0,0]·conj(K_j[1,1]).
    let coherence: Complex64 = ins.kraus().iter().map(|k| k[(0, 0)] * k[(1, 1)].conj()).sum();
    let (gamma, beta) = gamma_beta_from_setting(s);
    Ok(TradeoffPoint::new(
        measurement_error_closed_form(&povm_of(&ins)),
        0.5 * (c(1.0, 0.0) - coherence).norm(),
        "interferometer",
        [("alpha", s.alpha), ("phi", s.phi), ("gamma", gamma), ("beta", beta)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
    ))
}

/// Counts per analyzer basis: a positive integer, or `"exact"` for
/// expectation values at [`EXACT_SHOTS`] virtual shots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Shots {
    Count(u64),
    Exact(ExactShots),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExactShots {
    Exact,
}

/// Virtual shot count used by noiseless datasets; rounding error is below 1e-12.
pub const EXACT_SHOTS: u64 = 1 << 40;

impl Shots {
    pub fn per_basis(self) -> u64 {
        match self {
            Shots::Count(n) => n,
            Shots::Exact(_) => EXACT_SHOTS,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Shots::Exact(_))
    }
}

/// How the target measurement is fitted to the outcome-1 probabilities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetFit {
    /// `p₁(θ) = cos²((θ − θ₀)/2)`
    #[default]
    Offset,
    /// `p₁(θ) = ½(1 + v cos(θ − θ₀))`
    OffsetVisibility,
}

fn default_thetas() -> Vec<LinearPolarizationAngle> {
    sm7_state_list()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub alpha: f64,
    pub phi: f64,
    #[serde(default)]
    pub convention: BeamSplitterConvention,
    /// Probe polarization angles in degrees.
    #[serde(default = "default_thetas")]
    pub thetas: Vec<LinearPolarizationAngle>,
    pub shots: Shots,
    /// Relative standard deviation of the Gaussian intensity noise.
    #[serde(default)]
    pub intensity_noise: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub target_fit: TargetFit,
}

impl ExperimentConfig {
    pub fn new(setting: InterferometerSetting, shots: Shots, seed: u64) -> Self {
        Self {
            alpha: setting.alpha,
            phi: setting.phi,
            convention: setting.convention,
            thetas: sm7_state_list(),
            shots,
            intensity_noise: 0.0,
            seed,
            target_fit: TargetFit::Offset,
        }
    }

    pub fn setting(&self) -> InterferometerSetting {
        InterferometerSetting {
            alpha: self.alpha,
            phi: self.phi,
            convention: self.convention,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.setting().validate()?;
        if self.shots.per_basis() == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        if !(self.intensity_noise >= 0.0 && self.intensity_noise.is_finite()) {
            return Err(Error::ParamOutOfRange {
                name: "intensity_noise",
                value: self.intensity_noise,
                expected: "finite and ≥ 0",
            });
        }
        if self.thetas.is_empty() || self.thetas.iter().any(|t| !t.0.is_finite()) {
            return Err(Error::InvalidArgument("thetas must be a non-empty list of finite angles".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Port {
    C,
    D,
}

impl Port {
    pub fn other(self) -> Self {
        match self {
            Port::C => Port::D,
            Port::D => Port::C,
        }
    }
}

/// Pauli analyzer setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];
}

/// Counts for one `(θ, port, basis)` run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub theta_deg: f64,
    pub port: Port,
    pub basis: Basis,
    pub n_plus: u64,
    pub n_minus: u64,
    /// Total detected intensity at this port during the run.
    pub intensity: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulatedDataset {
    pub config: ExperimentConfig,
    pub records: Vec<CountRecord>,
}

impl SimulatedDataset {
    /// The same data with ports `C` and `D` relabelled.
    pub fn with_swapped_ports(&self) -> Self {
        let mut out = self.clone();
        for r in &mut out.records {
            r.port = r.port.other();
        }
        out
    }
}

/// Random stream for one port-`C` run, keyed by seed, probe angle and phase.
fn run_rng(seed: u64, theta: f64, phi: f64) -> ChaCha8Rng {
    // Quantize the phase so that φ and φ + 2π land on the same key.
    const STEPS: f64 = (1u64 << 40) as f64;
    let key = ((phi.rem_euclid(TAU) / TAU * STEPS).round() as u64) % (1u64 << 40);
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&theta.to_bits().to_le_bytes());
    bytes[16..24].copy_from_slice(&key.to_le_bytes());
    ChaCha8Rng::from_seed(bytes)
}

fn pauli(b: Basis) -> CMat2 {
    match b {
        Basis::X => CMat2::pauli_x(),
        Basis::Y => CMat2::pauli_y(),
        Basis::Z => CMat2::pauli_z(),
    }
}

fn binomial<R: rand::Rng>(rng: &mut R, n: u64, p: f64) -> u64 {
    Binomial::new(n, p.clamp(0.0, 1.0)).expect("p in [0, 1]").sample(rng)
}

/// Port-`C` records for one probe at the given setting.
fn simulate_port_c(
    cfg: &ExperimentConfig,
    setting: &InterferometerSetting,
    theta: LinearPolarizationAngle,
    label: Port,
) -> [CountRecord; 3] {
    let k = port_c_kraus(setting);
    let rho = linear_pol_state(theta);
    let unnormalized = k * *rho.mat() * k.adjoint();
    let p = unnormalized.trace().re.clamp(0.0, 1.0);
    let n = cfg.shots.per_basis();
    let mut rng = run_rng(cfg.seed, theta.degrees(), setting.phi);

    Basis::ALL.map(|basis| {
        // Branch expectation; an empty branch gives the maximally mixed state.
        let expectation = if p > 0.0 {
            (pauli(basis) * unnormalized).trace().re / p
        } else {
            0.0
        };
        let p_plus = (0.5 * (1.0 + expectation)).clamp(0.0, 1.0);
        let (n_plus, intensity) = if cfg.shots.is_exact() {
            (
                (p_plus * n as f64).round() as u64,
                (p * n as f64).round() as u64,
            )
        } else {
            let n_plus = binomial(&mut rng, n, p_plus);
            let clicks = binomial(&mut rng, n, p) as f64;
            let g: f64 = StandardNormal.sample(&mut rng);
            let noisy = (clicks * (1.0 + cfg.intensity_noise * g)).round().max(0.0);
            (n_plus, noisy as u64)
        };
        CountRecord {
            theta_deg: theta.degrees(),
            port: label,
            basis,
            n_plus,
            n_minus: n - n_plus,
            intensity,
        }
    })
}

/// Simulates three-basis tomography and intensity readout at both ports for
/// every probe angle. Deterministic given the config.
pub fn simulate_dataset(cfg: &ExperimentConfig) -> Result<SimulatedDataset> {
    cfg.validate()?;
    let setting = cfg.setting();
    let mut records = Vec::with_capacity(cfg.thetas.len() * 6);
    for &theta in &cfg.thetas {
        records.extend(simulate_port_c(cfg, &setting, theta, Port::C));
        records.extend(simulate_port_c(cfg, &setting.shifted(std::f64::consts::PI), theta, Port::D));
    }
    Ok(SimulatedDataset {
        config: cfg.clone(),
        records,
    })
}

/// Tomographic estimate for one probe angle.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchEstimate {
    pub theta: LinearPolarizationAngle,
    /// Estimated outcome probabilities `(p̂_C, p̂_D)`.
    pub probabilities: (f64, f64),
    /// Post-measurement states for ports `C` and `D`.
    pub branch_states: (DensityMatrix, DensityMatrix),
    /// `Σ_j p̂_j ρ̂_j`
    pub channel_output: DensityMatrix,
}

/// Linear-inversion Bloch vector, projected onto the ball if it lands outside
/// (for a qubit this is eigenvalue truncation and renormalization).
fn invert_pauli(counts: [(u64, u64); 3], theta_deg: f64) -> Result<DensityMatrix> {
    let mut r = [0.0; 3];
    for (i, &(plus, minus)) in counts.iter().enumerate() {
        let total = plus + minus;
        if total == 0 {
            return Err(Error::InsufficientCounts {
                theta_deg,
                detail: format!("no shots in basis {:?}", Basis::ALL[i]),
            });
        }
        r[i] = (plus as f64 - minus as f64) / total as f64;
    }
    let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    if norm > 1.0 {
        r.iter_mut().for_each(|x| *x /= norm);
    }
    bloch_to_density(BlochVector::new(r[0], r[1], r[2]))
}

/// Per-probe branch states, probabilities and channel outputs, in the order
/// of the config's `thetas`.
pub fn reconstruct_branch_states(d: &SimulatedDataset) -> Result<Vec<BranchEstimate>> {
    let mut out = Vec::with_capacity(d.config.thetas.len());
    for &theta in &d.config.thetas {
        let mut states = Vec::with_capacity(2);
        let mut intensities = [0u64; 2];
        for (slot, port) in [Port::C, Port::D].into_iter().enumerate() {
            let mut counts = [(0u64, 0u64); 3];
            let mut seen = [false; 3];
            for r in d.records.iter().filter(|r| r.theta_deg == theta.degrees() && r.port == port) {
                let i = r.basis as usize;
                counts[i].0 += r.n_plus;
                counts[i].1 += r.n_minus;
                seen[i] = true;
                intensities[slot] += r.intensity;
            }
            if let Some(i) = seen.iter().position(|s| !s) {
                return Err(Error::InsufficientCounts {
                    theta_deg: theta.degrees(),
                    detail: format!("port {port:?} has no basis {:?} record", Basis::ALL[i]),
                });
            }
            states.push(invert_pauli(counts, theta.degrees())?);
        }
        let total = intensities[0] + intensities[1];
        if total == 0 {
            return Err(Error::InsufficientCounts {
                theta_deg: theta.degrees(),
                detail: "zero total intensity".into(),
            });
        }
        let pc = intensities[0] as f64 / total as f64;
        let output = states[0].mix(&states[1], pc);
        out.push(BranchEstimate {
            theta,
            probabilities: (pc, 1.0 - pc),
            branch_states: (states[0], states[1]),
            channel_output: output,
        });
    }
    Ok(out)
}

/// Fitted target measurement `p₁(θ) = ½(1 + v cos(θ − θ₀))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetFitResult {
    pub offset_deg: f64,
    pub visibility: f64,
}

impl TargetFitResult {
    pub fn p1(&self, theta: LinearPolarizationAngle) -> f64 {
        0.5 * (1.0 + self.visibility * (theta.radians() - self.offset_deg.to_radians()).cos())
    }
}

/// Fits the target curve to `(θ, p̂₁)` samples.
///
/// The offset always comes from the linear least-squares fit of
/// `½(1 + v cos(θ − θ₀))`, with `v` as a nuisance parameter; [`TargetFit::Offset`]
/// then keeps the ideal visibility `v = 1`. Fitting `θ₀` alone against
/// `cos²((θ − θ₀)/2)` has a spurious optimum for weakly measuring instruments
/// on clustered probe sets.
pub fn fit_target(samples: &[(LinearPolarizationAngle, f64)], mode: TargetFit) -> TargetFitResult {
    // With v free the model is linear in (v cos θ₀, v sin θ₀).
    let (mut scc, mut sss, mut scs, mut yc, mut ys) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(t, p) in samples {
        let (s, c) = t.radians().sin_cos();
        let y = 2.0 * p - 1.0;
        scc += c * c;
        sss += s * s;
        scs += c * s;
        yc += y * c;
        ys += y * s;
    }
    let det = scc * sss - scs * scs;
    let (a, b) = if det.abs() > 1e-12 {
        ((yc * sss - ys * scs) / det, (ys * scc - yc * scs) / det)
    } else {
        (yc, ys)
    };
    let offset_deg = b.atan2(a).to_degrees();
    let visibility = match mode {
        TargetFit::Offset => 1.0,
        TargetFit::OffsetVisibility => (a * a + b * b).sqrt(),
    };
    TargetFitResult {
        offset_deg,
        visibility,
    }
}

/// δ contribution of one probe: `½ Σ_j |p̂_j − p_j|` against the target.
pub fn delta_integrand(p1_hat: f64, target: &TargetFitResult, theta: LinearPolarizationAngle) -> f64 {
    (p1_hat - target.p1(theta)).abs()
}

/// Noiseless δ contribution of an instrument at probe `θ` against the ideal target.
pub fn analytic_delta_integrand(ins: &Instrument, theta: LinearPolarizationAngle) -> f64 {
    let (p1, _) = povm_of(ins).probabilities(&linear_pol_state(theta));
    delta_integrand(
        p1,
        &TargetFitResult {
            offset_deg: 0.0,
            visibility: 1.0,
        },
        theta,
    )
}

/// Δ contribution of one probe: `½‖ρ_out − ρ_in‖₁`.
pub fn disturbance_integrand(output: &DensityMatrix, theta: LinearPolarizationAngle) -> f64 {
    0.5 * trace_norm(&(*output.mat() - *linear_pol_state(theta).mat())).expect("Hermitian")
}

/// Noiseless Δ contribution of an instrument at probe `θ`.
pub fn analytic_disturbance_integrand(ins: &Instrument, theta: LinearPolarizationAngle) -> f64 {
    disturbance_integrand(&ins.apply(&linear_pol_state(theta)), theta)
}

/// Estimated tradeoff point with the fit diagnostics behind it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatedTradeoff {
    pub delta_hat: f64,
    #[serde(rename = "Delta_hat")]
    pub disturbance_hat: f64,
    pub target: TargetFitResult,
    pub delta_argmax_deg: f64,
    #[serde(rename = "Delta_argmax_deg")]
    pub disturbance_argmax_deg: f64,
    /// Parabola through the δ samples within ±20° of the maximizing probe.
    pub delta_parabola: Option<ExtremumEstimate>,
    #[serde(rename = "Delta_parabola")]
    pub disturbance_parabola: Option<ExtremumEstimate>,
}

/// Samples `(θ, y)` within `window` degrees (mod 360) of `center`, unwrapped
/// so that the abscissae are contiguous around `center`.
fn window_around(samples: &[(f64, f64)], center: f64, window: f64) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = samples
        .iter()
        .filter_map(|&(t, y)| {
            let d = (t - center + 180.0).rem_euclid(360.0) - 180.0;
            (d.abs() <= window + 1e-9).then_some((center + d, y))
        })
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-9);
    pts
}

/// Half-width in degrees of the parabolic window around an extremum.
pub const PARABOLA_WINDOW_DEG: f64 = 20.0;

fn max_with_parabola(samples: &[(f64, f64)]) -> (f64, f64, Option<ExtremumEstimate>) {
    let (arg, value) = samples
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty sample list");
    // Isolated probes have no neighbours to fit through; fall back to the
    // highest sample that has.
    let mut order: Vec<&(f64, f64)> = samples.iter().collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1));
    let parabola = order
        .into_iter()
        .find_map(|&(t, _)| parabolic_refine(&window_around(samples, t, PARABOLA_WINDOW_DEG)).ok());
    (value, arg, parabola)
}

fn estimate_from_branches(d: &SimulatedDataset, branches: &[BranchEstimate]) -> EstimatedTradeoff {
    let p1: Vec<(LinearPolarizationAngle, f64)> =
        branches.iter().map(|b| (b.theta, b.probabilities.0)).collect();
    let target = fit_target(&p1, d.config.target_fit);
    let delta_samples: Vec<(f64, f64)> = p1
        .iter()
        .map(|&(t, p)| (t.degrees(), delta_integrand(p, &target, t)))
        .collect();
    let dist_samples: Vec<(f64, f64)> = branches
        .iter()
        .map(|b| (b.theta.degrees(), disturbance_integrand(&b.channel_output, b.theta)))
        .collect();
    let (delta_hat, delta_arg, delta_parabola) = max_with_parabola(&delta_samples);
    let (dist_hat, dist_arg, dist_parabola) = max_with_parabola(&dist_samples);
    EstimatedTradeoff {
        delta_hat,
        disturbance_hat: dist_hat,
        target,
        delta_argmax_deg: delta_arg,
        disturbance_argmax_deg: dist_arg,
        delta_parabola,
        disturbance_parabola: dist_parabola,
    }
}

/// δ̂: the largest deviation of `p̂₁(θ)` from the fitted target.
pub fn estimate_delta(d: &SimulatedDataset) -> Result<EstimatedTradeoff> {
    estimate_tradeoff(d)
}

/// Δ̂: the largest half trace distance between reconstructed output and probe.
pub fn estimate_disturbance(d: &SimulatedDataset) -> Result<EstimatedTradeoff> {
    estimate_tradeoff(d)
}

/// Both estimates from one reconstruction.
pub fn estimate_tradeoff(d: &SimulatedDataset) -> Result<EstimatedTradeoff> {
    let branches = reconstruct_branch_states(d)?;
    Ok(estimate_from_branches(d, &branches))
}
