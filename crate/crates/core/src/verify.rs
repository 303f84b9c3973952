//! Self-verification suite: closed forms against numeric suprema, the
//! dominance ordering of the three schemes, the axioms of the measures, and
//! closure of the simulated experiment.

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiment::{
    analytic_delta_integrand, analytic_disturbance_integrand, analytic_tradeoff, estimate_tradeoff,
    simulate_dataset, ExactShots, ExperimentConfig, InterferometerSetting, Shots,
};
use crate::instruments::{make_diagonal_instrument, make_optimal_instrument, povm_of, OptimalFamilyParams};
use crate::measures::{
    check_measure_axioms, diagonal_tradeoff_closed_form, disturbance, measurement_error, MeasureKind,
};
use crate::random::random_diagonal_params;
use crate::schemes::{
    cloner_curve, cloner_marginal_channels, cloner_tradeoff_point, induced_povm, optimal_frontier,
    swap_line, swap_marginal_channels, swap_tradeoff_point, ClonerParams, SwapParams,
};
use crate::states::LinearPolarizationAngle;
use crate::supopt::SupremumStrategy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyLevel {
    Quick,
    Full,
}

/// Result of one check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Largest deviation found, in the units of `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub level: VerifyLevel,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn timed(name: &str, tolerance: f64, f: impl FnOnce() -> Result<(f64, bool, String)>) -> CheckOutcome {
    let start = Instant::now();
    let (worst, passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (f64::INFINITY, false, format!("error: {e}")),
    };
    CheckOutcome {
        name: name.to_string(),
        passed,
        worst,
        tolerance,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn grid(points: usize) -> impl Iterator<Item = f64> {
    let n = points.max(2) - 1;
    (0..=n).map(move |i| i as f64 / n as f64)
}

fn optimal(gamma: f64) -> crate::instruments::Instrument {
    make_optimal_instrument(OptimalFamilyParams::with_gamma(gamma).expect("γ in [0, 1]"))
        .expect("valid parameters")
}

/// Numeric `(δ, Δ)` of `points` optimal instruments lie on `frontier`.
pub fn check_frontier(points: usize, frontier: &dyn Fn(f64) -> f64, s: &SupremumStrategy) -> CheckOutcome {
    timed("frontier reproduction", 1e-6, || {
        let mut worst = 0.0f64;
        for gamma in grid(points) {
            let ins = optimal(gamma);
            let d = measurement_error(&povm_of(&ins), s);
            let dd = disturbance(&ins, MeasureKind::WorstCaseTraceNorm, s);
            worst = worst.max((dd - frontier(d)).abs()).max((d - 0.5 * (1.0 - gamma)).abs());
        }
        Ok((worst, worst < 1e-6, format!("{points} optimal instruments")))
    })
}

/// Cloner closed form against numeric suprema of its marginal channels, plus
/// the spot value at `δ = 1/4`.
pub fn check_cloner(points: usize, s: &SupremumStrategy) -> CheckOutcome {
    timed("cloner curve", 1e-6, || {
        let mut worst = 0.0f64;
        for a2 in grid(points) {
            let p = ClonerParams::from_a2(a2)?;
            let closed = cloner_tradeoff_point(p);
            let (kept, measured) = cloner_marginal_channels(p);
            let d = measurement_error(&induced_povm(&measured)?, s);
            let dd = disturbance(&kept, MeasureKind::WorstCaseTraceNorm, s);
            worst = worst
                .max((d - closed.measurement_error).abs())
                .max((dd - closed.disturbance).abs())
                .max((cloner_curve(closed.measurement_error) - closed.disturbance).abs());
        }
        let spot = cloner_curve(0.25);
        let spot_dev = (spot - 0.095492).abs();
        let passed = worst < 1e-6 && spot_dev <= 1e-6;
        Ok((
            worst.max(spot_dev),
            passed,
            format!("{points} cloners; curve(0.25) = {spot:.9}"),
        ))
    })
}

/// Swap closed form sums to ½ exactly; numeric suprema within tolerance.
pub fn check_swap(points: usize, s: &SupremumStrategy) -> CheckOutcome {
    timed("swap line", 1e-6, || {
        let mut worst = 0.0f64;
        let mut exact = true;
        for u in grid(points) {
            let p = SwapParams::new(u * FRAC_PI_2)?;
            let closed = swap_tradeoff_point(p);
            exact &= closed.measurement_error + closed.disturbance == 0.5;
            let (kept, measured) = swap_marginal_channels(p);
            let d = measurement_error(&induced_povm(&measured)?, s);
            let dd = disturbance(&kept, MeasureKind::WorstCaseTraceNorm, s);
            worst = worst
                .max((d + dd - 0.5).abs())
                .max((d - closed.measurement_error).abs())
                .max((dd - closed.disturbance).abs());
        }
        Ok((
            worst,
            exact && worst < 1e-6,
            format!("{points} swaps; closed form exact: {exact}"),
        ))
    })
}

/// `Δ_opt < Δ_clo < Δ_swap` at `δ ∈ {0.01, …, 0.49}`, where `Δ_opt` must also
/// match the numeric disturbance of the optimal instrument with that `δ`.
/// `worst` is the smallest gap between neighbouring curves.
pub fn check_dominance(frontier: &dyn Fn(f64) -> f64, s: &SupremumStrategy) -> CheckOutcome {
    timed("dominance", 0.0, || {
        let mut min_margin = f64::INFINITY;
        let mut worst_tightness = 0.0f64;
        for k in 1..=49 {
            let delta = k as f64 / 100.0;
            let opt = frontier(delta);
            let numeric = disturbance(&optimal(1.0 - 2.0 * delta), MeasureKind::WorstCaseTraceNorm, s);
            worst_tightness = worst_tightness.max((numeric - opt).abs());
            min_margin = min_margin
                .min(cloner_curve(delta) - opt)
                .min(swap_line(delta) - cloner_curve(delta));
        }
        let passed = min_margin > 0.0 && worst_tightness < 1e-6;
        Ok((
            min_margin,
            passed,
            format!("smallest margin {min_margin:.3e}; frontier vs numeric {worst_tightness:.3e}"),
        ))
    })
}

/// Random diagonal instruments never beat the frontier.
pub fn check_no_go(samples: usize, seed: u64, s: &SupremumStrategy) -> CheckOutcome {
    timed("no-go sampling", 1e-7, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = f64::NEG_INFINITY;
        let mut closed_dev = 0.0f64;
        for _ in 0..samples {
            let p = random_diagonal_params(&mut rng);
            let ins = make_diagonal_instrument(p)?;
            let d = measurement_error(&povm_of(&ins), s);
            let dd = disturbance(&ins, MeasureKind::WorstCaseTraceNorm, s);
            worst = worst.max(optimal_frontier(d) - dd);
            let closed = diagonal_tradeoff_closed_form(p)?;
            closed_dev = closed_dev
                .max((closed.measurement_error - d).abs())
                .max((closed.disturbance - dd).abs());
        }
        Ok((
            worst,
            worst <= 1e-7,
            format!("{samples} instruments; largest frontier − Δ = {worst:.3e}; closed vs numeric {closed_dev:.3e}"),
        ))
    })
}

/// Diamond and trace-norm disturbance agree on the optimal family.
pub fn check_diamond(points: usize, s: &SupremumStrategy) -> CheckOutcome {
    timed("diamond equality", 1e-4, || {
        let mut worst = 0.0f64;
        for gamma in grid(points) {
            let ins = optimal(gamma);
            let tn = disturbance(&ins, MeasureKind::WorstCaseTraceNorm, s);
            let dn = disturbance(&ins, MeasureKind::Diamond, s);
            worst = worst.max((dn - tn).abs());
        }
        Ok((worst, worst < 1e-4, format!("{points} optimal instruments")))
    })
}

/// Convexity and invariances of δ and Δ on random inputs.
pub fn check_axioms(trials: usize, seed: u64, s: &SupremumStrategy) -> CheckOutcome {
    timed("measure axioms", 1e-6, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let report = check_measure_axioms(trials, &mut rng, s)?;
        let detail = report
            .checks
            .iter()
            .map(|c| format!("{} {:.2e}", c.name, c.worst_violation))
            .collect::<Vec<_>>()
            .join("; ");
        Ok((report.worst_violation(), report.all_passed(), detail))
    })
}

pub const CLOSURE_GAMMAS: [f64; 3] = [0.2, 0.5, 0.8];

/// Noiseless estimates match the analytic point; noisy ones land within
/// `3e-3` in at least 95% of `seeds` runs at `shots` per basis.
pub fn check_experiment_closure(seeds: u64, shots: u64) -> CheckOutcome {
    timed("experiment closure", 1e-6, || {
        let mut worst_exact = 0.0f64;
        let mut worst_rate = 1.0f64;
        for gamma in CLOSURE_GAMMAS {
            let setting = InterferometerSetting::for_gamma(gamma)?;
            let analytic = analytic_tradeoff(&setting)?;
            let cfg = ExperimentConfig::new(setting, Shots::Exact(ExactShots::Exact), 0);
            let est = estimate_tradeoff(&simulate_dataset(&cfg)?)?;
            worst_exact = worst_exact
                .max((est.delta_hat - analytic.measurement_error).abs())
                .max((est.disturbance_hat - analytic.disturbance).abs());

            let mut hits = 0u64;
            for seed in 0..seeds {
                let cfg = ExperimentConfig::new(setting, Shots::Count(shots), seed);
                let est = estimate_tradeoff(&simulate_dataset(&cfg)?)?;
                if (est.delta_hat - analytic.measurement_error).abs() <= 3e-3
                    && (est.disturbance_hat - analytic.disturbance).abs() <= 3e-3
                {
                    hits += 1;
                }
            }
            worst_rate = worst_rate.min(hits as f64 / seeds.max(1) as f64);
        }
        let passed = worst_exact < 1e-6 && worst_rate >= 0.95;
        Ok((
            worst_exact,
            passed,
            format!("noiseless deviation {worst_exact:.2e}; lowest in-tolerance rate {:.0}% over {seeds} seeds at {shots} shots", 100.0 * worst_rate),
        ))
    })
}

/// On `β = 0` instruments the δ integrand vanishes at 90° and 270° and peaks
/// at 0° and 180°; the Δ integrand vanishes at 0° and 180° and peaks at 90°.
pub fn check_extremal_states() -> CheckOutcome {
    const EPS: f64 = 1e-15;
    timed("extremal states", EPS, || {
        let mut worst = 0.0f64;
        for gamma in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let ins = optimal(gamma);
            let dense: Vec<LinearPolarizationAngle> =
                (0..3600).map(|k| LinearPolarizationAngle(k as f64 / 10.0)).collect();
            let d_max = dense.iter().map(|&t| analytic_delta_integrand(&ins, t)).fold(0.0, f64::max);
            let dd_max = dense.iter().map(|&t| analytic_disturbance_integrand(&ins, t)).fold(0.0, f64::max);
            let at = |f: fn(&crate::instruments::Instrument, LinearPolarizationAngle) -> f64, deg: f64| {
                f(&ins, LinearPolarizationAngle(deg))
            };
            for deg in [90.0, 270.0] {
                worst = worst.max(at(analytic_delta_integrand, deg));
            }
            for deg in [0.0, 180.0] {
                worst = worst.max(d_max - at(analytic_delta_integrand, deg));
                worst = worst.max(at(analytic_disturbance_integrand, deg));
            }
            worst = worst.max(dd_max - at(analytic_disturbance_integrand, 90.0));
        }
        Ok((worst, worst <= EPS, "γ ∈ {0.1, 0.3, 0.5, 0.7, 0.9}, 0.1° scan".into()))
    })
}

/// Settings for the parabolic-vertex check.
pub const PARABOLA_GAMMA: f64 = 0.8;
pub const PARABOLA_SHOTS: u64 = 10_000_000;

/// The parabola through the Δ samples around 90° peaks within 0.1% of the
/// largest sample.
pub fn check_parabolic_vertex(seed: u64) -> CheckOutcome {
    timed("parabolic vertex", 1e-3, || {
        let setting = InterferometerSetting::for_gamma(PARABOLA_GAMMA)?;
        let mut cfg = ExperimentConfig::new(setting, Shots::Count(PARABOLA_SHOTS), seed);
        cfg.intensity_noise = 1e-3;
        let est = estimate_tradeoff(&simulate_dataset(&cfg)?)?;
        let Some(parabola) = est.disturbance_parabola else {
            return Ok((f64::INFINITY, false, "no parabola fitted".into()));
        };
        let local_max = parabola.value + parabola.certified_gap;
        let rel = parabola.certified_gap.abs() / local_max;
        let near_90 = (parabola.argmax[0] - 90.0).abs() < 10.0;
        Ok((
            rel,
            near_90 && rel < 1e-3,
            format!(
                "vertex at {:.3}° with value {:.6}, largest nearby sample {local_max:.6}",
                parabola.argmax[0], parabola.value
            ),
        ))
    })
}

/// Runs the suite. `frontier` is normally [`optimal_frontier`]; replacing it
/// lets callers confirm that the checks notice a wrong curve.
pub fn run_verify_with(level: VerifyLevel, frontier: &dyn Fn(f64) -> f64) -> VerifyReport {
    let s = SupremumStrategy::default();
    let checks = match level {
        VerifyLevel::Quick => vec![
            check_frontier(21, frontier, &s),
            check_cloner(21, &s),
            check_swap(21, &s),
            check_dominance(frontier, &s),
            check_no_go(100, 1, &s),
            check_axioms(10, 2, &s),
            check_experiment_closure(10, 1_000_000),
            check_extremal_states(),
            check_parabolic_vertex(3),
        ],
        VerifyLevel::Full => vec![
            check_frontier(101, frontier, &s),
            check_cloner(101, &s),
            check_swap(101, &s),
            check_dominance(frontier, &s),
            check_no_go(1000, 1, &s),
            check_diamond(11, &s),
            check_axioms(200, 2, &s),
            check_experiment_closure(100, 1_000_000),
            check_extremal_states(),
            check_parabolic_vertex(3),
        ],
    };
    VerifyReport { level, checks }
}

pub fn run_verify(level: VerifyLevel) -> VerifyReport {
    run_verify_with(level, &optimal_frontier)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn faulty_frontier_is_caught() {
        let s = SupremumStrategy::default();
        let faulty = |d: f64| optimal_frontier(d) - 1e-3;
        assert!(!check_dominance(&faulty, &s).passed);
        assert!(check_dominance(&optimal_frontier, &s).passed);
    }

    #[test]
    fn extremal_states_hold() {
        let c = check_extremal_states();
        assert!(c.passed, "{c:?}");
    }
}
