//! Suprema over pure states.
//!
//! Every worst-case measure in this crate is a supremum of a convex function
//! of the input state, so only pure states are searched. The single-qubit
//! engine scans a `(θ, φ)` grid on the Bloch sphere and polishes the best
//! `multistarts` grid points with Nelder–Mead. The bipartite engine does the
//! same over unit vectors in `C⁴` modulo global phase, with a seeded random
//! sample in place of the (six-dimensional) grid.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{c, CMat2, C64};
use crate::states::DensityMatrix;

/// Knobs for the supremum engines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupremumStrategy {
    /// Grid points per Bloch angle; the bipartite engine samples the square of this.
    pub coarse_grid_points: usize,
    /// Nelder–Mead iteration budget per free parameter.
    pub refine_iterations: usize,
    /// Stop refining once the simplex values agree to within this.
    pub tolerance: f64,
    pub multistarts: usize,
    /// Seed for the bipartite coarse sample.
    pub seed: u64,
}

impl Default for SupremumStrategy {
    fn default() -> Self {
        Self {
            coarse_grid_points: 64,
            refine_iterations: 60,
            tolerance: 1e-8,
            multistarts: 8,
            seed: 0x005E_ED0F_5A9E,
        }
    }
}

impl SupremumStrategy {
    pub fn validate(&self) -> Result<()> {
        if self.coarse_grid_points < 2 || self.refine_iterations == 0 || self.multistarts == 0 {
            return Err(Error::InvalidArgument(
                "strategy needs coarse_grid_points ≥ 2, refine_iterations ≥ 1, multistarts ≥ 1"
                    .into(),
            ));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument("strategy tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Location and value of a numerically found maximum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremumEstimate {
    /// Parameters of the maximizer; see the producing function for their meaning.
    pub argmax: Vec<f64>,
    pub value: f64,
    /// Best coarse value minus the refined value (≤ 0 when refinement helped).
    pub certified_gap: f64,
}

/// Pure qubit state at polar angle `theta` and azimuth `phi` on the Bloch sphere.
pub fn pure_state_at(theta: f64, phi: f64) -> DensityMatrix {
    let ket = [c((0.5 * theta).cos(), 0.0), Complex64::from_polar((0.5 * theta).sin(), phi)];
    DensityMatrix::pure(ket).expect("unit ket")
}

/// Maximizes `f` over pure qubit states. `argmax` is `[θ, φ]` in radians.
pub fn maximize_over_pure_states<F>(f: F, s: &SupremumStrategy) -> ExtremumEstimate
where
    F: Fn(&DensityMatrix) -> f64,
{
    let n = s.coarse_grid_points.max(2);
    let dtheta = PI / (n - 1) as f64;
    let dphi = TAU / n as f64;
    let objective = |x: &[f64]| f(&pure_state_at(x[0], x[1]));

    let mut grid = Vec::with_capacity(n * n);
    for i in 0..n {
        let theta = dtheta * i as f64;
        // Poles are a single point.
        let phis = if i == 0 || i == n - 1 { 1 } else { n };
        for j in 0..phis {
            let x = vec![theta, dphi * j as f64];
            let v = objective(&x);
            grid.push((v, x));
        }
    }
    refine_from_candidates(&objective, grid, &[dtheta, dphi], s)
}

/// Unit vector in `C⁴` from six angles: three hyperspherical moduli angles
/// and three relative phases (the first amplitude is real and non-negative).
pub fn bipartite_vector(p: &[f64]) -> [C64; 4] {
    let (sa, ca) = p[0].sin_cos();
    let (sb, cb) = p[1].sin_cos();
    let (sc, cc) = p[2].sin_cos();
    [
        c(ca, 0.0),
        Complex64::from_polar(sa * cb, p[3]),
        Complex64::from_polar(sa * sb * cc, p[4]),
        Complex64::from_polar(sa * sb * sc, p[5]),
    ]
}

/// Inverse of [`bipartite_vector`] up to global phase.
pub fn bipartite_params(v: &[C64; 4]) -> Vec<f64> {
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let m: Vec<f64> = v.iter().map(|z| z.norm() / n).collect();
    let ref_phase = v[0].arg();
    vec![
        m[0].clamp(0.0, 1.0).acos(),
        (m[2] * m[2] + m[3] * m[3]).sqrt().atan2(m[1]),
        m[3].atan2(m[2]),
        v[1].arg() - ref_phase,
        v[2].arg() - ref_phase,
        v[3].arg() - ref_phase,
    ]
}

/// Maximizes `f` over unit vectors in `C⁴`. `argmax` holds the six angles
/// understood by [`bipartite_vector`].
pub fn maximize_over_bipartite_pure_states<F>(f: F, s: &SupremumStrategy) -> ExtremumEstimate
where
    F: Fn(&[C64; 4]) -> f64,
{
    let samples = s.coarse_grid_points.max(2).pow(2);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let objective = |x: &[f64]| f(&bipartite_vector(x));

    let mut coarse = Vec::with_capacity(samples + 1);
    for _ in 0..samples {
        let v: [C64; 4] = std::array::from_fn(|_| {
            c(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        });
        let x = bipartite_params(&v);
        coarse.push((objective(&x), x));
    }
    let step = 0.25;
    refine_from_candidates(&objective, coarse, &[step; 6], s)
}

fn refine_from_candidates<F>(
    objective: &F,
    mut candidates: Vec<(f64, Vec<f64>)>,
    steps: &[f64],
    s: &SupremumStrategy,
) -> ExtremumEstimate
where
    F: Fn(&[f64]) -> f64,
{
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
    let coarse_best = candidates[0].0;
    let budget = s.refine_iterations.max(1) * steps.len();

    let mut best = candidates[0].clone();
    for (v0, x0) in candidates.iter().take(s.multistarts.max(1)) {
        let neg = |x: &[f64]| -objective(x);
        let (x, fx) = nelder_mead(&neg, x0, -v0, steps, budget, s.tolerance);
        if -fx > best.0 {
            best = (-fx, x);
        }
    }
    ExtremumEstimate {
        certified_gap: coarse_best - best.0,
        value: best.0,
        argmax: best.1,
    }
}

/// Downhill simplex minimization. Never returns a point worse than `x0`.
fn nelder_mead<F>(
    f: &F,
    x0: &[f64],
    f0: f64,
    steps: &[f64],
    max_iter: usize,
    tol: f64,
) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let dim = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), f0));
    for (k, &h) in steps.iter().enumerate() {
        let mut x = x0.to_vec();
        x[k] += h;
        let fx = f(&x);
        simplex.push((x, fx));
    }

    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[dim].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread <= tol * 1e-3 && size <= 1e-9 {
            break;
        }
        if spread <= tol * 1e-6 && size <= 1e-6 {
            break;
        }

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(1.0);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let fe = f(&xe);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = along(0.5);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = along(-0.5);
            let fc = f(&xc);
            (xc, fc)
        };
        if fc < worst.1.min(fr) {
            simplex[dim] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for (x, fx) in simplex[1..].iter_mut() {
            for (xi, bi) in x.iter_mut().zip(&best) {
                *xi = bi + 0.5 * (*xi - bi);
            }
            *fx = f(x);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

/// Least-squares parabola `y = a x² + b x + c` through `points`.
///
/// `argmax` is `[x_vertex]`, `value` the vertex height, and `certified_gap`
/// the largest sampled `y` minus the vertex height.
pub fn parabolic_refine(points: &[(f64, f64)]) -> Result<ExtremumEstimate> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "parabolic fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    if xs.windows(2).any(|w| w[0] == w[1]) || points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::InvalidArgument("parabolic fit needs distinct finite x values".into()));
    }

    // Centre and scale x for conditioning.
    let n = points.len() as f64;
    let mean = points.iter().map(|p| p.0).sum::<f64>() / n;
    let scale = points.iter().map(|p| (p.0 - mean).abs()).fold(0.0, f64::max);
    let mut ata = [[0.0; 3]; 3];
    let mut aty = [0.0; 3];
    for &(x, y) in points {
        let u = (x - mean) / scale;
        let row = [u * u, u, 1.0];
        for i in 0..3 {
            aty[i] += row[i] * y;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let [qa, qb, qc] = solve3(ata, aty)
        .ok_or_else(|| Error::InvalidArgument("parabolic fit normal equations are singular".into()))?;
    let a = qa / (scale * scale);
    if a.abs() < 1e-12 {
        return Err(Error::DegenerateFit { coefficient: a });
    }
    let u_vertex = -qb / (2.0 * qa);
    let value = qc - qb * qb / (4.0 * qa);
    let max_sample = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(ExtremumEstimate {
        argmax: vec![mean + u_vertex * scale],
        value,
        certified_gap: max_sample - value,
    })
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..3 {
            let factor = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = ((row + 1)..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Objective helper: `tr(O ρ)` for a Hermitian observable.
pub fn expectation(o: &CMat2, rho: &DensityMatrix) -> f64 {
    (*o * *rho.mat()).trace().re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Channel;
    use crate::instruments::{make_optimal_instrument, OptimalFamilyParams};
    use crate::qmath::trace_norm;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_objective() {
        let est = maximize_over_pure_states(|_| 0.7, &SupremumStrategy::default());
        assert_eq!(est.value, 0.7);
        assert_eq!(est.certified_gap, 0.0);
        let est = maximize_over_bipartite_pure_states(|_| 0.3, &SupremumStrategy::default());
        assert_eq!(est.value, 0.3);
    }

    #[test]
    fn linear_objective_peaks_at_north_pole() {
        let z = CMat2::pauli_z();
        let est = maximize_over_pure_states(|rho| expectation(&z, rho), &SupremumStrategy::default());
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-12);
        let b = pure_state_at(est.argmax[0], est.argmax[1]).bloch();
        assert_abs_diff_eq!(b.z, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn off_grid_linear_objective() {
        // Maximum at an irrational direction, away from grid nodes.
        let n = [0.3f64, -0.5, 0.81];
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        let o = CMat2::pauli_x().scale_re(n[0]) + CMat2::pauli_y().scale_re(n[1]) + CMat2::pauli_z().scale_re(n[2]);
        let est = maximize_over_pure_states(|rho| expectation(&o, rho), &SupremumStrategy::default());
        assert_abs_diff_eq!(est.value, norm, epsilon = 1e-9);
        assert!(est.certified_gap <= 0.0);
    }

    #[test]
    fn dephasing_disturbance_peaks_on_equator() {
        let ins = make_optimal_instrument(OptimalFamilyParams::with_gamma(1.0).unwrap()).unwrap();
        let est = maximize_over_pure_states(
            |rho| 0.5 * trace_norm(&(*ins.apply(rho).mat() - *rho.mat())).unwrap(),
            &SupremumStrategy::default(),
        );
        assert_abs_diff_eq!(est.value, 0.5, epsilon = 1e-12);
        let b = pure_state_at(est.argmax[0], est.argmax[1]).bloch();
        assert_abs_diff_eq!(b.z, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn bipartite_overlap_peaks_at_target() {
        let target = {
            let v = [c(0.6, 0.0), c(0.0, 0.0), c(0.0, 0.8), c(0.0, 0.0)];
            v
        };
        let est = maximize_over_bipartite_pure_states(
            |v| {
                let o: C64 = v.iter().zip(&target).map(|(a, b)| a.conj() * b).sum();
                o.norm_sqr()
            },
            &SupremumStrategy::default(),
        );
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn bipartite_parametrization_round_trip() {
        let v = [c(0.1, 0.2), c(-0.4, 0.3), c(0.5, -0.1), c(0.2, 0.6)];
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let w = bipartite_vector(&bipartite_params(&v));
        let overlap: C64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
        assert_abs_diff_eq!(overlap.norm() / n, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn deterministic() {
        let z = CMat2::pauli_x() + CMat2::pauli_z().scale_re(0.3);
        let s = SupremumStrategy::default();
        let a = maximize_over_pure_states(|rho| expectation(&z, rho), &s);
        let b = maximize_over_pure_states(|rho| expectation(&z, rho), &s);
        assert_eq!(a, b);
        let f = |v: &[C64; 4]| v[0].norm_sqr() * v[3].norm_sqr();
        assert_eq!(
            maximize_over_bipartite_pure_states(f, &s),
            maximize_over_bipartite_pure_states(f, &s)
        );
    }

    #[test]
    fn parabola_examples() {
        let pts: Vec<(f64, f64)> = [0.0, 1.0, 2.5, 3.0, 4.0]
            .iter()
            .map(|&x| (x, -(x - 2.0) * (x - 2.0) + 5.0))
            .collect();
        let est = parabolic_refine(&pts).unwrap();
        assert_abs_diff_eq!(est.argmax[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(est.value, 5.0, epsilon = 1e-12);

        let line = [(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)];
        assert!(matches!(parabolic_refine(&line), Err(Error::DegenerateFit { .. })));
        assert!(parabolic_refine(&[(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(parabolic_refine(&[(0.0, 1.0), (0.0, 2.0), (1.0, 0.0)]).is_err());
    }

    #[test]
    fn strategy_validation() {
        assert!(SupremumStrategy::default().validate().is_ok());
        let bad = SupremumStrategy {
            multistarts: 0,
            ..SupremumStrategy::default()
        };
        assert!(bad.validate().is_err());
    }
}
