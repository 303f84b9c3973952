//! Random states, unitaries, POVMs and instruments for property checks.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::instruments::{validate_instrument, DiagonalFamilyParams, Instrument, Povm};
use crate::qmath::{c, CMat, CMat2, C64};
use crate::states::{bloch_to_density, BlochVector, DensityMatrix};

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Haar-random 2×2 unitary: a uniform point of `SU(2)` times a uniform phase.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R) -> CMat2 {
    let (a, b) = loop {
        let a = gaussian_c64(rng);
        let b = gaussian_c64(rng);
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if n > 1e-12 {
            break (a / n, b / n);
        }
    };
    let phase = Complex64::from_polar(1.0, rng.random_range(0.0..TAU));
    CMat([[a, -b.conj()], [b, a.conj()]]).scale(phase)
}

/// Uniformly distributed pure state.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let u = haar_unitary(rng);
    DensityMatrix::pure([u[(0, 0)], u[(1, 0)]]).expect("unit column")
}

/// Uniform point of the Bloch ball.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let n = random_pure_state(rng).bloch();
    let r = rng.random::<f64>().cbrt();
    bloch_to_density(BlochVector::new(r * n.x, r * n.y, r * n.z)).expect("inside the ball")
}

/// `E₁ = U diag(p, q) U†` with Haar `U` and `p, q` uniform on `[0, 1]`.
pub fn random_povm<R: Rng + ?Sized>(rng: &mut R) -> Povm {
    let u = haar_unitary(rng);
    let d = CMat2::from_real_diag([rng.random(), rng.random()]);
    Povm::from_first(d.conjugate_by(&u).hermitian_part()).expect("0 ≤ E₁ ≤ 𝟙")
}

/// Instrument from a random isometry `V: C² → C⁴`, split into two 2×2 blocks.
pub fn random_instrument<R: Rng + ?Sized>(rng: &mut R) -> Instrument {
    loop {
        let mut cols: [[C64; 4]; 2] = [[C64::default(); 4]; 2];
        for col in cols.iter_mut() {
            *col = std::array::from_fn(|_| gaussian_c64(rng));
        }
        // Gram-Schmidt.
        let n0 = cols[0].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols[0].iter_mut().for_each(|z| *z /= n0);
        let overlap: C64 = cols[0].iter().zip(&cols[1]).map(|(a, b)| a.conj() * b).sum();
        let c0 = cols[0];
        cols[1].iter_mut().zip(&c0).for_each(|(z, a)| *z -= overlap * a);
        let n1 = cols[1].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(n0 > 1e-9 && n1 > 1e-9) {
            continue;
        }
        cols[1].iter_mut().for_each(|z| *z /= n1);
        let block = |r: usize| CMat([[cols[0][r], cols[1][r]], [cols[0][r + 1], cols[1][r + 1]]]);
        if let Ok(ins) = validate_instrument(block(0), block(2)) {
            return ins;
        }
    }
}

/// Diagonal-family parameters with `b₁, b₂` uniform on `[0, 1]` and uniform phases.
pub fn random_diagonal_params<R: Rng + ?Sized>(rng: &mut R) -> DiagonalFamilyParams {
    DiagonalFamilyParams::new(
        rng.random(),
        rng.random(),
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..TAU),
    )
    .expect("in range")
}
