//! Fixed-size complex matrices for one and two qubits.
//!
//! [`CMat2`] holds single-qubit operators (Kraus operators, POVM elements,
//! density matrices) and [`CMat4`] holds two-qubit operators. Tensor products
//! use row-major pair indexing: the first factor is the slow index, so
//! `tensor(a, b)[2*i + k][2*j + l] = a[i][j] * b[k][l]`.
//!
//! Eigenvalues of Hermitian matrices come from the closed-form quadratic for
//! 2×2 inputs and from a cyclic complex Jacobi sweep otherwise. The trace norm
//! is only defined here for Hermitian arguments, which is all the measures
//! need.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative Hermiticity tolerance: `‖m − m†‖_F ≤ HERMITIAN_TOL · ‖m‖_F`.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// fraction of the matrix norm.
const JACOBI_OFF_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 64;

pub const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

const ZERO: C64 = c(0.0, 0.0);
const ONE: C64 = c(1.0, 0.0);

/// Square complex matrix of fixed dimension `N`, stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<const N: usize>(pub [[C64; N]; N]);

pub type CMat2 = CMat<2>;
pub type CMat4 = CMat<4>;

impl<const N: usize> Default for CMat<N> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const N: usize> CMat<N> {
    pub const fn zero() -> Self {
        CMat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_diag(d: [C64; N]) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn from_real_diag(d: [f64; N]) -> Self {
        Self::from_diag(d.map(|x| c(x, 0.0)))
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &[C64; N], v: &[C64; N]) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = u[i] * v[j].conj();
            }
        }
        m
    }

    /// `|i⟩⟨j|` in the computational basis.
    pub fn unit(i: usize, j: usize) -> Self {
        let mut m = Self::zero();
        m.0[i][j] = ONE;
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|x| *x *= s);
        m
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    /// `(m + m†) / 2`
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_re(0.5)
    }

    /// `‖m − m†‖_F`
    pub fn anti_hermitian_norm(&self) -> f64 {
        (*self - self.adjoint()).frobenius_norm()
    }

    pub fn is_hermitian(&self) -> bool {
        self.anti_hermitian_norm() <= HERMITIAN_TOL * self.frobenius_norm()
    }

    /// `U m U†`
    pub fn conjugate_by(&self, u: &Self) -> Self {
        *u * *self * u.adjoint()
    }

    /// `m v`
    pub fn apply(&self, v: &[C64; N]) -> [C64; N] {
        let mut out = [ZERO; N];
        for (i, row) in self.0.iter().enumerate() {
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }
}

impl<const N: usize> Index<(usize, usize)> for CMat<N> {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMat<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for CMat<N> {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<const N: usize> AddAssign for CMat<N> {
    fn add_assign(&mut self, rhs: Self) {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a += b;
        }
    }
}

impl<const N: usize> Sub for CMat<N> {
    type Output = Self;

    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a -= b;
        }
        self
    }
}

impl<const N: usize> Neg for CMat<N> {
    type Output = Self;

    fn neg(self) -> Self {
        self.scale_re(-1.0)
    }
}

impl<const N: usize> Mul for CMat<N> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl CMat2 {
    pub fn pauli_x() -> Self {
        CMat([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn pauli_y() -> Self {
        CMat([[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]])
    }

    pub fn pauli_z() -> Self {
        Self::from_real_diag([1.0, -1.0])
    }

    /// Determinant.
    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }
}

impl CMat4 {
    /// The flip operator `F = Σ_ij |ji⟩⟨ij|`.
    pub fn flip() -> Self {
        let mut m = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[2 * j + i][2 * i + j] = ONE;
            }
        }
        m
    }
}

/// Which tensor factor to trace out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Kronecker product with the first factor as the slow index.
pub fn tensor(a: &CMat2, b: &CMat2) -> CMat4 {
    let mut m = CMat4::zero();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    m
}

/// Traces out `which`, returning the operator on the remaining qubit.
pub fn partial_trace(m: &CMat4, which: Subsystem) -> CMat2 {
    let mut out = CMat2::zero();
    for x in 0..2 {
        for y in 0..2 {
            out.0[x][y] = (0..2)
                .map(|t| match which {
                    Subsystem::Second => m.0[2 * x + t][2 * y + t],
                    Subsystem::First => m.0[2 * t + x][2 * t + y],
                })
                .sum();
        }
    }
    out
}

/// Real eigenvalues of a Hermitian matrix, sorted in descending order.
#[derive(Clone, Debug, PartialEq)]
pub struct HermSpectrum {
    pub eigenvalues: Vec<f64>,
}

impl HermSpectrum {
    pub fn max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn min(&self) -> f64 {
        *self.eigenvalues.last().expect("spectrum is never empty")
    }

    pub fn abs_sum(&self) -> f64 {
        self.eigenvalues.iter().map(|x| x.abs()).sum()
    }
}

fn check_hermitian<const N: usize>(m: &CMat<N>) -> Result<()> {
    let deviation = m.anti_hermitian_norm();
    if deviation <= HERMITIAN_TOL * m.frobenius_norm() && m.is_finite() {
        Ok(())
    } else {
        Err(Error::NotHermitian { deviation })
    }
}

/// Eigenvalues of a Hermitian matrix (descending).
///
/// The input is symmetrized before solving. Fails with
/// [`Error::NotHermitian`] when `‖m − m†‖ > 1e-10 ‖m‖`.
pub fn herm_eigvals<const N: usize>(m: &CMat<N>) -> Result<HermSpectrum> {
    check_hermitian(m)?;
    let h = m.hermitian_part();
    let mut eigenvalues = if N == 2 {
        let a = h.0[0][0].re;
        let d = h.0[1][1].re;
        let b = h.0[0][1];
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        vec![mean + radius, mean - radius]
    } else {
        jacobi_eigvals(h)
    };
    eigenvalues.sort_by(|x, y| y.total_cmp(x));
    Ok(HermSpectrum { eigenvalues })
}

/// Cyclic complex Jacobi on a Hermitian matrix.
fn jacobi_eigvals<const N: usize>(mut a: CMat<N>) -> Vec<f64> {
    let norm = a.frobenius_norm();
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_OFF_TOL * norm {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                rotate(&mut a, p, q);
            }
        }
    }
    (0..N).map(|i| a.0[i][i].re).collect()
}

fn off_diagonal_norm<const N: usize>(a: &CMat<N>) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                s += a.0[i][j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `a[p][q]` with the unitary `V = diag-phase · real rotation`,
/// replacing `a` by `V† a V`.
fn rotate<const N: usize>(a: &mut CMat<N>, p: usize, q: usize) {
    let apq = a.0[p][q];
    let mag = apq.norm();
    if mag < f64::MIN_POSITIVE {
        return;
    }
    // Phase e^{-iφ} on column q turns the pivot block real symmetric.
    let phase = (apq / mag).conj();
    let app = a.0[p][p].re;
    let aqq = a.0[q][q].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;

    // Columns of V restricted to (p, q): v_p = (c, -s e^{-iφ}), v_q = (s, c e^{-iφ}).
    let vpp = c(cs, 0.0);
    let vqp = phase * (-sn);
    let vpq = c(sn, 0.0);
    let vqq = phase * cs;

    // a ← a V (columns p, q)
    for row in a.0.iter_mut() {
        let xp = row[p];
        let xq = row[q];
        row[p] = xp * vpp + xq * vqp;
        row[q] = xp * vpq + xq * vqq;
    }
    // a ← V† a (rows p, q)
    for col in 0..N {
        let xp = a.0[p][col];
        let xq = a.0[q][col];
        a.0[p][col] = vpp.conj() * xp + vqp.conj() * xq;
        a.0[q][col] = vpq.conj() * xp + vqq.conj() * xq;
    }
    a.0[p][q] = ZERO;
    a.0[q][p] = ZERO;
    a.0[p][p].im = 0.0;
    a.0[q][q].im = 0.0;
}

/// Trace norm of a Hermitian matrix: the sum of absolute eigenvalues.
pub fn trace_norm<const N: usize>(m: &CMat<N>) -> Result<f64> {
    Ok(herm_eigvals(m)?.abs_sum())
}

/// Largest absolute eigenvalue of a Hermitian matrix.
pub fn operator_norm<const N: usize>(m: &CMat<N>) -> Result<f64> {
    let s = herm_eigvals(m)?;
    Ok(s.max().abs().max(s.min().abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ket_h() -> [C64; 2] {
        [ONE, ZERO]
    }

    fn ket_v() -> [C64; 2] {
        [ZERO, ONE]
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(tensor(&CMat2::identity(), &CMat2::identity()), CMat4::identity());
        assert_eq!(
            tensor(&CMat2::pauli_z(), &CMat2::identity()),
            CMat4::from_real_diag([1.0, 1.0, -1.0, -1.0])
        );
        let hv = tensor(&CMat2::outer(&ket_h(), &ket_h()), &CMat2::outer(&ket_v(), &ket_v()));
        assert_eq!(hv, CMat4::unit(1, 1));
    }

    #[test]
    fn partial_trace_examples() {
        let a = CMat([[c(1.0, 0.5), c(2.0, 0.0)], [c(0.0, -1.0), c(3.0, 0.0)]]);
        let b = CMat([[c(0.3, 0.0), c(0.1, 0.2)], [c(0.4, 0.0), c(0.9, -0.1)]]);
        let ab = tensor(&a, &b);
        assert!(partial_trace(&ab, Subsystem::Second).max_abs_diff(&a.scale(b.trace())) < 1e-14);
        assert!(partial_trace(&ab, Subsystem::First).max_abs_diff(&b.scale(a.trace())) < 1e-14);
        assert_eq!(partial_trace(&CMat4::identity(), Subsystem::First), CMat2::identity().scale_re(2.0));
        assert_eq!(partial_trace(&CMat4::flip(), Subsystem::First), CMat2::identity());
        assert_eq!(partial_trace(&CMat4::flip(), Subsystem::Second), CMat2::identity());
    }

    #[test]
    fn flip_swaps_factors() {
        let a = CMat([[c(1.0, 0.0), c(2.0, 1.0)], [c(0.5, 0.0), c(-1.0, 0.0)]]);
        let b = CMat2::pauli_y();
        let f = CMat4::flip();
        assert!((f * tensor(&a, &b) * f).max_abs_diff(&tensor(&b, &a)) < 1e-15);
    }

    #[test]
    fn eigvals_examples() {
        let s = herm_eigvals(&CMat2::pauli_z()).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, -1.0]);
        let s = herm_eigvals(&CMat2::outer(&ket_h(), &ket_h())).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 0.0]);
        let (a, b) = (0.3, 0.4);
        let m = CMat([[c(a, 0.0), c(b, 0.0)], [c(b, 0.0), c(-a, 0.0)]]);
        let s = herm_eigvals(&m).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.eigenvalues[1], -0.5, epsilon = 1e-15);
    }

    #[test]
    fn jacobi_on_known_spectrum() {
        // Bell projector: eigenvalues (1, 0, 0, 0).
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let bell = [c(r, 0.0), ZERO, ZERO, c(0.0, r)];
        let s = herm_eigvals(&CMat4::outer(&bell, &bell)).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], 1.0, epsilon = 1e-14);
        for &x in &s.eigenvalues[1..] {
            assert_abs_diff_eq!(x, 0.0, epsilon = 1e-14);
        }
        // Flip operator: symmetric subspace +1 (three-fold), antisymmetric −1.
        let s = herm_eigvals(&CMat4::flip()).unwrap();
        assert_eq!(s.eigenvalues.len(), 4);
        for (x, want) in s.eigenvalues.iter().zip([1.0, 1.0, 1.0, -1.0]) {
            assert_abs_diff_eq!(*x, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn not_hermitian_is_rejected() {
        let m = CMat2::unit(0, 1);
        assert!(matches!(herm_eigvals(&m), Err(Error::NotHermitian { .. })));
        assert!(matches!(trace_norm(&CMat4::unit(0, 3)), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn trace_norm_examples() {
        let h = CMat2::outer(&ket_h(), &ket_h());
        let v = CMat2::outer(&ket_v(), &ket_v());
        assert_eq!(trace_norm(&(h - h)).unwrap(), 0.0);
        assert_abs_diff_eq!(trace_norm(&(h - v)).unwrap(), 2.0, epsilon = 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [c(r * 0.6, 0.0), c(0.0, 0.8)];
        let psi = {
            let n = (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
            [psi[0] / n, psi[1] / n]
        };
        let d = CMat2::identity().scale_re(0.5) - CMat2::outer(&psi, &psi);
        assert_abs_diff_eq!(trace_norm(&d).unwrap(), 1.0, epsilon = 1e-14);
    }
}
