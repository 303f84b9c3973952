//! Single-qubit quantum channels as linear maps on 2×2 operators.

use crate::qmath::{CMat2, CMat4};
use crate::states::DensityMatrix;

/// A completely positive, trace-preserving map on one qubit.
///
/// `apply_op` must be linear and defined on arbitrary (non-Hermitian)
/// operators so that `T ⊗ id` can be evaluated block by block.
pub trait Channel: Sync {
    fn apply_op(&self, m: &CMat2) -> CMat2;

    fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::from_channel_output(self.apply_op(rho.mat()))
    }
}

impl<C: Channel + ?Sized> Channel for &C {
    fn apply_op(&self, m: &CMat2) -> CMat2 {
        (**self).apply_op(m)
    }
}

/// `(T ⊗ id)(m)`: the channel acts on the first (slow-index) factor.
pub fn apply_on_first<C: Channel + ?Sized>(channel: &C, m: &CMat4) -> CMat4 {
    let mut out = CMat4::zero();
    for k in 0..2 {
        for l in 0..2 {
            let mut block = CMat2::zero();
            for i in 0..2 {
                for j in 0..2 {
                    block.0[i][j] = m.0[2 * i + k][2 * j + l];
                }
            }
            let mapped = channel.apply_op(&block);
            for i in 0..2 {
                for j in 0..2 {
                    out.0[2 * i + k][2 * j + l] = mapped.0[i][j];
                }
            }
        }
    }
    out
}

/// The identity channel.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityChannel;

impl Channel for IdentityChannel {
    fn apply_op(&self, m: &CMat2) -> CMat2 {
        *m
    }
}

/// `ρ ↦ U Φ(U† ρ U) U†`
pub struct Conjugated<C> {
    pub inner: C,
    pub unitary: CMat2,
}

impl<C: Channel> Channel for Conjugated<C> {
    fn apply_op(&self, m: &CMat2) -> CMat2 {
        let u = &self.unitary;
        let inner = self.inner.apply_op(&(u.adjoint() * *m * *u));
        *u * inner * u.adjoint()
    }
}

/// `λ Φ + (1 − λ) Φ′`
pub struct Mixture<A, B> {
    pub first: A,
    pub second: B,
    pub weight: f64,
}

impl<A: Channel, B: Channel> Channel for Mixture<A, B> {
    fn apply_op(&self, m: &CMat2) -> CMat2 {
        self.first.apply_op(m).scale_re(self.weight)
            + self.second.apply_op(m).scale_re(1.0 - self.weight)
    }
}
