//! Measurement-error versus disturbance tradeoffs for binary qubit measurements.
//!
//! Measurements are two-outcome [`Instrument`]s. The crate evaluates the
//! worst-case measurement error δ and disturbance Δ of an instrument,
//! compares the optimal family against the cloner and swap reference
//! schemes, and simulates the interferometer that realizes the optimal
//! family, including the tomographic analysis of its data.
//!
//! ```
//! use qtradeoff::{make_optimal_instrument, tradeoff_of, MeasureKind, OptimalFamilyParams, SupremumStrategy};
//!
//! let ins = make_optimal_instrument(OptimalFamilyParams::with_gamma(0.5)?)?;
//! let p = tradeoff_of(&ins, MeasureKind::WorstCaseTraceNorm, &SupremumStrategy::default())?;
//! assert!((p.measurement_error - 0.25).abs() < 1e-9);
//! assert!((p.disturbance - qtradeoff::optimal_frontier(0.25)).abs() < 1e-6);
//! # Ok::<(), qtradeoff::Error>(())
//! ```

pub mod channel;
pub mod error;
pub mod experiment;
pub mod instruments;
pub mod measures;
pub mod qmath;
pub mod random;
pub mod schemes;
pub mod states;
pub mod supopt;
pub mod verify;

pub use channel::{apply_on_first, Channel, IdentityChannel};
pub use error::{Error, Result};
pub use instruments::{
    make_diagonal_instrument, make_optimal_instrument, povm_of, DiagonalFamilyParams, Instrument,
    InstrumentDescriptor, OptimalFamilyParams, Povm,
};
pub use measures::{disturbance, measurement_error, tradeoff_of, MeasureKind, TradeoffPoint};
pub use qmath::{CMat2, CMat4, C64};
pub use schemes::{cloner_curve, optimal_frontier, swap_line, ClonerParams, SwapParams};
pub use states::{BlochVector, DensityMatrix, LinearPolarizationAngle};
pub use supopt::{ExtremumEstimate, SupremumStrategy};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/instruments.md")]
    mod instruments {}
    #[doc = include_str!("../../../book/src/measures.md")]
    mod measures {}
    #[doc = include_str!("../../../book/src/schemes.md")]
    mod schemes {}
    #[doc = include_str!("../../../book/src/experiment.md")]
    mod experiment {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
