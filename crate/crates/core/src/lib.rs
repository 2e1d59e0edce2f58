//! Numerics for Hankel forms on weighted Bergman spaces of the unit disk.
//!
//! Functions are truncated Taylor series, weights are radial, and measures
//! are finite sums of point masses plus an anti-analytic polynomial density.
//! Everything that can be reduced to moments is computed from moments; the
//! rest uses the quadrature rules in [`quadrature`] and [`norms`].

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod hankelnorm;
pub mod io;
pub mod measures;
pub mod norms;
pub mod operators;
pub mod quadrature;
pub mod weights;

pub use analytic::{kernel, TaylorSeries, C64};
pub use error::{Error, Result};
pub use measures::{ComplexMeasure, MomentSequence};
pub use weights::RadialWeight;

/// Order-preserving map, parallel when the `parallel` feature is on.
pub(crate) mod par {
    #[cfg(feature = "parallel")]
    pub fn map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }

    #[cfg(not(feature = "parallel"))]
    pub fn map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
        items.iter().map(f).collect()
    }
}
