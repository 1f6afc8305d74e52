//! Complete and incomplete numbers of the spectral pair attached to an
//! N-Bernoulli convolution.
//!
//! A positive integer `t` is *complete* for the pair `(μ_{b,qD}, Λ(b,C))`
//! when `tΛ` is still a spectrum of the measure. The crate decides this
//! exactly by searching the integer points of the attractor `T(b, tC)` for
//! periodic orbits, and backs every verdict with a certificate or witness
//! that can be checked on its own.

pub mod classifier;
pub mod error;
pub mod fourier;
pub mod modorder;
pub mod params;
pub mod primitive;
mod serde_str;
pub mod survey;
pub mod verify;

pub use classifier::{classify, classify_with, Certificate, Classification, Verdict, Witness};
pub use error::{Error, Result};
pub use params::{attractor_envelope, make_params, Budgets, PairParams, RationalInterval};
