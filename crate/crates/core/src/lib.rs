//! One-dimensional stress- and nutrient-modulated growth.
//!
//! A growth field `G(X, t)` on the reference interval `[0, L0]` evolves
//! under a growth law driven by the elastic stress between two plates and
//! by the nutrient concentration on the deformed body. The crate provides
//! the building blocks (energies, equilibrium, reaction-diffusion, time
//! integration) and a closed-form two-segment oracle used to validate
//! them.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod elastostatics;
pub mod energy;
pub mod error;
pub mod fields;
pub mod nutrients;
pub mod oracle;
pub mod probe;
pub mod roots;
pub mod tridiag;

pub use error::{Error, Result};
