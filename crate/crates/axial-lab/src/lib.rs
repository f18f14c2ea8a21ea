//! Axial linearized gravity on the Schwarzschild exterior.
//!
//! The crate evolves the per-mode Regge–Wheeler equations for the connection
//! quantities `α` (spin 2) and `β` (spin 1), rebuilds `γ` from the first-order
//! system, removes the `ℓ = 1` part of `β` with a linearized Kerr solution and
//! measures the multiplier energies (`T`, `N`, `X`, `Z`) that control
//! boundedness and decay. Closed-form identities are checked in exact
//! rational arithmetic by [`identities`].

pub mod axial;
pub mod energy;
pub mod error;
pub mod evolution;
pub mod geometry;
pub mod harmonics;
pub mod harness;
pub mod identities;
pub mod jet;
pub mod quad;

pub use error::{LabError, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/harmonics.md")]
    mod harmonics {}
    #[doc = include_str!("../../../book/src/evolution.md")]
    mod evolution {}
    #[doc = include_str!("../../../book/src/coupled.md")]
    mod coupled {}
    #[doc = include_str!("../../../book/src/energies.md")]
    mod energies {}
    #[doc = include_str!("../../../book/src/identities.md")]
    mod identities {}
    #[doc = include_str!("../../../book/src/running.md")]
    mod running {}
}
