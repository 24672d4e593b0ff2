//! Shipment-cycle policy optimization for an e-tailer whose premium demand
//! reacts, through word of mouth, to the service regular customers receive.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod domain;
pub mod dynamics;
pub mod error;
pub mod m1;
pub(crate) mod roots;
pub(crate) mod simplex;
pub mod m2;
pub mod experiments;
pub mod cli;

pub use error::{Error, Result};

/// Guide chapters under `book/`, compiled as doc-tests so their snippets stay current.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/shipment-cycle.md")]
    mod shipment_cycle {}
    #[doc = include_str!("../../../book/src/reactive-policy.md")]
    mod reactive_policy {}
    #[doc = include_str!("../../../book/src/feedback.md")]
    mod feedback {}
    #[doc = include_str!("../../../book/src/equilibrium.md")]
    mod equilibrium {}
    #[doc = include_str!("../../../book/src/recoverability.md")]
    mod recoverability {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
