//! Exact Schur-function, q-binomial and watermelon identities, together with
//! the XX0 chain correlation functions they describe.
//!
//! Exact work happens over [`num_rational::BigRational`] and [`qpoly::QPoly`];
//! chain numerics use `Complex64`. Mode sums run on rayon when the default
//! `parallel` feature is on and sequentially otherwise, with identical
//! summation order either way.

pub mod asymptotics;
pub mod cbident;
pub mod draw;
pub mod error;
pub mod par;
pub mod partitions;
pub mod paths;
pub mod qpoly;
pub mod ring;
pub mod schur;
pub mod xx0;

pub use error::{Error, Result};
pub use qpoly::QPoly;
