//! Poisson brackets on rational Weyl functions, with the Camassa–Holm peakon,
//! open Toda and periodic KdV spectral transforms that feed them.
//!
//! `no_std` with `alloc`; IO, reports and the CLI live in the `spectral-poisson` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub type C64 = num_complex::Complex64;

mod error;

pub mod bracket;
pub mod kdv;
pub mod linalg;
pub mod ode;
pub mod peakon;
pub mod poly;
pub mod quadrature;
pub mod ratfun;
pub mod sample;
pub mod spectral;
pub mod toda;
pub mod verify;

pub use bracket::{BracketSpec, SecondKindWeight, StructureMatrix};
pub use error::{Error, Result};
pub use linalg::{CMatrix, Matrix, RMatrix};
pub use quadrature::{Orientation, QuadratureConfig};
pub use ratfun::{PoleZeroForm, WeylRational};
