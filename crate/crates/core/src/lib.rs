// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

//! Quantum conjugate gradient through quantum eigenvalue transformation.
//!
//! Everything runs on dense unitaries and statevectors: polynomial
//! construction ([`polytools`]), phase factors ([`qsp`]), block encodings
//! ([`encodings`], [`qet`]), swap-test estimation ([`estimation`]) and the
//! classical and hybrid solvers ([`solvers`]).

pub mod encodings;
pub mod error;
pub mod estimation;
pub mod io;
pub mod linalg;
pub mod polytools;
pub mod qet;
pub mod qsp;
pub mod solvers;

pub use error::{Error, Result};
