//! Deciding and certifying herdability of linear time-invariant pairs.
//!
//! A pair `(A, B)` is herdable when every state component can be driven
//! above any positive threshold. That happens exactly when the image of the
//! controllability matrix `R(A, B)` contains a strictly positive vector.
//! This crate provides the exact decision procedure ([`oracle`]) together
//! with the structural sufficient tests and characterizations built on sign
//! patterns, network layering and tree topology.
//!
//! Graph convention: a nonzero `A[i][j]` is an arc from node `j` to node `i`.

pub mod error;
pub mod exact;
pub mod graph;
pub mod leader;
pub mod matrix;
pub mod oracle;
pub mod par;
pub mod sim;
mod simplex;
pub mod tol;
pub mod tree;
pub mod unisign;

pub use error::{Error, Result};
pub use exact::{Arithmetic, IntMatrix};
pub use matrix::{controllability_matrix, Permutation, RealMatrix, SignClass};
pub use oracle::{herdable, positive_image_feasible, verify_certificate, verify_witness, HerdabilityVerdict, Status};
