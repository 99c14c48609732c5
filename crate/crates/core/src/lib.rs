//! Numerical machinery for the relativistic quantum Toda chain.
//!
//! The crate has two faces:
//!
//! * an *operator* side ([`algebra`], [`lattice`], [`gauge`]) that realizes the
//!   per-site Weyl pair in a finite cyclic representation and turns the
//!   Yang-Baxter structure of the chain (R-matrix, Lax operators, monodromy,
//!   transfer matrix, gauge transformations) into dense-matrix identities that
//!   can be checked to machine precision, and
//! * a *wavefunction / spectrum* side ([`wavefun`], [`bethe`]) that works in an
//!   exact Gaussian-exponential function algebra (vacuum states, Bethe-type
//!   states, off-shell action identities) and solves the Bethe ansatz
//!   equations, evaluating T-Q eigenvalues and energies.
//!
//! All core math is generic over the underlying real scalar through the
//! [`scalar::Real`] trait; `f64` aliases are exported at the crate root.

pub mod algebra;
pub mod bethe;
pub mod error;
pub mod gauge;
pub mod lattice;
pub mod scalar;
pub mod wavefun;

pub use error::Error;
pub use scalar::{cx, Cx, Real};

/// Default real scalar used by the CLI and the test suites.
pub type R64 = f64;
/// Default complex scalar.
pub type C64 = Cx<f64>;

pub type CyclicWeylRep64 = algebra::CyclicWeylRep<f64>;
pub type SiteEmbeddedOp64 = algebra::SiteEmbeddedOp<f64>;
pub type AuxOpMatrix64 = lattice::AuxOpMatrix<f64>;
pub type ModelParams64 = bethe::ModelParams<f64>;
pub type BetheSolution64 = bethe::BetheSolution<f64>;
