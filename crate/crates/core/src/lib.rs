//! A symbolic computation engine over F2 for the algebra of bordered
//! Heegaard Floer theory: strand dg algebras of pointed matched circles,
//! type D / A-infinity (bi)modules with a uniform slot system, box tensor
//! products, morphism complexes and Ext, homological perturbation, and
//! Koszul-duality checks.

pub mod algebra;
pub mod chain;
pub mod error;
pub mod f2;
pub mod module;
pub mod morph;
pub mod pmc;
pub mod poly;
pub mod repro;
pub mod serialize;
pub mod strands;
pub mod zoo;

pub use error::{Error, Result};
