//! Spencer cohomology, filtered deformations and homogeneous models of flat
//! model Lie (super)algebras over pseudo-Euclidean spaces, with exact
//! rational arithmetic throughout.

pub mod exactla;
pub mod clifford;
pub mod flatmodel;
pub mod spencer;
pub mod deform;
pub mod homogmodel;
pub mod cli;
