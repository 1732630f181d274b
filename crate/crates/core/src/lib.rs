//! Representations of type A quivers over exact fields.
//!
//! The crate builds coherent Auslander-Reiten diagrams on windows of the mesh
//! category `M_n`, computes reflection, Coxeter and Serre functors at chain
//! level, implements the canceling tensor product of bimodules over line
//! quivers, and checks canonical higher triangles.

pub mod ar;
pub mod bimod;
pub mod checks;
pub mod derived;
pub mod functors;
pub mod higher;
pub mod io;
pub mod linalg;
pub mod rep;
pub mod shapes;
