//! Line quivers, finite posets, the mesh category `M_n` and its symmetries.

mod mesh;
mod poset;
mod quiver;

pub use mesh::{
    cosieve_of_diagonal, mesh_anti, mesh_map_f, mesh_map_f_inv, mesh_map_s, mesh_map_s_inv, mesh_map_t,
    mesh_map_t_inv, sieve_of_diagonal, twisted_arrow, GroupStructure, InducedAlpha, MeshSquare, MeshVertex,
    MeshWindow, SymmetryElem, SymmetryGroup, TwistedArrowCategory,
};
pub use poset::{Poset, ShapeError};
pub use quiver::{satisfies_reflection_hypothesis, Dir, Embedding, LineQuiver, Step};
