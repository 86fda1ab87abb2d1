//! Lagrange P1/P2 finite elements on straight triangles.

mod assembly;
mod dofmap;
mod element;
mod function;
pub mod quadrature;

pub use assembly::{
    apply_dirichlet, assemble_line_load, assemble_line_load_clipped, assemble_line_load_conforming,
    assemble_stiffness, element_stiffness,
};
pub use dofmap::DofMap;
pub use element::{shape_values_and_gradients, Degree, ElementMap, ShapeEval};
pub use function::FeFunction;
pub use quadrature::{QuadratureRule, SegmentRule};
