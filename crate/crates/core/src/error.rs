use thiserror::Error;

use crate::geometry::Point2;

#[derive(Debug, Error)]
pub enum Error {
    #[error("fracture {index} cannot be represented by edges of the initial mesh")]
    FractureNotRepresentable { index: usize },

    #[error("singular point ({}, {}) is not a mesh vertex", .point.x, .point.y)]
    SingularPointNotAVertex { point: Point2 },

    #[error("triangle {triangle} contains more than one singular vertex")]
    TwoSingularPointsInOneTriangle { triangle: usize },

    #[error("broken lineage at level {level}, triangle {triangle}")]
    BrokenLineage { level: usize, triangle: usize },

    #[error("KappaOutOfRange: kappa = {kappa} ({reason})")]
    KappaOutOfRange { kappa: f64, reason: String },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("unsupported element degree {0} (expected 1 or 2)")]
    UnsupportedDegree(usize),

    #[error("degenerate element {triangle}: jacobian determinant {det:e}")]
    DegenerateElement { triangle: usize, det: f64 },

    #[error("conjugate gradient breakdown at iteration {iteration}: p'Ap = {curvature:e}")]
    Breakdown { iteration: usize, curvature: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("functions are not defined on consecutive nested meshes: {0}")]
    NotNested(String),

    #[error("nonpositive seminorm difference ({prev:e}, {next:e})")]
    NonpositiveDifference { prev: f64, next: f64 },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("ConfigParse: {0}")]
    ConfigParse(String),

    #[error("mesh file line {line}: {message}")]
    MeshFormat { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
