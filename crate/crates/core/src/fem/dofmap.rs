use std::collections::HashMap;
use std::sync::Arc;

use super::element::Degree;
use crate::geometry::{from_barycentric, Point2};
use crate::mesh::{edge_key, EdgeKey, Mesh};

/// Global numbering of Lagrange nodes: mesh vertices first, then (for P2) one
/// node per edge in order of first appearance.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub mesh: Arc<Mesh>,
    pub degree: Degree,
    n_dofs: usize,
    cell_dofs: Vec<usize>,
    coords: Vec<Point2>,
    boundary: Vec<bool>,
    edge_dofs: HashMap<EdgeKey, usize>,
}

impl DofMap {
    pub fn new(mesh: Arc<Mesh>, degree: Degree) -> Self {
        let nv = mesh.num_vertices();
        let per = degree.local_dofs();
        let mut cell_dofs = Vec::with_capacity(per * mesh.num_triangles());
        let mut coords = mesh.vertices.clone();
        let mut boundary = vec![false; nv];
        for &v in &mesh.boundary_vertices {
            boundary[v] = true;
        }
        let mut edge_dofs = HashMap::new();

        match degree {
            Degree::P1 => {
                for tri in &mesh.triangles {
                    cell_dofs.extend_from_slice(tri);
                }
            }
            Degree::P2 => {
                let usage = mesh.edge_usage();
                for tri in &mesh.triangles {
                    cell_dofs.extend_from_slice(tri);
                    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
                        let key = edge_key(tri[i], tri[j]);
                        let next = coords.len();
                        let dof = *edge_dofs.entry(key).or_insert_with(|| {
                            coords.push(mesh.vertices[key.0].lerp(mesh.vertices[key.1], 0.5));
                            boundary.push(usage[&key] == 1);
                            next
                        });
                        cell_dofs.push(dof);
                    }
                }
            }
        }
        Self {
            n_dofs: coords.len(),
            mesh,
            degree,
            cell_dofs,
            coords,
            boundary,
            edge_dofs,
        }
    }

    pub fn num_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn cell(&self, t: usize) -> &[usize] {
        let per = self.degree.local_dofs();
        &self.cell_dofs[per * t..per * (t + 1)]
    }

    pub fn coordinate(&self, dof: usize) -> Point2 {
        self.coords[dof]
    }

    pub fn coordinates(&self) -> &[Point2] {
        &self.coords
    }

    pub fn is_boundary(&self, dof: usize) -> bool {
        self.boundary[dof]
    }

    pub fn boundary_dofs(&self) -> Vec<usize> {
        (0..self.n_dofs).filter(|&d| self.boundary[d]).collect()
    }

    /// Dof attached to the midpoint of an edge (P2 only).
    pub fn edge_dof(&self, i: usize, j: usize) -> Option<usize> {
        self.edge_dofs.get(&edge_key(i, j)).copied()
    }

    /// Nodal interpolation of `g`.
    pub fn interpolate(&self, g: impl Fn(Point2) -> f64) -> Vec<f64> {
        self.coords.iter().map(|&p| g(p)).collect()
    }

    /// Physical position of local node `k` of triangle `t`.
    pub fn local_node(&self, t: usize, k: usize) -> Point2 {
        from_barycentric(&self.mesh.triangle(t), self.degree.local_nodes()[k])
    }
}
