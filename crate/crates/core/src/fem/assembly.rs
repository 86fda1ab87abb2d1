use rayon::prelude::*;

use super::dofmap::DofMap;
use super::element::{shape_values_and_gradients, Degree, ElementMap};
use super::quadrature::{QuadratureRule, SegmentRule};
use crate::error::{Error, Result};
use crate::geometry::{barycentric, clip_detailed, Segment2};
use crate::linalg::{CsrMatrix, SparseSystem};
use crate::mesh::{edge_key, Mesh};

pub type ElementMatrix = [[f64; 6]; 6];

/// Local stiffness matrix `int_T grad(phi_i) . grad(phi_j)` of triangle `t`.
pub fn element_stiffness(mesh: &Mesh, t: usize, degree: Degree) -> Result<ElementMatrix> {
    let map = ElementMap::new(&mesh.triangle(t));
    if !(map.det > 0.0) {
        return Err(Error::DegenerateElement {
            triangle: t,
            det: map.det,
        });
    }
    let n = degree.local_dofs();
    let mut k = [[0.0; 6]; 6];
    let rule = match degree {
        // constant gradients: one point is exact
        Degree::P1 => QuadratureRule {
            points: vec![[1.0 / 3.0; 3]],
            weights: vec![1.0],
        },
        Degree::P2 => QuadratureRule::triangle_degree4(),
    };
    for (l, w) in rule.iter() {
        let s = shape_values_and_gradients(degree, *l);
        let grads: Vec<_> = (0..n).map(|i| map.physical_gradient(s.ref_grads[i])).collect();
        let scale = w * map.area();
        for i in 0..n {
            for j in i..n {
                k[i][j] += scale * grads[i].dot(grads[j]);
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            k[i][j] = k[j][i];
        }
    }
    Ok(k)
}

/// Global stiffness matrix; boundary rows are not yet eliminated.
pub fn assemble_stiffness(dofmap: &DofMap) -> Result<CsrMatrix> {
    let mesh = &dofmap.mesh;
    let degree = dofmap.degree;
    let n = degree.local_dofs();
    let locals: Vec<ElementMatrix> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| element_stiffness(mesh, t, degree))
        .collect::<Result<_>>()?;
    let mut triplets = Vec::with_capacity(locals.len() * n * n);
    for (t, k) in locals.iter().enumerate() {
        let dofs = dofmap.cell(t);
        for i in 0..n {
            for j in 0..n {
                triplets.push((dofs[i], dofs[j], k[i][j]));
            }
        }
    }
    Ok(CsrMatrix::from_triplets(dofmap.num_dofs(), triplets))
}

/// Load vector `int_gamma phi_i ds`. Meshes carrying fracture edges use the
/// edge-by-edge path; otherwise the fractures are clipped against every element.
pub fn assemble_line_load(dofmap: &DofMap, fractures: &[Segment2]) -> Vec<f64> {
    if dofmap.mesh.fracture_edges.is_empty() {
        assemble_line_load_clipped(dofmap, fractures)
    } else {
        assemble_line_load_conforming(dofmap)
    }
}

/// Exact edge integrals over the mesh's fracture edges.
pub fn assemble_line_load_conforming(dofmap: &DofMap) -> Vec<f64> {
    let mesh = &dofmap.mesh;
    let mut load = vec![0.0; dofmap.num_dofs()];
    for &(i, j) in &mesh.fracture_edges {
        let len = mesh.vertices[i].dist(mesh.vertices[j]);
        match dofmap.degree {
            Degree::P1 => {
                load[i] += 0.5 * len;
                load[j] += 0.5 * len;
            }
            Degree::P2 => {
                let mid = dofmap.edge_dof(i, j).expect("every edge carries a P2 dof");
                load[i] += len / 6.0;
                load[j] += len / 6.0;
                load[mid] += 2.0 * len / 3.0;
            }
        }
    }
    load
}

/// Clip every fracture against every element and integrate the restricted
/// basis functions with 3-point Gauss. A piece lying on an interior edge is
/// seen by both neighbours and each takes half of it.
pub fn assemble_line_load_clipped(dofmap: &DofMap, fractures: &[Segment2]) -> Vec<f64> {
    let mesh = &dofmap.mesh;
    let usage = mesh.edge_usage();
    let rule = SegmentRule::gauss3();
    let n = dofmap.degree.local_dofs();
    let mut load = vec![0.0; dofmap.num_dofs()];
    for t in 0..mesh.num_triangles() {
        let tri = mesh.triangle(t);
        let verts = mesh.triangles[t];
        for s in fractures {
            let Some(clip) = clip_detailed(s, &tri) else {
                continue;
            };
            let share = match clip.on_edge {
                Some(e) if usage[&edge_key(verts[e], verts[(e + 1) % 3])] > 1 => 0.5,
                _ => 1.0,
            };
            let len = (clip.t1 - clip.t0) * s.length() * share;
            let dofs = dofmap.cell(t);
            for (q, w) in rule.iter() {
                let p = s.point_at(clip.t0 + q * (clip.t1 - clip.t0));
                let phi = shape_values_and_gradients(dofmap.degree, barycentric(&tri, p));
                for k in 0..n {
                    load[dofs[k]] += w * len * phi.values[k];
                }
            }
        }
    }
    load
}

/// Homogeneous Dirichlet conditions by symmetric elimination: boundary rows
/// and columns are zeroed, their diagonal set to one and their load cleared.
pub fn apply_dirichlet(mut system: SparseSystem, boundary_dofs: &[usize]) -> SparseSystem {
    let mut fixed = vec![false; system.dim()];
    for &d in boundary_dofs {
        fixed[d] = true;
    }
    system.matrix.map_entries(|i, j, v| {
        if fixed[i] || fixed[j] {
            if i == j {
                1.0
            } else {
                0.0
            }
        } else {
            v
        }
    });
    for (d, b) in system.rhs.iter_mut().enumerate() {
        if fixed[d] {
            *b = 0.0;
        }
    }
    system
}
