//! Graded refinement toward singular vertices.
//!
//! Every edge receives one new node: the midpoint, or the point at distance
//! `kappa * |pq|` from a singular endpoint `p`. Each triangle is then split
//! into four by connecting its three edge nodes.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::mesh::{edge_key, EdgeKey, Mesh, SingularKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSplit {
    pub node: usize,
    /// Distance ratio measured from the edge's smaller vertex index.
    pub ratio_from_first: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RefinementRecord {
    pub edges: BTreeMap<EdgeKey, EdgeSplit>,
    /// `children[p]` are the four triangles replacing parent `p`: the corner at
    /// the parent's singular (or first) vertex, the two other corners, then the
    /// central triangle.
    pub children: Vec<[usize; 4]>,
}

/// One graded refinement step.
pub fn graded_refine(mesh: &Mesh) -> Result<(Mesh, RefinementRecord)> {
    let violations = mesh.structural_violations();
    if !violations.is_empty() {
        return Err(Error::InvalidMesh(
            violations
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }

    let mut vertices = mesh.vertices.clone();
    let mut edges: BTreeMap<EdgeKey, EdgeSplit> = BTreeMap::new();
    let usage = mesh.edge_usage();
    let mut boundary_vertices = mesh.boundary_vertices.clone();
    let mut fracture_edges = BTreeSet::new();

    // Nodes are created in triangle/edge traversal order so vertex numbering
    // is deterministic.
    let mut node_of = |i: usize, j: usize, vertices: &mut Vec<crate::geometry::Point2>| -> usize {
        let key = edge_key(i, j);
        if let Some(split) = edges.get(&key) {
            return split.node;
        }
        let (p, q) = key;
        let (point, ratio) = match (
            mesh.singular_vertices.get(&p),
            mesh.singular_vertices.get(&q),
        ) {
            (None, None) => (vertices[p].lerp(vertices[q], 0.5), 0.5),
            (Some(&k), None) => (vertices[p].lerp(vertices[q], k), k),
            (None, Some(&k)) => (vertices[q].lerp(vertices[p], k), 1.0 - k),
            (Some(_), Some(_)) => unreachable!("structural check rejects edges with two singular ends"),
        };
        let node = vertices.len();
        vertices.push(point);
        edges.insert(
            key,
            EdgeSplit {
                node,
                ratio_from_first: ratio,
            },
        );
        node
    };

    let n_tri = mesh.num_triangles();
    let mut triangles = Vec::with_capacity(4 * n_tri);
    let mut parent_of = Vec::with_capacity(4 * n_tri);
    let mut parent_bary = Vec::with_capacity(4 * n_tri);
    let mut children = Vec::with_capacity(n_tri);

    for (t, tri) in mesh.triangles.iter().enumerate() {
        // rotate so the singular vertex (if any) comes first
        let shift = (0..3)
            .find(|&k| mesh.singular_vertices.contains_key(&tri[k]))
            .unwrap_or(0);
        let v = [tri[shift], tri[(shift + 1) % 3], tri[(shift + 2) % 3]];
        let m01 = node_of(v[0], v[1], &mut vertices);
        let m12 = node_of(v[1], v[2], &mut vertices);
        let m20 = node_of(v[2], v[0], &mut vertices);

        // barycentric coordinates (in the parent's original vertex order) of
        // a node on the edge between rotated local vertices a and b
        let unit = |local: usize| {
            let mut e = [0.0; 3];
            e[(local + shift) % 3] = 1.0;
            e
        };
        let on_edge = |a: usize, b: usize| {
            let split = edges_ratio(mesh, v[a], v[b]);
            let (ua, ub) = (unit(a), unit(b));
            std::array::from_fn(|k| (1.0 - split) * ua[k] + split * ub[k])
        };
        let (b0, b1, b2) = (unit(0), unit(1), unit(2));
        let (b01, b12, b20) = (on_edge(0, 1), on_edge(1, 2), on_edge(2, 0));

        let base = triangles.len();
        triangles.push([v[0], m01, m20]);
        parent_bary.push([b0, b01, b20]);
        triangles.push([m01, v[1], m12]);
        parent_bary.push([b01, b1, b12]);
        triangles.push([m20, m12, v[2]]);
        parent_bary.push([b20, b12, b2]);
        triangles.push([m01, m12, m20]);
        parent_bary.push([b01, b12, b20]);
        parent_of.extend([t; 4]);
        children.push([base, base + 1, base + 2, base + 3]);
    }

    for (key, split) in &edges {
        if usage.get(key) == Some(&1) {
            boundary_vertices.insert(split.node);
        }
        if mesh.fracture_edges.contains(key) {
            fracture_edges.insert(edge_key(key.0, split.node));
            fracture_edges.insert(edge_key(split.node, key.1));
        }
    }

    let refined = Mesh {
        vertices,
        triangles,
        level: mesh.level + 1,
        base_triangle_count: mesh.base_triangle_count,
        parent_of_triangle: Some(parent_of),
        parent_barycentric: Some(parent_bary),
        singular_vertices: mesh.singular_vertices.clone(),
        boundary_vertices,
        fracture_edges,
    };
    Ok((refined, RefinementRecord { edges, children }))
}

/// Position of the new node on edge `a -> b`, as a fraction of `|ab|` from `a`.
fn edges_ratio(mesh: &Mesh, a: usize, b: usize) -> f64 {
    match (mesh.singular_vertices.get(&a), mesh.singular_vertices.get(&b)) {
        (Some(&k), None) => k,
        (None, Some(&k)) => 1.0 - k,
        _ => 0.5,
    }
}

/// Apply `levels` refinement steps, returning every level including the input.
pub fn refine_levels(mesh: Mesh, levels: usize) -> Result<Vec<Mesh>> {
    let mut out = Vec::with_capacity(levels + 1);
    out.push(mesh);
    for _ in 0..levels {
        let (next, _) = graded_refine(out.last().expect("non-empty"))?;
        out.push(next);
    }
    Ok(out)
}

/// Grading parameter suggested by the regularity theory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaRule {
    /// `kappa = 2^(-m/a)` for an exponent `0 < a < 1`.
    FractureEndpoint { a: f64 },
    /// User-chosen `kappa`, which must satisfy `kappa < 2^(-m * omega / pi)`.
    DomainVertex { kappa: f64, omega: f64 },
}

impl KappaRule {
    pub fn kind(&self) -> SingularKind {
        match self {
            KappaRule::FractureEndpoint { .. } => SingularKind::FractureEndpoint,
            KappaRule::DomainVertex { .. } => SingularKind::DomainVertex,
        }
    }
}

pub fn kappa_from_theory(degree: usize, rule: KappaRule) -> Result<f64> {
    if !(1..=2).contains(&degree) {
        return Err(Error::UnsupportedDegree(degree));
    }
    let m = degree as f64;
    let kappa = match rule {
        KappaRule::FractureEndpoint { a } => {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::KappaOutOfRange {
                    kappa: 2f64.powf(-m / a),
                    reason: format!("grading exponent a = {a} must lie in (0, 1)"),
                });
            }
            2f64.powf(-m / a)
        }
        KappaRule::DomainVertex { kappa, omega } => {
            if !(omega > 0.0 && omega < 2.0 * std::f64::consts::PI) {
                return Err(Error::InvalidProblem(format!(
                    "interior angle {omega} outside (0, 2pi)"
                )));
            }
            let bound = 2f64.powf(-m * omega / std::f64::consts::PI);
            if kappa >= bound {
                return Err(Error::KappaOutOfRange {
                    kappa,
                    reason: format!("corner grading requires kappa < 2^(-m*omega/pi) = {bound}"),
                });
            }
            kappa
        }
    };
    if !(kappa > 0.0 && kappa <= 0.5) {
        return Err(Error::KappaOutOfRange {
            kappa,
            reason: "grading parameter must lie in (0, 0.5]".into(),
        });
    }
    Ok(kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;

    fn single(kappa: Option<f64>) -> Mesh {
        let mut m = Mesh::new(
            vec![Point2::new(0., 0.), Point2::new(1., 0.), Point2::new(0., 1.)],
            vec![[0, 1, 2]],
        );
        if let Some(k) = kappa {
            m.singular_vertices.insert(0, k);
        }
        m
    }

    #[test]
    fn midpoint_without_singular_vertices() {
        let (fine, rec) = graded_refine(&single(None)).unwrap();
        let s = rec.edges[&(0, 1)];
        assert_eq!(s.ratio_from_first, 0.5);
        assert_eq!(fine.vertices[s.node], Point2::new(0.5, 0.0));
    }

    #[test]
    fn graded_node_from_singular_end() {
        let (fine, rec) = graded_refine(&single(Some(0.2))).unwrap();
        let s = rec.edges[&(0, 1)];
        assert_eq!(fine.vertices[s.node], Point2::new(0.2, 0.0));
        // singular endpoint with the larger index
        let mut m = single(None);
        m.singular_vertices.insert(1, 0.2);
        let (fine, rec) = graded_refine(&m).unwrap();
        let s = rec.edges[&(0, 1)];
        assert!((fine.vertices[s.node].x - 0.8).abs() < 1e-15);
        assert!((s.ratio_from_first - 0.8).abs() < 1e-15);
    }

    #[test]
    fn children_order_and_orientation() {
        let mut m = single(None);
        m.singular_vertices.insert(2, 0.3);
        let (fine, rec) = graded_refine(&m).unwrap();
        assert_eq!(rec.children, vec![[0, 1, 2, 3]]);
        assert_eq!(fine.triangles[0][0], 2);
        assert!(fine.structural_violations().is_empty());
        assert_eq!(fine.singular_vertices, m.singular_vertices);
    }

    #[test]
    fn two_singular_ends_rejected() {
        let mut m = single(None);
        m.singular_vertices.insert(0, 0.2);
        m.singular_vertices.insert(1, 0.2);
        assert!(matches!(graded_refine(&m), Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn kappa_rules() {
        let k = kappa_from_theory(2, KappaRule::FractureEndpoint { a: 0.8 }).unwrap();
        assert!((k - 2f64.powf(-2.5)).abs() < 1e-15);
        assert!(k < 0.25);
        let k = kappa_from_theory(1, KappaRule::FractureEndpoint { a: 0.999_999 }).unwrap();
        assert!(k < 0.5 && k > 0.4999);
        assert!(kappa_from_theory(1, KappaRule::FractureEndpoint { a: 1.0 }).is_err());

        let omega = std::f64::consts::FRAC_PI_2;
        let bound = 2f64.powf(-0.5);
        assert!((bound - 0.7071067811865476).abs() < 1e-15);
        let k = kappa_from_theory(1, KappaRule::DomainVertex { kappa: 0.5, omega }).unwrap();
        assert_eq!(k, 0.5);
        assert!(matches!(
            kappa_from_theory(1, KappaRule::DomainVertex { kappa: 0.7, omega }),
            Err(Error::KappaOutOfRange { .. })
        ));
        // reentrant corner: 2^(-1.5) ~ 0.354
        let omega = 1.5 * std::f64::consts::PI;
        assert!(kappa_from_theory(1, KappaRule::DomainVertex { kappa: 0.4, omega }).is_err());
        assert!(kappa_from_theory(1, KappaRule::DomainVertex { kappa: 0.3, omega }).is_ok());
        assert!(matches!(kappa_from_theory(3, KappaRule::FractureEndpoint { a: 0.5 }), Err(Error::UnsupportedDegree(3))));
    }
}
