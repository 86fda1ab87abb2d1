use std::sync::Arc;

use super::dofmap::DofMap;
use super::element::{shape_values_and_gradients, ElementMap};
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::mesh::to_parent_barycentric;

/// Coefficients of a Lagrange finite element function.
#[derive(Debug, Clone)]
pub struct FeFunction {
    pub dofmap: Arc<DofMap>,
    pub coeffs: Vec<f64>,
}

impl FeFunction {
    pub fn new(dofmap: Arc<DofMap>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != dofmap.num_dofs() {
            return Err(Error::DimensionMismatch {
                expected: dofmap.num_dofs(),
                actual: coeffs.len(),
            });
        }
        Ok(Self { dofmap, coeffs })
    }

    pub fn zero(dofmap: Arc<DofMap>) -> Self {
        let n = dofmap.num_dofs();
        Self {
            dofmap,
            coeffs: vec![0.0; n],
        }
    }

    pub fn interpolate(dofmap: Arc<DofMap>, g: impl Fn(Point2) -> f64) -> Self {
        let coeffs = dofmap.interpolate(g);
        Self { dofmap, coeffs }
    }

    /// Value and physical gradient at a barycentric point of triangle `t`.
    pub fn evaluate(&self, t: usize, bary: [f64; 3]) -> (f64, Point2) {
        let map = ElementMap::new(&self.dofmap.mesh.triangle(t));
        self.evaluate_with(&map, t, bary)
    }

    pub(crate) fn evaluate_with(&self, map: &ElementMap, t: usize, bary: [f64; 3]) -> (f64, Point2) {
        let s = shape_values_and_gradients(self.dofmap.degree, bary);
        let dofs = self.dofmap.cell(t);
        let mut value = 0.0;
        let mut grad = [0.0; 2];
        for k in 0..s.len {
            let c = self.coeffs[dofs[k]];
            value += c * s.values[k];
            grad[0] += c * s.ref_grads[k][0];
            grad[1] += c * s.ref_grads[k][1];
        }
        (value, map.physical_gradient(grad))
    }

    /// Exact representation of this function on the next refinement level.
    pub fn prolongate(&self, fine: Arc<DofMap>) -> Result<FeFunction> {
        let mesh = &fine.mesh;
        let coarse_mesh = &self.dofmap.mesh;
        let (Some(parents), Some(pb)) = (&mesh.parent_of_triangle, &mesh.parent_barycentric) else {
            return Err(Error::NotNested("fine mesh has no parent links".into()));
        };
        if mesh.level != coarse_mesh.level + 1 || 4 * coarse_mesh.num_triangles() != mesh.num_triangles() {
            return Err(Error::NotNested(format!(
                "levels {} and {} are not consecutive",
                coarse_mesh.level, mesh.level
            )));
        }
        if fine.degree != self.dofmap.degree {
            return Err(Error::NotNested("element degrees differ".into()));
        }
        let mut coeffs = vec![0.0; fine.num_dofs()];
        for t in 0..mesh.num_triangles() {
            for (k, node) in fine.degree.local_nodes().iter().enumerate() {
                let l = to_parent_barycentric(&pb[t], *node);
                let s = shape_values_and_gradients(self.dofmap.degree, l);
                let cd = self.dofmap.cell(parents[t]);
                coeffs[fine.cell(t)[k]] = (0..s.len).map(|j| self.coeffs[cd[j]] * s.values[j]).sum();
            }
        }
        FeFunction::new(fine, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::Degree;
    use crate::mesh::Mesh;

    fn one_triangle() -> Arc<Mesh> {
        Arc::new(Mesh::new(
            vec![Point2::new(0.2, 0.1), Point2::new(1.1, 0.3), Point2::new(0.5, 0.9)],
            vec![[0, 1, 2]],
        ))
    }

    #[test]
    fn constants_have_zero_gradient() {
        let dm = Arc::new(DofMap::new(one_triangle(), Degree::P2));
        let f = FeFunction::new(dm.clone(), vec![1.0; dm.num_dofs()]).unwrap();
        let (v, g) = f.evaluate(0, [0.2, 0.5, 0.3]);
        assert!((v - 1.0).abs() < 1e-15);
        assert!(g.norm() < 1e-14);
    }

    #[test]
    fn p1_reproduces_linear() {
        let dm = Arc::new(DofMap::new(one_triangle(), Degree::P1));
        let f = FeFunction::interpolate(dm.clone(), |p| p.x);
        let l = [0.3, 0.3, 0.4];
        let (v, g) = f.evaluate(0, l);
        let p = crate::geometry::from_barycentric(&dm.mesh.triangle(0), l);
        assert!((v - p.x).abs() < 1e-15);
        assert!((g.x - 1.0).abs() < 1e-14 && g.y.abs() < 1e-14);
    }

    #[test]
    fn p2_reproduces_quadratic() {
        use rand::{Rng, SeedableRng};
        let dm = Arc::new(DofMap::new(one_triangle(), Degree::P2));
        let f = FeFunction::interpolate(dm.clone(), |p| p.x * p.x);
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let (a, b): (f64, f64) = (rng.gen(), rng.gen());
            let (a, b) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
            let l = [1.0 - a - b, a, b];
            let p = crate::geometry::from_barycentric(&dm.mesh.triangle(0), l);
            let (v, g) = f.evaluate(0, l);
            assert!((v - p.x * p.x).abs() < 1e-14);
            assert!((g.x - 2.0 * p.x).abs() < 1e-13 && g.y.abs() < 1e-13);
        }
    }

    #[test]
    fn wrong_length_rejected() {
        let dm = Arc::new(DofMap::new(one_triangle(), Degree::P1));
        assert!(FeFunction::new(dm, vec![0.0; 4]).is_err());
    }
}
