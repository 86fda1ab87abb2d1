use crate::error::{Error, Result};
use crate::geometry::{Point2, Triangle2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Degree {
    P1,
    P2,
}

impl Degree {
    pub fn from_order(m: usize) -> Result<Self> {
        match m {
            1 => Ok(Degree::P1),
            2 => Ok(Degree::P2),
            other => Err(Error::UnsupportedDegree(other)),
        }
    }

    pub fn order(self) -> usize {
        match self {
            Degree::P1 => 1,
            Degree::P2 => 2,
        }
    }

    /// Local dofs per triangle: vertices, then edge midpoints (01, 12, 20).
    pub fn local_dofs(self) -> usize {
        match self {
            Degree::P1 => 3,
            Degree::P2 => 6,
        }
    }

    /// Barycentric coordinates of the local nodes.
    pub fn local_nodes(self) -> &'static [[f64; 3]] {
        const NODES: [[f64; 3]; 6] = [
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.5, 0.5, 0.0],
            [0.0, 0.5, 0.5],
            [0.5, 0.0, 0.5],
        ];
        &NODES[..self.local_dofs()]
    }
}

/// Shape function values and gradients with respect to the reference
/// coordinates `(xi, eta)`, where `l1 = 1 - xi - eta`, `l2 = xi`, `l3 = eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeEval {
    pub len: usize,
    pub values: [f64; 6],
    pub ref_grads: [[f64; 2]; 6],
}

// d(lambda_k)/d(xi, eta)
const DL: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

pub fn shape_values_and_gradients(degree: Degree, l: [f64; 3]) -> ShapeEval {
    let mut values = [0.0; 6];
    let mut ref_grads = [[0.0; 2]; 6];
    match degree {
        Degree::P1 => {
            values[..3].copy_from_slice(&l);
            ref_grads[..3].copy_from_slice(&DL);
        }
        Degree::P2 => {
            for i in 0..3 {
                values[i] = l[i] * (2.0 * l[i] - 1.0);
                let s = 4.0 * l[i] - 1.0;
                ref_grads[i] = [s * DL[i][0], s * DL[i][1]];
            }
            for (e, (i, j)) in [(0, 1), (1, 2), (2, 0)].into_iter().enumerate() {
                values[3 + e] = 4.0 * l[i] * l[j];
                ref_grads[3 + e] = [
                    4.0 * (l[j] * DL[i][0] + l[i] * DL[j][0]),
                    4.0 * (l[j] * DL[i][1] + l[i] * DL[j][1]),
                ];
            }
        }
    }
    ShapeEval {
        len: degree.local_dofs(),
        values,
        ref_grads,
    }
}

/// Affine map from the reference triangle.
#[derive(Debug, Clone, Copy)]
pub struct ElementMap {
    pub det: f64,
    /// Inverse transpose of the Jacobian, row-major.
    inv_t: [[f64; 2]; 2],
}

impl ElementMap {
    pub fn new(tri: &Triangle2) -> Self {
        let e1 = tri[1] - tri[0];
        let e2 = tri[2] - tri[0];
        // J = [e1 e2]
        let det = e1.x * e2.y - e2.x * e1.y;
        let inv_t = [[e2.y / det, -e1.y / det], [-e2.x / det, e1.x / det]];
        Self { det, inv_t }
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det
    }

    pub fn physical_gradient(&self, g: [f64; 2]) -> Point2 {
        Point2::new(
            self.inv_t[0][0] * g[0] + self.inv_t[0][1] * g[1],
            self.inv_t[1][0] * g[0] + self.inv_t[1][1] * g[1],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_barycenter() {
        let s = shape_values_and_gradients(Degree::P1, [1. / 3., 1. / 3., 1. / 3.]);
        for v in &s.values[..3] {
            assert!((v - 1. / 3.).abs() < 1e-15);
        }
    }

    #[test]
    fn p2_lagrange_property() {
        for (k, node) in Degree::P2.local_nodes().iter().enumerate() {
            let s = shape_values_and_gradients(Degree::P2, *node);
            for j in 0..6 {
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((s.values[j] - expect).abs() < 1e-15, "node {k} fn {j}");
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let l = [0.2, 0.3, 0.5];
        let h = 1e-6;
        for degree in [Degree::P1, Degree::P2] {
            let s = shape_values_and_gradients(degree, l);
            // xi moves weight from l1 to l2, eta from l1 to l3
            let dxi = shape_values_and_gradients(degree, [l[0] - h, l[1] + h, l[2]]);
            let deta = shape_values_and_gradients(degree, [l[0] - h, l[1], l[2] + h]);
            for k in 0..s.len {
                let fd = [(dxi.values[k] - s.values[k]) / h, (deta.values[k] - s.values[k]) / h];
                assert!((fd[0] - s.ref_grads[k][0]).abs() < 1e-5);
                assert!((fd[1] - s.ref_grads[k][1]).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn partition_of_unity() {
        let l = [0.1, 0.6, 0.3];
        for degree in [Degree::P1, Degree::P2] {
            let s = shape_values_and_gradients(degree, l);
            let sum: f64 = s.values[..s.len].iter().sum();
            let gsum = s.ref_grads[..s.len]
                .iter()
                .fold([0.0, 0.0], |a, g| [a[0] + g[0], a[1] + g[1]]);
            assert!((sum - 1.0).abs() < 1e-15);
            assert!(gsum[0].abs() < 1e-14 && gsum[1].abs() < 1e-14);
        }
    }

    #[test]
    fn unsupported_degree() {
        assert!(matches!(Degree::from_order(3), Err(Error::UnsupportedDegree(3))));
    }
}
