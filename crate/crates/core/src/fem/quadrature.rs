//! Quadrature on the reference triangle (barycentric points) and on `[0, 1]`.

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    /// Barycentric points.
    pub points: Vec<[f64; 3]>,
    /// Weights summing to 1 (fractions of the element area).
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Six-point symmetric rule, exact for polynomials of degree 4.
    pub fn triangle_degree4() -> Self {
        let a1 = 0.445_948_490_915_964_886_3;
        let w1 = 0.223_381_589_678_011_465_7;
        let a2 = 0.091_576_213_509_770_743_46;
        let w2 = 0.109_951_743_655_321_867_6;
        let (c1, c2) = (1.0 - 2.0 * a1, 1.0 - 2.0 * a2);
        Self {
            points: vec![
                [c1, a1, a1],
                [a1, c1, a1],
                [a1, a1, c1],
                [c2, a2, a2],
                [a2, c2, a2],
                [a2, a2, c2],
            ],
            weights: vec![w1, w1, w1, w2, w2, w2],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; 3], f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

#[derive(Debug, Clone)]
pub struct SegmentRule {
    /// Points in `[0, 1]`.
    pub points: Vec<f64>,
    /// Weights summing to 1.
    pub weights: Vec<f64>,
}

impl SegmentRule {
    /// Three-point Gauss-Legendre, exact for degree 5.
    pub fn gauss3() -> Self {
        let d = 0.5 * (0.6_f64).sqrt();
        Self {
            points: vec![0.5 - d, 0.5, 0.5 + d],
            weights: vec![5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}
