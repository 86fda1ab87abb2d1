//! Planar primitives used by mesh construction and fracture integration.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(&self, other: Point2) -> f64 {
        (*self - other).norm()
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(&self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(&self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// Point at fraction `t` of the way from `self` to `other`.
    pub fn lerp(&self, other: Point2, t: f64) -> Point2 {
        Point2::new(self.x + t * (other.x - self.x), self.y + t * (other.y - self.y))
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<Point2> for f64 {
    type Output = Point2;
    fn mul(self, rhs: Point2) -> Point2 {
        Point2::new(self * rhs.x, self * rhs.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment2 {
    pub a: Point2,
    pub b: Point2,
}

impl Segment2 {
    pub const fn new(a: Point2, b: Point2) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn midpoint(&self) -> Point2 {
        self.a.lerp(self.b, 0.5)
    }

    pub fn point_at(&self, t: f64) -> Point2 {
        self.a.lerp(self.b, t)
    }
}

pub type Triangle2 = [Point2; 3];

const ORIENT_REL_TOL: f64 = 1e-14;

/// Sign of `(b - a) x (c - a)`; values within `1e-14 * scale^2` count as collinear.
pub fn orient2d(a: Point2, b: Point2, c: Point2) -> i8 {
    let cross = (b - a).cross(c - a);
    let scale = [a.x, a.y, b.x, b.y, c.x, c.y]
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    if cross.abs() <= ORIENT_REL_TOL * scale * scale {
        0
    } else if cross > 0.0 {
        1
    } else {
        -1
    }
}

/// Twice the signed area of the triangle.
pub fn signed_area2(tri: &Triangle2) -> f64 {
    (tri[1] - tri[0]).cross(tri[2] - tri[0])
}

/// Whether `p` lies on the closed segment `s`, up to `tol` (absolute distance).
pub fn point_on_segment(p: Point2, s: &Segment2, tol: f64) -> bool {
    let d = s.b - s.a;
    let len2 = d.dot(d);
    if len2 == 0.0 {
        return p.dist(s.a) <= tol;
    }
    let t = (p - s.a).dot(d) / len2;
    let len = len2.sqrt();
    if t < -tol / len || t > 1.0 + tol / len {
        return false;
    }
    let dist = (p - s.a).cross(d).abs() / len;
    dist <= tol
}

/// Barycentric coordinates of `p` with respect to `tri`.
pub fn barycentric(tri: &Triangle2, p: Point2) -> [f64; 3] {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let q = p - tri[0];
    let det = e1.cross(e2);
    let l1 = q.cross(e2) / det;
    let l2 = e1.cross(q) / det;
    [1.0 - l1 - l2, l1, l2]
}

pub fn from_barycentric(tri: &Triangle2, l: [f64; 3]) -> Point2 {
    Point2::new(
        l[0] * tri[0].x + l[1] * tri[1].x + l[2] * tri[2].x,
        l[0] * tri[0].y + l[1] * tri[1].y + l[2] * tri[2].y,
    )
}

/// Closed point-in-triangle test with a tolerance on the barycentric coordinates.
pub fn point_in_triangle(tri: &Triangle2, p: Point2, tol: f64) -> bool {
    barycentric(tri, p).iter().all(|&l| l >= -tol)
}

/// Result of clipping a segment against a closed triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clip {
    /// Parameter interval of the segment inside the triangle.
    pub t0: f64,
    pub t1: f64,
    /// Local edge index (edge `k` joins vertices `k` and `k + 1`) when the
    /// overlap runs along a triangle edge.
    pub on_edge: Option<usize>,
}

/// Clip `s` against the closed triangle `tri`.
///
/// Vertices are classified by their signed distance to the supporting line of
/// `s`, with a tolerance relative to the triangle diameter. Crossing points are
/// interpolated along triangle edges with the edge endpoints in a canonical
/// order, so two triangles sharing an edge compute bit-identical crossings.
pub fn clip_detailed(s: &Segment2, tri: &Triangle2) -> Option<Clip> {
    let d = s.b - s.a;
    let len = d.norm();
    let len2 = len * len;
    let diam = (0..3)
        .map(|i| tri[i].dist(tri[(i + 1) % 3]))
        .fold(0.0_f64, f64::max);
    let tol = 1e-10 * diam;

    let sigma: [f64; 3] = std::array::from_fn(|k| d.cross(tri[k] - s.a) / len);
    let tau: [f64; 3] = std::array::from_fn(|k| (tri[k] - s.a).dot(d) / len2);
    let sign: [i8; 3] = std::array::from_fn(|k| {
        if sigma[k].abs() <= tol {
            0
        } else if sigma[k] > 0.0 {
            1
        } else {
            -1
        }
    });

    let zeros: Vec<usize> = (0..3).filter(|&k| sign[k] == 0).collect();
    let (lo, hi, on_edge) = match zeros.len() {
        3 => return None,
        2 => {
            let (i, j) = (zeros[0], zeros[1]);
            let edge = if (i + 1) % 3 == j { i } else { j };
            (tau[i].min(tau[j]), tau[i].max(tau[j]), Some(edge))
        }
        _ => {
            let mut params: Vec<f64> = zeros.iter().map(|&k| tau[k]).collect();
            for i in 0..3 {
                let j = (i + 1) % 3;
                if sign[i] * sign[j] < 0 {
                    let (p, q) = if (tri[i].x, tri[i].y) < (tri[j].x, tri[j].y) {
                        (i, j)
                    } else {
                        (j, i)
                    };
                    let w = sigma[p] / (sigma[p] - sigma[q]);
                    params.push(tau[p] + w * (tau[q] - tau[p]));
                }
            }
            if params.len() < 2 {
                return None;
            }
            let lo = params.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = params.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi, None)
        }
    };
    let t0 = lo.max(0.0);
    let t1 = hi.min(1.0);
    if (t1 - t0) * len <= 1e-9 * diam {
        return None;
    }
    Some(Clip { t0, t1, on_edge })
}

/// Intersection of `s` with the closed triangle, or `None` when the overlap
/// has no positive length.
pub fn clip_segment_to_triangle(s: &Segment2, tri: &Triangle2) -> Option<Segment2> {
    clip_detailed(s, tri).map(|c| Segment2::new(s.point_at(c.t0), s.point_at(c.t1)))
}
