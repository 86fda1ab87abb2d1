//! Nested conforming triangulations.
//!
//! A [`Mesh`] carries its refinement lineage: every triangle at level `n > 0`
//! knows its parent at level `n - 1` and the barycentric coordinates of its
//! three vertices inside that parent. Coarse functions can then be evaluated
//! exactly at fine points without any geometric search.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::{
    self, from_barycentric, orient2d, point_on_segment, signed_area2, Point2, Segment2, Triangle2,
};

/// Absolute tolerance used to match configured points against mesh vertices.
pub const MATCH_TOL: f64 = 1e-12;

/// Unordered vertex pair, stored with the smaller index first.
pub type EdgeKey = (usize, usize);

pub fn edge_key(i: usize, j: usize) -> EdgeKey {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularKind {
    FractureEndpoint,
    DomainVertex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPoint {
    pub point: Point2,
    pub kappa: f64,
    pub kind: SingularKind,
}

/// Geometric description of one model problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    /// Counterclockwise, simple polygon.
    pub domain: Vec<Point2>,
    pub fractures: Vec<Segment2>,
    pub singular_points: Vec<SingularPoint>,
    pub degree: usize,
    pub refinements: usize,
}

impl ProblemSpec {
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidProblem(msg));
        if self.domain.len() < 3 {
            return bad("domain polygon needs at least 3 vertices".into());
        }
        if self.domain.iter().any(|p| !p.is_finite()) {
            return bad("domain polygon has non-finite coordinates".into());
        }
        if polygon_signed_area2(&self.domain) <= 0.0 {
            return bad("domain polygon must be counterclockwise".into());
        }
        if !(1..=2).contains(&self.degree) {
            return Err(Error::UnsupportedDegree(self.degree));
        }
        for sp in &self.singular_points {
            if !(sp.kappa > 0.0 && sp.kappa <= 0.5) {
                return Err(Error::KappaOutOfRange {
                    kappa: sp.kappa,
                    reason: "grading parameter must lie in (0, 0.5]".into(),
                });
            }
        }
        for (k, f) in self.fractures.iter().enumerate() {
            if f.length() == 0.0 {
                return bad(format!("fracture {k} has zero length"));
            }
            for end in [f.a, f.b] {
                if !point_strictly_inside(&self.domain, end) {
                    return bad(format!(
                        "fracture {k} endpoint ({}, {}) must lie strictly inside the domain",
                        end.x, end.y
                    ));
                }
                if !self
                    .singular_points
                    .iter()
                    .any(|sp| sp.point.dist(end) <= MATCH_TOL)
                {
                    return bad(format!(
                        "fracture {k} endpoint ({}, {}) is not listed as a singular point",
                        end.x, end.y
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn boundary_segments(&self) -> impl Iterator<Item = Segment2> + '_ {
        let n = self.domain.len();
        (0..n).map(move |i| Segment2::new(self.domain[i], self.domain[(i + 1) % n]))
    }

    pub fn on_boundary(&self, p: Point2) -> bool {
        self.boundary_segments()
            .any(|s| point_on_segment(p, &s, MATCH_TOL))
    }

    pub fn fracture_length(&self) -> f64 {
        self.fractures.iter().map(Segment2::length).sum()
    }
}

fn polygon_signed_area2(poly: &[Point2]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| poly[i].cross(poly[(i + 1) % n])).sum()
}

fn point_strictly_inside(poly: &[Point2], p: Point2) -> bool {
    let n = poly.len();
    for i in 0..n {
        if point_on_segment(p, &Segment2::new(poly[i], poly[(i + 1) % n]), MATCH_TOL) {
            return false;
        }
    }
    // even-odd ray casting
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Interior angle at vertex `i` of a counterclockwise simple polygon, in radians.
pub fn interior_angle(poly: &[Point2], i: usize) -> f64 {
    let n = poly.len();
    let cur = poly[i];
    let to_next = poly[(i + 1) % n] - cur;
    let to_prev = poly[(i + n - 1) % n] - cur;
    // counterclockwise sweep from the outgoing edge to the incoming one
    let ang = to_next.cross(to_prev).atan2(to_next.dot(to_prev));
    if ang <= 0.0 {
        ang + 2.0 * std::f64::consts::PI
    } else {
        ang
    }
}

/// Largest interior angle of a counterclockwise simple polygon, in radians.
pub fn largest_interior_angle(spec: &ProblemSpec) -> f64 {
    (0..spec.domain.len())
        .map(|i| interior_angle(&spec.domain, i))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point2>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub level: usize,
    /// Triangle count of the level-0 ancestor mesh.
    pub base_triangle_count: usize,
    /// Parent triangle index at the previous level (`None` at level 0).
    pub parent_of_triangle: Option<Vec<usize>>,
    /// Barycentric coordinates of each triangle's vertices inside its parent.
    pub parent_barycentric: Option<Vec<[[f64; 3]; 3]>>,
    /// Singular vertex index -> grading parameter.
    pub singular_vertices: BTreeMap<usize, f64>,
    pub boundary_vertices: BTreeSet<usize>,
    pub fracture_edges: BTreeSet<EdgeKey>,
}

impl Mesh {
    /// Level-0 mesh with boundary marks derived from the topology.
    pub fn new(vertices: Vec<Point2>, triangles: Vec<[usize; 3]>) -> Self {
        let mut mesh = Mesh {
            base_triangle_count: triangles.len(),
            vertices,
            triangles,
            level: 0,
            parent_of_triangle: None,
            parent_barycentric: None,
            singular_vertices: BTreeMap::new(),
            boundary_vertices: BTreeSet::new(),
            fracture_edges: BTreeSet::new(),
        };
        mesh.boundary_vertices = mesh
            .boundary_edges()
            .into_iter()
            .flat_map(|(i, j)| [i, j])
            .collect();
        mesh
    }

    pub fn triangle(&self, t: usize) -> Triangle2 {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Number of triangles using each edge.
    pub fn edge_usage(&self) -> HashMap<EdgeKey, u32> {
        let mut usage = HashMap::with_capacity(self.triangles.len() * 2);
        for tri in &self.triangles {
            for k in 0..3 {
                *usage.entry(edge_key(tri[k], tri[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        usage
    }

    /// Edges used by exactly one triangle, sorted.
    pub fn boundary_edges(&self) -> Vec<EdgeKey> {
        let mut edges: Vec<EdgeKey> = self
            .edge_usage()
            .into_iter()
            .filter(|&(_, n)| n == 1)
            .map(|(e, _)| e)
            .collect();
        edges.sort_unstable();
        edges
    }

    pub fn find_vertex(&self, p: Point2, tol: f64) -> Option<usize> {
        self.vertices.iter().position(|v| v.dist(p) <= tol)
    }

    pub fn min_angle(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| triangle_min_angle(&self.triangle(t)))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn fracture_edge_length(&self) -> f64 {
        self.fracture_edges
            .iter()
            .map(|&(i, j)| self.vertices[i].dist(self.vertices[j]))
            .sum()
    }

    /// Mesh-only invariants: orientation, edge conformity, singular marks.
    pub fn structural_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            let [a, b, c] = *tri;
            if a == b || b == c || a == c || orient2d(self.vertices[a], self.vertices[b], self.vertices[c]) != 1
            {
                out.push(Violation::NotCounterClockwise { triangle: t });
            }
            let n_sing = tri
                .iter()
                .filter(|v| self.singular_vertices.contains_key(v))
                .count();
            if n_sing > 1 {
                out.push(Violation::TwoSingularPointsInOneTriangle { triangle: t });
            }
        }
        for (&(i, j), &n) in &self.edge_usage() {
            if n > 2 {
                out.push(Violation::NonManifoldEdge { edge: (i, j), count: n });
            }
        }
        for (&v, &kappa) in &self.singular_vertices {
            if !(kappa > 0.0 && kappa <= 0.5) {
                out.push(Violation::KappaOutOfRange { vertex: v, kappa });
            }
        }
        let expected = self.base_triangle_count * 4usize.pow(self.level as u32);
        if self.num_triangles() != expected {
            out.push(Violation::TriangleCount {
                expected,
                actual: self.num_triangles(),
            });
        }
        out
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "vertices {} triangles {}", self.num_vertices(), self.num_triangles())?;
        for v in &self.vertices {
            writeln!(w, "{:?} {:?}", v.x, v.y)?;
        }
        for t in &self.triangles {
            writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
        }
        for (&v, &k) in &self.singular_vertices {
            writeln!(w, "singular {v} {k:?}")?;
        }
        for &(i, j) in &self.fracture_edges {
            writeln!(w, "fracture_edge {i} {j}")?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))?;
        Ok(())
    }

    /// Parse the text mesh format. The result is a level-0 mesh.
    pub fn parse(text: &str) -> Result<Mesh> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let err = |line: usize, message: String| Error::MeshFormat { line, message };

        let (hline, header) = lines.next().ok_or_else(|| err(1, "empty mesh file".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let (nv, nt) = match h.as_slice() {
            ["vertices", v, "triangles", t] => (
                v.parse::<usize>().map_err(|e| err(hline, e.to_string()))?,
                t.parse::<usize>().map_err(|e| err(hline, e.to_string()))?,
            ),
            _ => return Err(err(hline, format!("bad header `{header}`"))),
        };

        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, l) = lines.next().ok_or_else(|| err(hline, "missing vertex lines".into()))?;
            let xs = parse_floats(l).map_err(|m| err(ln, m))?;
            if xs.len() != 2 {
                return Err(err(ln, format!("expected `x y`, got `{l}`")));
            }
            vertices.push(Point2::new(xs[0], xs[1]));
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| err(hline, "missing triangle lines".into()))?;
            let ix = parse_indices(l, nv).map_err(|m| err(ln, m))?;
            if ix.len() != 3 {
                return Err(err(ln, format!("expected `i j k`, got `{l}`")));
            }
            triangles.push([ix[0], ix[1], ix[2]]);
        }
        let mut mesh = Mesh::new(vertices, triangles);
        for (ln, l) in lines {
            let mut parts = l.splitn(2, char::is_whitespace);
            match (parts.next(), parts.next()) {
                (Some("singular"), Some(rest)) => {
                    let toks: Vec<&str> = rest.split_whitespace().collect();
                    if toks.len() != 2 {
                        return Err(err(ln, "expected `singular <idx> <kappa>`".into()));
                    }
                    let idx = parse_indices(toks[0], nv).map_err(|m| err(ln, m))?[0];
                    let kappa: f64 = toks[1].parse().map_err(|_| err(ln, "bad kappa".into()))?;
                    mesh.singular_vertices.insert(idx, kappa);
                }
                (Some("fracture_edge"), Some(rest)) => {
                    let ix = parse_indices(rest, nv).map_err(|m| err(ln, m))?;
                    if ix.len() != 2 {
                        return Err(err(ln, "expected `fracture_edge <i> <j>`".into()));
                    }
                    mesh.fracture_edges.insert(edge_key(ix[0], ix[1]));
                }
                _ => return Err(err(ln, format!("unrecognized line `{l}`"))),
            }
        }
        Ok(mesh)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Mesh> {
        Mesh::parse(&fs::read_to_string(path)?)
    }
}

fn parse_floats(l: &str) -> std::result::Result<Vec<f64>, String> {
    l.split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| format!("bad number `{t}`")))
        .collect()
}

fn parse_indices(l: &str, n: usize) -> std::result::Result<Vec<usize>, String> {
    l.split_whitespace()
        .map(|t| match t.parse::<usize>() {
            Ok(i) if i < n => Ok(i),
            Ok(i) => Err(format!("vertex index {i} out of range")),
            Err(_) => Err(format!("bad index `{t}`")),
        })
        .collect()
}

pub fn triangle_min_angle(tri: &Triangle2) -> f64 {
    (0..3)
        .map(|k| {
            let a = tri[(k + 1) % 3] - tri[k];
            let b = tri[(k + 2) % 3] - tri[k];
            a.cross(b).abs().atan2(a.dot(b))
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NotCounterClockwise { triangle: usize },
    NonManifoldEdge { edge: EdgeKey, count: u32 },
    /// An edge used by a single triangle that is not part of the domain boundary
    /// (a hanging node or a hole).
    OpenInteriorEdge { edge: EdgeKey },
    TwoSingularPointsInOneTriangle { triangle: usize },
    SingularPointNotAVertex { point: Point2 },
    KappaOutOfRange { vertex: usize, kappa: f64 },
    FractureNotCovered { fracture: usize, covered: f64, length: f64 },
    StrayFractureEdge { edge: EdgeKey },
    TriangleCount { expected: usize, actual: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotCounterClockwise { triangle } => {
                write!(f, "triangle {triangle} is not counterclockwise")
            }
            Violation::NonManifoldEdge { edge, count } => {
                write!(f, "edge {edge:?} is shared by {count} triangles")
            }
            Violation::OpenInteriorEdge { edge } => {
                write!(f, "edge {edge:?} has one triangle but is not on the boundary")
            }
            Violation::TwoSingularPointsInOneTriangle { triangle } => {
                write!(f, "TwoSingularPointsInOneTriangle: triangle {triangle}")
            }
            Violation::SingularPointNotAVertex { point } => {
                write!(f, "SingularPointNotAVertex: ({}, {})", point.x, point.y)
            }
            Violation::KappaOutOfRange { vertex, kappa } => {
                write!(f, "vertex {vertex} has kappa {kappa} outside (0, 0.5]")
            }
            Violation::FractureNotCovered { fracture, covered, length } => write!(
                f,
                "fracture {fracture} has length {length} but its edges cover {covered}"
            ),
            Violation::StrayFractureEdge { edge } => {
                write!(f, "fracture edge {edge:?} does not lie on any fracture")
            }
            Violation::TriangleCount { expected, actual } => {
                write!(f, "expected {expected} triangles, found {actual}")
            }
        }
    }
}

/// Check every mesh invariant against the problem description.
pub fn validate(mesh: &Mesh, spec: &ProblemSpec) -> Vec<Violation> {
    let mut out = mesh.structural_violations();

    for (i, j) in mesh.boundary_edges() {
        let (a, b) = (mesh.vertices[i], mesh.vertices[j]);
        let on_side = spec
            .boundary_segments()
            .any(|s| point_on_segment(a, &s, MATCH_TOL) && point_on_segment(b, &s, MATCH_TOL));
        if !on_side {
            out.push(Violation::OpenInteriorEdge { edge: (i, j) });
        }
    }

    // unmarked meshes (uniform refinement across the fractures) carry no
    // singular vertices to check
    let marked = !mesh.singular_vertices.is_empty() || !mesh.fracture_edges.is_empty();
    for sp in spec.singular_points.iter().filter(|_| marked) {
        if mesh.find_vertex(sp.point, MATCH_TOL).is_none() {
            out.push(Violation::SingularPointNotAVertex { point: sp.point });
        }
    }

    if !mesh.fracture_edges.is_empty() {
        let mut covered = vec![0.0; spec.fractures.len()];
        for &(i, j) in &mesh.fracture_edges {
            let (a, b) = (mesh.vertices[i], mesh.vertices[j]);
            match spec
                .fractures
                .iter()
                .position(|f| point_on_segment(a, f, MATCH_TOL) && point_on_segment(b, f, MATCH_TOL))
            {
                Some(k) => covered[k] += a.dist(b),
                None => out.push(Violation::StrayFractureEdge { edge: (i, j) }),
            }
        }
        for (k, f) in spec.fractures.iter().enumerate() {
            let length = f.length();
            if (covered[k] - length).abs() > 1e-10 * length.max(1.0) {
                out.push(Violation::FractureNotCovered {
                    fracture: k,
                    covered: covered[k],
                    length,
                });
            }
        }
    }
    out
}

/// Initial mesh construction recipes.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshTemplate {
    /// Tensor grid with the given coordinate lines. Fractures must follow
    /// grid lines or cell diagonals.
    Grid {
        xs: Vec<f64>,
        ys: Vec<f64>,
        split: CellSplit,
    },
    /// `n x n` cells over the bounding box with alternating diagonals.
    /// Fractures may cross elements; no singular marks are attached.
    UnionJack { cells: usize },
    /// Explicit level-0 mesh file.
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellSplit {
    /// Two triangles per cell split along the rising diagonal, unless a
    /// fracture runs along the falling one.
    Diagonal,
    /// Four triangles per cell through an added center vertex.
    Cross,
}

impl fmt::Display for MeshTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshTemplate::Grid { xs, ys, split } => write!(
                f,
                "grid {}x{} cells ({})",
                xs.len() - 1,
                ys.len() - 1,
                match split {
                    CellSplit::Diagonal => "diagonal",
                    CellSplit::Cross => "cross",
                }
            ),
            MeshTemplate::UnionJack { cells } => write!(f, "union-jack({cells})"),
            MeshTemplate::File(p) => write!(f, "file {}", p.display()),
        }
    }
}

impl MeshTemplate {
    pub fn conforms_to_fractures(&self) -> bool {
        !matches!(self, MeshTemplate::UnionJack { .. })
    }
}

/// Build the level-0 mesh for a problem.
pub fn build_initial_mesh(spec: &ProblemSpec, template: &MeshTemplate) -> Result<Mesh> {
    spec.check()?;
    let mut mesh = match template {
        MeshTemplate::Grid { xs, ys, split } => grid_mesh(spec, xs, ys, *split)?,
        MeshTemplate::UnionJack { cells } => union_jack_mesh(spec, *cells)?,
        MeshTemplate::File(path) => Mesh::load(path)?,
    };

    if template.conforms_to_fractures() {
        for sp in &spec.singular_points {
            let v = mesh
                .find_vertex(sp.point, MATCH_TOL)
                .ok_or(Error::SingularPointNotAVertex { point: sp.point })?;
            mesh.vertices[v] = sp.point;
            mesh.singular_vertices.insert(v, sp.kappa);
        }
        if mesh.fracture_edges.is_empty() {
            mesh.fracture_edges = collect_fracture_edges(&mesh, spec)?;
        }
    } else {
        mesh.singular_vertices.clear();
        mesh.fracture_edges.clear();
    }

    let violations = validate(&mesh, spec);
    if let Some(v) = violations.first() {
        return Err(match *v {
            Violation::TwoSingularPointsInOneTriangle { triangle } => {
                Error::TwoSingularPointsInOneTriangle { triangle }
            }
            Violation::SingularPointNotAVertex { point } => Error::SingularPointNotAVertex { point },
            Violation::FractureNotCovered { fracture, .. } => {
                Error::FractureNotRepresentable { index: fracture }
            }
            _ => Error::InvalidMesh(
                violations
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
            ),
        });
    }
    Ok(mesh)
}

/// Mesh edges lying on some fracture; errors if a fracture is not fully covered.
fn collect_fracture_edges(mesh: &Mesh, spec: &ProblemSpec) -> Result<BTreeSet<EdgeKey>> {
    let mut edges = BTreeSet::new();
    let mut covered = vec![0.0; spec.fractures.len()];
    for (i, j) in mesh.edge_usage().into_keys() {
        let (a, b) = (mesh.vertices[i], mesh.vertices[j]);
        if let Some(k) = spec
            .fractures
            .iter()
            .position(|f| point_on_segment(a, f, MATCH_TOL) && point_on_segment(b, f, MATCH_TOL))
        {
            edges.insert((i, j));
            covered[k] += a.dist(b);
        }
    }
    for (k, f) in spec.fractures.iter().enumerate() {
        if (covered[k] - f.length()).abs() > 1e-10 * f.length().max(1.0) {
            return Err(Error::FractureNotRepresentable { index: k });
        }
    }
    Ok(edges)
}

fn bounding_box(poly: &[Point2]) -> (Point2, Point2) {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in poly {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo, hi)
}

fn is_axis_rectangle(poly: &[Point2]) -> bool {
    let (lo, hi) = bounding_box(poly);
    poly.len() == 4
        && poly.iter().all(|p| {
            ((p.x - lo.x).abs() <= MATCH_TOL || (p.x - hi.x).abs() <= MATCH_TOL)
                && ((p.y - lo.y).abs() <= MATCH_TOL || (p.y - hi.y).abs() <= MATCH_TOL)
        })
}

fn union_jack_mesh(spec: &ProblemSpec, cells: usize) -> Result<Mesh> {
    let (lo, hi) = bounding_box(&spec.domain);
    if !is_axis_rectangle(&spec.domain) || ((hi.x - lo.x) - (hi.y - lo.y)).abs() > MATCH_TOL {
        return Err(Error::InvalidProblem(
            "union-jack meshes require a square domain".into(),
        ));
    }
    if cells == 0 {
        return Err(Error::InvalidProblem("union-jack needs at least one cell".into()));
    }
    let lines: Vec<f64> = (0..=cells).map(|k| k as f64 / cells as f64).collect();
    let xs: Vec<f64> = lines.iter().map(|t| lo.x + t * (hi.x - lo.x)).collect();
    let ys: Vec<f64> = lines.iter().map(|t| lo.y + t * (hi.y - lo.y)).collect();
    Ok(tensor_mesh(&xs, &ys, |i, j| (i + j) % 2 == 0, CellSplit::Diagonal))
}

fn grid_mesh(spec: &ProblemSpec, xs: &[f64], ys: &[f64], split: CellSplit) -> Result<Mesh> {
    let increasing = |v: &[f64]| v.len() >= 2 && v.windows(2).all(|w| w[0] < w[1]);
    if !increasing(xs) || !increasing(ys) {
        return Err(Error::InvalidProblem(
            "grid lines must be strictly increasing with at least two entries".into(),
        ));
    }
    let (lo, hi) = bounding_box(&spec.domain);
    let fits = (xs[0] - lo.x).abs() <= MATCH_TOL
        && (xs[xs.len() - 1] - hi.x).abs() <= MATCH_TOL
        && (ys[0] - lo.y).abs() <= MATCH_TOL
        && (ys[ys.len() - 1] - hi.y).abs() <= MATCH_TOL;
    if !is_axis_rectangle(&spec.domain) || !fits {
        return Err(Error::InvalidProblem(
            "grid templates require a rectangular domain matching the outer grid lines".into(),
        ));
    }
    // "/" diagonal from (x_i, y_j) to (x_{i+1}, y_{j+1}) unless a fracture
    // runs along the other one
    let along = |a: Point2, b: Point2| {
        let mid = a.lerp(b, 0.5);
        spec.fractures.iter().any(|f| {
            point_on_segment(a, f, MATCH_TOL)
                && point_on_segment(b, f, MATCH_TOL)
                && point_on_segment(mid, f, MATCH_TOL)
        })
    };
    let rising = |i: usize, j: usize| {
        let falls = along(Point2::new(xs[i], ys[j + 1]), Point2::new(xs[i + 1], ys[j]));
        !falls
    };
    Ok(tensor_mesh(xs, ys, rising, split))
}

/// Triangulate a tensor grid. `rising(i, j)` picks the diagonal of cell `(i, j)`.
fn tensor_mesh(
    xs: &[f64],
    ys: &[f64],
    rising: impl Fn(usize, usize) -> bool,
    split: CellSplit,
) -> Mesh {
    let nx = xs.len();
    let id = |i: usize, j: usize| j * nx + i;
    let mut vertices: Vec<Point2> = ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| Point2::new(x, y)))
        .collect();
    let mut triangles = Vec::new();
    for j in 0..ys.len() - 1 {
        for i in 0..nx - 1 {
            let (v00, v10, v11, v01) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            match split {
                CellSplit::Diagonal => {
                    if rising(i, j) {
                        triangles.push([v00, v10, v11]);
                        triangles.push([v00, v11, v01]);
                    } else {
                        triangles.push([v00, v10, v01]);
                        triangles.push([v10, v11, v01]);
                    }
                }
                CellSplit::Cross => {
                    let c = vertices.len();
                    vertices.push(Point2::new(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])));
                    triangles.push([v00, v10, c]);
                    triangles.push([v10, v11, c]);
                    triangles.push([v11, v01, c]);
                    triangles.push([v01, v00, c]);
                }
            }
        }
    }
    Mesh::new(vertices, triangles)
}

/// Map a point given in a level-`level_from` triangle down to its ancestor at
/// `level_to`. `meshes[k]` must be the level-`k` mesh.
pub fn locate_in_ancestor(
    meshes: &[Mesh],
    level_from: usize,
    triangle: usize,
    bary: [f64; 3],
    level_to: usize,
) -> Result<(usize, [f64; 3])> {
    if level_to > level_from || level_from >= meshes.len() {
        return Err(Error::BrokenLineage {
            level: level_from,
            triangle,
        });
    }
    let (mut t, mut l) = (triangle, bary);
    for level in (level_to + 1..=level_from).rev() {
        let mesh = &meshes[level];
        let broken = Error::BrokenLineage { level, triangle: t };
        if mesh.level != level || t >= mesh.num_triangles() {
            return Err(broken);
        }
        let (Some(parents), Some(pb)) = (&mesh.parent_of_triangle, &mesh.parent_barycentric) else {
            return Err(broken);
        };
        let parent = parents[t];
        if parent >= meshes[level - 1].num_triangles() {
            return Err(broken);
        }
        l = to_parent_barycentric(&pb[t], l);
        t = parent;
    }
    Ok((t, l))
}

/// Compose child barycentric coordinates with the child-in-parent map.
pub fn to_parent_barycentric(child_in_parent: &[[f64; 3]; 3], l: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, row) in child_in_parent.iter().enumerate() {
        for m in 0..3 {
            out[m] += l[k] * row[m];
        }
    }
    out
}

/// Physical location of a barycentric point in triangle `t`.
pub fn physical_point(mesh: &Mesh, t: usize, l: [f64; 3]) -> Point2 {
    from_barycentric(&mesh.triangle(t), l)
}

/// Brute-force containing-triangle search; used by tests and diagnostics.
pub fn find_containing_triangle(mesh: &Mesh, p: Point2, tol: f64) -> Option<usize> {
    (0..mesh.num_triangles()).find(|&t| geometry::point_in_triangle(&mesh.triangle(t), p, tol))
}

pub fn total_area(mesh: &Mesh) -> f64 {
    (0..mesh.num_triangles())
        .map(|t| 0.5 * signed_area2(&mesh.triangle(t)))
        .sum()
}
