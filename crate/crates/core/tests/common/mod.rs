#![allow(dead_code)]

use std::path::PathBuf;

use fracfem::config::{ResolvedStudy, StudyConfig};
use fracfem::geometry::{Point2, Segment2};
use fracfem::mesh::{CellSplit, MeshTemplate, ProblemSpec, SingularKind, SingularPoint};

pub fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

pub fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

pub fn bundled(name: &str) -> ResolvedStudy {
    let path = configs_dir().join(format!("{name}.toml"));
    StudyConfig::load(&path)
        .and_then(|c| c.resolve())
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn unit_square() -> Vec<Point2> {
    vec![p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)]
}

pub fn endpoint(q: Point2, kappa: f64) -> SingularPoint {
    SingularPoint {
        point: q,
        kappa,
        kind: SingularKind::FractureEndpoint,
    }
}

/// Unit square with fractures whose endpoints all get `kappa`.
pub fn square_problem(fractures: &[(Point2, Point2)], kappa: f64, degree: usize) -> ProblemSpec {
    ProblemSpec {
        domain: unit_square(),
        fractures: fractures.iter().map(|&(a, b)| Segment2::new(a, b)).collect(),
        singular_points: fractures
            .iter()
            .flat_map(|&(a, b)| [endpoint(a, kappa), endpoint(b, kappa)])
            .collect(),
        degree,
        refinements: 0,
    }
}

pub fn grid(lines: &[f64], split: CellSplit) -> MeshTemplate {
    MeshTemplate::Grid {
        xs: lines.to_vec(),
        ys: lines.to_vec(),
        split,
    }
}

/// Gaussian elimination with partial pivoting on a dense copy.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        assert!(d != 0.0, "singular matrix");
        for row in col + 1..n {
            let f = a[row][col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
