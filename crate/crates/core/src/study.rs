//! Convergence studies on nested meshes.
//!
//! The exact solution is never available, so convergence is measured with the
//! nested differences `d_j = |u_j - u_{j-1}|_{H^1}` and the rate
//! `e_j = log2(d_j / d_{j+1})`.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::{
    apply_dirichlet, assemble_line_load, assemble_stiffness, Degree, DofMap, ElementMap, FeFunction,
    QuadratureRule,
};
use crate::linalg::{cg_solve, default_max_iter, CgOptions, SolveReport, SparseSystem};
use crate::mesh::{build_initial_mesh, to_parent_barycentric, Mesh, MeshTemplate, ProblemSpec};
use crate::refine::graded_refine;

/// `|fine - coarse|_{H^1}` where `coarse` lives on the parent level of `fine`.
///
/// Both gradients are polynomial on every fine element, so the degree-4 rule
/// integrates the squared difference exactly.
pub fn h1_seminorm_diff(fine: &FeFunction, coarse: &FeFunction) -> Result<f64> {
    let fmesh = &fine.dofmap.mesh;
    let cmesh = &coarse.dofmap.mesh;
    let (Some(parents), Some(pb)) = (&fmesh.parent_of_triangle, &fmesh.parent_barycentric) else {
        return Err(Error::NotNested("fine mesh has no parent links".into()));
    };
    if fmesh.level != cmesh.level + 1 || fmesh.num_triangles() != 4 * cmesh.num_triangles() {
        return Err(Error::NotNested(format!(
            "level {} ({} triangles) is not the child of level {} ({} triangles)",
            fmesh.level,
            fmesh.num_triangles(),
            cmesh.level,
            cmesh.num_triangles()
        )));
    }
    let rule = QuadratureRule::triangle_degree4();
    let mut sum = 0.0;
    for t in 0..fmesh.num_triangles() {
        let fmap = ElementMap::new(&fmesh.triangle(t));
        let parent = parents[t];
        let cmap = ElementMap::new(&cmesh.triangle(parent));
        let mut local = 0.0;
        for (l, w) in rule.iter() {
            let (_, gf) = fine.evaluate_with(&fmap, t, *l);
            let (_, gc) = coarse.evaluate_with(&cmap, parent, to_parent_barycentric(&pb[t], *l));
            let d = gf - gc;
            local += w * d.dot(d);
        }
        sum += local * fmap.area();
    }
    Ok(sum.sqrt())
}

/// `log2(d_prev / d_next)`.
pub fn rate(d_prev: f64, d_next: f64) -> Result<f64> {
    if !(d_prev > 0.0 && d_next > 0.0) {
        return Err(Error::NonpositiveDifference {
            prev: d_prev,
            next: d_next,
        });
    }
    Ok((d_prev / d_next).log2())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyOptions {
    pub rel_tol: f64,
    /// `None` selects the size-dependent default.
    pub max_iter: Option<usize>,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self {
            rel_tol: CgOptions::DEFAULT_REL_TOL,
            max_iter: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecord {
    pub level: usize,
    pub dofs: usize,
    pub triangles: usize,
    pub solve: SolveReport,
    /// `|u_j - u_{j-1}|_{H^1}`, absent at level 0.
    pub h1_diff: Option<f64>,
    /// `e_j`, present when levels `j - 1`, `j`, `j + 1` were all solved.
    pub rate: Option<f64>,
    /// Sum of the assembled load vector (before boundary elimination).
    pub load_total: f64,
    /// `max |A - A^T|` of the assembled stiffness matrix.
    pub asymmetry: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub levels: Vec<LevelRecord>,
    pub degree: usize,
    pub kappas: Vec<f64>,
    pub template: String,
}

impl StudyReport {
    pub fn rate_at(&self, level: usize) -> Option<f64> {
        self.levels.get(level).and_then(|r| r.rate)
    }

    /// CSV with columns `level,dofs,triangles,cg_iters,h1_diff,rate`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,dofs,triangles,cg_iters,h1_diff,rate\n");
        for r in &self.levels {
            let diff = r.h1_diff.map(|d| format!("{d:.9e}")).unwrap_or_default();
            let rate = r.rate.map(|e| format!("{e:.6}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.level, r.dofs, r.triangles, r.solve.iterations, diff, rate
            );
        }
        out
    }

    /// Least-squares slope of `log d_{j+1}` against `log dim(S_j)` over the
    /// last `count` levels where both are known.
    pub fn dof_scaling_slope(&self, count: usize) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .levels
            .windows(2)
            .filter_map(|w| Some(((w[0].dofs as f64).ln(), w[1].h1_diff?.ln())))
            .collect();
        if pts.len() < count || count < 2 {
            return None;
        }
        let pts = &pts[pts.len() - count..];
        let n = count as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    }
}

/// One solved level.
#[derive(Debug, Clone)]
pub struct LevelSolution {
    pub solution: FeFunction,
    pub report: SolveReport,
    pub load_total: f64,
    pub asymmetry: f64,
}

impl LevelSolution {
    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.solution.dofmap.mesh
    }
}

/// Assemble and solve the discrete problem on one mesh.
pub fn solve_on_mesh(mesh: Arc<Mesh>, spec: &ProblemSpec, options: &StudyOptions) -> Result<LevelSolution> {
    let degree = Degree::from_order(spec.degree)?;
    let dofmap = Arc::new(DofMap::new(mesh, degree));
    let matrix = assemble_stiffness(&dofmap)?;
    let asymmetry = matrix.asymmetry();
    let rhs = assemble_line_load(&dofmap, &spec.fractures);
    let load_total = rhs.iter().sum();
    let system = apply_dirichlet(SparseSystem { matrix, rhs }, &dofmap.boundary_dofs());
    let max_iter = options
        .max_iter
        .unwrap_or_else(|| default_max_iter(system.dim()));
    let (x, report) = cg_solve(&system, options.rel_tol, max_iter)?;
    Ok(LevelSolution {
        solution: FeFunction::new(dofmap, x)?,
        report,
        load_total,
        asymmetry,
    })
}

/// Build level 0, refine `n_levels` times and solve on every level.
pub fn run_study(
    spec: &ProblemSpec,
    template: &MeshTemplate,
    n_levels: usize,
    options: &StudyOptions,
) -> Result<StudyReport> {
    run_study_with(spec, template, n_levels, options, |_| Ok(()))
}

/// [`run_study`] with a callback receiving every solved level.
pub fn run_study_with(
    spec: &ProblemSpec,
    template: &MeshTemplate,
    n_levels: usize,
    options: &StudyOptions,
    mut on_level: impl FnMut(&LevelSolution) -> Result<()>,
) -> Result<StudyReport> {
    if n_levels < 2 {
        return Err(Error::InvalidProblem(
            "a convergence study needs at least two refinements".into(),
        ));
    }
    let mut report = StudyReport {
        levels: Vec::with_capacity(n_levels + 1),
        degree: spec.degree,
        kappas: spec.singular_points.iter().map(|s| s.kappa).collect(),
        template: template.to_string(),
    };
    let mut mesh = Arc::new(build_initial_mesh(spec, template)?);
    let mut previous: Option<LevelSolution> = None;
    for level in 0..=n_levels {
        if level > 0 {
            mesh = Arc::new(graded_refine(&mesh)?.0);
        }
        let current = solve_on_mesh(mesh.clone(), spec, options)?;
        on_level(&current)?;
        let h1_diff = match &previous {
            Some(prev) => Some(h1_seminorm_diff(&current.solution, &prev.solution)?),
            None => None,
        };
        if let (Some(next), Some(rec)) = (h1_diff, report.levels.last_mut()) {
            if let Some(prev) = rec.h1_diff {
                rec.rate = Some(rate(prev, next)?);
            }
        }
        report.levels.push(LevelRecord {
            level,
            dofs: current.solution.dofmap.num_dofs(),
            triangles: mesh.num_triangles(),
            solve: current.report,
            h1_diff,
            rate: None,
            load_total: current.load_total,
            asymmetry: current.asymmetry,
        });
        if !current.report.converged {
            break;
        }
        previous = Some(current);
    }
    Ok(report)
}
