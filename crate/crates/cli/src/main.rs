use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use fracfem::config::{KappaSetting, StudyConfig};
use fracfem::mesh::build_initial_mesh;
use fracfem::refine::graded_refine;
use fracfem::study::{run_study_with, solve_on_mesh};
use fracfem::vtk;

/// Graded-mesh finite element studies for Poisson problems with line sources.
#[derive(Parser)]
#[command(name = "fracfem", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve on every level and write report.csv plus one solution dump per level.
    Study(Common),
    /// Write the mesh after the requested number of refinements.
    Mesh(Common),
    /// Solve at the requested depth and write one solution dump.
    Solve(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Number of refinements (overrides the config).
    #[arg(long)]
    levels: Option<usize>,
    /// Polynomial degree, 1 or 2.
    #[arg(long)]
    degree: Option<usize>,
    /// Grading parameter for fracture endpoints: a number or `auto:a`.
    #[arg(long)]
    kappa: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker thread cap.
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<StudyConfig> {
        let mut cfg = StudyConfig::load(&self.config)?;
        if let Some(n) = self.levels {
            cfg.levels = n;
        }
        if let Some(m) = self.degree {
            cfg.degree = m;
        }
        if let Some(k) = &self.kappa {
            let setting: KappaSetting = k.parse()?;
            cfg.kappa = Some(setting);
            for f in &mut cfg.fractures {
                f.kappa = None;
            }
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        Ok(cfg)
    }
}

fn out_dir(cfg: &StudyConfig) -> Result<PathBuf> {
    let dir = cfg.output_dir();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn study(cfg: &StudyConfig) -> Result<()> {
    let resolved = cfg.resolve()?;
    let dir = out_dir(cfg)?;
    let report = run_study_with(
        &resolved.spec,
        &resolved.template,
        cfg.levels,
        &resolved.options,
        |level| {
            let mesh = level.mesh();
            let path = dir.join(format!("solution_level{}.vtk", mesh.level));
            vtk::save_solution(&path, &level.solution, &format!("u level {}", mesh.level))
        },
    )?;
    let csv = report.to_csv();
    let path = dir.join("report.csv");
    fs::write(&path, &csv).with_context(|| format!("writing {}", path.display()))?;
    print!("{csv}");
    if let Some(bad) = report.levels.iter().find(|r| !r.solve.converged) {
        eprintln!(
            "warning: CG did not converge at level {} (relative residual {:.3e})",
            bad.level, bad.solve.relative_residual
        );
    }
    Ok(())
}

fn refined_mesh(cfg: &StudyConfig) -> Result<(fracfem::mesh::Mesh, fracfem::config::ResolvedStudy)> {
    let resolved = cfg.resolve()?;
    let mut mesh = build_initial_mesh(&resolved.spec, &resolved.template)?;
    for _ in 0..cfg.levels {
        mesh = graded_refine(&mesh)?.0;
    }
    Ok((mesh, resolved))
}

fn mesh(cfg: &StudyConfig) -> Result<()> {
    let (mesh, _) = refined_mesh(cfg)?;
    let path = out_dir(cfg)?.join(format!("mesh_level{}.mesh", mesh.level));
    mesh.save(&path)?;
    println!(
        "{}: {} vertices, {} triangles",
        path.display(),
        mesh.num_vertices(),
        mesh.num_triangles()
    );
    Ok(())
}

fn solve(cfg: &StudyConfig) -> Result<()> {
    let (mesh, resolved) = refined_mesh(cfg)?;
    let level = mesh.level;
    let sol = solve_on_mesh(Arc::new(mesh), &resolved.spec, &resolved.options)?;
    let path = out_dir(cfg)?.join(format!("solution_level{level}.vtk"));
    vtk::save_solution(&path, &sol.solution, &format!("u level {level}"))?;
    println!(
        "{}: {} dofs, {} CG iterations, relative residual {:.3e}",
        path.display(),
        sol.solution.dofmap.num_dofs(),
        sol.report.iterations,
        sol.report.relative_residual
    );
    anyhow::ensure!(sol.report.converged, "CG did not converge");
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let (common, action): (&Common, fn(&StudyConfig) -> Result<()>) = match &cli.command {
        Command::Study(c) => (c, study),
        Command::Mesh(c) => (c, mesh),
        Command::Solve(c) => (c, solve),
    };
    if let Some(k) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build_global()
            .context("configuring worker threads")?;
    }
    let cfg = common.load()?;
    action(&cfg).with_context(|| format!("config {}", display(&common.config)))
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
