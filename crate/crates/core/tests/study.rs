mod common;

use common::{p, square_problem};
use fracfem::mesh::{build_initial_mesh, validate, CellSplit, MeshTemplate};
use fracfem::refine::refine_levels;
use fracfem::study::{run_study, StudyOptions};

fn quarter_cross() -> MeshTemplate {
    common::grid(&[0.0, 0.25, 0.5, 0.75, 1.0], CellSplit::Cross)
}

#[test]
fn rates_fill_interior_levels() {
    let spec = square_problem(&[(p(0.25, 0.5), p(0.75, 0.5))], 0.2, 1);
    let report = run_study(&spec, &quarter_cross(), 3, &StudyOptions::default()).unwrap();
    assert_eq!(report.levels.len(), 4);
    assert!(report.levels[0].h1_diff.is_none());
    assert!(report.levels[1..].iter().all(|r| r.h1_diff.unwrap() > 0.0));
    let with_rate: Vec<usize> = report.levels.iter().filter(|r| r.rate.is_some()).map(|r| r.level).collect();
    assert_eq!(with_rate, vec![1, 2]);
    let d: Vec<f64> = report.levels[1..].iter().map(|r| r.h1_diff.unwrap()).collect();
    assert!((report.rate_at(1).unwrap() - (d[0] / d[1]).log2()).abs() < 1e-15);
    assert_eq!(report.kappas, vec![0.2, 0.2]);
    assert!(report.levels.iter().all(|r| r.solve.converged));
}

#[test]
fn too_few_levels_rejected() {
    let spec = square_problem(&[(p(0.25, 0.5), p(0.75, 0.5))], 0.2, 1);
    assert!(run_study(&spec, &quarter_cross(), 1, &StudyOptions::default()).is_err());
}

#[test]
fn studies_are_deterministic() {
    let spec = square_problem(&[(p(0.2, 0.2), p(0.8, 0.8))], 0.3, 2);
    let tpl = common::grid(&[0.0, 0.2, 0.4, 0.6, 0.8, 1.0], CellSplit::Diagonal);
    let a = run_study(&spec, &tpl, 3, &StudyOptions::default()).unwrap();
    let b = run_study(&spec, &tpl, 3, &StudyOptions::default()).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a, b);
}

#[test]
fn unconverged_level_ends_the_report() {
    let spec = square_problem(&[(p(0.25, 0.5), p(0.75, 0.5))], 0.2, 1);
    let options = StudyOptions {
        rel_tol: 1e-10,
        max_iter: Some(20),
    };
    let report = run_study(&spec, &quarter_cross(), 4, &options).unwrap();
    let last = report.levels.last().unwrap();
    assert!(!last.solve.converged);
    assert!(report.levels.len() < 5);
}

// A fracture that no refinement level aligns with: the mesh never resolves
// the kink across it and the rate stays near 1/2.
#[test]
fn crossing_fracture_rate_is_suboptimal() {
    let y = 1.0 / 3.0;
    let spec = square_problem(&[(p(0.25, y), p(0.75, y))], 0.5, 1);
    let report = run_study(&spec, &MeshTemplate::UnionJack { cells: 8 }, 5, &StudyOptions::default()).unwrap();
    for r in &report.levels {
        if let Some(e) = r.rate {
            assert!(e < 0.55, "level {}: {e}", r.level);
        }
    }
    assert!(report.rate_at(4).unwrap() > 0.4);
}

#[test]
fn bundled_configs_build_valid_meshes() {
    let mut count = 0;
    for entry in std::fs::read_dir(common::configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let name = path.file_stem().unwrap().to_str().unwrap().to_string();
        let r = common::bundled(&name);
        let base = build_initial_mesh(&r.spec, &r.template).unwrap();
        for m in refine_levels(base, 2).unwrap() {
            assert!(validate(&m, &r.spec).is_empty(), "{name}");
        }
        count += 1;
    }
    assert!(count >= 26);
}
