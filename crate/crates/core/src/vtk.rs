//! Legacy ASCII VTK output of finite element solutions.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;
use crate::fem::{Degree, FeFunction};

const VTK_TRIANGLE: u8 = 5;
const VTK_QUADRATIC_TRIANGLE: u8 = 22;

/// Write `f` as an unstructured grid with one point per dof.
///
/// P2 cells use the quadratic triangle type, whose node order (vertices, then
/// edges 01, 12, 20) matches the local dof order.
pub fn write_solution(mut w: impl Write, f: &FeFunction, title: &str) -> std::io::Result<()> {
    let dm = &f.dofmap;
    let per = dm.degree.local_dofs();
    let n_cells = dm.mesh.num_triangles();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{}", title.replace('\n', " "))?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", dm.num_dofs())?;
    for p in dm.coordinates() {
        writeln!(w, "{:?} {:?} 0", p.x, p.y)?;
    }
    writeln!(w, "CELLS {} {}", n_cells, n_cells * (per + 1))?;
    for t in 0..n_cells {
        write!(w, "{per}")?;
        for d in dm.cell(t) {
            write!(w, " {d}")?;
        }
        writeln!(w)?;
    }
    writeln!(w, "CELL_TYPES {n_cells}")?;
    let cell_type = match dm.degree {
        Degree::P1 => VTK_TRIANGLE,
        Degree::P2 => VTK_QUADRATIC_TRIANGLE,
    };
    for _ in 0..n_cells {
        writeln!(w, "{cell_type}")?;
    }
    writeln!(w, "POINT_DATA {}", dm.num_dofs())?;
    writeln!(w, "SCALARS u double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for c in &f.coeffs {
        writeln!(w, "{c:?}")?;
    }
    Ok(())
}

pub fn save_solution(path: impl AsRef<Path>, f: &FeFunction, title: &str) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_solution(&mut w, f, title)?;
    w.flush()?;
    Ok(())
}
