//! Legacy VTK output and a plain-text mesh dump.

use std::io::Write;

use crate::assembly::DiscreteSolution;
use crate::error::Result;
use crate::fem::Discretization;
use crate::mesh::{BoundaryKind, Mesh};

/// Triangle mesh with optional named cell fields, as a legacy ASCII
/// unstructured grid.
pub fn write_vtk(mut w: impl Write, mesh: &Mesh, cell_fields: &[(&str, &[f64])]) -> Result<()> {
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "oseen-afem mesh")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", mesh.n_vertices())?;
    for v in mesh.vertices() {
        writeln!(w, "{:.17e} {:.17e} 0", v[0], v[1])?;
    }
    writeln!(w, "CELLS {} {}", mesh.n_cells(), 4 * mesh.n_cells())?;
    for c in mesh.cells() {
        writeln!(w, "3 {} {} {}", c[0], c[1], c[2])?;
    }
    writeln!(w, "CELL_TYPES {}", mesh.n_cells())?;
    for _ in 0..mesh.n_cells() {
        writeln!(w, "5")?;
    }
    if !cell_fields.is_empty() {
        writeln!(w, "CELL_DATA {}", mesh.n_cells())?;
        for (name, values) in cell_fields {
            writeln!(w, "SCALARS {name} double 1")?;
            writeln!(w, "LOOKUP_TABLE default")?;
            for v in values.iter() {
                writeln!(w, "{v:.17e}")?;
            }
        }
    }
    Ok(())
}

/// Mesh plus the vertex values of the discrete velocity and pressure.
pub fn write_solution_vtk(mut w: impl Write, disc: &Discretization, sol: &DiscreteSolution, cell_fields: &[(&str, &[f64])]) -> Result<()> {
    let mut buf = Vec::new();
    write_vtk(&mut buf, &disc.mesh, cell_fields)?;
    w.write_all(&buf)?;
    let nv = disc.mesh.n_vertices();
    // vertex nodes come first in every scalar numbering
    writeln!(w, "POINT_DATA {nv}")?;
    writeln!(w, "VECTORS velocity double")?;
    for i in 0..nv {
        writeln!(w, "{:.17e} {:.17e} 0", sol.velocity[0][i], sol.velocity[1][i])?;
    }
    writeln!(w, "SCALARS pressure double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for i in 0..nv {
        writeln!(w, "{:.17e}", sol.pressure[i])?;
    }
    Ok(())
}

/// Vertices, cells and boundary facet markers, one entity per line.
pub fn write_mesh_dump(mut w: impl Write, mesh: &Mesh) -> Result<()> {
    writeln!(w, "vertices {}", mesh.n_vertices())?;
    for v in mesh.vertices() {
        writeln!(w, "{:.17e} {:.17e}", v[0], v[1])?;
    }
    writeln!(w, "cells {}", mesh.n_cells())?;
    for c in mesh.cells() {
        writeln!(w, "{} {} {}", c[0], c[1], c[2])?;
    }
    let boundary: Vec<_> = mesh.facets().iter().filter(|f| f.boundary.is_some()).collect();
    writeln!(w, "boundary_facets {}", boundary.len())?;
    for f in boundary {
        let tag = match f.boundary {
            Some(BoundaryKind::Dirichlet) => "D",
            Some(BoundaryKind::Neumann) => "N",
            None => unreachable!(),
        };
        writeln!(w, "{} {} {tag}", f.vertices[0], f.vertices[1])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_unit_square;

    #[test]
    fn level_zero_dump_is_stable() {
        let mut buf = Vec::new();
        write_mesh_dump(&mut buf, &build_unit_square(0)).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "vertices 4");
        assert_eq!(lines[5], "cells 2");
        assert_eq!(lines[8], "boundary_facets 4");
        assert!(lines[9..].iter().all(|l| l.ends_with(" D")));
    }

    #[test]
    fn vtk_has_cell_data() {
        let mesh = build_unit_square(1);
        let field = vec![1.0; mesh.n_cells()];
        let mut buf = Vec::new();
        write_vtk(&mut buf, &mesh, &[("eta", &field)]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.contains("CELLS 8 32"));
        assert!(s.contains("SCALARS eta double 1"));
    }
}
