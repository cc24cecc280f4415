//! Field writers (CSV, legacy VTK) and JSON reports.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use porous_adjoint::{CellField, FaceField, StaggeredGrid};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Vtk,
}

/// A file to be written, rendered fully in memory first.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    pub fn new(name: impl Into<String>, contents: String) -> Self {
        Self {
            name: name.into(),
            contents,
        }
    }

    pub fn json<T: Serialize>(name: impl Into<String>, value: &T) -> Self {
        let mut text = serde_json::to_string_pretty(value).expect("report serializes");
        text.push('\n');
        Self::new(name, text)
    }
}

/// Writes every artifact into `dir`, creating it if needed.
pub fn write_all(dir: &Path, artifacts: &[Artifact]) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let path = dir.join(&a.name);
        std::fs::write(&path, &a.contents)?;
        written.push(path);
    }
    Ok(written)
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// Cell field as `i,j,x,y,value` rows.
pub fn cell_csv(grid: &StaggeredGrid, f: &CellField) -> String {
    let mut out = String::from("i,j,x,y,value\n");
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (x, y) = grid.cell_center(i, j);
            let v = f.values[grid.cell(i, j)];
            writeln!(out, "{i},{j},{},{},{}", sci(x), sci(y), sci(v)).unwrap();
        }
    }
    out
}

/// Face field averaged to cell centres, as `i,j,x,y,component,value` rows.
pub fn face_csv(grid: &StaggeredGrid, f: &FaceField) -> String {
    let (cx, cy) = f.cell_centered(grid);
    let mut out = String::from("i,j,x,y,component,value\n");
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (x, y) = grid.cell_center(i, j);
            let c = grid.cell(i, j);
            for (name, v) in [("x", cx.values[c]), ("y", cy.values[c])] {
                writeln!(out, "{i},{j},{},{},{name},{}", sci(x), sci(y), sci(v)).unwrap();
            }
        }
    }
    out
}

/// Reads the value column of a cell CSV, ordered by `(j, i)` as written.
/// Files without a header are read as one number per line.
pub fn parse_cell_csv(text: &str) -> Result<Vec<f64>, String> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .peekable();
    let has_header = lines
        .peek()
        .is_some_and(|l| l.starts_with(|c: char| c.is_ascii_alphabetic()));
    let column = if has_header {
        let header = lines.next().unwrap();
        header
            .split(',')
            .position(|h| h.trim() == "value")
            .ok_or_else(|| format!("header '{header}' has no value column"))?
    } else {
        0
    };
    lines
        .enumerate()
        .map(|(n, line)| {
            let field = line
                .split(',')
                .nth(column)
                .ok_or_else(|| format!("row {} is too short", n + 1))?;
            field
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("row {}: {e}", n + 1))
        })
        .collect()
}

pub fn read_cell_csv(path: &Path) -> Result<Vec<f64>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    parse_cell_csv(&text)
}

/// Legacy ASCII VTK with cell-centred scalars and an optional vector field.
pub fn vtk(
    grid: &StaggeredGrid,
    title: &str,
    scalars: &[(&str, &CellField)],
    vectors: &[(&str, &FaceField)],
) -> String {
    let mut out = String::new();
    writeln!(out, "# vtk DataFile Version 3.0").unwrap();
    writeln!(out, "{title}").unwrap();
    writeln!(out, "ASCII").unwrap();
    writeln!(out, "DATASET STRUCTURED_POINTS").unwrap();
    writeln!(out, "DIMENSIONS {} {} 1", grid.nx + 1, grid.ny + 1).unwrap();
    writeln!(out, "ORIGIN 0 0 0").unwrap();
    writeln!(out, "SPACING {} {} 1", sci(grid.hx), sci(grid.hy)).unwrap();
    writeln!(out, "CELL_DATA {}", grid.n_cells()).unwrap();
    for (name, f) in scalars {
        writeln!(out, "SCALARS {name} double 1").unwrap();
        writeln!(out, "LOOKUP_TABLE default").unwrap();
        for v in &f.values {
            writeln!(out, "{}", sci(*v)).unwrap();
        }
    }
    for (name, f) in vectors {
        let (cx, cy) = f.cell_centered(grid);
        writeln!(out, "VECTORS {name} double").unwrap();
        for (x, y) in cx.values.iter().zip(&cy.values) {
            writeln!(out, "{} {} 0", sci(*x), sci(*y)).unwrap();
        }
    }
    out
}
