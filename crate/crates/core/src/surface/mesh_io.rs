//! Line-oriented mesh text format.
//!
//! ```text
//! # comment
//! v <x> <y>          vertex in the unit disk
//! t <i> <j> <k>      counter-clockwise triangle (0-based vertex indices)
//! p <i> <j> <g>      vertex j is the image of vertex i under generator g
//! ```

use std::fmt::Write as _;

use super::bolza::FuchsianSurface;
use super::mesh::SurfaceMesh;
use crate::error::{Error, Result};
use crate::linalg::C64;

pub fn write_mesh(mesh: &SurfaceMesh) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {} vertices, {} triangles, {} identifications",
        mesh.points.len(),
        mesh.triangles.len(),
        mesh.pairings.len()
    );
    for p in &mesh.points {
        let _ = writeln!(out, "v {:.17e} {:.17e}", p.re, p.im);
    }
    for t in &mesh.triangles {
        let _ = writeln!(out, "t {} {} {}", t[0], t[1], t[2]);
    }
    for &(i, j, g) in &mesh.pairings {
        let _ = writeln!(out, "p {i} {j} {g}");
    }
    out
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse {what} from `{tok}`"),
    })
}

pub fn read_mesh(text: &str, surface: &FuchsianSurface) -> Result<SurfaceMesh> {
    let mut points = Vec::new();
    let mut triangles = Vec::new();
    let mut pairings = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut toks = body.split_whitespace();
        let tag = toks.next().unwrap_or("");
        match tag {
            "v" => {
                let x: f64 = field(toks.next(), line, "x")?;
                let y: f64 = field(toks.next(), line, "y")?;
                points.push(C64::new(x, y));
            }
            "t" => {
                let i = field(toks.next(), line, "vertex index")?;
                let j = field(toks.next(), line, "vertex index")?;
                let k = field(toks.next(), line, "vertex index")?;
                triangles.push([i, j, k]);
            }
            "p" => {
                let i = field(toks.next(), line, "vertex index")?;
                let j = field(toks.next(), line, "vertex index")?;
                let g = field(toks.next(), line, "generator index")?;
                pairings.push((i, j, g));
            }
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown record `{other}`"),
                })
            }
        }
        if toks.next().is_some() {
            return Err(Error::Parse {
                line,
                msg: "trailing fields".into(),
            });
        }
    }
    SurfaceMesh::from_parts(surface, points, triangles, pairings)
}
