//! Wavefront OBJ subset: `v x y z` and quad `f` records.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::QuadMesh;
use crate::error::{Error, Result};
use crate::spline::Point;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ObjStats {
    /// Records other than `v` and `f` that were ignored.
    pub skipped: usize,
}

fn parse_index(tok: &str, nverts: usize, line: usize) -> Result<usize> {
    let head = tok.split('/').next().unwrap_or("");
    let i: i64 = head.parse().map_err(|_| Error::Parse { line, msg: format!("bad vertex index '{tok}'") })?;
    let idx = if i > 0 {
        i - 1
    } else if i < 0 {
        nverts as i64 + i
    } else {
        -1
    };
    if idx < 0 {
        return Err(Error::Parse { line, msg: format!("vertex index {i} out of range") });
    }
    Ok(idx as usize)
}

/// Parse OBJ text. Faces must be quads; indices are 1-based or negative.
pub fn parse_obj(text: &str) -> Result<(QuadMesh, ObjStats)> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut stats = ObjStats::default();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        let mut it = s.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut c = [0.0; 3];
                for x in c.iter_mut() {
                    let tok = it.next().ok_or(Error::Parse { line, msg: "vertex needs 3 coordinates".into() })?;
                    *x = tok
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::Parse { line, msg: format!("bad coordinate '{tok}'") })?;
                }
                vertices.push(Point::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let toks: Vec<&str> = it.collect();
                if toks.len() != 4 {
                    return Err(Error::UnsupportedFace { face: faces.len(), count: toks.len() });
                }
                let mut q = [0usize; 4];
                for (k, t) in toks.iter().enumerate() {
                    q[k] = parse_index(t, vertices.len(), line)?;
                }
                faces.push(q);
            }
            _ => stats.skipped += 1,
        }
    }
    if stats.skipped > 0 {
        log::warn!("obj: skipped {} unsupported records", stats.skipped);
    }
    Ok((QuadMesh::new(vertices, faces)?, stats))
}

pub fn load_obj(path: impl AsRef<Path>) -> Result<QuadMesh> {
    let text = fs::read_to_string(path)?;
    Ok(parse_obj(&text)?.0)
}

pub fn write_obj<W: Write>(mesh: &QuadMesh, mut w: W) -> Result<()> {
    for p in &mesh.vertices {
        writeln!(w, "v {} {} {}", p.x, p.y, p.z)?;
    }
    for q in &mesh.faces {
        writeln!(w, "f {} {} {} {}", q[0] + 1, q[1] + 1, q[2] + 1, q[3] + 1)?;
    }
    Ok(())
}

pub fn save_obj(mesh: &QuadMesh, path: impl AsRef<Path>) -> Result<()> {
    let f = fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(f);
    write_obj(mesh, &mut w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_connectivity;
    use crate::mesh::tests::cube;

    #[test]
    fn cube_counts() {
        let mut buf = Vec::new();
        write_obj(&cube(), &mut buf).unwrap();
        let (m, st) = parse_obj(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(st.skipped, 0);
        let h = build_connectivity(m).unwrap();
        assert_eq!((h.num_vertices(), h.num_faces(), h.num_edges()), (8, 6, 12));
    }

    #[test]
    fn triangle_rejected_with_face_index() {
        let text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\nf 1 2 3\n";
        match parse_obj(text) {
            Err(Error::UnsupportedFace { face, count }) => assert_eq!((face, count), (1, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip_identical() {
        let mut q = cube();
        q.vertices[3] = Point::new(0.1 + 0.2, 1.0 / 3.0, -7.25e-9);
        let mut a = Vec::new();
        write_obj(&q, &mut a).unwrap();
        let (back, _) = parse_obj(std::str::from_utf8(&a).unwrap()).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn tolerant_records() {
        let text = "# c\no thing\nv 0 0 0\nv 1 0 0\nvn 0 0 1\nv 1 1 0\nv 0 1 0\nf 1/1/1 2//1 -2 -1\n";
        let (m, st) = parse_obj(text).unwrap();
        assert_eq!(st.skipped, 2);
        assert_eq!(m.faces, vec![[0, 1, 2, 3]]);
        assert!(parse_obj("v 0 0 0\nf 1 2 3 4\n").is_err());
        assert!(parse_obj("v 0 nan 0\n").is_err());
        assert!(parse_obj("f 0 1 2 3\n").is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.obj");
        save_obj(&cube(), &p).unwrap();
        assert_eq!(load_obj(&p).unwrap(), cube());
        assert!(matches!(load_obj(dir.path().join("missing.obj")), Err(Error::Io(_))));
    }
}
