use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::TriangleMesh;
use crate::error::{Error, Result};
use crate::spline::Point;

/// Write an ascii PLY with the named channels as extra vertex properties.
pub fn write_ply<W: Write>(mesh: &TriangleMesh, channels: &[&str], mut w: W) -> Result<()> {
    let cols: Vec<(&str, &[f64])> = channels
        .iter()
        .map(|&c| mesh.channel(c).map(|v| (c, v)).ok_or_else(|| Error::Contract(format!("no channel named {c}"))))
        .collect::<Result<_>>()?;
    for (c, _) in &cols {
        if c.is_empty() || c.chars().any(|ch| ch.is_whitespace()) {
            return Err(Error::Contract(format!("channel name {c:?} is not a PLY identifier")));
        }
    }
    writeln!(w, "ply\nformat ascii 1.0")?;
    writeln!(w, "element vertex {}", mesh.positions.len())?;
    for a in ["x", "y", "z"] {
        writeln!(w, "property double {a}")?;
    }
    for (c, _) in &cols {
        writeln!(w, "property double {c}")?;
    }
    writeln!(w, "element face {}", mesh.triangles.len())?;
    writeln!(w, "property list uchar int vertex_indices\nend_header")?;
    for (i, p) in mesh.positions.iter().enumerate() {
        write!(w, "{} {} {}", p.x, p.y, p.z)?;
        for (_, v) in &cols {
            write!(w, " {}", v[i])?;
        }
        writeln!(w)?;
    }
    for t in &mesh.triangles {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}

pub fn export_ply(mesh: &TriangleMesh, path: impl AsRef<Path>, channels: &[&str]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_ply(mesh, channels, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_obj_tris<W: Write>(mesh: &TriangleMesh, mut w: W) -> Result<()> {
    for p in &mesh.positions {
        writeln!(w, "v {} {} {}", p.x, p.y, p.z)?;
    }
    for t in &mesh.triangles {
        writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}

pub fn export_obj(mesh: &TriangleMesh, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_obj_tris(mesh, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Contents of an ascii PLY triangle mesh.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlyData {
    pub positions: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    /// Vertex properties other than `x, y, z`, in header order.
    pub channels: Vec<(String, Vec<f64>)>,
}

struct Element {
    name: String,
    count: usize,
    props: Vec<String>,
    list: bool,
}

/// Read an ascii PLY with a `vertex` and an optional triangle `face` element.
pub fn read_ply(text: &str) -> Result<PlyData> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let perr = |line: usize, msg: String| Error::Parse { line, msg };
    match lines.next() {
        Some((_, "ply")) => {}
        _ => return Err(perr(1, "missing ply magic".into())),
    }
    let mut elements: Vec<Element> = Vec::new();
    let mut ended = false;
    let mut format_ok = false;
    for (ln, l) in lines.by_ref() {
        let tok: Vec<&str> = l.split_whitespace().collect();
        match tok.as_slice() {
            [] => {}
            ["comment", ..] | ["obj_info", ..] => {}
            ["format", "ascii", "1.0"] => format_ok = true,
            ["format", ..] => return Err(perr(ln, format!("unsupported format {l:?}"))),
            ["element", name, count] => {
                let count = count.parse().map_err(|_| perr(ln, format!("bad element count {count:?}")))?;
                elements.push(Element { name: name.to_string(), count, props: Vec::new(), list: false });
            }
            ["property", "list", _, _, name] => {
                let e = elements.last_mut().ok_or_else(|| perr(ln, "property before element".into()))?;
                if !e.props.is_empty() {
                    return Err(perr(ln, "list property must be the only one".into()));
                }
                e.list = true;
                e.props.push(name.to_string());
            }
            ["property", _, name] => {
                let e = elements.last_mut().ok_or_else(|| perr(ln, "property before element".into()))?;
                if e.list {
                    return Err(perr(ln, "list property must be the only one".into()));
                }
                e.props.push(name.to_string());
            }
            ["end_header"] => {
                ended = true;
                break;
            }
            _ => return Err(perr(ln, format!("unexpected header line {l:?}"))),
        }
    }
    if !ended || !format_ok {
        return Err(perr(0, "incomplete header".into()));
    }
    let mut data = lines.filter(|(_, l)| !l.is_empty());
    let mut out = PlyData::default();
    for el in &elements {
        let mut next = |what: &str| data.next().ok_or_else(|| perr(0, format!("missing {what} data")));
        match el.name.as_str() {
            "vertex" => {
                let idx = |a: &str| el.props.iter().position(|p| p == a);
                let (Some(ix), Some(iy), Some(iz)) = (idx("x"), idx("y"), idx("z")) else {
                    return Err(perr(0, "vertex element needs x, y, z".into()));
                };
                if el.list {
                    return Err(perr(0, "vertex element has a list property".into()));
                }
                let extra: Vec<usize> = (0..el.props.len()).filter(|&i| i != ix && i != iy && i != iz).collect();
                let mut chans: Vec<Vec<f64>> = vec![Vec::new(); extra.len()];
                for _ in 0..el.count {
                    let (ln, l) = next("vertex")?;
                    let v: Vec<f64> = l
                        .split_whitespace()
                        .map(|s| s.parse::<f64>().map_err(|_| perr(ln, format!("bad number {s:?}"))))
                        .collect::<Result<_>>()?;
                    if v.len() != el.props.len() {
                        return Err(perr(ln, format!("expected {} values, got {}", el.props.len(), v.len())));
                    }
                    out.positions.push(Point::new(v[ix], v[iy], v[iz]));
                    for (c, &i) in chans.iter_mut().zip(&extra) {
                        c.push(v[i]);
                    }
                }
                out.channels = extra.iter().map(|&i| el.props[i].clone()).zip(chans).collect();
            }
            "face" => {
                if !el.list {
                    return Err(perr(0, "face element needs a list property".into()));
                }
                for _ in 0..el.count {
                    let (ln, l) = next("face")?;
                    let v: Vec<usize> = l
                        .split_whitespace()
                        .map(|s| s.parse::<usize>().map_err(|_| perr(ln, format!("bad index {s:?}"))))
                        .collect::<Result<_>>()?;
                    if v.len() != 4 || v[0] != 3 {
                        return Err(perr(ln, "only triangles are supported".into()));
                    }
                    out.triangles.push([v[1], v[2], v[3]]);
                }
            }
            _ => {
                for _ in 0..el.count {
                    next(&el.name)?;
                }
            }
        }
    }
    let nv = out.positions.len();
    if let Some(t) = out.triangles.iter().find(|t| t.iter().any(|&i| i >= nv)) {
        return Err(perr(0, format!("triangle {t:?} references a missing vertex")));
    }
    Ok(out)
}
