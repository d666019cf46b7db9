//! The checked-in fuzz seeds are valid inputs for their parsers.

use std::fs;
use std::path::PathBuf;

use augsurf::curve::parse_points;
use augsurf::mesh::{parse_edge_params_json, parse_obj, HalfEdgeMesh};
use augsurf::surface::read_ply;

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut out: Vec<(PathBuf, String)> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            let text = fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn obj_seeds() {
    for (p, text) in seeds("parse_obj") {
        let (mesh, _) = parse_obj(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        HalfEdgeMesh::new(mesh).unwrap();
    }
}

#[test]
fn ply_seeds() {
    for (p, text) in seeds("read_ply") {
        read_ply(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}

#[test]
fn point_seeds() {
    for (p, text) in seeds("parse_points") {
        assert!(!parse_points(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display())).is_empty());
    }
}

#[test]
fn edge_param_seeds() {
    for (p, text) in seeds("parse_edge_params_json") {
        parse_edge_params_json(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}

#[test]
fn malformed_inputs_are_errors() {
    assert!(parse_obj("v 0 0\n").is_err());
    assert!(parse_obj("f 1 2 3 4\n").is_err());
    assert!(read_ply("ply\nformat binary_little_endian 1.0\nend_header\n").is_err());
    assert!(read_ply("ply\nformat ascii 1.0\nelement vertex 1\nproperty double x\nproperty double y\nproperty double z\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0\n3 0 0 5\n").is_err());
    assert!(read_ply("ply\nformat ascii 1.0\nelement vertex 2\nproperty double x\nproperty double y\nproperty double z\nend_header\n0 0 0\n").is_err());
    assert!(parse_points("1 2 3 4\n").is_err());
    assert!(parse_edge_params_json(r#"[{"edge": [0], "d": 1}]"#).is_err());
    assert!(parse_edge_params_json("{").is_err());
}

mod random_text {
    use super::*;
    use proptest::prelude::*;

    const PLY_HEAD: &str = "ply\nformat ascii 1.0\nelement vertex 3\nproperty double x\nproperty double y\nproperty double z\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n";

    proptest! {
        #[test]
        fn obj_never_panics(s in "([vf#o] ?[-0-9./ ]{0,12}\n){0,12}") {
            if let Ok((mesh, _)) = parse_obj(&s) {
                let _ = HalfEdgeMesh::new(mesh);
            }
        }

        #[test]
        fn ply_never_panics(body in "([-0-9. e]{0,16}\n){0,6}", head in any::<bool>()) {
            let text = if head { format!("{PLY_HEAD}{body}") } else { body };
            if let Ok(p) = read_ply(&text) {
                prop_assert!(p.triangles.iter().flatten().all(|&i| i < p.positions.len()));
            }
        }

        #[test]
        fn points_never_panic(s in "([-0-9., eE#a-z]{0,16}\n){0,8}") {
            let _ = parse_points(&s);
        }

        #[test]
        fn sidecar_never_panics(s in any::<String>()) {
            let _ = parse_edge_params_json(&s);
        }
    }
}
