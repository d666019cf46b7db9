use super::*;
use crate::mesh::shapes::{cube, grid, planar_five_three, torus, torus_five_three};

fn opts(mode: Mode) -> BuildOptions {
    BuildOptions { mode, ..BuildOptions::default() }
}

fn g1_g2() -> [BuildOptions; 2] {
    [BuildOptions { family: SplineFamily::D3C1P2S4, ..opts(Mode::G1) }, opts(Mode::G2)]
}

fn ply_bytes(s: &CompositeSurface, n: usize) -> Vec<u8> {
    let mut t = tessellate(s, n);
    let f = analysis_fields(s, &t.source);
    t.add_channel("mean_curvature", f.mean_curvature).unwrap();
    t.add_channel("isophote", f.isophote).unwrap();
    let mut out = Vec::new();
    write_ply(&t, &["mean_curvature", "isophote"], &mut out).unwrap();
    out
}

#[test]
fn torus_is_all_regular() {
    for o in g1_g2() {
        let s = build_surface(torus(12, 8), &o).unwrap();
        assert_eq!(s.num_regular(), 96);
        assert_eq!(s.num_gregory(), 0);
    }
}

#[test]
fn cube_is_all_gregory() {
    for o in g1_g2() {
        let s = build_surface(cube(), &o).unwrap();
        assert_eq!(s.num_regular(), 0);
        assert_eq!(s.num_gregory(), 6);
        assert!(continuity_report(&s, 10).max_position_gap() < 1e-8);
    }
}

#[test]
fn gregory_count_matches_classification() {
    let m = torus_five_three(12, 8).unwrap();
    let he = HalfEdgeMesh::new(m.clone()).unwrap();
    let expected = classify_faces(&he, 4).iter().filter(|r| !**r).count();
    assert!(expected > 0);
    let s = build_surface(m, &opts(Mode::G2)).unwrap();
    assert_eq!(s.num_gregory(), expected);
}

#[test]
fn rotated_torus_joins() {
    let m = torus_five_three(12, 8).unwrap();
    for o in g1_g2() {
        let s = build_surface(m.clone(), &o).unwrap();
        let r = continuity_report(&s, 10);
        let mut kinds = [0usize; 3];
        for e in &r.edges {
            assert!(e.max_position_gap < 1e-8, "{:?} gap {}", e.vertices, e.max_position_gap);
            let k = e.kind as usize;
            kinds[k] += 1;
            if e.kind != EdgeKind::GregoryGregory {
                assert!(e.max_normal_angle < 0.1, "{:?} {:?} angle {}", e.vertices, e.kind, e.max_normal_angle);
            }
        }
        assert!(kinds.iter().all(|&k| k > 0), "{kinds:?}");
        if o.mode == Mode::G2 {
            assert!(r.summary.curvature_gap.unwrap().max < 1e-2);
        }
    }
}

#[test]
fn torus_join_law() {
    let s = build_surface(torus(12, 8), &opts(Mode::G2)).unwrap();
    let r = continuity_report(&s, 16);
    assert!(r.max_position_gap() < 1e-10);
    for e in &r.edges {
        assert_eq!(e.kind, EdgeKind::RegularRegular);
        let res = e.scaling_residual.as_ref().unwrap();
        assert_eq!(res.len(), 2);
        assert!(res.iter().all(|&x| x < 1e-4), "{res:?}");
    }
}

#[test]
fn planar_mesh_is_reproduced() {
    let m = planar_five_three(8).unwrap();
    for o in g1_g2() {
        let s = build_surface(m.clone(), &o).unwrap();
        assert!(s.num_gregory() > 0);
        let t = tessellate(&s, 8);
        for p in &t.positions {
            assert!(p.z.abs() < 1e-10, "{p:?}");
        }
        let f = analysis_fields(&s, &t.source);
        assert_eq!(f.degenerate, 0);
        assert!(f.mean_curvature.iter().all(|h| h.abs() < 1e-6));
        assert!(f.isophote.iter().all(|i| (i.abs() - 1.0).abs() < 1e-9));
    }
}

#[test]
fn grid_has_zero_curvature() {
    let s = build_surface(grid(4, 3), &opts(Mode::G2)).unwrap();
    assert_eq!(s.num_gregory(), 0);
    let t = tessellate(&s, 6);
    let f = analysis_fields(&s, &t.source);
    assert!(f.mean_curvature.iter().all(|h| h.abs() < 1e-6));
    let r = continuity_report(&s, 8);
    assert_eq!(r.max_position_gap(), 0.0);
    assert!(r.edges.iter().all(|e| e.max_normal_angle == 0.0));
}

#[test]
fn mirroring_preserves_abs_mean_curvature() {
    let m = torus_five_three(10, 8).unwrap();
    let mut mm = m.clone();
    for p in &mut mm.vertices {
        p.x = -p.x;
    }
    let a = build_surface(m, &opts(Mode::G2)).unwrap();
    let b = build_surface(mm, &opts(Mode::G2)).unwrap();
    let t = tessellate(&a, 4);
    let ha = analysis_fields(&a, &t.source).mean_curvature;
    let hb = analysis_fields(&b, &t.source).mean_curvature;
    for (x, y) in ha.iter().zip(&hb) {
        assert!((x.abs() - y.abs()).abs() < 1e-8, "{x} {y}");
    }
}

#[test]
fn isophote_is_bounded() {
    let s = build_surface(cube(), &opts(Mode::G2)).unwrap();
    let t = tessellate(&s, 6);
    let f = analysis_fields(&s, &t.source);
    assert!(f.isophote.iter().all(|i| (-1.0..=1.0).contains(i)));
    assert!(f.isophote.iter().any(|&i| i < -0.5) && f.isophote.iter().any(|&i| i > 0.5));
}

#[test]
fn tessellation_counts() {
    let s = build_surface(grid(1, 1), &opts(Mode::G2)).unwrap();
    assert_eq!(s.patches.len(), 1);
    let t = tessellate(&s, 4);
    assert_eq!(t.positions.len(), 25);
    assert_eq!(t.triangles.len(), 32);
    let s = build_surface(torus(6, 4), &opts(Mode::G1)).unwrap();
    let a = tessellate(&s, 3).triangles.len();
    let b = tessellate(&s, 6).triangles.len();
    assert_eq!(b, 4 * a);
}

#[test]
fn tessellation_welds_shared_boundaries() {
    let s = build_surface(torus(6, 4), &opts(Mode::G2)).unwrap();
    let n = 4;
    let t = tessellate(&s, n);
    // closed surface of genus one: V - E + F = 0 with E = 3F/2
    let f = t.triangles.len();
    assert_eq!(t.positions.len(), f / 2);
    assert_eq!(t.source.len(), t.positions.len());
    for tri in &t.triangles {
        assert!(tri.iter().all(|&i| i < t.positions.len()));
    }
}

#[test]
fn builds_are_deterministic() {
    let m = torus_five_three(10, 8).unwrap();
    let a = build_surface(m.clone(), &opts(Mode::G2)).unwrap();
    let b = build_surface(m, &opts(Mode::G2)).unwrap();
    assert_eq!(ply_bytes(&a, 4), ply_bytes(&b, 4));
    assert_eq!(continuity_report(&a, 8).to_json(), continuity_report(&b, 8).to_json());
}

#[test]
fn ply_round_trip() {
    let s = build_surface(cube(), &opts(Mode::G1)).unwrap();
    let bytes = ply_bytes(&s, 3);
    let text = String::from_utf8(bytes).unwrap();
    let header: Vec<&str> = text.lines().take_while(|l| *l != "end_header").collect();
    assert_eq!(header.iter().filter(|l| l.starts_with("property double")).count(), 5);
    let back = read_ply(&text).unwrap();
    let t = tessellate(&s, 3);
    assert_eq!(back.positions, t.positions);
    assert_eq!(back.triangles, t.triangles);
    assert_eq!(back.channels.len(), 2);
    assert_eq!(back.channels[0].0, "mean_curvature");
}

#[test]
fn empty_mesh_exports() {
    let t = TriangleMesh::default();
    let mut out = Vec::new();
    write_ply(&t, &[], &mut out).unwrap();
    let back = read_ply(std::str::from_utf8(&out).unwrap()).unwrap();
    assert_eq!(back, PlyData::default());
    let mut obj = Vec::new();
    write_obj_tris(&t, &mut obj).unwrap();
    assert!(obj.is_empty());
    assert!(write_ply(&t, &["missing"], Vec::new()).is_err());
}

#[test]
fn mean_param_rejects_extraordinary_mesh() {
    let o = BuildOptions { param: ParamMethod::Mean, ..opts(Mode::G1) };
    assert!(matches!(build_surface(cube(), &o), Err(Error::Unsupported(_))));
    assert!(build_surface(torus(6, 4), &o).is_ok());
}

#[test]
fn g2_needs_c2_family() {
    let o = BuildOptions { family: SplineFamily::D3C1P2S4, ..opts(Mode::G2) };
    assert!(build_surface(torus(6, 4), &o).is_err());
}
