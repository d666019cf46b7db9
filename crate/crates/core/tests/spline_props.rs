use augsurf::spline::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FAMS: [SplineFamily; 2] = [SplineFamily::D3C1P2S4, SplineFamily::D5C2P2S4];

fn lpv(d: [f64; 3]) -> LocalParamVector {
    LocalParamVector::new(d.to_vec()).unwrap()
}

fn fam() -> impl Strategy<Value = SplineFamily> {
    prop_oneof![Just(SplineFamily::D3C1P2S4), Just(SplineFamily::D5C2P2S4)]
}

proptest! {
    #[test]
    fn partition_of_unity(f in fam(), dm in 0.05f64..5.0, ds in 0.05f64..5.0, dp in 0.05f64..5.0, t in 0.0f64..=1.0) {
        let d = lpv([dm, ds, dp]);
        let s: f64 = (-1..=2).map(|o| eval_fundamental(f, o, t * ds, &d).unwrap()).sum();
        prop_assert!((s - 1.0).abs() < 1e-10);
        let s1: f64 = (-1..=2).map(|o| eval_fundamental_deriv(f, o, t * ds, &d, 1).unwrap()).sum();
        prop_assert!(s1.abs() < 1e-8 * (1.0 + 1.0 / ds));
    }

    #[test]
    fn delta_property(f in fam(), dm in 0.05f64..5.0, ds in 0.05f64..5.0, dp in 0.05f64..5.0) {
        let d = lpv([dm, ds, dp]);
        for o in -1..=2 {
            let at0 = eval_fundamental(f, o, 0.0, &d).unwrap();
            let at1 = eval_fundamental(f, o, ds, &d).unwrap();
            let e0 = if o == 0 { 1.0 } else { 0.0 };
            let e1 = if o == 1 { 1.0 } else { 0.0 };
            prop_assert!((at0 - e0).abs() < 1e-12);
            prop_assert!((at1 - e1).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_reproduction(f in fam(), dm in 0.1f64..3.0, ds in 0.1f64..3.0, dp in 0.1f64..3.0,
                              t in 0.0f64..=1.0, a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0) {
        let q = |x: f64| a + b * x + c * x * x;
        let xs = [-dm, 0.0, ds, ds + dp];
        let d = lpv([dm, ds, dp]);
        let x = t * ds;
        let v: f64 = (-1..=2).zip(xs).map(|(o, xi)| q(xi) * eval_fundamental(f, o, x, &d).unwrap()).sum();
        prop_assert!((v - q(x)).abs() < 1e-9);
    }
}

#[test]
fn derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for f in FAMS {
        for _ in 0..10 {
            let d = [rng.gen_range(0.3..2.0), rng.gen_range(0.3..2.0), rng.gen_range(0.3..2.0)];
            let x = rng.gen_range(0.1..0.9) * d[1];
            let h = 1e-5;
            let dv = lpv(d);
            for o in -1..=2 {
                for r in 1..=f.continuity() + 1 {
                    let g = |x: f64| eval_fundamental_deriv(f, o, x, &dv, r - 1).unwrap();
                    let fd = (g(x + h) - g(x - h)) / (2.0 * h);
                    let an = eval_fundamental_deriv(f, o, x, &dv, r).unwrap();
                    assert!((an - fd).abs() <= 1e-5 * an.abs().max(1.0), "{f} o={o} r={r}: {an} vs {fd}");
                }
            }
            let r0 = eval_fundamental_deriv(f, 0, x, &dv, 0).unwrap();
            assert_eq!(r0, eval_fundamental(f, 0, x, &dv).unwrap());
        }
    }
}

fn random_curve(rng: &mut ChaCha8Rng, f: SplineFamily, n: usize, closed: bool) -> PolylineCurve {
    let pts: Vec<Point> = (0..n)
        .map(|i| Point::new(i as f64 + rng.gen_range(-0.3..0.3), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let k = make_knots(&pts, 0.5, closed).unwrap();
    PolylineCurve::new(pts, k, f).unwrap()
}

#[test]
fn ck_continuity_at_interior_knots() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for f in FAMS {
        for closed in [false, true] {
            let c = random_curve(&mut rng, f, 9, closed);
            let k = c.knots().knots().to_vec();
            let (lo_s, hi_s) = if closed { (0, k.len() - 1) } else { (2, k.len() - 3) };
            for s in lo_s..hi_s {
                let prev = if s == 0 { k.len() - 2 } else { s - 1 };
                let dprev = k[prev + 1] - k[prev];
                for r in 0..=f.continuity() {
                    let left = c.eval_on_segment(prev, dprev, r);
                    let right = c.eval_on_segment(s, 0.0, r);
                    let scale = left.norm().max(right.norm()).max(1.0);
                    assert!((left - right).norm() <= 1e-9 * scale, "{f} closed={closed} s={s} r={r}");
                }
            }
        }
    }
}

#[test]
fn interpolates_points_at_knots() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for f in FAMS {
        let c = random_curve(&mut rng, f, 8, false);
        let k = c.knots().knots();
        for (j, &x) in k.iter().enumerate().take(k.len() - 1).skip(1) {
            assert!((eval_curve(&c, x, 0).unwrap() - c.points()[j]).norm() < 1e-12);
        }
    }
}

#[test]
fn functional_quadratic_reproduced() {
    let knots = [0.0, 0.7, 1.6, 2.2, 3.1];
    let pts: Vec<Point> = knots.iter().map(|&t| Point::new(t, t * t, 0.0)).collect();
    let ks = KnotSequence::new(knots.to_vec(), false).unwrap();
    let c = PolylineCurve::new(pts, ks, SplineFamily::D5C2P2S4).unwrap();
    let (lo, hi) = c.domain();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let x = rng.gen_range(lo..=hi);
        let p = eval_curve(&c, x, 0).unwrap();
        assert!((p - Point::new(x, x * x, 0.0)).norm() < 1e-9);
    }
}

#[test]
fn compact_support() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for f in FAMS {
        let c = random_curve(&mut rng, f, 10, false);
        let k = c.knots().knots().to_vec();
        // segment 4 uses points 3..=6 only
        let x = 0.5 * (k[4] + k[5]);
        let before = eval_curve(&c, x, 0).unwrap();
        let mut pts = c.points().to_vec();
        for i in [0, 1, 2, 7, 8, 9] {
            pts[i] += Point::new(0.0, 0.0, 5.0);
        }
        let c2 = PolylineCurve::new(pts, c.knots().clone(), f).unwrap();
        assert_eq!(before, eval_curve(&c2, x, 0).unwrap());
    }
}

#[test]
fn closed_square_is_fourfold_symmetric() {
    let pts = vec![
        Point::new(1.0, 0.0, 0.0),
        Point::new(0.0, 1.0, 0.0),
        Point::new(-1.0, 0.0, 0.0),
        Point::new(0.0, -1.0, 0.0),
    ];
    for f in FAMS {
        let k = make_knots(&pts, 0.5, true).unwrap();
        let period = k.knots()[4];
        let c = PolylineCurve::new(pts.clone(), k, f).unwrap();
        for i in 0..20 {
            let x = i as f64 * period / 80.0;
            let a = eval_curve(&c, x, 0).unwrap();
            let b = eval_curve(&c, x + period / 4.0, 0).unwrap();
            let rot = Point::new(-a.y, a.x, a.z);
            assert!((b - rot).norm() < 1e-12);
        }
    }
}
