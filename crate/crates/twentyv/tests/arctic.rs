use std::f64::consts::PI;
use twentyv::arctic::*;
use twentyv::tangent::Branch;
use twentyv::weights::AngleParams;

fn interior((lo, hi): (f64, f64), k: usize) -> Vec<f64> {
    (1..=k).map(|i| lo + (hi - lo) * i as f64 / (k + 1) as f64).collect()
}

#[test]
fn uniform_normal_portion_matches_its_closed_form_and_equation() {
    let b = &full_curve_20v(&AngleParams::uniform())[0];
    for xi in interior(b.range, 40) {
        let (x, y) = b.point(xi).unwrap();
        let (cx, cy) = uniform_closed_form(xi);
        assert!((x - cx).abs() < 1e-10 && (y - cy).abs() < 1e-10);
        assert!(uniform_scaled_residual(x, y).abs() < 1e-6);
    }
}

#[test]
fn positive_r4_coefficient_is_not_satisfied() {
    let (x, y) = uniform_closed_form(0.4);
    assert!(uniform_scaled_residual(x, y).abs() < 1e-12);
    assert!(uniform_scaled_residual_positive_r4(x, y).abs() > 1e-2);
}

#[test]
fn envelope_points_are_tangent_to_their_lines() {
    let p = AngleParams::new(0.3, 1.5, 0.4).unwrap();
    for b in full_curve_20v(&p) {
        for xi in interior(b.range, 7) {
            assert!(b.tangent_residual(xi).unwrap().abs() < 1e-10, "{} xi={xi}", b.id);
        }
    }
}

#[test]
fn twenty_vertex_curve_closes_inside_the_square() {
    for p in
        [AngleParams::uniform(), AngleParams::new(0.2, 1.9, 0.5).unwrap(), AngleParams::new(0.4, 1.3, -0.2).unwrap()]
    {
        let c = closed_curve(&full_curve_20v(&p), &SampleOptions::adaptive(200, 2e-3)).unwrap();
        assert!(c.max_gap < 1e-3, "{p}: gap {}", c.max_gap);
        assert!(c.contains(0.5, 0.5));
        assert!(!c.contains(0.02, 0.98) && !c.contains(0.98, 0.02));
        for &(x, y) in &c.points {
            assert!((-1e-9..=1.0 + 1e-9).contains(&x) && (-1e-9..=1.0 + 1e-9).contains(&y));
        }
    }
}

#[test]
fn rotated_portions_are_images_under_the_half_turn() {
    let p = AngleParams::new(0.3, 1.5, 0.4).unwrap();
    let c = full_curve_20v(&p);
    for (a, b) in [(0, 3), (1, 4), (5, 2)] {
        for xi in interior(c[a].range, 3) {
            let (x, y) = c[a].point(xi).unwrap();
            let (u, v) = c[b].point(xi).unwrap();
            assert!((x + u - 1.0).abs() < 1e-12 && (y + v - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn shear_portion_starts_on_the_anti_diagonal() {
    let p = AngleParams::new(0.25, 1.7, 0.3).unwrap();
    let shear = &full_curve_20v(&p)[1];
    let (x, y) = shear.point_robust(shear.range.0).unwrap();
    assert!((x + y - 1.0).abs() < 1e-8);
}

#[test]
fn qthadt_curve_at_pi_over_6_is_an_ellipse() {
    let b = curve_qthadt(PI / 6.0).unwrap();
    assert_eq!(b.len(), 12);
    for piece in &b {
        for xi in interior(piece.range, 12) {
            let (x, y) = piece.point(xi).unwrap();
            // quarter turns map the ellipse to x² + y² + xy = 3/4
            let target =
                if matches!(piece.symmetry, Symmetry::QuarterTurn(1) | Symmetry::QuarterTurn(3)) { -1.0 } else { 1.0 };
            assert!((x * x + y * y - target * x * y - 0.75).abs() < 1e-8, "{} xi={xi}", piece.id);
        }
    }
}

#[test]
fn qthadt_continuation_is_flagged() {
    let b = curve_qthadt(0.3).unwrap();
    assert_eq!(b.iter().filter(|p| p.continuation).count(), 8);
    assert!(b.iter().filter(|p| !p.continuation).all(|p| p.range == (0.0, 0.6)));
    assert!(curve_qthadt(PI / 4.0).is_err());
}

#[test]
fn sixv_curve_is_the_large_imaginary_mu_limit() {
    for (eta, lambda) in [(0.3, 1.7), (0.5, 1.2)] {
        let c = curve_6v(eta, lambda).unwrap();
        for (b, br) in [(&c[0], Branch::Normal), (&c[1], Branch::Shear)] {
            for xi in interior(b.range, 5) {
                let p = b.point(xi).unwrap();
                let q = sixv_limit_point(xi, eta, lambda, 30.0, br).unwrap();
                assert!((p.0 - q.0).hypot(p.1 - q.1) < 1e-6);
            }
        }
    }
    assert!(curve_6v(0.5, 0.4).is_err());
}

#[test]
fn sixv_curve_at_the_free_fermion_point_is_the_circle() {
    // λ = π/2 + η... a = b = c at Δ = 0 needs η = π/4
    let c = curve_6v(PI / 4.0, PI / 2.0).unwrap();
    for b in &c {
        for xi in interior(b.range, 8) {
            let (x, y) = b.point(xi).unwrap();
            assert!(((x - 0.5).powi(2) + (y - 0.5).powi(2) - 0.25).abs() < 1e-9, "{} ({x},{y})", b.id);
        }
    }
}

#[test]
fn degenerate_limit_approaches_the_ellipses() {
    let (l2, l3) = (1.0, 1.5);
    let e = degenerate_ellipses(l2, l3).unwrap();
    let p = ellipse_limit_params(0.3, l2, l3, 1e-5).unwrap();
    for b in full_curve_20v(&p) {
        for xi in interior(b.range, 9) {
            let (x, y) = b.point(xi).unwrap();
            if b.id.starts_with("shear") {
                // the shear portions shrink onto the segment between the ellipses
                assert!((y - 0.5).abs() < 1e-3, "{} ({x},{y})", b.id);
            } else {
                let d = e[0].eval(x, y).abs().min(e[1].eval(x, y).abs());
                assert!(d < 1e-4, "{} ({x},{y}): {d}", b.id);
            }
        }
    }
    assert!(degenerate_ellipses(-1.0, 1.0).is_err());
}

#[test]
fn csv_and_svg_outputs() {
    let p = AngleParams::uniform();
    let lines: Vec<Polyline> = full_curve_20v(&p).iter().map(|b| sample(b, &SampleOptions::new(20)).unwrap()).collect();
    let csv = polylines_to_csv(&lines);
    assert!(csv.starts_with("xi,x,y,branch\n"));
    assert_eq!(csv.lines().count(), 1 + 6 * 20);
    let meta = vec![("eta".to_string(), "pi/8".to_string()), ("note".to_string(), "a<b".to_string())];
    let svg = polylines_to_svg(&lines, &Viewport::unit_square(300.0), &meta);
    assert!(svg.starts_with("<svg"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains(r#"<param name="eta" value="pi/8"/>"#));
    assert!(svg.contains("a&lt;b"));
    assert_eq!(svg.matches("<path").count(), 6);
    assert_eq!(svg, polylines_to_svg(&lines, &Viewport::unit_square(300.0), &meta));
}

#[test]
fn adaptive_sampling_bounds_segments() {
    let b = &full_curve_20v(&AngleParams::new(0.3, 1.5, 0.4).unwrap())[1];
    let l = sample(b, &SampleOptions::adaptive(10, 1e-3)).unwrap();
    assert!(l.complete);
    assert!(l.max_segment() <= 1e-3);
    assert!(sample(b, &SampleOptions::new(1)).is_err());
}
