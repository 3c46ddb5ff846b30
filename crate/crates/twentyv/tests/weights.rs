use proptest::prelude::*;
use std::f64::consts::PI;
use twentyv::weights::*;

fn admissible() -> impl Strategy<Value = AngleParams> {
    (0.05f64..1.2, 0.0f64..1.0, -1.0f64..1.0).prop_filter_map("inadmissible", |(eta, t, s)| {
        let lambda = eta + 0.02 + t * (PI - 2.0 * eta - 0.04);
        let mu = s * (lambda - eta - 0.01);
        AngleParams::new(eta, lambda, mu).ok()
    })
}

proptest! {
    #[test]
    fn kagome_triples_satisfy_yang_baxter(p in admissible()) {
        let t = kagome_triple(&p);
        for r in yang_baxter_residuals(&t) {
            prop_assert!(r.abs() < 1e-12, "residual {r}");
        }
    }

    #[test]
    fn omega_is_the_kagome_product(p in admissible()) {
        let w = compute_weights(&p);
        let k = omega_from_kagome(&kagome_triple(&p));
        for (a, b) in w.omega.iter().zip(&k.omega) {
            prop_assert!(((a - b) / a).abs() < 1e-12);
        }
    }

    #[test]
    fn weights_are_positive(p in admissible()) {
        prop_assert!(compute_weights(&p).omega.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn shifted_triples_satisfy_yang_baxter(p in admissible(), shift in -0.5f64..0.5) {
        for r in yang_baxter_residuals(&shifted_kagome_triple(&p, shift)) {
            prop_assert!(r.abs() < 1e-12);
        }
    }

    #[test]
    fn mirroring_swaps_the_weight_pairs(p in admissible()) {
        let (w, m) = (compute_weights(&p).omega, compute_weights(&p.mirrored()).omega);
        prop_assert!((w[1] - m[6]).abs() < 1e-14 && (w[6] - m[1]).abs() < 1e-14);
        prop_assert!((w[0] - m[0]).abs() < 1e-14 && (w[3] - m[3]).abs() < 1e-14);
    }
}

#[test]
fn uniform_point_has_equal_weights() {
    let w = compute_weights(&AngleParams::uniform());
    let expected = (PI / 4.0).sin();
    for o in w.omega {
        assert!((o - expected).abs() < 1e-15, "{o}");
    }
}

#[test]
fn domain_is_enforced() {
    assert!(AngleParams::new(0.0, 1.0, 0.0).is_err());
    assert!(AngleParams::new(0.3, 0.2, 0.0).is_err());
    assert!(AngleParams::new(0.3, PI - 0.3, 0.0).is_err());
    assert!(AngleParams::new(0.3, 1.0, 0.7).is_err());
    assert!(AngleParams::new(0.3, 1.0, -0.7).is_err());
    assert!(AngleParams::new(0.3, 1.0, 0.69).is_ok());
}

#[test]
fn special_line_point() {
    let p = AngleParams::on_special_line(PI / 12.0, 10.0 * PI / 12.0).unwrap();
    assert!((p.mu() - 5.0 * PI / 12.0).abs() < 1e-15);
}

#[test]
fn twenty_patterns_in_seven_classes() {
    let all = VertexPattern::all();
    assert_eq!(all.len(), 20);
    assert_eq!(all.iter().filter(|p| p.is_six_vertex()).count(), 6);
    let mut counts = [0; 7];
    for p in &all {
        counts[p.weight_class()] += 1;
        assert_eq!(p.complement().complement(), *p);
    }
    assert!(counts.iter().all(|&c| c > 0));
    assert_eq!(counts.iter().sum::<usize>(), 20);
}

#[test]
fn angles_parse_as_multiples_of_pi() {
    let close = |s: &str, v: f64| assert!((parse_angle(s).unwrap() - v).abs() < 1e-15, "{s}");
    close("0.25", 0.25);
    close("pi", PI);
    close("pi/12", PI / 12.0);
    close("10*pi/12", 10.0 * PI / 12.0);
    close("5pi/8", 5.0 * PI / 8.0);
    close("-pi/4", -PI / 4.0);
    close(" 2 * pi ", 2.0 * PI);
    for bad in ["", "pi/0", "x*pi", "pi*2", "1/2"] {
        assert!(parse_angle(bad).is_err(), "{bad}");
    }
}
