use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use std::f64::consts::PI;
use twentyv::qthadt::*;
use twentyv::weights::{kagome_triple, AngleParams};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: i64) -> BigRational {
    q(n, 1)
}

#[test]
fn counts_at_gamma_one_and_zero() {
    for (n, e) in [(1, 1), (2, 3), (3, 23), (4, 433)] {
        assert_eq!(partition_exact(n, &int(1), &int(1)).unwrap(), int(e));
    }
    // γ = 0 forbids diagonals: alternating sign matrices
    for (n, e) in [(1, 1), (2, 2), (3, 7), (4, 42), (5, 429), (6, 7436)] {
        assert_eq!(partition_exact(n, &int(0), &int(1)).unwrap(), int(e));
    }
    assert_eq!(partition(3, 1.0, 1.0).unwrap(), 23.0);
}

#[test]
fn determinant_equals_path_enumeration_exactly() {
    let gammas = [int(0), q(1, 2), int(1), int(2)];
    let taus = [int(1), q(1, 3), q(5, 2)];
    for n in 1..=4 {
        let census = brute_census(n).unwrap();
        for g in &gammas {
            for t in &taus {
                assert_eq!(partition_exact(n, g, t).unwrap(), census.weight_exact(g, t), "n={n} γ={g} τ={t}");
            }
        }
    }
}

#[test]
fn brute_families_are_valid_and_distinct() {
    let fams = brute_families(4).unwrap();
    assert_eq!(fams.len(), 433);
    let mut sorted = fams.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), 433);
    for f in &fams {
        f.validate().unwrap();
        assert!(f.path_count() <= 4);
    }
    assert_eq!(fams.iter().filter(|f| f.path_count() == 0).count(), 1);
    assert!(brute_families(BRUTE_CAP + 1).is_err());
}

#[test]
fn tau_polynomial_matches_refined_counts() {
    for n in 1..=4 {
        let census = brute_census(n).unwrap();
        for g in [int(0), q(1, 2), int(1), int(2)] {
            let poly = tau_polynomial(n, &g).unwrap();
            assert!(poly.len() <= n);
            assert!(poly.iter().all(|c| *c >= BigRational::zero()));
            let brute = census.tau_coefficients(&g);
            let pad = |v: &[BigRational]| {
                let mut v = v.to_vec();
                v.resize(n, BigRational::zero());
                v
            };
            assert_eq!(pad(&poly), pad(&brute), "n={n} γ={g}");
        }
    }
}

#[test]
fn floating_point_agrees_with_the_oracle() {
    for n in 1..=4 {
        for (g, t) in [(0.3, 1.0), (1.7, 0.4), (2.0, 2.0)] {
            let a = partition(n, g, t).unwrap();
            let b = brute_oracle(n, g, t).unwrap();
            assert!((a - b).abs() < 1e-12 * b.abs());
        }
    }
}

#[test]
fn refined_determinant_identity() {
    let sigmas = [0.2, 0.6, 1.0, 1.5, 3.0];
    for n in 1..=4 {
        for g in [0.0, 1.0, 2.0] {
            assert!(identity_check(n, g, &sigmas).unwrap() < 1e-9);
        }
    }
}

#[test]
fn unit_spectral_parameter_gives_the_unrefined_determinants() {
    for n in 1..=5 {
        let g = 0.7f64;
        let a = partition(n, g, 1.0).unwrap();
        let b = sixv_matrix(n, 1.0, (1.0 + g).sqrt(), 1.0, 1.0).unwrap().determinant();
        assert!((a - b).abs() < 1e-10 * a);
    }
}

#[test]
fn degenerate_line_has_equal_a_and_c() {
    for eta in [0.1, PI / 8.0, 0.6] {
        let p = AngleParams::new(eta, PI - 3.0 * eta, 0.0).unwrap();
        let t = kagome_triple(&p);
        let (a, b, c) = (t.a[0], t.b[0], t.c[0]);
        assert!((a - c).abs() < 1e-14);
        assert!((b / a - 2.0 * (2.0 * eta).cos()).abs() < 1e-13);
        assert!(((b / a).powi(2) - 1.0 - gamma_of_eta(eta)).abs() < 1e-12);
    }
}

#[test]
fn large_sizes_use_the_log_determinant() {
    let (s, l) = log_partition(12, 1.0, 1.0).unwrap();
    let direct = partition(12, 1.0, 1.0).unwrap();
    assert_eq!(s, 1.0);
    assert!((l - direct.ln()).abs() < 1e-10 * l);
    // double-precision elimination loses the sign here
    for g in [0.5, 1.0, 2.0] {
        let (s40, l40) = log_partition(PARTITION_CAP, g, 1.0).unwrap();
        let (s39, l39) = log_partition(PARTITION_CAP - 1, g, 1.0).unwrap();
        assert_eq!((s40, s39), (1.0, 1.0));
        assert!(l40 > l39 && l40.is_finite());
    }
    let (_, l) = log_partition(PARTITION_CAP, 1.0, 1.0).unwrap();
    assert!((partition(PARTITION_CAP, 1.0, 1.0).unwrap().ln() - l).abs() < 1e-12 * l);
    assert!(partition(PARTITION_CAP + 1, 1.0, 1.0).is_err());
    assert!(partition(0, 1.0, 1.0).is_err());
}

#[test]
fn rational_parsing() {
    assert_eq!(parse_rational("1/2").unwrap(), q(1, 2));
    assert_eq!(parse_rational("-3/6").unwrap(), q(-1, 2));
    assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
    assert_eq!(parse_rational("-1.5").unwrap(), q(-3, 2));
    assert_eq!(parse_rational("7").unwrap(), int(7));
    assert_eq!(parse_rational("1").unwrap(), BigRational::one());
    for bad in ["", "1/0", "a", "1.", "0.5e3"] {
        assert!(parse_rational(bad).is_err(), "{bad}");
    }
}

proptest! {
    #[test]
    fn partition_increases_with_gamma(n in 2usize..=6, g in 0.0f64..3.0, dg in 0.01f64..1.0) {
        prop_assert!(partition(n, g + dg, 1.0).unwrap() > partition(n, g, 1.0).unwrap());
    }

    #[test]
    fn polynomial_interpolates_the_determinant(n in 1usize..=6, num in 0i64..8, tau in -3i64..4) {
        let g = q(num, 4);
        let poly = tau_polynomial(n, &g).unwrap();
        let t = int(tau);
        let val = poly.iter().rev().fold(BigRational::zero(), |acc, c| acc * &t + c);
        prop_assert_eq!(val, partition_exact(n, &g, &t).unwrap());
    }
}
