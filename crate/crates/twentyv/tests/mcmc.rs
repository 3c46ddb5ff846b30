use proptest::prelude::*;
use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;
use twentyv::arctic::ClosedCurve;
use twentyv::enumerate::list_configurations;
use twentyv::lattice::{Boundary, Configuration};
use twentyv::mcmc::*;
use twentyv::qthadt::{brute_families, SchroderFamily};
use twentyv::weights::AngleParams;

fn special() -> AngleParams {
    AngleParams::on_special_line(PI / 12.0, 10.0 * PI / 12.0).unwrap()
}

#[test]
fn every_move_from_every_small_state_stays_valid() {
    for n in 2..=3 {
        for c in list_configurations(n, Boundary::Dwbc1).unwrap() {
            for x in 1..n {
                for y in 1..n {
                    let moves = plaquette_moves(&c, x, y);
                    let total: f64 = moves.iter().map(|m| m.1).sum();
                    assert!(total <= 1.0 + 1e-15);
                    for (mv, _) in moves {
                        let mut d = c.clone();
                        apply_move(&mut d, x, y, mv);
                        d.validate().unwrap();
                        assert_ne!(d, c);
                    }
                }
            }
        }
    }
}

#[test]
fn proposals_are_symmetric() {
    for c in list_configurations(3, Boundary::Dwbc1).unwrap() {
        for x in 1..3 {
            for y in 1..3 {
                for (mv, p) in plaquette_moves(&c, x, y) {
                    let mut d = c.clone();
                    apply_move(&mut d, x, y, mv);
                    let back: f64 = plaquette_moves(&d, x, y)
                        .into_iter()
                        .filter(|&(m, _)| {
                            let mut e = d.clone();
                            apply_move(&mut e, x, y, m);
                            e == c
                        })
                        .map(|m| m.1)
                        .sum();
                    assert!((p - back).abs() < 1e-15, "{mv:?} at ({x},{y})");
                }
            }
        }
    }
}

#[test]
fn exact_transition_laws_satisfy_detailed_balance() {
    for n in 2..=3 {
        for p in [AngleParams::uniform(), special(), AngleParams::new(0.3, 1.5, 0.4).unwrap()] {
            let pi = exact_distribution_20v(n, &p).unwrap();
            for acc in [Acceptance::Lyberg, Acceptance::Metropolis] {
                let law =
                    |c: &Configuration| TwentyVChain::from_config(c.clone(), &p, acc, 0).unwrap().transition_law();
                assert!(detailed_balance_defect(&pi, law) < 1e-14);
            }
        }
    }
}

#[test]
fn empirical_transition_counts_balance_at_n2() {
    // 1e6 trials: N(C→C′) and N(C′→C) agree within binomial error
    for acc in [Acceptance::Lyberg, Acceptance::Metropolis] {
        let mut ch = TwentyVChain::new(2, &special(), acc, 11).unwrap();
        ch.run(1000);
        let mut counts: HashMap<(Configuration, Configuration), u64> = HashMap::new();
        let mut visits: HashMap<Configuration, u64> = HashMap::new();
        for _ in 0..1_000_000 {
            let before = ch.config().clone();
            ch.step();
            *visits.entry(ch.config().clone()).or_default() += 1;
            if &before != ch.config() {
                *counts.entry((before, ch.config().clone())).or_default() += 1;
            }
        }
        for ((a, b), &n_ab) in &counts {
            let n_ba = counts.get(&(b.clone(), a.clone())).copied().unwrap_or(0);
            let diff = (n_ab as f64 - n_ba as f64).abs();
            assert!(diff < 5.0 * ((n_ab + n_ba) as f64).sqrt() + 5.0, "{acc:?}: {n_ab} vs {n_ba}");
        }
        assert!(total_variation(&visits, &exact_distribution_20v(2, &special()).unwrap()) < 0.01);
    }
}

#[test]
fn chain_reaches_every_state_at_n3() {
    let mut ch = TwentyVChain::new(3, &AngleParams::uniform(), Acceptance::Lyberg, 5).unwrap();
    let mut seen = HashSet::new();
    for _ in 0..1_000_000 {
        ch.step();
        seen.insert(ch.config().clone());
        if seen.len() == 23 {
            break;
        }
    }
    assert_eq!(seen.len(), 23);
}

#[test]
fn lyberg_acceptance_stays_below_one_on_skewed_weights() {
    // the chain asserts P ≤ 1 on every proposal
    let p = AngleParams::new(0.05, 0.1, 0.049).unwrap();
    let mut ch = TwentyVChain::new(6, &p, Acceptance::Lyberg, 3).unwrap();
    ch.run(200_000);
    ch.config().validate().unwrap();
    assert!(ch.accepted() > 0);
    assert_eq!(ch.steps(), 200_000);
}

#[test]
fn same_seed_same_trajectory() {
    let run = |seed| {
        let mut ch = TwentyVChain::new(8, &special(), Acceptance::Metropolis, seed).unwrap();
        ch.run(50_000);
        ch.config().clone()
    };
    assert_eq!(run(9), run(9));
    assert_ne!(run(9), run(10));
}

#[test]
fn small_chain_matches_the_exact_distribution() {
    let p = special();
    let mut ch = TwentyVChain::new(3, &p, Acceptance::Metropolis, 21).unwrap();
    ch.run(10_000);
    let mut counts: HashMap<Configuration, u64> = HashMap::new();
    for _ in 0..40_000 {
        ch.run(default_record_interval(3));
        *counts.entry(ch.config().clone()).or_default() += 1;
    }
    assert!(total_variation(&counts, &exact_distribution_20v(3, &p).unwrap()) < 0.03);
}

#[test]
fn diagonal_state_density_is_a_step() {
    let n = 7;
    let f = density_diagonal(&[init_diagonal(n).unwrap()]).unwrap();
    for y in 1..=n {
        for x in 1..=n {
            assert_eq!(f.grid[y - 1][x - 1], if x + y <= n + 1 { 1.0 } else { 0.0 });
        }
    }
    let csv = f.to_csv();
    assert!(csv.starts_with("y,x,density\n1,1,1\n"));
    assert_eq!(csv.lines().count(), 1 + n * n);
    assert!(density_diagonal(&[]).is_err());
}

#[test]
fn merged_fields_are_sample_weighted() {
    let full = init_diagonal(4).unwrap();
    let mut a = DensityField::new(4);
    a.record_with(|_, _| true);
    let mut b = DensityField::new(4);
    for _ in 0..3 {
        b.record_with(|_, _| false);
    }
    a.merge(&b);
    assert_eq!(a.samples, 4);
    assert!(a.grid.iter().flatten().all(|&v| (v - 0.25).abs() < 1e-15));
    let d = density_diagonal(&[full.clone(), full]).unwrap();
    assert_eq!(d.l1_distance(&d), 0.0);
}

#[test]
fn misclassification_of_a_perfect_field_is_zero() {
    let curve = predicted_region(&AngleParams::uniform()).unwrap();
    let n = 40;
    let mut f = DensityField::new(n);
    f.record_with(|x, y| {
        let (px, py) = node_position(n, x + 1, y + 1);
        px + py < 1.0 && !curve.contains(px, py)
    });
    // liquid nodes need a fractional density
    for row in f.grid.iter_mut().enumerate() {
        for (x, g) in row.1.iter_mut().enumerate() {
            let (px, py) = node_position(n, x + 1, row.0 + 1);
            if curve.contains(px, py) {
                *g = 0.5;
            }
        }
    }
    assert_eq!(misclassification(&f, &curve, 0.02), 0.0);
    let empty = DensityField::new(n);
    assert!(misclassification(&empty, &curve, 0.02) > 0.3);
}

#[test]
fn synthetic_profiles_recover_the_exponent() {
    // a square of side ½ rotated into the (u, v) frame
    let curve = ClosedCurve { points: vec![(0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75)], max_gap: 0.0 };
    let v: Vec<f64> = (0..=10).map(|k| -0.2 + 0.04 * k as f64).collect();
    let profiles: Vec<PathProfile> = [25usize, 50, 75, 100]
        .iter()
        .map(|&n| {
            let u =
                v.iter().map(|&vv| curve_outer_u(&curve, vv).unwrap() - 0.3 * (n as f64).powf(-2.0 / 3.0)).collect();
            PathProfile { n, v: v.clone(), u, samples: 1 }
        })
        .collect();
    let fit = finite_size_fit(&profiles, &curve).unwrap();
    assert!((fit.exponent + 2.0 / 3.0).abs() < 1e-12);
    assert!((fit.prefactor - 0.3).abs() < 1e-12);
    assert!(finite_size_fit(&profiles[..2], &curve).is_err());
}

#[test]
fn path_profile_of_the_diagonal_state() {
    let n = 10;
    let c = init_diagonal(n).unwrap();
    let p = outermost_mean(&[c], vec![-0.2, 0.0, 0.2]).unwrap();
    // the uppermost path follows the anti-diagonal x + y = n + 1
    for (&v, &u) in p.v.iter().zip(&p.u) {
        assert!((u - 0.5).abs() < 1e-12, "v={v}: u={u}");
    }
}

fn all_slots(ch: &QthadtChain) -> Vec<QthadtSlot> {
    (0..ch.slot_count()).map(|k| ch.slot(k)).collect()
}

#[test]
fn qthadt_flips_are_involutions() {
    for n in 2..=4 {
        for f in brute_families(n).unwrap() {
            let ch = QthadtChain::from_family(f.clone(), 1.0, 0).unwrap();
            for slot in all_slots(&ch) {
                if let Some(g) = ch.propose(slot) {
                    g.validate().unwrap();
                    let back = QthadtChain::from_family(g, 1.0, 0).unwrap().propose(slot);
                    assert_eq!(back.as_ref(), Some(&f), "{slot:?}");
                }
            }
        }
    }
}

#[test]
fn path_number_changes_only_through_the_cross_move() {
    for f in brute_families(4).unwrap() {
        let ch = QthadtChain::from_family(f.clone(), 1.0, 0).unwrap();
        for slot in all_slots(&ch) {
            if let Some(g) = ch.propose(slot) {
                let changed = g.path_count() != f.path_count();
                assert_eq!(changed, slot == QthadtSlot::Cross, "{slot:?}");
            }
        }
    }
}

#[test]
fn qthadt_chain_balances_and_connects() {
    for n in 2..=4 {
        for gamma in [0.3, 1.0, 2.5] {
            let pi = exact_distribution_qthadt(n, gamma).unwrap();
            let law = |f: &SchroderFamily| QthadtChain::from_family(f.clone(), gamma, 0).unwrap().transition_law();
            assert!(detailed_balance_defect(&pi, law) < 1e-14);
        }
    }
    let mut ch = QthadtChain::new(3, 0.5, 8).unwrap();
    let mut seen = HashSet::new();
    for _ in 0..200_000 {
        ch.step();
        seen.insert(ch.family().clone());
    }
    assert_eq!(seen.len(), 23);
}

#[test]
fn qthadt_gamma_must_be_positive() {
    assert!(QthadtChain::new(3, 0.0, 1).is_err());
    let mut ch = QthadtChain::new(3, 1.0, 1).unwrap();
    assert!(ch.set_gamma(-1.0).is_err());
    ch.set_gamma(0.25).unwrap();
    assert_eq!(ch.gamma(), 0.25);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn qthadt_states_stay_valid(seed in any::<u64>(), n in 1usize..8, gamma in 0.1f64..3.0, steps in 0u64..5000) {
        let mut ch = QthadtChain::new(n, gamma, seed).unwrap();
        ch.run(steps);
        prop_assert!(ch.family().validate().is_ok());
        prop_assert!(ch.accepted() <= ch.steps());
    }

    #[test]
    fn twentyv_chain_keeps_every_node_valid(seed in any::<u64>(), steps in 0u64..20_000) {
        let mut ch = TwentyVChain::new(10, &AngleParams::uniform(), Acceptance::Lyberg, seed).unwrap();
        ch.run(steps);
        prop_assert!(all_nodes_valid(ch.config()));
    }
}
