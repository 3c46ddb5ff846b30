use proptest::prelude::*;
use twentyv::enumerate::list_configurations;
use twentyv::lattice::{Boundary, Configuration, Family};
use twentyv::mcmc::{init_diagonal, TwentyVChain};
use twentyv::weights::AngleParams;
use twentyv::Error;

fn configs(n: usize, bc: Boundary) -> Vec<Configuration> {
    list_configurations(n, bc).unwrap()
}

#[test]
fn text_round_trip_over_all_small_configurations() {
    for bc in [Boundary::Dwbc1, Boundary::Dwbc2, Boundary::SixVertex] {
        for c in configs(3, bc) {
            let t = c.to_text();
            assert!(t.starts_with(&format!("twentyv-config n=3 bc={}\n", bc.name())));
            assert_eq!(Configuration::from_text(&t).unwrap(), c);
        }
    }
}

#[test]
fn malformed_text_is_rejected() {
    let good = configs(2, Boundary::Dwbc1)[0].to_text();
    assert!(Configuration::from_text("").is_err());
    assert!(Configuration::from_text(&good.replacen("twentyv-config", "config", 1)).is_err());
    assert!(Configuration::from_text(&good.replacen("bc=DWBC1", "bc=XYZ", 1)).is_err());
    let truncated: String = good.lines().take(4).map(|l| format!("{l}\n")).collect();
    assert!(Configuration::from_text(&truncated).is_err());
    let mut lines: Vec<String> = good.lines().map(String::from).collect();
    let d = lines.iter().position(|l| l == "d").unwrap();
    let row = &mut lines[d + 2];
    let flipped: String = row
        .chars()
        .enumerate()
        .map(|(i, ch)| {
            if i == 1 {
                if ch == '0' {
                    '1'
                } else {
                    '0'
                }
            } else {
                ch
            }
        })
        .collect();
    *row = flipped;
    let text = lines.join("\n");
    assert!(matches!(Configuration::from_text(&text), Err(Error::InvalidConfiguration(_))));
}

#[test]
fn dual_exchanges_the_domain_wall_prescriptions() {
    let one = configs(3, Boundary::Dwbc1);
    let two = configs(3, Boundary::Dwbc2);
    for c in &one {
        let d = c.dual();
        assert_eq!(d.bc(), Boundary::Dwbc2);
        d.validate().unwrap();
        assert!(two.contains(&d));
        assert_eq!(&d.dual(), c);
    }
}

#[test]
fn transpose_is_an_involution_on_valid_configurations() {
    for bc in [Boundary::Dwbc1, Boundary::Dwbc2] {
        let all = configs(3, bc);
        for c in &all {
            let t = c.transpose();
            t.validate().unwrap();
            assert!(all.contains(&t));
            assert_eq!(&t.transpose(), c);
        }
    }
}

#[test]
fn uppermost_path_ends_on_the_right_boundary() {
    for c in configs(4, Boundary::Dwbc2) {
        let (l, _) = c.hit_position().unwrap();
        assert!((1..=4).contains(&l));
        let path = c.uppermost_path().unwrap();
        assert_eq!(path[0].0, 1);
        assert_eq!(path[0].1, 4);
        let (x, _) = c.top_exit_position().unwrap();
        assert!((1..=4).contains(&x));
    }
}

#[test]
fn diagonal_initial_state() {
    for n in 1..=8 {
        let c = init_diagonal(n).unwrap();
        c.validate().unwrap();
        assert_eq!(c.bc(), Boundary::Dwbc1);
        for x in 1..=n {
            for y in 1..=n {
                assert_eq!(c.get(Family::D, x, y - 1), x + y <= n + 1, "n={n} ({x},{y})");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn chain_states_stay_valid_and_serializable(seed in any::<u64>(), n in 2usize..9, steps in 0u64..4000) {
        let p = AngleParams::on_special_line(std::f64::consts::PI / 12.0, 10.0 * std::f64::consts::PI / 12.0).unwrap();
        let mut ch = TwentyVChain::new(n, &p, twentyv::mcmc::Acceptance::Metropolis, seed).unwrap();
        ch.run(steps);
        let c = ch.config();
        prop_assert!(c.validate().is_ok());
        prop_assert_eq!(&Configuration::from_text(&c.to_text()).unwrap(), c);
        prop_assert_eq!(&c.transpose().transpose(), c);
    }
}
