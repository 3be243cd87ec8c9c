mod common;

use echelon_core::paradox::{
    braess_delta, parrondo_drift, parrondo_simulate, schedule_drift, wardrop_certificate,
    wardrop_equilibrium, Link, ParrondoGame, ParrondoSpec, RoutingNetwork, Schedule,
};
use proptest::prelude::*;

fn diamond(lat: [(f64, f64); 5], demand: f64) -> RoutingNetwork {
    let mut links = vec![
        Link::new("s", "a", lat[0].0, lat[0].1),
        Link::new("a", "t", lat[1].0, lat[1].1),
        Link::new("s", "b", lat[2].0, lat[2].1),
        Link::new("b", "t", lat[3].0, lat[3].1),
        Link::new("a", "b", lat[4].0, lat[4].1),
    ];
    links[4].shortcut = true;
    RoutingNetwork {
        nodes: ["s", "a", "b", "t"].iter().map(|s| s.to_string()).collect(),
        links,
        origin: "s".into(),
        destination: "t".into(),
        demand,
    }
}

proptest! {
    /// With flow-independent latencies every traveller takes a shortest path,
    /// so an extra link can never slow the network down.
    #[test]
    fn constant_latencies_never_paradoxical(c in prop::array::uniform5(0.0..50.0f64), demand in 1.0..100.0f64) {
        let net = diamond(c.map(|x| (x, 0.0)), demand);
        let out = braess_delta(&net).unwrap();
        prop_assert!(out.delta <= 1e-9);
    }

    #[test]
    fn affine_equilibria_are_certified(
        c in prop::array::uniform5(0.0..50.0f64),
        s in prop::array::uniform5(0.0..0.05f64),
        demand in 1.0..200.0f64,
    ) {
        let lat = [0, 1, 2, 3, 4].map(|i| (c[i], s[i]));
        let net = diamond(lat, demand);
        for n in [net.clone(), net.without_shortcuts()] {
            let eq = wardrop_equilibrium(&n).unwrap();
            prop_assert!(wardrop_certificate(&n, &eq).holds(1e-6));
        }
    }

    #[test]
    fn drift_matches_rational_oracle(eps_milli in 0i64..20, pz in 1i64..50, po in 50i64..99) {
        let spec = ParrondoSpec {
            p_a: 0.5 - eps_milli as f64 / 1000.0,
            modulus: 3,
            p_b_zero: pz as f64 / 100.0,
            p_b_other: po as f64 / 100.0,
            mix_gamma: 0.5,
        };
        let exact = common::exact_drift(&[
            common::rational(pz, 100),
            common::rational(po, 100),
            common::rational(po, 100),
        ]);
        let got = parrondo_drift(&spec, ParrondoGame::B).unwrap();
        prop_assert!((got - common::to_f64(&exact)).abs() < 1e-12);
    }
}

#[test]
fn fair_coins_have_no_drift() {
    let spec = ParrondoSpec {
        p_a: 0.5,
        modulus: 3,
        p_b_zero: 0.5,
        p_b_other: 0.5,
        mix_gamma: 0.5,
    };
    for g in [ParrondoGame::A, ParrondoGame::B, ParrondoGame::Mixed] {
        assert!(parrondo_drift(&spec, g).unwrap().abs() < 1e-15);
        let sim = parrondo_simulate(&spec, g, 200_000, 3);
        assert!(sim.drift.abs() < 4.0 * sim.std_error, "{sim:?}");
    }
}

#[test]
fn classic_network_shows_the_paradox() {
    let net = RoutingNetwork::classic(4000.0);
    let out = braess_delta(&net).unwrap();
    assert!((out.time_without - 65.0).abs() < 1e-9);
    assert!((out.time_with - 80.0).abs() < 1e-9);
    assert!(braess_delta(&net.without_shortcuts()).is_err());
}

#[test]
fn periodic_schedule_beats_both_games() {
    let spec = ParrondoSpec::default();
    let a = parrondo_drift(&spec, ParrondoGame::A).unwrap();
    let b = parrondo_drift(&spec, ParrondoGame::B).unwrap();
    let ab = schedule_drift(&spec, &Schedule::parse("AABB").unwrap()).unwrap();
    assert!(a < 0.0 && b < 0.0 && ab > 0.0);
}
