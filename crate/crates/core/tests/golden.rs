//! Frozen exact fidelity amplitude of the displaced-oscillator scenario (M = 4096).
//! Values were produced by an independent FFT implementation; doubling M changed them by
//! about 1e-14.

use loschmidt_core::presets;
use loschmidt_core::qgrid::fidelity_exact;

const DISPLACED_HO: [(usize, f64, f64); 13] = [
    (0, 1.000000000000000e+00, 0.000000000000000e+00),
    (21, 7.017473074402020e-01, -3.251326872182872e-01),
    (42, 4.209610389838705e-01, -1.939204347198732e-01),
    (63, 3.679633123256048e-01, 1.607675745503532e-03),
    (84, 4.372839502574926e-01, 2.037486809151515e-01),
    (105, 7.161107458891389e-01, 3.279566906275347e-01),
    (126, 9.998853941591574e-01, -8.737071284826673e-03),
    (147, 6.948793003110851e-01, -3.255708792996099e-01),
    (168, 4.186786709064077e-01, -1.906005929988056e-01),
    (189, 3.681520570722620e-01, 4.825255787833861e-03),
    (210, 4.397669587137780e-01, 2.071655449384016e-01),
    (231, 7.228167532987223e-01, 3.270625561236722e-01),
    (252, 9.995415863649936e-01, -1.746680132917412e-02),
];

#[test]
fn displaced_ho_matches_frozen_table() {
    let s = presets::load("displaced_ho").unwrap();
    let f = fidelity_exact(&s.state, &s.pair, s.n_steps, s.tau, s.hbar, &s.grid).unwrap();
    for (n, re, im) in DISPLACED_HO {
        let v = f.values[n];
        assert!((v.re - re).abs() < 1e-11 && (v.im - im).abs() < 1e-11, "step {n}: {v}");
    }
}

#[test]
fn grid_refinement_is_converged() {
    for name in ["displaced_ho", "ho_diff_k", "cubic_perturbation", "linear_gradient", "morse_like"] {
        let s = presets::load(name).unwrap();
        let coarse = fidelity_exact(&s.state, &s.pair, s.n_steps, s.tau, s.hbar, &s.grid).unwrap();
        let fine = fidelity_exact(&s.state, &s.pair, s.n_steps, s.tau, s.hbar, &s.grid.refined(2).unwrap()).unwrap();
        let dev = coarse.max_deviation(&fine);
        assert!(dev < 1e-8, "{name}: {dev:e}");
    }
}
