//! The pseudospectral transport term against a transform-free convolution sum.

use spectral_core::testing::{b_hat_convolution_oracle, max_relative_mode_error};
use spectral_core::{b_hat, random_field, trilinear_b, Field64, Grid64};

fn pair(g: &Grid64, seed: u64) -> (Field64, Field64) {
    (random_field(g, 2 * seed, 2.0).unwrap(), random_field(g, 2 * seed + 1, 2.0).unwrap())
}

#[test]
fn pseudospectral_matches_direct_convolution_k4() {
    let g = Grid64::new(4, 1.0, 0.1).unwrap();
    for seed in 0..20 {
        let (u, v) = pair(&g, seed);
        let fast = b_hat(&g, &u, &v);
        let slow = b_hat_convolution_oracle(&g, &u, &v);
        let err = max_relative_mode_error(&slow, &fast);
        assert!(err <= 1e-12, "seed {seed}: max relative deviation {err:e}");
    }
}

#[test]
fn pseudospectral_matches_direct_convolution_k6() {
    let g = Grid64::new(6, 0.7, 0.2).unwrap();
    for seed in 100..105 {
        let (u, v) = pair(&g, seed);
        let err = max_relative_mode_error(
            &b_hat_convolution_oracle(&g, &u, &v),
            &b_hat(&g, &u, &v),
        );
        assert!(err <= 1e-12, "seed {seed}: max relative deviation {err:e}");
    }
}

#[test]
fn oracle_confirms_single_mode_self_transport_vanishes() {
    // For one Fourier mode, q(u) × u is a pure gradient, so the projected
    // transport term vanishes; the oracle must agree from the raw sum.
    let g = Grid64::new(4, 1.0, 0.1).unwrap();
    let mut u = g.zero_field();
    let n = 10.0f64.sqrt();
    u.set_conjugate_pair(
        3,
        1,
        num_complex::Complex::new(-1.0 / n, 0.2),
        num_complex::Complex::new(3.0 / n, -0.6),
    );
    assert!(b_hat_convolution_oracle(&g, &u, &u).max_abs() < 1e-12);
    assert!(b_hat(&g, &u, &u).max_abs() < 1e-12);
}

#[test]
fn advection_of_zero_field_vanishes() {
    let g = Grid64::new(4, 1.0, 0.1).unwrap();
    let (_, v) = pair(&g, 7);
    let zero = g.zero_field();
    assert_eq!(trilinear_b(&g, &zero, &v, &v), 0.0);
    assert!(b_hat(&g, &zero, &v).max_abs() == 0.0);
}
