//! Algebraic identities of the operator family on random lattice fields.

use num_complex::Complex;
use spectral_core::{
    apply_stokes_multiplier, b_hat, curl_q, dealias, leray_project, random_field, Field64, Grid64,
    StokesMultiplier,
};

fn grid(k: u32) -> Grid64 {
    Grid64::new(k, 1.0, 0.1).unwrap()
}

/// Random dealiased divergence-free field: the class evolved states live in.
fn state(g: &Grid64, seed: u64) -> Field64 {
    dealias(g, &random_field(g, seed, 2.5).unwrap())
}

#[test]
fn leray_is_idempotent_and_l2_self_adjoint() {
    let g = grid(8);
    for seed in 0..5 {
        // Build a raw (non-divergence-free) Hermitian field by giving a
        // projected field a gradient part.
        let mut f = random_field(&g, 100 + seed, 2.0).unwrap();
        let mut grad = g.zero_field();
        for m in g.modes() {
            let (v1, _) = f.get(m.k1, m.k2);
            grad.set(m.k1, m.k2, v1 * (m.k1 as f64), v1 * (m.k2 as f64));
        }
        f.axpy(0.7, &grad);
        let mut h = random_field(&g, 200 + seed, 2.0).unwrap();
        h.axpy(-0.3, &grad);

        let pf = leray_project(&g, &f);
        let ppf = leray_project(&g, &pf);
        let scale = pf.max_abs().max(1.0);
        for i in 0..g.lattice_len() {
            assert!((ppf.comp1()[i] - pf.comp1()[i]).norm() <= 1e-14 * scale);
            assert!((ppf.comp2()[i] - pf.comp2()[i]).norm() <= 1e-14 * scale);
        }

        let ph = leray_project(&g, &h);
        let lhs = g.inner_l2(&pf, &h);
        let rhs = g.inner_l2(&f, &ph);
        let bound = 1e-12 * (g.norm_l2(&f) * g.norm_l2(&h)).max(1.0);
        assert!((lhs - rhs).abs() <= bound, "(Pf,h) = {lhs}, (f,Ph) = {rhs}");
    }
}

#[test]
fn transport_pairing_is_antisymmetric_in_v() {
    let g = grid(8);
    for seed in 0..8 {
        let u = state(&g, 300 + seed);
        let v = state(&g, 400 + seed);
        let w = state(&g, 500 + seed);
        let buv = b_hat(&g, &u, &v);
        let buw = b_hat(&g, &u, &w);
        let scale = g.norm_w(&u) * g.norm_v(&v) * g.norm_v(&w);
        let lhs = g.inner_v(&buv, &w);
        let rhs = -g.inner_v(&buw, &v);
        assert!(
            (lhs - rhs).abs() <= 1e-10 * scale.max(1.0),
            "⟨B̂(u,v),w⟩ = {lhs:e}, −⟨B̂(u,w),v⟩ = {rhs:e}"
        );
        assert!(g.inner_v(&buv, &v).abs() <= 1e-10 * scale.max(1.0));
    }
}

#[test]
fn effective_dissipation_pairs_to_the_h1_seminorm() {
    let g = grid(16);
    for seed in 0..5 {
        let u = state(&g, 600 + seed);
        let au = apply_stokes_multiplier(&g, &u, StokesMultiplier::EffectiveDissipation);
        let lhs = g.inner_v(&au, &u);
        let rhs = g.inner_h1(&u, &u);
        assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0), "(Âu,u)_V = {lhs}, ‖u‖² = {rhs}");
    }
}

#[test]
fn eigen_relation_holds_for_every_mode() {
    let g = grid(8);
    let v = state(&g, 700);
    for m in g.modes() {
        let n = ((m.k1 * m.k1 + m.k2 * m.k2) as f64).sqrt();
        let mut e = g.zero_field();
        e.set_conjugate_pair(
            m.k1,
            m.k2,
            Complex::new(-(m.k2 as f64) / n, 0.0),
            Complex::new((m.k1 as f64) / n, 0.0),
        );
        let lambda = g.eigen_lambda(m.k1, m.k2).unwrap();
        let lhs = g.inner_w(&v, &e);
        let rhs = lambda * g.inner_v(&v, &e);
        let scale = (g.norm_w(&v) * g.norm_w(&e)).max(1.0);
        assert!(
            (lhs - rhs).abs() <= 1e-12 * scale,
            "k = ({}, {}): (v,e)_W = {lhs:e}, λ(v,e)_V = {rhs:e}",
            m.k1,
            m.k2
        );
    }
}

#[test]
fn poincare_sandwich_on_the_zero_mean_torus() {
    for alpha in [0.5, 1.0, 2.0] {
        let g = Grid64::new(8, alpha, 0.1).unwrap();
        for seed in 0..5 {
            let v = state(&g, 800 + seed);
            let seminorm_sq = g.inner_h1(&v, &v);
            let v_sq = g.inner_v(&v, &v);
            assert!(v_sq / (1.0 + alpha) <= seminorm_sq * (1.0 + 1e-12));
            assert!(seminorm_sq <= v_sq / alpha * (1.0 + 1e-12));
        }
    }
}

#[test]
fn v_norm_hand_value_single_mode() {
    // α = 0.5, |k|² = 4, |û|² = 1 → ‖u‖_V² = 1 + 0.5·4 = 3.
    let g = Grid64::new(4, 0.5, 0.1).unwrap();
    let mut u = g.zero_field();
    // k = (2, 0), direction k⊥ = (0, 1); conjugate pair splits |û|² = 1
    // as 1/2 + 1/2 across ±k.
    u.set_conjugate_pair(2, 0, Complex::new(0.0, 0.0), Complex::new(0.5, 0.5));
    let total: f64 = u.comp2().iter().map(|z| z.norm_sqr()).sum();
    assert!((total - 1.0).abs() < 1e-15);
    assert!((g.inner_v(&u, &u) - 3.0).abs() < 1e-14);
    assert!(g.inner_w(&u, &u) >= g.inner_v(&u, &u));
}

#[test]
fn h3_proxy_is_dominated_by_the_w_norm_uniformly_in_k() {
    // Per-mode ratio (1+|k|²)³ / [(1+α|k|²) + (1+α|k|²)²|k|²] peaks at
    // |k|² = 1 for α = 1, value 4/3; larger lattices add only smaller terms.
    let mut per_mode_max = Vec::new();
    for k in [8u32, 16, 32] {
        let g = grid(k);
        let mut worst: f64 = 0.0;
        for m in g.modes() {
            let s = (m.k1 * m.k1 + m.k2 * m.k2) as f64;
            let w = (1.0 + s) + (1.0 + s).powi(2) * s;
            let h3 = (1.0 + s).powi(3);
            worst = worst.max(h3 / w);
        }
        per_mode_max.push(worst);

        for seed in 0..3 {
            let v = state(&g, 900 + seed);
            let mut proxy = 0.0;
            for idx in 0..g.lattice_len() {
                let sq = g.laplacian_symbol()[idx];
                let e = v.comp1()[idx].norm_sqr() + v.comp2()[idx].norm_sqr();
                proxy += (1.0 + sq).powi(3) * e;
            }
            let w_sq = g.inner_w(&v, &v);
            assert!(proxy <= worst * w_sq * (1.0 + 1e-12));
        }
    }
    assert!((per_mode_max[0] - 4.0 / 3.0).abs() <= 1e-12);
    assert!(per_mode_max[1] <= per_mode_max[0] + 1e-12);
    assert!(per_mode_max[2] <= per_mode_max[0] + 1e-12);
}

#[test]
fn transport_bound_constant_does_not_grow_with_resolution() {
    // |⟨B̂(u,v),w⟩_V| ≤ C‖u‖_W‖v‖_V‖w‖_W with a sampled C stable in K.
    let mut sampled = Vec::new();
    for k in [8u32, 16, 32] {
        let g = grid(k);
        let mut worst: f64 = 0.0;
        for seed in 0..6 {
            let u = state(&g, 1000 + seed);
            let v = state(&g, 1100 + seed);
            let w = state(&g, 1200 + seed);
            let b = b_hat(&g, &u, &v);
            let c = g.inner_v(&b, &w).abs() / (g.norm_w(&u) * g.norm_v(&v) * g.norm_w(&w));
            worst = worst.max(c);
        }
        sampled.push(worst);
    }
    let c8 = sampled[0];
    assert!(sampled[1] <= 1.3 * c8, "C(16) = {} vs C(8) = {c8}", sampled[1]);
    assert!(sampled[2] <= 1.3 * c8, "C(32) = {} vs C(8) = {c8}", sampled[2]);
}

#[test]
fn potential_vorticity_norm_expansion() {
    // For divergence-free u: ‖u‖_*² = Σ (1+α|k|²)²|k|² |û_k|².
    let g = grid(8);
    let u = state(&g, 1300);
    let q = curl_q(&g, &u);
    let direct = g.scalar_inner_l2(&q, &q);
    let mut expanded = 0.0;
    for idx in 0..g.lattice_len() {
        let sq = g.laplacian_symbol()[idx];
        let e = u.comp1()[idx].norm_sqr() + u.comp2()[idx].norm_sqr();
        expanded += (1.0 + sq).powi(2) * sq * e;
    }
    assert!((direct - expanded).abs() <= 1e-12 * expanded.max(1.0));
}
