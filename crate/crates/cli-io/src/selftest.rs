//! Operator identity suite: the algebraic facts the whole solver stack
//! rests on, checked on ensembles of random divergence-free fields.
//!
//! Each check reports its worst relative error across the ensemble
//! against a fixed tolerance.  The identities: V-orthogonality of the
//! transport term against its second argument, antisymmetry of the
//! transport pairing, vanishing of the scalar trilinear form on repeated
//! arguments, the potential-vorticity expansion of the strong norm,
//! idempotency and self-adjointness of the solenoidal projection, the
//! per-mode eigenvalue relation between the W and V pairings, and the
//! Poincaré sandwich pinning the V norm between multiples of the H¹
//! seminorm.

use num_complex::Complex;
use spectral_core::{
    b_hat, curl_q, dealias, leray_project, random_field, trilinear_b, Field64, Grid64,
};

use crate::error::CliError;

/// Outcome of one identity check on one grid.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub k_max: u32,
    /// Worst relative error observed across the ensemble.
    pub worst: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &'static str, k_max: u32, worst: f64, tolerance: f64) -> Self {
        Check {
            name,
            k_max,
            worst,
            tolerance,
            pass: worst <= tolerance,
        }
    }

    /// One-line human-readable verdict.
    pub fn render(&self) -> String {
        format!(
            "{} K={:<2} {:<38} worst {:>9.2e}  tol {:>7.1e}",
            if self.pass { "pass" } else { "FAIL" },
            self.k_max,
            self.name,
            self.worst,
            self.tolerance,
        )
    }
}

/// Random dealiased divergence-free field — the class evolved states
/// live in.
fn state(g: &Grid64, seed: u64) -> Field64 {
    dealias(g, &random_field(g, seed, 2.5).expect("slope 2.5 is admissible"))
}

/// Run the full identity suite on one grid with `n_fields` random draws.
pub fn operator_identity_suite(
    grid: &Grid64,
    n_fields: usize,
    seed: u64,
) -> Result<Vec<Check>, CliError> {
    if n_fields == 0 {
        return Err(CliError::Config("the identity suite needs at least one field".into()));
    }
    let k = grid.k_max() as u32;
    let alpha = grid.alpha();
    let mut w_orth: f64 = 0.0;
    let mut w_anti: f64 = 0.0;
    let mut w_tri: f64 = 0.0;
    let mut w_curl: f64 = 0.0;
    let mut w_leray: f64 = 0.0;
    let mut w_poincare: f64 = 0.0;

    for i in 0..n_fields {
        let s = seed.wrapping_add(1 + 3 * i as u64);
        let u = state(grid, s);
        let v = state(grid, s + 1);
        let w = state(grid, s + 2);
        let scale = (grid.norm_w(&u) * grid.norm_v(&v) * grid.norm_v(&w)).max(1.0);
        let scale_vv = (grid.norm_w(&u) * grid.norm_v(&v) * grid.norm_v(&v)).max(1.0);

        // <B(u,v), v>_V = 0 and <B(u,v), w>_V = -<B(u,w), v>_V.
        let buv = b_hat(grid, &u, &v);
        let buw = b_hat(grid, &u, &w);
        w_orth = w_orth.max(grid.inner_v(&buv, &v).abs() / scale_vv);
        w_anti =
            w_anti.max((grid.inner_v(&buv, &w) + grid.inner_v(&buw, &v)).abs() / scale);

        // b(u, v, v) = 0: the scalar advection form vanishes on repeated
        // arguments.
        w_tri = w_tri.max(trilinear_b(grid, &u, &v, &v).abs() / scale_vv);

        // |q(u)|^2 expands to the strong norm symbol mode by mode.
        let q = curl_q(grid, &u);
        let direct = grid.scalar_inner_l2(&q, &q);
        let mut expanded = 0.0;
        for idx in 0..grid.lattice_len() {
            let sq = grid.laplacian_symbol()[idx];
            let e = u.comp1()[idx].norm_sqr() + u.comp2()[idx].norm_sqr();
            expanded += (1.0 + alpha * sq).powi(2) * sq * e;
        }
        w_curl = w_curl.max((direct - expanded).abs() / expanded.max(1.0));

        // Solenoidal projection: P(Pf) = Pf and (Pf, h) = (f, Ph) on raw
        // fields with an explicit gradient (curl-free) part mixed in.
        let mut f = random_field(grid, s + 3, 2.0).expect("slope 2 is admissible");
        let mut grad = grid.zero_field();
        for m in grid.modes() {
            let (v1, _) = f.get(m.k1, m.k2);
            grad.set(m.k1, m.k2, v1 * (m.k1 as f64), v1 * (m.k2 as f64));
        }
        f.axpy(0.7, &grad);
        let mut h = random_field(grid, s + 4, 2.0).expect("slope 2 is admissible");
        h.axpy(-0.3, &grad);
        let pf = leray_project(grid, &f);
        let ppf = leray_project(grid, &pf);
        let mut diff = 0.0f64;
        for idx in 0..grid.lattice_len() {
            diff = diff
                .max((ppf.comp1()[idx] - pf.comp1()[idx]).norm())
                .max((ppf.comp2()[idx] - pf.comp2()[idx]).norm());
        }
        w_leray = w_leray.max(diff / pf.max_abs().max(1.0));
        let ph = leray_project(grid, &h);
        let adj = (grid.inner_l2(&pf, &h) - grid.inner_l2(&f, &ph)).abs()
            / (grid.norm_l2(&f) * grid.norm_l2(&h)).max(1.0);
        w_leray = w_leray.max(adj);

        // Poincaré sandwich: alpha * ((u,u)) <= |u|_V^2 <= (1+alpha) * ((u,u))
        // for zero-mean fields, as relative violation.
        let semi = grid.inner_h1(&u, &u);
        let vsq = grid.inner_v(&u, &u);
        w_poincare = w_poincare
            .max((vsq / (1.0 + alpha) - semi) / semi)
            .max((semi - vsq / alpha) / semi);
    }

    // Per-mode eigenvalue relation (v, e_k)_W = lambda_k (v, e_k)_V for
    // every lattice eigenfunction e_k, checked against one random state.
    let v = state(grid, seed);
    let mut w_eigen: f64 = 0.0;
    for m in grid.modes() {
        let n = ((m.k1 * m.k1 + m.k2 * m.k2) as f64).sqrt();
        let mut e = grid.zero_field();
        e.set_conjugate_pair(
            m.k1,
            m.k2,
            Complex::new(-(m.k2 as f64) / n, 0.0),
            Complex::new((m.k1 as f64) / n, 0.0),
        );
        let lambda = grid
            .eigen_lambda(m.k1, m.k2)
            .expect("every lattice mode has an eigenvalue");
        let lhs = grid.inner_w(&v, &e);
        let rhs = lambda * grid.inner_v(&v, &e);
        let scale = (grid.norm_w(&v) * grid.norm_w(&e)).max(1.0);
        w_eigen = w_eigen.max((lhs - rhs).abs() / scale);
    }

    Ok(vec![
        Check::new("transport V-orthogonality", k, w_orth, 1e-10),
        Check::new("transport antisymmetry", k, w_anti, 1e-10),
        Check::new("trilinear form vanishes on (u,v,v)", k, w_tri, 1e-10),
        Check::new("potential-vorticity norm expansion", k, w_curl, 1e-12),
        Check::new("projection idempotent and self-adjoint", k, w_leray, 1e-12),
        Check::new("per-mode eigenvalue relation", k, w_eigen, 1e-12),
        Check::new("Poincare sandwich", k, w_poincare, 1e-12),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_suite_passes_on_a_small_grid() {
        let grid = Grid64::new(8, 1.0, 0.1).unwrap();
        let checks = operator_identity_suite(&grid, 5, 99).unwrap();
        assert_eq!(checks.len(), 7);
        for c in &checks {
            assert!(c.pass, "{}", c.render());
        }
    }

    #[test]
    fn zero_field_count_is_rejected() {
        let grid = Grid64::new(8, 1.0, 0.1).unwrap();
        assert!(operator_identity_suite(&grid, 0, 1).is_err());
    }
}
