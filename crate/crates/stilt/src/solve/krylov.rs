//! Preconditioned Krylov solvers.
//!
//! MinRes in the Paige-Saunders form handles the symmetric indefinite
//! saddle systems; convergence is measured in the norm induced by the
//! (symmetric positive definite) preconditioner, which is the quantity
//! the three-term Lanczos recurrence tracks for free. CG covers the
//! positive definite reference solves.

use serde::Serialize;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::fem::sparse::{axpy, dot};

/// Outcome of an iterative solve.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub converged: bool,
    /// Preconditioned residual norms, one entry per iteration, starting
    /// with the initial residual.
    pub residual_history: Vec<f64>,
    /// Seconds spent inside the solver loop.
    pub wall_time: f64,
}

/// Preconditioned MinRes for symmetric (possibly indefinite) systems.
///
/// `apply_k` is the system operator, `apply_pinv` the inverse action of a
/// symmetric positive definite preconditioner. Iterates until the
/// preconditioned residual drops below `rtol` times its initial value.
pub fn minres(
    apply_k: &dyn Fn(&[f64]) -> Vec<f64>,
    apply_pinv: &dyn Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    rtol: f64,
    max_iterations: usize,
) -> (Vec<f64>, SolveReport) {
    let start = Instant::now();
    let n = b.len();
    let mut x = vec![0.0; n];

    // Lanczos start: v holds P-normalized residual directions, z = P⁻¹ v.
    let mut v = b.to_vec();
    let mut z = apply_pinv(&v);
    let beta0_sq = dot(&z, &v);
    if beta0_sq <= 0.0 {
        let report = SolveReport {
            iterations: 0,
            converged: true,
            residual_history: vec![0.0],
            wall_time: start.elapsed().as_secs_f64(),
        };
        return (x, report);
    }
    let beta0 = beta0_sq.sqrt();
    let mut history = vec![beta0];
    let tol = rtol * beta0;

    for e in v.iter_mut() {
        *e /= beta0;
    }
    for e in z.iter_mut() {
        *e /= beta0;
    }
    let mut v_prev = vec![0.0; n];
    let mut gamma = 0.0f64; // subdiagonal entering the current column

    // Givens rotations from the two previous columns.
    let (mut c_prev2, mut s_prev2) = (1.0f64, 0.0f64);
    let (mut c_prev, mut s_prev) = (1.0f64, 0.0f64);
    let mut eta = beta0;
    let mut w_prev = vec![0.0; n];
    let mut w_prev2 = vec![0.0; n];
    let mut converged = beta0 <= 0.0;
    let mut iterations = 0;

    while !converged && iterations < max_iterations {
        iterations += 1;
        let mut q = apply_k(&z);
        let delta = dot(&z, &q);
        axpy(-delta, &v, &mut q);
        if gamma != 0.0 {
            axpy(-gamma, &v_prev, &mut q);
        }
        let z_new = apply_pinv(&q);
        let gamma_new_sq = dot(&z_new, &q);
        let gamma_new = gamma_new_sq.max(0.0).sqrt();

        // apply the stored rotations to the new column [gamma, delta, gamma_new]
        let eps = s_prev2 * gamma;
        let delta_bar = c_prev2 * gamma;
        let zeta_bar = c_prev * delta_bar + s_prev * delta;
        let rho_bar = c_prev * delta - s_prev * delta_bar;
        let rho = (rho_bar * rho_bar + gamma_new * gamma_new).sqrt();
        if rho == 0.0 {
            // breakdown: residual already projected out
            converged = true;
            break;
        }
        let c = rho_bar / rho;
        let s = gamma_new / rho;

        // search direction update
        let mut w = z.clone();
        if zeta_bar != 0.0 {
            axpy(-zeta_bar, &w_prev, &mut w);
        }
        if eps != 0.0 {
            axpy(-eps, &w_prev2, &mut w);
        }
        for e in w.iter_mut() {
            *e /= rho;
        }
        axpy(c * eta, &w, &mut x);
        eta = -s * eta;
        history.push(eta.abs());
        converged = eta.abs() <= tol;

        if gamma_new <= f64::EPSILON * delta.abs().max(1.0) {
            // invariant subspace reached: the solve is exact
            converged = true;
            break;
        }

        v_prev = std::mem::replace(&mut v, q);
        for e in v.iter_mut() {
            *e /= gamma_new;
        }
        z = z_new;
        for e in z.iter_mut() {
            *e /= gamma_new;
        }
        gamma = gamma_new;
        w_prev2 = std::mem::replace(&mut w_prev, w);
        (c_prev2, s_prev2) = (c_prev, s_prev);
        (c_prev, s_prev) = (c, s);
    }

    let report = SolveReport {
        iterations,
        converged,
        residual_history: history,
        wall_time: start.elapsed().as_secs_f64(),
    };
    (x, report)
}

/// Preconditioned conjugate gradients for symmetric positive definite
/// systems. Fails with a descriptive error if negative curvature shows
/// the operator is not positive definite.
pub fn cg(
    apply_a: &dyn Fn(&[f64]) -> Vec<f64>,
    apply_pinv: &dyn Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    rtol: f64,
    max_iterations: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    let start = Instant::now();
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = apply_pinv(&r);
    let mut rho = dot(&r, &z);
    if rho < 0.0 {
        return Err(Error::Factorization(
            "cg: preconditioner is not positive definite".into(),
        ));
    }
    let r0 = rho.sqrt();
    let mut history = vec![r0];
    if r0 == 0.0 {
        let report = SolveReport {
            iterations: 0,
            converged: true,
            residual_history: history,
            wall_time: start.elapsed().as_secs_f64(),
        };
        return Ok((x, report));
    }
    let tol = rtol * r0;
    let mut p = z.clone();
    let mut iterations = 0;
    let mut converged = false;

    while !converged && iterations < max_iterations {
        iterations += 1;
        let q = apply_a(&p);
        let pq = dot(&p, &q);
        if pq <= 0.0 {
            return Err(Error::Factorization(
                "cg: negative curvature encountered, operator is not positive definite".into(),
            ));
        }
        let alpha = rho / pq;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        z = apply_pinv(&r);
        let rho_new = dot(&r, &z);
        let res = rho_new.max(0.0).sqrt();
        history.push(res);
        converged = res <= tol;
        let beta = rho_new / rho;
        rho = rho_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }

    let report = SolveReport {
        iterations,
        converged,
        residual_history: history,
        wall_time: start.elapsed().as_secs_f64(),
    };
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::sparse::{norm2, CooBuilder};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn identity(x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }

    #[test]
    fn minres_two_by_two_converges_in_two_steps() {
        let a = [[2.0, 1.0], [1.0, -3.0]];
        let apply = |x: &[f64]| {
            vec![
                a[0][0] * x[0] + a[0][1] * x[1],
                a[1][0] * x[0] + a[1][1] * x[1],
            ]
        };
        let b = [1.0, 2.0];
        let (x, report) = minres(&apply, &identity, &b, 1e-12, 10);
        assert!(report.iterations <= 2);
        assert!(report.converged);
        let r = apply(&x);
        assert!((r[0] - b[0]).abs() < 1e-10);
        assert!((r[1] - b[1]).abs() < 1e-10);
    }

    #[test]
    fn minres_zero_rhs_returns_zero_without_iterating() {
        let apply = |x: &[f64]| x.to_vec();
        let (x, report) = minres(&apply, &identity, &[0.0; 5], 1e-10, 50);
        assert_eq!(report.iterations, 0);
        assert!(report.converged);
        assert!(x.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn minres_handles_indefinite_diagonal() {
        let d = [4.0, -3.0, 2.0, -1.0, 5.0];
        let apply = |x: &[f64]| x.iter().zip(d.iter()).map(|(v, s)| v * s).collect();
        let b = [1.0, 1.0, 1.0, 1.0, 1.0];
        let (x, report) = minres(&apply, &identity, &b, 1e-12, 20);
        assert!(report.converged);
        for i in 0..5 {
            assert!((x[i] - 1.0 / d[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn minres_residual_history_is_monotone() {
        let mut rng = StdRng::seed_from_u64(11);
        let n = 40;
        let mut coo = CooBuilder::new(n, n);
        for i in 0..n {
            let sign = if i % 3 == 0 { -1.0 } else { 1.0 };
            coo.push(i, i, sign * (1.0 + rng.gen::<f64>()));
            if i + 1 < n {
                let v = 0.3 * (rng.gen::<f64>() - 0.5);
                coo.push(i, i + 1, v);
                coo.push(i + 1, i, v);
            }
        }
        let m = coo.build();
        let apply = |x: &[f64]| m.matvec(x);
        let b: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let (_, report) = minres(&apply, &identity, &b, 1e-10, 200);
        assert!(report.converged);
        for w in report.residual_history.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn cg_matches_textbook_oracle() {
        // reference implementation straight out of a numerical linear
        // algebra course, kept deliberately naive
        let mut rng = StdRng::seed_from_u64(3);
        let n = 30;
        let mut coo = CooBuilder::new(n, n);
        for i in 0..n {
            coo.push(i, i, 3.0 + rng.gen::<f64>());
            if i + 1 < n {
                let v = 0.5 * rng.gen::<f64>();
                coo.push(i, i + 1, v);
                coo.push(i + 1, i, v);
            }
        }
        let m = coo.build();
        let b: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();

        let mut x_ref = vec![0.0; n];
        let mut r = b.clone();
        let mut p = r.clone();
        let mut rr = dot(&r, &r);
        let mut oracle_iters = 0;
        while rr.sqrt() > 1e-10 * norm2(&b) && oracle_iters < 200 {
            oracle_iters += 1;
            let q = m.matvec(&p);
            let alpha = rr / dot(&p, &q);
            axpy(alpha, &p, &mut x_ref);
            axpy(-alpha, &q, &mut r);
            let rr_new = dot(&r, &r);
            let beta = rr_new / rr;
            rr = rr_new;
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
            }
        }

        let apply = |x: &[f64]| m.matvec(x);
        let (x, report) = cg(&apply, &identity, &b, 1e-10, 200).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, oracle_iters);
        for i in 0..n {
            assert!((x[i] - x_ref[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn cg_zero_rhs_short_circuits() {
        let apply = |x: &[f64]| x.to_vec();
        let (x, report) = cg(&apply, &identity, &[0.0; 4], 1e-10, 10).unwrap();
        assert_eq!(report.iterations, 0);
        assert!(x.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn cg_rejects_indefinite_operator() {
        let d = [1.0, -2.0, 3.0];
        let apply = |x: &[f64]| x.iter().zip(d.iter()).map(|(v, s)| v * s).collect();
        let b = [0.0, 1.0, 0.0];
        assert!(cg(&apply, &identity, &b, 1e-10, 10).is_err());
    }
}
