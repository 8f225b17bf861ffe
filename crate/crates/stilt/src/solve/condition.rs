//! Spectral condition numbers of the preconditioned saddle operators.
//!
//! The quantity of interest is κ = max|λ| / min|λ| over the eigenvalues
//! of P⁻¹K, with K the (indefinite) saddle matrix and P the block
//! preconditioner. Small systems are handled by a dense congruence
//! transform and a full symmetric eigendecomposition; larger ones by two
//! Lanczos iterations in the P inner product, one on P⁻¹K for the
//! largest magnitude and one on K⁻¹P for the reciprocal of the smallest.

use faer::Mat;

use super::direct::SaddleFactorization;
use super::precond::BlockDiagPrecond;
use super::ReducedSystem;
use crate::error::{Error, Result};
use crate::fem::sparse::{axpy, dot};

/// Two-sided eigenvalue bounds of a preconditioned operator.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConditionEstimate {
    /// Smallest eigenvalue magnitude.
    pub min_abs: f64,
    /// Largest eigenvalue magnitude.
    pub max_abs: f64,
    /// Spectral condition number max_abs / min_abs.
    pub kappa: f64,
    /// Whether the dense path produced the estimate.
    pub dense: bool,
}

/// Eigenvalue range of the pencil (K, M) with M symmetric positive
/// definite: returns the smallest and largest eigenvalues.
pub fn generalized_eigen_bounds(k: &Mat<f64>, m: &Mat<f64>) -> Result<(f64, f64)> {
    let n = k.nrows();
    if n == 0 || k.ncols() != n || m.nrows() != n || m.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "generalized eigenvalue bounds need square matrices of equal size, got {}x{} and {}x{}",
            k.nrows(),
            k.ncols(),
            m.nrows(),
            m.ncols()
        )));
    }
    let llt = m
        .llt(faer::Side::Lower)
        .map_err(|_| Error::Factorization("norm matrix is not positive definite".into()))?;
    let l = llt.L().to_owned();
    let mut c = k.to_owned();
    faer::linalg::triangular_solve::solve_lower_triangular_in_place(
        l.as_ref(),
        c.as_mut(),
        faer::Par::Seq,
    );
    let mut ct = c.transpose().to_owned();
    faer::linalg::triangular_solve::solve_lower_triangular_in_place(
        l.as_ref(),
        ct.as_mut(),
        faer::Par::Seq,
    );
    let evd = ct
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::Factorization("eigendecomposition did not converge".into()))?;
    Ok((evd.S()[0], evd.S()[n - 1]))
}

/// Lanczos iteration for an operator that is self-adjoint in the inner
/// product induced by `apply_p`. Returns the extreme Ritz values.
fn lanczos_extremes(
    apply_op: &dyn Fn(&[f64]) -> Vec<f64>,
    apply_p: &dyn Fn(&[f64]) -> Vec<f64>,
    n: usize,
    steps: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let mut rng = StdRng::seed_from_u64(seed);
    let mut u: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    let pu = apply_p(&u);
    let nrm = dot(&u, &pu).max(0.0).sqrt();
    if nrm == 0.0 {
        return Err(Error::Factorization(
            "lanczos start vector has zero norm".into(),
        ));
    }
    for e in u.iter_mut() {
        *e /= nrm;
    }
    let pu: Vec<f64> = pu.iter().map(|v| v / nrm).collect();

    let mut basis = vec![u];
    let mut p_basis = vec![pu];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    for j in 0..steps.min(n) {
        let mut t = apply_op(&basis[j]);
        let alpha = dot(&t, &p_basis[j]);
        alphas.push(alpha);
        axpy(-alpha, &basis[j], &mut t);
        if j > 0 {
            axpy(-betas[j - 1], &basis[j - 1], &mut t);
        }
        // full reorthogonalization in the P inner product
        for i in 0..=j {
            let c = dot(&t, &p_basis[i]);
            if c != 0.0 {
                axpy(-c, &basis[i], &mut t);
            }
        }
        let w = apply_p(&t);
        let beta = dot(&t, &w).max(0.0).sqrt();
        if !beta.is_finite() {
            return Err(Error::Factorization(
                "lanczos iteration diverged; operator may be singular".into(),
            ));
        }
        if beta < 1e-12 * alpha.abs().max(1.0) {
            break;
        }
        betas.push(beta);
        basis.push(t.iter().map(|v| v / beta).collect());
        p_basis.push(w.iter().map(|v| v / beta).collect());
    }

    let m = alphas.len();
    let mut tri = Mat::<f64>::zeros(m, m);
    for (i, &a) in alphas.iter().enumerate() {
        tri[(i, i)] = a;
    }
    for i in 0..m.saturating_sub(1).min(betas.len()) {
        tri[(i, i + 1)] = betas[i];
        tri[(i + 1, i)] = betas[i];
    }
    let evd = tri
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::Factorization("tridiagonal eigensolve failed".into()))?;
    Ok((evd.S()[0], evd.S()[m - 1]))
}

/// Estimates the condition number of the preconditioned saddle operator.
///
/// Systems with at most `dense_limit` free DOFs go through the exact
/// dense path; larger ones use two Lanczos runs (`steps` iterations
/// each) that share the factorization `fact` for the inner solves.
pub fn estimate_condition(
    red: &ReducedSystem,
    fact: &SaddleFactorization,
    precond: &BlockDiagPrecond,
    dense_limit: usize,
    steps: usize,
) -> Result<ConditionEstimate> {
    let n = red.dim();
    if precond.dim() != n {
        return Err(Error::ShapeMismatch(format!(
            "preconditioner dimension {} does not match system dimension {}",
            precond.dim(),
            n
        )));
    }
    if n <= dense_limit {
        let mut k = Mat::<f64>::zeros(n, n);
        let np = red.n_p();
        for (i, j, v) in red.a.iter() {
            k[(i, j)] += v;
        }
        for (i, j, v) in red.b.iter() {
            k[(np + i, j)] += v;
            k[(j, np + i)] += v;
        }
        for (i, j, v) in red.s.iter() {
            k[(np + i, np + j)] -= v;
        }
        let mut p = Mat::<f64>::zeros(n, n);
        for (i, j, v) in precond.primal_matrix().iter() {
            p[(i, j)] += v;
        }
        let pm = precond.multiplier_norm_dense();
        for i in 0..red.n_m() {
            for j in 0..red.n_m() {
                p[(np + i, np + j)] = pm[(i, j)];
            }
        }
        let (min_abs, max_abs) = dense_magnitude_bounds(&k, &p)?;
        return Ok(ConditionEstimate {
            min_abs,
            max_abs,
            kappa: max_abs / min_abs,
            dense: true,
        });
    }

    // Lanczos on P⁻¹K for the largest magnitude
    let apply_outer = |u: &[f64]| {
        let mut ku = vec![0.0; n];
        red.apply(u, &mut ku);
        precond.apply_inverse(&ku)
    };
    let apply_p = |u: &[f64]| precond.apply(u);
    let (lo, hi) = lanczos_extremes(&apply_outer, &apply_p, n, steps, 2203)?;
    let max_abs = lo.abs().max(hi.abs());

    // Lanczos on K⁻¹P for the reciprocal of the smallest magnitude
    let apply_inner = |u: &[f64]| {
        let pu = precond.apply(u);
        fact.solve(red, &pu)
    };
    let (ilo, ihi) = lanczos_extremes(&apply_inner, &apply_p, n, steps, 811)?;
    let inv_min = ilo.abs().max(ihi.abs());
    if inv_min == 0.0 {
        return Err(Error::Factorization(
            "condition estimate failed: inverse operator has zero extreme eigenvalue".into(),
        ));
    }
    let min_abs = 1.0 / inv_min;
    Ok(ConditionEstimate {
        min_abs,
        max_abs,
        kappa: max_abs / min_abs,
        dense: false,
    })
}

/// Smallest and largest eigenvalue magnitudes of the pencil (K, P) with
/// P symmetric positive definite, from one full eigendecomposition.
fn dense_magnitude_bounds(k: &Mat<f64>, p: &Mat<f64>) -> Result<(f64, f64)> {
    let n = k.nrows();
    let llt = p
        .llt(faer::Side::Lower)
        .map_err(|_| Error::Factorization("preconditioner is not positive definite".into()))?;
    let l = llt.L().to_owned();
    let mut c = k.to_owned();
    faer::linalg::triangular_solve::solve_lower_triangular_in_place(
        l.as_ref(),
        c.as_mut(),
        faer::Par::Seq,
    );
    let mut ct = c.transpose().to_owned();
    faer::linalg::triangular_solve::solve_lower_triangular_in_place(
        l.as_ref(),
        ct.as_mut(),
        faer::Par::Seq,
    );
    let evd = ct
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::Factorization("eigendecomposition did not converge".into()))?;
    let mut min_abs = f64::INFINITY;
    let mut max_abs = 0.0f64;
    for i in 0..n {
        let a = evd.S()[i].abs();
        min_abs = min_abs.min(a);
        max_abs = max_abs.max(a);
    }
    Ok((min_abs, max_abs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::BenchmarkData;
    use crate::saddle::{assemble, BilinearForm, Discretization, FormulationKind};

    #[test]
    fn generalized_bounds_identity_pencil() {
        let k = Mat::<f64>::from_fn(6, 6, |i, j| if i == j { 1.0 } else { 0.0 });
        let m = k.to_owned();
        let (lo, hi) = generalized_eigen_bounds(&k, &m).unwrap();
        assert!((lo - 1.0).abs() < 1e-12);
        assert!((hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generalized_bounds_diagonal_pencil() {
        let mut k = Mat::<f64>::zeros(3, 3);
        k[(0, 0)] = 2.0;
        k[(1, 1)] = 6.0;
        k[(2, 2)] = -1.0;
        let mut m = Mat::<f64>::zeros(3, 3);
        m[(0, 0)] = 1.0;
        m[(1, 1)] = 2.0;
        m[(2, 2)] = 0.5;
        let (lo, hi) = generalized_eigen_bounds(&k, &m).unwrap();
        assert!((lo + 2.0).abs() < 1e-12);
        assert!((hi - 3.0).abs() < 1e-12);
    }

    #[test]
    fn dense_and_lanczos_estimates_agree() {
        let data = BenchmarkData::new();
        let disc = Discretization::new(FormulationKind::Coupled1D, 2).unwrap();
        let sys = assemble(&disc, BilinearForm::FullH1, &data.problem()).unwrap();
        let red = sys.reduce();
        let fact = SaddleFactorization::new(&sys, &red).unwrap();
        let p = BlockDiagPrecond::build(&disc, &sys).unwrap();
        let dense = estimate_condition(&red, &fact, &p, 10_000, 0).unwrap();
        assert!(dense.dense);
        let iter = estimate_condition(&red, &fact, &p, 0, 200).unwrap();
        assert!(!iter.dense);
        let rel = (dense.kappa - iter.kappa).abs() / dense.kappa;
        assert!(
            rel < 0.05,
            "dense {} vs lanczos {}",
            dense.kappa,
            iter.kappa
        );
    }

    #[test]
    fn perfect_preconditioner_gives_unit_condition_number() {
        // P equal to K itself (SPD case): all pencil eigenvalues are one
        let data = BenchmarkData::new();
        let disc = Discretization::new(FormulationKind::Coupled1D, 1).unwrap();
        let sys = assemble(&disc, BilinearForm::FullH1, &data.problem()).unwrap();
        let red = sys.reduce();
        let mut k = Mat::<f64>::zeros(red.n_p(), red.n_p());
        for (i, j, v) in red.a.iter() {
            k[(i, j)] += v;
        }
        let (lo, hi) = generalized_eigen_bounds(&k, &k.to_owned()).unwrap();
        assert!((lo - 1.0).abs() < 1e-9);
        assert!((hi - 1.0).abs() < 1e-9);
    }
}
