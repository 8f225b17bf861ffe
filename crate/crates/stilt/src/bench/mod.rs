//! Benchmark problem, error measurement and the study drivers.
//!
//! The manufactured solution u = sin(2πx)sin(2πy), u_⊙ = sin(πz) solves
//! the coupled problem on the unit cube with a vertical line inclusion
//! at (1/2, 1/2) and square cross-section of half-width 1/4; both exact
//! multipliers vanish, so every multiplier norm of the discrete solution
//! is itself an error measure.

pub mod tables;

pub use tables::{
    sci2, ConvRow, ConvergenceTable, CostRow, CostTable, DofRow, DofTable, OutFormat,
};

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fem::assembly::{load_3d, mass_1d, mass_surface, stiffness_3d, stiffness_surface, Weight};
use crate::fem::dirichlet::DirichletBc;
use crate::fem::interp::{error_p2_1d, error_p2_3d, P3Space1D};
use crate::fractional::{build_spectral, hminus_half_error_1d, EIGEN_GUARD};
use crate::geometry::{Mesh1D, Mesh3D};
use crate::saddle::{
    assemble, assemble_with_options, BilinearForm, Discretization, FormulationKind, ProblemData,
};
use crate::solve::{
    cg, estimate_condition, generalized_eigen_bounds, minres, multiplier_schur_dense,
    BlockDiagPrecond, SaddleFactorization, SparseChol,
};

/// The benchmark data set: volume source, line source, coupling data and
/// the exact solution they manufacture.
pub struct BenchmarkData {
    f: Box<dyn Fn([f64; 3]) -> f64 + Send + Sync>,
    g_bar: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    q_gamma: Box<dyn Fn([f64; 3]) -> f64 + Send + Sync>,
    q_lambda: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    u_b: Box<dyn Fn([f64; 3]) -> f64 + Send + Sync>,
}

impl BenchmarkData {
    pub fn new() -> Self {
        BenchmarkData {
            f: Box::new(|p| 8.0 * PI * PI * (2.0 * PI * p[0]).sin() * (2.0 * PI * p[1]).sin()),
            g_bar: Box::new(|z| PI * PI * (PI * z).sin()),
            q_gamma: Box::new(|p| Self::exact_u(p) - (PI * p[2]).sin()),
            q_lambda: Box::new(|z| -(PI * z).sin()),
            u_b: Box::new(Self::exact_u),
        }
    }

    /// Problem data in the form the assembly expects. The endpoint values
    /// of the 1D unknown are sin(0) = sin(π) = 0.
    pub fn problem(&self) -> ProblemData<'_> {
        ProblemData {
            f: self.f.as_ref(),
            g_bar: self.g_bar.as_ref(),
            q_gamma: self.q_gamma.as_ref(),
            q_lambda: self.q_lambda.as_ref(),
            u_b: self.u_b.as_ref(),
            w_ends: (0.0, 0.0),
        }
    }

    /// Exact 3D solution sin(2πx)sin(2πy).
    pub fn exact_u(p: [f64; 3]) -> f64 {
        (2.0 * PI * p[0]).sin() * (2.0 * PI * p[1]).sin()
    }

    /// Exact 1D solution sin(πz).
    pub fn exact_u_line(z: f64) -> f64 {
        (PI * z).sin()
    }
}

impl Default for BenchmarkData {
    fn default() -> Self {
        Self::new()
    }
}

/// Error norms of one discrete solution.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorRecord {
    pub level: u32,
    pub h_inv: usize,
    pub h: f64,
    /// H¹(Ω) error of the 3D field.
    pub u_h1: f64,
    /// H¹(Λ) error of the 1D field (unweighted norm).
    pub w_h1: f64,
    /// H^{-1/2} norm of the multiplier error, on Λ or Γ; absent for the
    /// cut formulation.
    pub multiplier_dual: Option<f64>,
    /// L² norm of the multiplier error (Λ, Γ, or the cut set).
    pub multiplier_l2: f64,
}

impl ErrorRecord {
    /// Errors in table-column order for the formulation.
    pub fn columns(&self) -> Vec<f64> {
        match self.multiplier_dual {
            Some(d) => vec![self.u_h1, self.w_h1, d, self.multiplier_l2],
            None => vec![self.u_h1, self.w_h1, self.multiplier_l2],
        }
    }
}

/// Table column labels for a formulation.
pub fn error_columns(kind: FormulationKind) -> Vec<String> {
    let mk = |v: &[&str]| v.iter().map(|s| s.to_string()).collect();
    match kind {
        FormulationKind::Coupled2D => mk(&["H1(Omega)", "H1(Lambda)", "H-1/2(Gamma)", "L2(Gamma)"]),
        FormulationKind::Coupled1D => {
            mk(&["H1(Omega)", "H1(Lambda)", "H-1/2(Lambda)", "L2(Lambda)"])
        }
        FormulationKind::Stabilized1D => mk(&["H1(Omega)", "H1(Lambda)", "L2(Gh)"]),
    }
}

fn eval_p1_line(line: &Mesh1D, v: &[f64], z: f64) -> f64 {
    let (e, t) = line
        .locate(z)
        .expect("evaluation point must lie on the line");
    v[e] * (1.0 - t) + v[e + 1] * t
}

/// H^{-1/2}(Λ) norm of a line multiplier error, interpolated into cubics
/// on the same mesh so the piecewise-linear error is captured exactly.
/// The norm is the -1/2 power of the spectral Dirichlet Laplacian, i.e.
/// the pencil (K, M) on the zero-trace cubic space.
fn lambda_dual_norm(line: &Mesh1D, error: &dyn Fn(f64) -> f64) -> Result<f64> {
    let space = P3Space1D::new(line);
    let m = space.mass();
    let a = space.stiffness();
    let dim = space.dim();
    let mut constrained = vec![false; dim];
    for i in 0..dim {
        let z = space.node_z(i);
        if z < 1e-12 || z > 1.0 - 1e-12 {
            constrained[i] = true;
        }
    }
    let op = build_spectral(&a, &m, Some(&constrained), EIGEN_GUARD)?;
    Ok(hminus_half_error_1d(&space, &op, error))
}

/// Error norms of a full-length solution vector against the benchmark
/// exact solution.
pub fn compute_errors(disc: &Discretization, solution: &[f64]) -> Result<ErrorRecord> {
    compute_errors_against(
        disc,
        solution,
        &BenchmarkData::exact_u,
        &BenchmarkData::exact_u_line,
    )
}

/// Error norms against caller-provided exact fields. The multiplier is
/// always measured against zero, matching the benchmark.
pub fn compute_errors_against(
    disc: &Discretization,
    solution: &[f64],
    exact_u: &dyn Fn([f64; 3]) -> f64,
    exact_w: &dyn Fn(f64) -> f64,
) -> Result<ErrorRecord> {
    let n3 = disc.n_3d();
    let n1 = disc.n_1d();
    let nmu = disc.n_multiplier();
    if solution.len() != n3 + n1 + nmu {
        return Err(Error::ShapeMismatch(format!(
            "solution length {} does not match {} + {} + {}",
            solution.len(),
            n3,
            n1,
            nmu
        )));
    }
    let u = &solution[..n3];
    let w = &solution[n3..n3 + n1];
    let lam = &solution[n3 + n1..];

    let u_h1 = error_p2_3d(&disc.mesh, u, exact_u).h1();
    let w_h1 = error_p2_1d(&disc.line, w, exact_w).h1();

    let (multiplier_dual, multiplier_l2) = match disc.kind {
        FormulationKind::Coupled1D => {
            let line = &disc.line;
            let lam_vec = lam.to_vec();
            let err = move |z: f64| eval_p1_line(line, &lam_vec, z);
            let dual = lambda_dual_norm(line, &err)?;
            let m = mass_1d(line, &Weight::constant(1.0));
            let ml = m.matvec(lam);
            let l2 = crate::fem::sparse::dot(lam, &ml).max(0.0).sqrt();
            (Some(dual), l2)
        }
        FormulationKind::Coupled2D => {
            let surf = disc.surface.as_ref().ok_or_else(|| {
                Error::InvalidParameter("trace coupling needs a surface mesh".into())
            })?;
            let m = mass_surface(surf, 1.0);
            // spectral Dirichlet Laplacian pencil, matching the line norm
            let a = stiffness_surface(surf, 1.0);
            let hz = disc.mesh.spacings()[2];
            let height = disc.mesh.lengths()[2];
            let mut constrained = vec![false; surf.n_vertices()];
            for (i, c) in constrained.iter_mut().enumerate() {
                let z = surf.z_of(i);
                if z < 0.5 * hz || z > height - 0.5 * hz {
                    *c = true;
                }
            }
            let op = build_spectral(&a, &m, Some(&constrained), EIGEN_GUARD)?;
            let free = op.restrict(lam);
            let dual = op.fractional_norm(-0.5, &free);
            let ml = m.matvec(lam);
            let l2 = crate::fem::sparse::dot(lam, &ml).max(0.0).sqrt();
            (Some(dual), l2)
        }
        FormulationKind::Stabilized1D => {
            let [hx, hy, hz] = disc.mesh.spacings();
            let volume = hx * hy * hz / 6.0;
            let l2 = lam.iter().map(|v| volume * v * v).sum::<f64>().sqrt();
            (None, l2)
        }
    };

    Ok(ErrorRecord {
        level: disc.level,
        h_inv: disc.inv_h(),
        h: 1.0 / disc.inv_h() as f64,
        u_h1,
        w_h1,
        multiplier_dual,
        multiplier_l2,
    })
}

fn level_h_inv(kind: FormulationKind, level: u32) -> usize {
    let base = 4usize << (level - 1);
    match kind {
        FormulationKind::Stabilized1D => base + 1,
        _ => base,
    }
}

/// Assembles, solves directly and measures one level of the convergence
/// study.
pub fn convergence_level(
    kind: FormulationKind,
    level: u32,
    data: &BenchmarkData,
) -> Result<ErrorRecord> {
    let disc = Discretization::new(kind, level)?;
    let sys = assemble(&disc, BilinearForm::StiffnessOnly, &data.problem())?;
    let x = crate::solve::solve_direct(&sys)?;
    compute_errors(&disc, &x)
}

/// Runs the convergence study over a level range with the direct solver.
/// Per-level failures are recorded in the table and the study continues;
/// the second return value reports whether any level failed.
pub fn run_convergence(
    kind: FormulationKind,
    levels: RangeInclusive<u32>,
    data: &BenchmarkData,
    threads: usize,
) -> (ConvergenceTable, bool) {
    let levels: Vec<u32> = levels.collect();
    let mut results: Vec<Option<Result<ErrorRecord>>> = Vec::new();
    results.resize_with(levels.len(), || None);
    let batch = threads.max(1);
    let mut idx = 0;
    while idx < levels.len() {
        let end = (idx + batch).min(levels.len());
        if end - idx == 1 {
            results[idx] = Some(convergence_level(kind, levels[idx], data));
        } else {
            let slots: Vec<Result<ErrorRecord>> = std::thread::scope(|scope| {
                let handles: Vec<_> = levels[idx..end]
                    .iter()
                    .map(|&lvl| scope.spawn(move || convergence_level(kind, lvl, data)))
                    .collect();
                handles.into_iter().map(|h| h.join().unwrap()).collect()
            });
            for (k, r) in slots.into_iter().enumerate() {
                results[idx + k] = Some(r);
            }
        }
        idx = end;
    }

    let mut table = ConvergenceTable {
        formulation: kind.name().to_string(),
        columns: error_columns(kind),
        rows: Vec::new(),
    };
    let mut any_failed = false;
    for (i, res) in results.into_iter().enumerate() {
        let level = levels[i];
        match res.expect("every level was scheduled") {
            Ok(rec) => table.rows.push(ConvRow {
                level,
                h_inv: rec.h_inv,
                h: rec.h,
                errors: rec.columns(),
                rates: Vec::new(),
                failed: None,
            }),
            Err(e) => {
                any_failed = true;
                let h_inv = level_h_inv(kind, level);
                table.rows.push(ConvRow {
                    level,
                    h_inv,
                    h: 1.0 / h_inv as f64,
                    errors: Vec::new(),
                    rates: Vec::new(),
                    failed: Some(e.to_string()),
                });
            }
        }
    }
    table.compute_rates();
    (table, any_failed)
}

/// Knobs of the cost study.
#[derive(Debug, Clone)]
pub struct CostOptions {
    /// Relative residual target of the Krylov solves.
    pub rtol: f64,
    pub max_iterations: usize,
    /// Condition numbers are only estimated up to this level; beyond it
    /// the table shows "--".
    pub kappa_max_level: u32,
    /// Free-DOF count below which the condition number uses the dense
    /// eigensolver instead of Lanczos.
    pub dense_limit: usize,
    /// Lanczos steps per extreme-eigenvalue run.
    pub lanczos_steps: usize,
    /// Runs MinRes without a preconditioner; condition numbers are then
    /// skipped since they are defined against the block Riesz map.
    pub identity_precond: bool,
}

impl Default for CostOptions {
    fn default() -> Self {
        CostOptions {
            rtol: 1e-8,
            max_iterations: 5000,
            kappa_max_level: 4,
            dense_limit: 500,
            lanczos_steps: 110,
            identity_precond: false,
        }
    }
}

/// One cost-study cell: preconditioned MinRes on the full-H¹ operator
/// plus the condition number of the preconditioned system.
pub fn cost_level(
    kind: FormulationKind,
    level: u32,
    data: &BenchmarkData,
    opts: &CostOptions,
) -> Result<CostRow> {
    let disc = Discretization::new(kind, level)?;
    let sys = assemble(&disc, BilinearForm::StiffnessOnly, &data.problem())?;
    let red = sys.reduce();
    let precond = if opts.identity_precond {
        None
    } else {
        Some(BlockDiagPrecond::build(&disc, &sys)?)
    };
    let apply_k = |x: &[f64]| {
        let mut y = vec![0.0; red.dim()];
        red.apply(x, &mut y);
        y
    };
    let apply_pinv: Box<dyn Fn(&[f64]) -> Vec<f64> + '_> = match &precond {
        Some(p) => Box::new(move |r: &[f64]| p.apply_inverse(r)),
        None => Box::new(|r: &[f64]| r.to_vec()),
    };
    let (_, report) = minres(
        &apply_k,
        &apply_pinv,
        &red.rhs,
        opts.rtol,
        opts.max_iterations,
    );
    let kappa = match &precond {
        Some(p) if level <= opts.kappa_max_level => {
            let fact = SaddleFactorization::new(&sys, &red)?;
            match estimate_condition(&red, &fact, p, opts.dense_limit, opts.lanczos_steps) {
                Ok(est) => Some(est.kappa),
                Err(_) => None,
            }
        }
        _ => None,
    };
    Ok(CostRow {
        level,
        dofs: sys.dim(),
        iterations: Some(report.iterations),
        wall_time: Some(report.wall_time),
        kappa,
        failed: if report.converged {
            None
        } else {
            Some("minres did not reach the residual target".to_string())
        },
    })
}

/// The uncoupled Poisson reference: the same volume problem with its
/// exact H¹ Riesz preconditioner, solved by CG. The preconditioner
/// equals the operator, so the condition number is one by construction.
pub fn poisson_reference(level: u32, data: &BenchmarkData) -> Result<CostRow> {
    let n = 4usize << (level - 1);
    let mesh = Mesh3D::uniform_box([1.0, 1.0, 1.0], [n, n, n])?;
    let k = stiffness_3d(&mesh, 1.0);
    let pd = data.problem();
    let mut rhs = load_3d(&mesh, 1.0, |p| (pd.f)(p));
    let bc = DirichletBc::boundary_3d(&mesh, |p| (pd.u_b)(p));
    let a = bc.apply_symmetric(&k, &mut rhs);
    let chol = SparseChol::new(&a)?;
    let apply = |x: &[f64]| a.matvec(x);
    let pinv = |r: &[f64]| chol.solve_vec(r);
    let (_, report) = cg(&apply, &pinv, &rhs, 1e-8, 200)?;
    Ok(CostRow {
        level,
        dofs: mesh.n_vertices(),
        iterations: Some(report.iterations),
        wall_time: Some(report.wall_time),
        kappa: Some(1.0),
        failed: if report.converged {
            None
        } else {
            Some("cg did not reach the residual target".to_string())
        },
    })
}

/// Runs the cost study for the requested formulations plus the Poisson
/// reference. Per-cell failures are recorded and the study continues.
pub fn run_cost_study(
    kinds: &[FormulationKind],
    levels: RangeInclusive<u32>,
    data: &BenchmarkData,
    opts: &CostOptions,
) -> (CostTable, bool) {
    let mut table = CostTable::new();
    let mut any_failed = false;
    for &kind in kinds {
        let mut rows = Vec::new();
        for level in levels.clone() {
            match cost_level(kind, level, data, opts) {
                Ok(row) => {
                    any_failed |= row.failed.is_some();
                    rows.push(row);
                }
                Err(e) => {
                    any_failed = true;
                    rows.push(CostRow {
                        level,
                        dofs: 0,
                        iterations: None,
                        wall_time: None,
                        kappa: None,
                        failed: Some(e.to_string()),
                    });
                }
            }
        }
        table.groups.push((kind.name().to_string(), rows));
    }
    let mut rows = Vec::new();
    for level in levels.clone() {
        match poisson_reference(level, data) {
            Ok(row) => {
                any_failed |= row.failed.is_some();
                rows.push(row);
            }
            Err(e) => {
                any_failed = true;
                rows.push(CostRow {
                    level,
                    dofs: 0,
                    iterations: None,
                    wall_time: None,
                    kappa: None,
                    failed: Some(e.to_string()),
                });
            }
        }
    }
    table.groups.push(("poisson".to_string(), rows));
    (table, any_failed)
}

/// Reference space dimensions (3D, 1D, multiplier) of the benchmark
/// discretizations; None where no reference value exists.
pub fn reference_dof_counts(kind: FormulationKind, level: u32) -> Option<[usize; 3]> {
    let volume = [125, 729, 4913, 35937, 274625, 2146689];
    let line = [5, 9, 17, 33, 65, 129];
    if !(1..=6).contains(&level) {
        return None;
    }
    let i = (level - 1) as usize;
    match kind {
        FormulationKind::Coupled2D => {
            let gamma = [40, 144, 544, 2112, 8320];
            if i < 5 {
                Some([volume[i], line[i], gamma[i]])
            } else {
                None
            }
        }
        FormulationKind::Coupled1D => Some([volume[i], line[i], line[i]]),
        FormulationKind::Stabilized1D => {
            let vol = [180, 900, 5508, 38148, 283140, 2180100];
            let lam = [13, 25, 49, 97, 193, 385];
            let cut = [24, 48, 96, 192, 384, 768];
            Some([vol[i], lam[i], cut[i]])
        }
    }
}

/// Builds every discretization in the level range and compares its space
/// dimensions against the reference table.
pub fn run_dof_check(levels: RangeInclusive<u32>) -> Result<DofTable> {
    let mut rows = Vec::new();
    for kind in [
        FormulationKind::Coupled2D,
        FormulationKind::Coupled1D,
        FormulationKind::Stabilized1D,
    ] {
        for level in levels.clone() {
            let disc = Discretization::new(kind, level)?;
            let counted = disc.dof_counts();
            let expected = reference_dof_counts(kind, level);
            let matches = expected.map_or(true, |e| e == counted);
            rows.push(DofRow {
                formulation: kind.name().to_string(),
                level,
                counted,
                expected,
                matches,
            });
        }
    }
    Ok(DofTable { rows })
}

/// Discrete inf-sup constant of a conforming formulation: the square
/// root of the smallest eigenvalue of the multiplier Schur complement
/// against the H^{-1/2} norm matrix.
pub fn inf_sup_constant(kind: FormulationKind, level: u32, data: &BenchmarkData) -> Result<f64> {
    if kind == FormulationKind::Stabilized1D {
        return Err(Error::InvalidParameter(
            "inf-sup constants are computed for the conforming formulations".into(),
        ));
    }
    let disc = Discretization::new(kind, level)?;
    let sys = assemble(&disc, BilinearForm::FullH1, &data.problem())?;
    let red = sys.reduce();
    let s = multiplier_schur_dense(&red, false)?;
    let precond = BlockDiagPrecond::build(&disc, &sys)?;
    let h = precond.multiplier_norm_dense();
    let (lo, _) = generalized_eigen_bounds(&s, &h)?;
    if lo <= 0.0 {
        return Err(Error::Factorization(format!(
            "multiplier Schur complement is not positive definite, smallest eigenvalue {lo}"
        )));
    }
    Ok(lo.sqrt())
}

/// Smallest eigenvalue of the (Euclidean) multiplier Schur complement of
/// the cut formulation, with or without the jump stabilization. Without
/// it the complement is singular, which is the instability the penalty
/// repairs.
pub fn stabilized_schur_smallest(level: u32, data: &BenchmarkData, stabilize: bool) -> Result<f64> {
    let disc = Discretization::new(FormulationKind::Stabilized1D, level)?;
    let sys = assemble_with_options(
        &disc,
        BilinearForm::FullH1,
        &data.problem(),
        stabilize,
    )?;
    let red = sys.reduce();
    let s = multiplier_schur_dense(&red, true)?;
    let evd = s
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::Factorization("eigendecomposition did not converge".into()))?;
    Ok(evd.S()[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn manufactured_solution_satisfies_the_pde() {
        let data = BenchmarkData::new();
        let pd = data.problem();
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..1000 {
            let p = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
            // -Δ(sin 2πx sin 2πy) = 8π² sin 2πx sin 2πy
            let lap = 8.0 * PI * PI * BenchmarkData::exact_u(p);
            assert!(((pd.f)(p) - lap).abs() <= 1e-10 * lap.abs().max(1.0));
            let z = p[2];
            // -(sin πz)'' = π² sin πz
            let lap1 = PI * PI * BenchmarkData::exact_u_line(z);
            assert!(((pd.g_bar)(z) - lap1).abs() <= 1e-10 * lap1.abs().max(1.0));
        }
    }

    #[test]
    fn coupling_data_is_consistent_on_the_interface() {
        let data = BenchmarkData::new();
        let pd = data.problem();
        let mut rng = StdRng::seed_from_u64(43);
        for _ in 0..1000 {
            // point on a random side of the square ring at height z
            let z = rng.gen::<f64>();
            let t = rng.gen::<f64>();
            let side = rng.gen_range(0..4);
            let (x, y) = match side {
                0 => (0.25 + 0.5 * t, 0.25),
                1 => (0.75, 0.25 + 0.5 * t),
                2 => (0.75 - 0.5 * t, 0.75),
                _ => (0.25, 0.75 - 0.5 * t),
            };
            let p = [x, y, z];
            // q₁ = trace of u minus the extension of u_⊙
            let gap = BenchmarkData::exact_u(p) - BenchmarkData::exact_u_line(z);
            assert!(((pd.q_gamma)(p) - gap).abs() <= 1e-10);
            // normal flux of u through the lateral surface vanishes
            let flux = match side {
                0 => -2.0 * PI * (2.0 * PI * y).cos() * (2.0 * PI * x).sin(),
                1 => 2.0 * PI * (2.0 * PI * x).cos() * (2.0 * PI * y).sin(),
                2 => 2.0 * PI * (2.0 * PI * y).cos() * (2.0 * PI * x).sin(),
                _ => -2.0 * PI * (2.0 * PI * x).cos() * (2.0 * PI * y).sin(),
            };
            assert!(flux.abs() <= 1e-10);
        }
    }

    #[test]
    fn ring_average_of_exact_u_vanishes() {
        // q̄₂ = (ring average of u) − u_⊙ = −sin(πz) requires the average
        // to vanish; check with a fine midpoint rule on each side
        let data = BenchmarkData::new();
        let pd = data.problem();
        let mut rng = StdRng::seed_from_u64(44);
        for _ in 0..100 {
            let z = rng.gen::<f64>();
            let nq = 400;
            let mut acc = 0.0;
            for i in 0..nq {
                let t = (i as f64 + 0.5) / nq as f64;
                acc += BenchmarkData::exact_u([0.25 + 0.5 * t, 0.25, z]);
                acc += BenchmarkData::exact_u([0.75, 0.25 + 0.5 * t, z]);
                acc += BenchmarkData::exact_u([0.75 - 0.5 * t, 0.75, z]);
                acc += BenchmarkData::exact_u([0.25, 0.75 - 0.5 * t, z]);
            }
            let avg = acc / (4 * nq) as f64;
            assert!(avg.abs() <= 1e-12);
            let expected = avg - BenchmarkData::exact_u_line(z);
            assert!(((pd.q_lambda)(z) - expected).abs() <= 1e-10);
        }
    }

    #[test]
    fn representable_solution_gives_zero_errors() {
        // an affine exact field lies in the P1 spaces, so the measured
        // errors collapse to roundoff
        let lin_u = |p: [f64; 3]| 0.5 + 0.25 * p[0] - 0.125 * p[1] + 0.3 * p[2];
        let lin_w = |z: f64| 0.1 + 0.2 * z;
        for kind in [
            FormulationKind::Coupled1D,
            FormulationKind::Coupled2D,
            FormulationKind::Stabilized1D,
        ] {
            let disc = Discretization::new(kind, 1).unwrap();
            let mut x = vec![0.0; disc.n_3d() + disc.n_1d() + disc.n_multiplier()];
            for v in 0..disc.n_3d() {
                x[v] = lin_u(disc.mesh.vertex(v));
            }
            for v in 0..disc.n_1d() {
                x[disc.n_3d() + v] = lin_w(disc.line.vertex(v));
            }
            let rec = compute_errors_against(&disc, &x, &lin_u, &lin_w).unwrap();
            assert!(rec.u_h1 <= 1e-10, "{kind:?}: {}", rec.u_h1);
            assert!(rec.w_h1 <= 1e-10, "{kind:?}: {}", rec.w_h1);
            assert!(rec.multiplier_l2 <= 1e-12);
            if let Some(d) = rec.multiplier_dual {
                assert!(d <= 1e-12);
            }
        }
    }

    #[test]
    fn reference_dof_counts_match_generated_meshes() {
        for kind in [
            FormulationKind::Coupled2D,
            FormulationKind::Coupled1D,
            FormulationKind::Stabilized1D,
        ] {
            for level in 1..=3u32 {
                let disc = Discretization::new(kind, level).unwrap();
                assert_eq!(
                    disc.dof_counts(),
                    reference_dof_counts(kind, level).unwrap(),
                    "{kind:?} level {level}"
                );
            }
        }
    }

    #[test]
    fn dof_check_flags_all_rows_as_matching() {
        let table = run_dof_check(1..=2).unwrap();
        assert_eq!(table.rows.len(), 6);
        assert!(table.all_match());
    }

    #[test]
    fn poisson_reference_converges_immediately() {
        let data = BenchmarkData::new();
        let row = poisson_reference(1, &data).unwrap();
        assert!(row.iterations.unwrap() <= 3);
        assert!(row.failed.is_none());
    }
}
