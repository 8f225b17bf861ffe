//! Exact solution of the reduced saddle systems.
//!
//! Conforming 1D couplings and the stabilized formulation go through a
//! multiplier Schur complement: one sparse Cholesky of the primal block,
//! a skinny dense solve for the multiplier. The 2D coupling has far too
//! many multipliers for that, but its constraint is a mortar identity
//! between trace values and the 1D unknown, so the constraint is
//! eliminated exactly instead: trace DOFs are glued to their line DOF and
//! the multiplier is recovered from the primal residual afterwards.

use faer::prelude::Solve;
use faer::Mat;

use super::ReducedSystem;
use crate::error::{Error, Result};
use crate::fem::sparse::{norm2, CooBuilder, CsrMatrix};
use crate::saddle::BlockSaddleSystem;

/// Rough cap on the dense memory a factorization may allocate, in floats.
const DENSE_BUDGET: usize = 200_000_000;

/// Sparse Cholesky factorization of a symmetric positive definite matrix.
pub struct SparseChol {
    n: usize,
    llt: faer::sparse::linalg::solvers::Llt<usize, f64>,
}

impl SparseChol {
    pub fn new(m: &CsrMatrix) -> Result<Self> {
        let f = m.to_faer();
        let llt = f
            .sp_cholesky(faer::Side::Lower)
            .map_err(|_| Error::Factorization("sparse Cholesky failed: matrix not SPD".into()))?;
        Ok(Self { n: m.nrows(), llt })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let rhs = Mat::from_fn(self.n, 1, |i, _| b[i]);
        let x = self.llt.solve(&rhs);
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }

    pub fn solve_mat(&self, b: Mat<f64>) -> Mat<f64> {
        assert_eq!(b.nrows(), self.n);
        self.llt.solve(&b)
    }
}

/// Dense Cholesky factorization, used for multiplier Schur complements.
pub struct DenseChol {
    n: usize,
    llt: faer::linalg::solvers::Llt<f64>,
}

impl DenseChol {
    pub fn new(m: &Mat<f64>) -> Result<Self> {
        let llt = m
            .llt(faer::Side::Lower)
            .map_err(|_| Error::Factorization("dense Cholesky failed: matrix not SPD".into()))?;
        Ok(Self { n: m.nrows(), llt })
    }

    pub fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let rhs = Mat::from_fn(self.n, 1, |i, _| b[i]);
        let x = self.llt.solve(&rhs);
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }
}

/// Reusable factorization of a reduced saddle system.
pub enum SaddleFactorization {
    /// Multiplier Schur complement: A = LLᵀ, G = A⁻¹Bᵀ, Sₘ = BG + S.
    Schur {
        a_chol: SparseChol,
        g: Mat<f64>,
        schur: DenseChol,
    },
    /// Exact constraint elimination for the trace coupling.
    NullSpace {
        /// Cholesky of the free-free trace mass matrix.
        m_chol: SparseChol,
        /// Cholesky of Zᵀ A Z on the glued unknowns.
        z_chol: SparseChol,
        /// Reduced-primal position of the trace DOF behind each free
        /// multiplier row.
        gamma_rows: Vec<usize>,
        /// Glued column of each reduced primal DOF.
        col_of: Vec<usize>,
        n_reduced: usize,
    },
}

fn dense_from_csr_transposed(m: &CsrMatrix) -> Mat<f64> {
    let mut out = Mat::zeros(m.ncols(), m.nrows());
    for (i, j, v) in m.iter() {
        out[(j, i)] = v;
    }
    out
}

/// Builds (A-Cholesky, G = A⁻¹Bᵀ, BG) for a reduced system.
fn schur_parts(red: &ReducedSystem) -> Result<(SparseChol, Mat<f64>, Mat<f64>)> {
    let (np, nm) = (red.n_p(), red.n_m());
    if np.saturating_mul(nm) > DENSE_BUDGET {
        return Err(Error::Factorization(format!(
            "Schur complement of size {np} x {nm} exceeds the dense memory budget"
        )));
    }
    let a_chol = SparseChol::new(&red.a)?;
    let bt = dense_from_csr_transposed(&red.b);
    let g = a_chol.solve_mat(bt);
    let mut bg = Mat::zeros(nm, nm);
    for (i, k, v) in red.b.iter() {
        for j in 0..nm {
            bg[(i, j)] += v * g[(k, j)];
        }
    }
    Ok((a_chol, g, bg))
}

/// Dense multiplier Schur complement B A⁻¹ Bᵀ (+ S if requested).
pub fn multiplier_schur_dense(red: &ReducedSystem, include_stab: bool) -> Result<Mat<f64>> {
    let (_, _, mut bg) = schur_parts(red)?;
    if include_stab {
        for (i, j, v) in red.s.iter() {
            bg[(i, j)] += v;
        }
    }
    // symmetrize away factorization roundoff
    let nm = bg.nrows();
    for i in 0..nm {
        for j in 0..i {
            let m = 0.5 * (bg[(i, j)] + bg[(j, i)]);
            bg[(i, j)] = m;
            bg[(j, i)] = m;
        }
    }
    Ok(bg)
}

impl SaddleFactorization {
    /// Picks the elimination strategy the formulation calls for.
    pub fn new(sys: &BlockSaddleSystem, red: &ReducedSystem) -> Result<Self> {
        if sys.trace.is_some() {
            Self::null_space(sys, red)
        } else {
            Self::schur(red)
        }
    }

    /// Multiplier Schur complement path.
    pub fn schur(red: &ReducedSystem) -> Result<Self> {
        // A multiplier DOF with no constraint row and no stabilization
        // makes the system singular; detect it before factorizing.
        for i in 0..red.n_m() {
            if red.b.row(i).0.is_empty() && red.s.row(i).0.is_empty() {
                return Err(Error::Factorization(format!(
                    "multiplier DOF {i} is decoupled: system is singular"
                )));
            }
        }
        let (a_chol, g, mut bg) = schur_parts(red)?;
        for (i, j, v) in red.s.iter() {
            bg[(i, j)] += v;
        }
        let nm = bg.nrows();
        for i in 0..nm {
            for j in 0..i {
                let m = 0.5 * (bg[(i, j)] + bg[(j, i)]);
                bg[(i, j)] = m;
                bg[(j, i)] = m;
            }
        }
        let schur = DenseChol::new(&bg)?;
        Ok(SaddleFactorization::Schur { a_chol, g, schur })
    }

    /// Exact mortar elimination path for the trace coupling.
    pub fn null_space(sys: &BlockSaddleSystem, red: &ReducedSystem) -> Result<Self> {
        let trace = sys.trace.as_ref().ok_or_else(|| {
            Error::Factorization("null-space elimination needs a trace structure".into())
        })?;
        {
            // Map full primal indices to reduced positions first.
            let np_full = sys.n_primal();
            let mut red_pos = vec![usize::MAX; np_full];
            for (r, &i) in red.primal_idx.iter().enumerate() {
                red_pos[i] = r;
            }
            let nf_m = red.n_m();
            let mut gamma_rows = vec![0usize; nf_m];
            let mut is_trace = vec![false; red.n_p()];
            let mut glue_target = vec![usize::MAX; red.n_p()];
            for (row, &mu) in red.mult_idx.iter().enumerate() {
                let vol = red_pos[trace.volume_dof[mu]];
                let line = red_pos[trace.line_dof[mu]];
                if vol == usize::MAX || line == usize::MAX {
                    return Err(Error::Factorization(
                        "free multiplier row touches a constrained primal DOF".into(),
                    ));
                }
                gamma_rows[row] = vol;
                is_trace[vol] = true;
                glue_target[vol] = line;
            }
            let mut col_of = vec![usize::MAX; red.n_p()];
            let mut next = 0usize;
            for i in 0..red.n_p() {
                if !is_trace[i] {
                    col_of[i] = next;
                    next += 1;
                }
            }
            for i in 0..red.n_p() {
                if is_trace[i] {
                    col_of[i] = col_of[glue_target[i]];
                }
            }
            let n_reduced = next;
            let mut zaz = CooBuilder::with_capacity(n_reduced, n_reduced, red.a.nnz());
            for (i, j, v) in red.a.iter() {
                zaz.push(col_of[i], col_of[j], v);
            }
            let z_chol = SparseChol::new(&zaz.build())?;
            // free-free trace mass, in free-multiplier ordering
            let mut mcol = vec![None; trace.mass.ncols()];
            for (r, &mu) in red.mult_idx.iter().enumerate() {
                mcol[mu] = Some(r as u32);
            }
            let m_ff = trace.mass.submatrix(&red.mult_idx, &mcol, nf_m);
            let m_chol = SparseChol::new(&m_ff)?;
            Ok(SaddleFactorization::NullSpace {
                m_chol,
                z_chol,
                gamma_rows,
                col_of,
                n_reduced,
            })
        }
    }

    /// Solves the reduced system for an arbitrary reduced right-hand side.
    pub fn solve(&self, red: &ReducedSystem, rhs: &[f64]) -> Vec<f64> {
        assert_eq!(rhs.len(), red.dim());
        let (np, nm) = (red.n_p(), red.n_m());
        let (c, d) = rhs.split_at(np);
        match self {
            SaddleFactorization::Schur { a_chol, g, schur } => {
                let t = a_chol.solve_vec(c);
                let mut y = red.b.matvec(&t);
                for i in 0..nm {
                    y[i] -= d[i];
                }
                let lam = schur.solve_vec(&y);
                let mut out = t;
                for i in 0..np {
                    let mut acc = out[i];
                    for j in 0..nm {
                        acc -= g[(i, j)] * lam[j];
                    }
                    out[i] = acc;
                }
                out.extend_from_slice(&lam);
                out
            }
            SaddleFactorization::NullSpace {
                m_chol,
                z_chol,
                gamma_rows,
                col_of,
                n_reduced,
            } => {
                // particular solution carrying the mortar gap
                let gap = m_chol.solve_vec(d);
                let mut x_p = vec![0.0; np];
                for (row, &r) in gamma_rows.iter().enumerate() {
                    x_p[r] = gap[row];
                }
                let mut t = red.a.matvec(&x_p);
                for i in 0..np {
                    t[i] = c[i] - t[i];
                }
                let mut rhat = vec![0.0; *n_reduced];
                for i in 0..np {
                    rhat[col_of[i]] += t[i];
                }
                let yhat = z_chol.solve_vec(&rhat);
                let mut x = x_p;
                for i in 0..np {
                    x[i] += yhat[col_of[i]];
                }
                // multiplier from the primal residual at the trace rows
                let ax = red.a.matvec(&x);
                let rho: Vec<f64> = gamma_rows.iter().map(|&r| c[r] - ax[r]).collect();
                let lam = m_chol.solve_vec(&rho);
                x.extend_from_slice(&lam);
                x
            }
        }
    }
}

/// Assembles, reduces, factorizes and solves in one call, returning the
/// full-length solution vector (primal DOFs then multiplier DOFs).
pub fn solve_direct(sys: &BlockSaddleSystem) -> Result<Vec<f64>> {
    let red = sys.reduce();
    let fact = SaddleFactorization::new(sys, &red)?;
    let x = fact.solve(&red, &red.rhs);
    Ok(red.expand(sys, &x))
}

/// Relative residual of a reduced solution, for postconditions in tests.
pub fn reduced_residual(red: &ReducedSystem, x: &[f64]) -> f64 {
    let mut y = vec![0.0; red.dim()];
    red.apply(x, &mut y);
    for i in 0..red.dim() {
        y[i] -= red.rhs[i];
    }
    let scale = norm2(&red.rhs).max(1e-300);
    norm2(&y) / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::BenchmarkData;
    use crate::saddle::{assemble, BilinearForm, Discretization, FormulationKind, ProblemData};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_saddle(np: usize, nm: usize, seed: u64) -> ReducedSystem {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut a = CooBuilder::new(np, np);
        for i in 0..np {
            a.push(i, i, 4.0 + rng.gen::<f64>());
            if i + 1 < np {
                let v = rng.gen::<f64>() - 0.5;
                a.push(i, i + 1, v);
                a.push(i + 1, i, v);
            }
        }
        let mut b = CooBuilder::new(nm, np);
        for i in 0..nm {
            for _ in 0..3 {
                let j = rng.gen_range(0..np);
                let v = rng.gen::<f64>() - 0.5;
                b.push(i, j, v);
            }
            b.push(i, i % np, 1.0);
        }
        let mut s = CooBuilder::new(nm, nm);
        for i in 0..nm {
            s.push(i, i, 0.1 + 0.1 * rng.gen::<f64>());
        }
        let rhs: Vec<f64> = (0..np + nm).map(|_| rng.gen::<f64>() - 0.5).collect();
        ReducedSystem {
            a: a.build(),
            b: b.build(),
            s: s.build(),
            rhs,
            primal_idx: (0..np).collect(),
            mult_idx: (0..nm).collect(),
        }
    }

    #[test]
    fn schur_matches_dense_oracle() {
        let red = random_saddle(40, 10, 7);
        let mut k = Mat::<f64>::zeros(50, 50);
        for (i, j, v) in red.a.iter() {
            k[(i, j)] += v;
        }
        for (i, j, v) in red.b.iter() {
            k[(40 + i, j)] += v;
            k[(j, 40 + i)] += v;
        }
        for (i, j, v) in red.s.iter() {
            k[(40 + i, 40 + j)] -= v;
        }
        let rhs = Mat::from_fn(50, 1, |i, _| red.rhs[i]);
        let oracle = k.partial_piv_lu().solve(&rhs);

        let fact = SaddleFactorization::schur(&red).unwrap();
        let x = fact.solve(&red, &red.rhs);
        for i in 0..50 {
            assert!(
                (x[i] - oracle[(i, 0)]).abs() < 1e-9,
                "entry {i}: {} vs {}",
                x[i],
                oracle[(i, 0)]
            );
        }
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let data = ProblemData::zero();
        let disc = Discretization::new(FormulationKind::Coupled1D, 1).unwrap();
        let sys = assemble(&disc, BilinearForm::StiffnessOnly, &data).unwrap();
        let x = solve_direct(&sys).unwrap();
        for v in x {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn direct_solve_meets_residual_postcondition_coupled_1d() {
        let data = BenchmarkData::new();
        let disc = Discretization::new(FormulationKind::Coupled1D, 2).unwrap();
        let sys = assemble(&disc, BilinearForm::StiffnessOnly, &data.problem()).unwrap();
        let red = sys.reduce();
        let fact = SaddleFactorization::new(&sys, &red).unwrap();
        let x = fact.solve(&red, &red.rhs);
        assert!(reduced_residual(&red, &x) < 1e-9);
        let full = red.expand(&sys, &x);
        assert!(sys.constraint_residual(&full) < 1e-9);
    }

    #[test]
    fn direct_solve_meets_residual_postcondition_coupled_2d() {
        let data = BenchmarkData::new();
        let disc = Discretization::new(FormulationKind::Coupled2D, 2).unwrap();
        let sys = assemble(&disc, BilinearForm::StiffnessOnly, &data.problem()).unwrap();
        let red = sys.reduce();
        let fact = SaddleFactorization::new(&sys, &red).unwrap();
        assert!(matches!(fact, SaddleFactorization::NullSpace { .. }));
        let x = fact.solve(&red, &red.rhs);
        assert!(
            reduced_residual(&red, &x) < 1e-9,
            "residual {}",
            reduced_residual(&red, &x)
        );
    }

    #[test]
    fn direct_solve_meets_residual_postcondition_stabilized() {
        let data = BenchmarkData::new();
        let disc = Discretization::new(FormulationKind::Stabilized1D, 1).unwrap();
        let sys = assemble(&disc, BilinearForm::StiffnessOnly, &data.problem()).unwrap();
        let red = sys.reduce();
        let fact = SaddleFactorization::new(&sys, &red).unwrap();
        let x = fact.solve(&red, &red.rhs);
        assert!(reduced_residual(&red, &x) < 1e-9);
    }

    #[test]
    fn unstabilized_cut_system_is_rejected() {
        let data = ProblemData::zero();
        let disc = Discretization::new(FormulationKind::Stabilized1D, 1).unwrap();
        let sys =
            crate::saddle::assemble_with_options(&disc, BilinearForm::StiffnessOnly, &data, false)
                .unwrap();
        let red = sys.reduce();
        let err = SaddleFactorization::new(&sys, &red);
        assert!(err.is_err());
    }
}
