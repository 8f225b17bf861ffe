//! Solvers for the saddle systems: an exact direct path per formulation,
//! preconditioned MinRes and CG, the block-diagonal Riesz preconditioners,
//! and spectral condition-number estimation.

pub mod condition;
pub mod direct;
pub mod krylov;
pub mod precond;

pub use condition::{estimate_condition, generalized_eigen_bounds, ConditionEstimate};
pub use direct::{multiplier_schur_dense, solve_direct, DenseChol, SaddleFactorization, SparseChol};
pub use krylov::{cg, minres, SolveReport};
pub use precond::{BlockDiagPrecond, MultiplierBlock};

use crate::fem::sparse::CsrMatrix;
use crate::saddle::BlockSaddleSystem;

/// The saddle system restricted to free degrees of freedom.
pub struct ReducedSystem {
    /// Free primal block.
    pub a: CsrMatrix,
    /// Free constraint block (free multiplier rows × free primal columns).
    pub b: CsrMatrix,
    /// Free stabilization block.
    pub s: CsrMatrix,
    /// Stacked right-hand side (primal part, then multiplier part).
    pub rhs: Vec<f64>,
    /// Full primal index of each free primal DOF.
    pub primal_idx: Vec<usize>,
    /// Full multiplier index of each free multiplier DOF.
    pub mult_idx: Vec<usize>,
}

impl BlockSaddleSystem {
    /// Strips constrained rows and columns, leaving the solvable core.
    pub fn reduce(&self) -> ReducedSystem {
        let primal_idx = self.free_primal();
        let mult_idx = self.free_multiplier();
        let np = self.n_primal();
        let mut pcol = vec![None; np];
        for (r, &i) in primal_idx.iter().enumerate() {
            pcol[i] = Some(r as u32);
        }
        let mut mcol = vec![None; self.n_mu];
        for (r, &i) in mult_idx.iter().enumerate() {
            mcol[i] = Some(r as u32);
        }
        let a = self.a.submatrix(&primal_idx, &pcol, primal_idx.len());
        let b = self.b.submatrix(&mult_idx, &pcol, primal_idx.len());
        let s = self.s_stab.submatrix(&mult_idx, &mcol, mult_idx.len());
        let mut rhs: Vec<f64> = primal_idx.iter().map(|&i| self.rhs_primal[i]).collect();
        rhs.extend(mult_idx.iter().map(|&i| self.rhs_multiplier[i]));
        ReducedSystem {
            a,
            b,
            s,
            rhs,
            primal_idx,
            mult_idx,
        }
    }
}

impl ReducedSystem {
    pub fn n_p(&self) -> usize {
        self.primal_idx.len()
    }

    pub fn n_m(&self) -> usize {
        self.mult_idx.len()
    }

    pub fn dim(&self) -> usize {
        self.n_p() + self.n_m()
    }

    /// Monolithic operator y = [[A, Bᵀ], [B, −S]] x.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let np = self.n_p();
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        self.a.matvec_into(&x[..np], &mut y[..np]);
        self.b.matvec_transpose_add(&x[np..], 1.0, &mut y[..np]);
        let bx = self.b.matvec(&x[..np]);
        let slam = self.s.matvec(&x[np..]);
        for i in 0..self.n_m() {
            y[np + i] = bx[i] - slam[i];
        }
    }

    /// Expands a reduced solution to full length, filling constrained
    /// entries with their boundary values.
    pub fn expand(&self, sys: &BlockSaddleSystem, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim());
        let mut full = vec![0.0; sys.dim()];
        sys.primal_bc.set_values(&mut full[..sys.n_primal()]);
        for (r, &i) in self.primal_idx.iter().enumerate() {
            full[i] = x[r];
        }
        let np = self.n_p();
        for (r, &i) in self.mult_idx.iter().enumerate() {
            full[sys.n_primal() + i] = x[np + r];
        }
        full
    }
}

#[cfg(test)]
mod tests {
    use crate::saddle::{assemble, BilinearForm, Discretization, FormulationKind, ProblemData};

    #[test]
    fn reduction_drops_constrained_dofs() {
        let data = ProblemData::zero();
        let disc = Discretization::new(FormulationKind::Coupled1D, 1).unwrap();
        let sys = assemble(&disc, BilinearForm::FullH1, &data).unwrap();
        let red = sys.reduce();
        // interior 3D vertices plus interior line vertices
        assert_eq!(red.n_p(), 27 + 3);
        assert_eq!(red.n_m(), 3);
        assert_eq!(red.rhs.len(), red.dim());
        // the reduced primal block has no identity remnants: every diagonal
        // entry exceeds the identity placed on constrained rows
        for r in 0..red.n_p() {
            assert!(red.a.get(r, r) > 1.0);
        }
    }

    #[test]
    fn apply_matches_full_matrix_on_free_part() {
        let data = ProblemData::zero();
        let disc = Discretization::new(FormulationKind::Stabilized1D, 1).unwrap();
        let sys = assemble(&disc, BilinearForm::StiffnessOnly, &data).unwrap();
        let red = sys.reduce();
        let n = red.dim();
        let x: Vec<f64> = (0..n).map(|i| ((i * 7 % 13) as f64) - 6.0).collect();
        let mut y = vec![0.0; n];
        red.apply(&x, &mut y);
        // embed, apply the monolithic matrix, restrict
        let full = sys.full_matrix();
        let mut xf = vec![0.0; sys.dim()];
        for (r, &i) in red.primal_idx.iter().enumerate() {
            xf[i] = x[r];
        }
        for (r, &i) in red.mult_idx.iter().enumerate() {
            xf[sys.n_primal() + i] = x[red.n_p() + r];
        }
        let yf = full.matvec(&xf);
        for (r, &i) in red.primal_idx.iter().enumerate() {
            assert!((y[r] - yf[i]).abs() < 1e-12);
        }
        for (r, &i) in red.mult_idx.iter().enumerate() {
            assert!((y[red.n_p() + r] - yf[sys.n_primal() + i]).abs() < 1e-12);
        }
    }
}
