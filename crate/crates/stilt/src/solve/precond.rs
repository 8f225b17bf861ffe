//! Block-diagonal Riesz-map preconditioners for the saddle systems.
//!
//! The primal block is the H¹ inner product of the product space (volume
//! part plus area-weighted line part). The multiplier block realizes the
//! dual norm the formulation calls for: the inverse square root of the
//! spectral Dirichlet Laplacian on the coupling interface for the
//! conforming methods, and a mesh-scaled L² norm plus the jump
//! stabilization for the cut method.

use faer::Mat;

use super::direct::SparseChol;
use crate::coupling::assemble_stabilization;
use crate::error::{Error, Result};
use crate::fem::assembly::{
    mass_1d, mass_3d, mass_surface, stiffness_1d, stiffness_3d, stiffness_surface, Weight,
};
use crate::fem::sparse::{CooBuilder, CsrMatrix};
use crate::fractional::{build_spectral, SpectralNormOperator, EIGEN_GUARD};
use crate::saddle::{BlockSaddleSystem, Discretization, FormulationKind};

/// Multiplier block of the preconditioner.
pub enum MultiplierBlock {
    /// Spectral realization of the H^{-1/2} norm on the free multiplier
    /// DOFs.
    Fractional(SpectralNormOperator),
    /// Mesh-scaled L² mass plus jump stabilization.
    L2PlusStab { mat: CsrMatrix, chol: SparseChol },
}

/// Symmetric positive definite block-diagonal preconditioner acting on
/// the reduced (free-DOF) saddle system.
pub struct BlockDiagPrecond {
    p_primal: CsrMatrix,
    chol_primal: SparseChol,
    mult: MultiplierBlock,
}

impl BlockDiagPrecond {
    pub fn build(disc: &Discretization, sys: &BlockSaddleSystem) -> Result<Self> {
        // primal Riesz map: (K + M) on the volume, |D| (K + M) on the line
        let area = disc.section.area();
        let k3 = stiffness_3d(&disc.mesh, 1.0);
        let m3 = mass_3d(&disc.mesh, 1.0);
        let w1 = Weight::constant(area);
        let k1 = stiffness_1d(&disc.line, &w1);
        let m1 = mass_1d(&disc.line, &w1);
        let np = sys.n_primal();
        let n3 = sys.n3;
        let mut coo = CooBuilder::with_capacity(np, np, k3.nnz() + m3.nnz() + k1.nnz() + m1.nnz());
        for (i, j, v) in k3.iter() {
            coo.push(i, j, v);
        }
        for (i, j, v) in m3.iter() {
            coo.push(i, j, v);
        }
        for (i, j, v) in k1.iter() {
            coo.push(n3 + i, n3 + j, v);
        }
        for (i, j, v) in m1.iter() {
            coo.push(n3 + i, n3 + j, v);
        }
        let full = coo.build();
        let free = sys.free_primal();
        let mut colmap = vec![None; np];
        for (r, &i) in free.iter().enumerate() {
            colmap[i] = Some(r as u32);
        }
        let p_primal = full.submatrix(&free, &colmap, free.len());
        let chol_primal = SparseChol::new(&p_primal)?;

        let mult = match sys.kind {
            FormulationKind::Coupled2D => {
                let surf = disc.surface.as_ref().ok_or_else(|| {
                    Error::InvalidParameter("trace coupling needs a surface mesh".into())
                })?;
                // spectral Dirichlet Laplacian on the interface, the same
                // operator that defines the dual error norm
                let m = mass_surface(surf, 1.0);
                let a = stiffness_surface(surf, 1.0);
                let op = build_spectral(&a, &m, Some(sys.mult_constrained.as_slice()), EIGEN_GUARD)?;
                MultiplierBlock::Fractional(op)
            }
            FormulationKind::Coupled1D => {
                let unit = Weight::constant(1.0);
                let m = mass_1d(&disc.line, &unit);
                let a = stiffness_1d(&disc.line, &unit).add(&m);
                let op = build_spectral(&a, &m, Some(sys.mult_constrained.as_slice()), EIGEN_GUARD)?;
                MultiplierBlock::Fractional(op)
            }
            FormulationKind::Stabilized1D => {
                let cut = disc.cut.as_ref().ok_or_else(|| {
                    Error::InvalidParameter("cut coupling needs a line intersection".into())
                })?;
                let [hx, hy, hz] = disc.mesh.spacings();
                let volume = hx * hy * hz / 6.0;
                let nm = sys.n_mu;
                let mut diag = CooBuilder::new(nm, nm);
                for i in 0..nm {
                    diag.push(i, i, volume);
                }
                let mat = assemble_stabilization(cut, hx).add(&diag.build());
                let chol = SparseChol::new(&mat)?;
                MultiplierBlock::L2PlusStab { mat, chol }
            }
        };
        Ok(Self {
            p_primal,
            chol_primal,
            mult,
        })
    }

    pub fn n_p(&self) -> usize {
        self.p_primal.nrows()
    }

    pub fn n_m(&self) -> usize {
        match &self.mult {
            MultiplierBlock::Fractional(op) => op.free_dofs().len(),
            MultiplierBlock::L2PlusStab { mat, .. } => mat.nrows(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n_p() + self.n_m()
    }

    /// Applies P⁻¹: a primal Cholesky solve and the fractional (or L²)
    /// inverse on the multiplier part.
    pub fn apply_inverse(&self, r: &[f64]) -> Vec<f64> {
        assert_eq!(r.len(), self.dim());
        let (rp, rm) = r.split_at(self.n_p());
        let mut out = self.chol_primal.solve_vec(rp);
        match &self.mult {
            MultiplierBlock::Fractional(op) => {
                out.extend(op.riesz_apply(-0.5, rm));
            }
            MultiplierBlock::L2PlusStab { chol, .. } => {
                out.extend(chol.solve_vec(rm));
            }
        }
        out
    }

    /// Applies P itself (needed by eigenvalue iterations that work in the
    /// P inner product).
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim());
        let (xp, xm) = x.split_at(self.n_p());
        let mut out = self.p_primal.matvec(xp);
        match &self.mult {
            MultiplierBlock::Fractional(op) => {
                out.extend(op.norm_apply(-0.5, xm));
            }
            MultiplierBlock::L2PlusStab { mat, .. } => {
                out.extend(mat.matvec(xm));
            }
        }
        out
    }

    pub fn primal_matrix(&self) -> &CsrMatrix {
        &self.p_primal
    }

    pub fn multiplier_block(&self) -> &MultiplierBlock {
        &self.mult
    }

    /// Dense multiplier norm matrix, for the dense eigenvalue path and
    /// the inf-sup computation.
    pub fn multiplier_norm_dense(&self) -> Mat<f64> {
        match &self.mult {
            MultiplierBlock::Fractional(op) => op.norm_matrix(-0.5),
            MultiplierBlock::L2PlusStab { mat, .. } => mat.to_dense(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::BenchmarkData;
    use crate::saddle::{assemble, BilinearForm, Discretization};
    use crate::solve::direct::{reduced_residual, SaddleFactorization};
    use crate::solve::krylov::minres;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn roundtrip(kind: FormulationKind) {
        let data = BenchmarkData::new();
        let disc = Discretization::new(kind, 1).unwrap();
        let sys = assemble(&disc, BilinearForm::FullH1, &data.problem()).unwrap();
        let p = BlockDiagPrecond::build(&disc, &sys).unwrap();
        let red = sys.reduce();
        assert_eq!(p.dim(), red.dim());
        let mut rng = StdRng::seed_from_u64(5);
        let x: Vec<f64> = (0..p.dim()).map(|_| rng.gen::<f64>() - 0.5).collect();
        let y = p.apply_inverse(&p.apply(&x));
        let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..x.len() {
            assert!(
                (x[i] - y[i]).abs() < 1e-7 * scale,
                "{kind:?} roundtrip at {i}: {} vs {}",
                x[i],
                y[i]
            );
        }
    }

    #[test]
    fn inverse_roundtrips_coupled_1d() {
        roundtrip(FormulationKind::Coupled1D);
    }

    #[test]
    fn inverse_roundtrips_coupled_2d() {
        roundtrip(FormulationKind::Coupled2D);
    }

    #[test]
    fn inverse_roundtrips_stabilized() {
        roundtrip(FormulationKind::Stabilized1D);
    }

    #[test]
    fn preconditioned_minres_matches_direct_solve() {
        let data = BenchmarkData::new();
        for kind in [
            FormulationKind::Coupled1D,
            FormulationKind::Coupled2D,
            FormulationKind::Stabilized1D,
        ] {
            let disc = Discretization::new(kind, 1).unwrap();
            let sys = assemble(&disc, BilinearForm::FullH1, &data.problem()).unwrap();
            let red = sys.reduce();
            let p = BlockDiagPrecond::build(&disc, &sys).unwrap();
            let fact = SaddleFactorization::new(&sys, &red).unwrap();
            let exact = fact.solve(&red, &red.rhs);

            let apply_k = |x: &[f64]| {
                let mut y = vec![0.0; red.dim()];
                red.apply(x, &mut y);
                y
            };
            let apply_pinv = |r: &[f64]| p.apply_inverse(r);
            let (x, report) = minres(&apply_k, &apply_pinv, &red.rhs, 1e-10, 400);
            assert!(report.converged, "{kind:?} did not converge");
            assert!(
                report.iterations < 120,
                "{kind:?} took {} iterations",
                report.iterations
            );
            assert!(reduced_residual(&red, &x) < 1e-8);
            let scale = exact.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
            for i in 0..x.len() {
                assert!(
                    (x[i] - exact[i]).abs() < 1e-6 * scale,
                    "{kind:?} entry {i}: {} vs {}",
                    x[i],
                    exact[i]
                );
            }
        }
    }
}
