//! Dirichlet conditions by symmetric in-place elimination.
//!
//! Constrained rows and columns are zeroed, the diagonal is set to one, and
//! the right-hand side absorbs the lifted boundary data. The matrix keeps its
//! size, so unknown counts are unaffected by the boundary treatment.

use crate::fem::sparse::{CooBuilder, CsrMatrix};
use crate::geometry::{Mesh1D, Mesh3D};

/// Marked degrees of freedom with prescribed values.
#[derive(Debug, Clone)]
pub struct DirichletBc {
    mask: Vec<bool>,
    values: Vec<f64>,
}

impl DirichletBc {
    /// No constraints on a space of the given dimension.
    pub fn none(dim: usize) -> Self {
        DirichletBc {
            mask: vec![false; dim],
            values: vec![0.0; dim],
        }
    }

    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut bc = Self::none(dim);
        for (dof, value) in pairs {
            assert!(dof < dim);
            bc.mask[dof] = true;
            bc.values[dof] = value;
        }
        bc
    }

    /// Constrains every vertex on the boundary of the box to `g` evaluated
    /// there.
    pub fn boundary_3d(mesh: &Mesh3D, g: impl Fn([f64; 3]) -> f64) -> Self {
        let mask = mesh.boundary_mask();
        let values = (0..mesh.n_vertices())
            .map(|v| if mask[v] { g(mesh.vertex(v)) } else { 0.0 })
            .collect();
        DirichletBc { mask, values }
    }

    /// Constrains the two endpoints of the segment mesh.
    pub fn endpoints_1d(mesh: &Mesh1D, g0: f64, g1: f64) -> Self {
        let dim = mesh.n_vertices();
        Self::from_pairs(dim, [(0, g0), (dim - 1, g1)])
    }

    pub fn dim(&self) -> usize {
        self.mask.len()
    }

    pub fn is_constrained(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn n_constrained(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Unconstrained indices in ascending order.
    pub fn free_dofs(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| !self.mask[i]).collect()
    }

    /// Writes the prescribed values into the constrained entries of `x`.
    pub fn set_values(&self, x: &mut [f64]) {
        for i in 0..self.dim() {
            if self.mask[i] {
                x[i] = self.values[i];
            }
        }
    }

    /// Symmetric elimination: returns the constrained matrix and lifts the
    /// boundary data into `rhs`. Constrained rows and columns become unit
    /// rows of the identity; `rhs` carries the prescribed values there.
    pub fn apply_symmetric(&self, a: &CsrMatrix, rhs: &mut [f64]) -> CsrMatrix {
        let n = self.dim();
        assert_eq!(a.nrows(), n);
        assert_eq!(a.ncols(), n);
        assert_eq!(rhs.len(), n);
        let mut b = CooBuilder::with_capacity(n, n, a.nnz());
        for (i, j, v) in a.iter() {
            match (self.mask[i], self.mask[j]) {
                (false, false) => b.push(i, j, v),
                (false, true) => rhs[i] -= v * self.values[j],
                (true, _) => {}
            }
        }
        for i in 0..n {
            if self.mask[i] {
                b.push(i, i, 1.0);
                rhs[i] = self.values[i];
            }
        }
        b.build()
    }

    /// Removes constrained columns from a rectangular coupling block,
    /// lifting their contribution into the block's right-hand side.
    pub fn eliminate_columns(&self, b: &CsrMatrix, rhs: &mut [f64]) -> CsrMatrix {
        assert_eq!(b.ncols(), self.dim());
        assert_eq!(rhs.len(), b.nrows());
        let mut out = CooBuilder::with_capacity(b.nrows(), b.ncols(), b.nnz());
        for (i, j, v) in b.iter() {
            if self.mask[j] {
                rhs[i] -= v * self.values[j];
            } else {
                out.push(i, j, v);
            }
        }
        out.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::assembly::{load_3d, stiffness_3d};
    use approx::assert_relative_eq;
    use faer::prelude::*;

    #[test]
    fn affine_patch_test() {
        // an affine function solves the Laplace problem exactly, so the
        // constrained system must reproduce it to solver precision
        let mesh = Mesh3D::uniform_box([1.0, 1.0, 1.0], [3, 3, 3]).unwrap();
        let g = |p: [f64; 3]| 2.0 * p[0] - p[1] + 3.0 * p[2] + 0.5;
        let k = stiffness_3d(&mesh, 1.0);
        let mut rhs = load_3d(&mesh, 1.0, |_| 0.0);
        let bc = DirichletBc::boundary_3d(&mesh, g);
        let ks = bc.apply_symmetric(&k, &mut rhs);
        assert!(ks.asymmetry() <= 1e-12);
        let dense = ks.to_dense();
        let b = Mat::<f64>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        let x = dense.llt(faer::Side::Lower).unwrap().solve(&b);
        for v in 0..mesh.n_vertices() {
            assert_relative_eq!(x[(v, 0)], g(mesh.vertex(v)), epsilon = 1e-10);
        }
    }

    #[test]
    fn homogeneous_values_vanish_on_the_boundary() {
        let mesh = Mesh3D::uniform_box([1.0, 1.0, 1.0], [2, 2, 2]).unwrap();
        let k = stiffness_3d(&mesh, 1.0);
        let mut rhs = load_3d(&mesh, 1.0, |_| 1.0);
        let bc = DirichletBc::boundary_3d(&mesh, |_| 0.0);
        let ks = bc.apply_symmetric(&k, &mut rhs);
        for i in 0..bc.dim() {
            if bc.is_constrained(i) {
                assert_eq!(rhs[i], 0.0);
                assert_eq!(ks.get(i, i), 1.0);
                assert_eq!(ks.row(i).0.len(), 1);
            }
        }
    }

    #[test]
    fn fully_constrained_system_returns_the_data() {
        let mesh = Mesh1D::uniform([0.0, 0.0], 1.0, 1).unwrap();
        let k = crate::fem::assembly::stiffness_1d(&mesh, &crate::fem::assembly::Weight::constant(1.0));
        let mut rhs = vec![0.0; 2];
        let bc = DirichletBc::from_pairs(2, [(0, 1.5), (1, -2.0)]);
        let ks = bc.apply_symmetric(&k, &mut rhs);
        assert_eq!(rhs, vec![1.5, -2.0]);
        assert_eq!(ks.get(0, 0), 1.0);
        assert_eq!(ks.get(1, 1), 1.0);
        assert_eq!(ks.get(0, 1), 0.0);
    }

    #[test]
    fn column_elimination_moves_data_to_the_rhs() {
        let mut b = crate::fem::sparse::CooBuilder::new(2, 3);
        b.push(0, 0, 1.0);
        b.push(0, 2, 2.0);
        b.push(1, 1, 1.0);
        let bmat = b.build();
        let bc = DirichletBc::from_pairs(3, [(2, 0.5)]);
        let mut rhs = vec![0.0; 2];
        let be = bc.eliminate_columns(&bmat, &mut rhs);
        assert_eq!(rhs, vec![-1.0, 0.0]);
        assert_eq!(be.get(0, 2), 0.0);
        assert_eq!(be.get(0, 0), 1.0);
    }

    #[test]
    fn boundary_values_are_sampled_exactly() {
        let mesh = Mesh3D::uniform_box([1.0, 1.0, 1.0], [8, 8, 8]).unwrap();
        use std::f64::consts::PI;
        let ub = |p: [f64; 3]| (2.0 * PI * p[0]).sin() * (2.0 * PI * p[1]).sin();
        let bc = DirichletBc::boundary_3d(&mesh, ub);
        let v = mesh.grid_vertex(1, 1, 0);
        assert_relative_eq!(bc.value(v), (PI / 4.0).sin().powi(2), epsilon = 1e-12);
    }
}
