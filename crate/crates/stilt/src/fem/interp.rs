//! Error measurement by local higher-order interpolation.
//!
//! Discretization errors are measured by interpolating the pointwise error
//! into a discontinuous piecewise-quadratic space element by element and
//! integrating its H¹ norm there, which resolves the curvature the P1
//! solution cannot represent. Multiplier errors in the dual norm use a
//! continuous piecewise-cubic space on the same line mesh.

use crate::fem::assembly::{tet_coords, tet_gradients};
use crate::fem::quadrature::{gauss_01, tet_rule_14};
use crate::fem::sparse::{CooBuilder, CsrMatrix};
use crate::geometry::{Mesh1D, Mesh3D};

/// Squared L² and H¹-seminorm parts of an error.
#[derive(Debug, Clone, Copy, Default)]
pub struct H1Error {
    pub l2_sq: f64,
    pub semi_sq: f64,
}

impl H1Error {
    pub fn l2(&self) -> f64 {
        self.l2_sq.sqrt()
    }

    pub fn semi(&self) -> f64 {
        self.semi_sq.sqrt()
    }

    /// Full H¹ norm.
    pub fn h1(&self) -> f64 {
        (self.l2_sq + self.semi_sq).sqrt()
    }
}

const TET_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// H¹ norm of the elementwise quadratic interpolant of `exact - u_h` over
/// the volume mesh.
pub fn error_p2_3d(mesh: &Mesh3D, u_h: &[f64], exact: &dyn Fn([f64; 3]) -> f64) -> H1Error {
    assert_eq!(u_h.len(), mesh.n_vertices());
    let rule = tet_rule_14();
    let mut acc = H1Error::default();
    for e in 0..mesh.n_tets() {
        let t = mesh.tet(e);
        let x = tet_coords(mesh, e);
        let (g, vol) = tet_gradients(x);
        // error at the 10 quadratic nodes: 4 vertices then 6 edge midpoints
        let mut node_err = [0.0f64; 10];
        for i in 0..4 {
            node_err[i] = exact(x[i]) - u_h[t[i] as usize];
        }
        for (k, &(a, b)) in TET_EDGES.iter().enumerate() {
            let mid = [
                0.5 * (x[a][0] + x[b][0]),
                0.5 * (x[a][1] + x[b][1]),
                0.5 * (x[a][2] + x[b][2]),
            ];
            let uh_mid = 0.5 * (u_h[t[a] as usize] + u_h[t[b] as usize]);
            node_err[4 + k] = exact(mid) - uh_mid;
        }
        for q in &rule {
            let l = q.bary;
            let mut val = 0.0;
            let mut grad = [0.0f64; 3];
            for i in 0..4 {
                let c = node_err[i];
                val += c * l[i] * (2.0 * l[i] - 1.0);
                let s = c * (4.0 * l[i] - 1.0);
                for d in 0..3 {
                    grad[d] += s * g[i][d];
                }
            }
            for (k, &(a, b)) in TET_EDGES.iter().enumerate() {
                let c = node_err[4 + k];
                val += c * 4.0 * l[a] * l[b];
                for d in 0..3 {
                    grad[d] += c * 4.0 * (l[b] * g[a][d] + l[a] * g[b][d]);
                }
            }
            let wq = vol * q.weight;
            acc.l2_sq += wq * val * val;
            acc.semi_sq += wq * (grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2]);
        }
    }
    acc
}

/// H¹ norm of the elementwise quadratic interpolant of `exact - u_h` over
/// the line mesh.
pub fn error_p2_1d(mesh: &Mesh1D, u_h: &[f64], exact: &dyn Fn(f64) -> f64) -> H1Error {
    assert_eq!(u_h.len(), mesh.n_vertices());
    let rule = gauss_01(3);
    let h = mesh.h();
    let mut acc = H1Error::default();
    for e in 0..mesh.n_segments() {
        let z0 = mesh.vertex(e);
        let z1 = mesh.vertex(e + 1);
        let zm = 0.5 * (z0 + z1);
        let c = [
            exact(z0) - u_h[e],
            exact(zm) - 0.5 * (u_h[e] + u_h[e + 1]),
            exact(z1) - u_h[e + 1],
        ];
        for q in &rule {
            let t = q.0;
            let val =
                c[0] * (1.0 - t) * (1.0 - 2.0 * t) + c[1] * 4.0 * t * (1.0 - t) + c[2] * t * (2.0 * t - 1.0);
            let dval = (c[0] * (4.0 * t - 3.0) + c[1] * (4.0 - 8.0 * t) + c[2] * (4.0 * t - 1.0)) / h;
            acc.l2_sq += q.1 * h * val * val;
            acc.semi_sq += q.1 * h * dval * dval;
        }
    }
    acc
}

/// Continuous piecewise-cubic space on a line mesh, with three nodes per
/// element interior boundary pattern (vertices plus two interior nodes).
#[derive(Debug, Clone)]
pub struct P3Space1D {
    mesh: Mesh1D,
}

/// Reference nodes of the cubic element.
const P3_NODES: [f64; 4] = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];

fn p3_basis(k: usize, t: f64) -> f64 {
    let mut v = 1.0;
    for m in 0..4 {
        if m != k {
            v *= (t - P3_NODES[m]) / (P3_NODES[k] - P3_NODES[m]);
        }
    }
    v
}

fn p3_basis_deriv(k: usize, t: f64) -> f64 {
    let mut sum = 0.0;
    for m in 0..4 {
        if m == k {
            continue;
        }
        let mut prod = 1.0 / (P3_NODES[k] - P3_NODES[m]);
        for l in 0..4 {
            if l != k && l != m {
                prod *= (t - P3_NODES[l]) / (P3_NODES[k] - P3_NODES[l]);
            }
        }
        sum += prod;
    }
    sum
}

impl P3Space1D {
    pub fn new(mesh: &Mesh1D) -> Self {
        P3Space1D { mesh: mesh.clone() }
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn dim(&self) -> usize {
        3 * self.mesh.n_segments() + 1
    }

    /// Height of global node `i`; nodes are uniformly spaced at one third of
    /// the element width.
    pub fn node_z(&self, i: usize) -> f64 {
        let e = (i / 3).min(self.mesh.n_segments() - 1);
        let k = i - 3 * e;
        self.mesh.vertex(e) + P3_NODES[k] * self.mesh.h()
    }

    /// Nodal interpolant of a function.
    pub fn interpolate(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.dim()).map(|i| f(self.node_z(i))).collect()
    }

    /// ∫ u v over the line.
    pub fn mass(&self) -> CsrMatrix {
        self.assemble(false)
    }

    /// ∫ u′ v′ over the line.
    pub fn stiffness(&self) -> CsrMatrix {
        self.assemble(true)
    }

    fn assemble(&self, derivatives: bool) -> CsrMatrix {
        let n = self.dim();
        let h = self.mesh.h();
        let rule = gauss_01(4);
        let mut local = [[0.0f64; 4]; 4];
        for q in &rule {
            for i in 0..4 {
                for j in 0..4 {
                    local[i][j] += if derivatives {
                        q.1 * p3_basis_deriv(i, q.0) * p3_basis_deriv(j, q.0) / h
                    } else {
                        q.1 * p3_basis(i, q.0) * p3_basis(j, q.0) * h
                    };
                }
            }
        }
        let mut b = CooBuilder::with_capacity(n, n, 16 * self.mesh.n_segments());
        for e in 0..self.mesh.n_segments() {
            for i in 0..4 {
                for j in 0..4 {
                    b.push(3 * e + i, 3 * e + j, local[i][j]);
                }
            }
        }
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn linear_errors_vanish() {
        let mesh = Mesh3D::uniform_box([1.0, 1.0, 1.0], [2, 2, 2]).unwrap();
        let f = |p: [f64; 3]| 1.0 + p[0] - 2.0 * p[2];
        let u: Vec<f64> = (0..mesh.n_vertices()).map(|v| f(mesh.vertex(v))).collect();
        let err = error_p2_3d(&mesh, &u, &f);
        assert!(err.h1() < 1e-13);
    }

    #[test]
    fn norm_of_a_known_field() {
        // with exact = 0 the measured error is the norm of the P1 field
        let mesh = Mesh3D::uniform_box([1.0, 1.0, 1.0], [3, 3, 3]).unwrap();
        let u: Vec<f64> = (0..mesh.n_vertices()).map(|v| mesh.vertex(v)[0]).collect();
        let err = error_p2_3d(&mesh, &u, &|_| 0.0);
        assert_relative_eq!(err.l2_sq, 1.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(err.semi_sq, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn interpolation_error_halves_with_the_mesh() {
        let f = |p: [f64; 3]| (2.0 * PI * p[0]).sin() * (2.0 * PI * p[1]).sin();
        let mut h1 = Vec::new();
        for n in [4usize, 8] {
            let mesh = Mesh3D::uniform_box([1.0, 1.0, 1.0], [n, n, n]).unwrap();
            let u: Vec<f64> = (0..mesh.n_vertices()).map(|v| f(mesh.vertex(v))).collect();
            h1.push(error_p2_3d(&mesh, &u, &f).h1());
        }
        let rate = (h1[0] / h1[1]).log2();
        assert!((rate - 1.0).abs() < 0.15, "H1 rate {rate}");
    }

    #[test]
    fn line_error_of_a_known_field() {
        let mesh = Mesh1D::uniform([0.5, 0.5], 1.0, 5).unwrap();
        let u: Vec<f64> = (0..mesh.n_vertices()).map(|i| mesh.vertex(i)).collect();
        let err = error_p2_1d(&mesh, &u, &|_| 0.0);
        assert_relative_eq!(err.l2_sq, 1.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(err.semi_sq, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn line_interpolation_error_rate() {
        let f = |z: f64| (PI * z).sin();
        let mut h1 = Vec::new();
        for n in [8usize, 16] {
            let mesh = Mesh1D::uniform([0.0, 0.0], 1.0, n).unwrap();
            let u: Vec<f64> = (0..mesh.n_vertices()).map(|i| f(mesh.vertex(i))).collect();
            h1.push(error_p2_1d(&mesh, &u, &f).h1());
        }
        let rate = (h1[0] / h1[1]).log2();
        assert!((rate - 1.0).abs() < 0.05, "H1 rate {rate}");
    }

    #[test]
    fn cubic_space_reproduces_cubics() {
        let mesh = Mesh1D::uniform([0.0, 0.0], 1.0, 3).unwrap();
        let space = P3Space1D::new(&mesh);
        assert_eq!(space.dim(), 10);
        let coeffs = space.interpolate(|z| z * z * z);
        let m = space.mass();
        let k = space.stiffness();
        let mu = m.matvec(&coeffs);
        let ku = k.matvec(&coeffs);
        let l2: f64 = coeffs.iter().zip(&mu).map(|(a, b)| a * b).sum();
        let en: f64 = coeffs.iter().zip(&ku).map(|(a, b)| a * b).sum();
        assert_relative_eq!(l2, 1.0 / 7.0, epsilon = 1e-12);
        assert_relative_eq!(en, 9.0 / 5.0, epsilon = 1e-12);
    }

    #[test]
    fn cubic_nodes_are_uniform() {
        let mesh = Mesh1D::uniform([0.0, 0.0], 1.0, 2).unwrap();
        let space = P3Space1D::new(&mesh);
        for i in 0..space.dim() {
            assert_relative_eq!(space.node_z(i), i as f64 / 6.0, epsilon = 1e-14);
        }
    }
}
