//! Assembly of P1 mass, stiffness, and load terms on the three mesh types,
//! plus piecewise-constant mass on line segments.
//!
//! Weights enter the forms as in ∫ w ∇u·∇v and ∫ w u v. Weights on the line
//! may vary with the line coordinate; volume and surface forms take constant
//! weights, which is all the formulations use.

use crate::fem::quadrature::{gauss_01, tet_rule_14, tri_rule_6};
use crate::fem::sparse::{CooBuilder, CsrMatrix};
use crate::geometry::{LineIntersection, Mesh1D, Mesh3D, SurfaceMesh2D};

/// Scalar weight, constant or varying along the line coordinate.
pub enum Weight<'a> {
    Constant(f64),
    Variable(&'a dyn Fn(f64) -> f64),
}

impl Weight<'_> {
    pub fn constant(w: f64) -> Weight<'static> {
        assert!(w > 0.0, "weights must be strictly positive");
        Weight::Constant(w)
    }

    #[inline]
    pub fn at(&self, s: f64) -> f64 {
        match self {
            Weight::Constant(w) => *w,
            Weight::Variable(f) => f(s),
        }
    }
}

/// Gradients of the four barycentric coordinates of a tetrahedron, and its
/// volume.
pub(crate) fn tet_gradients(x: [[f64; 3]; 4]) -> ([[f64; 3]; 4], f64) {
    let d = [
        [x[1][0] - x[0][0], x[1][1] - x[0][1], x[1][2] - x[0][2]],
        [x[2][0] - x[0][0], x[2][1] - x[0][1], x[2][2] - x[0][2]],
        [x[3][0] - x[0][0], x[3][1] - x[0][1], x[3][2] - x[0][2]],
    ];
    // det of the edge matrix with edges as columns
    let det = d[0][0] * (d[1][1] * d[2][2] - d[1][2] * d[2][1])
        - d[1][0] * (d[0][1] * d[2][2] - d[0][2] * d[2][1])
        + d[2][0] * (d[0][1] * d[1][2] - d[0][2] * d[1][1]);
    // rows of the inverse of [d1 d2 d3] (edges as columns) are the gradients
    // of barycentric coordinates 1..3: d2xd3, d3xd1, d1xd2 over the det
    let inv = [
        [
            (d[1][1] * d[2][2] - d[1][2] * d[2][1]) / det,
            (d[1][2] * d[2][0] - d[1][0] * d[2][2]) / det,
            (d[1][0] * d[2][1] - d[1][1] * d[2][0]) / det,
        ],
        [
            (d[2][1] * d[0][2] - d[2][2] * d[0][1]) / det,
            (d[2][2] * d[0][0] - d[2][0] * d[0][2]) / det,
            (d[2][0] * d[0][1] - d[2][1] * d[0][0]) / det,
        ],
        [
            (d[0][1] * d[1][2] - d[0][2] * d[1][1]) / det,
            (d[0][2] * d[1][0] - d[0][0] * d[1][2]) / det,
            (d[0][0] * d[1][1] - d[0][1] * d[1][0]) / det,
        ],
    ];
    let mut g = [[0.0; 3]; 4];
    for i in 0..3 {
        for c in 0..3 {
            g[i + 1][c] = inv[i][c];
            g[0][c] -= inv[i][c];
        }
    }
    (g, det / 6.0)
}

pub(crate) fn tet_coords(mesh: &Mesh3D, e: usize) -> [[f64; 3]; 4] {
    let t = mesh.tet(e);
    [
        mesh.vertex(t[0] as usize),
        mesh.vertex(t[1] as usize),
        mesh.vertex(t[2] as usize),
        mesh.vertex(t[3] as usize),
    ]
}

/// ∫ w ∇u·∇v over the volume mesh.
pub fn stiffness_3d(mesh: &Mesh3D, w: f64) -> CsrMatrix {
    let n = mesh.n_vertices();
    let mut b = CooBuilder::with_capacity(n, n, 16 * mesh.n_tets());
    for e in 0..mesh.n_tets() {
        let t = mesh.tet(e);
        let (g, vol) = tet_gradients(tet_coords(mesh, e));
        for i in 0..4 {
            for j in 0..4 {
                let dot = g[i][0] * g[j][0] + g[i][1] * g[j][1] + g[i][2] * g[j][2];
                b.push(t[i] as usize, t[j] as usize, w * vol * dot);
            }
        }
    }
    b.build()
}

/// ∫ w u v over the volume mesh.
pub fn mass_3d(mesh: &Mesh3D, w: f64) -> CsrMatrix {
    let n = mesh.n_vertices();
    let mut b = CooBuilder::with_capacity(n, n, 16 * mesh.n_tets());
    for e in 0..mesh.n_tets() {
        let t = mesh.tet(e);
        let vol = mesh.tet_volume(e);
        for i in 0..4 {
            for j in 0..4 {
                let m = if i == j { vol / 10.0 } else { vol / 20.0 };
                b.push(t[i] as usize, t[j] as usize, w * m);
            }
        }
    }
    b.build()
}

/// ∫ w f v over the volume mesh, degree-5 quadrature per element.
pub fn load_3d(mesh: &Mesh3D, w: f64, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
    let rule = tet_rule_14();
    let mut rhs = vec![0.0; mesh.n_vertices()];
    for e in 0..mesh.n_tets() {
        let t = mesh.tet(e);
        let x = tet_coords(mesh, e);
        let vol = mesh.tet_volume(e);
        for q in &rule {
            let mut p = [0.0; 3];
            for i in 0..4 {
                for c in 0..3 {
                    p[c] += q.bary[i] * x[i][c];
                }
            }
            let fv = w * f(p) * vol * q.weight;
            for i in 0..4 {
                rhs[t[i] as usize] += fv * q.bary[i];
            }
        }
    }
    rhs
}

/// ∫ w u′ v′ over the line mesh.
pub fn stiffness_1d(mesh: &Mesh1D, w: &Weight) -> CsrMatrix {
    let n = mesh.n_vertices();
    let mut b = CooBuilder::with_capacity(n, n, 4 * mesh.n_segments());
    let rule = gauss_01(3);
    let h = mesh.h();
    for e in 0..mesh.n_segments() {
        let z0 = mesh.vertex(e);
        let mut wint = 0.0;
        for q in &rule {
            wint += q.1 * w.at(z0 + q.0 * h) * h;
        }
        let k = wint / (h * h);
        b.push(e, e, k);
        b.push(e + 1, e + 1, k);
        b.push(e, e + 1, -k);
        b.push(e + 1, e, -k);
    }
    b.build()
}

/// ∫ w u v over the line mesh.
pub fn mass_1d(mesh: &Mesh1D, w: &Weight) -> CsrMatrix {
    let n = mesh.n_vertices();
    let mut b = CooBuilder::with_capacity(n, n, 4 * mesh.n_segments());
    let rule = gauss_01(3);
    let h = mesh.h();
    for e in 0..mesh.n_segments() {
        let z0 = mesh.vertex(e);
        let mut local = [[0.0; 2]; 2];
        for q in &rule {
            let wq = q.1 * w.at(z0 + q.0 * h) * h;
            let phi = [1.0 - q.0, q.0];
            for i in 0..2 {
                for j in 0..2 {
                    local[i][j] += wq * phi[i] * phi[j];
                }
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                b.push(e + i, e + j, local[i][j]);
            }
        }
    }
    b.build()
}

/// ∫ w f v over the line mesh, 4-point Gauss per segment.
pub fn load_1d(mesh: &Mesh1D, w: &Weight, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let rule = gauss_01(4);
    let mut rhs = vec![0.0; mesh.n_vertices()];
    let h = mesh.h();
    for e in 0..mesh.n_segments() {
        let z0 = mesh.vertex(e);
        for q in &rule {
            let z = z0 + q.0 * h;
            let fv = q.1 * w.at(z) * f(z) * h;
            rhs[e] += fv * (1.0 - q.0);
            rhs[e + 1] += fv * q.0;
        }
    }
    rhs
}

fn tri_coords(surf: &SurfaceMesh2D, t: usize) -> [[f64; 3]; 3] {
    let tri = surf.triangle(t);
    [
        surf.position(tri[0] as usize),
        surf.position(tri[1] as usize),
        surf.position(tri[2] as usize),
    ]
}

/// ∫ w ∇u·∇v over the surface mesh, with the in-plane gradient.
pub fn stiffness_surface(surf: &SurfaceMesh2D, w: f64) -> CsrMatrix {
    let n = surf.n_vertices();
    let mut b = CooBuilder::with_capacity(n, n, 9 * surf.n_triangles());
    for t in 0..surf.n_triangles() {
        let tri = surf.triangle(t);
        let x = tri_coords(surf, t);
        let area = surf.triangle_area(t);
        // edge vector opposite each vertex; in-plane gradients satisfy
        // grad(phi_i).grad(phi_j) = e_i.e_j / (4 area^2)
        let mut e = [[0.0; 3]; 3];
        for i in 0..3 {
            let a = x[(i + 1) % 3];
            let b2 = x[(i + 2) % 3];
            for c in 0..3 {
                e[i][c] = b2[c] - a[c];
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                let dot = e[i][0] * e[j][0] + e[i][1] * e[j][1] + e[i][2] * e[j][2];
                b.push(tri[i] as usize, tri[j] as usize, w * dot / (4.0 * area));
            }
        }
    }
    b.build()
}

/// ∫ w u v over the surface mesh.
pub fn mass_surface(surf: &SurfaceMesh2D, w: f64) -> CsrMatrix {
    let n = surf.n_vertices();
    let mut b = CooBuilder::with_capacity(n, n, 9 * surf.n_triangles());
    for t in 0..surf.n_triangles() {
        let tri = surf.triangle(t);
        let area = surf.triangle_area(t);
        for i in 0..3 {
            for j in 0..3 {
                let m = if i == j { area / 6.0 } else { area / 12.0 };
                b.push(tri[i] as usize, tri[j] as usize, w * m);
            }
        }
    }
    b.build()
}

/// ∫ w f v over the surface mesh, degree-4 quadrature per triangle.
pub fn load_surface(surf: &SurfaceMesh2D, w: f64, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
    let rule = tri_rule_6();
    let mut rhs = vec![0.0; surf.n_vertices()];
    for t in 0..surf.n_triangles() {
        let tri = surf.triangle(t);
        let x = tri_coords(surf, t);
        let area = surf.triangle_area(t);
        for q in &rule {
            let mut p = [0.0; 3];
            for i in 0..3 {
                for c in 0..3 {
                    p[c] += q.bary[i] * x[i][c];
                }
            }
            let fv = w * f(p) * area * q.weight;
            for i in 0..3 {
                rhs[tri[i] as usize] += fv * q.bary[i];
            }
        }
    }
    rhs
}

/// Diagonal mass matrix of the piecewise-constant space on the cut set,
/// integrating w over each element's assigned line segments.
pub fn mass_p0_line(cut: &LineIntersection, w: &Weight) -> CsrMatrix {
    let n = cut.n_cut();
    let mut diag = vec![0.0; n];
    let rule = gauss_01(3);
    for s in cut.segments() {
        let row = cut
            .row_of(s.element)
            .expect("segment owners are members of the cut set");
        let len = s.z1 - s.z0;
        for q in &rule {
            diag[row] += q.1 * w.at(s.z0 + q.0 * len) * len;
        }
    }
    let mut b = CooBuilder::new(n, n);
    for (i, &d) in diag.iter().enumerate() {
        b.push(i, i, d);
    }
    b.build()
}
