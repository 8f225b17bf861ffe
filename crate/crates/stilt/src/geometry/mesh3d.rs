//! Tetrahedral meshes of axis-aligned boxes.
//!
//! Each grid box is split into six tetrahedra, one per permutation of the
//! coordinate axes, all sharing the box diagonal from the minimal to the
//! maximal corner. Point location reduces to sorting the local coordinates of
//! the query point, which makes it exact and cheap.

use crate::{Error, Result};
use std::io::Write as _;
use std::path::Path;

/// Axis permutations in a fixed order; tetrahedron `6 c + p` of box `c` uses
/// permutation `PERMS[p]`.
pub const PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Parity of each permutation in [`PERMS`]; odd ones swap two local vertices
/// to keep the tetrahedron positively oriented.
const PERM_ODD: [bool; 6] = [false, true, true, false, false, true];

/// Conforming tetrahedral mesh of the box `[0, L0] x [0, L1] x [0, L2]`.
#[derive(Debug, Clone)]
pub struct Mesh3D {
    lengths: [f64; 3],
    divisions: [usize; 3],
    vertices: Vec<[f64; 3]>,
    tets: Vec<[u32; 4]>,
}

impl Mesh3D {
    /// Uniform mesh with `divisions[d]` boxes along axis `d`.
    pub fn uniform_box(lengths: [f64; 3], divisions: [usize; 3]) -> Result<Self> {
        for d in 0..3 {
            if !(lengths[d] > 0.0) || divisions[d] == 0 {
                return Err(Error::InvalidParameter(format!(
                    "mesh needs positive lengths and divisions, got length {} and {} boxes on axis {d}",
                    lengths[d], divisions[d]
                )));
            }
        }
        let [nx, ny, nz] = divisions;
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
        for k in 0..=nz {
            for j in 0..=ny {
                for i in 0..=nx {
                    vertices.push([
                        lengths[0] * i as f64 / nx as f64,
                        lengths[1] * j as f64 / ny as f64,
                        lengths[2] * k as f64 / nz as f64,
                    ]);
                }
            }
        }
        let vid = |i: usize, j: usize, k: usize| -> u32 {
            (i + j * (nx + 1) + k * (nx + 1) * (ny + 1)) as u32
        };
        let mut tets = Vec::with_capacity(6 * nx * ny * nz);
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    for (p, perm) in PERMS.iter().enumerate() {
                        // corner offsets along the path 0 -> e_p0 -> e_p0+e_p1 -> (1,1,1)
                        let mut c1 = [0usize; 3];
                        c1[perm[0]] = 1;
                        let mut c2 = c1;
                        c2[perm[1]] = 1;
                        let mut w = [
                            vid(i, j, k),
                            vid(i + c1[0], j + c1[1], k + c1[2]),
                            vid(i + c2[0], j + c2[1], k + c2[2]),
                            vid(i + 1, j + 1, k + 1),
                        ];
                        if PERM_ODD[p] {
                            w.swap(1, 2);
                        }
                        tets.push(w);
                    }
                }
            }
        }
        Ok(Mesh3D {
            lengths,
            divisions,
            vertices,
            tets,
        })
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.lengths
    }

    pub fn divisions(&self) -> [usize; 3] {
        self.divisions
    }

    /// Box widths per axis.
    pub fn spacings(&self) -> [f64; 3] {
        [
            self.lengths[0] / self.divisions[0] as f64,
            self.lengths[1] / self.divisions[1] as f64,
            self.lengths[2] / self.divisions[2] as f64,
        ]
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_tets(&self) -> usize {
        self.tets.len()
    }

    pub fn vertex(&self, v: usize) -> [f64; 3] {
        self.vertices[v]
    }

    pub fn tet(&self, e: usize) -> [u32; 4] {
        self.tets[e]
    }

    /// Vertex index from grid coordinates.
    pub fn grid_vertex(&self, i: usize, j: usize, k: usize) -> usize {
        let [nx, ny, _] = self.divisions;
        i + j * (nx + 1) + k * (nx + 1) * (ny + 1)
    }

    /// Box index from grid coordinates.
    pub fn box_index(&self, i: usize, j: usize, k: usize) -> usize {
        let [nx, ny, _] = self.divisions;
        i + j * nx + k * nx * ny
    }

    /// Signed volume of a tetrahedron; positive for all elements built here.
    pub fn tet_volume(&self, e: usize) -> f64 {
        let t = self.tets[e];
        let a = self.vertices[t[0] as usize];
        let b = self.vertices[t[1] as usize];
        let c = self.vertices[t[2] as usize];
        let d = self.vertices[t[3] as usize];
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        let w = [d[0] - a[0], d[1] - a[1], d[2] - a[2]];
        (u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
            + u[2] * (v[0] * w[1] - v[1] * w[0]))
            / 6.0
    }

    /// Locates a point, returning the element index and its barycentric
    /// coordinates there. Points on shared faces resolve to the first
    /// matching permutation, so location is deterministic.
    pub fn locate(&self, p: [f64; 3]) -> Result<(usize, [f64; 4])> {
        let [nx, ny, nz] = self.divisions;
        let h = self.spacings();
        let mut idx = [0usize; 3];
        let mut c = [0f64; 3];
        for d in 0..3 {
            let tol = 1e-12 * self.lengths[d].max(1.0);
            if p[d] < -tol || p[d] > self.lengths[d] + tol {
                return Err(Error::PointLocation(p[0], p[1], p[2]));
            }
            let scaled = (p[d] / h[d]).clamp(0.0, self.divisions_f(d));
            let mut i = scaled.floor() as usize;
            if i >= self.divisions[d] {
                i = self.divisions[d] - 1;
            }
            idx[d] = i;
            c[d] = (scaled - i as f64).clamp(0.0, 1.0);
        }
        let _ = (nx, ny, nz);
        for (pi, perm) in PERMS.iter().enumerate() {
            let (a, b, cc) = (c[perm[0]], c[perm[1]], c[perm[2]]);
            if a >= b && b >= cc {
                let mut bary = [1.0 - a, a - b, b - cc, cc];
                if PERM_ODD[pi] {
                    bary.swap(1, 2);
                }
                let e = 6 * self.box_index(idx[0], idx[1], idx[2]) + pi;
                return Ok((e, bary));
            }
        }
        unreachable!("some axis ordering always holds");
    }

    fn divisions_f(&self, d: usize) -> f64 {
        self.divisions[d] as f64
    }

    /// Evaluates a vertex-valued field at a point by linear interpolation.
    pub fn evaluate_point(&self, u: &[f64], p: [f64; 3]) -> Result<f64> {
        assert_eq!(u.len(), self.n_vertices());
        let (e, bary) = self.locate(p)?;
        let t = self.tets[e];
        Ok((0..4).map(|i| bary[i] * u[t[i] as usize]).sum())
    }

    /// True for vertices on the boundary of the box.
    pub fn boundary_mask(&self) -> Vec<bool> {
        let tol = 1e-12;
        self.vertices
            .iter()
            .map(|v| {
                (0..3).any(|d| v[d] <= tol * self.lengths[d] || v[d] >= self.lengths[d] * (1.0 - tol))
            })
            .collect()
    }

    /// Writes the mesh as a plain text listing of vertices and cells.
    pub fn write_text(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str(&format!("vertices {} tets {}\n", self.n_vertices(), self.n_tets()));
        for v in &self.vertices {
            out.push_str(&format!("{:.17e} {:.17e} {:.17e}\n", v[0], v[1], v[2]));
        }
        for t in &self.tets {
            out.push_str(&format!("{} {} {} {}\n", t[0], t[1], t[2], t[3]));
        }
        let mut f =
            std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        f.write_all(out.as_bytes())
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn volumes_are_positive_and_fill_the_box() {
        let m = Mesh3D::uniform_box([1.0, 2.0, 0.5], [2, 3, 4]).unwrap();
        let mut total = 0.0;
        for e in 0..m.n_tets() {
            let v = m.tet_volume(e);
            assert!(v > 0.0, "element {e} has volume {v}");
            total += v;
        }
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
        assert_eq!(m.n_vertices(), 3 * 4 * 5);
        assert_eq!(m.n_tets(), 6 * 2 * 3 * 4);
    }

    #[test]
    fn locate_reproduces_vertex_positions() {
        let m = Mesh3D::uniform_box([1.0, 1.0, 1.0], [3, 3, 3]).unwrap();
        for v in 0..m.n_vertices() {
            let p = m.vertex(v);
            let (e, bary) = m.locate(p).unwrap();
            let t = m.tet(e);
            let mut q = [0.0; 3];
            for i in 0..4 {
                let x = m.vertex(t[i] as usize);
                for d in 0..3 {
                    q[d] += bary[i] * x[d];
                }
            }
            for d in 0..3 {
                assert_relative_eq!(q[d], p[d], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn locate_is_exact_for_interior_points() {
        let m = Mesh3D::uniform_box([1.0, 1.0, 1.0], [4, 4, 4]).unwrap();
        let mut rng_state = 12345u64;
        let mut next = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng_state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let p = [next(), next(), next()];
            let (e, bary) = m.locate(p).unwrap();
            assert!(bary.iter().all(|&b| (-1e-14..=1.0 + 1e-14).contains(&b)));
            assert_relative_eq!(bary.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            let t = m.tet(e);
            let mut q = [0.0; 3];
            for i in 0..4 {
                let x = m.vertex(t[i] as usize);
                for d in 0..3 {
                    q[d] += bary[i] * x[d];
                }
            }
            for d in 0..3 {
                assert_relative_eq!(q[d], p[d], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn linear_fields_interpolate_exactly() {
        let m = Mesh3D::uniform_box([1.0, 1.0, 1.0], [2, 2, 2]).unwrap();
        let f = |p: [f64; 3]| 2.0 * p[0] - 3.0 * p[1] + 0.5 * p[2] + 1.0;
        let u: Vec<f64> = (0..m.n_vertices()).map(|v| f(m.vertex(v))).collect();
        for p in [[0.3, 0.7, 0.1], [0.5, 0.5, 0.5], [0.99, 0.01, 0.73]] {
            assert_relative_eq!(m.evaluate_point(&u, p).unwrap(), f(p), epsilon = 1e-13);
        }
    }

    #[test]
    fn outside_points_are_rejected() {
        let m = Mesh3D::uniform_box([1.0, 1.0, 1.0], [2, 2, 2]).unwrap();
        assert!(m.locate([1.5, 0.5, 0.5]).is_err());
        assert!(m.locate([0.5, -0.1, 0.5]).is_err());
    }

    #[test]
    fn boundary_mask_counts_shell_vertices() {
        let m = Mesh3D::uniform_box([1.0, 1.0, 1.0], [4, 4, 4]).unwrap();
        let mask = m.boundary_mask();
        let n_boundary = mask.iter().filter(|&&b| b).count();
        assert_eq!(n_boundary, 125 - 27);
    }

    #[test]
    fn neighboring_tets_share_faces_conformally() {
        // every interior face must appear exactly twice, boundary faces once
        let m = Mesh3D::uniform_box([1.0, 1.0, 1.0], [2, 2, 2]).unwrap();
        use std::collections::HashMap;
        let mut faces: HashMap<[u32; 3], usize> = HashMap::new();
        for e in 0..m.n_tets() {
            let t = m.tet(e);
            for skip in 0..4 {
                let mut f: Vec<u32> = (0..4).filter(|&i| i != skip).map(|i| t[i]).collect();
                f.sort_unstable();
                *faces.entry([f[0], f[1], f[2]]).or_insert(0) += 1;
            }
        }
        let mut boundary_area = 0.0;
        for (f, count) in &faces {
            assert!(*count == 1 || *count == 2);
            if *count == 1 {
                let a = m.vertex(f[0] as usize);
                let b = m.vertex(f[1] as usize);
                let c = m.vertex(f[2] as usize);
                let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
                let cx = u[1] * v[2] - u[2] * v[1];
                let cy = u[2] * v[0] - u[0] * v[2];
                let cz = u[0] * v[1] - u[1] * v[0];
                boundary_area += 0.5 * (cx * cx + cy * cy + cz * cz).sqrt();
            }
        }
        assert_relative_eq!(boundary_area, 6.0, epsilon = 1e-12);
    }
}
