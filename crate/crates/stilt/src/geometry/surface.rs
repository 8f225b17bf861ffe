//! Triangulated lateral surface of an embedded box cylinder.
//!
//! The surface is built from the 3D grid structure so that every triangle is
//! a face of some tetrahedron of the volume mesh. Rectangles are split along
//! the diagonal that runs from the grid-minimal to the grid-maximal corner,
//! matching the volume split, which makes the trace of a piecewise linear
//! volume field piecewise linear on this mesh.

use super::{CrossSection, Mesh3D};
use crate::{Error, Result};
use std::io::Write as _;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct SurfaceMesh2D {
    section: CrossSection,
    height: f64,
    n_per: usize,
    n_z: usize,
    positions: Vec<[f64; 3]>,
    /// Volume mesh vertex under each surface vertex.
    vol_vertex: Vec<u32>,
    triangles: Vec<[u32; 3]>,
}

impl SurfaceMesh2D {
    /// Extracts the lateral surface of `section x [0, height]` from a volume
    /// mesh whose grid lines contain the section corners.
    pub fn from_mesh(mesh: &Mesh3D, section: CrossSection) -> Result<Self> {
        let h = mesh.spacings();
        let height = mesh.lengths()[2];
        let n_z = mesh.divisions()[2];

        // grid indices of each perimeter vertex, plus whether the grid axis
        // increases along the outgoing perimeter segment
        let mut per_grid: Vec<(usize, usize)> = Vec::new();
        let mut seg_axis_up: Vec<bool> = Vec::new();
        for side in section.sides() {
            let axis = if side.dir[0].abs() > 0.5 { 0 } else { 1 };
            let steps_f = side.len / h[axis];
            let steps = steps_f.round() as usize;
            if (steps_f - steps as f64).abs() > 1e-9 || steps == 0 {
                return Err(Error::InvalidParameter(format!(
                    "section side of length {} is not a whole number of grid steps {}",
                    side.len, h[axis]
                )));
            }
            let gi_f = side.start[0] / h[0];
            let gj_f = side.start[1] / h[1];
            let (mut gi, mut gj) = (gi_f.round() as i64, gj_f.round() as i64);
            if (gi_f - gi as f64).abs() > 1e-9 || (gj_f - gj as f64).abs() > 1e-9 {
                return Err(Error::InvalidParameter(
                    "section corner is not on a grid vertex".into(),
                ));
            }
            let up = side.dir[axis] > 0.0;
            let step = if up { 1 } else { -1 };
            for _ in 0..steps {
                per_grid.push((gi as usize, gj as usize));
                seg_axis_up.push(up);
                if axis == 0 {
                    gi += step;
                } else {
                    gj += step;
                }
            }
        }
        let n_per = per_grid.len();

        let mut positions = Vec::with_capacity(n_per * (n_z + 1));
        let mut vol_vertex = Vec::with_capacity(n_per * (n_z + 1));
        for k in 0..=n_z {
            for &(gi, gj) in &per_grid {
                let v = mesh.grid_vertex(gi, gj, k);
                vol_vertex.push(v as u32);
                positions.push(mesh.vertex(v));
            }
        }

        let idx = |i_per: usize, k: usize| (i_per % n_per + k * n_per) as u32;
        let mut triangles = Vec::with_capacity(2 * n_per * n_z);
        for k in 0..n_z {
            for i in 0..n_per {
                let v00 = idx(i, k);
                let v10 = idx(i + 1, k);
                let v01 = idx(i, k + 1);
                let v11 = idx(i + 1, k + 1);
                if seg_axis_up[i] {
                    // diagonal from the grid-minimal corner (i, k)
                    triangles.push([v00, v10, v11]);
                    triangles.push([v00, v11, v01]);
                } else {
                    // grid-minimal corner is (i + 1, k)
                    triangles.push([v10, v01, v00]);
                    triangles.push([v10, v11, v01]);
                }
            }
        }

        Ok(SurfaceMesh2D {
            section,
            height,
            n_per,
            n_z,
            positions,
            vol_vertex,
            triangles,
        })
    }

    pub fn section(&self) -> CrossSection {
        self.section
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    /// Perimeter vertices per horizontal ring.
    pub fn n_per(&self) -> usize {
        self.n_per
    }

    /// Vertical layers of rectangles.
    pub fn n_layers(&self) -> usize {
        self.n_z
    }

    pub fn n_vertices(&self) -> usize {
        self.positions.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn position(&self, v: usize) -> [f64; 3] {
        self.positions[v]
    }

    /// Height of a surface vertex.
    pub fn z_of(&self, v: usize) -> f64 {
        self.positions[v][2]
    }

    /// Volume mesh vertex under surface vertex `v`.
    pub fn volume_vertex(&self, v: usize) -> usize {
        self.vol_vertex[v] as usize
    }

    pub fn triangle(&self, t: usize) -> [u32; 3] {
        self.triangles[t]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let pa = self.positions[a as usize];
        let pb = self.positions[b as usize];
        let pc = self.positions[c as usize];
        let u = [pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]];
        let v = [pc[0] - pa[0], pc[1] - pa[1], pc[2] - pa[2]];
        let cx = u[1] * v[2] - u[2] * v[1];
        let cy = u[2] * v[0] - u[0] * v[2];
        let cz = u[0] * v[1] - u[1] * v[0];
        0.5 * (cx * cx + cy * cy + cz * cz).sqrt()
    }

    /// Writes the mesh as a plain text listing of vertices and cells.
    pub fn write_text(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str(&format!(
            "vertices {} triangles {}\n",
            self.n_vertices(),
            self.n_triangles()
        ));
        for p in &self.positions {
            out.push_str(&format!("{:.17e} {:.17e} {:.17e}\n", p[0], p[1], p[2]));
        }
        for t in &self.triangles {
            out.push_str(&format!("{} {} {}\n", t[0], t[1], t[2]));
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
    use std::collections::HashSet;

    fn benchmark_surface(n: usize) -> (Mesh3D, SurfaceMesh2D) {
        let mesh = Mesh3D::uniform_box([1.0, 1.0, 1.0], [n, n, n]).unwrap();
        let section = CrossSection::square([0.5, 0.5], 0.25);
        let surf = SurfaceMesh2D::from_mesh(&mesh, section).unwrap();
        (mesh, surf)
    }

    #[test]
    fn vertex_and_triangle_counts() {
        let (_, surf) = benchmark_surface(4);
        assert_eq!(surf.n_per(), 8);
        assert_eq!(surf.n_vertices(), 2 * 4 * (4 + 1));
        assert_eq!(surf.n_triangles(), 2 * 8 * 4);
    }

    #[test]
    fn total_area_is_perimeter_times_height() {
        let (_, surf) = benchmark_surface(8);
        let area: f64 = (0..surf.n_triangles()).map(|t| surf.triangle_area(t)).sum();
        assert_relative_eq!(area, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn every_triangle_is_a_tetrahedron_face() {
        let (mesh, surf) = benchmark_surface(4);
        let mut faces: HashSet<[u32; 3]> = HashSet::new();
        for e in 0..mesh.n_tets() {
            let t = mesh.tet(e);
            for skip in 0..4 {
                let mut f: Vec<u32> = (0..4).filter(|&i| i != skip).map(|i| t[i]).collect();
                f.sort_unstable();
                faces.insert([f[0], f[1], f[2]]);
            }
        }
        for t in 0..surf.n_triangles() {
            let tri = surf.triangle(t);
            let mut f: Vec<u32> = tri
                .iter()
                .map(|&v| surf.volume_vertex(v as usize) as u32)
                .collect();
            f.sort_unstable();
            assert!(
                faces.contains(&[f[0], f[1], f[2]]),
                "surface triangle {t} is not a volume face"
            );
        }
    }

    #[test]
    fn surface_positions_match_volume_positions() {
        let (mesh, surf) = benchmark_surface(4);
        for v in 0..surf.n_vertices() {
            let p = surf.position(v);
            let q = mesh.vertex(surf.volume_vertex(v));
            assert_eq!(p, q);
        }
    }

    #[test]
    fn misaligned_section_is_rejected() {
        let mesh = Mesh3D::uniform_box([1.0, 1.0, 1.0], [5, 5, 5]).unwrap();
        let section = CrossSection::square([0.5, 0.5], 0.25);
        assert!(SurfaceMesh2D::from_mesh(&mesh, section).is_err());
    }
}
