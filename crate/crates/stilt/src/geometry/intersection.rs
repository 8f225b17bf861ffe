//! Intersection of a vertical line with a tetrahedral mesh.
//!
//! The cut set holds every element whose closure meets the line, including
//! elements that touch it only at a point; this is what makes the
//! piecewise-constant multiplier space singular without stabilization. For
//! quadrature, the line is split into maximal sub-intervals interior to a
//! single element, and each sub-interval on a shared face is assigned to the
//! incident element with the smaller index so assembly is deterministic.

use super::mesh3d::{Mesh3D, PERMS};
use crate::{Error, Result};
use std::collections::HashMap;

/// Maximal straight piece of the line interior to one element.
#[derive(Debug, Clone, Copy)]
pub struct OwnedSegment {
    pub z0: f64,
    pub z1: f64,
    /// Element assigned for quadrature.
    pub element: usize,
}

/// Face shared by two elements of the cut set.
#[derive(Debug, Clone, Copy)]
pub struct InternalFace {
    /// Rows (positions within the sorted cut set) of the incident elements.
    pub a: usize,
    pub b: usize,
    pub area: f64,
}

/// Decomposition of a vertical line against a [`Mesh3D`].
#[derive(Debug, Clone)]
pub struct LineIntersection {
    xy: [f64; 2],
    cut_tets: Vec<usize>,
    row_of: HashMap<usize, usize>,
    segments: Vec<OwnedSegment>,
    internal_faces: Vec<InternalFace>,
}

impl LineIntersection {
    /// Decomposes the vertical line through `(x0, y0)` spanning the full
    /// height of the mesh.
    pub fn vertical(mesh: &Mesh3D, xy: [f64; 2]) -> Result<Self> {
        let [lx, ly, lz] = mesh.lengths();
        if !(xy[0] > 0.0 && xy[0] < lx && xy[1] > 0.0 && xy[1] < ly) {
            return Err(Error::InvalidParameter(format!(
                "line anchor ({}, {}) must lie strictly inside the horizontal section",
                xy[0], xy[1]
            )));
        }
        let h = mesh.spacings();
        let nz = mesh.divisions()[2];
        let tol = 1e-12 * lz.max(1.0);

        // candidate box columns and the local in-plane coordinates there
        let plane_candidates = |coord: f64, axis: usize| -> Vec<(usize, f64)> {
            let scaled = coord / h[axis];
            let n = mesh.divisions()[axis];
            let near = scaled.round();
            if (scaled - near).abs() < 1e-12 && near >= 1.0 && (near as usize) <= n - 1 {
                let i = near as usize;
                vec![(i - 1, 1.0), (i, 0.0)]
            } else {
                let mut i = scaled.floor() as usize;
                if i >= n {
                    i = n - 1;
                }
                vec![(i, scaled - i as f64)]
            }
        };
        let cand_x = plane_candidates(xy[0], 0);
        let cand_y = plane_candidates(xy[1], 1);

        // heights where the element containing the line can change: grid
        // planes plus crossings of the two diagonal plane families that
        // involve the vertical coordinate
        let mut breaks: Vec<f64> = Vec::new();
        for k in 0..=nz {
            breaks.push(k as f64 * h[2]);
        }
        for &(_, c) in cand_x.iter().chain(cand_y.iter()) {
            if c > 1e-12 && c < 1.0 - 1e-12 {
                for k in 0..nz {
                    breaks.push((k as f64 + c) * h[2]);
                }
            }
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup_by(|a, b| (*a - *b).abs() < tol);

        let mut cut_set: Vec<usize> = Vec::new();
        let mut segments = Vec::new();

        // closed-membership at a point: every permutation whose ordering
        // holds non-strictly in some candidate box
        let collect_at = |z: f64, cut_set: &mut Vec<usize>| {
            let scaled = z / h[2];
            let near = scaled.round();
            let cand_z: Vec<(usize, f64)> =
                if (scaled - near).abs() < 1e-12 && near >= 1.0 && (near as usize) <= nz - 1 {
                    let k = near as usize;
                    vec![(k - 1, 1.0), (k, 0.0)]
                } else {
                    let mut k = scaled.floor() as usize;
                    if k >= nz {
                        k = nz - 1;
                    }
                    vec![(k, (scaled - k as f64).clamp(0.0, 1.0))]
                };
            for &(i, cx) in &cand_x {
                for &(j, cy) in &cand_y {
                    for &(k, cz) in &cand_z {
                        let c = [cx, cy, cz];
                        for (p, perm) in PERMS.iter().enumerate() {
                            if c[perm[0]] >= c[perm[1]] && c[perm[1]] >= c[perm[2]] {
                                cut_set.push(6 * mesh.box_index(i, j, k) + p);
                            }
                        }
                    }
                }
            }
        };

        for w in breaks.windows(2) {
            let (za, zb) = (w[0], w[1]);
            if zb - za <= tol {
                continue;
            }
            let zm = 0.5 * (za + zb);
            let k = {
                let mut k = (zm / h[2]).floor() as usize;
                if k >= nz {
                    k = nz - 1;
                }
                k
            };
            let cz = zm / h[2] - k as f64;
            // the owner is the first permutation whose ordering holds; ties
            // mean the segment lies on a shared face and the smaller element
            // index wins
            let mut owner: Option<usize> = None;
            for &(i, cx) in &cand_x {
                for &(j, cy) in &cand_y {
                    let c = [cx, cy, cz];
                    for (p, perm) in PERMS.iter().enumerate() {
                        if c[perm[0]] >= c[perm[1]] && c[perm[1]] >= c[perm[2]] {
                            let e = 6 * mesh.box_index(i, j, k) + p;
                            cut_set.push(e);
                            owner = Some(owner.map_or(e, |o: usize| o.min(e)));
                        }
                    }
                }
            }
            let element = owner.ok_or_else(|| {
                Error::PointLocation(xy[0], xy[1], zm)
            })?;
            segments.push(OwnedSegment { z0: za, z1: zb, element });
        }
        for &z in &breaks {
            collect_at(z, &mut cut_set);
        }

        cut_set.sort_unstable();
        cut_set.dedup();
        let row_of: HashMap<usize, usize> =
            cut_set.iter().enumerate().map(|(r, &e)| (e, r)).collect();

        // faces shared by two cut elements
        let mut face_rows: HashMap<[u32; 3], Vec<usize>> = HashMap::new();
        for (row, &e) in cut_set.iter().enumerate() {
            let t = mesh.tet(e);
            for skip in 0..4 {
                let mut f: Vec<u32> = (0..4).filter(|&i| i != skip).map(|i| t[i]).collect();
                f.sort_unstable();
                face_rows.entry([f[0], f[1], f[2]]).or_default().push(row);
            }
        }
        let mut internal_faces: Vec<InternalFace> = Vec::new();
        for (f, rows) in &face_rows {
            if rows.len() == 2 {
                let pa = mesh.vertex(f[0] as usize);
                let pb = mesh.vertex(f[1] as usize);
                let pc = mesh.vertex(f[2] as usize);
                let u = [pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]];
                let v = [pc[0] - pa[0], pc[1] - pa[1], pc[2] - pa[2]];
                let cx = u[1] * v[2] - u[2] * v[1];
                let cy = u[2] * v[0] - u[0] * v[2];
                let cz = u[0] * v[1] - u[1] * v[0];
                let area = 0.5 * (cx * cx + cy * cy + cz * cz).sqrt();
                let (a, b) = (rows[0].min(rows[1]), rows[0].max(rows[1]));
                internal_faces.push(InternalFace { a, b, area });
            }
        }
        internal_faces.sort_by_key(|f| (f.a, f.b));

        Ok(LineIntersection {
            xy,
            cut_tets: cut_set,
            row_of,
            segments,
            internal_faces,
        })
    }

    /// Planar anchor of the line.
    pub fn xy(&self) -> [f64; 2] {
        self.xy
    }

    /// Elements whose closure meets the line, sorted ascending.
    pub fn cut_tets(&self) -> &[usize] {
        &self.cut_tets
    }

    /// Number of cut elements, the dimension of the P0 multiplier space.
    pub fn n_cut(&self) -> usize {
        self.cut_tets.len()
    }

    /// Row of an element within the cut set.
    pub fn row_of(&self, element: usize) -> Option<usize> {
        self.row_of.get(&element).copied()
    }

    /// Quadrature sub-intervals with their assigned elements.
    pub fn segments(&self) -> &[OwnedSegment] {
        &self.segments
    }

    /// Faces interior to the cut patch.
    pub fn internal_faces(&self) -> &[InternalFace] {
        &self.internal_faces
    }
}
