//! Coupling operators between the 3D field, the 1D field, and the
//! multiplier spaces.
//!
//! The surface formulation pairs traces on the cylinder surface with a
//! surface multiplier. The line formulations pair the ring average of the 3D
//! field with a multiplier on the line, weighted by the ring perimeter; the
//! perimeter weight against the averaged trace reduces to a plain ring
//! integral. Ring and line integrals subdivide at every element crossing so
//! Gauss rules are exact for piecewise-linear integrands.

use crate::fem::assembly::{mass_surface, Weight};
use crate::fem::quadrature::gauss_01;
use crate::fem::sparse::{CooBuilder, CsrMatrix};
use crate::geometry::{CrossSection, LineIntersection, Mesh1D, Mesh3D, SurfaceMesh2D};
use crate::{Error, Result};

/// Field a coupling block acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimalField {
    Volume,
    Segment,
}

/// One rectangular block of the constraint rows.
pub struct CouplingBlock {
    /// (multiplier dim) × (primal dim).
    pub matrix: CsrMatrix,
    pub field: PrimalField,
    /// Sign the block carries inside the constraint `B_u u − B_w w = d`.
    pub sign: f64,
}

/// Multiplier space for the line coupling.
pub enum MultiplierSpace1D<'a> {
    /// Continuous piecewise-linear on a line mesh.
    P1Lambda(&'a Mesh1D),
    /// Piecewise-constant on the cut set, constant per element.
    P0Cut(&'a LineIntersection),
}

impl MultiplierSpace1D<'_> {
    pub fn dim(&self) -> usize {
        match self {
            MultiplierSpace1D::P1Lambda(m) => m.n_vertices(),
            MultiplierSpace1D::P0Cut(c) => c.n_cut(),
        }
    }
}

/// Default Gauss points per ring side sub-interval.
pub const RING_NQ: usize = 4;

/// Trace coupling on the surface: B_u pairs the volume trace with the
/// surface multiplier, B_w pairs the ring-constant extension of the 1D
/// field. Requires the conforming setup where surface triangles are element
/// faces and the 1D mesh matches the surface layers.
pub fn assemble_trace_coupling_2d(
    mesh: &Mesh3D,
    v1: &Mesh1D,
    surf: &SurfaceMesh2D,
) -> Result<(CouplingBlock, CouplingBlock)> {
    let hz = mesh.spacings()[2];
    if (v1.h() - hz).abs() > 1e-12 || (v1.length() - mesh.lengths()[2]).abs() > 1e-12 {
        return Err(Error::InvalidParameter(
            "trace coupling needs the 1D mesh to match the grid layers".into(),
        ));
    }
    let m_gamma = mass_surface(surf, 1.0);
    let n_s = surf.n_vertices();
    let mut bu = CooBuilder::with_capacity(n_s, mesh.n_vertices(), m_gamma.nnz());
    let mut bw = CooBuilder::with_capacity(n_s, v1.n_vertices(), 2 * m_gamma.nnz());
    // hat-function values of the 1D space at each surface vertex
    let mut hat: Vec<(usize, f64)> = Vec::with_capacity(n_s);
    for j in 0..n_s {
        let (e, t) = v1.locate(surf.z_of(j))?;
        hat.push((e, t));
    }
    for (i, j, v) in m_gamma.iter() {
        bu.push(i, surf.volume_vertex(j), v);
        let (e, t) = hat[j];
        bw.push(i, e, v * (1.0 - t));
        if t != 0.0 {
            bw.push(i, e + 1, v * t);
        }
    }
    Ok((
        CouplingBlock {
            matrix: bu.build(),
            field: PrimalField::Volume,
            sign: 1.0,
        },
        CouplingBlock {
            matrix: bw.build(),
            field: PrimalField::Segment,
            sign: -1.0,
        },
    ))
}

/// Fractional offsets (relative to the grid) at which the ring sides sit
/// between grid planes; the ring integral is non-smooth in z at these
/// offsets within each layer.
fn ring_offsets(mesh: &Mesh3D, section: &CrossSection) -> Vec<f64> {
    let h = mesh.spacings();
    let c = section.corners();
    let mut offs = vec![
        (c[0][1] / h[1]).fract(),
        (c[2][1] / h[1]).fract(),
        (c[0][0] / h[0]).fract(),
        (c[2][0] / h[0]).fract(),
    ];
    offs.retain(|o| *o > 1e-12 && *o < 1.0 - 1e-12);
    offs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    offs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    offs
}

/// ∮ φ dγ around the section boundary at height z, as sparse pairs of
/// (volume vertex, weight). Entries repeat; callers sum them.
pub fn ring_integrate(
    mesh: &Mesh3D,
    section: &CrossSection,
    z: f64,
    n_q: usize,
) -> Result<Vec<(u32, f64)>> {
    let h = mesh.spacings();
    let gauss = gauss_01(n_q);
    let cz = (z / h[2]).fract();
    let mut out = Vec::with_capacity(64);
    for side in section.sides() {
        let axis = if side.dir[0].abs() > 0.5 { 0 } else { 1 };
        let other_axis = 1 - axis;
        let c_other = (side.start[other_axis] / h[other_axis]).fract();
        // positions along the side where the containing element can change
        let mut ts: Vec<f64> = vec![0.0, side.len];
        let x0 = side.start[axis];
        let x1 = x0 + side.dir[axis] * side.len;
        let (lo, hi) = (x0.min(x1), x0.max(x1));
        let ha = h[axis];
        let push_x = |x: f64, ts: &mut Vec<f64>| {
            if x > lo + 1e-12 && x < hi - 1e-12 {
                ts.push((x - x0) / side.dir[axis]);
            }
        };
        let i_lo = (lo / ha).floor() as i64 - 1;
        let i_hi = (hi / ha).ceil() as i64 + 1;
        for i in i_lo..=i_hi {
            push_x(i as f64 * ha, &mut ts);
            for off in [c_other, cz] {
                if off > 1e-12 && off < 1.0 - 1e-12 {
                    push_x((i as f64 + off) * ha, &mut ts);
                }
            }
        }
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        for w in ts.windows(2) {
            let (ta, tb) = (w[0], w[1]);
            if tb - ta <= 1e-12 {
                continue;
            }
            for q in &gauss {
                let t = ta + q.0 * (tb - ta);
                let wq = q.1 * (tb - ta);
                let p = [
                    side.start[0] + t * side.dir[0],
                    side.start[1] + t * side.dir[1],
                    z,
                ];
                let (e, bary) = mesh.locate(p)?;
                let tet = mesh.tet(e);
                for i in 0..4 {
                    out.push((tet[i], wq * bary[i]));
                }
            }
        }
    }
    Ok(out)
}

/// Mean of a vertex field over the section boundary at height z.
pub fn ring_average(
    mesh: &Mesh3D,
    section: &CrossSection,
    u: &[f64],
    z: f64,
    n_q: usize,
) -> Result<f64> {
    let ring = ring_integrate(mesh, section, z, n_q)?;
    let total: f64 = ring.iter().map(|&(v, w)| w * u[v as usize]).sum();
    Ok(total / section.perimeter())
}

/// Heights partitioning the line so every integrand piece is polynomial:
/// grid layers, ring offsets within each layer, 1D mesh vertices, and the
/// multiplier's own breakpoints.
fn line_partition(mesh: &Mesh3D, v1: &Mesh1D, q: &MultiplierSpace1D, section: &CrossSection) -> Vec<f64> {
    let hz = mesh.spacings()[2];
    let nz = mesh.divisions()[2];
    let mut zs: Vec<f64> = Vec::new();
    for k in 0..=nz {
        zs.push(k as f64 * hz);
    }
    for off in ring_offsets(mesh, section) {
        for k in 0..nz {
            zs.push((k as f64 + off) * hz);
        }
    }
    for i in 0..=v1.n_segments() {
        zs.push(v1.vertex(i));
    }
    match q {
        MultiplierSpace1D::P1Lambda(m) => {
            for i in 0..=m.n_segments() {
                zs.push(m.vertex(i));
            }
        }
        MultiplierSpace1D::P0Cut(cut) => {
            for s in cut.segments() {
                zs.push(s.z0);
                zs.push(s.z1);
            }
        }
    }
    zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    zs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    zs
}

/// Multiplier degrees of freedom active at a height, with their values.
fn multiplier_values(q: &MultiplierSpace1D, z: f64) -> Result<Vec<(usize, f64)>> {
    match q {
        MultiplierSpace1D::P1Lambda(m) => {
            let (e, t) = m.locate(z)?;
            Ok(vec![(e, 1.0 - t), (e + 1, t)])
        }
        MultiplierSpace1D::P0Cut(cut) => {
            let s = cut
                .segments()
                .iter()
                .find(|s| z >= s.z0 - 1e-12 && z <= s.z1 + 1e-12)
                .ok_or(Error::PointLocation(cut.xy()[0], cut.xy()[1], z))?;
            let row = cut.row_of(s.element).expect("owner is in the cut set");
            Ok(vec![(row, 1.0)])
        }
    }
}

/// Average-trace coupling on the line: B_u pairs the perimeter-weighted ring
/// average of the volume field with the multiplier, and B_w pairs the 1D
/// field. `w` is the perimeter weight |∂D| used on the B_w side.
pub fn assemble_average_coupling_1d(
    mesh: &Mesh3D,
    v1: &Mesh1D,
    q: &MultiplierSpace1D,
    section: &CrossSection,
    w: &Weight,
    n_q: usize,
) -> Result<(CouplingBlock, CouplingBlock)> {
    let n_mu = q.dim();
    let mut bu = CooBuilder::new(n_mu, mesh.n_vertices());
    let mut bw = CooBuilder::new(n_mu, v1.n_vertices());
    let zs = line_partition(mesh, v1, q, section);
    let gauss = gauss_01(2);
    for wz in zs.windows(2) {
        let (za, zb) = (wz[0], wz[1]);
        if zb - za <= 1e-12 {
            continue;
        }
        for g in &gauss {
            let z = za + g.0 * (zb - za);
            let wq = g.1 * (zb - za);
            let mus = multiplier_values(q, z)?;
            let ring = ring_integrate(mesh, section, z, n_q)?;
            let (e1, t1) = v1.locate(z)?;
            let wz_val = w.at(z);
            for &(mi, mv) in &mus {
                let scale = wq * mv;
                for &(vtx, rv) in &ring {
                    bu.push(mi, vtx as usize, scale * rv);
                }
                bw.push(mi, e1, scale * wz_val * (1.0 - t1));
                bw.push(mi, e1 + 1, scale * wz_val * t1);
            }
        }
    }
    Ok((
        CouplingBlock {
            matrix: bu.build(),
            field: PrimalField::Volume,
            sign: 1.0,
        },
        CouplingBlock {
            matrix: bw.build(),
            field: PrimalField::Segment,
            sign: -1.0,
        },
    ))
}

/// Data vector ∫ w f μ_i over the line for the constraint right-hand side.
pub fn multiplier_data_1d(
    mesh: &Mesh3D,
    v1: &Mesh1D,
    q: &MultiplierSpace1D,
    section: &CrossSection,
    w: &Weight,
    f: impl Fn(f64) -> f64,
) -> Result<Vec<f64>> {
    let mut d = vec![0.0; q.dim()];
    let zs = line_partition(mesh, v1, q, section);
    let gauss = gauss_01(4);
    for wz in zs.windows(2) {
        let (za, zb) = (wz[0], wz[1]);
        if zb - za <= 1e-12 {
            continue;
        }
        for g in &gauss {
            let z = za + g.0 * (zb - za);
            let wq = g.1 * (zb - za) * w.at(z) * f(z);
            for &(mi, mv) in &multiplier_values(q, z)? {
                d[mi] += wq * mv;
            }
        }
    }
    Ok(d)
}

/// Jump penalty over the internal faces of the cut patch: for each face with
/// incident rows (a, b), adds h·area to the diagonal and −h·area across.
pub fn assemble_stabilization(cut: &LineIntersection, h: f64) -> CsrMatrix {
    let n = cut.n_cut();
    let mut b = CooBuilder::with_capacity(n, n, 4 * cut.internal_faces().len());
    for f in cut.internal_faces() {
        let v = h * f.area;
        b.push(f.a, f.a, v);
        b.push(f.b, f.b, v);
        b.push(f.a, f.b, -v);
        b.push(f.b, f.a, -v);
    }
    b.build()
}

/// Patchwise weighted average of a piecewise-constant line field: on each
/// patch the output is ∫ w v ds / ∫ w ds over the patch's segments. Test
/// support for the projection arguments.
pub fn project_pih(
    seg_lengths: &[f64],
    perimeters: &[f64],
    values: &[f64],
    patches: &[std::ops::Range<usize>],
) -> Result<Vec<f64>> {
    let n = seg_lengths.len();
    if perimeters.len() != n || values.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "segment arrays disagree: {} lengths, {} perimeters, {} values",
            n,
            perimeters.len(),
            values.len()
        )));
    }
    let mut covered = vec![false; n];
    for p in patches {
        for i in p.clone() {
            if i >= n || covered[i] {
                return Err(Error::InvalidParameter(
                    "patches must partition the segments".into(),
                ));
            }
            covered[i] = true;
        }
    }
    if covered.iter().any(|&c| !c) {
        return Err(Error::InvalidParameter(
            "patches must cover every segment".into(),
        ));
    }
    let mut out = vec![0.0; n];
    for p in patches {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in p.clone() {
            num += perimeters[i] * seg_lengths[i] * values[i];
            den += perimeters[i] * seg_lengths[i];
        }
        let avg = num / den;
        for i in p.clone() {
            out[i] = avg;
        }
    }
    Ok(out)
}
