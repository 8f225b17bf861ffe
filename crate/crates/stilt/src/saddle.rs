//! Block saddle-point systems coupling the 3D field, the 1D field, and a
//! Lagrange multiplier.
//!
//! The primal block is the H¹(Ω) form plus the |D|-weighted H¹(Λ) form (or
//! their stiffness parts alone), the constraint block pairs the trace or the
//! ring average against the multiplier, and the non-conforming variant
//! carries a jump-stabilization block. Systems are assembled monolithic with
//! symmetric Dirichlet elimination: constrained rows become identity rows,
//! eliminated columns are lifted into the right-hand side, including the
//! constrained primal columns of the constraint rows.

use std::path::Path;

use crate::coupling::{
    assemble_average_coupling_1d, assemble_stabilization, assemble_trace_coupling_2d,
    multiplier_data_1d, MultiplierSpace1D, RING_NQ,
};
use crate::fem::assembly::{
    load_1d, load_3d, load_surface, mass_1d, mass_3d, mass_surface, stiffness_1d, stiffness_3d,
    Weight,
};
use crate::fem::dirichlet::DirichletBc;
use crate::fem::sparse::{CooBuilder, CsrMatrix};
use crate::geometry::{CrossSection, LineIntersection, Mesh1D, Mesh3D, SurfaceMesh2D};
use crate::{Error, Result};

/// The three formulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulationKind {
    /// Multiplier on the surface, conforming meshes.
    Coupled2D,
    /// Multiplier on the line, conforming meshes.
    Coupled1D,
    /// Piecewise-constant multiplier on the cut elements, non-conforming
    /// meshes, jump-stabilized.
    Stabilized1D,
}

impl FormulationKind {
    pub fn name(&self) -> &'static str {
        match self {
            FormulationKind::Coupled2D => "coupled-2d",
            FormulationKind::Coupled1D => "coupled-1d",
            FormulationKind::Stabilized1D => "stabilized",
        }
    }
}

/// Primal bilinear form variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BilinearForm {
    /// Full H¹ inner products, as in the well-posedness setting.
    FullH1,
    /// Stiffness parts only, consistent with the manufactured benchmark
    /// solution.
    StiffnessOnly,
}

/// Highest refinement level the mesh family supports here.
pub const MAX_LEVEL: u32 = 6;

/// Meshes and interface geometry for one formulation at one level.
pub struct Discretization {
    pub kind: FormulationKind,
    pub level: u32,
    pub mesh: Mesh3D,
    pub line: Mesh1D,
    pub section: CrossSection,
    pub surface: Option<SurfaceMesh2D>,
    pub cut: Option<LineIntersection>,
}

impl Discretization {
    /// Builds the standard benchmark geometry: unit cube, vertical line at
    /// (1/2, 1/2), square section of half-width 1/4. Conforming levels use
    /// n = 4·2^(l−1) cells per direction; the non-conforming family uses
    /// n_xy = 4·2^(l−1)+1, n_z = n_xy−1, and a line mesh of width h_z/3.
    pub fn new(kind: FormulationKind, level: u32) -> Result<Self> {
        if level < 1 || level > MAX_LEVEL {
            return Err(Error::InvalidParameter(format!(
                "level {level} out of range 1..={MAX_LEVEL}"
            )));
        }
        let base = 4usize << (level - 1);
        let section = CrossSection::square([0.5, 0.5], 0.25);
        match kind {
            FormulationKind::Coupled2D | FormulationKind::Coupled1D => {
                let n = base;
                let mesh = Mesh3D::uniform_box([1.0, 1.0, 1.0], [n, n, n])?;
                let line = Mesh1D::uniform([0.5, 0.5], 1.0, n)?;
                let surface = if kind == FormulationKind::Coupled2D {
                    Some(SurfaceMesh2D::from_mesh(&mesh, section)?)
                } else {
                    None
                };
                Ok(Discretization {
                    kind,
                    level,
                    mesh,
                    line,
                    section,
                    surface,
                    cut: None,
                })
            }
            FormulationKind::Stabilized1D => {
                let n_xy = base + 1;
                let n_z = base;
                let mesh = Mesh3D::uniform_box([1.0, 1.0, 1.0], [n_xy, n_xy, n_z])?;
                let line = Mesh1D::uniform([0.5, 0.5], 1.0, 3 * n_z)?;
                let cut = Some(LineIntersection::vertical(&mesh, [0.5, 0.5])?);
                Ok(Discretization {
                    kind,
                    level,
                    mesh,
                    line,
                    section,
                    surface: None,
                    cut,
                })
            }
        }
    }

    /// Inverse mesh size in the cross-flow directions, the table label.
    pub fn inv_h(&self) -> usize {
        self.mesh.divisions()[0]
    }

    pub fn n_3d(&self) -> usize {
        self.mesh.n_vertices()
    }

    pub fn n_1d(&self) -> usize {
        self.line.n_vertices()
    }

    /// Multiplier space dimension before boundary constraints.
    pub fn n_multiplier(&self) -> usize {
        match self.kind {
            FormulationKind::Coupled2D => self.surface.as_ref().unwrap().n_vertices(),
            FormulationKind::Coupled1D => self.line.n_vertices(),
            FormulationKind::Stabilized1D => self.cut.as_ref().unwrap().n_cut(),
        }
    }

    /// Space dimensions (3D, 1D, multiplier) as counted in the tables.
    pub fn dof_counts(&self) -> [usize; 3] {
        [self.n_3d(), self.n_1d(), self.n_multiplier()]
    }
}

/// Problem data: loads, constraint data, and Dirichlet boundary values.
pub struct ProblemData<'a> {
    /// 3D volume load.
    pub f: &'a dyn Fn([f64; 3]) -> f64,
    /// 1D load, paired with the |D|-weighted inner product.
    pub g_bar: &'a dyn Fn(f64) -> f64,
    /// Constraint datum on the surface (surface formulation).
    pub q_gamma: &'a dyn Fn([f64; 3]) -> f64,
    /// Averaged constraint datum on the line (line formulations).
    pub q_lambda: &'a dyn Fn(f64) -> f64,
    /// 3D Dirichlet boundary values.
    pub u_b: &'a dyn Fn([f64; 3]) -> f64,
    /// 1D endpoint values.
    pub w_ends: (f64, f64),
}

impl ProblemData<'static> {
    pub fn zero() -> Self {
        ProblemData {
            f: &|_| 0.0,
            g_bar: &|_| 0.0,
            q_gamma: &|_| 0.0,
            q_lambda: &|_| 0.0,
            u_b: &|_| 0.0,
            w_ends: (0.0, 0.0),
        }
    }
}

/// Surface-trace bookkeeping kept for the constraint-elimination solver.
pub struct TraceStructure {
    /// Primal index of the volume vertex under each surface vertex.
    pub volume_dof: Vec<usize>,
    /// Primal index of the 1D vertex of each surface vertex's layer.
    pub line_dof: Vec<usize>,
    /// Surface mass matrix.
    pub mass: CsrMatrix,
}

/// Assembled monolithic saddle system with boundary conditions applied.
///
/// Block layout: primal x = (u, w) of length n3 + n1, then the multiplier.
/// The multiplier equation reads B x − S_stab λ = d.
pub struct BlockSaddleSystem {
    pub kind: FormulationKind,
    pub form: BilinearForm,
    /// Primal block with identity rows on constrained DOFs.
    pub a: CsrMatrix,
    /// Constraint rows over the primal DOFs; constrained primal columns
    /// eliminated, constrained multiplier rows zero.
    pub b: CsrMatrix,
    /// Stabilization block (zero for the conforming formulations).
    pub s_stab: CsrMatrix,
    pub rhs_primal: Vec<f64>,
    pub rhs_multiplier: Vec<f64>,
    pub n3: usize,
    pub n1: usize,
    pub n_mu: usize,
    pub primal_bc: DirichletBc,
    pub mult_constrained: Vec<bool>,
    pub trace: Option<TraceStructure>,
}

/// Assembles the saddle system for a formulation, with the stabilization
/// block included by default for the non-conforming variant.
pub fn assemble(
    disc: &Discretization,
    form: BilinearForm,
    data: &ProblemData,
) -> Result<BlockSaddleSystem> {
    assemble_with_options(disc, form, data, true)
}

/// Assembly with the stabilization block toggled, to expose the singular
/// unstabilized system.
pub fn assemble_with_options(
    disc: &Discretization,
    form: BilinearForm,
    data: &ProblemData,
    stabilize: bool,
) -> Result<BlockSaddleSystem> {
    let mesh = &disc.mesh;
    let line = &disc.line;
    let n3 = mesh.n_vertices();
    let n1 = line.n_vertices();
    let np = n3 + n1;
    let area = disc.section.area();
    let w_area = Weight::constant(area);

    // primal block and loads
    let mut a3 = stiffness_3d(mesh, 1.0);
    let mut a1 = stiffness_1d(line, &w_area);
    if form == BilinearForm::FullH1 {
        a3 = a3.add(&mass_3d(mesh, 1.0));
        a1 = a1.add(&mass_1d(line, &w_area));
    }
    let mut ab = CooBuilder::with_capacity(np, np, a3.nnz() + a1.nnz());
    for (i, j, v) in a3.iter() {
        ab.push(i, j, v);
    }
    for (i, j, v) in a1.iter() {
        ab.push(n3 + i, n3 + j, v);
    }
    let a_full = ab.build();
    let mut rhs_primal = load_3d(mesh, 1.0, data.f);
    rhs_primal.extend(load_1d(line, &w_area, data.g_bar));

    // boundary conditions on the primal spaces
    let bc3 = DirichletBc::boundary_3d(mesh, data.u_b);
    let bc1 = DirichletBc::endpoints_1d(line, data.w_ends.0, data.w_ends.1);
    let pairs = (0..n3)
        .filter(|&i| bc3.is_constrained(i))
        .map(|i| (i, bc3.value(i)))
        .chain(
            (0..n1)
                .filter(|&i| bc1.is_constrained(i))
                .map(|i| (n3 + i, bc1.value(i))),
        );
    let primal_bc = DirichletBc::from_pairs(np, pairs);
    let a = primal_bc.apply_symmetric(&a_full, &mut rhs_primal);

    // constraint block, multiplier data, multiplier boundary constraints
    let per = disc.section.perimeter();
    let w_per = Weight::constant(per);
    let (bu, bw, mut d, mult_constrained, s_stab, trace) = match disc.kind {
        FormulationKind::Coupled2D => {
            let surf = disc.surface.as_ref().expect("surface formulation");
            let (bu, bw) = assemble_trace_coupling_2d(mesh, line, surf)?;
            let d: Vec<f64> = load_surface(surf, 1.0, |p| (data.q_gamma)(p));
            let hz = mesh.spacings()[2];
            let height = mesh.lengths()[2];
            let n_s = surf.n_vertices();
            let mut constrained = vec![false; n_s];
            let mut volume_dof = Vec::with_capacity(n_s);
            let mut line_dof = Vec::with_capacity(n_s);
            for j in 0..n_s {
                let z = surf.z_of(j);
                constrained[j] = z < 0.5 * hz || z > height - 0.5 * hz;
                volume_dof.push(surf.volume_vertex(j));
                line_dof.push(n3 + (z / hz).round() as usize);
            }
            let trace = TraceStructure {
                volume_dof,
                line_dof,
                mass: mass_surface(surf, 1.0),
            };
            let s = CsrMatrix::zeros(n_s, n_s);
            (bu, bw, d, constrained, s, Some(trace))
        }
        FormulationKind::Coupled1D => {
            let q = MultiplierSpace1D::P1Lambda(line);
            let (bu, bw) = assemble_average_coupling_1d(mesh, line, &q, &disc.section, &w_per, RING_NQ)?;
            let d = multiplier_data_1d(mesh, line, &q, &disc.section, &w_per, |z| {
                (data.q_lambda)(z)
            })?;
            let n_mu = line.n_vertices();
            let mut constrained = vec![false; n_mu];
            constrained[0] = true;
            constrained[n_mu - 1] = true;
            let s = CsrMatrix::zeros(n_mu, n_mu);
            (bu, bw, d, constrained, s, None)
        }
        FormulationKind::Stabilized1D => {
            let cut = disc.cut.as_ref().expect("non-conforming formulation");
            let q = MultiplierSpace1D::P0Cut(cut);
            let (bu, bw) = assemble_average_coupling_1d(mesh, line, &q, &disc.section, &w_per, RING_NQ)?;
            let d = multiplier_data_1d(mesh, line, &q, &disc.section, &w_per, |z| {
                (data.q_lambda)(z)
            })?;
            let n_mu = cut.n_cut();
            let s = if stabilize {
                assemble_stabilization(cut, mesh.spacings()[0])
            } else {
                CsrMatrix::zeros(n_mu, n_mu)
            };
            (bu, bw, d, vec![false; n_mu], s, None)
        }
    };
    let n_mu = d.len();

    // merge the two coupling blocks with their signs, dropping constrained
    // multiplier rows
    let mut bb = CooBuilder::with_capacity(n_mu, np, bu.matrix.nnz() + bw.matrix.nnz());
    for (i, j, v) in bu.matrix.iter() {
        if !mult_constrained[i] {
            bb.push(i, j, bu.sign * v);
        }
    }
    for (i, j, v) in bw.matrix.iter() {
        if !mult_constrained[i] {
            bb.push(i, n3 + j, bw.sign * v);
        }
    }
    for (i, c) in mult_constrained.iter().enumerate() {
        if *c {
            d[i] = 0.0;
        }
    }
    let b = primal_bc.eliminate_columns(&bb.build(), &mut d);

    Ok(BlockSaddleSystem {
        kind: disc.kind,
        form,
        a,
        b,
        s_stab,
        rhs_primal,
        rhs_multiplier: d,
        n3,
        n1,
        n_mu,
        primal_bc,
        mult_constrained,
        trace,
    })
}

impl BlockSaddleSystem {
    pub fn n_primal(&self) -> usize {
        self.n3 + self.n1
    }

    pub fn dim(&self) -> usize {
        self.n_primal() + self.n_mu
    }

    pub fn free_primal(&self) -> Vec<usize> {
        self.primal_bc.free_dofs()
    }

    pub fn free_multiplier(&self) -> Vec<usize> {
        (0..self.n_mu).filter(|&i| !self.mult_constrained[i]).collect()
    }

    /// Monolithic matrix [[A, Bᵀ], [B, −S_stab]] with identity rows on
    /// constrained multiplier DOFs.
    pub fn full_matrix(&self) -> CsrMatrix {
        let np = self.n_primal();
        let n = self.dim();
        let nnz = self.a.nnz() + 2 * self.b.nnz() + self.s_stab.nnz() + self.n_mu;
        let mut m = CooBuilder::with_capacity(n, n, nnz);
        for (i, j, v) in self.a.iter() {
            m.push(i, j, v);
        }
        for (i, j, v) in self.b.iter() {
            m.push(np + i, j, v);
            m.push(j, np + i, v);
        }
        for (i, j, v) in self.s_stab.iter() {
            m.push(np + i, np + j, -v);
        }
        for (i, c) in self.mult_constrained.iter().enumerate() {
            if *c {
                m.push(np + i, np + i, 1.0);
            }
        }
        m.build()
    }

    /// Monolithic right-hand side.
    pub fn full_rhs(&self) -> Vec<f64> {
        let mut r = self.rhs_primal.clone();
        r.extend_from_slice(&self.rhs_multiplier);
        r
    }

    /// Infinity norm of the multiplier equation residual B x − S λ − d for a
    /// full-length solution vector.
    pub fn constraint_residual(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim());
        let np = self.n_primal();
        let mut r = self.b.matvec(&x[..np]);
        let s_lam = self.s_stab.matvec(&x[np..]);
        let mut worst = 0.0f64;
        for i in 0..self.n_mu {
            r[i] -= s_lam[i] + self.rhs_multiplier[i];
            worst = worst.max(r[i].abs());
        }
        worst
    }

    /// Writes the monolithic matrix (Matrix Market) and right-hand side
    /// (plain text, one value per line) into a directory.
    pub fn export(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        let m = self.full_matrix();
        m.write_matrix_market(&dir.join("system.mtx"), true)?;
        let rhs_path = dir.join("rhs.txt");
        let mut text = String::with_capacity(self.dim() * 24);
        for v in self.full_rhs() {
            text.push_str(&format!("{v:e}\n"));
        }
        std::fs::write(&rhs_path, text).map_err(|e| Error::io(rhs_path.display().to_string(), e))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn benchmark_data() -> ProblemData<'static> {
        ProblemData {
            f: &|p| 8.0 * PI * PI * (2.0 * PI * p[0]).sin() * (2.0 * PI * p[1]).sin(),
            g_bar: &|z| PI * PI * (PI * z).sin(),
            q_gamma: &|p| (2.0 * PI * p[0]).sin() * (2.0 * PI * p[1]).sin() - (PI * p[2]).sin(),
            q_lambda: &|z| -(PI * z).sin(),
            u_b: &|p| (2.0 * PI * p[0]).sin() * (2.0 * PI * p[1]).sin(),
            w_ends: (0.0, 0.0),
        }
    }

    #[test]
    fn dof_counts_match_the_refinement_formulas() {
        let golden: [[usize; 9]; 3] = [
            [125, 5, 40, 125, 5, 5, 180, 13, 24],
            [729, 9, 144, 729, 9, 9, 900, 25, 48],
            [4913, 17, 544, 4913, 17, 17, 5508, 49, 96],
        ];
        for level in 1u32..=3 {
            let row = &golden[(level - 1) as usize];
            let d2 = Discretization::new(FormulationKind::Coupled2D, level).unwrap();
            let d1 = Discretization::new(FormulationKind::Coupled1D, level).unwrap();
            let ds = Discretization::new(FormulationKind::Stabilized1D, level).unwrap();
            assert_eq!(d2.dof_counts(), [row[0], row[1], row[2]]);
            assert_eq!(d1.dof_counts(), [row[3], row[4], row[5]]);
            assert_eq!(ds.dof_counts(), [row[6], row[7], row[8]]);
        }
        assert!(Discretization::new(FormulationKind::Coupled1D, 0).is_err());
        assert!(Discretization::new(FormulationKind::Coupled1D, 7).is_err());
    }

    #[test]
    fn monolithic_systems_are_symmetric() {
        let data = benchmark_data();
        for kind in [
            FormulationKind::Coupled2D,
            FormulationKind::Coupled1D,
            FormulationKind::Stabilized1D,
        ] {
            let disc = Discretization::new(kind, 1).unwrap();
            let sys = assemble(&disc, BilinearForm::StiffnessOnly, &data).unwrap();
            let m = sys.full_matrix();
            let scale = m.iter().map(|(_, _, v)| v.abs()).fold(0.0f64, f64::max);
            assert!(m.asymmetry() <= 1e-12 * scale, "{:?}", kind);
            assert_eq!(m.nrows(), sys.dim());
        }
    }

    #[test]
    fn constrained_rows_are_identities_with_data_values() {
        let data = benchmark_data();
        let disc = Discretization::new(FormulationKind::Coupled1D, 1).unwrap();
        let sys = assemble(&disc, BilinearForm::FullH1, &data).unwrap();
        // a boundary 3D vertex: row must be identity, rhs must carry u_b
        let v = 2; // vertex (2,0,0) on the boundary
        let p = disc.mesh.vertex(v);
        assert!(sys.primal_bc.is_constrained(v));
        let (cols, vals) = sys.a.row(v);
        assert_eq!(cols.len(), 1);
        assert_eq!(cols[0] as usize, v);
        assert_relative_eq!(vals[0], 1.0);
        assert_relative_eq!(
            sys.rhs_primal[v],
            (2.0 * PI * p[0]).sin() * (2.0 * PI * p[1]).sin(),
            epsilon = 1e-14
        );
        // multiplier endpoints are constrained and their B rows are empty
        assert!(sys.mult_constrained[0]);
        let (c0, _) = sys.b.row(0);
        assert!(c0.is_empty());
        assert_eq!(sys.rhs_multiplier[0], 0.0);
    }

    #[test]
    fn free_primal_block_is_positive_definite() {
        let data = ProblemData::zero();
        let disc = Discretization::new(FormulationKind::Coupled1D, 1).unwrap();
        let sys = assemble(&disc, BilinearForm::StiffnessOnly, &data).unwrap();
        let free = sys.free_primal();
        // Gershgorin-style check is too weak for stiffness matrices; test
        // positive energy on pseudo-random vectors supported on free DOFs
        let mut state = 11u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..50 {
            let mut x = vec![0.0; sys.n_primal()];
            for &i in &free {
                x[i] = next();
            }
            let ax = sys.a.matvec(&x);
            let e: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum();
            let scale: f64 = x.iter().map(|a| a * a).sum();
            assert!(e > 1e-12 * scale);
        }
    }

    #[test]
    fn conforming_constraint_rows_have_no_zero_free_rows() {
        let data = benchmark_data();
        for kind in [FormulationKind::Coupled2D, FormulationKind::Coupled1D] {
            let disc = Discretization::new(kind, 1).unwrap();
            let sys = assemble(&disc, BilinearForm::StiffnessOnly, &data).unwrap();
            for i in sys.free_multiplier() {
                let (cols, _) = sys.b.row(i);
                assert!(!cols.is_empty(), "{:?} row {i}", kind);
            }
        }
    }

    #[test]
    fn stabilized_system_has_idle_constraint_rows() {
        let data = benchmark_data();
        let disc = Discretization::new(FormulationKind::Stabilized1D, 1).unwrap();
        let sys = assemble(&disc, BilinearForm::StiffnessOnly, &data).unwrap();
        let zero_rows = (0..sys.n_mu)
            .filter(|&i| {
                let (cols, _) = sys.b.row(i);
                cols.is_empty()
            })
            .count();
        // four point-touching elements per cube carry no line segment
        assert_eq!(zero_rows, 4 * disc.mesh.divisions()[2]);
        // the stabilization couples them back in
        for i in 0..sys.n_mu {
            let (cols, _) = sys.s_stab.row(i);
            assert!(!cols.is_empty());
        }
    }

    #[test]
    fn constraint_residual_detects_perturbations() {
        let data = benchmark_data();
        let disc = Discretization::new(FormulationKind::Coupled1D, 1).unwrap();
        let sys = assemble(&disc, BilinearForm::StiffnessOnly, &data).unwrap();
        // zero solution: residual equals the sup of the multiplier data
        let x = vec![0.0; sys.dim()];
        let expect = sys
            .rhs_multiplier
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert_relative_eq!(sys.constraint_residual(&x), expect, epsilon = 1e-15);
        // perturbing one free primal DOF moves the residual by at least the
        // smallest nonzero column entry
        let mut y = vec![0.0; sys.dim()];
        let j = *sys
            .free_primal()
            .iter()
            .find(|&&j| {
                sys.b.iter().any(|(_, c, v)| c == j && v.abs() > 1e-12)
            })
            .unwrap();
        y[j] = 1e-3;
        let base = sys.constraint_residual(&x);
        let moved = sys.constraint_residual(&y);
        let col_max = sys
            .b
            .iter()
            .filter(|&(_, c, _)| c == j)
            .map(|(_, _, v)| v.abs())
            .fold(0.0f64, f64::max);
        assert!((moved - base).abs() >= 1e-3 * col_max * 0.099);
    }

    #[test]
    fn zero_data_gives_zero_rhs() {
        let data = ProblemData::zero();
        let disc = Discretization::new(FormulationKind::Stabilized1D, 1).unwrap();
        let sys = assemble(&disc, BilinearForm::StiffnessOnly, &data).unwrap();
        assert!(sys.full_rhs().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn export_writes_matrix_and_rhs() {
        let data = benchmark_data();
        let disc = Discretization::new(FormulationKind::Coupled1D, 1).unwrap();
        let sys = assemble(&disc, BilinearForm::StiffnessOnly, &data).unwrap();
        let dir = std::env::temp_dir().join("stilt_export_test");
        sys.export(&dir).unwrap();
        let mtx = std::fs::read_to_string(dir.join("system.mtx")).unwrap();
        assert!(mtx.starts_with("%%MatrixMarket matrix coordinate real symmetric"));
        let rhs = std::fs::read_to_string(dir.join("rhs.txt")).unwrap();
        assert_eq!(rhs.lines().count(), sys.dim());
        std::fs::remove_dir_all(&dir).ok();
    }
}
