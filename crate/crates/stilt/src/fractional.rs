//! Fractional Sobolev norms by generalized eigendecomposition.
//!
//! For a pencil A φ = μ M φ with A the (possibly constrained) H¹ matrix and
//! M the weighted mass matrix, eigenvectors are normalized so Φᵀ M Φ = I and
//! the norm of order s ∈ [−1, 1] is ‖u‖² = Σ μ_k^s c_k² with c = Φᵀ M u. The
//! norm matrix H_s = M Φ diag(μ^s) Φᵀ M and its inverse Φ diag(μ^{−s}) Φᵀ
//! provide the dual norms and the Riesz preconditioner actions.

use crate::fem::interp::P3Space1D;
use crate::fem::sparse::CsrMatrix;
use crate::{Error, Result};
use faer::prelude::*;

/// Default cap on the pencil dimension for the dense eigensolver.
pub const EIGEN_GUARD: usize = 40_000;

/// Boundary treatment of the H¹ matrix in the pencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceBc {
    /// Full space.
    None,
    /// Zero trace: constrained rows and columns are removed from the pencil.
    Zero,
}

/// Full eigendecomposition of the pencil (A, M) on the free subset of a
/// finite element space.
pub struct SpectralNormOperator {
    full_dim: usize,
    free: Vec<usize>,
    mass_free: CsrMatrix,
    mu: Vec<f64>,
    phi: Mat<f64>,
}

/// Builds the spectral operator for the pencil (A, M), eliminating the
/// masked degrees of freedom when a mask is given.
///
/// A and M are the full-size matrices; `constrained` marks removed rows and
/// columns (zero-trace space). Fails when the free dimension exceeds `guard`
/// or when M is not positive definite.
pub fn build_spectral(
    a: &CsrMatrix,
    m: &CsrMatrix,
    constrained: Option<&[bool]>,
    guard: usize,
) -> Result<SpectralNormOperator> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    assert_eq!(m.nrows(), n);
    assert_eq!(m.ncols(), n);
    let free: Vec<usize> = match constrained {
        Some(mask) => {
            assert_eq!(mask.len(), n);
            (0..n).filter(|&i| !mask[i]).collect()
        }
        None => (0..n).collect(),
    };
    let nf = free.len();
    if nf == 0 {
        return Err(Error::InvalidParameter(
            "spectral operator needs at least one free degree of freedom".into(),
        ));
    }
    if nf > guard {
        return Err(Error::EigenGuard { dim: nf, guard });
    }
    let mut col_map = vec![None; n];
    for (r, &i) in free.iter().enumerate() {
        col_map[i] = Some(r as u32);
    }
    let a_free = a.submatrix(&free, &col_map, nf);
    let mass_free = m.submatrix(&free, &col_map, nf);

    let a_dense = a_free.to_dense();
    let m_dense = mass_free.to_dense();
    let llt = m_dense
        .llt(faer::Side::Lower)
        .map_err(|_| Error::Factorization("mass matrix is not positive definite".into()))?;
    let l = llt.L().to_owned();
    // C = L^{-1} A L^{-T}, symmetric with the same eigenvalues as the pencil
    let mut c = a_dense;
    faer::linalg::triangular_solve::solve_lower_triangular_in_place(
        l.as_ref(),
        c.as_mut(),
        faer::Par::Seq,
    );
    let mut ct = c.transpose().to_owned();
    faer::linalg::triangular_solve::solve_lower_triangular_in_place(
        l.as_ref(),
        ct.as_mut(),
        faer::Par::Seq,
    );
    let evd = ct
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::Factorization("eigendecomposition did not converge".into()))?;
    let mu: Vec<f64> = (0..nf).map(|k| evd.S()[k]).collect();
    if mu[0] <= 0.0 {
        return Err(Error::Factorization(format!(
            "pencil is not positive definite, smallest eigenvalue {}",
            mu[0]
        )));
    }
    // back-transform eigenvectors: phi = L^{-T} y
    let mut phi = evd.U().to_owned();
    faer::linalg::triangular_solve::solve_upper_triangular_in_place(
        l.transpose(),
        phi.as_mut(),
        faer::Par::Seq,
    );
    Ok(SpectralNormOperator {
        full_dim: n,
        free,
        mass_free,
        mu,
        phi,
    })
}

impl SpectralNormOperator {
    /// Dimension of the underlying full space.
    pub fn full_dim(&self) -> usize {
        self.full_dim
    }

    /// Free (pencil) dimension; equals the number of eigenvalues.
    pub fn n_modes(&self) -> usize {
        self.free.len()
    }

    /// Pencil eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.mu
    }

    pub fn free_dofs(&self) -> &[usize] {
        &self.free
    }

    /// Restriction of a full-space vector to the free subset.
    pub fn restrict(&self, u_full: &[f64]) -> Vec<f64> {
        assert_eq!(u_full.len(), self.full_dim);
        self.free.iter().map(|&i| u_full[i]).collect()
    }

    /// Spectral coefficients c = Φᵀ M u.
    pub fn coefficients(&self, u_free: &[f64]) -> Vec<f64> {
        assert_eq!(u_free.len(), self.n_modes());
        let mu = self.mass_free.matvec(u_free);
        let mut c = vec![0.0; self.n_modes()];
        for k in 0..self.n_modes() {
            let mut s = 0.0;
            for i in 0..self.n_modes() {
                s += self.phi[(i, k)] * mu[i];
            }
            c[k] = s;
        }
        c
    }

    /// ‖u‖ in H^s: (Σ μ_k^s c_k²)^{1/2}.
    pub fn fractional_norm(&self, s: f64, u_free: &[f64]) -> f64 {
        let c = self.coefficients(u_free);
        c.iter()
            .zip(&self.mu)
            .map(|(&ck, &mk)| mk.powf(s) * ck * ck)
            .sum::<f64>()
            .sqrt()
    }

    /// Inverse norm operator H_s^{−1} x = Φ diag(μ^{−s}) Φᵀ x, the Riesz
    /// action used as a preconditioner block.
    pub fn riesz_apply(&self, s: f64, x_free: &[f64]) -> Vec<f64> {
        let nf = self.n_modes();
        assert_eq!(x_free.len(), nf);
        let mut t = vec![0.0; nf];
        for k in 0..nf {
            let mut sum = 0.0;
            for i in 0..nf {
                sum += self.phi[(i, k)] * x_free[i];
            }
            t[k] = sum * self.mu[k].powf(-s);
        }
        let mut y = vec![0.0; nf];
        for i in 0..nf {
            let mut sum = 0.0;
            for k in 0..nf {
                sum += self.phi[(i, k)] * t[k];
            }
            y[i] = sum;
        }
        y
    }

    /// Norm operator action H_s x = M Φ diag(μ^s) Φᵀ M x without forming
    /// the dense matrix.
    pub fn norm_apply(&self, s: f64, x_free: &[f64]) -> Vec<f64> {
        let nf = self.n_modes();
        assert_eq!(x_free.len(), nf);
        let mx = self.mass_free.matvec(x_free);
        let mut t = vec![0.0; nf];
        for k in 0..nf {
            let mut sum = 0.0;
            for i in 0..nf {
                sum += self.phi[(i, k)] * mx[i];
            }
            t[k] = sum * self.mu[k].powf(s);
        }
        let mut y = vec![0.0; nf];
        for i in 0..nf {
            let mut sum = 0.0;
            for k in 0..nf {
                sum += self.phi[(i, k)] * t[k];
            }
            y[i] = sum;
        }
        self.mass_free.matvec(&y)
    }

    /// Dense norm matrix H_s = M Φ diag(μ^s) Φᵀ M on the free subset.
    pub fn norm_matrix(&self, s: f64) -> Mat<f64> {
        let nf = self.n_modes();
        let m = self.mass_free.to_dense();
        let mphi = m.as_ref() * self.phi.as_ref();
        let mut scaled = mphi.clone();
        for k in 0..nf {
            let f = self.mu[k].powf(s);
            for i in 0..nf {
                scaled[(i, k)] *= f;
            }
        }
        scaled * mphi.transpose()
    }
}

/// H^{−1/2} norm of the cubic interpolant of an error field on a line mesh.
///
/// The operator must be built on the matching cubic space. The cubic
/// interpolation resolves the error between the mesh nodes, which a P1
/// interpolant of a P1 multiplier could not.
pub fn hminus_half_error_1d(
    space: &P3Space1D,
    op: &SpectralNormOperator,
    error: impl Fn(f64) -> f64,
) -> f64 {
    assert_eq!(op.full_dim(), space.dim());
    let full = space.interpolate(error);
    let free = op.restrict(&full);
    op.fractional_norm(-0.5, &free)
}

/// Closed-form mode domains for the analytic norm oracle.
#[derive(Debug, Clone, Copy)]
pub enum OracleDomain {
    /// Interval (0, X) with zero-trace sine modes.
    Interval { x: f64 },
    /// Tensor surface (0, X) × (0, Y), periodic in y, sine modes in x.
    TensorPeriodic { x: f64, y: f64 },
}

/// Transverse factor of a tensor mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YShape {
    Cos,
    Sin,
}

/// One analytic mode: amplitude × sin(iπx/X) × {1, cos(2jπy/Y), sin(2jπy/Y)}.
#[derive(Debug, Clone, Copy)]
pub struct Mode {
    pub i: usize,
    pub j: usize,
    pub shape: YShape,
    pub amplitude: f64,
}

impl Mode {
    pub fn interval(i: usize, amplitude: f64) -> Self {
        Mode {
            i,
            j: 0,
            shape: YShape::Cos,
            amplitude,
        }
    }
}

/// Coefficient convention of the analytic oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// Coefficients against L²-orthonormalized eigenfunctions.
    Spectral,
    /// Coefficients are plain integrals against unnormalized eigenfunctions.
    IntegralCoefficients,
}

/// Closed-form H^s norm of a finite mode expansion, for cross-checking the
/// discrete spectral operators.
pub fn analytic_norm_oracle(
    domain: OracleDomain,
    modes: &[Mode],
    s: f64,
    convention: Convention,
) -> f64 {
    let mut total = 0.0;
    for m in modes {
        assert!(m.i >= 1, "x modes are sines, index starts at 1");
        let (mu, phi_sq) = match domain {
            OracleDomain::Interval { x } => {
                assert_eq!(m.j, 0, "interval modes have no transverse factor");
                let rho = (m.i as f64 * std::f64::consts::PI / x).powi(2);
                (1.0 + rho, x / 2.0)
            }
            OracleDomain::TensorPeriodic { x, y } => {
                let rho = (m.i as f64 * std::f64::consts::PI / x).powi(2)
                    + (2.0 * m.j as f64 * std::f64::consts::PI / y).powi(2);
                let y_sq = if m.j == 0 {
                    assert_eq!(m.shape, YShape::Cos, "the j=0 sine mode vanishes");
                    y
                } else {
                    y / 2.0
                };
                (1.0 + rho, (x / 2.0) * y_sq)
            }
        };
        let c_sq = match convention {
            Convention::Spectral => m.amplitude * m.amplitude * phi_sq,
            Convention::IntegralCoefficients => m.amplitude * m.amplitude * phi_sq * phi_sq,
        };
        total += mu.powf(s) * c_sq;
    }
    total.sqrt()
}
