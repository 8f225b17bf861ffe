//! Uniform meshes of a vertical line segment.

use crate::{Error, Result};
use std::io::Write as _;
use std::path::Path;

/// Uniform partition of the segment `{(x0, y0)} x [0, L]` into intervals.
#[derive(Debug, Clone)]
pub struct Mesh1D {
    anchor: [f64; 2],
    length: f64,
    n_segments: usize,
}

impl Mesh1D {
    pub fn uniform(anchor: [f64; 2], length: f64, n_segments: usize) -> Result<Self> {
        if !(length > 0.0) || n_segments == 0 {
            return Err(Error::InvalidParameter(format!(
                "segment mesh needs positive length and segment count, got {length} and {n_segments}"
            )));
        }
        Ok(Mesh1D {
            anchor,
            length,
            n_segments,
        })
    }

    /// Planar point the segment passes through.
    pub fn anchor(&self) -> [f64; 2] {
        self.anchor
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_segments(&self) -> usize {
        self.n_segments
    }

    pub fn n_vertices(&self) -> usize {
        self.n_segments + 1
    }

    /// Interval width.
    pub fn h(&self) -> f64 {
        self.length / self.n_segments as f64
    }

    /// Height of vertex `i`.
    pub fn vertex(&self, i: usize) -> f64 {
        debug_assert!(i <= self.n_segments);
        self.length * i as f64 / self.n_segments as f64
    }

    /// Element containing height `z` and the local coordinate within it.
    pub fn locate(&self, z: f64) -> Result<(usize, f64)> {
        let tol = 1e-12 * self.length.max(1.0);
        if z < -tol || z > self.length + tol {
            return Err(Error::PointLocation(self.anchor[0], self.anchor[1], z));
        }
        let scaled = (z / self.h()).clamp(0.0, self.n_segments as f64);
        let mut e = scaled.floor() as usize;
        if e >= self.n_segments {
            e = self.n_segments - 1;
        }
        Ok((e, (scaled - e as f64).clamp(0.0, 1.0)))
    }

    /// Evaluates a vertex-valued field at height `z` by linear interpolation.
    pub fn evaluate_point(&self, u: &[f64], z: f64) -> Result<f64> {
        assert_eq!(u.len(), self.n_vertices());
        let (e, t) = self.locate(z)?;
        Ok((1.0 - t) * u[e] + t * u[e + 1])
    }

    /// Writes the mesh as a plain text listing of vertices and cells.
    pub fn write_text(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str(&format!(
            "vertices {} segments {}\n",
            self.n_vertices(),
            self.n_segments
        ));
        for i in 0..self.n_vertices() {
            out.push_str(&format!(
                "{:.17e} {:.17e} {:.17e}\n",
                self.anchor[0],
                self.anchor[1],
                self.vertex(i)
            ));
        }
        for e in 0..self.n_segments {
            out.push_str(&format!("{} {}\n", e, e + 1));
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
    fn vertices_are_uniform() {
        let m = Mesh1D::uniform([0.5, 0.5], 1.0, 4).unwrap();
        assert_eq!(m.n_vertices(), 5);
        assert_relative_eq!(m.vertex(3), 0.75);
        assert_relative_eq!(m.h(), 0.25);
    }

    #[test]
    fn locate_and_evaluate_are_linear_exact() {
        let m = Mesh1D::uniform([0.0, 0.0], 2.0, 7).unwrap();
        let u: Vec<f64> = (0..m.n_vertices()).map(|i| 3.0 * m.vertex(i) - 1.0).collect();
        for z in [0.0, 0.1, 1.0, 1.999, 2.0] {
            assert_relative_eq!(m.evaluate_point(&u, z).unwrap(), 3.0 * z - 1.0, epsilon = 1e-12);
        }
        assert!(m.locate(-0.1).is_err());
        assert!(m.locate(2.1).is_err());
    }
}
