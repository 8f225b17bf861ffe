//! Square cross sections of an embedded cylinder.
//!
//! The inclusion is a box cylinder `D x (0, L)`; this type describes the
//! planar section `D` and parameterizes its boundary curve by arc length for
//! ring integrals.

/// Axis-aligned square section, traversed counterclockwise from the minimal
/// corner.
#[derive(Debug, Clone, Copy)]
pub struct CrossSection {
    center: [f64; 2],
    half_width: f64,
}

/// One straight side of the section boundary.
#[derive(Debug, Clone, Copy)]
pub struct Side {
    pub start: [f64; 2],
    pub dir: [f64; 2],
    pub len: f64,
}

impl CrossSection {
    pub fn square(center: [f64; 2], half_width: f64) -> Self {
        assert!(half_width > 0.0);
        CrossSection { center, half_width }
    }

    pub fn center(&self) -> [f64; 2] {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Area of the section.
    pub fn area(&self) -> f64 {
        4.0 * self.half_width * self.half_width
    }

    /// Length of the boundary curve.
    pub fn perimeter(&self) -> f64 {
        8.0 * self.half_width
    }

    /// Corners in traversal order, starting at the minimal corner.
    pub fn corners(&self) -> [[f64; 2]; 4] {
        let [cx, cy] = self.center;
        let r = self.half_width;
        [
            [cx - r, cy - r],
            [cx + r, cy - r],
            [cx + r, cy + r],
            [cx - r, cy + r],
        ]
    }

    /// The four sides in traversal order.
    pub fn sides(&self) -> [Side; 4] {
        let c = self.corners();
        let mut sides = [Side {
            start: [0.0; 2],
            dir: [0.0; 2],
            len: 2.0 * self.half_width,
        }; 4];
        for i in 0..4 {
            let a = c[i];
            let b = c[(i + 1) % 4];
            let len = 2.0 * self.half_width;
            sides[i] = Side {
                start: a,
                dir: [(b[0] - a[0]) / len, (b[1] - a[1]) / len],
                len,
            };
        }
        sides
    }

    /// Point at arc length `t` from the minimal corner, wrapping around.
    pub fn point_at(&self, t: f64) -> [f64; 2] {
        let p = self.perimeter();
        let mut t = t.rem_euclid(p);
        for side in self.sides() {
            if t <= side.len {
                return [
                    side.start[0] + t * side.dir[0],
                    side.start[1] + t * side.dir[1],
                ];
            }
            t -= side.len;
        }
        self.corners()[0]
    }
}
