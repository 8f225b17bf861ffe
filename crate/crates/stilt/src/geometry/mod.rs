//! Meshes and geometric predicates.
//!
//! The 3D mesh is a tensor grid of boxes, each box split into six positively
//! oriented tetrahedra that share the box diagonal. The 1D mesh discretizes a
//! vertical segment, and the surface mesh discretizes the lateral boundary of
//! a box cylinder so that its triangles coincide with tetrahedron faces.

pub mod cross_section;
pub mod intersection;
pub mod mesh1d;
pub mod mesh3d;
pub mod surface;

pub use cross_section::CrossSection;
pub use intersection::LineIntersection;
pub use mesh1d::Mesh1D;
pub use mesh3d::Mesh3D;
pub use surface::SurfaceMesh2D;
