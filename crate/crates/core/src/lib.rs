//! Generalized hyperbolic polyhedra in the projective (Beltrami–Klein) model.
//!
//! The crate is organised bottom-up:
//!
//! * [`mink`]: points, oriented planes, polarity, angles and distances in the
//!   Minkowski lift of the Klein ball, plus affine deformations and isometries.
//! * [`graphs`]: 3-connected planar graphs given by oriented face lists, their
//!   duals and medial graphs, edge/face collapses and the Bao–Bonahon
//!   admissibility checker for dihedral angle vectors.
//! * [`polyhedron`]: plane-tuple polyhedra, vertex and properness
//!   classification, truncation, dihedral angles and edge lengths.
//! * [`volume`]: the Lobachevsky function, ideal tetrahedra, volumes of
//!   truncations and the Schläfli residual.
//! * [`rectify`]: the rectification of a planar graph (every edge tangent to
//!   the sphere at infinity) via a primal–dual circle packing.
//! * [`flow`]: realization of polyhedra with prescribed dihedral angles and the
//!   volume-increasing flow that scales all angles towards zero.
//! * [`acceptance`]: the end-to-end criteria used by the `selftest` command and
//!   by the acceptance test target.

pub mod acceptance;
pub mod error;
pub mod flow;
pub mod graphs;
pub mod mink;
pub mod numfmt;
pub mod polyhedron;
pub mod rectify;
pub mod tolerances;
pub mod volume;

pub use error::{Error, Result};
pub use graphs::{AngleVector, PlanarGraph};
pub use mink::{AffineDeformation, Isometry, OrientedPlane, PointKind, ProjectivePoint};
pub use polyhedron::{Polyhedron, PropernessReport, TruncatedPolyhedron};
pub use volume::{VolumeMethod, VolumeResult};
