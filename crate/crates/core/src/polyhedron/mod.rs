//! Polyhedra given by a marked tuple of oriented planes and a skeleton.
//!
//! Face `f` of the skeleton lies on plane `f`. Vertices are recovered as the
//! common points of their incident planes, and the polyhedron is the
//! intersection of the selected half-spaces.

pub mod shapes;
mod text;
mod truncation;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graphs::PlanarGraph;
use crate::mink::{
    self, classify_point, lift, polar_plane, AffineDeformation, Isometry, OrientedPlane, PointKind, ProjectivePoint,
    Vec3, Vec4,
};
use crate::tolerances::{CONCURRENCE_RESIDUAL, CONVEXITY_SLACK, TAU_IDEAL};

pub use text::parse_polyhedron;
pub use truncation::{TruncatedFace, TruncatedPolyhedron};
pub(crate) use truncation::half_space_intersection;

/// Tangency slack for edges of rectified polyhedra.
const RECTIFIED_EDGE_SLACK: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    planes: Vec<OrientedPlane>,
    skeleton: PlanarGraph,
    vertices: Vec<Vec3>,
    rectified: bool,
}

/// Properness of a single vertex. Only hyperideal vertices can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexStatus {
    Proper,
    /// The real vertex `witness` lies on the polar plane of this vertex.
    AlmostProper { witness: usize },
    /// The real vertex `witness` lies beyond the polar plane of this vertex.
    Improper { witness: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Properness {
    Proper,
    AlmostProper,
    Improper,
}

impl std::fmt::Display for VertexStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VertexStatus::Proper => f.write_str("Proper"),
            VertexStatus::AlmostProper { witness } => write!(f, "AlmostProper {witness}"),
            VertexStatus::Improper { witness } => write!(f, "Improper {witness}"),
        }
    }
}

impl std::fmt::Display for Properness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Properness::Proper => "Proper",
            Properness::AlmostProper => "AlmostProper",
            Properness::Improper => "Improper",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropernessReport {
    pub kinds: Vec<PointKind>,
    pub statuses: Vec<VertexStatus>,
    pub overall: Properness,
    /// Pairs `(edge, v)` where the whole edge lies in the polar plane of the
    /// hyperideal vertex `v`.
    pub edges_in_truncation_planes: Vec<(usize, usize)>,
}

impl PropernessReport {
    pub fn is_truncatable(&self) -> bool {
        self.overall != Properness::Improper
    }

    /// First improper pair `(real vertex, hyperideal vertex)`, if any.
    pub fn improper_witness(&self) -> Option<(usize, usize)> {
        self.statuses.iter().enumerate().find_map(|(v, s)| match s {
            VertexStatus::Improper { witness } => Some((*witness, v)),
            _ => None,
        })
    }

    pub fn count(&self, kind: PointKind) -> usize {
        self.kinds.iter().filter(|k| **k == kind).count()
    }
}

/// Solves for the common point of `planes` in homogeneous coordinates.
/// Returns the chart point and the relative residual.
fn concurrence_point(planes: &[&OrientedPlane]) -> Result<(Vec3, f64)> {
    let rows = planes.len().max(4);
    let mut a = DMatrix::<f64>::zeros(rows, 4);
    for (i, p) in planes.iter().enumerate() {
        let n = p.normal() / p.normal().norm();
        a[(i, 0)] = -n[0];
        for j in 1..4 {
            a[(i, j)] = n[j];
        }
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.as_ref().unwrap();
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].partial_cmp(&svd.singular_values[j]).unwrap());
    if svd.singular_values[order[1]] < 1e-10 {
        return Err(Error::SkeletonMismatch("incident planes share a line".into()));
    }
    let x = vt.row(order[0]).transpose();
    if x[0].abs() < 1e-12 * x.norm() {
        return Err(Error::SkeletonMismatch("vertex at infinity".into()));
    }
    let v = Vec3::new(x[1] / x[0], x[2] / x[0], x[3] / x[0]);
    let scale = v.norm().max(1.0);
    let residual = planes.iter().map(|p| p.signed_distance(&v).abs()).fold(0.0, f64::max) / scale;
    Ok((v, residual))
}

fn segment_min_norm(a: &Vec3, b: &Vec3) -> f64 {
    let d = b - a;
    let dd = d.norm_squared();
    let s = if dd > 0.0 { (-a.dot(&d) / dd).clamp(0.0, 1.0) } else { 0.0 };
    (a + d * s).norm()
}

impl Polyhedron {
    /// Builds a polyhedron from its face planes and expected skeleton.
    pub fn build(planes: Vec<OrientedPlane>, skeleton: PlanarGraph) -> Result<Self> {
        Self::build_inner(planes, skeleton, false)
    }

    /// Like [`build`](Self::build), but edges may be tangent to the sphere
    /// instead of crossing the ball.
    pub fn build_rectified(planes: Vec<OrientedPlane>, skeleton: PlanarGraph) -> Result<Self> {
        Self::build_inner(planes, skeleton, true)
    }

    fn build_inner(planes: Vec<OrientedPlane>, skeleton: PlanarGraph, rectified: bool) -> Result<Self> {
        if planes.len() != skeleton.face_count() {
            return Err(Error::SkeletonMismatch(format!(
                "{} planes for {} faces",
                planes.len(),
                skeleton.face_count()
            )));
        }
        let mut vertices = Vec::with_capacity(skeleton.vertex_count());
        for u in 0..skeleton.vertex_count() {
            let incident: Vec<&OrientedPlane> = skeleton.faces_at(u).into_iter().map(|f| &planes[f]).collect();
            let (v, residual) = concurrence_point(&incident)?;
            if residual > CONCURRENCE_RESIDUAL {
                return Err(Error::SkeletonMismatch(format!("planes at vertex {u} miss by {residual:e}")));
            }
            vertices.push(v);
        }
        for (u, v) in vertices.iter().enumerate() {
            let scale = v.norm().max(1.0);
            let at = skeleton.faces_at(u);
            for (f, p) in planes.iter().enumerate() {
                if at.contains(&f) {
                    continue;
                }
                let s = p.signed_distance(v) / scale;
                if s > CONVEXITY_SLACK {
                    return Err(Error::NonConvex { vertex: u, face: f, excess: s });
                }
                if s.abs() <= CONVEXITY_SLACK {
                    return Err(Error::SkeletonMismatch(format!("vertex {u} also lies on plane {f}")));
                }
            }
        }
        let limit = if rectified { 1.0 + RECTIFIED_EDGE_SLACK } else { 1.0 };
        for (e, &(a, b)) in skeleton.edges().iter().enumerate() {
            let m = segment_min_norm(&vertices[a], &vertices[b]);
            if m >= limit {
                return Err(Error::EdgeMissesBall { edge: e });
            }
        }
        Ok(Polyhedron { planes, skeleton, vertices, rectified })
    }

    /// Builds the polyhedron spanned by the given vertices: face planes are
    /// fitted through each face's vertices and oriented towards the centroid.
    pub fn from_vertices(points: &[Vec3], skeleton: PlanarGraph) -> Result<Self> {
        if points.len() != skeleton.vertex_count() {
            return Err(Error::SkeletonMismatch("vertex count differs from skeleton".into()));
        }
        let centroid = points.iter().sum::<Vec3>() / points.len() as f64;
        let mut planes = Vec::with_capacity(skeleton.face_count());
        for face in skeleton.faces() {
            let c = face.iter().map(|&v| points[v]).sum::<Vec3>() / face.len() as f64;
            let mut m = Vec3::zeros();
            for k in 0..face.len() {
                let (p, q) = (points[face[k]] - c, points[face[(k + 1) % face.len()]] - c);
                m += p.cross(&q);
            }
            if m.norm() < 1e-300 {
                return Err(Error::SkeletonMismatch("degenerate face".into()));
            }
            let m = m.normalize();
            let plane = OrientedPlane::from_affine(m, m.dot(&c));
            planes.push(if plane.eval(&centroid) > 0.0 { plane.flipped() } else { plane });
        }
        Self::build(planes, skeleton)
    }

    pub fn planes(&self) -> &[OrientedPlane] {
        &self.planes
    }

    pub fn skeleton(&self) -> &PlanarGraph {
        &self.skeleton
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn vertex(&self, u: usize) -> ProjectivePoint {
        ProjectivePoint::from_vec(self.vertices[u])
    }

    pub fn is_rectified(&self) -> bool {
        self.rectified
    }

    pub fn vertex_kinds(&self) -> Vec<PointKind> {
        self.vertices.iter().map(|v| classify_point(&ProjectivePoint::from_vec(*v))).collect()
    }

    /// Vertex classification and properness with the default band.
    pub fn classify_vertices(&self) -> PropernessReport {
        self.classify_vertices_with(TAU_IDEAL)
    }

    pub fn classify_vertices_with(&self, tau: f64) -> PropernessReport {
        let kinds: Vec<PointKind> =
            self.vertices.iter().map(|v| mink::classify_point_with(&ProjectivePoint::from_vec(*v), tau)).collect();
        let mut statuses = vec![VertexStatus::Proper; kinds.len()];
        let mut edges_in = Vec::new();
        for (v, kind) in kinds.iter().enumerate() {
            if *kind != PointKind::Hyperideal {
                continue;
            }
            let polar = polar_plane(&self.vertex(v)).expect("hyperideal vertex");
            let dist: Vec<f64> = self.vertices.iter().map(|w| polar.signed_distance(w)).collect();
            let mut status = VertexStatus::Proper;
            for (w, wk) in kinds.iter().enumerate() {
                if w == v || *wk != PointKind::Real {
                    continue;
                }
                if dist[w] > tau {
                    status = VertexStatus::Improper { witness: w };
                    break;
                }
                if dist[w] >= -tau && status == VertexStatus::Proper {
                    status = VertexStatus::AlmostProper { witness: w };
                }
            }
            statuses[v] = status;
            for (e, &(a, b)) in self.skeleton.edges().iter().enumerate() {
                if a != v && b != v && dist[a].abs() <= tau && dist[b].abs() <= tau {
                    edges_in.push((e, v));
                }
            }
        }
        let overall = if statuses.iter().any(|s| matches!(s, VertexStatus::Improper { .. })) {
            Properness::Improper
        } else if statuses.iter().any(|s| matches!(s, VertexStatus::AlmostProper { .. })) {
            Properness::AlmostProper
        } else {
            Properness::Proper
        };
        PropernessReport { kinds, statuses, overall, edges_in_truncation_planes: edges_in }
    }

    /// Interior dihedral angle at every edge.
    pub fn dihedral_angles(&self) -> Result<Vec<f64>> {
        (0..self.skeleton.edge_count())
            .map(|e| {
                let (f, h) = self.skeleton.edge_faces(e);
                mink::dihedral_angle(&self.planes[f], &self.planes[h])
            })
            .collect()
    }

    /// Dihedral angles of the edges at vertex `u`.
    pub fn incident_angles(&self, u: usize) -> Result<Vec<f64>> {
        let angles = self.dihedral_angles()?;
        Ok(self.skeleton.vertex_edges(u).into_iter().map(|e| angles[e]).collect())
    }

    /// Length of each edge inside the truncation; infinite at ideal ends.
    pub fn edge_lengths(&self) -> Result<Vec<f64>> {
        let report = self.classify_vertices();
        if let Some((vertex, pole)) = report.improper_witness() {
            return Err(Error::ImproperInput { vertex, pole });
        }
        let polars: Vec<OrientedPlane> = (0..self.vertices.len())
            .filter(|&v| report.kinds[v] == PointKind::Hyperideal)
            .map(|v| polar_plane(&self.vertex(v)).unwrap())
            .collect();
        let mut out = Vec::with_capacity(self.skeleton.edge_count());
        for &(a, b) in self.skeleton.edges() {
            let (pa, pb) = (self.vertices[a], self.vertices[b]);
            if report.kinds[a] == PointKind::Ideal || report.kinds[b] == PointKind::Ideal {
                out.push(f64::INFINITY);
                continue;
            }
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for p in &polars {
                // eval is affine in the segment parameter
                let (e0, e1) = (p.eval(&pa), p.eval(&pb));
                if e0 > 0.0 && e1 > 0.0 {
                    hi = lo - 1.0;
                    break;
                }
                if e0 > 0.0 {
                    lo = lo.max(e0 / (e0 - e1));
                } else if e1 > 0.0 {
                    hi = hi.min(e0 / (e0 - e1));
                }
            }
            if hi <= lo {
                out.push(0.0);
                continue;
            }
            let x = ProjectivePoint::from_vec(pa + (pb - pa) * lo);
            let y = ProjectivePoint::from_vec(pa + (pb - pa) * hi);
            if x.norm() >= 1.0 || y.norm() >= 1.0 {
                out.push(f64::INFINITY);
            } else {
                out.push(mink::distance_points(&x, &y)?);
            }
        }
        Ok(out)
    }

    /// Applies an affine deformation to the planes and rebuilds.
    pub fn deformed(&self, d: &AffineDeformation) -> Result<Self> {
        Self::build_inner(d.apply_planes(&self.planes)?, self.skeleton.clone(), self.rectified)
    }

    /// Applies an isometry to the planes and rebuilds.
    pub fn transformed(&self, iso: &Isometry) -> Result<Self> {
        let planes = self.planes.iter().map(|p| iso.apply_plane(p)).collect();
        Self::build_inner(planes, self.skeleton.clone(), self.rectified)
    }

    /// Minkowski lifts of the vertices.
    pub fn vertex_lifts(&self) -> Vec<Vec4> {
        self.vertices.iter().map(lift).collect()
    }

    /// Gram matrix entry helper used by tests: `<n_f, n_g>`.
    pub fn plane_pairing(&self, f: usize, g: usize) -> f64 {
        mink::minkowski(self.planes[f].normal(), self.planes[g].normal())
    }

    /// Smallest Euclidean diameter among the faces, measured on the vertices.
    pub fn min_face_width(&self) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (f, face) in self.skeleton.faces().iter().enumerate() {
            let w = face_width(face.iter().map(|&v| self.vertices[v]).collect());
            if w < best.1 {
                best = (f, w);
            }
        }
        best
    }
}

/// Width of a planar polygon: the smallest extent over directions normal to
/// its edges.
fn face_width(points: Vec<Vec3>) -> f64 {
    let n = points.len();
    let mut best = f64::INFINITY;
    for k in 0..n {
        let d = points[(k + 1) % n] - points[k];
        let len = d.norm();
        if len < 1e-300 {
            return 0.0;
        }
        let d = d / len;
        let extent = points
            .iter()
            .map(|p| {
                let r = p - points[k];
                (r - d * r.dot(&d)).norm()
            })
            .fold(0.0, f64::max);
        best = best.min(extent);
    }
    best
}

/// Classifies a vertex from the dihedral angles of its `k` edges: the sum is
/// compared with `(k - 2) pi`.
pub fn classify_vertex_by_angles(angles: &[f64]) -> Result<PointKind> {
    classify_vertex_by_angles_with(angles, TAU_IDEAL)
}

pub fn classify_vertex_by_angles_with(angles: &[f64], tau: f64) -> Result<PointKind> {
    let k = angles.len();
    if k < 3 {
        return Err(Error::TooFewAngles(k));
    }
    for (edge, &angle) in angles.iter().enumerate() {
        if !(angle > 0.0 && angle < std::f64::consts::PI) {
            return Err(Error::AngleOutOfRange { edge, angle });
        }
    }
    let excess = angles.iter().sum::<f64>() - (k as f64 - 2.0) * std::f64::consts::PI;
    Ok(if excess.abs() <= tau {
        PointKind::Ideal
    } else if excess > 0.0 {
        PointKind::Real
    } else {
        PointKind::Hyperideal
    })
}
