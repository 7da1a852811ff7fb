//! Truncation by the polar half-spaces of hyperideal vertices.
//!
//! The truncated region is recomputed from scratch as an intersection of
//! half-spaces: every triple of planes is intersected, infeasible points are
//! discarded, near-coincident points are merged, and each plane's face is the
//! cyclically ordered set of vertices lying on it.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Matrix3;

use super::Polyhedron;
use crate::error::{Error, Result};
use crate::graphs::PlanarGraph;
use crate::mink::{self, classify_point, polar_plane, OrientedPlane, PointKind, ProjectivePoint, Vec3};

/// Feasibility slack for candidate vertices.
const FEASIBLE: f64 = 1e-9;
/// Distance under which candidate vertices are merged and a vertex counts as
/// lying on a plane.
const MERGE: f64 = 1e-7;

/// A face of the truncation: the plane it lies on and its vertices in
/// counter-clockwise order seen from outside.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedFace {
    pub plane: usize,
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedPolyhedron {
    planes: Vec<OrientedPlane>,
    original_count: usize,
    truncated: Vec<usize>,
    vertices: Vec<Vec3>,
    faces: Vec<TruncatedFace>,
    skeleton: Option<PlanarGraph>,
}

impl TruncatedPolyhedron {
    /// All planes: the original faces first, then one polar plane per
    /// hyperideal vertex.
    pub fn planes(&self) -> &[OrientedPlane] {
        &self.planes
    }

    /// The original plane tuple, untouched.
    pub fn strip(&self) -> Vec<OrientedPlane> {
        self.planes[..self.original_count].to_vec()
    }

    pub fn original_count(&self) -> usize {
        self.original_count
    }

    /// Hyperideal vertices of the original polyhedron, one per truncation plane.
    pub fn truncated_vertices(&self) -> &[usize] {
        &self.truncated
    }

    pub fn is_truncation_plane(&self, plane: usize) -> bool {
        plane >= self.original_count
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[TruncatedFace] {
        &self.faces
    }

    /// Skeleton of the truncation; faces are in the order of [`faces`](Self::faces).
    /// `None` when the region is empty or its boundary is not a simple
    /// polyhedral surface at the merge tolerance.
    pub fn skeleton(&self) -> Option<&PlanarGraph> {
        self.skeleton.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn vertex_kinds(&self) -> Vec<PointKind> {
        self.vertices.iter().map(|v| classify_point(&ProjectivePoint::from_vec(*v))).collect()
    }

    /// Dihedral angle at every skeleton edge, with a flag telling whether one
    /// of the two faces is a truncation face.
    pub fn edge_angles(&self) -> Result<Vec<(f64, bool)>> {
        let Some(g) = &self.skeleton else {
            return Ok(Vec::new());
        };
        (0..g.edge_count())
            .map(|e| {
                let (f, h) = g.edge_faces(e);
                let (pf, ph) = (self.faces[f].plane, self.faces[h].plane);
                let angle = mink::dihedral_angle(&self.planes[pf], &self.planes[ph])?;
                Ok((angle, self.is_truncation_plane(pf) || self.is_truncation_plane(ph)))
            })
            .collect()
    }
}

impl Polyhedron {
    /// Intersects the polyhedron with the polar half-space of every
    /// hyperideal vertex.
    pub fn truncate(&self) -> Result<TruncatedPolyhedron> {
        let report = self.classify_vertices();
        if let Some((vertex, pole)) = report.improper_witness() {
            return Err(Error::ImproperInput { vertex, pole });
        }
        let out = self.truncate_generalized()?;
        check_invariants(&out)?;
        Ok(out)
    }

    /// Truncation without the properness check. For improper input the
    /// region may be empty and truncation edges need not be right-angled.
    pub fn truncate_generalized(&self) -> Result<TruncatedPolyhedron> {
        let mut planes = self.planes.clone();
        let mut truncated = Vec::new();
        for (v, kind) in self.vertex_kinds().iter().enumerate() {
            if *kind == PointKind::Hyperideal {
                planes.push(polar_plane(&self.vertex(v))?);
                truncated.push(v);
            }
        }
        let (vertices, faces) = half_space_intersection(&planes);
        let skeleton = if faces.is_empty() {
            None
        } else {
            PlanarGraph::embedded(vertices.len(), faces.iter().map(|f| f.vertices.clone()).collect()).ok()
        };
        Ok(TruncatedPolyhedron {
            planes,
            original_count: self.planes.len(),
            truncated,
            vertices,
            faces,
            skeleton,
        })
    }
}

fn check_invariants(t: &TruncatedPolyhedron) -> Result<()> {
    let face_planes: Vec<usize> = t.faces.iter().map(|f| f.plane).filter(|&p| t.is_truncation_plane(p)).collect();
    for (i, &a) in face_planes.iter().enumerate() {
        for &b in &face_planes[i + 1..] {
            let c = -mink::minkowski(t.planes[a].normal(), t.planes[b].normal());
            if c < 1.0 - 1e-6 {
                return Err(Error::TruncationInvariant(format!(
                    "truncation planes {a} and {b} meet in the ball (cosine {c})"
                )));
            }
        }
    }
    for (angle, at_truncation) in t.edge_angles().unwrap_or_default() {
        if at_truncation && (angle - FRAC_PI_2).abs() > 1e-6 {
            return Err(Error::TruncationInvariant(format!("truncation edge with angle {angle}")));
        }
    }
    Ok(())
}

/// Vertices and faces of the intersection of closed half-spaces, assumed
/// bounded. Faces with fewer than three vertices are dropped.
pub(crate) fn half_space_intersection(planes: &[OrientedPlane]) -> (Vec<Vec3>, Vec<TruncatedFace>) {
    let unit: Vec<(Vec3, f64)> = planes
        .iter()
        .map(|p| {
            let (m, d) = p.affine();
            let s = m.norm();
            (m / s, d / s)
        })
        .collect();
    let n = planes.len();
    let mut vertices: Vec<Vec3> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let m = Matrix3::from_rows(&[unit[i].0.transpose(), unit[j].0.transpose(), unit[k].0.transpose()]);
                if m.determinant().abs() < 1e-12 {
                    continue;
                }
                let Some(inv) = m.try_inverse() else { continue };
                let x = inv * Vec3::new(unit[i].1, unit[j].1, unit[k].1);
                if unit.iter().any(|(m, d)| m.dot(&x) - d > FEASIBLE) {
                    continue;
                }
                if vertices.iter().all(|v| (v - x).norm() > MERGE) {
                    vertices.push(x);
                }
            }
        }
    }
    let mut faces = Vec::new();
    for (p, (m, d)) in unit.iter().enumerate() {
        let on: Vec<usize> = (0..vertices.len()).filter(|&v| (m.dot(&vertices[v]) - d).abs() <= MERGE).collect();
        if on.len() < 3 {
            continue;
        }
        let c = on.iter().map(|&v| vertices[v]).sum::<Vec3>() / on.len() as f64;
        let t1 = if m[0].abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let t1 = (t1 - m * m.dot(&t1)).normalize();
        let t2 = m.cross(&t1);
        let mut keyed: Vec<(f64, usize)> = on
            .iter()
            .map(|&v| {
                let r = vertices[v] - c;
                (r.dot(&t2).atan2(r.dot(&t1)), v)
            })
            .collect();
        keyed.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let ordered: Vec<usize> = keyed.into_iter().map(|(_, v)| v).collect();
        // skip faces that are segments
        let area: f64 = (0..ordered.len())
            .map(|k| (vertices[ordered[k]] - c).cross(&(vertices[ordered[(k + 1) % ordered.len()]] - c)).dot(m))
            .sum();
        if area.abs() < 1e-14 {
            continue;
        }
        faces.push(TruncatedFace { plane: p, vertices: ordered });
    }
    if faces.len() < 4 {
        return (Vec::new(), Vec::new());
    }
    (vertices, faces)
}
