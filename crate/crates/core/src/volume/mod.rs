//! Hyperbolic volumes of truncated polyhedra.
//!
//! Regions whose vertices are all ideal are cut into ideal tetrahedra, whose
//! volumes are sums of Lobachevsky functions of their dihedral angles. Anything
//! else is integrated numerically in the Klein model (see [`quadrature`]).

mod lobachevsky;
mod quadrature;
#[cfg(test)]
mod tests;

use std::fmt;

use nalgebra::Complex;

pub use lobachevsky::lobachevsky;

use crate::error::{Error, Result};
use crate::mink::{classify_point, Isometry, OrientedPlane, PointKind, ProjectivePoint, Vec3};
use crate::polyhedron::{Polyhedron, TruncatedPolyhedron};
use crate::tolerances::{QUADRATURE_BUDGET, QUADRATURE_TOL, TAU_IDEAL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VolumeMethod {
    IdealDecomposition,
    KleinQuadrature,
}

impl fmt::Display for VolumeMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VolumeMethod::IdealDecomposition => write!(f, "IdealDecomposition"),
            VolumeMethod::KleinQuadrature => write!(f, "KleinQuadrature"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeResult {
    pub value: f64,
    pub method: VolumeMethod,
    pub error_estimate: f64,
}

/// Stopping rule of the adaptive quadrature: absolute tolerance or an
/// evaluation budget, whichever is hit first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub tol: f64,
    pub budget: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions { tol: QUADRATURE_TOL, budget: QUADRATURE_BUDGET }
    }
}

impl QuadratureOptions {
    /// Settings for finite differences of the volume.
    pub fn tight() -> Self {
        QuadratureOptions { tol: 1e-11, budget: QUADRATURE_BUDGET }
    }

    pub fn with_tol(tol: f64) -> Self {
        QuadratureOptions { tol, ..Default::default() }
    }
}

/// Volume of the ideal tetrahedron with the given vertices on the sphere.
/// Flat configurations have volume 0.
pub fn ideal_tetrahedron_volume(points: &[ProjectivePoint; 4]) -> Result<f64> {
    let mut unit = [Vec3::zeros(); 4];
    for (u, p) in unit.iter_mut().zip(points) {
        let n = p.norm();
        if !n.is_finite() || (n - 1.0).abs() > TAU_IDEAL {
            return Err(Error::NotIdeal { norm: n });
        }
        *u = p.coords() / n;
    }
    Ok(ideal_tetrahedron_unit(&unit))
}

/// Same as [`ideal_tetrahedron_volume`] for unit vectors.
fn ideal_tetrahedron_unit(p: &[Vec3; 4]) -> f64 {
    // stereographic projection from p[3] sends it to infinity; the dihedral
    // angles are then the angles of the triangle of the other three images
    let pole = p[3];
    let e1 = crate::mink::rotation_between(&Vec3::z(), &pole) * Vec3::x();
    let e2 = pole.cross(&e1);
    let z: Vec<Complex<f64>> = p[..3]
        .iter()
        .map(|q| {
            let denom = 1.0 - q.dot(&pole);
            Complex::new(q.dot(&e1) / denom, q.dot(&e2) / denom)
        })
        .collect();
    let angle = |a: usize, b: usize, c: usize| ((z[b] - z[a]) / (z[c] - z[a])).arg().abs();
    let (x, y, w) = (angle(0, 1, 2), angle(1, 2, 0), angle(2, 0, 1));
    if [x, y, w].iter().any(|a| !a.is_finite()) {
        return 0.0;
    }
    lobachevsky(x) + lobachevsky(y) + lobachevsky(w)
}

/// Volume of an all-ideal truncation by coning every face not containing
/// `apex` to it and fanning the face into triangles.
pub fn cone_volume(t: &TruncatedPolyhedron, apex: usize) -> Result<f64> {
    let unit: Vec<Vec3> = t.vertices().iter().map(|v| v.normalize()).collect();
    for v in t.vertices() {
        if (v.norm() - 1.0).abs() > TAU_IDEAL {
            return Err(Error::NotIdeal { norm: v.norm() });
        }
    }
    let mut total = 0.0;
    for face in t.faces() {
        let f = &face.vertices;
        if f.contains(&apex) {
            continue;
        }
        for k in 1..f.len() - 1 {
            total += ideal_tetrahedron_unit(&[unit[f[0]], unit[f[k]], unit[f[k + 1]], unit[apex]]);
        }
    }
    Ok(total)
}

fn ideal_decomposition(t: &TruncatedPolyhedron) -> Result<VolumeResult> {
    let first = cone_volume(t, 0)?;
    // a second apex sharing no face with the first, when there is one
    let other = (1..t.vertices().len())
        .find(|&v| t.faces().iter().all(|f| !(f.vertices.contains(&0) && f.vertices.contains(&v))))
        .unwrap_or(t.vertices().len() - 1);
    let second = cone_volume(t, other)?;
    Ok(VolumeResult {
        value: first.max(0.0),
        method: VolumeMethod::IdealDecomposition,
        error_estimate: (first - second).abs(),
    })
}

/// Integrates the volume element of a truncation in the Klein model,
/// whatever its vertex types.
pub fn quadrature_volume(t: &TruncatedPolyhedron, opts: &QuadratureOptions) -> Result<VolumeResult> {
    let faces: Vec<Vec<usize>> = t.faces().iter().map(|f| f.vertices.clone()).collect();
    region_quadrature(t.vertices(), &faces, opts)
}

fn region_quadrature(vertices: &[Vec3], faces: &[Vec<usize>], opts: &QuadratureOptions) -> Result<VolumeResult> {
    if faces.is_empty() {
        return Ok(VolumeResult { value: 0.0, method: VolumeMethod::KleinQuadrature, error_estimate: 0.0 });
    }
    let centroid = vertices.iter().sum::<Vec3>() / vertices.len() as f64;
    if centroid.norm() >= 1.0 {
        return Err(Error::OutsideModel { norm: centroid.norm() });
    }
    let iso = Isometry::boost_to_origin(&centroid);
    let moved: Vec<Vec3> = vertices.iter().map(|v| iso.apply_vec(v)).collect();
    let ideal: Vec<bool> =
        vertices.iter().map(|v| classify_point(&ProjectivePoint::from_vec(*v)) == PointKind::Ideal).collect();
    let q = quadrature::integrate(&moved, faces, &ideal, opts.tol, opts.budget)?;
    Ok(VolumeResult { value: q.value.max(0.0), method: VolumeMethod::KleinQuadrature, error_estimate: q.error })
}

/// Volume of a truncation: ideal decomposition when every vertex is ideal,
/// Klein-model quadrature otherwise, 0 when empty.
pub fn truncation_volume(t: &TruncatedPolyhedron, opts: &QuadratureOptions) -> Result<VolumeResult> {
    if t.is_empty() {
        return Ok(VolumeResult { value: 0.0, method: VolumeMethod::KleinQuadrature, error_estimate: 0.0 });
    }
    if t.vertex_kinds().iter().all(|k| *k == PointKind::Ideal) {
        ideal_decomposition(t)
    } else {
        quadrature_volume(t, opts)
    }
}

/// Volume of the truncation of a proper or almost proper polyhedron.
pub fn volume(p: &Polyhedron) -> Result<VolumeResult> {
    volume_with(p, &QuadratureOptions::default())
}

pub fn volume_with(p: &Polyhedron, opts: &QuadratureOptions) -> Result<VolumeResult> {
    truncation_volume(&p.truncate()?, opts)
}

/// Volume of a bounded intersection of half-spaces lying in the closed ball.
pub fn region_volume(planes: &[OrientedPlane], opts: &QuadratureOptions) -> Result<VolumeResult> {
    let (vertices, faces) = crate::polyhedron::half_space_intersection(planes);
    for v in &vertices {
        if v.norm() > 1.0 + TAU_IDEAL {
            return Err(Error::OutsideModel { norm: v.norm() });
        }
    }
    let faces: Vec<Vec<usize>> = faces.into_iter().map(|f| f.vertices).collect();
    region_quadrature(&vertices, &faces, opts)
}

/// `|dV/dt + 1/2 sum_i l_i dθ_i/dt|` at `t0` by central differences of step `h`,
/// with the volume integrated at [`QuadratureOptions::tight`].
pub fn schlafli_residual<F>(path: F, t0: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<Polyhedron>,
{
    let minus = path(t0 - h)?;
    let mid = path(t0)?;
    let plus = path(t0 + h)?;
    let reference = mid.classify_vertices();
    if reference.kinds.contains(&PointKind::Ideal) {
        return Err(Error::PathDiscontinuous("ideal vertex at the base point".into()));
    }
    for (name, q) in [("t0 - h", &minus), ("t0 + h", &plus)] {
        if q.skeleton() != mid.skeleton() {
            return Err(Error::PathDiscontinuous(format!("skeleton differs at {name}")));
        }
        let r = q.classify_vertices();
        if r.kinds != reference.kinds || r.statuses != reference.statuses {
            return Err(Error::PathDiscontinuous(format!("vertex types differ at {name}")));
        }
    }
    let opts = QuadratureOptions::tight();
    let dv = (volume_with(&plus, &opts)?.value - volume_with(&minus, &opts)?.value) / (2.0 * h);
    let lengths = mid.edge_lengths()?;
    let (ap, am) = (plus.dihedral_angles()?, minus.dihedral_angles()?);
    let work: f64 = lengths.iter().zip(ap.iter().zip(&am)).map(|(l, (a, b))| l * (a - b) / (2.0 * h)).sum();
    Ok((dv + 0.5 * work).abs())
}
