//! Deformations that move a polyhedron off the ideal and almost proper strata:
//! a small expansion that makes ideal vertices hyperideal, and translations
//! that push a real vertex across the sphere or off a polar plane.

use crate::error::{Error, Result};
use crate::mink::{polar_plane, AffineDeformation, Isometry, OrientedPlane, PointKind, Vec3};
use crate::polyhedron::{Polyhedron, Properness};
use crate::tolerances::TAU_IDEAL;

use super::realize::interior_point;

/// Distance to a polar plane under which a real vertex counts as lying on it
/// for the purpose of choosing the escape direction.
const ON_POLAR: f64 = 1e-6;

/// Expands `p` by the factor `1 + delta` about an interior point, so that every
/// ideal vertex becomes hyperideal.
pub fn nudge_ideal_vertices(p: &Polyhedron, delta: f64) -> Result<Polyhedron> {
    let before = p.classify_vertices();
    if before.count(PointKind::Ideal) == 0 {
        return Err(Error::NoIdealVertices);
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("nudge size must be positive, got {delta}")));
    }
    let center = interior_point(p).unwrap_or_else(Vec3::zeros);
    let q = p
        .deformed(&AffineDeformation::Homothety { center, factor: 1.0 + delta })
        .map_err(|_| Error::PropernessLost)?;
    let after = q.classify_vertices();
    let kinds_ok = before.kinds.iter().zip(&after.kinds).all(|(b, a)| match b {
        PointKind::Ideal => *a == PointKind::Hyperideal,
        other => a == other,
    });
    if !kinds_ok || after.overall != Properness::Proper {
        return Err(Error::PropernessLost);
    }
    Ok(q)
}

/// [`nudge_ideal_vertices`] with the size halved from `1e-2` until the
/// result is proper. Returns the polyhedron and the size used.
pub fn nudge_adaptive(p: &Polyhedron) -> Result<(Polyhedron, f64)> {
    let mut delta = 1e-2;
    loop {
        match nudge_ideal_vertices(p, delta) {
            Ok(q) => return Ok((q, delta)),
            Err(Error::PropernessLost) if delta > 1e-12 => delta *= 0.5,
            Err(e) => return Err(e),
        }
    }
}

/// Chart and unit direction of the escape translation for vertex `v`.
struct Plan {
    chart: Isometry,
    direction: Vec3,
}

/// Largest extent along `u` of the disk cut from the ball by a polar plane.
fn disk_extent(polar: &OrientedPlane, u: &Vec3) -> f64 {
    let (m, d) = polar.affine();
    let n = m.norm();
    let (m, d) = (m / n, d / n);
    let r = (1.0 - d * d).max(0.0).sqrt();
    d * m.dot(u) + r * (1.0 - m.dot(u).powi(2)).max(0.0).sqrt()
}

fn plan(p: &Polyhedron, v: usize) -> Result<Plan> {
    let report = p.classify_vertices();
    if v >= report.kinds.len() {
        return Err(Error::InvalidArgument(format!("no vertex {v}")));
    }
    if report.kinds[v] != PointKind::Real {
        return Err(Error::InvalidArgument(format!("vertex {v} is not real")));
    }
    let x = p.vertices()[v];
    let u = x.normalize();
    // an almost proper incidence of v, if any
    let mut host = None;
    let mut polars = Vec::new();
    for (w, kind) in report.kinds.iter().enumerate() {
        if *kind != PointKind::Hyperideal {
            continue;
        }
        let polar = polar_plane(&p.vertex(w))?;
        if polar.signed_distance(&x).abs() <= ON_POLAR && host.is_none() {
            host = Some((w, polar));
        } else {
            polars.push(polar);
        }
    }
    // separating plane {x . u = c}: v on one side, every other real vertex and
    // every remaining truncation disk on the other
    let mut low = f64::NEG_INFINITY;
    for (w, kind) in report.kinds.iter().enumerate() {
        if w != v && *kind == PointKind::Real {
            low = low.max(p.vertices()[w].dot(&u));
        }
    }
    for polar in &polars {
        low = low.max(disk_extent(polar, &u));
    }
    if low >= x.norm() {
        return Err(Error::NoSeparatingPlane(v));
    }
    let c = 0.5 * (low.max(-x.norm()) + x.norm());
    match host {
        None => Ok(Plan { chart: Isometry::boost_to_origin(&(u * c)), direction: u }),
        Some((_, polar)) => {
            // chart in which the host's polar plane is equatorial
            let (m, d) = polar.affine();
            let foot = m * (d / m.norm_squared());
            let chart = Isometry::boost_to_origin(&foot);
            let moved = chart.apply_plane(&polar);
            let (mm, _) = moved.affine();
            let b = -mm.normalize();
            let y = chart.apply_vec(&x);
            let along = y - b * y.dot(&b);
            let a = if along.norm() > 1e-12 { along.normalize() } else { Vec3::zeros() };
            Ok(Plan { chart, direction: (a + b).normalize() })
        }
    }
}

fn translate_in_chart(p: &Polyhedron, chart: &Isometry, vector: Vec3) -> Result<Polyhedron> {
    let t = AffineDeformation::Translation { vector };
    let back = chart.inverse();
    let planes = p
        .planes()
        .iter()
        .map(|pl| Ok(back.apply_plane(&t.apply_plane(&chart.apply_plane(pl))?)))
        .collect::<Result<Vec<_>>>()?;
    Polyhedron::build(planes, p.skeleton().clone())
}

/// Translates `p` by `magnitude` along the normal of a plane separating the
/// real vertex `v` from the other real vertices and the truncation disks,
/// in the chart where that plane passes through the origin. When `v` lies on
/// the polar plane of a hyperideal vertex `w`, the translation is carried out
/// in the chart where that polar plane passes through the origin, with an
/// added component along its normal that moves `v` off it.
pub fn escape_deformation(p: &Polyhedron, v: usize, magnitude: f64) -> Result<Polyhedron> {
    let plan = plan(p, v)?;
    if magnitude == 0.0 {
        return Ok(p.clone());
    }
    translate_in_chart(p, &plan.chart, plan.direction * magnitude)
}

/// Escape translation sized so that `v` lands at Euclidean norm `1 + eta`.
pub fn escape_to_sphere(p: &Polyhedron, v: usize, eta: f64) -> Result<Polyhedron> {
    let plan = plan(p, v)?;
    let y = plan.chart.apply_vec(&p.vertices()[v]);
    let d = plan.direction;
    let b = y.dot(&d);
    let disc = b * b - y.norm_squared() + (1.0 + eta).powi(2);
    if disc < 0.0 {
        return Err(Error::NoSeparatingPlane(v));
    }
    let lambda = -b + disc.sqrt();
    translate_in_chart(p, &plan.chart, d * lambda)
}

/// Moves the real vertex `v` strictly inside the polar half-space of `w` by a
/// translation along the polar plane's normal, in the chart where that plane
/// passes through the origin (so the plane itself stays put).
pub(crate) fn free_incidence(p: &Polyhedron, v: usize, w: usize, margin: f64) -> Result<Polyhedron> {
    let polar = polar_plane(&p.vertex(w))?;
    let (m, d) = polar.affine();
    let chart = Isometry::boost_to_origin(&(m * (d / m.norm_squared())));
    let (mm, _) = chart.apply_plane(&polar).affine();
    let b = -mm.normalize();
    let mut size = margin;
    for _ in 0..40 {
        let q = translate_in_chart(p, &chart, b * size)?;
        let moved = polar_plane(&q.vertex(w))?;
        if moved.signed_distance(&q.vertices()[v]) < -margin {
            return Ok(q);
        }
        size *= 2.0;
    }
    Err(Error::PropernessLost)
}

/// Signed distance from each real vertex to each hyperideal polar plane, as
/// `(real, hyperideal, distance)`; positive means outside the polar half-space.
pub(crate) fn polar_gaps(p: &Polyhedron, kinds: &[PointKind]) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for (w, kw) in kinds.iter().enumerate() {
        if *kw != PointKind::Hyperideal {
            continue;
        }
        let Ok(polar) = polar_plane(&p.vertex(w)) else { continue };
        for (v, kv) in kinds.iter().enumerate() {
            if v != w && *kv == PointKind::Real {
                out.push((v, w, polar.signed_distance(&p.vertices()[v])));
            }
        }
    }
    out
}

/// Band around a polar plane in which a real vertex counts as lying on it.
pub(crate) const ONSET_BAND: f64 = TAU_IDEAL;
