//! Minkowski-lift primitives for the Klein model of hyperbolic 3-space.
//!
//! Hyperbolic space is the open unit ball of the affine chart `R^3 ⊂ RP^3`.
//! A chart point `x` lifts to `(1, x)` in `R^{3,1}` with the form
//! `<a, b> = -a0 b0 + a1 b1 + a2 b2 + a3 b3`; the sign of `<X, X>` tells
//! whether the point is inside, on, or outside the sphere at infinity.
//!
//! A plane is stored through a Minkowski normal `n`; the selected closed
//! half-space is `{ X : <n, X> <= 0 }`, so the normal points away from it.
//! Planes meeting the ball have spacelike normals, normalized to `<n, n> = 1`,
//! and the interior dihedral angle of two such half-spaces is
//! `acos(-<n1, n2>)`.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::tolerances::TAU_IDEAL;

pub type Vec3 = Vector3<f64>;
pub type Vec4 = Vector4<f64>;

/// The Minkowski form of signature (-, +, +, +).
#[inline]
pub fn minkowski(a: &Vec4, b: &Vec4) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Lift of a chart point: `(1, x, y, z)`.
#[inline]
pub fn lift(x: &Vec3) -> Vec4 {
    Vec4::new(1.0, x[0], x[1], x[2])
}

#[inline]
fn spatial(v: &Vec4) -> Vec3 {
    Vec3::new(v[1], v[2], v[3])
}

/// A point of `RP^3`, either in the fixed affine chart or on the plane at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectivePoint {
    chart_coords: Vec3,
    at_infinity: bool,
}

impl ProjectivePoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self::from_vec(Vec3::new(x, y, z))
    }

    pub fn from_vec(v: Vec3) -> Self {
        Self { chart_coords: v, at_infinity: false }
    }

    /// The point at infinity in direction `dir`.
    pub fn at_infinity(dir: Vec3) -> Self {
        Self { chart_coords: dir, at_infinity: true }
    }

    /// Dehomogenizes a 4-vector; tiny weights are treated as points at infinity.
    pub fn from_lift(v: &Vec4) -> Self {
        let s = spatial(v);
        if v[0].abs() <= 1e-14 * s.norm().max(1e-300) {
            Self::at_infinity(s)
        } else {
            Self::from_vec(s / v[0])
        }
    }

    /// Chart coordinates (a direction for points at infinity).
    pub fn coords(&self) -> &Vec3 {
        &self.chart_coords
    }

    pub fn is_at_infinity(&self) -> bool {
        self.at_infinity
    }

    pub fn lift(&self) -> Vec4 {
        if self.at_infinity {
            Vec4::new(0.0, self.chart_coords[0], self.chart_coords[1], self.chart_coords[2])
        } else {
            lift(&self.chart_coords)
        }
    }

    /// Minkowski square of the lift, `|x|^2 - 1` for chart points.
    pub fn minkowski_square(&self) -> f64 {
        let l = self.lift();
        minkowski(&l, &l)
    }

    pub fn norm(&self) -> f64 {
        if self.at_infinity {
            f64::INFINITY
        } else {
            self.chart_coords.norm()
        }
    }
}

/// Position of a point relative to the hyperbolic ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointKind {
    Real,
    Ideal,
    Hyperideal,
}

impl std::fmt::Display for PointKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PointKind::Real => "Real",
            PointKind::Ideal => "Ideal",
            PointKind::Hyperideal => "Hyperideal",
        };
        f.write_str(s)
    }
}

/// Classifies a point with the default ideal band.
pub fn classify_point(p: &ProjectivePoint) -> PointKind {
    classify_point_with(p, TAU_IDEAL)
}

pub fn classify_point_with(p: &ProjectivePoint, tau: f64) -> PointKind {
    if p.is_at_infinity() {
        return PointKind::Hyperideal;
    }
    let r = p.coords().norm();
    if (r - 1.0).abs() <= tau {
        PointKind::Ideal
    } else if r < 1.0 {
        PointKind::Real
    } else {
        PointKind::Hyperideal
    }
}

/// A projective plane together with one of its closed half-spaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedPlane {
    normal: Vec4,
}

impl OrientedPlane {
    /// Wraps a Minkowski normal; spacelike normals are scaled to unit square,
    /// others to unit Euclidean length of the spatial part.
    pub fn from_normal(n: Vec4) -> Self {
        let q = minkowski(&n, &n);
        let scale = if q > 0.0 {
            q.sqrt()
        } else {
            let s = spatial(&n).norm();
            if s > 0.0 {
                s
            } else {
                n.norm()
            }
        };
        // already normalized input is kept bit for bit
        if (scale - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Self { normal: n };
        }
        Self { normal: n / scale }
    }

    /// The half-space `{ x : m . x <= d }`.
    pub fn from_affine(m: Vec3, d: f64) -> Self {
        Self::from_normal(Vec4::new(d, m[0], m[1], m[2]))
    }

    /// Plane through three chart points, oriented so that `inside` is kept.
    pub fn through_points(a: &Vec3, b: &Vec3, c: &Vec3, inside: &Vec3) -> Option<Self> {
        let m = (b - a).cross(&(c - a));
        let len = m.norm();
        if len < 1e-300 {
            return None;
        }
        let m = m / len;
        let d = m.dot(a);
        let plane = Self::from_affine(m, d);
        Some(if plane.eval(inside) > 0.0 { plane.flipped() } else { plane })
    }

    pub fn normal(&self) -> &Vec4 {
        &self.normal
    }

    /// Euclidean data `(m, d)` of the half-space `m . x <= d`.
    pub fn affine(&self) -> (Vec3, f64) {
        (spatial(&self.normal), self.normal[0])
    }

    /// The complementary half-space.
    pub fn flipped(&self) -> Self {
        Self { normal: -self.normal }
    }

    /// `<n, (1, x)>`; nonpositive exactly on the selected half-space.
    #[inline]
    pub fn eval(&self, x: &Vec3) -> f64 {
        minkowski(&self.normal, &lift(x))
    }

    /// Signed Euclidean distance from `x` to the plane, positive outside.
    pub fn signed_distance(&self, x: &Vec3) -> f64 {
        let (m, d) = self.affine();
        (m.dot(x) - d) / m.norm()
    }

    pub fn contains(&self, x: &Vec3, slack: f64) -> bool {
        self.signed_distance(x) <= slack
    }

    pub fn minkowski_square(&self) -> f64 {
        minkowski(&self.normal, &self.normal)
    }

    /// True when the plane meets the open ball.
    pub fn meets_ball(&self) -> bool {
        self.minkowski_square() > 0.0 && self.euclidean_offset() < 1.0
    }

    /// Euclidean distance from the origin to the plane.
    pub fn euclidean_offset(&self) -> f64 {
        let (m, d) = self.affine();
        d.abs() / m.norm()
    }

    /// The pole of the plane (the point whose polar plane this is).
    pub fn pole(&self) -> ProjectivePoint {
        let (m, d) = self.affine();
        if d.abs() <= 1e-14 * m.norm() {
            ProjectivePoint::at_infinity(m)
        } else {
            ProjectivePoint::from_vec(m / d)
        }
    }

    /// Applies a Lorentz transformation.
    pub fn transformed(&self, iso: &Isometry) -> Self {
        Self::from_normal(iso.matrix() * self.normal)
    }
}

/// Polar plane of a hyperideal point, with the half-space containing the origin.
pub fn polar_plane(p: &ProjectivePoint) -> Result<OrientedPlane> {
    if p.is_at_infinity() {
        return Ok(OrientedPlane::from_normal(p.lift()));
    }
    let norm = p.coords().norm();
    if norm <= 1.0 + TAU_IDEAL {
        return Err(Error::PoleNotHyperideal { norm });
    }
    Ok(OrientedPlane::from_affine(*p.coords(), 1.0))
}

/// How the chart line through two hyperideal points meets the ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleSeparation {
    SegmentThrough,
    HalfLineThrough,
    Neither,
}

/// Smallest `|a + s (b - a)|` over `s` in `[lo, hi]`.
fn min_norm_on_line(a: &Vec3, b: &Vec3, lo: f64, hi: f64) -> f64 {
    let d = b - a;
    let dd = d.norm_squared();
    let s = if dd > 0.0 { (-a.dot(&d) / dd).clamp(lo, hi) } else { lo };
    (a + d * s).norm()
}

/// Classifies the segment `pq` and the half-line from `p` through `q`.
pub fn poles_separated(p: &ProjectivePoint, q: &ProjectivePoint) -> Result<PoleSeparation> {
    for x in [p, q] {
        if crate::mink::classify_point(x) != PointKind::Hyperideal || x.is_at_infinity() {
            return Err(Error::PoleNotHyperideal { norm: x.norm() });
        }
    }
    let (a, b) = (p.coords(), q.coords());
    if min_norm_on_line(a, b, 0.0, 1.0) < 1.0 {
        Ok(PoleSeparation::SegmentThrough)
    } else if min_norm_on_line(a, b, 0.0, f64::INFINITY) < 1.0 {
        Ok(PoleSeparation::HalfLineThrough)
    } else {
        Ok(PoleSeparation::Neither)
    }
}

/// Interior dihedral angle between two selected half-spaces.
pub fn dihedral_angle(a: &OrientedPlane, b: &OrientedPlane) -> Result<f64> {
    let (na, nb) = (a.normal(), b.normal());
    if (na - nb).norm() <= 1e-12 * na.norm() || (na + nb).norm() <= 1e-12 * na.norm() {
        return Err(Error::PlanesEqual);
    }
    if a.minkowski_square() <= 0.0 || b.minkowski_square() <= 0.0 {
        return Err(Error::PlanesDisjointInBall { cosine: f64::NAN });
    }
    let cosine = -minkowski(na, nb);
    if cosine.abs() > 1.0 + 1e-9 {
        return Err(Error::PlanesDisjointInBall { cosine });
    }
    Ok(cosine.clamp(-1.0, 1.0).acos())
}

/// Hyperbolic distance between two real points.
pub fn distance_points(x: &ProjectivePoint, y: &ProjectivePoint) -> Result<f64> {
    let (ax, ay) = (require_real(x)?, require_real(y)?);
    let num = 1.0 - ax.dot(&ay);
    let den = ((1.0 - ax.norm_squared()) * (1.0 - ay.norm_squared())).sqrt();
    Ok(acosh_clamped(num / den))
}

/// Hyperbolic distance from a real point to a plane meeting the ball.
pub fn distance_point_plane(x: &ProjectivePoint, plane: &OrientedPlane) -> Result<f64> {
    let ax = require_real(x)?;
    if plane.minkowski_square() <= 0.0 {
        return Err(Error::PlanesDisjointInBall { cosine: f64::NAN });
    }
    let lx = lift(&ax);
    let s = minkowski(plane.normal(), &lx).abs() / (-minkowski(&lx, &lx)).sqrt();
    Ok(s.asinh())
}

/// Distance between two planes meeting the ball; zero if they meet in the closed ball.
pub fn distance_planes(a: &OrientedPlane, b: &OrientedPlane) -> Result<f64> {
    if a.minkowski_square() <= 0.0 || b.minkowski_square() <= 0.0 {
        return Err(Error::PlanesDisjointInBall { cosine: f64::NAN });
    }
    let c = minkowski(a.normal(), b.normal()).abs();
    Ok(if c <= 1.0 { 0.0 } else { c.acosh() })
}

fn require_real(x: &ProjectivePoint) -> Result<Vec3> {
    if x.is_at_infinity() || x.coords().norm() >= 1.0 {
        return Err(Error::OutsideModel { norm: x.norm() });
    }
    Ok(*x.coords())
}

fn acosh_clamped(c: f64) -> f64 {
    if c <= 1.0 {
        0.0
    } else {
        c.acosh()
    }
}

/// A homothety or translation of the affine chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AffineDeformation {
    Homothety { center: Vec3, factor: f64 },
    Translation { vector: Vec3 },
}

impl AffineDeformation {
    pub fn identity() -> Self {
        AffineDeformation::Translation { vector: Vec3::zeros() }
    }

    /// `(lambda, b)` with the map `x -> lambda x + b`.
    fn linear_part(&self) -> (f64, Vec3) {
        match *self {
            AffineDeformation::Homothety { center, factor } => (factor, center * (1.0 - factor)),
            AffineDeformation::Translation { vector } => (1.0, vector),
        }
    }

    fn validate(&self) -> Result<()> {
        if let AffineDeformation::Homothety { factor, .. } = *self {
            if !(factor > 0.0) || !factor.is_finite() {
                return Err(Error::DegenerateDeformation { factor });
            }
        }
        Ok(())
    }

    /// The deformation `next ∘ self`. Two translations give a translation; two
    /// homotheties give a homothety unless the factors cancel.
    pub fn then(&self, next: &AffineDeformation) -> AffineDeformation {
        let (l1, b1) = self.linear_part();
        let (l2, b2) = next.linear_part();
        let lambda = l1 * l2;
        let b = b1 * l2 + b2;
        if (lambda - 1.0).abs() <= 1e-15 {
            AffineDeformation::Translation { vector: b }
        } else {
            AffineDeformation::Homothety { center: b / (1.0 - lambda), factor: lambda }
        }
    }

    pub fn apply_vec(&self, x: &Vec3) -> Result<Vec3> {
        self.validate()?;
        let (l, b) = self.linear_part();
        Ok(x * l + b)
    }

    pub fn apply_point(&self, p: &ProjectivePoint) -> Result<ProjectivePoint> {
        self.validate()?;
        if p.is_at_infinity() {
            return Ok(*p);
        }
        Ok(ProjectivePoint::from_vec(self.apply_vec(p.coords())?))
    }

    /// Image of a half-space; the side is carried along.
    pub fn apply_plane(&self, plane: &OrientedPlane) -> Result<OrientedPlane> {
        self.validate()?;
        let (l, b) = self.linear_part();
        let (m, d) = plane.affine();
        Ok(OrientedPlane::from_affine(m, l * d + m.dot(&b)))
    }

    pub fn apply_planes(&self, planes: &[OrientedPlane]) -> Result<Vec<OrientedPlane>> {
        planes.iter().map(|p| self.apply_plane(p)).collect()
    }

    pub fn apply_points(&self, points: &[ProjectivePoint]) -> Result<Vec<ProjectivePoint>> {
        points.iter().map(|p| self.apply_point(p)).collect()
    }
}

/// An isometry of hyperbolic space: a Lorentz transformation acting on lifts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry(Matrix4<f64>);

impl Isometry {
    pub fn identity() -> Self {
        Isometry(Matrix4::identity())
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    /// A rotation fixing the origin.
    pub fn rotation(r: &Matrix3<f64>) -> Self {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(r);
        Isometry(m)
    }

    /// The boost taking the real point `p` to the origin.
    pub fn boost_to_origin(p: &Vec3) -> Self {
        let b2 = p.norm_squared();
        assert!(b2 < 1.0, "boost centre must be a real point");
        let gamma = 1.0 / (1.0 - b2).sqrt();
        let k = gamma * gamma / (gamma + 1.0);
        let mut m = Matrix4::identity();
        m[(0, 0)] = gamma;
        for i in 0..3 {
            m[(0, i + 1)] = -gamma * p[i];
            m[(i + 1, 0)] = -gamma * p[i];
            for j in 0..3 {
                m[(i + 1, j + 1)] += k * p[i] * p[j];
            }
        }
        Isometry(m)
    }

    /// `self` applied after `first`.
    pub fn after(&self, first: &Isometry) -> Isometry {
        Isometry(self.0 * first.0)
    }

    pub fn inverse(&self) -> Isometry {
        let eta = Matrix4::from_diagonal(&Vec4::new(-1.0, 1.0, 1.0, 1.0));
        Isometry(eta * self.0.transpose() * eta)
    }

    pub fn apply_point(&self, p: &ProjectivePoint) -> ProjectivePoint {
        ProjectivePoint::from_lift(&(self.0 * p.lift()))
    }

    pub fn apply_vec(&self, x: &Vec3) -> Vec3 {
        let v = self.0 * lift(x);
        spatial(&v) / v[0]
    }

    pub fn apply_plane(&self, plane: &OrientedPlane) -> OrientedPlane {
        plane.transformed(self)
    }
}

/// Rotation matrix taking the unit vector `from` to the unit vector `to`.
pub fn rotation_between(from: &Vec3, to: &Vec3) -> Matrix3<f64> {
    let f = from.normalize();
    let t = to.normalize();
    let v = f.cross(&t);
    let c = f.dot(&t);
    if c < -1.0 + 1e-15 {
        // half turn about any axis orthogonal to `from`
        let axis = if f[0].abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let a = (axis - f * f.dot(&axis)).normalize();
        return a * a.transpose() * 2.0 - Matrix3::identity();
    }
    let vx = Matrix3::new(0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0);
    Matrix3::identity() + vx + vx * vx * (1.0 / (1.0 + c))
}

/// Rotation about the z axis by `angle`.
pub fn rotation_z(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn unit(rng: &mut ChaCha8Rng) -> Vec3 {
        loop {
            let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let n = v.norm();
            if n > 0.1 && n < 1.0 {
                return v / n;
            }
        }
    }

    /// Klein metric at `q` evaluated on tangent vectors.
    fn klein_metric(q: &Vec3, u: &Vec3, v: &Vec3) -> f64 {
        let s = 1.0 - q.norm_squared();
        u.dot(v) / s + q.dot(u) * q.dot(v) / (s * s)
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_point(&ProjectivePoint::new(0.0, 0.0, 0.0)), PointKind::Real);
        assert_eq!(classify_point(&ProjectivePoint::new(1.0, 0.0, 0.0)), PointKind::Ideal);
        assert_eq!(classify_point(&ProjectivePoint::new(2.0, 0.0, 0.0)), PointKind::Hyperideal);
        assert_eq!(classify_point(&ProjectivePoint::new(0.0, 1.0 + 5e-10, 0.0)), PointKind::Ideal);
        assert_eq!(classify_point(&ProjectivePoint::at_infinity(Vec3::x())), PointKind::Hyperideal);
    }

    #[test]
    fn polar_plane_examples() {
        let p = polar_plane(&ProjectivePoint::new(2.0, 0.0, 0.0)).unwrap();
        let (m, d) = p.affine();
        assert!((d / m[0] - 0.5).abs() < 1e-15 && m[1] == 0.0 && m[2] == 0.0);
        assert!(p.contains(&Vec3::zeros(), 0.0));
        assert!(!p.contains(&Vec3::new(0.6, 0.0, 0.0), 0.0));

        let pz = polar_plane(&ProjectivePoint::new(0.0, 0.0, 2.0)).unwrap();
        assert!((pz.signed_distance(&Vec3::new(0.3, -0.2, 0.5))).abs() < 1e-15);

        let p10 = polar_plane(&ProjectivePoint::new(10.0, 0.0, 0.0)).unwrap();
        assert!((p10.euclidean_offset() - 0.1).abs() < 1e-15);
        // pushing the pole outward pulls the polar plane towards the origin
        let mut last = f64::INFINITY;
        for r in [1.5, 2.0, 4.0, 10.0, 100.0] {
            let off = polar_plane(&ProjectivePoint::new(r, 0.0, 0.0)).unwrap().euclidean_offset();
            assert!(off < last);
            last = off;
        }

        assert!(matches!(
            polar_plane(&ProjectivePoint::new(1.0, 0.0, 0.0)),
            Err(Error::PoleNotHyperideal { .. })
        ));
    }

    #[test]
    fn lines_through_pole_cross_polar_orthogonally() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [Vec3::new(2.0, 0.0, 0.0), Vec3::new(10.0, 0.0, 0.0), Vec3::new(0.3, -1.4, 0.9)] {
            let plane = polar_plane(&ProjectivePoint::from_vec(p)).unwrap();
            let (m, d) = plane.affine();
            for _ in 0..10 {
                // random line through p and a random point of the ball
                let q = unit(&mut rng) * rng.random_range(0.0..0.9);
                let dir = q - p;
                let s = (d - m.dot(&p)) / m.dot(&dir);
                let x = p + dir * s;
                assert!(x.norm() < 1.0);
                // tangent vectors of the plane at x
                let t1 = m.cross(&Vec3::new(0.3, 0.7, -0.2)).normalize();
                let t2 = m.cross(&t1).normalize();
                assert!(klein_metric(&x, &dir, &t1).abs() < 1e-12 * dir.norm());
                assert!(klein_metric(&x, &dir, &t2).abs() < 1e-12 * dir.norm());
            }
        }
    }

    #[test]
    fn polar_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p = unit(&mut rng) * rng.random_range(1.01..20.0);
            let pole = polar_plane(&ProjectivePoint::from_vec(p)).unwrap().pole();
            assert!((pole.coords() - p).norm() < 1e-10);
        }
    }

    #[test]
    fn pole_separation_examples() {
        let sep = |a: Vec3, b: Vec3| {
            poles_separated(&ProjectivePoint::from_vec(a), &ProjectivePoint::from_vec(b)).unwrap()
        };
        assert_eq!(sep(Vec3::new(-2.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0)), PoleSeparation::SegmentThrough);
        assert_eq!(sep(Vec3::new(4.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0)), PoleSeparation::HalfLineThrough);
        assert_eq!(sep(Vec3::new(2.0, 0.0, 0.0), Vec3::new(0.0, 2.5, 0.0)), PoleSeparation::Neither);
        assert!(poles_separated(&ProjectivePoint::new(0.5, 0.0, 0.0), &ProjectivePoint::new(2.0, 0.0, 0.0)).is_err());
    }

    fn random_plane_point(plane: &OrientedPlane, rng: &mut ChaCha8Rng) -> Vec3 {
        let (m, d) = plane.affine();
        let foot = m * (d / m.norm_squared());
        let radius = (1.0 - foot.norm_squared()).sqrt();
        let t1 = m.cross(&Vec3::new(0.3, 0.7, -0.2)).normalize();
        let t2 = m.normalize().cross(&t1);
        loop {
            let (a, b) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if a * a + b * b < 1.0 {
                return foot + (t1 * a + t2 * b) * radius * 0.999;
            }
        }
    }

    #[test]
    fn segment_through_containments() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut cases = 0;
        while cases < 5 {
            let p = unit(&mut rng) * rng.random_range(1.1..4.0);
            let q = unit(&mut rng) * rng.random_range(1.1..4.0);
            let (pp, qq) = (ProjectivePoint::from_vec(p), ProjectivePoint::from_vec(q));
            if poles_separated(&pp, &qq).unwrap() != PoleSeparation::SegmentThrough {
                continue;
            }
            cases += 1;
            assert_eq!(poles_separated(&qq, &pp).unwrap(), PoleSeparation::SegmentThrough);
            let (hp, hq) = (polar_plane(&pp).unwrap(), polar_plane(&qq).unwrap());
            for _ in 0..1000 {
                assert!(hq.eval(&random_plane_point(&hp, &mut rng)) < 0.0);
                assert!(hp.eval(&random_plane_point(&hq, &mut rng)) < 0.0);
            }
        }
    }

    #[test]
    fn half_line_containment() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (hp, hq) = (
            polar_plane(&ProjectivePoint::new(4.0, 0.0, 0.0)).unwrap(),
            polar_plane(&ProjectivePoint::new(2.0, 0.0, 0.0)).unwrap(),
        );
        for _ in 0..1000 {
            let x = unit(&mut rng) * rng.random_range(0.0f64..1.0).cbrt();
            // H_p is contained in H_q
            if hp.eval(&x) <= 0.0 {
                assert!(hq.eval(&x) <= 0.0);
            }
        }
    }

    #[test]
    fn dihedral_examples() {
        let a = OrientedPlane::from_affine(Vec3::new(-1.0, 0.0, 0.0), 0.0);
        let b = OrientedPlane::from_affine(Vec3::new(0.0, -1.0, 0.0), 0.0);
        assert!((dihedral_angle(&a, &b).unwrap() - FRAC_PI_2).abs() < 1e-15);

        // z >= 0 and y + z <= 1 meet along a line tangent to the sphere at (0, 1, 0)
        let c = OrientedPlane::from_affine(Vec3::new(0.0, 0.0, -1.0), 0.0);
        let d = OrientedPlane::from_affine(Vec3::new(0.0, 1.0, 1.0), 1.0);
        assert!(dihedral_angle(&c, &d).unwrap().abs() < 1e-7);

        assert_eq!(dihedral_angle(&a, &a), Err(Error::PlanesEqual));
        assert_eq!(dihedral_angle(&a, &a.flipped()), Err(Error::PlanesEqual));
        let far1 = OrientedPlane::from_affine(Vec3::x(), 0.9);
        let far2 = OrientedPlane::from_affine(-Vec3::x(), 0.9);
        assert!(matches!(dihedral_angle(&far1, &far2), Err(Error::PlanesDisjointInBall { .. })));
    }

    /// Oracle: angle between geodesics orthogonal to the intersection line,
    /// measured with the Klein metric at a point of the line.
    fn geodesic_angle(a: &OrientedPlane, b: &OrientedPlane) -> Option<f64> {
        let (ma, da) = a.affine();
        let (mb, db) = b.affine();
        let dir = ma.cross(&mb);
        // point on the line closest to the origin
        let m = nalgebra::Matrix3::from_rows(&[ma.transpose(), mb.transpose(), dir.transpose()]);
        let q = m.try_inverse()? * Vec3::new(da, db, 0.0);
        if q.norm() >= 0.95 {
            return None;
        }
        // tangent vector in plane a orthogonal (Klein metric) to the line
        let orth = |n: &Vec3| -> Vec3 {
            let t = n.cross(&dir);
            t - dir * (klein_metric(&q, &t, &dir) / klein_metric(&q, &dir, &dir))
        };
        let mut ua = orth(&ma);
        let mut ub = orth(&mb);
        // point into the other half-space
        if mb.dot(&ua) > 0.0 {
            ua = -ua;
        }
        if ma.dot(&ub) > 0.0 {
            ub = -ub;
        }
        let c = klein_metric(&q, &ua, &ub) / (klein_metric(&q, &ua, &ua) * klein_metric(&q, &ub, &ub)).sqrt();
        Some(c.clamp(-1.0, 1.0).acos())
    }

    #[test]
    fn dihedral_matches_geodesic_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut checked = 0;
        while checked < 200 {
            let a = OrientedPlane::from_affine(unit(&mut rng), rng.random_range(-0.6..0.6));
            let b = OrientedPlane::from_affine(unit(&mut rng), rng.random_range(-0.6..0.6));
            let Some(expected) = geodesic_angle(&a, &b) else { continue };
            let got = dihedral_angle(&a, &b).unwrap();
            assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
            assert!((dihedral_angle(&b, &a).unwrap() - got).abs() < 1e-15);
            let iso = Isometry::boost_to_origin(&(unit(&mut rng) * 0.6))
                .after(&Isometry::rotation(&rotation_between(&Vec3::x(), &unit(&mut rng))));
            let moved = dihedral_angle(&a.transformed(&iso), &b.transformed(&iso)).unwrap();
            assert!((moved - got).abs() < 1e-10);
            checked += 1;
        }
    }

    #[test]
    fn distance_examples() {
        let o = ProjectivePoint::new(0.0, 0.0, 0.0);
        assert_eq!(distance_points(&o, &o).unwrap(), 0.0);
        let x = ProjectivePoint::new(1f64.tanh(), 0.0, 0.0);
        let d = distance_points(&x, &o).unwrap();
        assert!((d - 1.0).abs() < 1e-14);
        // oracle: integrate the Klein line element along the segment
        let n = 20_000;
        let end = 1f64.tanh();
        let mut integral = 0.0;
        for i in 0..n {
            let r = (i as f64 + 0.5) / n as f64 * end;
            let q = Vec3::new(r, 0.0, 0.0);
            let v = Vec3::new(end, 0.0, 0.0);
            integral += klein_metric(&q, &v, &v).sqrt() / n as f64;
        }
        assert!((integral - d).abs() < 1e-7);

        let plane = OrientedPlane::from_affine(Vec3::x(), 0.0);
        assert!((distance_point_plane(&x, &plane).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(distance_points(&ProjectivePoint::new(1.5, 0.0, 0.0), &o), Err(Error::OutsideModel { .. })));

        let p1 = OrientedPlane::from_affine(Vec3::x(), 0.5);
        let p2 = OrientedPlane::from_affine(-Vec3::x(), 0.5);
        // disjoint planes x = 0.5 and x = -0.5: distance between their closest points
        let expected = distance_points(&ProjectivePoint::new(0.5, 0.0, 0.0), &ProjectivePoint::new(-0.5, 0.0, 0.0)).unwrap();
        assert!((distance_planes(&p1, &p2).unwrap() - expected).abs() < 1e-12);
        let p3 = OrientedPlane::from_affine(Vec3::y(), 0.0);
        assert_eq!(distance_planes(&p1, &p3).unwrap(), 0.0);
    }

    #[test]
    fn deformation_examples() {
        let id = AffineDeformation::Homothety { center: Vec3::new(0.1, 0.2, 0.3), factor: 1.0 };
        let p = ProjectivePoint::new(0.3, -0.4, 0.5);
        assert_eq!(id.apply_point(&p).unwrap(), p);
        let plane = OrientedPlane::from_affine(Vec3::new(0.0, 0.6, 0.8), 0.3);
        let img = id.apply_plane(&plane).unwrap();
        assert!((img.normal() - plane.normal()).norm() < 1e-15);

        let h = AffineDeformation::Homothety { center: Vec3::zeros(), factor: 2.0 };
        assert_eq!(*h.apply_point(&ProjectivePoint::new(0.3, 0.0, 0.0)).unwrap().coords(), Vec3::new(0.6, 0.0, 0.0));

        let bad = AffineDeformation::Homothety { center: Vec3::zeros(), factor: 0.0 };
        assert!(matches!(bad.apply_point(&p), Err(Error::DegenerateDeformation { .. })));
    }

    #[test]
    fn tangent_cone_translation_restores_properness() {
        let v = ProjectivePoint::new(2.0, 0.0, 0.0);
        let w = ProjectivePoint::new(0.49, 0.0, 0.0);
        assert!(polar_plane(&v).unwrap().eval(w.coords()) <= 0.0);
        let t = AffineDeformation::Translation { vector: Vec3::new(-0.05, 0.0, 0.0) };
        let (v2, w2) = (t.apply_point(&v).unwrap(), t.apply_point(&w).unwrap());
        // the image of v stays inside the tangent cone from v (it moved toward the ball)
        assert!(polar_plane(&v2).unwrap().eval(w2.coords()) < 0.0);
    }

    #[test]
    fn deformation_commutes_with_plane_images() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let d = if rng.random_bool(0.5) {
                AffineDeformation::Homothety { center: unit(&mut rng) * 0.3, factor: rng.random_range(0.5..2.0) }
            } else {
                AffineDeformation::Translation { vector: unit(&mut rng) * 0.2 }
            };
            let planes: Vec<_> = (0..3).map(|_| OrientedPlane::from_affine(unit(&mut rng), rng.random_range(-0.5..0.5))).collect();
            let m = Matrix3::from_rows(&[
                planes[0].affine().0.transpose(),
                planes[1].affine().0.transpose(),
                planes[2].affine().0.transpose(),
            ]);
            let rhs = Vec3::new(planes[0].affine().1, planes[1].affine().1, planes[2].affine().1);
            let vertex = m.try_inverse().unwrap() * rhs;
            let moved = d.apply_vec(&vertex).unwrap();
            for pl in d.apply_planes(&planes).unwrap() {
                assert!(pl.signed_distance(&moved).abs() < 1e-9);
            }
            // side carried along: an interior point stays interior
            let inside = vertex - (planes[0].affine().0 + planes[1].affine().0 + planes[2].affine().0) * 0.1;
            let img_inside = d.apply_vec(&inside).unwrap();
            for (pl, img) in planes.iter().zip(d.apply_planes(&planes).unwrap()) {
                assert_eq!(pl.eval(&inside) <= 0.0, img.eval(&img_inside) <= 0.0);
            }
        }
    }

    #[test]
    fn deformation_composition_keeps_kind() {
        let a = AffineDeformation::Translation { vector: Vec3::new(0.1, 0.0, 0.0) };
        let b = AffineDeformation::Translation { vector: Vec3::new(0.0, 0.2, 0.0) };
        assert_eq!(a.then(&b), AffineDeformation::Translation { vector: Vec3::new(0.1, 0.2, 0.0) });
        let h1 = AffineDeformation::Homothety { center: Vec3::new(0.1, 0.0, 0.0), factor: 2.0 };
        let h2 = AffineDeformation::Homothety { center: Vec3::new(0.1, 0.0, 0.0), factor: 1.5 };
        match h1.then(&h2) {
            AffineDeformation::Homothety { center, factor } => {
                assert!((factor - 3.0).abs() < 1e-15);
                assert!((center - Vec3::new(0.1, 0.0, 0.0)).norm() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
        let x = Vec3::new(0.3, 0.1, -0.2);
        let composed = h1.then(&a).apply_vec(&x).unwrap();
        assert!((composed - a.apply_vec(&h1.apply_vec(&x).unwrap()).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn isometries_preserve_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..100 {
            let iso = Isometry::boost_to_origin(&(unit(&mut rng) * rng.random_range(0.0..0.9)))
                .after(&Isometry::rotation(&rotation_between(&Vec3::z(), &unit(&mut rng))));
            let x = ProjectivePoint::from_vec(unit(&mut rng) * rng.random_range(0.0..0.9));
            let y = ProjectivePoint::from_vec(unit(&mut rng) * rng.random_range(0.0..0.9));
            let d0 = distance_points(&x, &y).unwrap();
            let d1 = distance_points(&iso.apply_point(&x), &iso.apply_point(&y)).unwrap();
            assert!((d0 - d1).abs() < 1e-9);
            let inv = iso.inverse();
            assert!((inv.apply_vec(&iso.apply_vec(x.coords())) - x.coords()).norm() < 1e-12);
        }
        let p = Vec3::new(0.3, -0.2, 0.5);
        assert!(Isometry::boost_to_origin(&p).apply_vec(&p).norm() < 1e-15);
    }

    #[test]
    fn classification_matches_minkowski_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..1000 {
            let p = ProjectivePoint::from_vec(unit(&mut rng) * rng.random_range(0.0..3.0));
            let q = p.minkowski_square();
            match classify_point(&p) {
                PointKind::Real => assert!(q < 0.0),
                PointKind::Hyperideal => assert!(q > 0.0),
                PointKind::Ideal => assert!(q.abs() < 3e-9),
            }
            let rot = Isometry::rotation(&rotation_z(rng.random_range(0.0..PI)));
            assert_eq!(classify_point(&rot.apply_point(&p)), classify_point(&p));
        }
    }
}
