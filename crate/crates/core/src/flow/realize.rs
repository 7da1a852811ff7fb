//! Polyhedra with prescribed dihedral angles, by Newton iteration on the
//! Minkowski normals of the faces and the lifts of the vertices.
//!
//! Unknowns are one normal `n_f` per face and one homogeneous lift `X_v` per
//! vertex. The equations are `<n_f, n_f> = 1`, `-<n_f, n_h> = cos θ_e` on every
//! edge, `<n_f, X_v> = 0` on every incidence and `|X_v| = 1`. Counting with
//! Euler's formula leaves exactly six free directions, the isometries, so each
//! step is the minimum-norm solution of the linearized system.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graphs::{AngleVector, PlanarGraph};
use crate::mink::{lift, minkowski, rotation_between, rotation_z, Isometry, OrientedPlane, Vec3, Vec4};
use crate::polyhedron::Polyhedron;
use crate::tolerances::REALIZE_ANGLE_TOL;

const MAX_ITER: usize = 40;
const CONVERGED: f64 = 1e-13;

/// Face normals and vertex lifts, the unknowns of the solve.
#[derive(Debug, Clone)]
pub(crate) struct Config {
    pub normals: Vec<Vec4>,
    pub lifts: Vec<Vec4>,
}

impl Config {
    pub fn of(p: &Polyhedron) -> Self {
        Config {
            normals: p.planes().iter().map(|pl| *pl.normal()).collect(),
            lifts: p.vertices().iter().map(|v| lift(v).normalize()).collect(),
        }
    }

    fn pack(&self) -> DVector<f64> {
        let mut x = DVector::zeros(4 * (self.normals.len() + self.lifts.len()));
        for (i, v) in self.normals.iter().chain(&self.lifts).enumerate() {
            x.fixed_rows_mut::<4>(4 * i).copy_from(v);
        }
        x
    }

    fn unpack(&mut self, x: &DVector<f64>) {
        for (i, v) in self.normals.iter_mut().chain(self.lifts.iter_mut()).enumerate() {
            *v = x.fixed_rows::<4>(4 * i).into_owned();
        }
    }
}

/// What the solve must satisfy besides the incidences.
#[derive(Debug, Clone)]
pub(crate) struct Constraints<'a> {
    /// Target angle per edge; `None` leaves the edge free.
    pub angles: &'a [Option<f64>],
    /// Pairs `(v, w)` with vertex `v` held on the polar plane of vertex `w`.
    pub polar: &'a [(usize, usize)],
}

fn eta(v: &Vec4) -> Vec4 {
    Vec4::new(-v[0], v[1], v[2], v[3])
}

fn system(g: &PlanarGraph, c: &Config, k: &Constraints) -> (DVector<f64>, DMatrix<f64>) {
    let nf = g.face_count();
    let nv = g.vertex_count();
    let incidences: usize = g.faces().iter().map(|f| f.len()).sum();
    let targeted = k.angles.iter().filter(|a| a.is_some()).count();
    let rows = nf + targeted + incidences + nv + k.polar.len();
    let mut r = DVector::zeros(rows);
    let mut j = DMatrix::zeros(rows, 4 * (nf + nv));
    let face_col = |f: usize| 4 * f;
    let vert_col = |v: usize| 4 * (nf + v);
    let mut row = 0;
    for (f, n) in c.normals.iter().enumerate() {
        r[row] = minkowski(n, n) - 1.0;
        j.view_mut((row, face_col(f)), (1, 4)).copy_from(&(eta(n) * 2.0).transpose());
        row += 1;
    }
    for (e, target) in k.angles.iter().enumerate() {
        let Some(theta) = target else { continue };
        let (f, h) = g.edge_faces(e);
        // residual measured in angle units
        let w = 1.0 / theta.sin().max(1e-3);
        let (a, b) = (&c.normals[f], &c.normals[h]);
        r[row] = w * (-minkowski(a, b) - theta.cos());
        j.view_mut((row, face_col(f)), (1, 4)).copy_from(&(eta(b) * -w).transpose());
        j.view_mut((row, face_col(h)), (1, 4)).copy_from(&(eta(a) * -w).transpose());
        row += 1;
    }
    for (f, face) in g.faces().iter().enumerate() {
        for &v in face {
            let (n, x) = (&c.normals[f], &c.lifts[v]);
            r[row] = minkowski(n, x);
            j.view_mut((row, face_col(f)), (1, 4)).copy_from(&eta(x).transpose());
            j.view_mut((row, vert_col(v)), (1, 4)).copy_from(&eta(n).transpose());
            row += 1;
        }
    }
    for (v, x) in c.lifts.iter().enumerate() {
        r[row] = x.norm_squared() - 1.0;
        j.view_mut((row, vert_col(v)), (1, 4)).copy_from(&(x * 2.0).transpose());
        row += 1;
    }
    for &(v, w) in k.polar {
        let (x, y) = (&c.lifts[v], &c.lifts[w]);
        r[row] = minkowski(x, y);
        j.view_mut((row, vert_col(v)), (1, 4)).copy_from(&eta(y).transpose());
        j.view_mut((row, vert_col(w)), (1, 4)).copy_from(&eta(x).transpose());
        row += 1;
    }
    (r, j)
}

/// Gauss–Newton with minimum-norm steps and residual backtracking.
pub(crate) fn newton(g: &PlanarGraph, start: &Config, k: &Constraints) -> Result<Config> {
    let mut c = start.clone();
    let mut x = c.pack();
    let (mut r, mut j) = system(g, &c, k);
    let mut norm = r.norm();
    for _ in 0..MAX_ITER {
        if r.amax() < CONVERGED {
            return Ok(c);
        }
        let svd = j.clone().svd(true, true);
        let cutoff = 1e-12 * svd.singular_values.max();
        let step = svd.solve(&(-&r), cutoff).map_err(|_| Error::NewtonDiverged { residual: norm })?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let trial_x = &x + &step * lambda;
            let mut trial = c.clone();
            trial.unpack(&trial_x);
            let (tr, tj) = system(g, &trial, k);
            let tn = tr.norm();
            if tn.is_finite() && (tn < norm || tr.amax() < CONVERGED) {
                x = trial_x;
                c = trial;
                r = tr;
                j = tj;
                norm = tn;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if r.amax() < CONVERGED * 100.0 {
        return Ok(c);
    }
    Err(Error::NewtonDiverged { residual: norm })
}

/// Builds the polyhedron of a converged configuration and checks its angles.
pub(crate) fn assemble(g: &PlanarGraph, c: &Config, k: &Constraints) -> Result<Polyhedron> {
    let planes: Vec<OrientedPlane> = c.normals.iter().map(|n| OrientedPlane::from_normal(*n)).collect();
    let p = Polyhedron::build(planes, g.clone()).map_err(|e| Error::SkeletonChanged(e.to_string()))?;
    let angles = p.dihedral_angles().map_err(|e| Error::SkeletonChanged(e.to_string()))?;
    for (e, target) in k.angles.iter().enumerate() {
        if let Some(theta) = target {
            let miss = (angles[e] - theta).abs();
            if miss > REALIZE_ANGLE_TOL {
                return Err(Error::NewtonDiverged { residual: miss });
            }
        }
    }
    Ok(p)
}

/// Solves from `seed` and returns the gauge-fixed result.
pub(crate) fn realize_constrained(seed: &Polyhedron, k: &Constraints) -> Result<Polyhedron> {
    let g = seed.skeleton();
    let c = newton(g, &Config::of(seed), k)?;
    gauge_fix(&assemble(g, &c, k)?)
}

/// A polyhedron with skeleton `g` and dihedral angles `theta`, found by Newton
/// iteration from `seed` (which must be close enough for the iteration to
/// converge). The result is gauge-fixed, see [`gauge_fix`].
pub fn realize_from_angles(g: &PlanarGraph, theta: &AngleVector, seed: &Polyhedron) -> Result<Polyhedron> {
    if seed.skeleton() != g {
        return Err(Error::SkeletonMismatch("seed has a different skeleton".into()));
    }
    if theta.len() != g.edge_count() {
        return Err(Error::InvalidArgument(format!("{} angles for {} edges", theta.len(), g.edge_count())));
    }
    let targets: Vec<Option<f64>> = theta.values().iter().map(|&a| Some(a)).collect();
    realize_constrained(seed, &Constraints { angles: &targets, polar: &[] })
}

/// A point inside the truncation: the centroid of its vertices.
pub(crate) fn interior_point(p: &Polyhedron) -> Option<Vec3> {
    let t = p.truncate_generalized().ok()?;
    if t.is_empty() {
        return None;
    }
    let c = t.vertices().iter().sum::<Vec3>() / t.vertices().len() as f64;
    (c.norm() < 1.0 - 1e-9).then_some(c)
}

/// Normal form up to isometry: the truncation is boosted until the centroid
/// of its vertices sits at the origin (the centroid is not equivariant, so
/// this is iterated to a fixed point), face 0 is
/// rotated to face `+z`, and the first vertex of face 0 is turned into the
/// half-plane `y = 0, x > 0`.
pub fn gauge_fix(p: &Polyhedron) -> Result<Polyhedron> {
    let mut q = p.clone();
    for _ in 0..60 {
        let Some(c) = interior_point(&q) else { break };
        if c.norm() < 1e-14 {
            break;
        }
        q = q.transformed(&Isometry::boost_to_origin(&c))?;
    }
    let (m, _) = q.planes()[0].affine();
    q = q.transformed(&Isometry::rotation(&rotation_between(&m, &Vec3::z())))?;
    let first = q.vertices()[q.skeleton().face(0)[0]];
    if first[0].hypot(first[1]) > 1e-12 {
        q = q.transformed(&Isometry::rotation(&rotation_z(-first[1].atan2(first[0]))))?;
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedron::shapes::*;

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = tetrahedron_with_radii([0.7, 1.2, 0.8, 0.9]).unwrap();
        let g = p.skeleton();
        let targets: Vec<Option<f64>> = vec![Some(0.9), None, Some(1.1), Some(0.4), Some(0.7), Some(1.3)];
        let k = Constraints { angles: &targets, polar: &[(0, 1)] };
        let c = Config::of(&p);
        let (r0, j) = system(g, &c, &k);
        let x = c.pack();
        let h = 1e-7;
        for col in 0..x.len() {
            let mut xp = x.clone();
            xp[col] += h;
            let mut cp = c.clone();
            cp.unpack(&xp);
            let (rp, _) = system(g, &cp, &k);
            let fd = (rp - &r0) / h;
            for row in 0..r0.len() {
                assert!((fd[row] - j[(row, col)]).abs() < 1e-5, "row {row} col {col}");
            }
        }
    }

    #[test]
    fn own_angles_return_the_seed() {
        for p in [regular_tetrahedron(0.6).unwrap(), prism(3, 0.8, 0.5).unwrap(), cube(0.5).unwrap()] {
            let theta = AngleVector::new(p.dihedral_angles().unwrap()).unwrap();
            let q = realize_from_angles(p.skeleton(), &theta, &p).unwrap();
            let fixed = gauge_fix(&p).unwrap();
            for (a, b) in q.vertices().iter().zip(fixed.vertices()) {
                assert!((a - b).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn gauge_is_idempotent_and_isometry_blind() {
        let p = tetrahedron_with_radii([0.7, 1.2, 0.8, 0.9]).unwrap();
        let once = gauge_fix(&p).unwrap();
        let iso = Isometry::boost_to_origin(&Vec3::new(0.2, -0.1, 0.3));
        let moved = gauge_fix(&p.transformed(&iso).unwrap()).unwrap();
        let twice = gauge_fix(&once).unwrap();
        let (m, _) = once.planes()[0].affine();
        assert!((m.normalize() - Vec3::z()).norm() < 1e-12);
        for ((a, b), c) in once.vertices().iter().zip(twice.vertices()).zip(moved.vertices()) {
            assert!((a - b).norm() < 1e-9);
            assert!((a - c).norm() < 1e-9);
        }
    }

    #[test]
    fn nearby_angles_are_realized() {
        let p = prism(3, 0.8, 0.5).unwrap();
        let theta: Vec<f64> = p.dihedral_angles().unwrap().iter().enumerate().map(|(e, a)| a - 0.01 * (1 + e % 3) as f64).collect();
        let theta = AngleVector::new(theta).unwrap();
        let q = realize_from_angles(p.skeleton(), &theta, &p).unwrap();
        for (a, b) in q.dihedral_angles().unwrap().iter().zip(theta.values()) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
