//! Explicit polyhedra used as seeds, examples and test fixtures.

use std::f64::consts::PI;

use rand::Rng;

use super::Polyhedron;
use crate::error::Result;
use crate::graphs::corpus;
use crate::mink::{OrientedPlane, Vec3};

/// Unit directions of the regular tetrahedron, matching `corpus::tetrahedron`.
pub fn tetrahedron_directions() -> [Vec3; 4] {
    let s = 1.0 / 3f64.sqrt();
    [
        Vec3::new(s, s, s),
        Vec3::new(s, -s, -s),
        Vec3::new(-s, s, -s),
        Vec3::new(-s, -s, s),
    ]
}

/// Regular tetrahedron with vertices at Euclidean distance `r` from the origin.
pub fn regular_tetrahedron(r: f64) -> Result<Polyhedron> {
    let pts: Vec<Vec3> = tetrahedron_directions().iter().map(|d| d * r).collect();
    Polyhedron::from_vertices(&pts, corpus::tetrahedron())
}

/// Tetrahedron with vertex `i` at distance `radii[i]` along the regular directions.
pub fn tetrahedron_with_radii(radii: [f64; 4]) -> Result<Polyhedron> {
    let pts: Vec<Vec3> = tetrahedron_directions().iter().zip(radii).map(|(d, r)| d * r).collect();
    Polyhedron::from_vertices(&pts, corpus::tetrahedron())
}

/// Prism over a regular `n`-gon inscribed in radius `r`, with height `2h`.
pub fn prism(n: usize, r: f64, h: f64) -> Result<Polyhedron> {
    let mut pts = Vec::with_capacity(2 * n);
    for z in [-h, h] {
        for i in 0..n {
            let a = 2.0 * PI * i as f64 / n as f64;
            pts.push(Vec3::new(r * a.cos(), r * a.sin(), z));
        }
    }
    Polyhedron::from_vertices(&pts, corpus::prism(n))
}

/// Cube `[-s, s]^3`.
pub fn cube(s: f64) -> Result<Polyhedron> {
    let mut pts = Vec::with_capacity(8);
    for z in [-s, s] {
        for (x, y) in [(s, s), (-s, s), (-s, -s), (s, -s)] {
            pts.push(Vec3::new(x, y, z));
        }
    }
    Polyhedron::from_vertices(&pts, corpus::cube())
}

/// Pyramid over a regular `n`-gon of radius `r` in the plane `z = base_z`,
/// with apex `(0, 0, apex_z)`.
pub fn pyramid(n: usize, r: f64, base_z: f64, apex_z: f64) -> Result<Polyhedron> {
    let mut pts: Vec<Vec3> = (0..n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64;
            Vec3::new(r * a.cos(), r * a.sin(), base_z)
        })
        .collect();
    pts.push(Vec3::new(0.0, 0.0, apex_z));
    Polyhedron::from_vertices(&pts, corpus::pyramid(n))
}

/// Octahedron with vertices `±r e_i`.
pub fn regular_octahedron(r: f64) -> Result<Polyhedron> {
    let pts = [
        Vec3::new(r, 0.0, 0.0),
        Vec3::new(-r, 0.0, 0.0),
        Vec3::new(0.0, r, 0.0),
        Vec3::new(0.0, -r, 0.0),
        Vec3::new(0.0, 0.0, r),
        Vec3::new(0.0, 0.0, -r),
    ];
    Polyhedron::from_vertices(&pts, corpus::octahedron())
}

/// Moves every face plane by a random amount of size `eps` (normal tilt and
/// offset). Only meaningful for simple polyhedra, whose vertices are all
/// trivalent.
pub fn perturb_planes<R: Rng>(p: &Polyhedron, eps: f64, rng: &mut R) -> Result<Polyhedron> {
    let planes = p
        .planes()
        .iter()
        .map(|pl| {
            let (m, d) = pl.affine();
            let scale = m.norm();
            let tilt = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let m2 = m / scale + tilt * eps;
            OrientedPlane::from_affine(m2, d / scale + eps * rng.random_range(-1.0..1.0))
        })
        .collect();
    Polyhedron::build(planes, p.skeleton().clone())
}

/// A random proper tetrahedron: regular directions slightly jittered and radii
/// drawn from `radii`. Retries until the result is a proper polyhedron.
pub fn random_proper_tetrahedron<R: Rng>(rng: &mut R, radii: std::ops::Range<f64>) -> Polyhedron {
    loop {
        let pts: Vec<Vec3> = tetrahedron_directions()
            .iter()
            .map(|d| {
                let jitter = Vec3::new(rng.random_range(-0.15..0.15), rng.random_range(-0.15..0.15), rng.random_range(-0.15..0.15));
                (d + jitter).normalize() * rng.random_range(radii.clone())
            })
            .collect();
        if let Ok(p) = Polyhedron::from_vertices(&pts, corpus::tetrahedron()) {
            let report = p.classify_vertices();
            if report.overall == super::Properness::Proper && report.count(crate::mink::PointKind::Ideal) == 0 {
                return p;
            }
        }
    }
}

fn is_proper_seed(p: &Polyhedron) -> bool {
    let report = p.classify_vertices();
    report.overall == super::Properness::Proper && report.count(crate::mink::PointKind::Ideal) == 0
}

/// A random proper square pyramid: a jittered square base in a horizontal
/// plane and an apex above it, which may lie outside the ball.
pub fn random_proper_pyramid<R: Rng>(rng: &mut R) -> Polyhedron {
    loop {
        let r = rng.random_range(0.4..0.9);
        let z = rng.random_range(-0.5..-0.1);
        let mut pts: Vec<Vec3> = (0..4)
            .map(|i| {
                let a = PI / 2.0 * i as f64 + rng.random_range(-0.2..0.2);
                let rr = r * rng.random_range(0.85..1.15);
                Vec3::new(rr * a.cos(), rr * a.sin(), z)
            })
            .collect();
        pts.push(Vec3::new(rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1), rng.random_range(0.3..1.6)));
        if let Ok(p) = Polyhedron::from_vertices(&pts, corpus::pyramid(4)) {
            if is_proper_seed(&p) {
                return p;
            }
        }
    }
}

/// A random proper triangular prism: a random triangle and its image under a
/// homothety centred above it, so the lateral faces are planar.
pub fn random_proper_prism<R: Rng>(rng: &mut R) -> Polyhedron {
    loop {
        let z = rng.random_range(-0.6..-0.2);
        let bottom: Vec<Vec3> = (0..3)
            .map(|i| {
                let a = 2.0 * PI / 3.0 * i as f64 + rng.random_range(-0.3..0.3);
                let rr = rng.random_range(0.3..0.8);
                Vec3::new(rr * a.cos(), rr * a.sin(), z)
            })
            .collect();
        let apex = Vec3::new(rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2), rng.random_range(0.5..3.0));
        let s = rng.random_range(0.3..0.8);
        let top: Vec<Vec3> = bottom.iter().map(|b| apex + (b - apex) * s).collect();
        let pts: Vec<Vec3> = bottom.iter().chain(&top).copied().collect();
        if let Ok(p) = Polyhedron::from_vertices(&pts, corpus::prism(3)) {
            if is_proper_seed(&p) {
                return p;
            }
        }
    }
}
