use std::f64::consts::{FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::graphs::corpus;
use crate::mink::rotation_between;
use crate::polyhedron::shapes::*;

fn point(x: f64, y: f64, z: f64) -> ProjectivePoint {
    ProjectivePoint::new(x, y, z)
}

fn precise() -> QuadratureOptions {
    QuadratureOptions::with_tol(1e-8)
}

#[test]
fn coplanar_ideal_points_have_no_volume() {
    let on_circle = |a: f64| point(0.6 * a.cos(), 0.6 * a.sin(), 0.8);
    let v = ideal_tetrahedron_volume(&[on_circle(0.1), on_circle(1.7), on_circle(3.0), on_circle(4.4)]).unwrap();
    assert!(v.abs() < 1e-12);
}

#[test]
fn not_ideal_is_rejected() {
    let pts = [point(1.0, 0.0, 0.0), point(0.0, 1.0, 0.0), point(0.0, 0.0, 1.0), point(-1.1, 0.0, 0.0)];
    assert!(matches!(ideal_tetrahedron_volume(&pts), Err(Error::NotIdeal { .. })));
}

#[test]
fn regular_ideal_tetrahedron() {
    let d = tetrahedron_directions();
    let pts = [0, 1, 2, 3].map(|i| ProjectivePoint::from_vec(d[i]));
    let v = ideal_tetrahedron_volume(&pts).unwrap();
    assert!((v - 3.0 * lobachevsky(PI / 3.0)).abs() < 1e-12);

    // oracle: integrate the volume element over the same region
    let t = regular_tetrahedron(1.0).unwrap().truncate().unwrap();
    let q = quadrature_volume(&t, &QuadratureOptions::with_tol(1e-6)).unwrap();
    assert_eq!(q.method, VolumeMethod::KleinQuadrature);
    assert!((q.value - v).abs() < 1e-4, "{} vs {}", q.value, v);

    let r = volume(&regular_tetrahedron(1.0).unwrap()).unwrap();
    assert_eq!(r.method, VolumeMethod::IdealDecomposition);
    assert!((r.value - v).abs() < 1e-12);
}

#[test]
fn octahedron_quarters() {
    let e = [
        point(1.0, 0.0, 0.0),
        point(0.0, 1.0, 0.0),
        point(-1.0, 0.0, 0.0),
        point(0.0, -1.0, 0.0),
    ];
    let (top, bottom) = (point(0.0, 0.0, 1.0), point(0.0, 0.0, -1.0));
    let mut total = 0.0;
    for k in 0..4 {
        let v = ideal_tetrahedron_volume(&[top, bottom, e[k], e[(k + 1) % 4]]).unwrap();
        assert!((v - 2.0 * lobachevsky(FRAC_PI_4)).abs() < 1e-12);
        total += v;
    }
    assert!((total - 8.0 * lobachevsky(FRAC_PI_4)).abs() < 1e-12);

    let t = regular_octahedron(1.0).unwrap().truncate().unwrap();
    let q = quadrature_volume(&t, &QuadratureOptions::with_tol(1e-6)).unwrap();
    assert!((q.value - total).abs() < 1e-4, "{} vs {}", q.value, total);
}

#[test]
fn empty_truncation_has_zero_volume() {
    // the real vertices all lie beyond the polar plane x = 1/3 of the first
    let pts = [
        Vec3::new(3.0, 0.0, 0.0),
        Vec3::new(0.6, 0.3, 0.1),
        Vec3::new(0.6, -0.3, 0.1),
        Vec3::new(0.6, 0.0, -0.3),
    ];
    let p = Polyhedron::from_vertices(&pts, corpus::tetrahedron()).unwrap();
    assert!(matches!(volume(&p), Err(Error::ImproperInput { .. })));
    let t = p.truncate_generalized().unwrap();
    assert!(t.is_empty());
    let r = truncation_volume(&t, &QuadratureOptions::default()).unwrap();
    assert_eq!(r.value, 0.0);
    assert_eq!(r.error_estimate, 0.0);
}

#[test]
fn compact_tetrahedron_matches_monte_carlo() {
    let p = regular_tetrahedron(0.5).unwrap();
    let r = volume(&p).unwrap();
    assert_eq!(r.method, VolumeMethod::KleinQuadrature);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 400_000;
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..n {
        let x = Vec3::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
        let f = if p.planes().iter().all(|pl| pl.eval(&x) <= 0.0) {
            1.0 / (1.0 - x.norm_squared()).powi(2)
        } else {
            0.0
        };
        sum += f;
        sum2 += f * f;
    }
    let mean = sum / n as f64;
    let sigma = ((sum2 / n as f64 - mean * mean) / n as f64).sqrt();
    assert!((r.value - mean).abs() < 4.0 * sigma + r.error_estimate, "{} vs {} ± {}", r.value, mean, sigma);
}

#[test]
fn cone_decomposition_is_apex_independent() {
    for p in [cube(1.0 / 3f64.sqrt()).unwrap(), regular_octahedron(1.0).unwrap()] {
        let t = p.truncate().unwrap();
        let base = cone_volume(&t, 0).unwrap();
        for apex in 1..t.vertices().len() {
            assert!((cone_volume(&t, apex).unwrap() - base).abs() < 1e-8);
        }
    }
    let t = cube(1.0 / 3f64.sqrt()).unwrap().truncate().unwrap();
    let q = quadrature_volume(&t, &QuadratureOptions::with_tol(1e-6)).unwrap();
    assert!((q.value - cone_volume(&t, 0).unwrap()).abs() < 1e-4);
}

#[test]
fn volume_is_monotone_under_inclusion() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let base = cube(0.5).unwrap();
    let outer = region_volume(base.planes(), &precise()).unwrap();
    for _ in 0..10 {
        let dir = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let mut planes = base.planes().to_vec();
        planes.push(OrientedPlane::from_affine(dir.normalize(), rng.random_range(0.1..0.6)));
        let inner = region_volume(&planes, &precise()).unwrap();
        assert!(inner.value <= outer.value + inner.error_estimate + outer.error_estimate);
    }
    assert!((outer.value - volume_with(&base, &precise()).unwrap().value).abs() < 1e-7);
}

#[test]
fn volume_is_isometry_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for p in [regular_tetrahedron(0.6).unwrap(), regular_tetrahedron(1.4).unwrap(), prism(3, 0.7, 0.4).unwrap()] {
        let dir = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let iso = Isometry::boost_to_origin(&(dir.normalize() * 0.3))
            .after(&Isometry::rotation(&rotation_between(&Vec3::x(), &dir)));
        let q = p.transformed(&iso).unwrap();
        let (a, b) = (volume_with(&p, &precise()).unwrap(), volume_with(&q, &precise()).unwrap());
        assert!((a.value - b.value).abs() < 1e-6, "{} vs {}", a.value, b.value);
    }
}

fn lerp_path(a: Vec<Vec3>, b: Vec<Vec3>) -> impl Fn(f64) -> Result<Polyhedron> {
    move |t| {
        let pts: Vec<Vec3> = a.iter().zip(&b).map(|(x, y)| x * (1.0 - t) + y * t).collect();
        Polyhedron::from_vertices(&pts, corpus::tetrahedron())
    }
}

#[test]
fn schlafli_constant_path() {
    let p = regular_tetrahedron(0.6).unwrap();
    let r = schlafli_residual(|_| Ok(p.clone()), 0.0, 1e-4).unwrap();
    assert!(r < 1e-6);
}

#[test]
fn schlafli_on_compact_and_hyperideal_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for radii in [0.4..0.9, 1.05..1.5] {
        let mut done = 0;
        while done < 3 {
            let a = random_proper_tetrahedron(&mut rng, radii.clone());
            let b = random_proper_tetrahedron(&mut rng, radii.clone());
            let path = lerp_path(a.vertices().to_vec(), b.vertices().to_vec());
            match schlafli_residual(&path, 0.5, 1e-4) {
                Ok(r) => {
                    assert!(r < 1e-3, "residual {r}");
                    done += 1;
                }
                Err(Error::PathDiscontinuous(_)) => {}
                Err(e) => {
                    if path(0.5).map(|p| p.classify_vertices().overall).ok()
                        == Some(crate::polyhedron::Properness::Proper)
                    {
                        panic!("{e}");
                    }
                }
            }
        }
    }
}

#[test]
fn schlafli_detects_kind_changes() {
    // vertex radii cross the sphere inside the window
    let path = |t: f64| tetrahedron_with_radii([1.0 + t, 0.6, 0.6, 0.6]);
    assert!(matches!(schlafli_residual(path, 0.0, 1e-4), Err(Error::PathDiscontinuous(_))));
}
