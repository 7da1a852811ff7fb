use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::graphs::corpus;
use crate::mink::OrientedPlane;
use crate::polyhedron::shapes;
use crate::volume::{lobachevsky, volume};

fn quick() -> FlowOptions {
    FlowOptions { t_min: 0.05, initial_step: 2e-2, ..FlowOptions::default() }
}

fn max_volume_k4() -> f64 {
    8.0 * lobachevsky(PI / 4.0)
}

/// Regular tetrahedron whose dihedral angles all equal `angle`.
fn regular_with_angle(angle: f64) -> Polyhedron {
    let (mut lo, mut hi) = (0.2, 3f64.sqrt() - 1e-9);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let a = shapes::regular_tetrahedron(mid).unwrap().dihedral_angles().unwrap()[0];
        if a > angle {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    shapes::regular_tetrahedron(0.5 * (lo + hi)).unwrap()
}

/// Follows constant angle vectors from `seed` in small steps.
fn continue_to(seed: &Polyhedron, angle: f64) -> Polyhedron {
    let g = seed.skeleton().clone();
    let start = seed.dihedral_angles().unwrap()[0];
    let mut p = seed.clone();
    for i in 1..=20 {
        let a = start + (angle - start) * i as f64 / 20.0;
        p = realize_from_angles(&g, &AngleVector::constant(g.edge_count(), a).unwrap(), &p).unwrap();
    }
    p
}

#[test]
fn smaller_angles_give_larger_volume() {
    let seed = regular_with_angle(0.6);
    let p1 = continue_to(&seed, 0.5);
    let p2 = continue_to(&p1, 0.3);
    let (v1, v2) = (volume(&p1).unwrap().value, volume(&p2).unwrap().value);
    assert!(v2 > v1 + 1e-3, "{v1} {v2}");
    let own = regular_with_angle(0.3);
    assert!((volume(&own).unwrap().value - v2).abs() < 1e-4);
}

#[test]
fn spherical_angles_are_not_realized() {
    let g = corpus::tetrahedron();
    let seed = regular_with_angle(0.5);
    let theta = AngleVector::constant(6, PI / 2.0).unwrap();
    assert!(matches!(
        realize_from_angles(&g, &theta, &seed),
        Err(Error::NewtonDiverged { .. } | Error::SkeletonChanged(_))
    ));
}

#[test]
fn hyperideal_tetrahedron_flows_without_degenerations() {
    let p0 = regular_with_angle(0.5);
    let trace = run_flow(&p0, &quick()).unwrap();
    assert!(trace.stopped_early.is_none());
    assert_eq!(trace.events.len(), 1);
    assert_eq!(trace.events[0].kind, FlowEventKind::BecameHyperidealOnly);
    assert_eq!(trace.events[0].t_value, 1.0);
    assert!(trace.is_monotone(), "drop {}", trace.worst_drop());
    assert!((trace.steps.last().unwrap().t - 0.05).abs() < 1e-12);
    // the volume at angle 0.025 is within 1% of the maximum
    assert!((trace.sup_estimate - max_volume_k4()).abs() < 0.01 * max_volume_k4(), "{}", trace.sup_estimate);
}

#[test]
fn compact_tetrahedron_crosses_the_sphere() {
    let p0 = shapes::regular_tetrahedron(0.5).unwrap();
    let trace = run_flow(&p0, &quick()).unwrap();
    assert!(trace.stopped_early.is_none(), "{:?}", trace.stopped_early);
    let ideal: Vec<_> = trace
        .events
        .iter()
        .filter(|e| matches!(e.kind, FlowEventKind::VertexBecameIdeal { .. }))
        .collect();
    assert_eq!(ideal.len(), 4);
    assert!(trace.events.iter().any(|e| e.kind == FlowEventKind::BecameHyperidealOnly));
    assert!(trace.is_monotone(), "drop {}", trace.worst_drop());
    for w in trace.events.windows(2) {
        assert!(w[0].t_value >= w[1].t_value);
    }
    assert!((trace.sup_estimate - max_volume_k4()).abs() < 0.01 * max_volume_k4(), "{}", trace.sup_estimate);
}

#[test]
fn random_tetrahedra_reach_the_maximum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..2 {
        let p0 = shapes::random_proper_tetrahedron(&mut rng, 0.3..0.8);
        let opts = FlowOptions { seed, ..quick() };
        let trace = run_flow(&p0, &opts).unwrap();
        assert!(trace.stopped_early.is_none(), "{:?}", trace.stopped_early);
        assert!(trace.is_monotone(), "drop {}", trace.worst_drop());
        assert!((trace.sup_estimate - max_volume_k4()).abs() < 0.02 * max_volume_k4());
    }
}

#[test]
fn seed_changes_the_perturbation_only() {
    let p0 = regular_with_angle(0.5);
    let opts = FlowOptions { t_min: 0.9, ..FlowOptions::default() };
    let a = run_flow(&p0, &opts).unwrap();
    let b = run_flow(&p0, &opts).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    let c = run_flow(&p0, &FlowOptions { seed: 7, ..opts }).unwrap();
    assert!((a.sup_estimate - c.sup_estimate).abs() < 1e-4);
}

#[test]
fn csv_lists_steps_and_events() {
    let p0 = regular_with_angle(0.5);
    let trace = run_flow(&p0, &FlowOptions { t_min: 0.9, ..FlowOptions::default() }).unwrap();
    let csv = trace.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,volume,vol_error,event,skeleton_hash"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), trace.steps.len() + trace.events.len());
    assert!(rows.iter().all(|r| r.len() == 5 && r[4] == corpus::tetrahedron().skeleton_hash()));
    assert_eq!(rows.iter().filter(|r| r[3] == "BecameHyperidealOnly").count(), 1);
    let ts: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(ts.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn rejects_bad_inputs() {
    let ideal = shapes::regular_tetrahedron(1.0).unwrap();
    assert!(matches!(run_flow(&ideal, &FlowOptions::default()), Err(Error::InvalidArgument(_))));
    let p = regular_with_angle(0.5);
    let opts = FlowOptions { perturbation: 1e-6, ..FlowOptions::default() };
    assert!(matches!(run_flow(&p, &opts), Err(Error::InvalidArgument(_))));
    assert!(matches!(sup_volume(&corpus::cube(), &p), Err(Error::SkeletonMismatch(_))));
}

/// Plane `m . x = d` through three points.
fn plane_through(a: &Vec3, b: &Vec3, c: &Vec3) -> (Vec3, f64) {
    let m = (b - a).cross(&(c - a));
    (m, m.dot(a))
}

fn meet(planes: [(Vec3, f64); 3]) -> Vec3 {
    let m = nalgebra::Matrix3::from_rows(&[planes[0].0.transpose(), planes[1].0.transpose(), planes[2].0.transpose()]);
    m.lu().solve(&Vec3::new(planes[0].1, planes[1].1, planes[2].1)).unwrap()
}

/// Square pyramid whose lateral face over the base edge `c1 c2` is pushed
/// out by `delta`, splitting the apex into a short edge: a triangular prism.
fn prism_with_short_edge(delta: f64) -> Polyhedron {
    let c: Vec<Vec3> = (0..4)
        .map(|i| {
            let a = PI / 2.0 * i as f64;
            Vec3::new(0.6 * a.cos(), 0.6 * a.sin(), -0.3)
        })
        .collect();
    let x = Vec3::new(0.0, 0.0, 0.5);
    let base = (Vec3::z(), -0.3);
    let l1 = plane_through(&c[0], &c[1], &x);
    let l3 = plane_through(&c[2], &c[3], &x);
    let (m2, d2) = plane_through(&c[1], &c[2], &x);
    let m2 = if m2.dot(&Vec3::zeros()) < d2 { m2 } else { -m2 };
    let l2 = (m2, m2.dot(&c[1]) + delta * m2.norm());
    let b0 = meet([l1, l3, l2]);
    let c1 = meet([l1, l2, base]);
    let c2 = meet([l3, l2, base]);
    let pts = [b0, c1, c2, x, c[0], c[3]];
    Polyhedron::from_vertices(&pts, corpus::prism(3)).unwrap()
}

#[test]
fn collapse_rebuilds_on_the_new_skeleton() {
    let p = prism_with_short_edge(1e-6);
    assert!((p.vertices()[0] - p.vertices()[3]).norm() < 1e-4);
    let g = p.skeleton();
    let e = g.edge_between(0, 3).unwrap();
    let result = g.edge_collapse(e).unwrap();
    assert!(result.three_connected);
    let q = rebuild_after_collapse(&p, &result).unwrap();
    assert!(crate::graphs::are_isomorphic(q.skeleton(), &corpus::pyramid(4)));
    for (f, m) in result.face_map.iter().enumerate() {
        if let Some(k) = m {
            let a: &OrientedPlane = &p.planes()[f];
            let b = &q.planes()[*k];
            assert!((a.normal() - b.normal()).norm() < 1e-3);
        }
    }
    assert!((volume(&p).unwrap().value - volume(&q).unwrap().value).abs() < 1e-3);
}

#[test]
fn replay_matches_final_skeleton() {
    let p0 = shapes::regular_tetrahedron(0.5).unwrap();
    let trace = run_flow(&p0, &FlowOptions { t_min: 0.5, ..quick() }).unwrap();
    assert_eq!(trace.replay_skeleton().unwrap(), trace.final_skeleton);
}
